// Copyright 2026 the xicor authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace xicor {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptySampleError : public Error {
 public:
  using Error::Error;
};

class NonFiniteValueError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class TooFewPointsError : public Error {
 public:
  using Error::Error;
};

class NotUnivariateError : public Error {
 public:
  using Error::Error;
};

class DuplicateXError : public Error {
 public:
  using Error::Error;
};

class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

class InvalidKappaError : public Error {
 public:
  using Error::Error;
};

class NegativeVarianceError : public Error {
 public:
  using Error::Error;
};

class InvalidModelParamError : public Error {
 public:
  using Error::Error;
};

class QuadratureFailureError : public Error {
 public:
  using Error::Error;
};

class ModelLacksConditionalError : public Error {
 public:
  using Error::Error;
};

class TooFewValuesError : public Error {
 public:
  using Error::Error;
};

class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace xicor
