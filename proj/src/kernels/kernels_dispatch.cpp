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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "xicor/kernels.hpp"

namespace xicor::kernels {
namespace {

std::atomic<const KernelFuncs*> g_active{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const KernelFuncs* resolve() {
  const char* env = std::getenv("XICOR_KERNELS");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) {
    g_backend.store(Backend::scalar);
    return &scalar_funcs();
  }
#if defined(XICOR_HAVE_AVX2)
  bool want_avx2 = (env == nullptr || std::strcmp(env, "avx2") == 0);
  if (want_avx2 && avx2_available()) {
    g_backend.store(Backend::avx2);
    return &avx2_funcs();
  }
#endif
  g_backend.store(Backend::scalar);
  return &scalar_funcs();
}

}  // namespace

bool avx2_available() {
#if defined(XICOR_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const KernelFuncs& active() {
  const KernelFuncs* f = g_active.load(std::memory_order_acquire);
  if (f == nullptr) {
    f = resolve();
    g_active.store(f, std::memory_order_release);
  }
  return *f;
}

Backend active_backend() {
  active();
  return g_backend.load();
}

void set_backend(Backend b) {
#if defined(XICOR_HAVE_AVX2)
  if (b == Backend::avx2 && avx2_available()) {
    g_backend.store(Backend::avx2);
    g_active.store(&avx2_funcs(), std::memory_order_release);
    return;
  }
#endif
  g_backend.store(Backend::scalar);
  g_active.store(&scalar_funcs(), std::memory_order_release);
  (void)b;
}

}  // namespace xicor::kernels
