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

// End-to-end checks of the CLI binary (path in $XICOR_CLI): exit codes,
// JSON fields, determinism, and the dump/estimate round trip.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("XICOR_CLI");
  REQUIRE(bin != nullptr);
  const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  std::array<char, 4096> buf;
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    res.out.append(buf.data(), got);
  }
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << content;
}

}  // namespace

TEST_CASE("estimate: d=1 monotone data gives (n-2)/(n+1)") {
  write_file("/tmp/cli_inc.csv", "1,1\n2,2\n3,3\n");
  const RunResult r = run_cli("estimate --input /tmp/cli_inc.csv");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["coefficient"].get<double>() == 0.25);
  CHECK(doc["estimator_kind"] == "right_nn");
  CHECK(doc["n"] == 3);
  CHECK(doc["d"] == 1);
  CHECK(doc["ties_flag"] == false);
}

TEST_CASE("estimate: 2-row nn worked example") {
  write_file("/tmp/cli_two.csv", "1,1\n2,2\n");
  const RunResult r = run_cli("estimate --input /tmp/cli_two.csv --kind nn");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["coefficient"].get<double>() == -1.0);
  CHECK(doc["variance_est"].is_null());
}

TEST_CASE("estimate: NaN cell exits 2") {
  write_file("/tmp/cli_nan.csv", "1,1\nnan,2\n");
  CHECK(run_cli("estimate --input /tmp/cli_nan.csv").exit_code == 2);
  write_file("/tmp/cli_bad.csv", "1,1\nfoo,2\n");
  CHECK(run_cli("estimate --input /tmp/cli_bad.csv").exit_code == 2);
  CHECK(run_cli("estimate --input /tmp/absent_file.csv").exit_code == 2);
}

TEST_CASE("estimate: too few points exits 3") {
  write_file("/tmp/cli_one.csv", "1,1\n");
  CHECK(run_cli("estimate --input /tmp/cli_one.csv --kind nn").exit_code == 3);
}

TEST_CASE("test: invalid kappa exits 4, valid kappa runs") {
  write_file("/tmp/cli_data.csv",
             "0.1,0.9\n0.4,0.2\n0.7,0.6\n0.2,0.3\n0.9,0.8\n0.5,0.1\n");
  CHECK(run_cli("test --input /tmp/cli_data.csv --kappa 1.2").exit_code == 4);
  const RunResult r = run_cli("test --input /tmp/cli_data.csv --kappa 0.0");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.contains("reject"));
  CHECK(doc["threshold"].get<double>() >= 0.0);
}

TEST_CASE("ci: d=3 dataset targets E[xi_n]") {
  std::string csv;
  for (int i = 0; i < 30; ++i) {
    const double a = 0.1 * i, b = 0.07 * i + 0.3, c = 3.0 - 0.05 * i;
    csv += std::to_string(a) + "," + std::to_string(b) + "," +
           std::to_string(c) + "," + std::to_string(a * b - c) + "\n";
  }
  write_file("/tmp/cli_d3.csv", csv);
  const RunResult r = run_cli("ci --input /tmp/cli_d3.csv --alpha 0.05");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["target_note"] == "E[xi_n]");
  CHECK(doc["estimator_kind"] == "nn");
  CHECK(doc["lower"].get<double>() <= doc["upper"].get<double>());
  CHECK(doc["level"].get<double>() == 0.95);
}

TEST_CASE("ci: d=1 interval is coefficient +- z * stderr") {
  write_file("/tmp/cli_ci.csv",
             "0.1,0.2\n0.5,0.1\n0.9,0.7\n0.3,0.4\n0.7,0.9\n0.2,0.6\n"
             "0.8,0.5\n0.4,0.35\n0.6,0.65\n0.15,0.05\n");
  const RunResult r = run_cli("ci --input /tmp/cli_ci.csv --alpha 0.05");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  const double coeff = doc["coefficient"].get<double>();
  const double se = doc["stderr"].get<double>();
  const double lower = doc["lower"].get<double>();
  const double upper = doc["upper"].get<double>();
  CHECK(std::abs((coeff - lower) - 1.959963985 * se) <= 1e-6);
  CHECK(std::abs((upper - coeff) - 1.959963985 * se) <= 1e-6);
  CHECK(doc["target_note"] == "xi");
}

TEST_CASE("simulate: byte-identical reruns") {
  const std::string args =
      "simulate --model independent_uniform --n 400 --reps 150 --seed 1";
  const RunResult a = run_cli(args);
  const RunResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  const json doc = json::parse(a.out);
  CHECK(doc["config"]["model"] == "independent_uniform");
  CHECK(doc["result"]["coefficients"].size() == 150);
}

TEST_CASE("simulate: dump/estimate round trip reproduces replicate 0") {
  const RunResult sim = run_cli(
      "simulate --model gaussian_copula --rho 0.5 --n 300 --reps 5 --seed 9 "
      "--dump-sample /tmp/cli_dump.csv");
  REQUIRE(sim.exit_code == 0);
  const json doc = json::parse(sim.out);
  const double recorded = doc["result"]["coefficients"][0].get<double>();

  const RunResult est = run_cli("estimate --input /tmp/cli_dump.csv --header");
  REQUIRE(est.exit_code == 0);
  const json est_doc = json::parse(est.out);
  CHECK(est_doc["coefficient"].get<double>() == recorded);
}

TEST_CASE("simulate: coverage experiment output") {
  const RunResult r = run_cli(
      "simulate --experiment coverage --model gaussian_copula --rho 0.5 "
      "--n 300 --reps 60 --seed 2 --alpha 0.05 --kappa 0.0");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["result"]["coverage_rate"].get<double>() >= 0.0);
  CHECK(doc["result"]["population_xi"].get<double>() > 0.0);
  CHECK(doc["result"]["rejection_rate"].is_number());
  CHECK(doc["result"]["ci_hits"].size() == 60);
}

TEST_CASE("simulate: degenerate coverage exits 2") {
  CHECK(run_cli("simulate --experiment coverage --model exact_function "
                "--n 200 --reps 20 --seed 1")
            .exit_code == 2);
  CHECK(run_cli("simulate --model gaussian_copula --rho 1.5 --n 100 --reps 10")
            .exit_code == 2);
}

TEST_CASE("constants: right-nn null variance is 2/5") {
  const RunResult r =
      run_cli("constants --d 1 --kind right-nn --mc-samples 50000");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["constants"][0]["null_variance"].get<double>() == 0.4);
  CHECK(std::abs(doc["constants"][0]["q_d"].get<double>() - 2.0 / 3.0) <=
        1e-9);
}

TEST_CASE("constants: csv output") {
  const RunResult r =
      run_cli("constants --d 1 --mc-samples 50000 --output csv");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("d,q_d,o_d,o_d_stderr,null_variance\n", 0) == 0);
}

TEST_CASE("config file drives simulate") {
  write_file("/tmp/cli_cfg.ini",
             "experiment=clt\nmodel=gaussian_copula\nrho=0.5\nn=200\n"
             "reps=40\nseed=4\nkind=right-nn\n");
  const RunResult from_cfg = run_cli("simulate --config /tmp/cli_cfg.ini");
  REQUIRE(from_cfg.exit_code == 0);
  const RunResult from_flags = run_cli(
      "simulate --model gaussian_copula --rho 0.5 --n 200 --reps 40 --seed 4 "
      "--kind right-nn");
  CHECK(from_cfg.out == from_flags.out);
}
