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

// xicor CLI: estimate | ci | test | simulate | constants.
//
// stdout carries exactly one JSON (or CSV) report; diagnostics go to stderr.
// Exit codes: 0 ok, 2 input/parameter error, 3 too few points, 4 invalid
// test parameter. JSON numbers are printed with 17 significant digits so
// reports diff bit-faithfully.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xicor/estimators.hpp"
#include "xicor/inference.hpp"
#include "xicor/simlab.hpp"

namespace {

using namespace xicor;

// ---------------------------------------------------------------------------
// Report writers

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// Streaming JSON writer; keys appear in insertion order so identical runs
// produce byte-identical documents.
class JsonDoc {
 public:
  void begin_object() {
    sep();
    out_ += '{';
  }
  void end_object() { out_ += '}'; }
  void begin_array() {
    sep();
    out_ += '[';
  }
  void end_array() { out_ += ']'; }
  void key(const std::string& k) {
    sep();
    out_ += '"';
    out_ += json_escape(k);
    out_ += "\":";
  }
  void value(double v) {
    sep();
    out_ += fmt_double(v);
  }
  void value(int64_t v) {
    sep();
    out_ += std::to_string(v);
  }
  void value(uint64_t v) {
    sep();
    out_ += std::to_string(v);
  }
  void value(bool v) {
    sep();
    out_ += v ? "true" : "false";
  }
  void value(const std::string& v) {
    sep();
    out_ += '"';
    out_ += json_escape(v);
    out_ += '"';
  }
  void value(const char* v) { value(std::string(v)); }
  void null() {
    sep();
    out_ += "null";
  }
  const std::string& str() const { return out_; }

 private:
  void sep() {
    if (out_.empty()) {
      return;
    }
    const char last = out_.back();
    if (last != '{' && last != '[' && last != ':') {
      out_ += ',';
    }
  }
  std::string out_;
};

// Flat CSV report: one header row plus data rows.
class CsvDoc {
 public:
  void row(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i > 0) {
        out_ += ',';
      }
      out_ += cols[i];
    }
    out_ += '\n';
  }
  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

// ---------------------------------------------------------------------------
// CSV ingestion

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return "";
  }
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, int64_t line_no) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error("line " + std::to_string(line_no) + ": cannot parse '" + cell +
                "' as a number");
  }
  return v;
}

Sample read_csv_sample(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open input file: " + path);
  }
  std::vector<std::vector<double>> x_rows;
  std::vector<double> y;
  std::string line;
  int64_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) {
      continue;
    }
    const std::string t = trim(line);
    if (t.empty()) {
      continue;
    }
    std::vector<double> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = t.find(',', start);
      const std::string cell =
          trim(comma == std::string::npos ? t.substr(start)
                                          : t.substr(start, comma - start));
      cells.push_back(parse_cell(cell, line_no));
      if (comma == std::string::npos) {
        break;
      }
      start = comma + 1;
    }
    if (cells.size() < 2) {
      throw DimensionMismatchError("line " + std::to_string(line_no) +
                                   ": need at least 2 columns (x1..xd, y)");
    }
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw DimensionMismatchError("line " + std::to_string(line_no) +
                                   ": ragged row");
    }
    y.push_back(cells.back());
    cells.pop_back();
    x_rows.push_back(std::move(cells));
  }
  return validate_sample(x_rows, y);
}

void dump_sample_csv(const Sample& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open dump file for writing: " + path);
  }
  for (int c = 1; c <= s.d(); ++c) {
    out << "x" << c << ",";
  }
  out << "y\n";
  for (int64_t i = 0; i < s.n(); ++i) {
    for (int c = 0; c < s.d(); ++c) {
      out << fmt_double(s.x(i, c)) << ",";
    }
    out << fmt_double(s.y(i)) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Shared option blocks

struct DataOptions {
  std::string input_path;
  bool has_header = false;
  std::string kind = "auto";
  std::string output = "json";
};

EstimatorKind resolve_kind(const std::string& kind, int d) {
  if (kind == "nn") {
    return EstimatorKind::nn;
  }
  if (kind == "right-nn") {
    return EstimatorKind::right_nn;
  }
  return d == 1 ? EstimatorKind::right_nn : EstimatorKind::nn;
}

const char* kind_name(EstimatorKind k) {
  return k == EstimatorKind::nn ? "nn" : "right_nn";
}

void add_data_options(CLI::App* cmd, DataOptions& opts) {
  cmd->add_option("--input", opts.input_path, "CSV file with columns x1..xd,y")
      ->required();
  cmd->add_flag("--header", opts.has_header, "first CSV row is a header");
  cmd->add_option("--kind", opts.kind, "estimator kind")
      ->check(CLI::IsMember({"auto", "nn", "right-nn"}))
      ->default_val("auto");
  cmd->add_option("--output", opts.output, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->default_val("json");
}

void emit_estimate_fields(JsonDoc& doc, const EstimateReport& rep) {
  doc.key("n");
  doc.value(rep.n);
  doc.key("d");
  doc.value(static_cast<int64_t>(rep.d));
  doc.key("estimator_kind");
  doc.value(kind_name(rep.kind));
  doc.key("coefficient");
  doc.value(rep.coefficient);
  doc.key("variance_est");
  if (rep.variance_est.has_value()) {
    doc.value(*rep.variance_est);
  } else {
    doc.null();
  }
  doc.key("variance_clamped");
  doc.value(rep.variance_clamped);
  doc.key("stderr");
  if (rep.variance_est.has_value()) {
    doc.value(rep.standard_error());
  } else {
    doc.null();
  }
  doc.key("ties_flag");
  doc.value(rep.ties_flag);
}

std::vector<std::string> estimate_csv_cells(const EstimateReport& rep) {
  return {std::to_string(rep.n),
          std::to_string(rep.d),
          kind_name(rep.kind),
          fmt_double(rep.coefficient),
          rep.variance_est ? fmt_double(*rep.variance_est) : "",
          rep.variance_clamped ? "true" : "false",
          rep.variance_est ? fmt_double(rep.standard_error()) : "",
          rep.ties_flag ? "true" : "false"};
}

// ---------------------------------------------------------------------------
// Commands

int cmd_estimate(const DataOptions& opts) {
  const Sample s = read_csv_sample(opts.input_path, opts.has_header);
  const EstimatorKind kind = resolve_kind(opts.kind, s.d());
  const EstimateReport rep = estimate(s, kind);
  if (opts.output == "csv") {
    CsvDoc csv;
    csv.row({"n", "d", "estimator_kind", "coefficient", "variance_est",
             "variance_clamped", "stderr", "ties_flag"});
    csv.row(estimate_csv_cells(rep));
    std::fputs(csv.str().c_str(), stdout);
    return 0;
  }
  JsonDoc doc;
  doc.begin_object();
  emit_estimate_fields(doc, rep);
  doc.end_object();
  std::puts(doc.str().c_str());
  return 0;
}

int cmd_ci_or_test(const DataOptions& opts, double alpha,
                   std::optional<double> kappa) {
  const Sample s = read_csv_sample(opts.input_path, opts.has_header);
  const EstimatorKind kind = resolve_kind(opts.kind, s.d());
  const EstimateReport rep = estimate(s, kind);
  if (!rep.variance_est.has_value()) {
    throw TooFewPointsError("not enough observations for a variance estimate");
  }
  const double var = rep.variance_for_inference();

  JsonDoc doc;
  doc.begin_object();
  emit_estimate_fields(doc, rep);
  std::vector<std::string> cells = estimate_csv_cells(rep);
  std::vector<std::string> header = {
      "n",          "d",      "estimator_kind", "coefficient",
      "variance_est", "variance_clamped", "stderr", "ties_flag"};

  if (kappa.has_value()) {
    const TestResult t =
        threshold_test(rep.coefficient, var, rep.n, *kappa, alpha);
    doc.key("reject");
    doc.value(t.reject);
    doc.key("threshold");
    doc.value(t.threshold);
    doc.key("kappa");
    doc.value(t.kappa);
    doc.key("level");
    doc.value(t.level);
    header.insert(header.end(), {"reject", "threshold", "kappa", "level"});
    cells.push_back(t.reject ? "true" : "false");
    cells.push_back(fmt_double(t.threshold));
    cells.push_back(fmt_double(t.kappa));
    cells.push_back(fmt_double(t.level));
  } else {
    const ConfidenceInterval ci =
        confidence_interval(rep.coefficient, var, rep.n, alpha, rep.d);
    doc.key("lower");
    doc.value(ci.lower);
    doc.key("upper");
    doc.value(ci.upper);
    doc.key("level");
    doc.value(ci.level);
    doc.key("target_note");
    doc.value(ci.target_note);
    header.insert(header.end(), {"lower", "upper", "level", "target_note"});
    cells.push_back(fmt_double(ci.lower));
    cells.push_back(fmt_double(ci.upper));
    cells.push_back(fmt_double(ci.level));
    cells.push_back(ci.target_note);
  }
  doc.end_object();

  if (opts.output == "csv") {
    CsvDoc csv;
    csv.row(header);
    csv.row(cells);
    std::fputs(csv.str().c_str(), stdout);
  } else {
    std::puts(doc.str().c_str());
  }
  return 0;
}

struct SimulateOptions {
  std::string experiment = "clt";
  std::string model = "independent_uniform";
  int d = 1;
  double rho = 0.5;
  std::string link = "cubic";
  double sigma_e = 0.5;
  int64_t n = 1000;
  int64_t reps = 100;
  uint64_t seed = 1;
  double alpha = 0.05;
  std::optional<double> kappa;
  std::string kind = "auto";
  std::string output = "json";
  std::string dump_sample_path;
};

// Flat key=value experiment config; command-line flags take precedence.
void apply_config_file(const std::string& path, const CLI::App* sim,
                       SimulateOptions& opts, std::optional<double>& kappa) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open config file: " + path);
  }
  const auto unset = [sim](const char* flag) {
    return sim->get_option(flag)->count() == 0;
  };
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') {
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(line_no) +
                  ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto as_double = [&]() { return parse_cell(value, line_no); };
    const auto as_int = [&]() {
      return static_cast<int64_t>(parse_cell(value, line_no));
    };
    if (key == "experiment" && unset("--experiment")) {
      opts.experiment = value;
    } else if (key == "model" && unset("--model")) {
      opts.model = value;
    } else if (key == "d" && unset("--d")) {
      opts.d = static_cast<int>(as_int());
    } else if (key == "rho" && unset("--rho")) {
      opts.rho = as_double();
    } else if (key == "link" && unset("--link")) {
      opts.link = value;
    } else if (key == "sigma-e" && unset("--sigma-e")) {
      opts.sigma_e = as_double();
    } else if (key == "n" && unset("--n")) {
      opts.n = as_int();
    } else if (key == "reps" && unset("--reps")) {
      opts.reps = as_int();
    } else if (key == "seed" && unset("--seed")) {
      opts.seed = static_cast<uint64_t>(as_int());
    } else if (key == "alpha" && unset("--alpha")) {
      opts.alpha = as_double();
    } else if (key == "kappa" && unset("--kappa")) {
      kappa = as_double();
    } else if (key == "kind" && unset("--kind")) {
      opts.kind = value;
    } else if (key == "experiment" || key == "model" || key == "d" ||
               key == "rho" || key == "link" || key == "sigma-e" ||
               key == "n" || key == "reps" || key == "seed" ||
               key == "alpha" || key == "kappa" || key == "kind") {
      // flag on the command line wins
    } else {
      throw Error("config line " + std::to_string(line_no) +
                  ": unknown key '" + key + "'");
    }
  }
  if (opts.experiment != "clt" && opts.experiment != "coverage") {
    throw Error("config: experiment must be clt or coverage");
  }
  if (opts.kind != "auto" && opts.kind != "nn" && opts.kind != "right-nn") {
    throw Error("config: kind must be auto, nn or right-nn");
  }
}

ModelSpec to_model_spec(const SimulateOptions& opts) {
  ModelSpec spec;
  if (opts.model == "independent_uniform") {
    spec.family = ModelFamily::independent_uniform;
  } else if (opts.model == "gaussian_copula") {
    spec.family = ModelFamily::gaussian_copula;
  } else if (opts.model == "noisy_function") {
    spec.family = ModelFamily::noisy_function;
  } else if (opts.model == "exact_function") {
    spec.family = ModelFamily::exact_function;
  } else if (opts.model == "sphere_manifold") {
    spec.family = ModelFamily::sphere_manifold;
  } else {
    throw InvalidModelParamError("unknown model family: " + opts.model);
  }
  spec.d = opts.d;
  spec.rho = opts.rho;
  spec.sigma_e = opts.sigma_e;
  if (opts.link == "linear") {
    spec.link = LinkFunction::linear;
  } else if (opts.link == "cubic") {
    spec.link = LinkFunction::cubic;
  } else if (opts.link == "sine") {
    spec.link = LinkFunction::sine;
  } else {
    throw InvalidModelParamError("unknown link: " + opts.link);
  }
  return spec;
}

void emit_config_echo(JsonDoc& doc, const SimulateOptions& opts,
                      const ExperimentResult& res) {
  doc.key("config");
  doc.begin_object();
  doc.key("experiment");
  doc.value(res.experiment);
  doc.key("model");
  doc.value(opts.model);
  doc.key("model_resolved");
  doc.value(res.model_name);
  doc.key("d");
  doc.value(static_cast<int64_t>(opts.d));
  doc.key("rho");
  doc.value(opts.rho);
  doc.key("link");
  doc.value(opts.link);
  doc.key("sigma_e");
  doc.value(opts.sigma_e);
  doc.key("n");
  doc.value(res.n);
  doc.key("reps");
  doc.value(res.reps);
  doc.key("seed");
  doc.value(res.seed);
  doc.key("kind");
  doc.value(kind_name(res.kind));
  if (res.alpha) {
    doc.key("alpha");
    doc.value(*res.alpha);
  }
  if (res.kappa) {
    doc.key("kappa");
    doc.value(*res.kappa);
  }
  doc.end_object();
}

void emit_optional(JsonDoc& doc, const char* key,
                   const std::optional<double>& v) {
  doc.key(key);
  if (v.has_value()) {
    doc.value(*v);
  } else {
    doc.null();
  }
}

int cmd_simulate(const SimulateOptions& opts) {
  const ModelSpec spec = to_model_spec(opts);
  const auto model = make_model(spec);

  ExperimentResult res;
  if (opts.experiment == "coverage") {
    res = run_coverage_experiment(*model, opts.n, opts.reps, opts.alpha,
                                  opts.seed, opts.kappa);
  } else {
    const EstimatorKind kind = resolve_kind(opts.kind, model->d());
    res = run_clt_experiment(*model, opts.n, opts.reps, opts.seed, kind);
  }

  if (!opts.dump_sample_path.empty()) {
    RngStream rng(opts.seed, 0);  // replicate 0's stream
    dump_sample_csv(model->sample(opts.n, rng), opts.dump_sample_path);
  }

  if (opts.output == "csv") {
    CsvDoc csv;
    csv.row({"experiment", "model", "n", "reps", "seed", "kind",
             "mean_coefficient", "var_coefficient", "n_var_mc",
             "median_variance_est", "ks_standardized", "clamped_count",
             "population_xi", "coverage_rate", "mean_ci_width",
             "rejection_rate"});
    csv.row({res.experiment, res.model_name, std::to_string(res.n),
             std::to_string(res.reps), std::to_string(res.seed),
             kind_name(res.kind), fmt_double(res.mean_coefficient),
             fmt_double(res.var_coefficient), fmt_double(res.n_var_mc),
             fmt_double(res.median_variance_est),
             res.ks_standardized ? fmt_double(*res.ks_standardized) : "",
             std::to_string(res.clamped_count),
             res.population_xi_value ? fmt_double(*res.population_xi_value)
                                     : "",
             res.coverage_rate ? fmt_double(*res.coverage_rate) : "",
             res.mean_ci_width ? fmt_double(*res.mean_ci_width) : "",
             res.rejection_rate ? fmt_double(*res.rejection_rate) : ""});
    std::fputs(csv.str().c_str(), stdout);
    return 0;
  }

  JsonDoc doc;
  doc.begin_object();
  emit_config_echo(doc, opts, res);
  doc.key("result");
  doc.begin_object();
  doc.key("mean_coefficient");
  doc.value(res.mean_coefficient);
  doc.key("var_coefficient");
  doc.value(res.var_coefficient);
  doc.key("n_var_mc");
  doc.value(res.n_var_mc);
  doc.key("median_variance_est");
  doc.value(res.median_variance_est);
  emit_optional(doc, "ks_standardized", res.ks_standardized);
  doc.key("clamped_count");
  doc.value(res.clamped_count);
  emit_optional(doc, "population_xi", res.population_xi_value);
  emit_optional(doc, "coverage_rate", res.coverage_rate);
  emit_optional(doc, "mean_ci_width", res.mean_ci_width);
  emit_optional(doc, "rejection_rate", res.rejection_rate);
  if (!opts.dump_sample_path.empty()) {
    doc.key("dumped_replicate");
    doc.value(static_cast<int64_t>(0));
  }
  doc.key("coefficients");
  doc.begin_array();
  for (double c : res.coefficients) {
    doc.value(c);
  }
  doc.end_array();
  doc.key("variance_estimates");
  doc.begin_array();
  for (double v : res.variance_estimates) {
    doc.value(v);
  }
  doc.end_array();
  if (!res.ci_hits.empty()) {
    doc.key("ci_hits");
    doc.begin_array();
    for (uint8_t h : res.ci_hits) {
      doc.value(static_cast<int64_t>(h));
    }
    doc.end_array();
  }
  if (!res.rejections.empty()) {
    doc.key("rejections");
    doc.begin_array();
    for (uint8_t h : res.rejections) {
      doc.value(static_cast<int64_t>(h));
    }
    doc.end_array();
  }
  doc.end_object();
  doc.end_object();
  std::puts(doc.str().c_str());
  return 0;
}

struct ConstantsOptions {
  int d = 1;
  int d_max = 0;  // 0: single d
  std::string kind = "nn";
  int64_t mc_samples = 0;  // 0: cached default
  uint64_t seed = 0x5EEDC0DEULL;
  std::string output = "json";
};

int cmd_constants(const ConstantsOptions& opts) {
  const int d_lo = opts.d;
  const int d_hi = opts.d_max > 0 ? opts.d_max : opts.d;
  if (d_lo < 1 || d_hi < d_lo) {
    throw OutOfDomainError("invalid d range");
  }
  const EstimatorKind kind =
      opts.kind == "right-nn" ? EstimatorKind::right_nn : EstimatorKind::nn;

  std::vector<AsymptoticConstants> rows;
  for (int d = d_lo; d <= d_hi; ++d) {
    AsymptoticConstants c;
    if (opts.mc_samples > 0) {
      c.d = d;
      c.q_d = q_constant(d);
      const McEstimate o = o_constant_mc(d, opts.mc_samples, opts.seed);
      c.o_d = o.value;
      c.o_d_stderr = o.stderr;
      c.null_variance = 0.4 + 0.4 * c.q_d + 0.8 * c.o_d;
    } else {
      c = asymptotic_constants(d);
    }
    if (kind == EstimatorKind::right_nn) {
      c.null_variance = null_asymptotic_variance(d, kind);  // d must be 1
    }
    rows.push_back(c);
  }

  if (opts.output == "csv") {
    CsvDoc csv;
    csv.row({"d", "q_d", "o_d", "o_d_stderr", "null_variance"});
    for (const auto& c : rows) {
      csv.row({std::to_string(c.d), fmt_double(c.q_d), fmt_double(c.o_d),
               fmt_double(c.o_d_stderr), fmt_double(c.null_variance)});
    }
    std::fputs(csv.str().c_str(), stdout);
    return 0;
  }

  JsonDoc doc;
  doc.begin_object();
  doc.key("kind");
  doc.value(opts.kind == "right-nn" ? "right_nn" : "nn");
  doc.key("constants");
  doc.begin_array();
  for (const auto& c : rows) {
    doc.begin_object();
    doc.key("d");
    doc.value(static_cast<int64_t>(c.d));
    doc.key("q_d");
    doc.value(c.q_d);
    doc.key("o_d");
    doc.value(c.o_d);
    doc.key("o_d_stderr");
    doc.value(c.o_d_stderr);
    doc.key("null_variance");
    doc.value(c.null_variance);
    doc.end_object();
  }
  doc.end_array();
  doc.end_object();
  std::puts(doc.str().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank and nearest-neighbor dependence coefficients with "
               "asymptotic inference and a Monte Carlo lab"};
  app.require_subcommand(1);

  DataOptions est_opts;
  CLI::App* est =
      app.add_subcommand("estimate", "coefficient from a CSV file");
  add_data_options(est, est_opts);

  DataOptions ci_opts;
  double ci_alpha = 0.05;
  CLI::App* ci =
      app.add_subcommand("ci", "coefficient with confidence interval");
  add_data_options(ci, ci_opts);
  ci->add_option("--alpha", ci_alpha, "significance level")->default_val(0.05);

  DataOptions test_opts;
  double test_alpha = 0.05;
  double test_kappa = 0.0;
  CLI::App* tst =
      app.add_subcommand("test", "one-sided test of H0: xi <= kappa");
  add_data_options(tst, test_opts);
  tst->add_option("--alpha", test_alpha, "significance level")
      ->default_val(0.05);
  tst->add_option("--kappa", test_kappa, "null threshold (< 1)")->required();

  SimulateOptions sim_opts;
  double sim_kappa = 0.0;
  std::string sim_config_path;
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo experiments");
  sim->add_option("--config", sim_config_path,
                  "flat key=value experiment config file");
  sim->add_option("--experiment", sim_opts.experiment, "experiment type")
      ->check(CLI::IsMember({"clt", "coverage"}))
      ->default_val("clt");
  sim->add_option("--model", sim_opts.model, "model family")
      ->check(CLI::IsMember({"independent_uniform", "gaussian_copula",
                             "noisy_function", "exact_function",
                             "sphere_manifold"}))
      ->default_val("independent_uniform");
  sim->add_option("--d", sim_opts.d, "covariate dimension")->default_val(1);
  sim->add_option("--rho", sim_opts.rho, "gaussian copula correlation")
      ->default_val(0.5);
  sim->add_option("--link", sim_opts.link, "link function")
      ->check(CLI::IsMember({"linear", "cubic", "sine"}))
      ->default_val("cubic");
  sim->add_option("--sigma-e", sim_opts.sigma_e, "noise standard deviation")
      ->default_val(0.5);
  sim->add_option("--n", sim_opts.n, "sample size per replicate")
      ->default_val(1000);
  sim->add_option("--reps", sim_opts.reps, "number of replicates")
      ->default_val(100);
  sim->add_option("--seed", sim_opts.seed, "RNG seed")->default_val(1);
  sim->add_option("--alpha", sim_opts.alpha, "CI level (coverage)")
      ->default_val(0.05);
  CLI::Option* kappa_opt =
      sim->add_option("--kappa", sim_kappa, "also run the one-sided test");
  sim->add_option("--kind", sim_opts.kind, "estimator kind (clt)")
      ->check(CLI::IsMember({"auto", "nn", "right-nn"}))
      ->default_val("auto");
  sim->add_option("--output", sim_opts.output, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->default_val("json");
  sim->add_option("--dump-sample", sim_opts.dump_sample_path,
                  "write replicate 0's sample to this CSV path");

  ConstantsOptions const_opts;
  CLI::App* cst =
      app.add_subcommand("constants", "q_d, o_d and null variances");
  cst->add_option("--d", const_opts.d, "dimension (or range start)")
      ->default_val(1);
  cst->add_option("--d-max", const_opts.d_max, "range end (inclusive)");
  cst->add_option("--kind", const_opts.kind, "estimator kind")
      ->check(CLI::IsMember({"nn", "right-nn"}))
      ->default_val("nn");
  cst->add_option("--mc-samples", const_opts.mc_samples,
                  "o_d Monte Carlo sample count (default: cached 2e6)");
  cst->add_option("--seed", const_opts.seed, "o_d Monte Carlo seed");
  cst->add_option("--output", const_opts.output, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->default_val("json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (est->parsed()) {
      return cmd_estimate(est_opts);
    }
    if (ci->parsed()) {
      return cmd_ci_or_test(ci_opts, ci_alpha, std::nullopt);
    }
    if (tst->parsed()) {
      return cmd_ci_or_test(test_opts, test_alpha, test_kappa);
    }
    if (sim->parsed()) {
      if (kappa_opt->count() > 0) {
        sim_opts.kappa = sim_kappa;
      }
      if (!sim_config_path.empty()) {
        apply_config_file(sim_config_path, sim, sim_opts, sim_opts.kappa);
      }
      return cmd_simulate(sim_opts);
    }
    if (cst->parsed()) {
      return cmd_constants(const_opts);
    }
  } catch (const TooFewPointsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InvalidKappaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
