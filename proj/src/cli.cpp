// Copyright 2026 The qiter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qiter/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "qiter/axioms.hpp"
#include "qiter/error.hpp"
#include "qiter/grover.hpp"
#include "qiter/json_io.hpp"
#include "qiter/lsi.hpp"
#include "qiter/qwhile.hpp"
#include "qiter/trace.hpp"

#ifndef QITER_VERSION
#define QITER_VERSION "0.0.0"
#endif

namespace qiter {

using nlohmann::json;

std::string version() { return QITER_VERSION; }

namespace {

// Raised for bad flag combinations found after CLI11 parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A check ran and failed; the report is already assembled.
struct CheckFailed {
  json report;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(path + ": invalid JSON: " + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

json trace_result_json(const TraceResult& r) {
  return {{"method", std::string(to_string(r.method))},
          {"value", matrix_to_json(r.value)},
          {"rows", partition_to_json(r.rows)},
          {"cols", partition_to_json(r.cols)},
          {"terms_used", r.terms_used},
          {"residual", r.residual},
          {"converged", r.converged},
          {"disagreement", r.disagreement}};
}

json error_json(const std::string& kind, const std::string& message) {
  return {{"error", kind}, {"message", message}};
}

struct Globals {
  unsigned threads = 1;
};

// ---- trace ---------------------------------------------------------------

struct TraceArgs {
  std::string file;
  std::string method = "both";
  std::optional<double> tol;
  std::optional<std::size_t> max_terms;
};

json run_trace(const TraceArgs& a) {
  const json in = read_json(a.file);
  for (const char* key : {"matrix", "row_partition", "col_partition", "loop"}) {
    if (!in.contains(key)) throw Error(a.file + ": missing field '" + key + "'");
  }
  const PartitionedMap f(matrix_from_json(in.at("matrix")),
                         partition_from_json(in.at("row_partition")),
                         partition_from_json(in.at("col_partition")));
  const std::string loop = in.at("loop").get<std::string>();
  TraceConfig cfg;
  if (a.tol) cfg.series_tol = *a.tol;
  if (a.max_terms) cfg.max_terms = *a.max_terms;
  cfg.validate();
  try {
    TraceResult r;
    if (a.method == "series") r = ex_series(f, loop, cfg);
    else if (a.method == "ki") r = ex_kernel_image(f, loop, cfg);
    else r = ex(f, loop, cfg);
    json out = trace_result_json(r);
    if (!r.converged) throw CheckFailed{out};
    return out;
  } catch (const DivergenceError& e) {
    json rep = error_json("divergence", e.what());
    rep["term_index"] = e.term_index();
    throw CheckFailed{rep};
  } catch (const NotKiTraceableError& e) {
    json rep = error_json("not_ki_traceable", e.what());
    rep["image_residual"] = e.image_residual();
    rep["kernel_residual"] = e.kernel_residual();
    throw CheckFailed{rep};
  } catch (const InternalConsistencyError& e) {
    throw CheckFailed{error_json("internal_consistency", e.what())};
  }
}

// ---- axioms --------------------------------------------------------------

struct AxiomArgs {
  std::size_t cases = 1000;
  std::uint64_t seed = 7;
  Eigen::Index max_dim = 3;
};

json run_axioms(const AxiomArgs& a, const Globals& g) {
  AxiomCheckOptions opt;
  opt.cases = a.cases;
  opt.seed = a.seed;
  opt.max_block_dim = a.max_dim;
  opt.threads = g.threads;
  const AxiomReport report = check_trace_axioms(opt);
  json axioms = json::array();
  for (const auto& r : report.axioms) {
    json item = {{"name", r.name},
                 {"cases", r.cases},
                 {"passed", r.passed},
                 {"failed", r.failed},
                 {"worst_deviation", r.worst_deviation}};
    if (!r.first_failure.empty()) item["first_failure"] = r.first_failure;
    axioms.push_back(item);
  }
  const CounterexampleReport ce = check_vanishing_ii_counterexample();
  json counter = {{"inner", matrix_to_json(ce.inner)},
                  {"nested", matrix_to_json(ce.nested)},
                  {"joint_series_diverged", ce.joint_series_diverged},
                  {"joint_series_error", ce.joint_series_error},
                  {"joint_kernel_image_ok", ce.joint_kernel_image_ok},
                  {"flagged", ce.flagged}};
  if (ce.joint_kernel_image_ok) counter["joint_kernel_image"] = matrix_to_json(ce.joint_kernel_image);
  const bool ok = report.all_passed() && ce.flagged;
  json out = {{"all_passed", ok},
              {"seed", a.seed},
              {"axioms", axioms},
              {"vanishing_ii_counterexample", counter}};
  if (!ok) throw CheckFailed{out};
  return out;
}

// ---- lsi -----------------------------------------------------------------

struct LsiArgs {
  std::string kernel;
  std::size_t grid = kDefaultGridSize;
  std::string out;
  std::string loop;
  bool require_contraction = false;
};

json response_summary(const FrequencyResponse& r) {
  json out = {{"grid_size", r.size()},
              {"rows", partition_to_json(r.rows)},
              {"cols", partition_to_json(r.cols)},
              {"classification", std::string(to_string(lsi_classify(r)))}};
  double worst = 0.0;
  for (const auto& s : r.samples) worst = std::max(worst, operator_norm(s));
  out["max_operator_norm"] = worst;
  if (r.source_support) {
    out["support"] = {r.source_support->first, r.source_support->second};
  }
  return out;
}

json run_lsi(const LsiArgs& a, const Globals& g) {
  const FirKernel k = kernel_from_json(read_json(a.kernel));
  FrequencyResponse r = dtft(k, a.grid);
  if (!a.loop.empty()) {
    try {
      r = lsi_ex(r, a.loop, {}, g.threads);
    } catch (const DivergenceError& e) {
      throw CheckFailed{error_json("divergence", e.what())};
    }
  }
  if (!a.out.empty()) write_file(a.out, response_to_csv(r));
  json out = response_summary(r);
  if (!a.loop.empty()) out["loop"] = a.loop;
  if (a.require_contraction && lsi_classify(r) != LsiClass::lsi_contraction) {
    throw CheckFailed{out};
  }
  return out;
}

// ---- qwhile --------------------------------------------------------------

struct QwhileArgs {
  std::string file;
  std::size_t grid = kDefaultGridSize;
  std::string out;
  bool allow_contraction = false;
};

json parse_error_json(const qwhile::ParseError& e) {
  json rep = error_json("parse", e.what());
  rep["line"] = e.line();
  rep["column"] = e.column();
  return rep;
}

json run_qwhile_check(const QwhileArgs& a) {
  qwhile::Program p;
  try {
    p = qwhile::parse_unchecked(read_file(a.file));
  } catch (const qwhile::ParseError& e) {
    throw CheckFailed{parse_error_json(e)};
  }
  qwhile::CheckOptions opt;
  opt.allow_contraction = a.allow_contraction;
  const qwhile::WellFormedReport r = qwhile::check(p, opt);
  json diags = json::array();
  for (const auto& d : r.diagnostics) {
    diags.push_back({{"path", d.path}, {"message", d.message}, {"line", d.line}, {"column", d.column}});
  }
  json out = {{"ok", r.ok()}, {"program", qwhile::to_sexpr(p.root)}, {"diagnostics", diags}};
  if (r.ok()) {
    out["in_ports"] = r.in_ports;
    out["out_ports"] = r.out_ports;
  }
  if (!r.ok()) throw CheckFailed{out};
  return out;
}

json run_qwhile_run(const QwhileArgs& a, const Globals& g) {
  qwhile::CheckOptions opt;
  opt.allow_contraction = a.allow_contraction;
  qwhile::Program p;
  try {
    p = qwhile::parse(read_file(a.file), opt);
  } catch (const qwhile::ParseError& e) {
    throw CheckFailed{parse_error_json(e)};
  }
  FrequencyResponse r;
  try {
    r = qwhile::semantics(p, a.grid, {}, g.threads);
  } catch (const InternalConsistencyError& e) {
    throw CheckFailed{error_json("internal_consistency", e.what())};
  }
  if (!a.out.empty()) write_file(a.out, response_to_csv(r));
  json out = response_summary(r);
  out["program"] = qwhile::to_sexpr(p.root);
  if (lsi_classify(r) != LsiClass::lsi_contraction) throw CheckFailed{out};
  return out;
}

// ---- grover / bound ------------------------------------------------------

struct GroverArgs {
  std::uint64_t B = 0;
  std::optional<double> kappa;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  std::size_t max_iter = 0;
  std::string mode = "recurrence";
  std::string out;
  std::size_t bucket_width = 0;
};

double default_kappa(std::uint64_t B) { return 1.0 / std::sqrt(static_cast<double>(B)); }

json run_grover(const GroverArgs& a, const Globals& g) {
  GroverParams p;
  p.B = a.B;
  p.kappa = a.kappa.value_or(default_kappa(a.B));
  p.seed = a.seed;
  p.max_iterations = a.max_iter;
  p.validate();
  const McMode mode = a.mode == "statevector" ? McMode::statevector : McMode::recurrence;
  if (mode == McMode::statevector && a.B > StatevectorOptions{}.cap) {
    throw UsageError("--mode statevector supports B up to " +
                     std::to_string(StatevectorOptions{}.cap));
  }
  const MonteCarloResult r = grover_montecarlo(p, a.trials, mode, g.threads, a.bucket_width);
  if (!a.out.empty()) write_file(a.out, trials_to_csv(r.trials));
  json hist = json::array();
  for (const auto& b : r.summary.histogram) hist.push_back({b.lo, b.count});
  return {{"B", p.B},
          {"kappa", p.kappa},
          {"alpha", p.alpha()},
          {"mode", a.mode},
          {"seed", p.seed},
          {"trials", r.summary.trials},
          {"max_iterations", p.iteration_cap()},
          {"median", r.summary.median},
          {"mean", r.summary.mean},
          {"censored", r.summary.censored},
          {"bucket_width", r.summary.bucket_width},
          {"multimodal", is_multimodal(r.summary.histogram)},
          {"histogram", hist}};
}

struct BoundArgs {
  std::uint64_t B = 0;
  std::optional<double> kappa;
  std::optional<double> epsilon;
  double c = 1.0;
  std::optional<std::uint64_t> verify_n;
};

json run_bound(const BoundArgs& a) {
  if (a.B < 2) throw UsageError("--B must be at least 2");
  const double alpha = std::asin(1.0 / std::sqrt(static_cast<double>(a.B)));
  const double kappa = a.kappa.value_or(default_kappa(a.B));
  const double eps = a.epsilon.value_or(std::sin(3.0 * alpha));
  const RuntimeBound rb = grover_runtime_bound(a.B, kappa, eps);
  const std::uint64_t T = runtime_bound(rb, a.c);
  const double estimate = (8.0 * a.c + std::numbers::pi / 2.0) * std::sqrt(static_cast<double>(a.B));
  json out = {{"B", a.B},
              {"kappa", kappa},
              {"epsilon", eps},
              {"c", a.c},
              {"K", guarantee_f(0, a.B)},
              {"T", T},
              {"leading_order_estimate", estimate},
              {"ratio", static_cast<double>(T) / estimate}};
  if (a.verify_n) {
    GroverParams p;
    p.B = a.B;
    p.kappa = kappa;
    p.max_iterations = 1;
    const GuaranteeReport g = verify_guarantee(p, *a.verify_n);
    auto list = [](const std::vector<BoundViolation>& v) {
      json arr = json::array();
      for (const auto& x : v) arr.push_back({{"n", x.n}, {"detail", x.detail}});
      return arr;
    };
    out["verify"] = {{"n_max", g.n_max},
                     {"epsilon", g.epsilon},
                     {"guarantee_violations", list(g.guarantee_violations)},
                     {"robustness_violations", list(g.robustness_violations)},
                     {"ok", g.ok()}};
    if (!g.ok()) throw CheckFailed{out};
  }
  return out;
}

std::string version_text() {
  const TraceConfig t;
  std::ostringstream s;
  s << "qiter " << version() << "\n"
    << "defaults: grid=" << kDefaultGridSize << " series_tol=" << format_double(t.series_tol)
    << " max_terms=" << t.max_terms << " blowup=" << format_double(t.blowup)
    << " ki_residual_tol=" << format_double(t.ki_residual_tol)
    << " compare_tol=" << format_double(t.compare_tol)
    << " classify_tol=" << format_double(t.classify_tol)
    << " ki_rank_cutoff=" << format_double(t.ki_rank_cutoff) << "\n";
  return s.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Execution formula traces, LSI semantics and weakly measured Grover loops",
               "qiter"};
  app.require_subcommand(0, 1);
  Globals globals;
  bool show_version = false;
  app.add_flag("--version", show_version, "Print version and defaults");
  app.add_option("--threads", globals.threads, "Worker threads")
      ->check(CLI::Range(1u, 256u));

  TraceArgs ta;
  auto* trace = app.add_subcommand("trace", "Trace a partitioned matrix (JSON file)");
  trace->add_option("file", ta.file, "Input JSON")->required()->check(CLI::ExistingFile);
  trace->add_option("--method", ta.method, "series, ki or both")
      ->check(CLI::IsMember({"series", "ki", "both"}));
  trace->add_option("--tol", ta.tol, "Series stopping tolerance")->check(CLI::PositiveNumber);
  trace->add_option("--max-terms", ta.max_terms, "Series term cap")->check(CLI::PositiveNumber);

  AxiomArgs aa;
  auto* axioms = app.add_subcommand("axioms", "Check the trace axioms on random contractions");
  axioms->add_option("--cases", aa.cases, "Instances per axiom")->check(CLI::PositiveNumber);
  axioms->add_option("--seed", aa.seed, "Seed");
  axioms->add_option("--max-dim", aa.max_dim, "Largest block dimension")
      ->check(CLI::Range(1, 4));

  LsiArgs la;
  auto* lsi = app.add_subcommand("lsi", "Frequency response of an FIR kernel (JSON file)");
  lsi->add_option("kernel", la.kernel, "Kernel JSON")->required()->check(CLI::ExistingFile);
  lsi->add_option("--grid", la.grid, "Grid size")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  lsi->add_option("--out", la.out, "Response CSV path");
  lsi->add_option("--loop", la.loop, "Trace out this port block at every frequency");
  lsi->add_flag("--require-contraction", la.require_contraction,
                "Exit 1 unless the response is certified contractive");

  QwhileArgs qa;
  auto* qw = app.add_subcommand("qwhile", "qWhile programs");
  qw->require_subcommand(1);
  auto* qrun = qw->add_subcommand("run", "Evaluate a program on the frequency grid");
  auto* qcheck = qw->add_subcommand("check", "Static checks with AST paths");
  for (auto* sub : {qrun, qcheck}) {
    sub->add_option("file", qa.file, "Program file")->required()->check(CLI::ExistingFile);
    sub->add_flag("--allow-contraction", qa.allow_contraction,
                  "Accept contraction (not only unitary) gates");
  }
  qrun->add_option("--grid", qa.grid, "Grid size")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  qrun->add_option("--out", qa.out, "Response CSV path");

  GroverArgs ga;
  auto* grover = app.add_subcommand("grover", "Monte Carlo of the weakly measured Grover loop");
  grover->add_option("--B", ga.B, "Search space size")->required()->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 52));
  grover->add_option("--kappa", ga.kappa, "Measurement strength (default B^-1/2)")
      ->check(CLI::Range(0.0, 1.0));
  grover->add_option("--trials", ga.trials, "Trials")->check(CLI::PositiveNumber);
  grover->add_option("--seed", ga.seed, "Seed");
  grover->add_option("--max-iter", ga.max_iter, "Iteration cap (default 50/kappa)");
  grover->add_option("--mode", ga.mode, "recurrence or statevector")
      ->check(CLI::IsMember({"recurrence", "statevector"}));
  grover->add_option("--out", ga.out, "Per-trial CSV path");
  grover->add_option("--bucket-width", ga.bucket_width, "Histogram bucket width");

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "Runtime bound T_c for the Grover loop");
  bound->add_option("--B", ba.B, "Search space size")->required();
  bound->add_option("--kappa", ba.kappa, "Measurement strength (default B^-1/2)")
      ->check(CLI::Range(0.0, 1.0));
  bound->add_option("--epsilon", ba.epsilon, "Robustness epsilon (default sin 3 alpha)");
  bound->add_option("--c", ba.c, "Confidence multiplier")->check(CLI::PositiveNumber);
  bound->add_option("--verify-n", ba.verify_n, "Also check the guarantee and robustness up to n");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qiter: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  if (show_version) {
    out << version_text();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    err << "qiter: a subcommand is required\n\n" << app.help();
    return 2;
  }

  try {
    json result;
    if (trace->parsed()) result = run_trace(ta);
    else if (axioms->parsed()) result = run_axioms(aa, globals);
    else if (lsi->parsed()) result = run_lsi(la, globals);
    else if (qcheck->parsed()) result = run_qwhile_check(qa);
    else if (qrun->parsed()) result = run_qwhile_run(qa, globals);
    else if (grover->parsed()) result = run_grover(ga, globals);
    else if (bound->parsed()) result = run_bound(ba);
    out << dump_json(result) << "\n";
    return 0;
  } catch (const CheckFailed& f) {
    out << dump_json(f.report) << "\n";
    return 1;
  } catch (const UsageError& e) {
    err << "qiter: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    out << dump_json(error_json("input", e.what())) << "\n";
    err << "qiter: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qiter
