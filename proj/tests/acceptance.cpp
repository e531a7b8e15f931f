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

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qiter/axioms.hpp"
#include "qiter/error.hpp"
#include "qiter/grover.hpp"
#include "qiter/json_io.hpp"
#include "qiter/kappa.hpp"
#include "qiter/lsi.hpp"
#include "qiter/qwhile.hpp"
#include "qiter/rng.hpp"
#include "qiter/trace.hpp"

namespace {

using namespace qiter;
using std::numbers::pi;

// Collects sub-check results for one criterion.
class Verdict {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      ok_ = false;
      failures_.push_back(what);
    }
  }
  void note(const std::string& what) { notes_.push_back(what); }
  bool ok() const { return ok_; }
  std::string text() const {
    std::string s;
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    for (const auto& f : failures_) s += (s.empty() ? "FAILED " : "; FAILED ") + f;
    return s;
  }

 private:
  bool ok_ = true;
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

std::string num(double x) { return format_double(x); }

PartitionedMap loop_last(const ComplexMatrix& m, Eigen::Index u) {
  return PartitionedMap(m, Partition({"B", "U"}, {m.rows() - u, u}),
                        Partition({"A", "U"}, {m.cols() - u, u}));
}

ComplexMatrix hadamard() {
  ComplexMatrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

void criterion1(Verdict& v) {
  ComplexMatrix sw(2, 2);
  sw << 0, 1, 1, 0;
  const ComplexMatrix h = hadamard();
  const std::vector<std::pair<ComplexMatrix, double>> cases = {
      {h, 1.0}, {sw * h * sw, 1.0}, {sw * h, -1.0}, {h * sw, -1.0}};
  std::string got;
  for (const auto& [m, want] : cases) {
    const ComplexMatrix r = ex(loop_last(m, 1), "U").value;
    got += (got.empty() ? "" : ",") + num(r(0, 0).real());
    v.require(std::abs(r(0, 0) - want) <= 1e-9, "hadamard variant expected " + num(want));
  }
  v.note("hadamard family " + got);
  ComplexMatrix f(3, 3);
  f << -1, 1, -1, 1, -1, -1, -1, -1, 1;
  f *= 0.5;
  const ComplexMatrix two = ex(loop_last(f, 2), "U").value;
  const ComplexMatrix one = ex(loop_last(f, 1), "U").value;
  v.require(std::abs(two(0, 0) - 1.0) <= 1e-9, "3x3 two-dim loop");
  v.require((one - sw).cwiseAbs().maxCoeff() <= 1e-9, "3x3 one-dim loop");
  const ComplexMatrix c = vanishing_ii_counterexample_matrix();
  ComplexMatrix want(2, 2);
  want << 1.5, 2.5, 2.5, 5.0 / 6.0;
  const ComplexMatrix ki = ex_kernel_image(loop_last(c, 1), "U").value;
  v.require((ki - want).cwiseAbs().maxCoeff() <= 1e-9, "counterexample kernel-image value");
  bool diverged = false;
  try {
    ex_series(loop_last(c, 2), "U");
  } catch (const DivergenceError&) {
    diverged = true;
  }
  v.require(diverged, "counterexample two-dim series should diverge");
  v.note("3x3 -> " + num(two(0, 0).real()) + " and swap; counterexample series diverged=" +
         (diverged ? "yes" : "no"));
}

void criterion2(Verdict& v) {
  Rng rng(20260101);
  double worst_gap = 0.0, worst_norm = 0.0, worst_iso = 0.0, worst_unit = 0.0;
  std::size_t bad_method = 0;
  const std::size_t n_cases = 1000;
  for (std::size_t i = 0; i < n_cases; ++i) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.next_u64() % 7);
    const Eigen::Index u = 1 + static_cast<Eigen::Index>(rng.next_u64() % (n - 1));
    const std::uint64_t seed = derive_seed(555, i);
    const TraceResult c = ex(loop_last(random_contraction(n, n, seed), u), "U");
    if (c.method != TraceMethod::both_agree || !c.converged) ++bad_method;
    worst_gap = std::max(worst_gap, c.disagreement);
    worst_norm = std::max(worst_norm, operator_norm(c.value));

    const ComplexMatrix w = random_isometry(n + 1 + static_cast<Eigen::Index>(i % 2), n, seed);
    const ComplexMatrix is = ex(loop_last(w, u), "U").value;
    worst_iso = std::max(worst_iso, operator_norm(is.adjoint() * is - identity(is.cols())));

    const ComplexMatrix un = ex(loop_last(random_unitary(n, seed), u), "U").value;
    worst_unit = std::max({worst_unit, operator_norm(un.adjoint() * un - identity(un.cols())),
                           operator_norm(un * un.adjoint() - identity(un.rows()))});
  }
  v.require(bad_method == 0, std::to_string(bad_method) + " contractions not both_agree");
  v.require(worst_gap <= 1e-8, "series vs kernel-image gap " + num(worst_gap));
  v.require(worst_norm <= 1.0 + 1e-8, "result norm " + num(worst_norm));
  v.require(worst_iso <= 1e-8, "isometry defect " + num(worst_iso));
  v.require(worst_unit <= 1e-8, "unitary defect " + num(worst_unit));
  v.note(std::to_string(n_cases) + " cases each; worst gap " + num(worst_gap) + ", worst norm " +
         num(worst_norm) + ", isometry defect " + num(worst_iso) + ", unitary defect " +
         num(worst_unit));
}

void criterion3(Verdict& v) {
  AxiomCheckOptions opt;
  opt.cases = 1000;
  opt.seed = 7;
  const AxiomReport r = check_trace_axioms(opt);
  std::string summary;
  for (const auto& a : r.axioms) {
    summary += (summary.empty() ? "" : ", ") + a.name + " " + std::to_string(a.passed) + "/" +
               std::to_string(a.cases);
    v.require(a.failed == 0 && a.cases >= 1000 && a.worst_deviation <= 1e-8,
              a.name + ": " + a.first_failure);
  }
  v.require(r.axioms.size() == 7, "expected seven axiom checks");
  const CounterexampleReport ce = check_vanishing_ii_counterexample();
  v.require(ce.flagged, "counterexample not flagged");
  v.note(summary + "; counterexample flagged=" + (ce.flagged ? "yes" : "no"));
}

void criterion4(Verdict& v) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(i % 5);
    const Eigen::Index c = 1 + static_cast<Eigen::Index>((i / 5) % 5);
    const ComplexMatrix g = halmos_dilation(random_contraction(r, c, derive_seed(41, i)));
    worst = std::max(worst, operator_norm(g.adjoint() * g - identity(g.cols())));
  }
  v.require(worst <= 1e-10, "halmos defect " + num(worst));
  std::size_t wrong = 0;
  double worst_power = 0.0;
  const std::uint64_t planted = 300;
  for (std::uint64_t i = 0; i < planted; ++i) {
    const Eigen::Index k = static_cast<Eigen::Index>(i % 4);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>((i / 4) % 4);
    ComplexMatrix f = random_contraction(m, m, derive_seed(42, i)) * 0.95;
    if (k > 0) f = direct_sum(random_unitary(k, derive_seed(43, i)), f);
    const ComplexMatrix w = random_unitary(k + m, derive_seed(44, i));
    const CnuDecomposition d = cnu_decompose(w * f * w.adjoint());
    if (d.unitary_dim != k) ++wrong;
    worst_power = std::max(worst_power, d.f1_power_norm);
  }
  v.require(wrong == 0, std::to_string(wrong) + " planted unitary dimensions missed");
  v.require(worst_power < 1.0, "CNU power norm " + num(worst_power));
  v.note("halmos worst defect " + num(worst) + " over 500; cnu recovered " +
         std::to_string(planted - wrong) + "/" + std::to_string(planted) +
         ", max ||f1^dim|| " + num(worst_power));
}

FirKernel random_kernel(Eigen::Index out, Eigen::Index in, std::uint64_t seed) {
  Rng rng(seed);
  FirKernel k{Partition::single("in", in), Partition::single("out", out), {}};
  const int count = 1 + static_cast<int>(rng.next_u64() % 5);
  for (int i = 0; i < count; ++i) {
    const auto t = static_cast<std::int64_t>(rng.next_u64() % 13) - 6;
    k.taps[t] = random_contraction(out, in, derive_seed(seed, i));
  }
  return k;
}

void criterion5(Verdict& v) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng dims(derive_seed(61, i));
    const auto a = 1 + static_cast<Eigen::Index>(dims.next_u64() % 3);
    const auto b = 1 + static_cast<Eigen::Index>(dims.next_u64() % 3);
    const auto c = 1 + static_cast<Eigen::Index>(dims.next_u64() % 3);
    const FirKernel f = random_kernel(b, a, derive_seed(62, i));
    const FirKernel g = random_kernel(c, b, derive_seed(63, i));
    const FrequencyResponse lhs = dtft(convolve(g, f), 64);
    const FrequencyResponse rhs = compose(dtft(g, 64), dtft(f, 64));
    for (std::size_t j = 0; j < lhs.size(); ++j) {
      worst = std::max(worst, operator_norm(lhs.samples[j] - rhs.samples[j]));
    }
  }
  v.require(worst <= 1e-12, "convolution theorem gap " + num(worst));
  double parseval = 0.0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng rng(derive_seed(64, i));
    Signal s{2, {}};
    for (int k = 0; k < 1 + static_cast<int>(rng.next_u64() % 8); ++k) {
      ComplexVector x(2);
      x << Complex(rng.normal(), rng.normal()), Complex(rng.normal(), rng.normal());
      s.samples[static_cast<std::int64_t>(rng.next_u64() % 20) - 10] = x;
    }
    const auto width = static_cast<std::size_t>(s.samples.rbegin()->first -
                                                s.samples.begin()->first + 1);
    parseval = std::max(parseval, std::abs(parseval_norm(s, 4 * width) - time_domain_norm_squared(s)));
  }
  v.require(parseval <= 1e-9, "parseval gap " + num(parseval));
  FrequencyResponse h;
  h.rows = Partition({"B", "U"}, {1, 1});
  h.cols = Partition({"A", "U"}, {1, 1});
  h.grid = uniform_grid(kDefaultGridSize);
  h.samples.assign(h.grid.size(), hadamard());
  const FrequencyResponse t = lsi_ex(h, "U");
  double hgap = 0.0;
  for (const auto& s : t.samples) hgap = std::max(hgap, std::abs(s(0, 0) - 1.0));
  v.require(hgap <= 1e-9, "constant Hadamard trace gap " + num(hgap));
  v.note("convolution gap " + num(worst) + " over 500 pairs, parseval gap " + num(parseval) +
         ", hadamard response gap " + num(hgap));
}

void criterion6(Verdict& v) {
  const std::string dir = QITER_CORPUS_DIR;
  const qwhile::Program p = qwhile::parse_file(dir + "/hadamard_delay_loop.qw");
  const FrequencyResponse r = qwhile::semantics(p, kDefaultGridSize);
  const ComplexMatrix h = p.gates.at("H").matrix;
  double worst = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    const Complex z = std::polar(1.0, -r.grid[j]);
    const Complex want = h(0, 0) + h(0, 1) * z * h(1, 0) / (1.0 - h(1, 1) * z);
    worst = std::max(worst, std::abs(r.samples[j](0, 0) - want));
  }
  v.require(worst <= 1e-9, "closed form gap " + num(worst));

  std::vector<qwhile::Program> programs;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".qw") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::size_t certified = 0;
  for (const auto& f : files) {
    programs.push_back(qwhile::parse_file(f.string()));
    if (lsi_classify(qwhile::semantics(programs.back(), kDefaultGridSize)) ==
        LsiClass::lsi_contraction) {
      ++certified;
    }
  }
  v.require(certified == files.size() && !files.empty(), "corpus programs not all certified");

  std::size_t spot = 0;
  double comp = 0.0;
  for (const auto& a : programs) {
    for (const auto& b : programs) {
      if (qwhile::check(a).out_ports != qwhile::check(b).in_ports) continue;
      qwhile::Program joined;
      joined.gates = a.gates;
      bool clash = false;
      for (const auto& [name, decl] : b.gates) {
        auto [it, fresh] = joined.gates.emplace(name, decl);
        if (!fresh && it->second.matrix != decl.matrix) clash = true;
      }
      if (clash) continue;
      joined.root = qwhile::Node::make_seq(a.root, b.root);
      const FrequencyResponse lhs = qwhile::semantics(joined, 64);
      const FrequencyResponse rhs = compose(qwhile::semantics(b, 64), qwhile::semantics(a, 64));
      for (std::size_t j = 0; j < lhs.size(); ++j) {
        comp = std::max(comp, operator_norm(lhs.samples[j] - rhs.samples[j]));
      }
      ++spot;
    }
  }
  v.require(spot > 0 && comp <= 1e-12, "compositionality gap " + num(comp));
  v.note("closed form gap " + num(worst) + " on " + std::to_string(r.size()) +
         " points; corpus certified " + std::to_string(certified) + "/" +
         std::to_string(files.size()) + "; " + std::to_string(spot) +
         " seq spot checks, gap " + num(comp));
}

void criterion7(Verdict& v) {
  double worst = 0.0, off = 0.0, halt = 0.0;
  for (std::uint64_t B : {16ull, 64ull, 256ull}) {
    GroverParams p{B, 1.0 / std::sqrt(static_cast<double>(B))};
    const auto b = grover_recurrence(p, 200);
    StatevectorOptions o;
    o.condition_on_bottom = true;
    o.steps = 201;
    o.marked = B / 2 + 1;
    const StatevectorTrace t = grover_statevector(p, o);
    for (std::size_t n = 0; n <= 200; ++n) {
      worst = std::max(worst, std::abs(t.unwrapped_angles[n] - b[n]));
      off = std::max(off, t.off_plane_norms[n]);
    }
    for (std::uint64_t s = 0; s < 50; ++s) {
      GroverParams q = p;
      q.seed = derive_seed(71, s * 1000 + B);
      const StatevectorTrace run = grover_statevector(q);
      if (!run.halted) {
        halt = std::max(halt, 1.0);
        continue;
      }
      halt = std::max(halt, std::abs(run.marked_overlap - 1.0));
    }
  }
  v.require(worst <= 1e-9, "trajectory gap " + num(worst));
  v.require(off <= 1e-9, "off-plane norm " + num(off));
  v.require(halt <= 1e-9, "halted state defect " + num(halt));
  v.note("B in {16,64,256}: trajectory gap " + num(worst) + " over 200 steps, off-plane " +
         num(off) + ", halted-state defect " + num(halt) + " over 150 runs");
}

void criterion8(Verdict& v) {
  GroverParams p{1000000, 1e-3, 1};
  const MonteCarloResult r = grover_montecarlo(p, 10000);
  const GroverSummary& s = r.summary;
  v.require(s.median >= 900 && s.median <= 1100, "median " + num(s.median) + " outside [900, 1100]");
  v.require(s.mean >= 1800 && s.mean <= 2200, "mean " + num(s.mean) + " outside [1800, 2200]");
  const bool multi = is_multimodal(s.histogram);
  v.require(multi, "histogram not multimodal");
  v.note("median " + num(s.median) + ", mean " + num(s.mean) + ", censored " +
         std::to_string(s.censored) + ", multimodal=" + (multi ? "yes" : "no") +
         ", bucket width " + std::to_string(s.bucket_width));
}

void criterion9(Verdict& v) {
  double margin = -1.0;
  for (int ki = 1; ki <= 200; ++ki) {
    const double kappa = ki / 200.0;
    for (int ai = 0; ai <= 20000; ++ai) {
      const double a = -2.0 * pi + 4.0 * pi * ai / 20000.0;
      margin = std::max(margin, std::abs(theta(a, kappa)) - std::asin(kappa));
    }
  }
  v.require(margin <= 1e-10, "theta exceeds arcsin kappa by " + num(margin));
  GroverParams small{64, 1.0 / 8.0};
  GroverParams large{10000, 1.0 / 100.0};
  const GuaranteeReport a = verify_guarantee(small, 50);
  const GuaranteeReport b = verify_guarantee(large, 500);
  const auto count = [](const GuaranteeReport& g) {
    return g.guarantee_violations.size() + g.robustness_violations.size();
  };
  v.require(a.ok(), std::to_string(count(a)) + " violations at B=64");
  v.require(b.ok(), std::to_string(count(b)) + " violations at B=1e4");
  const double alpha = std::asin(1e-3);
  const auto T = static_cast<double>(
      runtime_bound(grover_runtime_bound(1000000, 1e-3, std::sin(3 * alpha)), 1.0));
  const double ratio = T / ((8.0 + pi / 2.0) * 1000.0);
  v.require(std::abs(ratio - 1.0) <= 0.01, "T ratio " + num(ratio));
  v.note("max |theta| - arcsin kappa " + num(margin) + "; violations B=64: " +
         std::to_string(count(a)) + ", B=1e4: " + std::to_string(count(b)) + "; T = " + num(T) +
         ", ratio " + num(ratio));
}

struct Criterion {
  int id;
  const char* title;
  double time_limit_s;
  std::function<void(Verdict&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "worked examples", 1.0, criterion1},
      {2, "totality on contractions", 60.0, criterion2},
      {3, "trace axioms", 120.0, criterion3},
      {4, "structure theorems", 0.0, criterion4},
      {5, "lsi and dtft", 0.0, criterion5},
      {6, "qwhile semantics", 0.0, criterion6},
      {7, "grover cross-validation", 0.0, criterion7},
      {8, "paper statistics", 60.0, criterion8},
      {9, "bounds", 0.0, criterion9},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0.0) {
      v.require(secs < c.time_limit_s, "runtime over " + num(c.time_limit_s) + " s");
    }
    std::ostringstream time;
    time.precision(3);
    time << std::fixed << secs;
    std::cout << "criterion " << c.id << " [" << c.title << "]: " << (v.ok() ? "PASS" : "FAIL")
              << " (" << time.str() << " s) " << v.text() << "\n";
    if (!v.ok()) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << "\n";
  return failed == 0 ? 0 : 1;
}
