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

#include "qiter/axioms.hpp"

#include <functional>
#include <optional>
#include <sstream>

#include "qiter/error.hpp"
#include "qiter/parallel.hpp"
#include "qiter/rng.hpp"

namespace qiter {

bool AxiomReport::all_passed() const {
  for (const auto& a : axioms) {
    if (a.failed > 0 || a.cases == 0) return false;
  }
  return true;
}

namespace {

struct Sides {
  std::optional<ComplexMatrix> lhs;
  std::optional<ComplexMatrix> rhs;
  std::string lhs_error;
  std::string rhs_error;
};

template <typename Fn>
std::optional<ComplexMatrix> attempt(Fn&& fn, std::string& error) {
  try {
    return fn();
  } catch (const Error& e) {
    error = e.what();
    return std::nullopt;
  }
}

class Sampler {
 public:
  Sampler(std::uint64_t seed, Eigen::Index max_dim)
      : rng_(seed), seed_(seed), max_dim_(max_dim) {}

  Eigen::Index dim() {
    return 1 + static_cast<Eigen::Index>(rng_.next_u64() %
                                         static_cast<std::uint64_t>(max_dim_));
  }
  // Block dimensions whose sum stays within `cap`.
  std::vector<Eigen::Index> dims(std::size_t count, Eigen::Index cap) {
    for (;;) {
      std::vector<Eigen::Index> d(count);
      Eigen::Index total = 0;
      for (auto& x : d) {
        x = dim();
        total += x;
      }
      if (total <= cap) return d;
    }
  }
  ComplexMatrix contraction(Eigen::Index rows, Eigen::Index cols) {
    return random_contraction(rows, cols, derive_seed(seed_, ++draws_));
  }

 private:
  Rng rng_;
  std::uint64_t seed_;
  Eigen::Index max_dim_;
  std::uint64_t draws_ = 0;
};

Partition two(const std::string& first, Eigen::Index a, Eigen::Index u) {
  return Partition({first, "U"}, {a, u});
}

ComplexMatrix traced(const ComplexMatrix& m, const Partition& rows,
                     const Partition& cols, const std::string& loop,
                     const TraceConfig& cfg) {
  return ex(PartitionedMap(m, rows, cols), loop, cfg).value;
}

constexpr Eigen::Index kMaxTotalDim = 8;

Sides left_naturality(Sampler& s, const TraceConfig& cfg) {
  const auto d = s.dims(4, 2 * kMaxTotalDim);
  const Eigen::Index a = d[0], b = d[1], u = d[2], b2 = d[3];
  const ComplexMatrix f = s.contraction(b + u, a + u);
  const ComplexMatrix g = s.contraction(b2, b);
  Sides out;
  out.lhs = attempt([&] {
    return traced(direct_sum(g, identity(u)) * f, two("B", b2, u), two("A", a, u), "U", cfg);
  }, out.lhs_error);
  out.rhs = attempt([&] {
    return ComplexMatrix(g * traced(f, two("B", b, u), two("A", a, u), "U", cfg));
  }, out.rhs_error);
  return out;
}

Sides right_naturality(Sampler& s, const TraceConfig& cfg) {
  const auto d = s.dims(4, 2 * kMaxTotalDim);
  const Eigen::Index a = d[0], b = d[1], u = d[2], a2 = d[3];
  const ComplexMatrix f = s.contraction(b + u, a + u);
  const ComplexMatrix h = s.contraction(a, a2);
  Sides out;
  out.lhs = attempt([&] {
    return traced(f * direct_sum(h, identity(u)), two("B", b, u), two("A", a2, u), "U", cfg);
  }, out.lhs_error);
  out.rhs = attempt([&] {
    return ComplexMatrix(traced(f, two("B", b, u), two("A", a, u), "U", cfg) * h);
  }, out.rhs_error);
  return out;
}

Sides dinaturality(Sampler& s, const TraceConfig& cfg) {
  const auto d = s.dims(4, 2 * kMaxTotalDim);
  const Eigen::Index a = d[0], b = d[1], u = d[2], u2 = d[3];
  // f : A + U -> B + U',  g : U' -> U
  const ComplexMatrix f = s.contraction(b + u2, a + u);
  const ComplexMatrix g = s.contraction(u, u2);
  Sides out;
  out.lhs = attempt([&] {
    return traced(direct_sum(identity(b), g) * f, two("B", b, u), two("A", a, u), "U", cfg);
  }, out.lhs_error);
  out.rhs = attempt([&] {
    return traced(f * direct_sum(identity(a), g), two("B", b, u2), two("A", a, u2), "U", cfg);
  }, out.rhs_error);
  return out;
}

Sides superposing(Sampler& s, const TraceConfig& cfg) {
  const auto d = s.dims(5, kMaxTotalDim + 1);
  const Eigen::Index a = d[0], b = d[1], u = d[2], c = d[3], e = d[4];
  const ComplexMatrix f = s.contraction(b + u, a + u);
  const ComplexMatrix g = s.contraction(e, c);
  Sides out;
  out.lhs = attempt([&] {
    return traced(direct_sum(g, f), Partition({"D", "B", "U"}, {e, b, u}),
                  Partition({"C", "A", "U"}, {c, a, u}), "U", cfg);
  }, out.lhs_error);
  out.rhs = attempt([&] {
    return direct_sum(g, traced(f, two("B", b, u), two("A", a, u), "U", cfg));
  }, out.rhs_error);
  return out;
}

Sides vanishing_one(Sampler& s, const TraceConfig& cfg) {
  const auto d = s.dims(2, kMaxTotalDim);
  const Eigen::Index a = d[0], b = d[1];
  const ComplexMatrix f = s.contraction(b, a);
  Sides out;
  out.lhs = attempt([&] {
    return traced(f, Partition({"B", "Z"}, {b, 0}), Partition({"A", "Z"}, {a, 0}), "Z", cfg);
  }, out.lhs_error);
  out.rhs = f;
  return out;
}

Sides vanishing_two(Sampler& s, const TraceConfig& cfg) {
  const auto d = s.dims(4, 2 * kMaxTotalDim);
  const Eigen::Index a = d[0], b = d[1], u = d[2], v = d[3];
  const ComplexMatrix f = s.contraction(b + u + v, a + u + v);
  const PartitionedMap map(f, Partition({"B", "U", "V"}, {b, u, v}),
                           Partition({"A", "U", "V"}, {a, u, v}));
  Sides out;
  out.lhs = attempt([&] {
    return ex(merge_loop_blocks(map, {"U", "V"}, "UV"), "UV", cfg).value;
  }, out.lhs_error);
  out.rhs = attempt([&] {
    return ex(ex(map, "V", cfg).as_map(), "U", cfg).value;
  }, out.rhs_error);
  return out;
}

Sides yanking(Sampler& s, const TraceConfig& cfg) {
  const Eigen::Index u = s.dim();
  ComplexMatrix swap = ComplexMatrix::Zero(2 * u, 2 * u);
  swap.topRightCorner(u, u) = identity(u);
  swap.bottomLeftCorner(u, u) = identity(u);
  Sides out;
  out.lhs = attempt([&] {
    return traced(swap, two("B", u, u), two("A", u, u), "U", cfg);
  }, out.lhs_error);
  out.rhs = identity(u);
  return out;
}

using AxiomFn = Sides (*)(Sampler&, const TraceConfig&);

struct AxiomSpec {
  const char* name;
  AxiomFn fn;
};

constexpr AxiomSpec kAxioms[] = {
    {"naturality_left", left_naturality},
    {"naturality_right", right_naturality},
    {"dinaturality", dinaturality},
    {"superposing", superposing},
    {"vanishing_i", vanishing_one},
    {"vanishing_ii", vanishing_two},
    {"yanking", yanking},
};

struct CaseOutcome {
  bool pass = false;
  double deviation = 0.0;
  std::string message;
};

CaseOutcome judge(const Sides& sides, double tol) {
  CaseOutcome out;
  if (sides.lhs && sides.rhs) {
    if (sides.lhs->rows() != sides.rhs->rows() ||
        sides.lhs->cols() != sides.rhs->cols()) {
      out.message = "sides have different shapes";
      return out;
    }
    out.deviation = operator_norm(*sides.lhs - *sides.rhs);
    out.pass = out.deviation <= tol;
    if (!out.pass) {
      std::ostringstream msg;
      msg << "sides differ by " << out.deviation;
      out.message = msg.str();
    }
    return out;
  }
  if (!sides.lhs && !sides.rhs) {
    // Both undefined satisfies Kleene equality, but contractions should
    // never get here; report it so it is visible.
    out.pass = false;
    out.message = "both sides undefined: " + sides.lhs_error;
    return out;
  }
  out.message = "one side undefined: " +
                (sides.lhs ? sides.rhs_error : sides.lhs_error);
  return out;
}

}  // namespace

AxiomReport check_trace_axioms(const AxiomCheckOptions& options,
                               const TraceConfig& cfg) {
  cfg.validate();
  if (options.max_block_dim < 1) throw Error("axioms: max_block_dim must be >= 1");
  AxiomReport report;
  std::uint64_t axiom_index = 0;
  for (const auto& spec : kAxioms) {
    std::vector<CaseOutcome> outcomes(options.cases);
    const std::uint64_t stream = derive_seed(options.seed, ++axiom_index);
    parallel_for(options.cases, options.threads, [&](std::size_t i) {
      Sampler sampler(derive_seed(stream, i), options.max_block_dim);
      outcomes[i] = judge(spec.fn(sampler, cfg), cfg.compare_tol);
    });
    AxiomResult result;
    result.name = spec.name;
    result.cases = options.cases;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto& o = outcomes[i];
      result.worst_deviation = std::max(result.worst_deviation, o.deviation);
      if (o.pass) {
        ++result.passed;
      } else {
        ++result.failed;
        if (result.first_failure.empty()) {
          result.first_failure = "case " + std::to_string(i) + ": " + o.message;
        }
      }
    }
    report.axioms.push_back(std::move(result));
  }
  return report;
}

ComplexMatrix vanishing_ii_counterexample_matrix() {
  ComplexMatrix f(3, 3);
  f << 0.0, 1.0, 1.0,
       1.0, -2.0 / 3.0, 1.0,
       1.0, 1.0, 1.0 / 3.0;
  return f;
}

CounterexampleReport check_vanishing_ii_counterexample(const TraceConfig& cfg) {
  const PartitionedMap map(vanishing_ii_counterexample_matrix(),
                           Partition({"B", "U", "V"}, {1, 1, 1}),
                           Partition({"A", "U", "V"}, {1, 1, 1}));
  CounterexampleReport report;
  const TraceResult inner = ex(map, "V", cfg);
  report.inner = inner.value;
  report.nested = ex(inner.as_map(), "U", cfg).value;
  const PartitionedMap joint = merge_loop_blocks(map, {"U", "V"}, "UV");
  try {
    const TraceResult r = ex_series(joint, "UV", cfg);
    report.joint_series_diverged = !r.converged;
    if (!r.converged) report.joint_series_error = "no convergence within max_terms";
  } catch (const DivergenceError& e) {
    report.joint_series_diverged = true;
    report.joint_series_error = e.what();
  }
  try {
    report.joint_kernel_image = ex_kernel_image(joint, "UV", cfg).value;
    report.joint_kernel_image_ok = true;
  } catch (const NotKiTraceableError&) {
    report.joint_kernel_image_ok = false;
  }
  report.flagged = report.joint_series_diverged;
  return report;
}

}  // namespace qiter
