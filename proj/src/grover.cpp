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

#include "qiter/grover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qiter/error.hpp"
#include "qiter/json_io.hpp"
#include "qiter/kappa.hpp"
#include "qiter/parallel.hpp"
#include "qiter/rng.hpp"

namespace qiter {

using std::numbers::pi;

double GroverParams::alpha() const {
  return std::asin(1.0 / std::sqrt(static_cast<double>(B)));
}

double GroverParams::start_angle() const { return initial_angle.value_or(alpha()); }

std::size_t GroverParams::iteration_cap() const {
  if (max_iterations > 0) return max_iterations;
  return static_cast<std::size_t>(std::ceil(50.0 / kappa));
}

void GroverParams::validate() const {
  if (B < 2) throw Error("grover: B must be at least 2, got " + std::to_string(B));
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw Error("grover: kappa must lie in (0, 1], got " + format_double(kappa));
  }
  if (initial_angle && !std::isfinite(*initial_angle)) {
    throw Error("grover: initial angle must be finite");
  }
  if (max_iterations == 0 && 50.0 / kappa > 1e9) {
    throw Error("grover: default iteration cap 50/kappa is too large, pass max_iterations");
  }
}

std::vector<double> grover_recurrence(const GroverParams& p, std::size_t steps) {
  p.validate();
  if (steps == 0) steps = p.iteration_cap();
  const double step = 2.0 * p.alpha();
  std::vector<double> b(steps + 1);
  b[0] = p.start_angle();
  for (std::size_t n = 0; n < steps; ++n) b[n + 1] = b[n] - theta(b[n], p.kappa) + step;
  return b;
}

namespace {

// 2 |phi><phi| - id on a real unit vector phi.
void reflect(ComplexVector& s, const ComplexVector& phi) {
  const Complex c = phi.dot(s);
  s = 2.0 * c * phi - s;
}

double nearest_branch(double angle, double reference) {
  return angle + 2.0 * pi * std::round((reference - angle) / (2.0 * pi));
}

}  // namespace

StatevectorTrace grover_statevector(const GroverParams& p, const StatevectorOptions& options) {
  p.validate();
  if (p.B > options.cap) {
    throw Error("grover_statevector: B = " + std::to_string(p.B) + " exceeds the cap of " +
                std::to_string(options.cap));
  }
  if (options.marked >= p.B) throw Error("grover_statevector: marked index out of range");
  const auto n = static_cast<Eigen::Index>(p.B);
  const auto star = static_cast<Eigen::Index>(options.marked);
  const double bsize = static_cast<double>(p.B);

  // psi: uniform; psi0: uniform over the unmarked elements; psi1 = |star>.
  ComplexVector psi = ComplexVector::Constant(n, 1.0 / std::sqrt(bsize));
  ComplexVector psi0 = ComplexVector::Constant(n, 1.0 / std::sqrt(bsize - 1.0));
  psi0[star] = 0.0;

  const double a0 = p.start_angle();
  ComplexVector s = std::cos(a0) * psi0;
  s[star] = std::sin(a0);

  const double xi = std::sqrt(1.0 - p.kappa);
  const std::size_t guards =
      options.condition_on_bottom && options.steps > 0 ? options.steps : p.iteration_cap();
  Rng rng(p.seed);
  StatevectorTrace trace;
  trace.angles.reserve(guards);
  double previous = a0;
  for (std::size_t k = 1; k <= guards; ++k) {
    const Complex c0 = psi0.dot(s);
    const Complex c1 = s[star];
    trace.angles.push_back(std::asin(std::min(1.0, std::abs(c1))));
    // The walk is real; the planar angle comes from the real coordinates.
    const double planar = nearest_branch(std::atan2(c1.real(), c0.real()), previous);
    trace.unwrapped_angles.push_back(planar);
    previous = planar;
    ComplexVector off = s - c0 * psi0;
    off[star] = 0.0;
    trace.off_plane_norms.push_back(off.norm());

    const double p_top = p.kappa * std::norm(c1);
    const bool top = !options.condition_on_bottom && rng.uniform() < p_top;
    if (top) {
      const Complex amp = s[star];
      s.setZero();
      s[star] = amp / std::abs(amp);
      trace.halted = true;
      trace.halted_at = k;
      break;
    }
    s[star] *= xi;
    s /= s.norm();
    // G = S_psi S_psi0
    reflect(s, psi0);
    reflect(s, psi);
  }
  trace.marked_overlap = std::abs(s[star]);
  trace.final_state = std::move(s);
  return trace;
}

GroverSummary summarize(const std::vector<GroverTrial>& trials, std::size_t bucket_width) {
  if (bucket_width == 0) throw Error("histogram bucket width must be positive");
  GroverSummary s;
  s.trials = trials.size();
  s.bucket_width = bucket_width;
  std::vector<std::size_t> halted;
  halted.reserve(trials.size());
  for (const auto& t : trials) {
    if (t.censored) ++s.censored;
    else halted.push_back(t.iterations);
  }
  std::sort(halted.begin(), halted.end());
  const double inf = std::numeric_limits<double>::infinity();
  auto order_stat = [&](std::size_t i) {
    return i < halted.size() ? static_cast<double>(halted[i]) : inf;
  };
  if (!trials.empty()) {
    const std::size_t m = trials.size();
    s.median = m % 2 == 1 ? order_stat(m / 2)
                          : 0.5 * (order_stat(m / 2 - 1) + order_stat(m / 2));
  }
  if (!halted.empty()) {
    double total = 0.0;
    for (auto v : halted) total += static_cast<double>(v);
    s.mean = total / static_cast<double>(halted.size());
    const std::size_t buckets = halted.back() / bucket_width + 1;
    s.histogram.resize(buckets);
    for (std::size_t b = 0; b < buckets; ++b) s.histogram[b].lo = b * bucket_width;
    for (auto v : halted) ++s.histogram[v / bucket_width].count;
  } else {
    s.mean = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

MonteCarloResult grover_montecarlo(const GroverParams& p, std::size_t n_trials, McMode mode,
                                   unsigned threads, std::size_t bucket_width) {
  p.validate();
  if (n_trials == 0) throw Error("grover_montecarlo: need at least one trial");
  const std::size_t cap = p.iteration_cap();
  if (bucket_width == 0) {
    bucket_width = static_cast<std::size_t>(std::ceil(pi / (16.0 * p.alpha())));
  }
  MonteCarloResult out;
  out.trials.resize(n_trials);
  if (mode == McMode::recurrence) {
    const std::vector<double> b = grover_recurrence(p, cap);
    std::vector<double> p_top(cap);
    for (std::size_t n = 0; n < cap; ++n) p_top[n] = p.kappa * std::pow(std::sin(b[n]), 2);
    parallel_for(n_trials, threads, [&](std::size_t i) {
      GroverTrial& t = out.trials[i];
      t.seed = derive_seed(p.seed, i);
      Rng rng(t.seed);
      t.censored = true;
      t.iterations = cap;
      t.angle_at_halt = b[cap - 1];
      for (std::size_t n = 0; n < cap; ++n) {
        if (rng.uniform() < p_top[n]) {
          t.censored = false;
          t.iterations = n + 1;
          t.angle_at_halt = b[n];
          break;
        }
      }
    });
  } else {
    parallel_for(n_trials, threads, [&](std::size_t i) {
      GroverParams q = p;
      q.seed = derive_seed(p.seed, i);
      const StatevectorTrace tr = grover_statevector(q);
      GroverTrial& t = out.trials[i];
      t.seed = q.seed;
      t.censored = !tr.halted;
      t.iterations = tr.halted ? tr.halted_at : cap;
      t.angle_at_halt = tr.angles.back();
    });
  }
  out.summary = summarize(out.trials, bucket_width);
  return out;
}

bool is_multimodal(const std::vector<HistogramBucket>& h, std::size_t min_count) {
  if (h.size() < 3) return false;
  std::size_t peak = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i].count > h[peak].count) peak = i;
  }
  std::size_t trough = h.size();
  for (std::size_t j = peak + 1; j < h.size(); ++j) {
    if (2 * h[j].count < h[peak].count) {
      trough = j;
      break;
    }
  }
  // Keep the lowest point between the first qualifying trough and a rise.
  for (std::size_t k = trough; k < h.size(); ++k) {
    if (h[k].count < h[trough].count) trough = k;
    if (h[k].count >= min_count && h[k].count >= 2 * h[trough].count && k > trough) return true;
  }
  return false;
}

std::string trials_to_csv(const std::vector<GroverTrial>& trials) {
  std::string out = "trial,seed,iterations,censored,angle_at_halt\n";
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    out += std::to_string(i) + "," + std::to_string(t.seed) + "," +
           std::to_string(t.iterations) + "," + (t.censored ? "1" : "0") + "," +
           format_double(t.angle_at_halt) + "\n";
  }
  return out;
}

std::uint64_t guarantee_f(std::uint64_t n, std::uint64_t B) {
  const auto K = static_cast<std::uint64_t>(std::floor(pi * std::sqrt(static_cast<double>(B)) / 4.0));
  return 2 * n + K;
}

std::uint64_t robustness_g(std::uint64_t n) { return 2 * n; }

RuntimeBound grover_runtime_bound(std::uint64_t B, double kappa, double epsilon) {
  return {kappa, epsilon, [B](std::uint64_t n) { return guarantee_f(n, B); }, robustness_g};
}

std::uint64_t runtime_bound(const RuntimeBound& rb, double c) {
  if (!(rb.epsilon < 0.5)) throw Error("runtime_bound: epsilon must be below 1/2");
  if (!(rb.kappa > 0.0 && rb.kappa <= 1.0)) throw Error("runtime_bound: kappa must lie in (0, 1]");
  if (!(c > 0.0)) throw Error("runtime_bound: confidence multiplier must be positive");
  if (!rb.f || !rb.g) throw Error("runtime_bound: f and g must be set");
  const double n = std::ceil(2.0 * c / (rb.kappa * (1.0 - 2.0 * rb.epsilon)));
  return rb.g(rb.f(static_cast<std::uint64_t>(n)));
}

GuaranteeReport verify_guarantee(const GroverParams& p, std::uint64_t n_max) {
  p.validate();
  GuaranteeReport r;
  r.n_max = n_max;
  r.K = guarantee_f(0, p.B);
  const double alpha = p.alpha();
  r.epsilon = std::sin(3.0 * alpha);
  const std::uint64_t horizon = guarantee_f(n_max, p.B);

  // Unmeasured walk: a_k = alpha + 2k alpha.
  std::vector<double> prob(horizon + 1);
  for (std::uint64_t k = 0; k <= horizon; ++k) {
    prob[k] = std::pow(std::sin(alpha + 2.0 * static_cast<double>(k) * alpha), 2);
  }
  std::uint64_t active = 0;
  std::uint64_t k = 0;
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    const std::uint64_t fn = guarantee_f(n, p.B);
    for (; k <= fn; ++k) {
      if (prob[k] > 0.5) ++active;
    }
    if (active < n) {
      r.guarantee_violations.push_back(
          {n, "only " + std::to_string(active) + " A-iterations up to f(n) = " + std::to_string(fn)});
    }
  }

  // Bottom-branch walk against every unmeasured step used above.
  GroverParams q = p;
  q.initial_angle.reset();
  const std::vector<double> b = grover_recurrence(q, robustness_g(horizon));
  for (std::uint64_t n = 0; n <= horizon; ++n) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t m = 0; m <= robustness_g(n); ++m) {
      best = std::min(best, std::abs(prob[n] - std::pow(std::sin(b[m]), 2)));
      if (best <= r.epsilon) break;
    }
    if (best > r.epsilon) {
      r.robustness_violations.push_back(
          {n, "closest bottom-branch probability within g(n) differs by " + format_double(best)});
    }
  }
  return r;
}

}  // namespace qiter
