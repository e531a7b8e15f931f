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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qiter/linalg.hpp"

namespace qiter {

struct GroverParams {
  std::uint64_t B = 2;  // search space size
  double kappa = 0.0;
  std::uint64_t seed = 0;
  // 0 selects ceil(50 / kappa).
  std::size_t max_iterations = 0;
  // Starting angle; defaults to alpha (the uniform superposition).
  std::optional<double> initial_angle;

  double alpha() const;  // arcsin(B^{-1/2})
  double start_angle() const;
  std::size_t iteration_cap() const;
  void validate() const;
};

// b_0 .. b_steps of b_{n+1} = b_n - theta(b_n, kappa) + 2 alpha: the angle
// seen by the guard on the all-bottom branch. steps = 0 uses the cap.
std::vector<double> grover_recurrence(const GroverParams& p, std::size_t steps = 0);

struct StatevectorOptions {
  std::uint64_t cap = 4096;
  std::uint64_t marked = 0;
  // Force every measurement to "bottom" to follow the conditional branch
  // for `steps` guards (0 uses the iteration cap).
  bool condition_on_bottom = false;
  std::size_t steps = 0;
};

struct StatevectorTrace {
  // One entry per guard evaluation, taken just before the measurement.
  std::vector<double> angles;            // arcsin |<marked|state>|
  std::vector<double> unwrapped_angles;  // planar angle from the unmarked direction
  std::vector<double> off_plane_norms;
  bool halted = false;
  std::size_t halted_at = 0;  // 1-based guard index
  ComplexVector final_state;
  double marked_overlap = 0.0;  // |<marked|final_state>|
};

// Full |B|-dimensional run of "while not measured: apply G", measuring
// before each G. Throws when B exceeds options.cap.
StatevectorTrace grover_statevector(const GroverParams& p, const StatevectorOptions& options = {});

struct GroverTrial {
  std::size_t iterations = 0;  // number of guards up to the successful one
  bool censored = false;
  double angle_at_halt = 0.0;
  std::uint64_t seed = 0;
};

struct HistogramBucket {
  std::size_t lo = 0;
  std::size_t count = 0;
};

struct GroverSummary {
  std::size_t trials = 0;
  std::size_t censored = 0;
  // Censored trials count as larger than every halting time for the
  // median and are left out of the mean.
  double median = 0.0;
  double mean = 0.0;
  std::size_t bucket_width = 0;
  std::vector<HistogramBucket> histogram;
};

enum class McMode { recurrence, statevector };

struct MonteCarloResult {
  std::vector<GroverTrial> trials;
  GroverSummary summary;
};

// Trial i draws from Rng(derive_seed(p.seed, i)). bucket_width = 0 uses
// ceil(pi / (16 alpha)), eight buckets per oscillation of sin^2.
MonteCarloResult grover_montecarlo(const GroverParams& p, std::size_t n_trials,
                                   McMode mode = McMode::recurrence, unsigned threads = 1,
                                   std::size_t bucket_width = 0);

GroverSummary summarize(const std::vector<GroverTrial>& trials, std::size_t bucket_width);

// A global peak, a later bucket below half of it, then a later bucket of at
// least `min_count` that is at least twice that trough.
bool is_multimodal(const std::vector<HistogramBucket>& h, std::size_t min_count = 10);

std::string trials_to_csv(const std::vector<GroverTrial>& trials);

// Guarantee for Grover's walk: f(n) = 2n + floor(pi sqrt(B) / 4).
std::uint64_t guarantee_f(std::uint64_t n, std::uint64_t B);
// Robustness witness g(n) = 2n.
std::uint64_t robustness_g(std::uint64_t n);

struct RuntimeBound {
  double kappa = 0.0;
  double epsilon = 0.0;
  std::function<std::uint64_t(std::uint64_t)> f;
  std::function<std::uint64_t(std::uint64_t)> g;
};

RuntimeBound grover_runtime_bound(std::uint64_t B, double kappa, double epsilon);
// g(f(ceil(2c / (kappa (1 - 2 epsilon))))). Throws unless epsilon < 1/2,
// kappa > 0 and c > 0.
std::uint64_t runtime_bound(const RuntimeBound& rb, double c);

struct BoundViolation {
  std::uint64_t n = 0;
  std::string detail;
};

struct GuaranteeReport {
  std::uint64_t n_max = 0;
  std::uint64_t K = 0;
  double epsilon = 0.0;
  std::vector<BoundViolation> guarantee_violations;
  std::vector<BoundViolation> robustness_violations;
  bool ok() const { return guarantee_violations.empty() && robustness_violations.empty(); }
};

// Checks f(n) = 2n + K against the unmeasured walk and g(n) = 2n with
// epsilon = sin 3 alpha against the bottom-branch recurrence, for n <= n_max.
GuaranteeReport verify_guarantee(const GroverParams& p, std::uint64_t n_max);

}  // namespace qiter
