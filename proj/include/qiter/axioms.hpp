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
#include <string>
#include <vector>

#include "qiter/trace.hpp"

namespace qiter {

struct AxiomResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  double worst_deviation = 0.0;
  // First failure message, if any.
  std::string first_failure;
};

struct AxiomReport {
  std::vector<AxiomResult> axioms;
  bool all_passed() const;
};

struct AxiomCheckOptions {
  std::size_t cases = 1000;
  std::uint64_t seed = 7;
  // Upper bound on each block dimension of sampled instances.
  Eigen::Index max_block_dim = 3;
  unsigned threads = 1;
};

// Samples random contractions of the shapes each axiom needs and checks both
// sides agree (Kleene equality) within cfg.compare_tol. Axioms: left and
// right naturality, dinaturality, superposing, vanishing I, vanishing II,
// yanking.
AxiomReport check_trace_axioms(const AxiomCheckOptions& options,
                               const TraceConfig& cfg = {});

// The FdHilb map whose one-dimensional traces nest fine while tracing both
// loop dimensions at once diverges.
struct CounterexampleReport {
  ComplexMatrix inner;         // ex over the last dimension
  ComplexMatrix nested;        // ex over the last, then the next dimension
  bool joint_series_diverged = false;
  std::string joint_series_error;
  bool joint_kernel_image_ok = false;
  ComplexMatrix joint_kernel_image;
  // True when this is the documented vanishing II failure.
  bool flagged = false;
};

ComplexMatrix vanishing_ii_counterexample_matrix();
CounterexampleReport check_vanishing_ii_counterexample(const TraceConfig& cfg = {});

}  // namespace qiter
