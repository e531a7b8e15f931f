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

#include "qiter/linalg.hpp"
#include "qiter/rng.hpp"

namespace qiter {

// Weak measurement of the predicate with projector P: outcome "top" means
// the predicate was observed.
struct KappaMeasurement {
  double kappa = 0.0;
  ComplexMatrix projector;

  // Throws qiter::Error unless 0 <= kappa <= 1 and P is an orthogonal
  // projector within 1e-10.
  void validate() const;
};

// (id - P) (x) id + P (x) R_kappa on H (x) C^2, index h * 2 + p with p = 0 the
// "bottom" outcome and R_kappa = [[sqrt(1-k), sqrt(k)], [sqrt(k), -sqrt(1-k)]].
ComplexMatrix build_E(const KappaMeasurement& km);

enum class Outcome { bottom, top };

struct MeasurementResult {
  Outcome outcome = Outcome::bottom;
  double p_top = 0.0;
  // Normalised post-measurement state on H.
  ComplexVector state;
};

// Applies E to state (x) |bottom> and samples the ancilla.
MeasurementResult kappa_measure(const ComplexVector& state, const KappaMeasurement& km,
                                Rng& rng);

// Collapse angle: the bottom-branch post-state of cos a|0> + sin a|1> is at
// angle a - theta(a, kappa). Lies in (-pi, pi].
double theta(double a, double kappa);
// arcsin((1 - xi) / (1 + xi)) with xi = sqrt(1 - kappa); bounds |theta|.
double theta_bound(double kappa);

}  // namespace qiter
