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

#include "qiter/kappa.hpp"

#include <cmath>
#include <numbers>

#include "qiter/error.hpp"

namespace qiter {

void KappaMeasurement::validate() const {
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw Error("kappa must lie in [0, 1], got " + std::to_string(kappa));
  }
  if (projector.rows() != projector.cols() || projector.rows() == 0) {
    throw Error("predicate projector must be a non-empty square matrix");
  }
  require_finite(projector, "predicate projector");
  const double sq = operator_norm(projector * projector - projector);
  const double herm = operator_norm(projector.adjoint() - projector);
  if (sq > 1e-10 || herm > 1e-10) {
    throw Error("predicate matrix is not an orthogonal projector (|P^2 - P| = " +
                std::to_string(sq) + ", |P^dagger - P| = " + std::to_string(herm) + ")");
  }
}

ComplexMatrix build_E(const KappaMeasurement& km) {
  km.validate();
  const double xi = std::sqrt(1.0 - km.kappa);
  const double s = std::sqrt(km.kappa);
  ComplexMatrix r(2, 2);
  r << xi, s, s, -xi;
  const Eigen::Index n = km.projector.rows();
  return kron(identity(n) - km.projector, identity(2)) + kron(km.projector, r);
}

MeasurementResult kappa_measure(const ComplexVector& state, const KappaMeasurement& km,
                                Rng& rng) {
  km.validate();
  if (state.size() != km.projector.rows()) {
    throw Error("state has dimension " + std::to_string(state.size()) +
                ", measurement acts on " + std::to_string(km.projector.rows()));
  }
  if (std::abs(state.norm() - 1.0) > 1e-9) {
    throw Error("kappa_measure needs a normalised state, norm is " +
                std::to_string(state.norm()));
  }
  const Eigen::Index n = state.size();
  ComplexVector lifted = ComplexVector::Zero(2 * n);
  for (Eigen::Index h = 0; h < n; ++h) lifted[2 * h] = state[h];
  const ComplexVector out = build_E(km) * lifted;
  ComplexVector bottom(n), top(n);
  for (Eigen::Index h = 0; h < n; ++h) {
    bottom[h] = out[2 * h];
    top[h] = out[2 * h + 1];
  }
  MeasurementResult r;
  r.p_top = top.squaredNorm();
  const bool is_top = rng.uniform() < r.p_top;
  r.outcome = is_top ? Outcome::top : Outcome::bottom;
  ComplexVector& chosen = is_top ? top : bottom;
  r.state = chosen / chosen.norm();
  return r;
}

double theta(double a, double kappa) {
  if (kappa == 0.0) return 0.0;
  const double xi = std::sqrt(1.0 - kappa);
  // Same as arctan((1 - xi) tan a / (1 + xi tan^2 a)) in the first quadrant,
  // but without the pole at a = pi/2.
  return std::remainder(a - std::atan2(xi * std::sin(a), std::cos(a)),
                        2.0 * std::numbers::pi);
}

double theta_bound(double kappa) {
  const double xi = std::sqrt(1.0 - kappa);
  return std::asin((1.0 - xi) / (1.0 + xi));
}

}  // namespace qiter
