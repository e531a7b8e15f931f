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

#include <cstddef>
#include <string>
#include <string_view>

#include "qiter/linalg.hpp"

namespace qiter {

struct TraceConfig {
  // Stop the series once the current term and its geometric tail estimate
  // are both below this.
  double series_tol = 1e-13;
  std::size_t max_terms = 200000;
  // Declare divergence once the partial sum exceeds this in norm.
  double blowup = 1e6;
  double ki_residual_tol = 1e-8;
  double compare_tol = 1e-8;
  double classify_tol = kDefaultClassifyTol;
  // Singular values <= ki_rank_cutoff * sigma_max are dropped from the
  // pseudoinverse used for the kernel-image witnesses.
  double ki_rank_cutoff = 1e-10;

  // Throws qiter::Error if any field is out of range.
  void validate() const;
};

enum class TraceMethod { series, kernel_image, both_agree };
std::string_view to_string(TraceMethod m);

struct TraceResult {
  ComplexMatrix value;
  // Block structure of `value`: the traced map's partitions minus the loop.
  Partition rows;
  Partition cols;
  TraceMethod method = TraceMethod::series;
  std::size_t terms_used = 0;
  // Series: last term plus tail estimate. Kernel-image: max witness residual.
  double residual = 0.0;
  bool converged = false;
  // Operator-norm gap between the two routes when both ran, else 0.
  double disagreement = 0.0;

  PartitionedMap as_map() const { return PartitionedMap(value, rows, cols); }
};

// f_BA + sum_n f_BU f_UU^n f_UA, truncated by the stopping rule in
// TraceConfig. Returns converged=false if max_terms is hit; throws
// DivergenceError past the blowup bound or on non-finite terms.
TraceResult ex_series(const PartitionedMap& f, std::string_view loop,
                      const TraceConfig& cfg = {});

// Closed form f_BA + k f_UA with witnesses i, k solving
// f_UA = (id - f_UU) i and f_BU = k (id - f_UU). Throws
// NotKiTraceableError when either witness residual exceeds the tolerance.
TraceResult ex_kernel_image(const PartitionedMap& f, std::string_view loop,
                            const TraceConfig& cfg = {});

// Runs both routes. On contractions both must succeed and agree
// (both_agree, kernel-image value returned); otherwise whichever succeeds.
TraceResult ex(const PartitionedMap& f, std::string_view loop,
               const TraceConfig& cfg = {});

// Traces out several consecutive blocks at once by merging them first.
PartitionedMap merge_loop_blocks(const PartitionedMap& f,
                                 const std::vector<std::string>& labels,
                                 const std::string& merged_name);

// The isometric dilation [[-f^dagger, D_f], [D_{f^dagger}, f]] with
// D_f = sqrt(id - f^dagger f). Throws if f is not a contraction at tol.
ComplexMatrix halmos_dilation(const ComplexMatrix& f,
                              double tol = kDefaultClassifyTol);

struct CnuDecomposition {
  Eigen::Index unitary_dim = 0;
  // Columns: orthonormal basis of H0 followed by one of its complement.
  ComplexMatrix basis_change;
  ComplexMatrix f0;
  ComplexMatrix f1;
  // ||f1^dim(f1)||, certified < 1; 0 when f1 is empty.
  double f1_power_norm = 0.0;
  double off_diagonal = 0.0;
};

// Splits a square contraction into its unitary part on
// H0 = {v : ||f^n v|| = ||v|| = ||f^dagger^n v||, n <= dim} and its
// completely nonunitary remainder.
CnuDecomposition cnu_decompose(const ComplexMatrix& f, double tol = 1e-9);

}  // namespace qiter
