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

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qiter {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultClassifyTol = 1e-9;

ComplexMatrix identity(Eigen::Index n);
ComplexMatrix adjoint(const ComplexMatrix& m);

bool all_finite(const ComplexMatrix& m);
// Throws qiter::Error mentioning `what` if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, std::string_view what);

struct NormOptions {
  // Matrices whose larger dimension is at most this use a full SVD;
  // larger ones use power iteration on m^dagger m.
  Eigen::Index svd_max_dim = 64;
  std::size_t max_iterations = 100000;
  double rel_tolerance = 1e-13;
};

// Largest singular value. Throws ConvergenceError if power iteration
// exhausts its cap.
double operator_norm(const ComplexMatrix& m, const NormOptions& options = {});
double operator_norm_power_iteration(const ComplexMatrix& m,
                                     const NormOptions& options = {});

enum class MapClass {
  strict_contraction,
  contraction_boundary,
  isometry,
  unitary,
  expansion,
};

std::string_view to_string(MapClass c);
constexpr bool is_contraction(MapClass c) { return c != MapClass::expansion; }

// Precedence: unitary > isometry > contraction classes > expansion.
MapClass classify(const ComplexMatrix& m, double tol);

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix matrix_power(const ComplexMatrix& m, std::size_t n);

// Moore-Penrose pseudoinverse; singular values <= rel_cutoff * sigma_max
// are treated as zero.
ComplexMatrix pseudoinverse(const ComplexMatrix& m, double rel_cutoff = 1e-10);

// Square root of a Hermitian positive semidefinite matrix. Eigenvalues are
// clamped at zero, so tiny negative roundoff is tolerated.
ComplexMatrix psd_sqrt(const ComplexMatrix& h);

// Ordered, labelled block structure of one side of a matrix. Zero-sized
// blocks are allowed; they stand for the zero object.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<std::string> names, std::vector<Eigen::Index> sizes);

  static Partition single(std::string name, Eigen::Index size);

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Eigen::Index>& sizes() const { return sizes_; }
  std::size_t block_count() const { return names_.size(); }
  Eigen::Index total() const { return total_; }

  bool contains(std::string_view label) const;
  // Position of `label`; throws PartitionError naming the label.
  std::size_t position(std::string_view label) const;
  Eigen::Index offset(std::string_view label) const;
  Eigen::Index size(std::string_view label) const;

  // Flat indices covered by the given blocks, in partition order.
  std::vector<Eigen::Index> indices_of(std::string_view label) const;
  std::vector<Eigen::Index> indices_except(std::string_view label) const;

  Partition without(std::string_view label) const;
  // Replaces consecutive blocks `labels` (in order) by one block `name`.
  Partition merged(const std::vector<std::string>& labels,
                   std::string name) const;
  Partition concat(const Partition& tail) const;

  bool operator==(const Partition& other) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<Eigen::Index> sizes_;
  Eigen::Index total_ = 0;
};

// A matrix together with a block structure on its rows and columns.
class PartitionedMap {
 public:
  PartitionedMap() = default;
  PartitionedMap(ComplexMatrix matrix, Partition rows, Partition cols);

  const ComplexMatrix& matrix() const { return matrix_; }
  const Partition& rows() const { return rows_; }
  const Partition& cols() const { return cols_; }

 private:
  ComplexMatrix matrix_;
  Partition rows_;
  Partition cols_;
};

// pi_row . f . iota_col
ComplexMatrix block(const PartitionedMap& f, std::string_view row_label,
                    std::string_view col_label);

// Gather rows/cols by flat index lists.
ComplexMatrix gather(const ComplexMatrix& m,
                     const std::vector<Eigen::Index>& rows,
                     const std::vector<Eigen::Index>& cols);

// Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix).
ComplexMatrix random_unitary(Eigen::Index n, std::uint64_t seed);
// First `cols` columns of a Haar unitary; requires rows >= cols.
ComplexMatrix random_isometry(Eigen::Index rows, Eigen::Index cols,
                              std::uint64_t seed);
// Ginibre matrix rescaled to an operator norm drawn uniformly from [0, 1].
ComplexMatrix random_contraction(Eigen::Index rows, Eigen::Index cols,
                                 std::uint64_t seed);

}  // namespace qiter
