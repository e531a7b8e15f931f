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

#include "qiter/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qiter/error.hpp"
#include "qiter/rng.hpp"

namespace qiter {

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

void require_finite(const ComplexMatrix& m, std::string_view what) {
  if (!all_finite(m)) {
    throw Error(std::string(what) + ": matrix has non-finite entries");
  }
}

double operator_norm_power_iteration(const ComplexMatrix& m,
                                     const NormOptions& options) {
  if (m.size() == 0) return 0.0;
  require_finite(m, "operator_norm");
  Rng rng(0x6f706e6f726dULL);
  ComplexVector v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = Complex(1.0 + 0.1 * rng.normal(), 0.1 * rng.normal());
  }
  v.normalize();
  double residual = 0.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const ComplexVector w = m.adjoint() * (m * v);
    const double lambda = v.dot(w).real();
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;
    residual = (w - lambda * v).norm() / wnorm;
    v = w / wnorm;
    if (residual <= options.rel_tolerance) {
      return std::sqrt(std::max(lambda, 0.0));
    }
  }
  std::ostringstream msg;
  msg << "operator_norm: power iteration did not converge after "
      << options.max_iterations << " iterations (residual " << residual
      << ")";
  throw ConvergenceError(msg.str(), residual);
}

double operator_norm(const ComplexMatrix& m, const NormOptions& options) {
  if (m.size() == 0) return 0.0;
  require_finite(m, "operator_norm");
  if (std::max(m.rows(), m.cols()) <= options.svd_max_dim) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
  }
  // Power iteration needs a looser residual than the SVD path achieves,
  // the eigenvalue error is quadratic in it.
  NormOptions power = options;
  power.rel_tolerance = std::max(options.rel_tolerance, 1e-9);
  return operator_norm_power_iteration(m, power);
}

std::string_view to_string(MapClass c) {
  switch (c) {
    case MapClass::strict_contraction:
      return "strict_contraction";
    case MapClass::contraction_boundary:
      return "contraction_boundary";
    case MapClass::isometry:
      return "isometry";
    case MapClass::unitary:
      return "unitary";
    case MapClass::expansion:
      return "expansion";
  }
  return "unknown";
}

MapClass classify(const ComplexMatrix& m, double tol) {
  if (!(tol > 0.0)) throw Error("classify: tolerance must be positive");
  const ComplexMatrix gram = m.adjoint() * m;
  const bool isometric = operator_norm(gram - identity(m.cols())) <= tol;
  if (isometric) {
    if (m.rows() == m.cols() &&
        operator_norm(m * m.adjoint() - identity(m.rows())) <= tol) {
      return MapClass::unitary;
    }
    return MapClass::isometry;
  }
  const double norm = operator_norm(m);
  if (norm < 1.0 - tol) return MapClass::strict_contraction;
  if (norm <= 1.0 + tol) return MapClass::contraction_boundary;
  return MapClass::expansion;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix matrix_power(const ComplexMatrix& m, std::size_t n) {
  if (m.rows() != m.cols()) throw Error("matrix_power: matrix must be square");
  ComplexMatrix result = identity(m.rows());
  ComplexMatrix base = m;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

ComplexMatrix pseudoinverse(const ComplexMatrix& m, double rel_cutoff) {
  if (m.size() == 0) return ComplexMatrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = rel_cutoff * s(0);
  ComplexMatrix sigma_inv = ComplexMatrix::Zero(m.cols(), m.rows());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) sigma_inv(i, i) = 1.0 / s(i);
  }
  return svd.matrixV() * sigma_inv * svd.matrixU().adjoint();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& h) {
  if (h.size() == 0) return h;
  const ComplexMatrix herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm);
  Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const ComplexMatrix& vecs = eig.eigenvectors();
  return vecs * values.cast<Complex>().asDiagonal() * vecs.adjoint();
}

Partition::Partition(std::vector<std::string> names,
                     std::vector<Eigen::Index> sizes)
    : names_(std::move(names)), sizes_(std::move(sizes)) {
  if (names_.size() != sizes_.size()) {
    throw PartitionError("partition: names and sizes differ in length");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (sizes_[i] < 0) {
      throw PartitionError("partition: block '" + names_[i] +
                           "' has negative size");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) {
        throw PartitionError("partition: duplicate block label '" +
                             names_[i] + "'");
      }
    }
  }
  total_ = std::accumulate(sizes_.begin(), sizes_.end(), Eigen::Index{0});
}

Partition Partition::single(std::string name, Eigen::Index size) {
  return Partition({std::move(name)}, {size});
}

bool Partition::contains(std::string_view label) const {
  return std::find(names_.begin(), names_.end(), label) != names_.end();
}

std::size_t Partition::position(std::string_view label) const {
  const auto it = std::find(names_.begin(), names_.end(), label);
  if (it == names_.end()) {
    throw PartitionError("unknown block label '" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(it - names_.begin());
}

Eigen::Index Partition::offset(std::string_view label) const {
  const std::size_t pos = position(label);
  return std::accumulate(sizes_.begin(), sizes_.begin() + static_cast<std::ptrdiff_t>(pos),
                         Eigen::Index{0});
}

Eigen::Index Partition::size(std::string_view label) const {
  return sizes_[position(label)];
}

std::vector<Eigen::Index> Partition::indices_of(std::string_view label) const {
  const Eigen::Index start = offset(label);
  std::vector<Eigen::Index> out(static_cast<std::size_t>(size(label)));
  std::iota(out.begin(), out.end(), start);
  return out;
}

std::vector<Eigen::Index> Partition::indices_except(
    std::string_view label) const {
  const std::size_t skip = position(label);
  std::vector<Eigen::Index> out;
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (Eigen::Index k = 0; k < sizes_[i]; ++k, ++at) {
      if (i != skip) out.push_back(at);
    }
  }
  return out;
}

Partition Partition::without(std::string_view label) const {
  const std::size_t skip = position(label);
  std::vector<std::string> names;
  std::vector<Eigen::Index> sizes;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (i == skip) continue;
    names.push_back(names_[i]);
    sizes.push_back(sizes_[i]);
  }
  return Partition(std::move(names), std::move(sizes));
}

Partition Partition::merged(const std::vector<std::string>& labels,
                            std::string name) const {
  if (labels.empty()) throw PartitionError("merged: no labels given");
  const std::size_t first = position(labels.front());
  Eigen::Index size = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (position(labels[k]) != first + k) {
      throw PartitionError("merged: blocks to merge must be consecutive, '" +
                           labels[k] + "' is out of place");
    }
    size += sizes_[first + k];
  }
  std::vector<std::string> names;
  std::vector<Eigen::Index> sizes;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (i == first) {
      names.push_back(name);
      sizes.push_back(size);
    }
    if (i >= first && i < first + labels.size()) continue;
    names.push_back(names_[i]);
    sizes.push_back(sizes_[i]);
  }
  return Partition(std::move(names), std::move(sizes));
}

Partition Partition::concat(const Partition& tail) const {
  std::vector<std::string> names = names_;
  std::vector<Eigen::Index> sizes = sizes_;
  names.insert(names.end(), tail.names_.begin(), tail.names_.end());
  sizes.insert(sizes.end(), tail.sizes_.begin(), tail.sizes_.end());
  return Partition(std::move(names), std::move(sizes));
}

PartitionedMap::PartitionedMap(ComplexMatrix matrix, Partition rows,
                               Partition cols)
    : matrix_(std::move(matrix)), rows_(std::move(rows)), cols_(std::move(cols)) {
  if (matrix_.rows() != rows_.total() || matrix_.cols() != cols_.total()) {
    std::ostringstream msg;
    msg << "partitioned map: matrix is " << matrix_.rows() << "x"
        << matrix_.cols() << " but partitions total " << rows_.total() << "x"
        << cols_.total();
    throw PartitionError(msg.str());
  }
  require_finite(matrix_, "partitioned map");
}

ComplexMatrix gather(const ComplexMatrix& m,
                     const std::vector<Eigen::Index>& rows,
                     const std::vector<Eigen::Index>& cols) {
  ComplexMatrix out(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(rows[i], cols[j]);
    }
  }
  return out;
}

ComplexMatrix block(const PartitionedMap& f, std::string_view row_label,
                    std::string_view col_label) {
  return f.matrix().block(f.rows().offset(row_label), f.cols().offset(col_label),
                          f.rows().size(row_label), f.cols().size(col_label));
}

namespace {

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(s * re, s * im);
    }
  }
  return g;
}

}  // namespace

ComplexMatrix random_unitary(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw Error("random_unitary: dimension must be >= 1");
  Rng rng(derive_seed(seed, 0x756e69ULL));
  const ComplexMatrix z = ginibre(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : Complex(1.0);
  }
  return q;
}

ComplexMatrix random_isometry(Eigen::Index rows, Eigen::Index cols,
                              std::uint64_t seed) {
  if (rows < cols || cols < 1) {
    throw Error("random_isometry: need rows >= cols >= 1");
  }
  return random_unitary(rows, seed).leftCols(cols);
}

ComplexMatrix random_contraction(Eigen::Index rows, Eigen::Index cols,
                                 std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw Error("random_contraction: dimensions must be >= 1");
  }
  Rng rng(derive_seed(seed, 0x636f6eULL));
  const ComplexMatrix g = ginibre(rows, cols, rng);
  const double target = rng.uniform();
  const double norm = operator_norm(g);
  if (norm == 0.0) return g;
  return g * (target / norm);
}

}  // namespace qiter
