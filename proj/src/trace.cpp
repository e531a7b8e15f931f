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

#include "qiter/trace.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "qiter/error.hpp"

namespace qiter {

void TraceConfig::validate() const {
  if (!(series_tol > 0.0) || !(ki_residual_tol > 0.0) || !(compare_tol > 0.0) ||
      !(classify_tol > 0.0) || !(blowup > 0.0) || !(ki_rank_cutoff > 0.0)) {
    throw Error("trace config: tolerances must be positive");
  }
  if (max_terms < 1) throw Error("trace config: max_terms must be >= 1");
}

std::string_view to_string(TraceMethod m) {
  switch (m) {
    case TraceMethod::series:
      return "series";
    case TraceMethod::kernel_image:
      return "kernel_image";
    case TraceMethod::both_agree:
      return "both_agree";
  }
  return "unknown";
}

namespace {

struct LoopBlocks {
  ComplexMatrix ba, bu, ua, uu;
  Partition rows, cols;
};

LoopBlocks split(const PartitionedMap& f, std::string_view loop) {
  if (!f.rows().contains(loop) || !f.cols().contains(loop)) {
    throw PartitionError("loop block '" + std::string(loop) +
                         "' must appear in both row and column partitions");
  }
  if (f.rows().size(loop) != f.cols().size(loop)) {
    std::ostringstream msg;
    msg << "loop block '" << loop << "' has " << f.rows().size(loop)
        << " rows but " << f.cols().size(loop) << " columns";
    throw PartitionError(msg.str());
  }
  const auto rb = f.rows().indices_except(loop);
  const auto ru = f.rows().indices_of(loop);
  const auto ca = f.cols().indices_except(loop);
  const auto cu = f.cols().indices_of(loop);
  const ComplexMatrix& m = f.matrix();
  return {gather(m, rb, ca), gather(m, rb, cu), gather(m, ru, ca),
          gather(m, ru, cu), f.rows().without(loop), f.cols().without(loop)};
}

// Bound on sum_k ||g^k|| restricted to the decaying part of the loop block,
// plus a projector onto that part. nullopt when no bound is available.
struct TailModel {
  double geometric_sum = 0.0;
  ComplexMatrix projector;  // empty means identity
};

std::optional<TailModel> tail_model(const ComplexMatrix& uu, bool contraction,
                                    double tol) {
  const auto m = static_cast<std::size_t>(uu.rows());
  const auto bound_for = [](const ComplexMatrix& g, std::size_t probe)
      -> std::optional<double> {
    if (g.rows() == 0) return 0.0;
    double window = 0.0;
    ComplexMatrix p = identity(g.rows());
    for (std::size_t j = 0; j < probe; ++j) {
      window += operator_norm(p);
      p = p * g;
    }
    const double q = operator_norm(p);
    if (!(q < 1.0)) return std::nullopt;
    return window / (1.0 - q);
  };
  if (auto direct = bound_for(uu, m)) return TailModel{*direct, {}};
  if (!contraction) return std::nullopt;
  // The unitary part of a contraction's loop block is unreachable from A and
  // invisible from B, so only the completely nonunitary part contributes.
  const CnuDecomposition cnu = cnu_decompose(uu, tol);
  const auto d1 = cnu.f1.rows();
  auto sum = bound_for(cnu.f1, static_cast<std::size_t>(d1));
  if (!sum) return std::nullopt;
  const ComplexMatrix basis1 = cnu.basis_change.rightCols(d1);
  return TailModel{*sum, basis1 * basis1.adjoint()};
}

TraceResult trivial_loop(const LoopBlocks& b) {
  TraceResult r;
  r.value = b.ba;
  r.rows = b.rows;
  r.cols = b.cols;
  r.method = TraceMethod::both_agree;
  r.converged = true;
  return r;
}

}  // namespace

TraceResult ex_series(const PartitionedMap& f, std::string_view loop,
                      const TraceConfig& cfg) {
  cfg.validate();
  const LoopBlocks b = split(f, loop);
  if (b.uu.rows() == 0) {
    TraceResult r = trivial_loop(b);
    r.method = TraceMethod::series;
    return r;
  }

  const bool contraction =
      is_contraction(classify(f.matrix(), cfg.classify_tol));
  const auto tail = tail_model(b.uu, contraction, cfg.classify_tol);
  const double bu_norm = b.bu.norm();
  const std::size_t window = static_cast<std::size_t>(b.uu.rows()) + 1;

  TraceResult r;
  r.rows = b.rows;
  r.cols = b.cols;
  r.method = TraceMethod::series;
  ComplexMatrix sum = b.ba;
  ComplexMatrix x = b.ua;  // f_UU^n f_UA
  std::size_t small_run = 0;
  for (std::size_t n = 0; n < cfg.max_terms; ++n) {
    const ComplexMatrix term = b.bu * x;
    if (!all_finite(term)) {
      throw DivergenceError("ex_series: non-finite value at term " +
                                std::to_string(n),
                            n);
    }
    sum += term;
    if (!all_finite(sum) || sum.norm() > cfg.blowup) {
      std::ostringstream msg;
      msg << "ex_series: partial sum exceeded blowup bound " << cfg.blowup
          << " at term " << n << " (series does not converge in norm)";
      throw DivergenceError(msg.str(), n);
    }
    x = b.uu * x;
    const double term_norm = term.norm();
    r.terms_used = n + 1;
    double remaining;
    if (tail) {
      const double x_norm =
          tail->projector.size() == 0 ? x.norm() : (tail->projector * x).norm();
      remaining = bu_norm * x_norm * tail->geometric_sum;
    } else {
      // No geometric bound: require a run of negligible terms covering a
      // full Cayley-Hamilton window.
      small_run = term_norm <= cfg.series_tol ? small_run + 1 : 0;
      remaining = small_run >= window ? term_norm : std::numeric_limits<double>::infinity();
    }
    r.residual = term_norm + remaining;
    if (term_norm <= cfg.series_tol && remaining <= cfg.series_tol) {
      r.converged = true;
      break;
    }
  }
  r.value = std::move(sum);
  return r;
}

TraceResult ex_kernel_image(const PartitionedMap& f, std::string_view loop,
                            const TraceConfig& cfg) {
  cfg.validate();
  const LoopBlocks b = split(f, loop);
  if (b.uu.rows() == 0) {
    TraceResult r = trivial_loop(b);
    r.method = TraceMethod::kernel_image;
    return r;
  }
  const ComplexMatrix h = identity(b.uu.rows()) - b.uu;
  const ComplexMatrix h_pinv = pseudoinverse(h, cfg.ki_rank_cutoff);
  const ComplexMatrix i = h_pinv * b.ua;
  const ComplexMatrix k = b.bu * h_pinv;
  const double image_residual = operator_norm(h * i - b.ua);
  const double kernel_residual = operator_norm(k * h - b.bu);
  if (image_residual > cfg.ki_residual_tol ||
      kernel_residual > cfg.ki_residual_tol) {
    std::ostringstream msg;
    msg << "not ki-traceable over '" << loop
        << "': image residual " << image_residual << ", kernel residual "
        << kernel_residual << " (tolerance " << cfg.ki_residual_tol << ")";
    throw NotKiTraceableError(msg.str(), image_residual, kernel_residual);
  }
  ComplexMatrix via_k = b.ba + k * b.ua;
  const ComplexMatrix via_i = b.ba + b.bu * i;
  const double gap = operator_norm(via_k - via_i);
  if (gap > cfg.compare_tol) {
    std::ostringstream msg;
    msg << "ex_kernel_image: f_BA + k f_UA and f_BA + f_BU i differ by " << gap;
    throw InternalConsistencyError(msg.str());
  }
  TraceResult r;
  r.value = std::move(via_k);
  r.rows = b.rows;
  r.cols = b.cols;
  r.method = TraceMethod::kernel_image;
  r.residual = std::max(image_residual, kernel_residual);
  r.converged = true;
  return r;
}

TraceResult ex(const PartitionedMap& f, std::string_view loop,
               const TraceConfig& cfg) {
  cfg.validate();
  if (f.rows().contains(loop) && f.cols().contains(loop) &&
      f.rows().size(loop) == 0 && f.cols().size(loop) == 0) {
    return trivial_loop(split(f, loop));
  }
  const bool contraction =
      is_contraction(classify(f.matrix(), cfg.classify_tol));

  if (contraction) {
    TraceResult ki;
    TraceResult se;
    try {
      ki = ex_kernel_image(f, loop, cfg);
      se = ex_series(f, loop, cfg);
    } catch (const PartitionError&) {
      throw;
    } catch (const Error& e) {
      throw InternalConsistencyError(
          std::string("ex: contraction input failed a trace route: ") +
          e.what());
    }
    if (!se.converged) {
      std::ostringstream msg;
      msg << "ex: series did not converge on a contraction within "
          << cfg.max_terms << " terms (residual " << se.residual << ")";
      throw InternalConsistencyError(msg.str());
    }
    const double gap = operator_norm(ki.value - se.value);
    if (gap > cfg.compare_tol) {
      std::ostringstream msg;
      msg << "ex: series and kernel-image traces disagree by " << gap
          << " on a contraction";
      throw InternalConsistencyError(msg.str());
    }
    ki.method = TraceMethod::both_agree;
    ki.terms_used = se.terms_used;
    ki.disagreement = gap;
    return ki;
  }

  std::optional<TraceResult> ki;
  std::optional<TraceResult> se;
  std::string ki_error;
  std::string se_error;
  std::size_t diverged_at = 0;
  try {
    ki = ex_kernel_image(f, loop, cfg);
  } catch (const NotKiTraceableError& e) {
    ki_error = e.what();
  }
  try {
    se = ex_series(f, loop, cfg);
    if (!se->converged) {
      se_error = "ex_series: no convergence within max_terms";
      diverged_at = se->terms_used;
      se.reset();
    }
  } catch (const DivergenceError& e) {
    se_error = e.what();
    diverged_at = e.term_index();
  }
  if (ki && se) {
    const double gap = operator_norm(ki->value - se->value);
    if (gap <= cfg.compare_tol) {
      ki->method = TraceMethod::both_agree;
      ki->terms_used = se->terms_used;
      ki->disagreement = gap;
      return *ki;
    }
    se->disagreement = gap;
    return *se;
  }
  if (se) return *se;
  if (ki) return *ki;
  throw DivergenceError("ex: no trace over '" + std::string(loop) + "': " +
                            se_error + "; " + ki_error,
                        diverged_at);
}

PartitionedMap merge_loop_blocks(const PartitionedMap& f,
                                 const std::vector<std::string>& labels,
                                 const std::string& merged_name) {
  return PartitionedMap(f.matrix(), f.rows().merged(labels, merged_name),
                        f.cols().merged(labels, merged_name));
}

ComplexMatrix halmos_dilation(const ComplexMatrix& f, double tol) {
  require_finite(f, "halmos_dilation");
  const double norm = operator_norm(f);
  if (norm > 1.0 + tol) {
    std::ostringstream msg;
    msg << "halmos_dilation: input has operator norm " << norm
        << ", not a contraction";
    throw Error(msg.str());
  }
  const Eigen::Index rows = f.rows();
  const Eigen::Index cols = f.cols();
  const ComplexMatrix fd = f.adjoint();
  const ComplexMatrix defect = psd_sqrt(identity(cols) - fd * f);
  const ComplexMatrix defect_adj = psd_sqrt(identity(rows) - f * fd);
  ComplexMatrix g(cols + rows, rows + cols);
  g.topLeftCorner(cols, rows) = -fd;
  g.topRightCorner(cols, cols) = defect;
  g.bottomLeftCorner(rows, rows) = defect_adj;
  g.bottomRightCorner(rows, cols) = f;
  return g;
}

CnuDecomposition cnu_decompose(const ComplexMatrix& f, double tol) {
  if (f.rows() != f.cols()) throw Error("cnu_decompose: matrix must be square");
  require_finite(f, "cnu_decompose");
  const Eigen::Index n = f.rows();
  CnuDecomposition out;
  if (n == 0) {
    out.basis_change = ComplexMatrix(0, 0);
    out.f0 = out.f1 = ComplexMatrix(0, 0);
    return out;
  }
  if (operator_norm(f) > 1.0 + tol) {
    throw Error("cnu_decompose: input is not a contraction");
  }
  // H0 is the common kernel of the PSD defects id - g^dagger g for
  // g in {f^k, f^dagger^k}, k = 1..n, hence the kernel of their sum.
  ComplexMatrix defects = ComplexMatrix::Zero(n, n);
  ComplexMatrix power = identity(n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    power = power * f;
    defects += identity(n) - power.adjoint() * power;
    defects += identity(n) - power * power.adjoint();
  }
  defects = 0.5 * (defects + defects.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(defects);
  const Eigen::VectorXd& values = eig.eigenvalues();
  Eigen::Index d0 = 0;
  while (d0 < n && values(d0) <= tol) ++d0;

  out.unitary_dim = d0;
  out.basis_change = eig.eigenvectors();
  const ComplexMatrix rotated = out.basis_change.adjoint() * f * out.basis_change;
  const Eigen::Index d1 = n - d0;
  out.f0 = rotated.topLeftCorner(d0, d0);
  out.f1 = rotated.bottomRightCorner(d1, d1);
  out.off_diagonal = std::max(operator_norm(rotated.topRightCorner(d0, d1)),
                              operator_norm(rotated.bottomLeftCorner(d1, d0)));
  if (out.off_diagonal > tol) {
    std::ostringstream msg;
    msg << "cnu_decompose: off-diagonal mass " << out.off_diagonal
        << " exceeds tolerance " << tol;
    throw Error(msg.str());
  }
  if (d0 > 0 && classify(out.f0, std::max(tol, kDefaultClassifyTol)) !=
                    MapClass::unitary) {
    throw Error("cnu_decompose: recovered H0 block is not unitary");
  }
  if (d1 > 0) {
    out.f1_power_norm = operator_norm(matrix_power(out.f1, static_cast<std::size_t>(d1)));
    if (!(out.f1_power_norm < 1.0)) {
      throw Error("cnu_decompose: ||f1^dim(f1)|| is not < 1");
    }
  }
  return out;
}

}  // namespace qiter
