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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qiter/linalg.hpp"
#include "qiter/trace.hpp"

namespace qiter {

constexpr std::size_t kDefaultGridSize = 256;

// Finitely supported matrix-valued impulse response. Tap t maps the input
// at time s to the output at time s + t.
struct FirKernel {
  Partition in_ports;
  Partition out_ports;
  std::map<std::int64_t, ComplexMatrix> taps;

  // Throws qiter::Error when a tap has the wrong shape or is non-finite.
  void validate() const;
  // [min, max] of the tap offsets; {0, -1} for the zero kernel.
  std::pair<std::int64_t, std::int64_t> support() const;

  static FirKernel delta(const Partition& ports);
  static FirKernel delay(const Partition& ports, std::int64_t t);
  static FirKernel constant(const ComplexMatrix& m, const Partition& out,
                            const Partition& in);
};

struct FrequencyResponse {
  Partition rows;
  Partition cols;
  std::vector<double> grid;
  std::vector<ComplexMatrix> samples;
  // Set when the samples are the transform of a kernel with this support.
  std::optional<std::pair<std::int64_t, std::int64_t>> source_support;

  std::size_t size() const { return samples.size(); }
  void validate() const;
};

// Vector-valued function of time with finite support.
struct Signal {
  Eigen::Index ports = 0;
  std::map<std::int64_t, ComplexVector> samples;
  void validate() const;
};

// omega_j = 2 pi j / N for j < N.
std::vector<double> uniform_grid(std::size_t n);

// e^{-i omega_j t} with the product j t reduced mod n before leaving integers.
Complex grid_phase(std::size_t j, std::int64_t t, std::size_t n);

ComplexMatrix dtft_at(const FirKernel& k, double omega);
FrequencyResponse dtft(const FirKernel& k, std::size_t n = kDefaultGridSize);

// g after f. Requires g's input ports to line up with f's output ports
// block by block.
FirKernel convolve(const FirKernel& g, const FirKernel& f);
FirKernel kernel_direct_sum(const FirKernel& a, const FirKernel& b);
// Time-reversed conjugate transpose; its transform is the pointwise adjoint.
FirKernel kernel_adjoint(const FirKernel& k);

Signal apply(const FirKernel& k, const Signal& s);

// Pointwise g_omega f_omega and direct sum of responses on the same grid.
FrequencyResponse compose(const FrequencyResponse& g, const FrequencyResponse& f);
FrequencyResponse response_direct_sum(const FrequencyResponse& a,
                                      const FrequencyResponse& b);

enum class LsiClass { lsi_contraction, not_certified };
std::string_view to_string(LsiClass c);

// Per-frequency contraction is sufficient; it is not known to be necessary,
// hence "not certified" rather than a negative verdict.
LsiClass lsi_classify(const FrequencyResponse& r,
                      double tol = kDefaultClassifyTol);

// Per-frequency ex over `loop`. Throws DivergenceError naming the first
// frequency where the trace is undefined.
FrequencyResponse lsi_ex(const FrequencyResponse& r, std::string_view loop,
                         const TraceConfig& cfg = {}, unsigned threads = 1);

// sum_j |S(omega_j)|^2 / N, equal to sum_t |s(t)|^2 once N exceeds the
// support width.
double parseval_norm(const Signal& s, std::size_t n);
double time_domain_norm_squared(const Signal& s);

struct InverseDtftResult {
  FirKernel kernel;
  // Set when the response did not come from a kernel of support width < N,
  // so taps t and t + N are indistinguishable.
  bool aliasing_warning = false;
  std::string warning;
};

// Inverse DFT of the grid samples. With a known source support the taps land
// on it exactly; otherwise they are placed on [-N/2, N - N/2).
InverseDtftResult inverse_dtft(const FrequencyResponse& r);

// {"in_ports": [...], "out_ports": [...], "taps": {"<t>": matrix}}
FirKernel kernel_from_json(const nlohmann::json& j);
nlohmann::json kernel_to_json(const FirKernel& k);
nlohmann::json response_to_json(const FrequencyResponse& r);

// One line per entry: omega,block_row,block_col,re,im. Rows and columns are
// named "<block>" or "<block>[i]" when the block is wider than one.
std::string response_to_csv(const FrequencyResponse& r);

}  // namespace qiter
