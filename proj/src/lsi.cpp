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

#include "qiter/lsi.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qiter/error.hpp"
#include "qiter/json_io.hpp"
#include "qiter/parallel.hpp"

namespace qiter {

namespace {

// e^{-i omega_j t} on the uniform grid, with the phase reduced mod N first so
// large offsets do not lose precision.
Complex signed_grid_phase(std::size_t j, std::int64_t t, std::size_t n, int sign) {
  const auto nn = static_cast<std::int64_t>(n);
  const std::int64_t tm = ((t % nn) + nn) % nn;
  const auto r = static_cast<std::int64_t>(
      (static_cast<unsigned __int128>(j) * static_cast<unsigned __int128>(tm)) % n);
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) /
                       static_cast<double>(n);
  return std::polar(1.0, sign * angle);
}

void require_grid(std::size_t n) {
  if (n < 2) throw Error("frequency grid needs at least 2 points, got " + std::to_string(n));
}

void require_same_grid(const FrequencyResponse& a, const FrequencyResponse& b) {
  if (a.grid != b.grid) throw Error("frequency responses live on different grids");
}

std::string port_name(const Partition& p, Eigen::Index flat) {
  for (std::size_t b = 0; b < p.block_count(); ++b) {
    const Eigen::Index off = p.offset(p.names()[b]);
    const Eigen::Index size = p.sizes()[b];
    if (flat >= off && flat < off + size) {
      if (size == 1) return p.names()[b];
      return p.names()[b] + "[" + std::to_string(flat - off) + "]";
    }
  }
  return std::to_string(flat);
}

}  // namespace

void FirKernel::validate() const {
  for (const auto& [t, m] : taps) {
    if (m.rows() != out_ports.total() || m.cols() != in_ports.total()) {
      throw Error("kernel tap " + std::to_string(t) + " has shape " +
                  std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                  ", ports need " + std::to_string(out_ports.total()) + "x" +
                  std::to_string(in_ports.total()));
    }
    require_finite(m, "kernel tap " + std::to_string(t));
  }
}

std::pair<std::int64_t, std::int64_t> FirKernel::support() const {
  if (taps.empty()) return {0, -1};
  return {taps.begin()->first, taps.rbegin()->first};
}

FirKernel FirKernel::delta(const Partition& ports) { return delay(ports, 0); }

FirKernel FirKernel::delay(const Partition& ports, std::int64_t t) {
  FirKernel k{ports, ports, {}};
  k.taps.emplace(t, identity(ports.total()));
  return k;
}

FirKernel FirKernel::constant(const ComplexMatrix& m, const Partition& out,
                              const Partition& in) {
  FirKernel k{in, out, {}};
  k.taps.emplace(0, m);
  k.validate();
  return k;
}

void FrequencyResponse::validate() const {
  require_grid(grid.size());
  if (samples.size() != grid.size()) {
    throw Error("frequency response has " + std::to_string(samples.size()) +
                " samples for a grid of " + std::to_string(grid.size()));
  }
  for (const auto& s : samples) {
    if (s.rows() != rows.total() || s.cols() != cols.total()) {
      throw Error("frequency response samples disagree with its block structure");
    }
  }
}

void Signal::validate() const {
  for (const auto& [t, v] : samples) {
    if (v.size() != ports) {
      throw Error("signal sample at t=" + std::to_string(t) + " has length " +
                  std::to_string(v.size()) + ", expected " + std::to_string(ports));
    }
  }
}

Complex grid_phase(std::size_t j, std::int64_t t, std::size_t n) {
  require_grid(n);
  return signed_grid_phase(j, t, n, -1);
}

std::vector<double> uniform_grid(std::size_t n) {
  require_grid(n);
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) {
    g[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
  }
  return g;
}

ComplexMatrix dtft_at(const FirKernel& k, double omega) {
  ComplexMatrix out = ComplexMatrix::Zero(k.out_ports.total(), k.in_ports.total());
  for (const auto& [t, m] : k.taps) {
    out += std::polar(1.0, -omega * static_cast<double>(t)) * m;
  }
  return out;
}

FrequencyResponse dtft(const FirKernel& k, std::size_t n) {
  k.validate();
  FrequencyResponse r;
  r.rows = k.out_ports;
  r.cols = k.in_ports;
  r.grid = uniform_grid(n);
  r.samples.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    ComplexMatrix s = ComplexMatrix::Zero(r.rows.total(), r.cols.total());
    for (const auto& [t, m] : k.taps) s += signed_grid_phase(j, t, n, -1) * m;
    r.samples.push_back(std::move(s));
  }
  r.source_support = k.support();
  return r;
}

FirKernel convolve(const FirKernel& g, const FirKernel& f) {
  g.validate();
  f.validate();
  if (g.in_ports.total() != f.out_ports.total()) {
    throw Error("convolve: " + std::to_string(g.in_ports.total()) +
                " input ports cannot take " + std::to_string(f.out_ports.total()) +
                " output ports");
  }
  FirKernel out{f.in_ports, g.out_ports, {}};
  for (const auto& [tg, mg] : g.taps) {
    for (const auto& [tf, mf] : f.taps) {
      const ComplexMatrix prod = mg * mf;
      auto [it, inserted] = out.taps.try_emplace(tg + tf, prod);
      if (!inserted) it->second += prod;
    }
  }
  return out;
}

FirKernel kernel_direct_sum(const FirKernel& a, const FirKernel& b) {
  a.validate();
  b.validate();
  FirKernel out{a.in_ports.concat(b.in_ports), a.out_ports.concat(b.out_ports), {}};
  const ComplexMatrix za = ComplexMatrix::Zero(a.out_ports.total(), a.in_ports.total());
  const ComplexMatrix zb = ComplexMatrix::Zero(b.out_ports.total(), b.in_ports.total());
  for (const auto& [t, m] : a.taps) {
    auto it = b.taps.find(t);
    out.taps.emplace(t, direct_sum(m, it == b.taps.end() ? zb : it->second));
  }
  for (const auto& [t, m] : b.taps) {
    if (!a.taps.count(t)) out.taps.emplace(t, direct_sum(za, m));
  }
  return out;
}

FirKernel kernel_adjoint(const FirKernel& k) {
  FirKernel out{k.out_ports, k.in_ports, {}};
  for (const auto& [t, m] : k.taps) out.taps.emplace(-t, m.adjoint());
  return out;
}

Signal apply(const FirKernel& k, const Signal& s) {
  k.validate();
  s.validate();
  if (s.ports != k.in_ports.total()) {
    throw Error("apply: kernel takes " + std::to_string(k.in_ports.total()) +
                " ports, signal has " + std::to_string(s.ports));
  }
  Signal out{k.out_ports.total(), {}};
  for (const auto& [tk, m] : k.taps) {
    for (const auto& [ts, v] : s.samples) {
      const ComplexVector y = m * v;
      auto [it, inserted] = out.samples.try_emplace(tk + ts, y);
      if (!inserted) it->second += y;
    }
  }
  return out;
}

FrequencyResponse compose(const FrequencyResponse& g, const FrequencyResponse& f) {
  require_same_grid(g, f);
  if (g.cols.total() != f.rows.total()) {
    throw Error("compose: shapes do not chain");
  }
  FrequencyResponse out;
  out.rows = g.rows;
  out.cols = f.cols;
  out.grid = f.grid;
  out.samples.reserve(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    out.samples.push_back(g.samples[j] * f.samples[j]);
  }
  if (g.source_support && f.source_support) {
    out.source_support = std::make_pair(g.source_support->first + f.source_support->first,
                                        g.source_support->second + f.source_support->second);
  }
  return out;
}

FrequencyResponse response_direct_sum(const FrequencyResponse& a,
                                      const FrequencyResponse& b) {
  require_same_grid(a, b);
  FrequencyResponse out;
  out.rows = a.rows.concat(b.rows);
  out.cols = a.cols.concat(b.cols);
  out.grid = a.grid;
  out.samples.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    out.samples.push_back(direct_sum(a.samples[j], b.samples[j]));
  }
  if (a.source_support && b.source_support) {
    out.source_support = std::make_pair(
        std::min(a.source_support->first, b.source_support->first),
        std::max(a.source_support->second, b.source_support->second));
  }
  return out;
}

std::string_view to_string(LsiClass c) {
  return c == LsiClass::lsi_contraction ? "lsi_contraction" : "not_certified";
}

LsiClass lsi_classify(const FrequencyResponse& r, double tol) {
  for (const auto& s : r.samples) {
    if (!is_contraction(classify(s, tol))) return LsiClass::not_certified;
  }
  return LsiClass::lsi_contraction;
}

FrequencyResponse lsi_ex(const FrequencyResponse& r, std::string_view loop,
                         const TraceConfig& cfg, unsigned threads) {
  r.validate();
  FrequencyResponse out;
  out.rows = r.rows.without(loop);
  out.cols = r.cols.without(loop);
  out.grid = r.grid;
  out.samples.resize(r.size());
  std::vector<std::string> errors(r.size());
  parallel_for(r.size(), threads, [&](std::size_t j) {
    try {
      out.samples[j] = ex(PartitionedMap(r.samples[j], r.rows, r.cols), loop, cfg).value;
    } catch (const PartitionError&) {
      throw;
    } catch (const Error& e) {
      errors[j] = e.what();
    }
  });
  for (std::size_t j = 0; j < errors.size(); ++j) {
    if (!errors[j].empty()) {
      throw DivergenceError("lsi_ex: trace undefined at omega=" +
                                format_double(r.grid[j]) + ": " + errors[j],
                            j);
    }
  }
  return out;
}

double time_domain_norm_squared(const Signal& s) {
  double total = 0.0;
  for (const auto& [t, v] : s.samples) total += v.squaredNorm();
  return total;
}

double parseval_norm(const Signal& s, std::size_t n) {
  require_grid(n);
  s.validate();
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    ComplexVector acc = ComplexVector::Zero(s.ports);
    for (const auto& [t, v] : s.samples) acc += signed_grid_phase(j, t, n, -1) * v;
    total += acc.squaredNorm();
  }
  return total / static_cast<double>(n);
}

InverseDtftResult inverse_dtft(const FrequencyResponse& r) {
  r.validate();
  const std::size_t n = r.size();
  // Uniform grid is assumed: omega_j = 2 pi j / N.
  const std::vector<double> expected = uniform_grid(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(r.grid[j] - expected[j]) > 1e-12) {
      throw Error("inverse_dtft: grid is not the uniform grid of size " + std::to_string(n));
    }
  }
  InverseDtftResult out;
  out.kernel.in_ports = r.cols;
  out.kernel.out_ports = r.rows;
  const auto nn = static_cast<std::int64_t>(n);
  std::int64_t lo = -nn / 2;
  std::int64_t hi = nn - nn / 2 - 1;
  if (r.source_support && r.source_support->second - r.source_support->first < nn) {
    lo = r.source_support->first;
    hi = r.source_support->second;
  } else {
    out.aliasing_warning = true;
    std::ostringstream msg;
    msg << "response is not known to come from a kernel of support width < " << n
        << "; taps are aliased mod " << n << " and placed on [" << lo << ", " << hi << "]";
    out.warning = msg.str();
  }
  for (std::int64_t t = lo; t <= hi; ++t) {
    ComplexMatrix tap = ComplexMatrix::Zero(r.rows.total(), r.cols.total());
    for (std::size_t j = 0; j < n; ++j) tap += signed_grid_phase(j, t, n, +1) * r.samples[j];
    out.kernel.taps.emplace(t, tap / static_cast<double>(n));
  }
  return out;
}

FirKernel kernel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("in_ports") || !j.contains("out_ports") ||
      !j.contains("taps")) {
    throw Error("kernel: expected an object with in_ports, out_ports and taps");
  }
  FirKernel k;
  k.in_ports = partition_from_json(j.at("in_ports"));
  k.out_ports = partition_from_json(j.at("out_ports"));
  if (!j.at("taps").is_object()) throw Error("kernel: taps must be an object keyed by time");
  for (const auto& [key, value] : j.at("taps").items()) {
    std::size_t used = 0;
    std::int64_t t = 0;
    try {
      t = std::stoll(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || key.empty()) {
      throw Error("kernel: tap key '" + key + "' is not an integer");
    }
    if (!k.taps.emplace(t, matrix_from_json(value)).second) {
      throw Error("kernel: duplicate tap " + key);
    }
  }
  k.validate();
  return k;
}

nlohmann::json kernel_to_json(const FirKernel& k) {
  nlohmann::json taps = nlohmann::json::object();
  for (const auto& [t, m] : k.taps) taps[std::to_string(t)] = matrix_to_json(m);
  return {{"in_ports", partition_to_json(k.in_ports)},
          {"out_ports", partition_to_json(k.out_ports)},
          {"taps", taps}};
}

nlohmann::json response_to_json(const FrequencyResponse& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.samples) samples.push_back(matrix_to_json(s));
  return {{"rows", partition_to_json(r.rows)},
          {"cols", partition_to_json(r.cols)},
          {"grid", r.grid},
          {"samples", samples}};
}

std::string response_to_csv(const FrequencyResponse& r) {
  std::string out = "omega,block_row,block_col,re,im\n";
  std::vector<std::string> rn, cn;
  for (Eigen::Index i = 0; i < r.rows.total(); ++i) rn.push_back(port_name(r.rows, i));
  for (Eigen::Index i = 0; i < r.cols.total(); ++i) cn.push_back(port_name(r.cols, i));
  for (std::size_t j = 0; j < r.size(); ++j) {
    const std::string omega = format_double(r.grid[j]);
    for (Eigen::Index a = 0; a < r.samples[j].rows(); ++a) {
      for (Eigen::Index b = 0; b < r.samples[j].cols(); ++b) {
        const Complex z = r.samples[j](a, b);
        out += omega + "," + rn[a] + "," + cn[b] + "," + format_double(z.real()) + "," +
               format_double(z.imag()) + "\n";
      }
    }
  }
  return out;
}

}  // namespace qiter
