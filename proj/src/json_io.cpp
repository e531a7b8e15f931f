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

#include "qiter/json_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qiter/error.hpp"

namespace qiter {

namespace {

Complex entry_from_json(const nlohmann::json& e) {
  if (e.is_number()) return Complex(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return Complex(e[0].get<double>(), e[1].get<double>());
  }
  throw Error("matrix literal: entry must be [re, im] or a number, got " +
              e.dump());
}

void write_string(std::ostringstream& out, const std::string& s) {
  out << nlohmann::json(s).dump();
}

void write(std::ostringstream& out, const nlohmann::json& j, int indent,
           int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out << ',';
        first = false;
        newline(depth + 1);
        write_string(out, key);
        out << (indent < 0 ? ":" : ": ");
        write(out, value, indent, depth + 1);
      }
      newline(depth);
      out << '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Short arrays of scalars stay on one line; keeps matrices readable.
      bool scalars = true;
      for (const auto& v : j) {
        scalars = scalars && !v.is_structured();
      }
      bool pairs_only = true;
      for (const auto& v : j) {
        pairs_only = pairs_only && v.is_array() && v.size() <= 2 &&
                     std::all_of(v.begin(), v.end(),
                                 [](const auto& x) { return !x.is_structured(); });
      }
      out << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out << (indent < 0 ? "," : ", ");
        first = false;
        if (!scalars && !pairs_only) newline(depth + 1);
        write(out, v, scalars || pairs_only ? -1 : indent, depth + 1);
      }
      if (!scalars && !pairs_only) newline(depth);
      out << ']';
      return;
    }
    case nlohmann::json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    case nlohmann::json::value_t::string:
      write_string(out, j.get<std::string>());
      return;
    default:
      out << j.dump();
      return;
  }
}

}  // namespace

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error("matrix literal: expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return ComplexMatrix(0, 0);
  if (!j[0].is_array()) throw Error("matrix literal: rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      std::ostringstream msg;
      msg << "matrix literal: row " << i << " has wrong length (expected "
          << cols << ")";
      throw Error(msg.str());
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = entry_from_json(row[static_cast<std::size_t>(k)]);
    }
  }
  require_finite(m, "matrix literal");
  return m;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      row.push_back({m(i, k).real(), m(i, k).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Partition partition_from_json(const nlohmann::json& j) {
  std::vector<std::string> names;
  std::vector<Eigen::Index> sizes;
  if (j.is_object()) {
    names = j.at("names").get<std::vector<std::string>>();
    sizes = j.at("sizes").get<std::vector<Eigen::Index>>();
  } else if (j.is_array()) {
    for (const auto& b : j) {
      if (b.is_string()) {
        names.push_back(b.get<std::string>());
        sizes.push_back(1);
        continue;
      }
      if (!b.is_array() || b.size() != 2 || !b[0].is_string() ||
          !b[1].is_number_integer()) {
        throw Error("partition: expected [name, size] pairs, got " + b.dump());
      }
      names.push_back(b[0].get<std::string>());
      sizes.push_back(b[1].get<Eigen::Index>());
    }
  } else {
    throw Error("partition: expected an array or an object");
  }
  return Partition(std::move(names), std::move(sizes));
}

nlohmann::json partition_to_json(const Partition& p) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < p.block_count(); ++i) {
    out.push_back({p.names()[i], p.sizes()[i]});
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  std::string s(buf, res.ptr);
  // Keep it a JSON float token so a reader does not demote it to an integer.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json(const nlohmann::json& j, int indent) {
  std::ostringstream out;
  write(out, j, indent, 0);
  return out.str();
}

}  // namespace qiter
