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
#include <string_view>
#include <vector>

#include "qiter/error.hpp"
#include "qiter/lsi.hpp"
#include "qiter/trace.hpp"

namespace qiter::qwhile {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) +
              ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

enum class NodeKind { gate, delay, seq, par, loop };
std::string_view to_string(NodeKind k);

struct Node {
  NodeKind kind = NodeKind::gate;
  std::string gate;              // gate: name in the gate table
  std::int64_t delay = 0;        // delay: time shift
  std::int64_t feedback = 0;     // loop: number of trailing ports fed back
  std::vector<Node> children;    // seq/par: two, loop: one
  int line = 0;
  int column = 0;

  static Node make_gate(std::string name);
  static Node make_delay(std::int64_t t);
  static Node make_seq(Node first, Node second);
  static Node make_par(Node top, Node bottom);
  static Node make_loop(Node body, std::int64_t k);
};

struct GateDecl {
  ComplexMatrix matrix;
  int line = 0;
  int column = 0;
};

struct Program {
  std::map<std::string, GateDecl> gates;
  Node root;
};

struct CheckOptions {
  // Accept gate matrices that are contractions rather than unitaries.
  bool allow_contraction = false;
  double unitary_tol = 1e-9;
};

struct Diagnostic {
  // Child indices from the root, e.g. "root.0.1" is the second child of the
  // first child.
  std::string path;
  std::string message;
  int line = 0;
  int column = 0;
};

struct WellFormedReport {
  std::vector<Diagnostic> diagnostics;
  // Inferred port counts of the root; meaningful only when ok().
  Eigen::Index in_ports = 0;
  Eigen::Index out_ports = 0;
  bool ok() const { return diagnostics.empty(); }
};

// Syntax only: gate declarations followed by one s-expression. Throws
// ParseError with the position of the first syntax error.
Program parse_unchecked(std::string_view text);
// parse_unchecked followed by check; the first diagnostic becomes a
// ParseError.
Program parse(std::string_view text, const CheckOptions& options = {});
Program parse_file(const std::string& path, const CheckOptions& options = {});

WellFormedReport check(const Program& p, const CheckOptions& options = {});

// Response of the program on the uniform grid of size n, as a map from the
// block "in" to the block "out".
FrequencyResponse semantics(const Program& p, std::size_t n = kDefaultGridSize,
                            const TraceConfig& cfg = {}, unsigned threads = 1);
// The same at one grid point omega = 2 pi j / n.
ComplexMatrix semantics_at(const Program& p, std::size_t j, std::size_t n,
                           const TraceConfig& cfg = {});

std::string to_sexpr(const Node& n);

}  // namespace qiter::qwhile
