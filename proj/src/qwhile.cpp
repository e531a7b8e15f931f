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

#include "qiter/qwhile.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "qiter/json_io.hpp"
#include "qiter/parallel.hpp"

namespace qiter::qwhile {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::gate: return "gate";
    case NodeKind::delay: return "delay";
    case NodeKind::seq: return "seq";
    case NodeKind::par: return "par";
    case NodeKind::loop: return "loop";
  }
  return "?";
}

Node Node::make_gate(std::string name) {
  Node n;
  n.kind = NodeKind::gate;
  n.gate = std::move(name);
  return n;
}

Node Node::make_delay(std::int64_t t) {
  Node n;
  n.kind = NodeKind::delay;
  n.delay = t;
  return n;
}

Node Node::make_seq(Node first, Node second) {
  Node n;
  n.kind = NodeKind::seq;
  n.children = {std::move(first), std::move(second)};
  return n;
}

Node Node::make_par(Node top, Node bottom) {
  Node n;
  n.kind = NodeKind::par;
  n.children = {std::move(top), std::move(bottom)};
  return n;
}

Node Node::make_loop(Node body, std::int64_t k) {
  Node n;
  n.kind = NodeKind::loop;
  n.feedback = k;
  n.children = {std::move(body)};
  return n;
}

namespace {

constexpr int kMaxDepth = 512;

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }
  int line() const { return line_; }
  int column() const { return column_; }

  char get() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space() {
    while (!eof()) {
      const char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') get();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else {
        return;
      }
    }
  }

  // A run of characters that are not whitespace, parentheses or comments.
  std::string atom() {
    std::string out;
    while (!eof()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
          c == ';' || c == '=') {
        break;
      }
      out.push_back(get());
    }
    return out;
  }

  bool starts_with_word(std::string_view w) const {
    if (text_.substr(pos_, w.size()) != w) return false;
    const std::size_t after = pos_ + w.size();
    return after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]));
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, column_);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

bool valid_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '-')) {
      return false;
    }
  }
  return true;
}

std::int64_t parse_int(Cursor& c, const char* what) {
  c.skip_space();
  const int line = c.line(), col = c.column();
  const std::string a = c.atom();
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
  if (a.empty() || ec != std::errc() || end != a.data() + a.size()) {
    throw ParseError(std::string("expected an integer ") + what + ", got '" + a + "'", line, col);
  }
  return v;
}

Node parse_expr(Cursor& c, int depth) {
  c.skip_space();
  if (depth > kMaxDepth) c.fail("program nested too deeply");
  const int line = c.line(), col = c.column();
  if (c.peek() != '(') c.fail(c.eof() ? "expected a program" : "expected '('");
  c.get();
  c.skip_space();
  const std::string head = c.atom();
  Node n;
  if (head == "gate") {
    c.skip_space();
    const std::string name = c.atom();
    if (!valid_name(name)) c.fail("expected a gate name, got '" + name + "'");
    n = Node::make_gate(name);
  } else if (head == "delay") {
    n = Node::make_delay(parse_int(c, "delay"));
  } else if (head == "seq" || head == "par") {
    Node a = parse_expr(c, depth + 1);
    Node b = parse_expr(c, depth + 1);
    n = head == "seq" ? Node::make_seq(std::move(a), std::move(b))
                      : Node::make_par(std::move(a), std::move(b));
  } else if (head == "loop") {
    Node body = parse_expr(c, depth + 1);
    n = Node::make_loop(std::move(body), parse_int(c, "feedback port count"));
  } else {
    throw ParseError("unknown form '" + head + "', expected gate, delay, seq, par or loop",
                     line, col + 1);
  }
  c.skip_space();
  if (c.peek() != ')') c.fail("expected ')' closing (" + head);
  c.get();
  n.line = line;
  n.column = col;
  return n;
}

// Collects one JSON array, dropping ';' comments, up to its closing bracket.
std::string take_json_array(Cursor& c) {
  if (c.peek() != '[') c.fail("expected a matrix literal starting with '['");
  std::string out;
  int depth = 0;
  bool in_string = false;
  while (!c.eof()) {
    const char ch = c.peek();
    if (in_string) {
      out.push_back(c.get());
      if (ch == '\\' && !c.eof()) out.push_back(c.get());
      else if (ch == '"') in_string = false;
      continue;
    }
    if (ch == ';') {
      while (!c.eof() && c.peek() != '\n') c.get();
      continue;
    }
    out.push_back(c.get());
    if (ch == '"') in_string = true;
    if (ch == '[') ++depth;
    if (ch == ']' && --depth == 0) return out;
  }
  c.fail("unterminated matrix literal");
}

void parse_declaration(Cursor& c, Program& p) {
  c.atom();  // "gate"
  c.skip_space();
  const int line = c.line(), col = c.column();
  const std::string name = c.atom();
  if (!valid_name(name)) throw ParseError("expected a gate name, got '" + name + "'", line, col);
  if (p.gates.count(name)) throw ParseError("gate " + name + " declared twice", line, col);
  c.skip_space();
  if (c.peek() != '=') c.fail("expected '=' after gate " + name);
  c.get();
  c.skip_space();
  const int jline = c.line(), jcol = c.column();
  const std::string literal = take_json_array(c);
  GateDecl decl;
  decl.line = line;
  decl.column = col;
  try {
    decl.matrix = matrix_from_json(nlohmann::json::parse(literal));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("gate " + name + ": bad JSON: " + e.what(), jline, jcol);
  } catch (const Error& e) {
    throw ParseError("gate " + name + ": " + e.what(), jline, jcol);
  }
  p.gates.emplace(name, std::move(decl));
}

struct Arity {
  Eigen::Index in = 0;
  Eigen::Index out = 0;
};

class Checker {
 public:
  Checker(const Program& p, const CheckOptions& o, WellFormedReport& r)
      : program_(p), options_(o), report_(r) {}

  void gates() {
    for (const auto& [name, decl] : program_.gates) {
      const ComplexMatrix& m = decl.matrix;
      if (m.rows() != m.cols()) {
        add("gate " + name, decl.line, decl.column,
            "gate " + name + " is " + std::to_string(m.rows()) + "x" +
                std::to_string(m.cols()) + ", gates must be square");
        continue;
      }
      if (!all_finite(m)) {
        add("gate " + name, decl.line, decl.column, "gate " + name + " has non-finite entries");
        continue;
      }
      const MapClass cls = classify(m, options_.unitary_tol);
      if (options_.allow_contraction ? !is_contraction(cls) : cls != MapClass::unitary) {
        std::ostringstream msg;
        msg << "gate " << name << " is not "
            << (options_.allow_contraction ? "a contraction" : "unitary")
            << " (classified " << to_string(cls) << ", operator norm "
            << format_double(operator_norm(m)) << ")";
        add("gate " + name, decl.line, decl.column, msg.str());
      }
    }
  }

  std::optional<Arity> node(const Node& n, const std::string& path) {
    switch (n.kind) {
      case NodeKind::gate: {
        auto it = program_.gates.find(n.gate);
        if (it == program_.gates.end()) {
          add(path, n, "unknown gate " + n.gate);
          return std::nullopt;
        }
        const ComplexMatrix& m = it->second.matrix;
        if (m.rows() != m.cols()) return std::nullopt;
        return Arity{m.cols(), m.rows()};
      }
      case NodeKind::delay:
        if (n.delay < 0) {
          add(path, n, "delay must be a nonnegative integer, got " + std::to_string(n.delay));
        }
        return Arity{1, 1};
      case NodeKind::seq: {
        const auto a = node(n.children[0], path + ".0");
        const auto b = node(n.children[1], path + ".1");
        if (!a || !b) return std::nullopt;
        if (a->out != b->in) {
          add(path, n, "seq: first program has " + std::to_string(a->out) +
                           " output ports, second takes " + std::to_string(b->in));
          return std::nullopt;
        }
        return Arity{a->in, b->out};
      }
      case NodeKind::par: {
        const auto a = node(n.children[0], path + ".0");
        const auto b = node(n.children[1], path + ".1");
        if (!a || !b) return std::nullopt;
        return Arity{a->in + b->in, a->out + b->out};
      }
      case NodeKind::loop: {
        const auto body = node(n.children[0], path + ".0");
        if (n.feedback < 1) {
          add(path, n, "loop must feed back at least one port, got " +
                           std::to_string(n.feedback));
          return std::nullopt;
        }
        if (!body) return std::nullopt;
        if (n.feedback > body->in || n.feedback > body->out) {
          add(path, n, "loop feeds back " + std::to_string(n.feedback) +
                           " ports but the body has " + std::to_string(body->in) +
                           " inputs and " + std::to_string(body->out) + " outputs");
          return std::nullopt;
        }
        return Arity{body->in - n.feedback, body->out - n.feedback};
      }
    }
    return std::nullopt;
  }

 private:
  void add(const std::string& path, const Node& n, std::string msg) {
    add(path, n.line, n.column, std::move(msg));
  }
  void add(const std::string& path, int line, int col, std::string msg) {
    report_.diagnostics.push_back({path, std::move(msg), line, col});
  }

  const Program& program_;
  const CheckOptions& options_;
  WellFormedReport& report_;
};

Arity arity(const Program& p, const Node& n) {
  switch (n.kind) {
    case NodeKind::gate: {
      const auto& m = p.gates.at(n.gate).matrix;
      return {m.cols(), m.rows()};
    }
    case NodeKind::delay: return {1, 1};
    case NodeKind::seq: return {arity(p, n.children[0]).in, arity(p, n.children[1]).out};
    case NodeKind::par: {
      const Arity a = arity(p, n.children[0]), b = arity(p, n.children[1]);
      return {a.in + b.in, a.out + b.out};
    }
    case NodeKind::loop: {
      const Arity b = arity(p, n.children[0]);
      return {b.in - n.feedback, b.out - n.feedback};
    }
  }
  return {};
}

ComplexMatrix eval(const Program& p, const Node& n, std::size_t j, std::size_t grid,
                   const TraceConfig& cfg, const std::string& path) {
  switch (n.kind) {
    case NodeKind::gate: return p.gates.at(n.gate).matrix;
    case NodeKind::delay: return ComplexMatrix::Constant(1, 1, grid_phase(j, n.delay, grid));
    case NodeKind::seq:
      return eval(p, n.children[1], j, grid, cfg, path + ".1") *
             eval(p, n.children[0], j, grid, cfg, path + ".0");
    case NodeKind::par:
      return direct_sum(eval(p, n.children[0], j, grid, cfg, path + ".0"),
                        eval(p, n.children[1], j, grid, cfg, path + ".1"));
    case NodeKind::loop: {
      const ComplexMatrix body = eval(p, n.children[0], j, grid, cfg, path + ".0");
      const Eigen::Index k = n.feedback;
      const PartitionedMap f(body, Partition({"B", "X"}, {body.rows() - k, k}),
                             Partition({"A", "X"}, {body.cols() - k, k}));
      try {
        return ex(f, "X", cfg).value;
      } catch (const Error& e) {
        throw InternalConsistencyError("loop at " + path + " has no trace at grid point " +
                                       std::to_string(j) + "/" + std::to_string(grid) +
                                       ": " + e.what());
      }
    }
  }
  return {};
}

// Time support of a loop-free program's impulse response.
std::optional<std::pair<std::int64_t, std::int64_t>> support(const Node& n) {
  switch (n.kind) {
    case NodeKind::gate: return std::make_pair<std::int64_t, std::int64_t>(0, 0);
    case NodeKind::delay: return std::make_pair(n.delay, n.delay);
    case NodeKind::seq:
    case NodeKind::par: {
      const auto a = support(n.children[0]);
      const auto b = support(n.children[1]);
      if (!a || !b) return std::nullopt;
      if (n.kind == NodeKind::seq) return std::make_pair(a->first + b->first, a->second + b->second);
      return std::make_pair(std::min(a->first, b->first), std::max(a->second, b->second));
    }
    case NodeKind::loop: return std::nullopt;
  }
  return std::nullopt;
}

void require_ok(const Program& p, const CheckOptions& options) {
  const WellFormedReport r = check(p, options);
  if (!r.ok()) {
    const Diagnostic& d = r.diagnostics.front();
    throw ParseError(d.message + " (at " + d.path + ")", d.line, d.column);
  }
}

}  // namespace

Program parse_unchecked(std::string_view text) {
  Cursor c(text);
  Program p;
  for (;;) {
    c.skip_space();
    if (!c.starts_with_word("gate")) break;
    parse_declaration(c, p);
  }
  p.root = parse_expr(c, 0);
  c.skip_space();
  if (!c.eof()) c.fail("unexpected text after the program");
  return p;
}

Program parse(std::string_view text, const CheckOptions& options) {
  Program p = parse_unchecked(text);
  require_ok(p, options);
  return p;
}

Program parse_file(const std::string& path, const CheckOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str(), options);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

WellFormedReport check(const Program& p, const CheckOptions& options) {
  WellFormedReport report;
  Checker checker(p, options, report);
  checker.gates();
  const auto root = checker.node(p.root, "root");
  if (root && report.ok()) {
    report.in_ports = root->in;
    report.out_ports = root->out;
  }
  return report;
}

FrequencyResponse semantics(const Program& p, std::size_t n, const TraceConfig& cfg,
                            unsigned threads) {
  CheckOptions lenient;
  lenient.allow_contraction = true;
  require_ok(p, lenient);
  const Arity a = arity(p, p.root);
  FrequencyResponse r;
  r.rows = Partition::single("out", a.out);
  r.cols = Partition::single("in", a.in);
  r.grid = uniform_grid(n);
  r.samples.resize(n);
  parallel_for(n, threads, [&](std::size_t j) {
    r.samples[j] = eval(p, p.root, j, n, cfg, "root");
  });
  r.source_support = support(p.root);
  return r;
}

ComplexMatrix semantics_at(const Program& p, std::size_t j, std::size_t n,
                           const TraceConfig& cfg) {
  CheckOptions lenient;
  lenient.allow_contraction = true;
  require_ok(p, lenient);
  if (j >= n) throw Error("grid index out of range");
  return eval(p, p.root, j, n, cfg, "root");
}

std::string to_sexpr(const Node& n) {
  switch (n.kind) {
    case NodeKind::gate: return "(gate " + n.gate + ")";
    case NodeKind::delay: return "(delay " + std::to_string(n.delay) + ")";
    case NodeKind::seq:
    case NodeKind::par:
      return "(" + std::string(to_string(n.kind)) + " " + to_sexpr(n.children[0]) + " " +
             to_sexpr(n.children[1]) + ")";
    case NodeKind::loop:
      return "(loop " + to_sexpr(n.children[0]) + " " + std::to_string(n.feedback) + ")";
  }
  return "";
}

}  // namespace qiter::qwhile
