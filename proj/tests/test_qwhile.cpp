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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "qiter/qwhile.hpp"

namespace qiter::qwhile {
namespace {

const std::string kHadamard =
    "gate H = [[0.7071067811865476, 0.7071067811865476], "
    "[0.7071067811865476, -0.7071067811865476]]\n";

std::vector<std::filesystem::path> corpus() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(QITER_CORPUS_DIR)) {
    if (e.path().extension() == ".qw") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Parse, Arity) {
  const Program g = parse(kHadamard + "(gate H)");
  EXPECT_EQ(g.root.kind, NodeKind::gate);
  const WellFormedReport r = check(g);
  EXPECT_EQ(r.in_ports, 2);
  EXPECT_EQ(r.out_ports, 2);

  const WellFormedReport d = check(parse("(delay 3)"));
  EXPECT_EQ(d.in_ports, 1);
  EXPECT_EQ(parse("(delay 3)").root.delay, 3);

  const Program l = parse(kHadamard + "(loop (seq (gate H) (par (delay 0) (delay 1))) 1)");
  EXPECT_EQ(l.root.kind, NodeKind::loop);
  EXPECT_EQ(l.root.feedback, 1);
  EXPECT_EQ(check(l).in_ports, 1);
  EXPECT_EQ(to_sexpr(l.root), "(loop (seq (gate H) (par (delay 0) (delay 1))) 1)");
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse(kHadamard + "\n  (seq (gate H) (bogus 1))");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 18);
  }
  EXPECT_THROW(parse("(delay x)"), ParseError);
  EXPECT_THROW(parse("(delay 1"), ParseError);
  EXPECT_THROW(parse("(delay 1) (delay 2)"), ParseError);
  EXPECT_THROW(parse("gate H = [[1, 0]\n(gate H)"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
}

TEST(Parse, SemanticErrors) {
  EXPECT_THROW(parse("(gate Q)"), ParseError);
  EXPECT_THROW(parse(kHadamard + "(seq (gate H) (delay 1))"), ParseError);
  EXPECT_THROW(parse(kHadamard + "(loop (gate H) 3)"), ParseError);
  EXPECT_THROW(parse("gate A = [[1.1]]\n(gate A)"), ParseError);
  EXPECT_NO_THROW(parse("gate A = [[0.5]]\n(gate A)", CheckOptions{true, 1e-9}));
}

TEST(Check, Reports) {
  for (const auto& path : corpus()) {
    std::ifstream in(path);
    const std::string text((std::istreambuf_iterator<char>(in)), {});
    EXPECT_TRUE(check(parse_unchecked(text)).ok()) << path;
  }
  const WellFormedReport arity = check(parse_unchecked(kHadamard + "(seq (delay 1) (gate H))"));
  ASSERT_EQ(arity.diagnostics.size(), 1u);
  EXPECT_EQ(arity.diagnostics[0].path, "root");
  EXPECT_NE(arity.diagnostics[0].message.find("seq"), std::string::npos);

  const WellFormedReport norm = check(parse_unchecked("gate A = [[1.1, 0], [0, 1]]\n(gate A)"));
  ASSERT_EQ(norm.diagnostics.size(), 1u);
  EXPECT_NE(norm.diagnostics[0].message.find("not unitary"), std::string::npos);

  const WellFormedReport nested =
      check(parse_unchecked("(par (delay 0) (seq (delay -1) (gate Z)))"));
  ASSERT_EQ(nested.diagnostics.size(), 2u);
  EXPECT_EQ(nested.diagnostics[0].path, "root.1.0");
  EXPECT_EQ(nested.diagnostics[1].path, "root.1.1");
}

TEST(Semantics, Primitives) {
  const FrequencyResponse h = semantics(parse(kHadamard + "(gate H)"), 8);
  for (const auto& s : h.samples) EXPECT_NEAR(s(1, 1).real(), -1.0 / std::sqrt(2.0), 1e-15);
  const FrequencyResponse d = semantics(parse("(delay 5)"), 16);
  for (std::size_t j = 0; j < d.size(); ++j) {
    EXPECT_LT(std::abs(d.samples[j](0, 0) - std::polar(1.0, -5.0 * d.grid[j])), 1e-13);
  }
}

TEST(Semantics, HadamardLoops) {
  const FrequencyResponse one = semantics(parse(kHadamard + "(loop (gate H) 1)"), 32);
  for (const auto& s : one.samples) EXPECT_LT(std::abs(s(0, 0) - 1.0), 1e-9);

  const double h = 1.0 / std::sqrt(2.0);
  const FrequencyResponse r =
      semantics(parse(kHadamard + "(loop (seq (par (delay 0) (delay 1)) (gate H)) 1)"), 64);
  for (std::size_t j = 0; j < r.size(); ++j) {
    const Complex z = std::polar(1.0, -r.grid[j]);
    const Complex want = h + h * z * h / (1.0 + h * z);
    EXPECT_LT(std::abs(r.samples[j](0, 0) - want), 1e-9) << j;
  }
}

TEST(Semantics, SwapLoopIsIdentity) {
  const FrequencyResponse r =
      semantics(parse("gate S = [[0, 1], [1, 0]]\n(loop (par (delay 2) (gate S)) 1)"), 16);
  // (delay 2) passes through untouched, the swap loop is a wire.
  for (std::size_t j = 0; j < r.size(); ++j) {
    EXPECT_LT(std::abs(r.samples[j](1, 1) - 1.0), 1e-12);
    EXPECT_LT(std::abs(r.samples[j](0, 0) - std::polar(1.0, -2.0 * r.grid[j])), 1e-12);
  }
}

TEST(Properties, CorpusIsContractive) {
  const auto files = corpus();
  ASSERT_GE(files.size(), 5u);
  for (const auto& path : files) {
    const FrequencyResponse r = semantics(parse_file(path.string()), 128);
    EXPECT_EQ(lsi_classify(r), LsiClass::lsi_contraction) << path;
  }
}

TEST(Properties, SeqIsPointwiseComposition) {
  const auto files = corpus();
  std::vector<Program> programs;
  for (const auto& f : files) programs.push_back(parse_file(f.string()));
  int pairs = 0;
  for (const auto& p : programs) {
    for (const auto& q : programs) {
      if (check(p).out_ports != check(q).in_ports) continue;
      Program joined;
      joined.gates = p.gates;
      bool clash = false;
      for (const auto& [name, decl] : q.gates) {
        auto [it, fresh] = joined.gates.emplace(name, decl);
        if (!fresh && it->second.matrix != decl.matrix) clash = true;
      }
      if (clash) continue;
      joined.root = Node::make_seq(p.root, q.root);
      const FrequencyResponse lhs = semantics(joined, 32);
      const FrequencyResponse rhs = compose(semantics(q, 32), semantics(p, 32));
      for (std::size_t j = 0; j < lhs.size(); ++j) {
        EXPECT_LT((lhs.samples[j] - rhs.samples[j]).norm(), 1e-12);
      }
      ++pairs;
    }
  }
  EXPECT_GT(pairs, 3);
}

TEST(Properties, ZeroDelayIsIdentity) {
  const Program p = parse_file(std::string(QITER_CORPUS_DIR) + "/ring_resonator.qw");
  Program q = p;
  q.root.children[0].children[0] =
      Node::make_seq(Node::make_seq(Node::make_par(Node::make_delay(0), Node::make_delay(0)),
                                    p.root.children[0].children[0]),
                     Node::make_par(Node::make_delay(0), Node::make_delay(0)));
  const FrequencyResponse a = semantics(p, 32), b = semantics(q, 32);
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_LT((a.samples[j] - b.samples[j]).norm(), 1e-13);
  }
}

TEST(Semantics, SinglePointMatchesGrid) {
  const Program p = parse_file(std::string(QITER_CORPUS_DIR) + "/nested_loops.qw");
  const FrequencyResponse r = semantics(p, 16, {}, 2);
  for (std::size_t j = 0; j < r.size(); ++j) {
    EXPECT_EQ(semantics_at(p, j, 16), r.samples[j]);
  }
}

}  // namespace
}  // namespace qiter::qwhile
