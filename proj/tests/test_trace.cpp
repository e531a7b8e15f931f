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

#include "qiter/error.hpp"
#include "qiter/rng.hpp"
#include "qiter/trace.hpp"

namespace qiter {
namespace {

const double kRt2 = std::sqrt(2.0);

ComplexMatrix hadamard() {
  ComplexMatrix h(2, 2);
  h << 1.0 / kRt2, 1.0 / kRt2, 1.0 / kRt2, -1.0 / kRt2;
  return h;
}

ComplexMatrix swap2() {
  ComplexMatrix s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  return s;
}

PartitionedMap loop_last(const ComplexMatrix& m, Eigen::Index u) {
  const Eigen::Index a = m.cols() - u;
  const Eigen::Index b = m.rows() - u;
  return PartitionedMap(m, Partition({"B", "U"}, {b, u}),
                        Partition({"A", "U"}, {a, u}));
}

double scalar(const TraceResult& r) {
  EXPECT_EQ(r.value.rows(), 1);
  EXPECT_EQ(r.value.cols(), 1);
  EXPECT_NEAR(r.value(0, 0).imag(), 0.0, 1e-12);
  return r.value(0, 0).real();
}

TEST(WorkedExamples, HadamardFamily) {
  EXPECT_NEAR(scalar(ex(loop_last(hadamard(), 1), "U")), 1.0, 1e-9);
  EXPECT_NEAR(scalar(ex_series(loop_last(hadamard(), 1), "U")), 1.0, 1e-9);
  EXPECT_NEAR(scalar(ex_kernel_image(loop_last(hadamard(), 1), "U")), 1.0, 1e-9);
  EXPECT_NEAR(scalar(ex(loop_last(swap2() * hadamard() * swap2(), 1), "U")), 1.0, 1e-9);
  EXPECT_NEAR(scalar(ex(loop_last(swap2() * hadamard(), 1), "U")), -1.0, 1e-9);
  EXPECT_NEAR(scalar(ex(loop_last(hadamard() * swap2(), 1), "U")), -1.0, 1e-9);
}

TEST(WorkedExamples, ThreeByThree) {
  ComplexMatrix f(3, 3);
  f << -1, 1, -1, 1, -1, -1, -1, -1, 1;
  f *= 0.5;
  EXPECT_NEAR(scalar(ex(loop_last(f, 2), "U")), 1.0, 1e-9);
  const TraceResult one = ex(loop_last(f, 1), "U");
  EXPECT_LT((one.value - swap2()).norm(), 1e-9);
  EXPECT_EQ(one.method, TraceMethod::both_agree);
}

TEST(WorkedExamples, PureSwapIsIdentity) {
  ComplexMatrix s = ComplexMatrix::Zero(4, 4);
  s.topRightCorner(2, 2) = identity(2);
  s.bottomLeftCorner(2, 2) = identity(2);
  EXPECT_LT((ex(loop_last(s, 2), "U").value - identity(2)).norm(), 1e-12);
}

TEST(WorkedExamples, IsolatedLoop) {
  EXPECT_NEAR(scalar(ex(loop_last(identity(2), 1), "U")), 1.0, 1e-12);
}

TEST(WorkedExamples, CounterexampleSingleLoop) {
  ComplexMatrix f(3, 3);
  f << 0.0, 1.0, 1.0, 1.0, -2.0 / 3.0, 1.0, 1.0, 1.0, 1.0 / 3.0;
  ComplexMatrix expected(2, 2);
  expected << 1.5, 2.5, 2.5, 5.0 / 6.0;
  EXPECT_LT((ex_kernel_image(loop_last(f, 1), "U").value - expected).norm(), 1e-9);
  EXPECT_THROW(ex_series(loop_last(f, 2), "U"), DivergenceError);
  EXPECT_NEAR(scalar(ex_kernel_image(loop_last(f, 2), "U")), 39.0, 1e-9);
}

TEST(Series, DivergenceMessage) {
  ComplexMatrix f(2, 2);
  f << 0.0, 1.0, 1.0, 2.0;
  try {
    ex_series(loop_last(f, 1), "U");
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("does not converge in norm"),
              std::string::npos);
  }
}

TEST(Series, ScalarGeometricClosedForm) {
  // a + b c / (1 - d) for |d| < 1.
  for (double d : {-0.9, -0.3, 0.0, 0.5, 0.95}) {
    ComplexMatrix f(2, 2);
    f << 0.3, 0.7, Complex(0.1, 0.2), d;
    const Complex want = 0.3 + 0.7 * Complex(0.1, 0.2) / (1.0 - d);
    const TraceResult r = ex_series(loop_last(f, 1), "U");
    EXPECT_TRUE(r.converged);
    EXPECT_LT(std::abs(r.value(0, 0) - want), 1e-11) << d;
  }
}

TEST(Series, NilpotentLoopIsFiniteSum) {
  // Strictly upper triangular loop block: the series is exactly finite and
  // a vanishing first term must not stop it early.
  ComplexMatrix f = ComplexMatrix::Zero(4, 4);
  f(0, 3) = 1.0;  // f_BU reads the last loop coordinate
  f(1, 2) = 1.0;  // loop: e1 -> e2 -> e3 (rows/cols 1..3)
  f(2, 3) = 1.0;
  f(1, 0) = 1.0;  // f_UA feeds the first loop coordinate
  // ex = f_BA + f_BU f_UA + f_BU N f_UA + f_BU N^2 f_UA
  const ComplexMatrix fuu = f.bottomRightCorner(3, 3);
  const ComplexMatrix inv = (identity(3) - fuu).inverse();
  const ComplexMatrix want = f.topLeftCorner(1, 1) +
                             f.topRightCorner(1, 3) * inv * f.bottomLeftCorner(3, 1);
  const TraceResult r = ex_series(loop_last(f, 3), "U");
  EXPECT_LT((r.value - want).norm(), 1e-12);
  EXPECT_LT((ex_kernel_image(loop_last(f, 3), "U").value - want).norm(), 1e-12);
}

TEST(Series, PartitionMismatch) {
  PartitionedMap f(identity(3), Partition({"B", "U"}, {1, 2}),
                   Partition({"A", "U"}, {2, 1}));
  EXPECT_THROW(ex_series(f, "U"), PartitionError);
  EXPECT_THROW(ex(loop_last(identity(2), 1), "V"), PartitionError);
}

TEST(KernelImage, ExpansionWithoutWitness) {
  // f_UU = 1 makes id - f_UU zero, f_UA = 1 is not in its image.
  ComplexMatrix f(2, 2);
  f << 0.0, 1.0, 1.0, 1.0;
  try {
    ex_kernel_image(loop_last(f, 1), "U");
    FAIL();
  } catch (const NotKiTraceableError& e) {
    EXPECT_GT(e.image_residual(), 0.5);
  }
}

TEST(Ex, ZeroDimensionalLoop) {
  const ComplexMatrix g = random_contraction(2, 3, 5);
  PartitionedMap f(g, Partition({"B", "U"}, {2, 0}), Partition({"A", "U"}, {3, 0}));
  EXPECT_EQ(ex(f, "U").value, g);
}

// Property: ex preserves contractions, isometries and unitaries; both
// routes agree on every contraction.
TEST(Properties, TotalityOnRandomInputs) {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.next_u64() % 7);
    const Eigen::Index u = 1 + static_cast<Eigen::Index>(rng.next_u64() % (n - 1));
    const std::uint64_t seed = derive_seed(99, i);
    const TraceResult c = ex(loop_last(random_contraction(n, n, seed), u), "U");
    EXPECT_EQ(c.method, TraceMethod::both_agree);
    EXPECT_LE(c.disagreement, 1e-8);
    EXPECT_LE(operator_norm(c.value), 1.0 + 1e-8);

    const TraceResult un = ex(loop_last(random_unitary(n, seed), u), "U");
    EXPECT_EQ(classify(un.value, 1e-8), MapClass::unitary);

    const ComplexMatrix v = random_isometry(n + 1, n, seed);
    const TraceResult is = ex(loop_last(v, u), "U");
    EXPECT_TRUE(classify(is.value, 1e-8) == MapClass::isometry ||
                classify(is.value, 1e-8) == MapClass::unitary);
  }
}

TEST(Properties, SeriesReachesStoppingRule) {
  // Contractions whose CNU part is bounded away from the boundary converge
  // before max_terms.
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ComplexMatrix f = random_contraction(5, 5, derive_seed(7, seed));
    const CnuDecomposition d = cnu_decompose(f.bottomRightCorner(3, 3));
    if (d.f1_power_norm > 1.0 - 1e-3) continue;
    ++checked;
    EXPECT_TRUE(ex_series(loop_last(f, 3), "U").converged) << seed;
  }
  EXPECT_GT(checked, 100);
}

TEST(Halmos, Examples) {
  ComplexMatrix f(1, 1);
  f << 0.5;
  const ComplexMatrix g = halmos_dilation(f);
  ComplexMatrix want(2, 2);
  want << -0.5, std::sqrt(0.75), std::sqrt(0.75), 0.5;
  EXPECT_LT((g - want).norm(), 1e-14);

  const ComplexMatrix u = random_unitary(3, 1);
  const ComplexMatrix gu = halmos_dilation(u);
  EXPECT_LT((gu - direct_sum(-u.adjoint(), u)).norm(), 1e-7);

  const ComplexMatrix g0 = halmos_dilation(ComplexMatrix::Zero(2, 2));
  ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
  swap.topRightCorner(2, 2) = identity(2);
  swap.bottomLeftCorner(2, 2) = identity(2);
  EXPECT_LT((g0 - swap).norm(), 1e-15);

  EXPECT_THROW(halmos_dilation(identity(2) * 1.1), Error);
}

TEST(Halmos, IsometryProperty) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ComplexMatrix f = random_contraction(3, 4, seed);
    const ComplexMatrix g = halmos_dilation(f);
    EXPECT_LT(operator_norm(g.adjoint() * g - identity(g.cols())), 1e-10);
  }
}

TEST(Cnu, Examples) {
  const ComplexMatrix u = random_unitary(3, 8);
  const CnuDecomposition du = cnu_decompose(u);
  EXPECT_EQ(du.unitary_dim, 3);
  EXPECT_EQ(du.f1.rows(), 0);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 0.5;
  const CnuDecomposition dd = cnu_decompose(d);
  EXPECT_EQ(dd.unitary_dim, 1);
  ASSERT_EQ(dd.f1.rows(), 1);
  EXPECT_NEAR(std::abs(dd.f1(0, 0)), 0.5, 1e-12);
}

TEST(Cnu, RecoversPlantedUnitaryPart) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Eigen::Index k = 1 + seed % 3;
    const Eigen::Index m = 1 + (seed / 3) % 3;
    const ComplexMatrix planted =
        direct_sum(random_unitary(k, seed), random_contraction(m, m, seed + 1000) * 0.9);
    const ComplexMatrix w = random_unitary(k + m, seed + 2000);
    const CnuDecomposition d = cnu_decompose(w * planted * w.adjoint());
    EXPECT_EQ(d.unitary_dim, k) << seed;
    EXPECT_LT(d.f1_power_norm, 1.0);
    EXPECT_EQ(classify(d.f0, 1e-8), MapClass::unitary);
  }
}

TEST(Config, Validate) {
  TraceConfig cfg;
  cfg.series_tol = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace qiter
