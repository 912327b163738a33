#include "einstab/classical.hpp"

#include <gtest/gtest.h>

using namespace einstab;

namespace {

TEST(Classical, Su2ScaledPauliBrackets) {
  StructureTensor su2 = build_classical(Family::su, 2);
  ASSERT_EQ(su2.dim(), 3);
  // basis order: S_01, T_01, D_0 with [S,T]=2D, [T,D]=2S, [D,S]=2T
  EXPECT_NEAR(su2.c(0, 1, 2), 2.0, 1e-15);
  EXPECT_NEAR(su2.c(1, 2, 0), 2.0, 1e-15);
  EXPECT_NEAR(su2.c(2, 0, 1), 2.0, 1e-15);
  EXPECT_LT(su2.jacobi_residual(), 1e-14);
}

TEST(Classical, So3CyclicBrackets) {
  StructureTensor so3 = build_classical(Family::so, 3);
  ASSERT_EQ(so3.dim(), 3);
  // basis A_01, A_02, A_12: [A_01, A_02] = -A_12, [A_01, A_12] = A_02, [A_02, A_12] = -A_01
  EXPECT_NEAR(so3.c(0, 1, 2), -1.0, 1e-15);
  EXPECT_NEAR(so3.c(0, 2, 1), 1.0, 1e-15);
  EXPECT_NEAR(so3.c(1, 2, 0), -1.0, 1e-15);
  EXPECT_LT(so3.jacobi_residual(), 1e-14);
}

TEST(Classical, Dimensions) {
  EXPECT_EQ(build_classical(Family::su, 4).dim(), 15);
  EXPECT_EQ(build_classical(Family::so, 6).dim(), 15);
  EXPECT_EQ(build_classical(Family::sp, 2).dim(), 10);
  EXPECT_EQ(build_classical(Family::sp, 1).dim(), 3);
}

TEST(Classical, RangeChecks) {
  EXPECT_THROW(build_classical(Family::su, 1), RangeError);
  EXPECT_THROW(build_classical(Family::so, 2), RangeError);
  EXPECT_THROW(build_classical(Family::sp, 0), RangeError);
}

TEST(Classical, JacobiResidualSmall) {
  for (auto [f, n] : {std::pair{Family::su, 4}, {Family::so, 7}, {Family::sp, 3}}) {
    StructureTensor l = build_classical(f, n);
    EXPECT_LT(l.jacobi_residual(), 1e-10) << family_name(f) << "(" << n << ")";
  }
}

// Killing form of the compact forms is a fixed multiple of the defining trace form:
// 2n for su(n), n-2 for so(n), 2n+2 for sp(n).
TEST(Classical, KillingMatchesTraceFormMultiple) {
  auto check = [](Family f, int n, double factor) {
    StructureTensor l = build_classical(f, n);
    Eigen::MatrixXd b = killing_form(l).matrix;
    auto mats = classical_basis_matrices(f, n);
    for (int a = 0; a < l.dim(); ++a)
      for (int c = a; c < l.dim(); ++c) {
        double tr = (mats[a] * mats[c]).trace().real();
        EXPECT_NEAR(b(a, c), factor * tr, 1e-10)
            << family_name(f) << "(" << n << ") entry " << a << "," << c;
      }
  };
  check(Family::su, 3, 6.0);
  check(Family::so, 5, 3.0);
  check(Family::sp, 2, 6.0);  // 2n+2 = 6: the sp(2) oracle from the defining matrices
}

TEST(Classical, MinusKillingPositiveDefinite) {
  for (auto [f, n] : {std::pair{Family::su, 3}, {Family::so, 5}, {Family::sp, 2}}) {
    Eigen::MatrixXd b = killing_form(build_classical(f, n)).matrix;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-b);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << family_name(f) << "(" << n << ")";
  }
}

}  // namespace
