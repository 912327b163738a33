#include "einstab/reductive.hpp"

#include <gtest/gtest.h>

#include "einstab/classical.hpp"

using namespace einstab;

namespace {

std::vector<int> so_block_indices(int n, int split) {
  // indices of A_ab with a, b on the same side of `split`, in the so(n) basis order
  std::vector<int> idx;
  int pos = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b, ++pos)
      if ((a < split && b < split) || (a >= split && b >= split)) idx.push_back(pos);
  return idx;
}

BilinearForm minus_killing(const StructureTensor& l) {
  BilinearForm b = killing_form(l);
  b.matrix = -b.matrix;
  return b;
}

TEST(ReductiveSplit, LieGroupCaseKillingMetric) {
  StructureTensor su2 = build_classical(Family::su, 2);
  ReductiveSpace r = reductive_split(su2, {}, minus_killing(su2));
  EXPECT_EQ(r.k_dim, 0);
  EXPECT_EQ(r.p_dim, 3);
  EXPECT_LT((r.ip - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-14);
  // bi-invariant metric: naturally reductive
  EXPECT_LT(r.natural_reductivity_residual(), 1e-13);
  // working basis is -Kil-orthonormal
  Eigen::MatrixXd q = -killing_form(su2).matrix;
  Eigen::MatrixXd gram = r.basis_in_parent.transpose() * q * r.basis_in_parent;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ReductiveSplit, Su3ModuloTorus) {
  StructureTensor su3 = build_classical(Family::su, 3);
  // torus = span{D_0, D_1} at indices 6, 7
  ReductiveSpace r = reductive_split(su3, {6, 7}, minus_killing(su3));
  EXPECT_EQ(r.p_dim, 6);
  EXPECT_LT(r.reductivity_residual(), 1e-12);
  EXPECT_LT(r.natural_reductivity_residual(), 1e-12);
  EXPECT_LT(r.algebra.jacobi_residual(), 1e-12);
  // mu_p agrees with the p-component of the full bracket
  for (const auto& e : r.mu_p.nonzeros())
    EXPECT_NEAR(e.v, r.algebra.c(e.i + 2, e.j + 2, e.k + 2), 1e-14);
}

TEST(ReductiveSplit, AbelianHasZeroMup) {
  StructureTensor ab = StructureTensor::from_entries(4, {});
  BilinearForm q{Eigen::MatrixXd::Identity(4, 4), BilinearForm::Label::custom_q};
  ReductiveSpace r = reductive_split(ab, {0}, q);
  EXPECT_EQ(r.mu_p.nonzeros().size(), 0u);
}

TEST(ReductiveSplit, RejectsNonSubalgebra) {
  StructureTensor su3 = build_classical(Family::su, 3);
  // span{S_01, S_02} is not closed: [S_01, S_02] has a S_12 component
  EXPECT_THROW(reductive_split(su3, {0, 1}, minus_killing(su3)), NotASubalgebra);
}

TEST(ReductiveSplit, RejectsIndefiniteRestriction) {
  StructureTensor ab = StructureTensor::from_entries(2, {});
  Eigen::MatrixXd q(2, 2);
  q << 1, 0, 0, -1;
  EXPECT_THROW(reductive_split(ab, {}, {q, BilinearForm::Label::custom_q}),
               DegenerateRestriction);
}

TEST(ReductiveSplit, RejectsNonAdInvariantQ) {
  StructureTensor su2 = build_classical(Family::su, 2);
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(3, 3);
  q(0, 0) = 2.0;  // not proportional to -Kil on a simple algebra
  EXPECT_THROW(reductive_split(su2, {}, {q, BilinearForm::Label::custom_q}), Error);
}

TEST(Jensen, So6ModSo3So3) {
  StructureTensor so6 = build_classical(Family::so, 6);
  std::vector<int> k_idx = so_block_indices(6, 3);
  ASSERT_EQ(k_idx.size(), 6u);
  ReductiveSpace r = jensen_deformed_space(so6, k_idx, 1.0 / 7.0);
  EXPECT_EQ(r.k_dim, 6);
  EXPECT_EQ(r.p_dim, 15);  // 9 + 6
  EXPECT_LT(r.natural_reductivity_residual(), 1e-12);
  EXPECT_LT(r.algebra.jacobi_residual(), 1e-11);

  // the a-part of the working basis is -Kil_h-orthonormal and has no K-factor component
  Eigen::MatrixXd kil_h = killing_form(so6).matrix;
  for (int i = 0; i < 9; ++i) {
    Eigen::VectorXd v = r.basis_in_parent.col(r.k_dim + i);
    EXPECT_LT(v.tail(6).cwiseAbs().maxCoeff(), 1e-13);
    Eigen::VectorXd vh = v.head(15);
    EXPECT_NEAR(-vh.dot(kil_h * vh), 1.0, 1e-12);
  }
}

TEST(Jensen, NormalIffTLessThanOne) {
  StructureTensor so6 = build_classical(Family::so, 6);
  std::vector<int> k_idx = so_block_indices(6, 3);
  Eigen::MatrixXd kil_h = killing_form(so6).matrix;
  auto q_t = [&](double t) {
    const double s = t / (1.0 - t);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(21, 21);
    q.topLeftCorner(15, 15) = -kil_h;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) q(15 + a, 15 + b) = -s * kil_h(k_idx[a], k_idx[b]);
    return q;
  };
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> lo(q_t(1.0 / 7.0));
  EXPECT_GT(lo.eigenvalues().minCoeff(), 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hi(q_t(2.0));
  EXPECT_LT(hi.eigenvalues().minCoeff(), 0.0);
  // the t > 1 model still builds and is still naturally reductive
  ReductiveSpace r = jensen_deformed_space(so6, k_idx, 2.0);
  EXPECT_LT(r.natural_reductivity_residual(), 1e-12);
}

TEST(Jensen, RejectsBadT) {
  StructureTensor so6 = build_classical(Family::so, 6);
  std::vector<int> k_idx = so_block_indices(6, 3);
  EXPECT_THROW(jensen_deformed_space(so6, k_idx, 0.0), RangeError);
  EXPECT_THROW(jensen_deformed_space(so6, k_idx, 1.0), RangeError);
  EXPECT_THROW(jensen_deformed_space(so6, k_idx, -0.5), RangeError);
}

}  // namespace
