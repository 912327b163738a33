#include "einstab/catalog.hpp"

#include <gtest/gtest.h>

using namespace einstab;

namespace {

TEST(FamilySpec, RangesAndClosedForms) {
  EXPECT_THROW(make_family_spec(Family::su, 2, 1), RangeError);
  EXPECT_THROW(make_family_spec(Family::so, 3, 2), RangeError);
  EXPECT_THROW(make_family_spec(Family::sp, 3, 0), RangeError);

  FamilySpec su3 = make_family_spec(Family::su, 3, 1);
  EXPECT_NEAR(su3.c_over_d, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(su3.two_rho, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(su3.lambda_p_max, 0.5, 1e-15);

  FamilySpec sp51 = make_family_spec(Family::sp, 5, 1);
  EXPECT_NEAR(sp51.c_over_d, 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(sp51.two_rho, 0.75, 1e-15);
  EXPECT_NEAR(sp51.lambda_p_max, 2.0 / 3.0, 1e-15);
}

TEST(FamilyAnalytic, TableTwoPatterns) {
  // Sp(5)/Sp(1)^5: lambda_max = 2/3 < 2 rho = 3/4 -> local minimum, coindex 9
  StabilityReport sp51 = family_analytic(make_family_spec(Family::sp, 5, 1));
  EXPECT_EQ(sp51.critical_point_type, CriticalPointType::local_min);
  EXPECT_EQ(sp51.classification, Classification::g_strongly_unstable);
  EXPECT_EQ(sp51.coindex, 9);

  // SU(4k)/S(U(k)^4): lambda_max = 3/4 = 2 rho -> degenerate, coindex 3
  for (int k : {1, 2, 5}) {
    StabilityReport su4 = family_analytic(make_family_spec(Family::su, 4, k));
    EXPECT_EQ(su4.classification, Classification::g_degenerate);
    EXPECT_EQ(su4.critical_point_type, CriticalPointType::degenerate);
    EXPECT_EQ(su4.coindex, 3);
    EXPECT_NEAR(su4.lambda_p_max, su4.two_rho, 1e-12);
  }

  // SO(nk)/S(O(k)^n), n >= 4: saddle with coindex n-1
  for (int n : {4, 5, 7}) {
    StabilityReport so = family_analytic(make_family_spec(Family::so, n, 3));
    EXPECT_EQ(so.critical_point_type, CriticalPointType::saddle);
    EXPECT_EQ(so.classification, Classification::g_unstable);
    EXPECT_EQ(so.coindex, n - 1);
  }

  // every family instance is G-unstable
  for (auto [f, n, k] : {std::tuple{Family::su, 6, 2}, {Family::sp, 4, 2}, {Family::so, 5, 4}}) {
    StabilityReport rep = family_analytic(make_family_spec(f, n, k));
    EXPECT_NE(rep.classification, Classification::g_stable);
    EXPECT_NE(rep.classification, Classification::g_neutrally_stable);
  }
}

TEST(FamilyNumeric, Su3ModTorusMatchesAnalytic) {
  FamilySpec spec = make_family_spec(Family::su, 3, 1);
  FamilyNumericResult num = family_numeric(spec);
  StabilityReport ana = family_analytic(spec);
  EXPECT_EQ(num.report.classification, ana.classification);
  EXPECT_EQ(num.report.coindex, ana.coindex);
  EXPECT_NEAR(num.report.two_rho, ana.two_rho, 1e-12);
  ASSERT_EQ(num.report.spectrum_on_w.size(), ana.spectrum_on_w.size());
  for (std::size_t i = 0; i < ana.spectrum_on_w.size(); ++i) {
    EXPECT_NEAR(num.report.spectrum_on_w[i].value, ana.spectrum_on_w[i].value, 1e-10);
    EXPECT_EQ(num.report.spectrum_on_w[i].multiplicity, ana.spectrum_on_w[i].multiplicity);
  }
  EXPECT_LT(num.method_max_diff, 1e-9);
  EXPECT_LT(num.johnson_residual, 1e-9);
  EXPECT_LT(num.b_max_err, 1e-10);
}

TEST(FamilyNumeric, Sp3AndSo9Rows) {
  FamilyNumericResult sp3 = family_numeric(make_family_spec(Family::sp, 3, 1));
  EXPECT_EQ(sp3.report.critical_point_type, CriticalPointType::local_min);
  EXPECT_EQ(sp3.report.coindex, 2);
  EXPECT_LT(sp3.method_max_diff, 1e-9);

  FamilyNumericResult so9 = family_numeric(make_family_spec(Family::so, 3, 3));
  EXPECT_EQ(so9.report.critical_point_type, CriticalPointType::local_min);
  EXPECT_EQ(so9.report.coindex, 2);
  EXPECT_LT(so9.johnson_residual, 1e-9);
}

TEST(FamilyNumeric, Su4ModTorusIsDegenerate) {
  FamilyNumericResult num = family_numeric(make_family_spec(Family::su, 4, 1));
  EXPECT_EQ(num.report.classification, Classification::g_degenerate);
  EXPECT_EQ(num.report.critical_point_type, CriticalPointType::degenerate);
  EXPECT_EQ(num.report.coindex, 3);
  EXPECT_EQ(num.report.nullity, 2);  // n(n-3)/2 at the threshold
}

TEST(FamilyNumeric, RejectsOversizedInstances) {
  EXPECT_THROW(family_numeric(make_family_spec(Family::su, 5, 3)), RangeError);
}

TEST(Johnson, SpectraAndCrossCheck) {
  auto s3 = johnson_graph_spectrum(3);
  ASSERT_EQ(s3.size(), 2u);
  EXPECT_EQ(s3[0].multiplicity, 2);
  EXPECT_NEAR(s3[0].value, -1.0, 1e-15);
  EXPECT_EQ(s3[1].multiplicity, 1);
  EXPECT_NEAR(s3[1].value, 2.0, 1e-15);

  auto s5 = johnson_graph_spectrum(5);
  ASSERT_EQ(s5.size(), 3u);
  EXPECT_NEAR(s5[0].value, -2.0, 1e-15);
  EXPECT_EQ(s5[0].multiplicity, 5);
  EXPECT_NEAR(s5[1].value, 1.0, 1e-15);
  EXPECT_EQ(s5[1].multiplicity, 4);
  EXPECT_NEAR(s5[2].value, 6.0, 1e-15);
  EXPECT_EQ(s5[2].multiplicity, 1);

  // closed form vs dense diagonalization is verified internally for each call
  for (int n = 3; n <= 10; ++n) EXPECT_NO_THROW(johnson_graph_spectrum(n));
}

TEST(Jensen, So6ReferenceValues) {
  JensenSpec ref = jensen_reference_spec(JensenEmbedding::so6_so3so3);
  EXPECT_NEAR(ref.t_e, 1.0 / 7.0, 1e-15);
  EXPECT_NEAR(ref.two_rho, 13.0 / 14.0, 1e-15);
  EXPECT_NEAR(ref.lambda_p, 3.0 / 28.0, 1e-15);
  EXPECT_NEAR(ref.lambda_p_max, 5.0 / 28.0, 1e-15);
  StabilityReport ana = jensen_analytic(ref);
  EXPECT_EQ(ana.classification, Classification::g_strongly_unstable);
  EXPECT_EQ(ana.critical_point_type, CriticalPointType::local_min);
  EXPECT_EQ(ana.coindex, 2);
}

TEST(Jensen, So6NumericMatchesClosedForms) {
  JensenNumericResult num = jensen_numeric(JensenEmbedding::so6_so3so3);
  EXPECT_NEAR(num.measured.c, 0.25, 1e-10);
  EXPECT_NEAR(num.measured.t_e, 1.0 / 7.0, 1e-10);
  EXPECT_NEAR(num.measured.two_rho, 13.0 / 14.0, 1e-10);
  EXPECT_LT(num.einstein_residual, 1e-10);
  EXPECT_LT(num.ijk_max_err, 1e-10);
  EXPECT_LT(num.method_max_diff, 1e-10);
  EXPECT_EQ(num.report.coindex, 2);
  EXPECT_EQ(num.report.critical_point_type, CriticalPointType::local_min);
  ASSERT_EQ(num.report.spectrum_on_w.size(), 2u);
  EXPECT_NEAR(num.report.spectrum_on_w[0].value, 3.0 / 28.0, 1e-10);
  EXPECT_NEAR(num.report.spectrum_on_w[1].value, 5.0 / 28.0, 1e-10);
}

TEST(Jensen, Sp2HasHalfTE) {
  // c = 2/3, t_E = 1/2: the [jjj] constants vanish but the pipeline is unaffected
  JensenNumericResult num = jensen_numeric(JensenEmbedding::sp2_sp1sp1);
  EXPECT_NEAR(num.measured.c, 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(num.measured.t_e, 0.5, 1e-10);
  EXPECT_NEAR(num.measured.two_rho, 0.75, 1e-10);
  EXPECT_EQ(num.report.coindex, 2);
  EXPECT_LT(num.ijk_max_err, 1e-10);
}

TEST(KillingReport, Su4NeutralWithNullity15) {
  KillingReportResult res = killing_metric_report(Family::su, 4);
  EXPECT_NEAR(res.lambda_tau, 1.0, 1e-9);
  EXPECT_EQ(res.report.classification, Classification::g_neutrally_stable);
  EXPECT_EQ(res.report.nullity, 15);
  EXPECT_LT(res.einstein_residual, 1e-10);
}

TEST(KillingReport, So8Stable) {
  KillingReportResult res = killing_metric_report(Family::so, 8);
  EXPECT_NEAR(res.lambda_tau, 4.0 / 3.0, 1e-9);
  EXPECT_EQ(res.report.classification, Classification::g_stable);
}

TEST(KillingReport, Sp3UnstableWithCoindexBound) {
  KillingReportResult res = killing_metric_report(Family::sp, 3);
  EXPECT_NEAR(res.lambda_tau, 0.75, 1e-9);
  EXPECT_EQ(res.report.classification, Classification::g_unstable);
  EXPECT_GE(res.report.coindex, 14);  // 2n(2n-1)/2 - 1 at n = 3
}

TEST(KillingReport, RangeGuard) {
  EXPECT_THROW(killing_metric_report(Family::su, 8), RangeError);
}

TEST(Runners, TableOneStabilityColumnPasses) {
  auto rows = run_table1();
  ASSERT_EQ(rows.size(), 9u);
  for (const auto& row : rows) {
    EXPECT_TRUE(row.pass_stab()) << row.name();
    if (row.name() == "so(7)") {
      // reference lists 7/5; the computed first eigenvalue is 6/5 (35-dim
      // constituent) with the 27-dim constituent at 7/5 — see README
      EXPECT_FALSE(row.pass_lambda());
      EXPECT_NEAR(row.lambda_tau, 6.0 / 5.0, 1e-9);
    } else {
      EXPECT_TRUE(row.pass_lambda()) << row.name();
    }
  }
}

TEST(Runners, TableTwoSmallRows) {
  for (auto [f, n, k] : {std::tuple{Family::su, 4, 1}, {Family::sp, 3, 1}}) {
    Table2Row row;
    row.spec = make_family_spec(f, n, k);
    StabilityReport ana = family_analytic(row.spec);
    row.crit_ref = ana.critical_point_type;
    row.coindex_ref = ana.coindex;
    run_table2_row(row, default_seed());
    EXPECT_TRUE(row.pass()) << row.spec.name() << ": " << row.error;
  }
}

}  // namespace
