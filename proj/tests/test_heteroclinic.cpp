#include <cmath>

#include <gtest/gtest.h>

#include "vsir/heteroclinic.hpp"

using namespace vsir;

TEST(Splitting, ChangesSignAcrossTheCurve)
{
    const Base b = reference_base();
    const SplitResult lo = splitting(2.6, 0.40, b);
    const SplitResult hi = splitting(2.6, 0.50, b);
    EXPECT_LT(lo.value, 0.0);
    EXPECT_GT(hi.value, 0.0);
    EXPECT_DOUBLE_EQ(lo.section, endemic(ReducedPoint{2.6, 0.40, b}).location.S);
}

TEST(Splitting, InsensitiveToSeedOffset)
{
    const Base b = reference_base();
    ShootingOptions a, h;
    h.offset = 0.5 * a.offset;
    EXPECT_NEAR(splitting(2.6, 0.45, b, a).value, splitting(2.6, 0.45, b, h).value, 1e-6);
}

TEST(Splitting, DomainErrors)
{
    const Base b = reference_base();
    EXPECT_THROW(splitting(1.9, 0.3, b), curve_domain_error);
    EXPECT_THROW(splitting(2.6, 0.0, b), curve_domain_error);
    EXPECT_THROW(splitting(2.6, p_t(b, 2.6) + 0.01, b), curve_domain_error);
}

TEST(FindHet, OffsetConvergence)
{
    const Base b = reference_base();
    ShootingOptions a, c;
    a.offset = 1e-6;
    c.offset = 1e-7;
    const double pa = find_het_p(2.6, 0.40, 0.50, b, 1e-7, a).p;
    const double pc = find_het_p(2.6, 0.40, 0.50, b, 1e-7, c).p;
    EXPECT_NEAR(pa, pc, 1e-5);
}

TEST(FindHet, BracketWidthAndResidual)
{
    const Base b = reference_base();
    const HetSolution s = find_het_p(2.6, 0.40, 0.50, b, 1e-6);
    EXPECT_LE(s.hi - s.lo, 1e-6);
    EXPECT_LE(s.split_lo, 0.0);
    EXPECT_GE(s.split_hi, 0.0);
    EXPECT_NEAR(s.p, 0.445944, 2e-6);
    EXPECT_LT(s.residual, 1e-4);
}

TEST(FindHet, SameSignBracketThrows)
{
    const Base b = reference_base();
    EXPECT_THROW(find_het_p(2.6, 0.30, 0.35, b), validation_error);
    EXPECT_THROW(find_het_p(2.6, 0.5, 0.4, b), validation_error);
}

TEST(HetBracket, ContainsRoot)
{
    const Base b = reference_base();
    const auto [lo, hi] = het_bracket(3.0, b);
    EXPECT_LT(splitting(3.0, lo, b).value, 0.0);
    EXPECT_GE(splitting(3.0, hi, b).value, 0.0);
    EXPECT_LT(lo, hi);
}

TEST(HetTable, EmptyInput) { EXPECT_TRUE(build_het_table({}, reference_base()).empty()); }

TEST(HetTable, FailedRowIsReported)
{
    const auto rows = build_het_table({1.5}, reference_base());
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].ok);
    EXPECT_FALSE(rows[0].error.empty());
}

TEST(HetTable, RemovalCarrierReproducesPublishedPoints)
{
    const Base b = reference_base(R0Carrier::removal);
    std::vector<double> r0s;
    for (const auto& t : published_het_table()) r0s.push_back(t.r0);
    const auto rows = build_het_table(r0s, b, 1e-7, {}, 0);
    ASSERT_EQ(rows.size(), 13u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ASSERT_TRUE(rows[i].ok) << rows[i].error;
        EXPECT_NEAR(rows[i].p_het / published_het_table()[i].p, 1.0, 1e-4) << "r0=" << rows[i].r0;
    }
}

TEST(HetTable, TransmissionCarrierValues)
{
    const auto rows = build_het_table({2.0725, 2.6, 3.6667}, reference_base(), 1e-7, {}, 0);
    const double expect[] = {0.793353, 0.445944, 0.162056};
    for (int i = 0; i < 3; ++i) {
        ASSERT_TRUE(rows[i].ok) << rows[i].error;
        EXPECT_NEAR(rows[i].p_het, expect[i], 2e-6);
    }
}

TEST(HetCurves, PublishedFitEvaluates)
{
    const HetCurve c = published_het_curve();
    for (const auto& t : published_het_table()) EXPECT_NEAR(c(t.r0), t.p, 2e-3);
}

TEST(HetCurves, ShootingCurveMatchesBisection)
{
    const HetCurve c = shooting_het_curve(reference_base(), 1e-7);
    EXPECT_NEAR(c(2.6), 0.445944, 2e-6);
}
