#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <torus_planes/homeo.hpp>

using namespace torus_planes;

namespace {
ProjPoint R(double x) { return ProjPoint::real(x); }
const std::string kData = TEST_DATA_DIR;
}  // namespace

TEST(Homeo, ApplyExamples) {
    EXPECT_NEAR(homeo_apply(CircleHomeo::identity(), R(7)).value(), 7.0, 1e-14);
    EXPECT_NEAR(homeo_apply(CircleHomeo{PowerMap(3)}, R(-2)).value(), -8.0, 1e-13);
    const CircleHomeo chain{PowerMap(2), MobiusMap(1, 1, 0, 1)};
    EXPECT_NEAR(homeo_apply(chain, R(3)).value(), 10.0, 1e-13);
}

TEST(Homeo, PowerMapFixesZeroAndInfinity) {
    const CircleHomeo h{PowerMap(0.3)};
    EXPECT_TRUE(approx_equal(h(R(0)), R(0)));
    EXPECT_TRUE(approx_equal(h(ProjPoint::infinity()), ProjPoint::infinity()));
    EXPECT_NEAR(h(R(1e200)).chart(), 0.5, 1e-12);
    EXPECT_THROW(PowerMap(0.0), GeometryError);
    EXPECT_THROW(PowerMap(-1.0), GeometryError);
}

TEST(Homeo, InverseExamples) {
    EXPECT_TRUE(homeo_inverse(CircleHomeo::identity()).empty());
    const auto inv = homeo_inverse(CircleHomeo{PowerMap(2)});
    ASSERT_EQ(inv.chain().size(), 1u);
    EXPECT_DOUBLE_EQ(std::get<PowerMap>(inv.chain()[0]).exponent, 0.5);

    const CircleHomeo h{MobiusMap(2, 1, 1, 1), PowerMap(3)};
    const CircleHomeo hi = homeo_inverse(h);
    EXPECT_EQ(hi.orientation(), h.orientation());
    for (const auto& x : chart_grid(100)) EXPECT_LT(chordal_distance(hi(h(x)), x), 1e-9);
}

TEST(Homeo, SupDistance) {
    const CircleHomeo h{PowerMap(2), MobiusMap(3, 1, 1, 1)};
    EXPECT_EQ(homeo_sup_distance(h, h, 64), 0.0);
    const CircleHomeo shift{MobiusMap(1, 1, 0, 1)};
    double direct = 0.0;
    for (const auto& x : chart_grid(64)) direct = std::max(direct, chordal_distance(x, shift(x)));
    EXPECT_GT(homeo_sup_distance(CircleHomeo::identity(), shift, 64), 0.1);
    EXPECT_DOUBLE_EQ(homeo_sup_distance(CircleHomeo::identity(), shift, 64), direct);
    EXPECT_DOUBLE_EQ(homeo_sup_distance(shift, CircleHomeo::identity(), 64), direct);
    EXPECT_NEAR(homeo_sup_distance(CircleHomeo{PowerMap(1)}, CircleHomeo::identity(), 64), 0.0, 1e-15);
    EXPECT_THROW(homeo_sup_distance(h, h, 2), GeometryError);
}

TEST(Homeo, ChainOrientationIsProductOfAtoms) {
    const MobiusMap flip(0, 1, 1, 0);
    EXPECT_EQ((CircleHomeo{flip}).orientation(), -1);
    EXPECT_EQ((CircleHomeo{flip, PowerMap(2), flip}).orientation(), 1);
    EXPECT_EQ((CircleHomeo{flip, PowerMap(2)}).orientation(), -1);
}

TEST(Homeo, CompositionIsAssociative) {
    const CircleHomeo a{MobiusMap(2, 1, 1, 1)}, b{PowerMap(3)}, c{MobiusMap(0, -1, 1, 0)};
    const CircleHomeo left = a.then(b).then(c), right = a.then(b.then(c));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const ProjPoint x = ProjPoint::from_chart(u(rng));
        EXPECT_LT(chordal_distance(left(x), right(x)), 1e-12);
    }
}

TEST(Homeo, MonotoneAudit) {
    EXPECT_TRUE(monotone_audit(CircleHomeo{PowerMap(2), MobiusMap(1, 0, 0, -1)}));
    EXPECT_TRUE(monotone_audit(CircleHomeo{MobiusMap(0, 1, 1, 0)}));
}

TEST(Homeo, SolveEqual) {
    // x^3 = x at -1, 0, 1, inf
    const auto roots = homeo_solve_equal(CircleHomeo{PowerMap(3)}, CircleHomeo::identity());
    ASSERT_EQ(roots.size(), 4u);
    std::vector<double> charts;
    for (const auto& r : roots) charts.push_back(r.chart());
    std::sort(charts.begin(), charts.end());
    EXPECT_NEAR(charts[0], 0.0, 1e-9);
    EXPECT_NEAR(charts[1], 0.25, 1e-9);
    EXPECT_NEAR(charts[2], 0.5, 1e-9);
    EXPECT_NEAR(charts[3], 0.75, 1e-9);
}

TEST(Homeo, ParseReal) {
    EXPECT_DOUBLE_EQ(parse_real("1/3"), 1.0 / 3.0);
    EXPECT_TRUE(std::isinf(parse_real("inf")));
    EXPECT_DOUBLE_EQ(parse_real("-2.5"), -2.5);
    EXPECT_THROW(parse_real("abc"), GeometryError);
    EXPECT_THROW(parse_real("2x"), GeometryError);
}

TEST(Spline, KnotFileRoundTrip) {
    const MonotoneSpline s = load_knot_file(kData + "/knots_smooth.txt");
    EXPECT_EQ(s.knot_count(), 6u);
    const CircleHomeo h{s};
    EXPECT_NEAR(h(R(1)).value(), 0.5, 1e-12);
    EXPECT_NEAR(h(R(-1)).value(), -1.5, 1e-12);
    EXPECT_TRUE(h(ProjPoint::infinity()).is_infinity(1e-12));
    EXPECT_TRUE(monotone_audit(h));
    const CircleHomeo hi = h.inverse();
    for (const auto& x : chart_grid(200)) EXPECT_LT(chordal_distance(hi(h(x)), x), 1e-12);
}

TEST(Spline, RejectsBadKnots) {
    try {
        load_knot_file(kData + "/knots_decreasing.txt");
        FAIL();
    } catch (const GeometryError& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidHomeomorphism);
    }
    try {
        load_knot_file(kData + "/knots_bad_line.txt");
        FAIL();
    } catch (const GeometryError& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
    EXPECT_THROW(load_knot_file(kData + "/missing.txt"), GeometryError);
    std::istringstream two("0 0\n1 1\n");
    EXPECT_THROW(parse_knots(two), GeometryError);
    std::istringstream dup("0 0\n0 1\n2 2\n");
    EXPECT_THROW(parse_knots(dup), GeometryError);
}
