#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <torus_planes/planes.hpp>

using namespace torus_planes;

namespace {
ProjPoint R(double x) { return ProjPoint::real(x); }
TorusPoint P(double x, double y) { return torus_point(x, y); }
const ProjPoint kInf = ProjPoint::infinity();
const TorusPoint kInfInf{kInf, kInf};
PlaneModel power_plane(double p) { return PlaneModel::half_classical({CircleHomeo{PowerMap(p)}, "power"}); }

bool contains_point(const std::vector<TorusPoint>& pts, const TorusPoint& q) {
    return std::any_of(pts.begin(), pts.end(), [&](const TorusPoint& p) { return torus_distance(p, q) < 1e-9; });
}
}  // namespace

TEST(Parallel, Examples) {
    EXPECT_EQ(parallel(P(0, 1), P(0, 5)), ParallelRelation::Plus);
    EXPECT_EQ(parallel(TorusPoint{kInf, R(2)}, P(3, 2)), ParallelRelation::Minus);
    EXPECT_EQ(parallel(P(1, 2), P(3, 4)), ParallelRelation::None);
    EXPECT_EQ(parallel(P(1, 2), P(1, 2)), ParallelRelation::Both);
}

TEST(Join, ClassicalExamples) {
    const auto plane = PlaneModel::classical();
    const Circle id = join(plane, P(0, 0), P(1, 1), kInfInf);
    EXPECT_TRUE(is_identity(id.map));
    const Circle flip = join(plane, P(0, 1), P(1, 0), kInfInf);
    EXPECT_TRUE(approx_equal(flip.map, MobiusMap(-1, 1, 0, 1)));
    EXPECT_EQ(flip.map.orientation(), -1);
}

TEST(Join, RejectsParallelPoints) {
    try {
        join(PlaneModel::classical(), P(0, 0), P(0, 1), P(2, 2));
        FAIL();
    } catch (const GeometryError& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParallelInput);
    }
}

TEST(Join, HalfClassicalBranches) {
    const auto plane = power_plane(2);
    // increasing triple: PSL branch
    const Circle c1 = join(plane, P(0, 0), P(1, 2), P(2, 3));
    EXPECT_EQ(c1.tag, CircleTag::HalfClassicalPSL);
    EXPECT_EQ(c1.map.orientation(), 1);
    // decreasing triple: twisted branch g^-1 nu f with nu reversing
    const Circle c2 = join(plane, P(0, 3), P(1, 2), P(2, 1));
    EXPECT_EQ(c2.tag, CircleTag::HalfClassicalTwisted);
    EXPECT_EQ(c2.map.orientation(), -1);
    for (const auto& p : {P(0, 3), P(1, 2), P(2, 1)}) EXPECT_LT(c2.residual(p), 1e-12);
    // twisted graph is x -> nu(sgn(x) x^2)
    for (double x : {0.5, 3.0, -2.0}) EXPECT_NEAR(c2(R(x)).value(), c2.map(R(std::copysign(x * x, x))).value(), 1e-12);
    EXPECT_TRUE(plane.in_circle_set(c1));
    EXPECT_TRUE(plane.in_circle_set(c2));
}

TEST(Join, ExactlyOneBranchOnRandomTriples) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    for (double p : {1.0 / 3.0, 2.0, 3.0}) {
        const auto plane = power_plane(p);
        for (int i = 0; i < 200; ++i) {
            const TorusPoint a = P(n(rng), n(rng)), b = P(n(rng), n(rng)), c = P(n(rng), n(rng));
            const auto cand = join_candidates(plane, a, b, c);
            EXPECT_EQ(cand.branch_count(), 1);
            const Circle k = join(plane, a, b, c);
            EXPECT_LT(std::max({k.residual(a), k.residual(b), k.residual(c)}), 1e-9);
        }
    }
}

TEST(Join, CorruptedPlaneFindsNoUniqueBranch) {
    const auto bad = power_plane(2).with_corrupted_twisted_branch();
    EXPECT_THROW(join(bad, P(0, 0), P(1, 2), P(2, 3)), GeometryError);
}

TEST(Intersect, Examples) {
    const auto plane = PlaneModel::classical();
    const Circle id = plane.make_circle(CircleTag::ClassicalPGL, MobiusMap::identity());
    auto meet = circle_intersect(plane, id, plane.make_circle(CircleTag::ClassicalPGL, MobiusMap(1, 1, 0, 1)));
    ASSERT_EQ(meet.size(), 1u);
    EXPECT_TRUE(contains_point(meet, kInfInf));
    meet = circle_intersect(plane, id, plane.make_circle(CircleTag::ClassicalPGL, MobiusMap(0, 1, 1, 0)));
    ASSERT_EQ(meet.size(), 2u);
    EXPECT_TRUE(contains_point(meet, P(1, 1)));
    EXPECT_TRUE(contains_point(meet, P(-1, -1)));
    meet = circle_intersect(plane, id, plane.make_circle(CircleTag::ClassicalPGL, MobiusMap(2, 0, 0, 1)));
    ASSERT_EQ(meet.size(), 2u);
    EXPECT_TRUE(contains_point(meet, P(0, 0)));
    EXPECT_TRUE(contains_point(meet, kInfInf));
    EXPECT_THROW(circle_intersect(plane, id, id), GeometryError);
}

TEST(Intersect, MixedBranchesOnHalfClassical) {
    const auto plane = power_plane(2);
    const Circle c = join(plane, P(0, 0), P(1, 2), P(2, 3));
    const Circle d = join(plane, P(0, 3), P(1, 2), P(2, 1));
    const auto meet = circle_intersect(plane, c, d);
    EXPECT_TRUE(contains_point(meet, P(1, 2)));
    for (const auto& m : meet) {
        EXPECT_LT(c.residual(m), 1e-9);
        EXPECT_LT(d.residual(m), 1e-9);
    }
}

TEST(Touch, ClassicalDoubleRootExample) {
    const auto plane = PlaneModel::classical();
    const Circle id = plane.make_circle(CircleTag::ClassicalPGL, MobiusMap::identity());
    const TouchResult t = touch(plane, id, P(0, 0), P(1, 2));
    // delta(x) = 2x / (2 - x)
    EXPECT_TRUE(approx_equal(t.circle.map, MobiusMap(2, 0, -1, 2), 1e-9));
    EXPECT_NEAR(t.circle(R(0)).value(), 0.0, 1e-12);
    EXPECT_NEAR(t.circle(R(1)).value(), 2.0, 1e-9);
    // delta(x) = x  <=>  c x^2 + (d - a) x - b = 0 has a double root
    const MobiusMap& m = t.circle.map;
    const double disc = (m.d() - m.a()) * (m.d() - m.a()) + 4.0 * m.c() * m.b();
    EXPECT_NEAR(disc, 0.0, 1e-9);
    EXPECT_EQ(t.brackets, 1);
    const auto meet = circle_intersect(plane, id, t.circle);
    ASSERT_EQ(meet.size(), 1u);
    EXPECT_TRUE(contains_point(meet, P(0, 0)));
}

TEST(Touch, TranslationAtInfinity) {
    const auto plane = PlaneModel::classical();
    const Circle id = plane.make_circle(CircleTag::ClassicalPGL, MobiusMap::identity());
    const TouchResult t = touch(plane, id, kInfInf, P(0, 1));
    EXPECT_TRUE(approx_equal(t.circle.map, MobiusMap(1, 1, 0, 1), 1e-9));
}

TEST(Touch, Preconditions) {
    const auto plane = PlaneModel::classical();
    const Circle id = plane.make_circle(CircleTag::ClassicalPGL, MobiusMap::identity());
    EXPECT_THROW(touch(plane, id, P(0, 1), P(1, 2)), GeometryError);  // p not on C
    EXPECT_THROW(touch(plane, id, P(0, 0), P(3, 3)), GeometryError);  // q on C
    EXPECT_THROW(touch(plane, id, P(0, 0), P(0, 2)), GeometryError);  // q parallel to p
}

TEST(Touch, HalfClassicalTwistedCircle) {
    const auto plane = power_plane(2);
    const Circle c = join(plane, P(0, 3), P(1, 2), P(2, 1));
    const TorusPoint p = c.point_at(R(1.5));
    const TouchResult t = touch(plane, c, p, P(-1, 4));
    EXPECT_EQ(t.circle.tag, CircleTag::HalfClassicalTwisted);
    EXPECT_LT(t.circle.residual(p), 1e-9);
    EXPECT_LT(t.circle.residual(P(-1, 4)), 1e-9);
    const auto meet = circle_intersect(plane, c, t.circle);
    ASSERT_FALSE(meet.empty());
    for (const auto& m : meet) EXPECT_LT(torus_distance(m, p), 1e-6);
}

TEST(Derived, Examples) {
    const auto plane = PlaneModel::classical();
    const auto v = derived_line_through(plane, kInfInf, P(0, 0), P(0, 5));
    ASSERT_TRUE(std::holds_alternative<ParallelClass>(v));
    EXPECT_EQ(std::get<ParallelClass>(v).kind, ParallelKind::Plus);
    EXPECT_TRUE(approx_equal(std::get<ParallelClass>(v).coordinate, R(0)));
    const auto c = derived_line_through(plane, kInfInf, P(0, 0), P(1, 1));
    ASSERT_TRUE(std::holds_alternative<Circle>(c));
    EXPECT_TRUE(is_identity(std::get<Circle>(c).map));
    EXPECT_THROW(derived_line_through(plane, kInfInf, TorusPoint{kInf, R(1)}, P(1, 1)), GeometryError);
}

TEST(Derived, UniqueUnderPermutation) {
    const auto plane = power_plane(3);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    for (int i = 0; i < 50; ++i) {
        const TorusPoint a = P(n(rng), n(rng)), b = P(n(rng), n(rng));
        if (parallel(a, b) != ParallelRelation::None) continue;
        const auto l1 = derived_line_through(plane, kInfInf, a, b);
        const Circle l2 = join(plane, b, kInfInf, a);
        ASSERT_TRUE(std::holds_alternative<Circle>(l1));
        EXPECT_LT(homeo_sup_distance(std::get<Circle>(l1).graph, l2.graph, 64), 1e-9);
    }
}

TEST(PlaneConfig, SpecsAndFiles) {
    EXPECT_TRUE(plane_from_spec("classical").is_classical());
    const auto half = plane_from_spec("half:power:2");
    EXPECT_FALSE(half.is_classical());
    EXPECT_FALSE(half.experimental());
    EXPECT_TRUE(plane_from_spec("half-classical", std::string("power:2"), std::string("power:3")).experimental());
    const auto from_file = plane_from_config_file(std::string(TEST_DATA_DIR) + "/half_power2.conf");
    EXPECT_EQ(from_file.descriptor(), half.descriptor());
    std::istringstream bad("family = hyperbolic\n");
    EXPECT_THROW(plane_from_config(bad), GeometryError);
    EXPECT_THROW(plane_from_spec("half:cube"), GeometryError);
    EXPECT_THROW(plane_from_config_file("/nonexistent/plane.conf"), GeometryError);
}
