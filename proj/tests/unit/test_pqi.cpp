#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "eips/error.hpp"
#include "eips/pqi.hpp"
#include "support.hpp"

using namespace eips;
using eips::testing::random_point;
using eips::testing::random_pqi;

namespace {

double angle_mod_pi(const Point2& v) {
    double t = std::atan2(v.y(), v.x());
    if (t < 0.0) t += std::numbers::pi;
    if (t >= std::numbers::pi) t -= std::numbers::pi;
    return t;
}

double line_distance(double s, double t) {
    const double d = std::abs(s - t);
    return std::min(d, std::numbers::pi - d);
}

}  // namespace

TEST(PqiGeometry, IndicesMapToCoefficients) {
    const Pqi p = to_pqi({-2.0 / 3.0, -1.0 / 3.0});
    EXPECT_DOUBLE_EQ(p.a, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(p.b, 1.0);
    EXPECT_DOUBLE_EQ(p.c, 2.0 / 3.0);
}

TEST(PqiGeometry, TrivialIndicesRejected) {
    try {
        (void)to_pqi({1.0, 0.25});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kTrivialPqi);
    }
    EXPECT_FALSE(is_nontrivial({1.0, 2.0, 1.0}));
    EXPECT_THROW((void)boundary_rays({1.0, 0.0, 1.0}), Error);
}

TEST(PqiGeometry, PassivityQuadrantRays) {
    const auto rays = boundary_rays({0.0, 1.0, 0.0});
    EXPECT_NEAR(rays[0].x(), 1.0, 1e-15);
    EXPECT_NEAR(rays[0].y(), 0.0, 1e-15);
    EXPECT_NEAR(rays[1].x(), 0.0, 1e-15);
    EXPECT_NEAR(rays[1].y(), 1.0, 1e-15);
    const auto cone = solution_set({0.0, 1.0, 0.0});
    EXPECT_TRUE(cone.contains({1.0, 2.0}));
    EXPECT_TRUE(cone.contains({-1.0, -2.0}));
    EXPECT_FALSE(cone.contains({1.0, -2.0}));
}

TEST(PqiGeometry, ShortageExampleRays) {
    // 1/3 xi^2 + xi chi + 2/3 chi^2 vanishes on xi = -chi and xi = -2 chi.
    const auto rays = boundary_rays({1.0 / 3.0, 1.0, 2.0 / 3.0});
    const Point2 l1 = Point2(-1.0, 1.0).normalized();
    const Point2 l2 = Point2(-2.0, 1.0).normalized();
    EXPECT_NEAR((rays[0] - l1).norm(), 0.0, 1e-14);
    EXPECT_NEAR((rays[1] - l2).norm(), 0.0, 1e-14);
}

TEST(PqiGeometry, BoundaryRaysMatchAngularScan) {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Pqi p = random_pqi(rng, 1e-2);
        const auto rays = boundary_rays(p);
        const auto scanned = eips::testing::scanned_boundary_angles(p);
        ASSERT_EQ(scanned.size(), 2u);
        const double t0 = angle_mod_pi(rays[0]), t1 = angle_mod_pi(rays[1]);
        EXPECT_LT(t0, t1);
        const double best = std::min(line_distance(t0, scanned[0]) + line_distance(t1, scanned[1]),
                                     line_distance(t0, scanned[1]) + line_distance(t1, scanned[0]));
        EXPECT_LT(best, 1e-9);
        EXPECT_NEAR(rays[0].norm(), 1.0, 1e-15);
        EXPECT_NEAR(p(rays[0]), 0.0, 1e-12);
        EXPECT_NEAR(p(rays[1]), 0.0, 1e-12);
    }
}

TEST(PqiGeometry, DegenerateCoefficientBranches) {
    // c = 0: lines xi = 0 and 2 xi + 3 chi = 0
    const auto r = boundary_rays({2.0, 3.0, 0.0});
    EXPECT_NEAR(r[0].x(), 0.0, 1e-15);
    EXPECT_NEAR(r[1].x() * 2.0 + r[1].y() * 3.0, 0.0, 1e-14);
    // a = 0
    const auto s = boundary_rays({0.0, 1.0, -5.0});
    EXPECT_NEAR(s[0].y(), 0.0, 1e-15);
    EXPECT_NEAR(s[1].x() - 5.0 * s[1].y(), 0.0, 1e-14);
}

TEST(PqiGeometryProperty, ConeMembershipAgreesWithPolynomial) {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const Pqi p = random_pqi(rng, 1e-6);
        const auto cone = solution_set(p);
        EXPECT_GT(p(cone.probe), 0.0);
        for (int k = 0; k < 1000; ++k) {
            const Point2 z = random_point(rng);
            const double v = p(z);
            if (std::abs(v) <= 1e-9 * z.squaredNorm()) continue;
            ASSERT_EQ(cone.contains(z), v > 0.0) << "trial " << trial;
            ASSERT_EQ(contains(p, z), v > 0.0);
        }
    }
}

TEST(PqiGeometryProperty, SameSolutionSetImpliesProportionalCoefficients) {
    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const Pqi p = random_pqi(rng, 1e-4);
        const double s = rng.uniform(0.1, 10.0);
        const Pqi from_cone = pqi_from_cone(solution_set(p));
        const Pqi q{s * from_cone.a, s * from_cone.b, s * from_cone.c};
        int agree = 0;
        for (int k = 0; k < 10000; ++k) {
            const Point2 z = random_point(rng);
            if (std::abs(p(z)) <= 1e-9 * p.norm() * z.squaredNorm()) {
                ++agree;
                continue;
            }
            agree += contains(p, z) == contains(q, z);
        }
        ASSERT_EQ(agree, 10000);
        EXPECT_LT(normalized_distance(p, q), 1e-9);
    }
}

TEST(PqiGeometryProperty, PullbackCommutesWithTransform) {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const Pqi p = random_pqi(rng);
        Transform2 t{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        if (std::abs(t.det()) < 0.1) continue;
        const Pqi q = pullback(p, t);
        // coefficients from three evaluations of z -> p(T^-1 z)
        const Eigen::Matrix2d minv = t.matrix().inverse();
        auto direct = [&](const Point2& z) { return p(minv * z); };
        const double a = direct({1, 0}), c = direct({0, 1}), b = direct({1, 1}) - a - c;
        EXPECT_NEAR(q.a, a, 1e-11);
        EXPECT_NEAR(q.b, b, 1e-11);
        EXPECT_NEAR(q.c, c, 1e-11);
        for (int k = 0; k < 1000; ++k) {
            const Point2 z = random_point(rng);
            const double v = p(z);
            if (std::abs(v) <= 1e-9 * z.squaredNorm()) continue;
            ASSERT_EQ(contains(q, t.apply(z)), contains(p, z));
        }
    }
}

TEST(PqiGeometry, PullbackOfShortageExample) {
    const Pqi q = pullback({1.0 / 3.0, 1.0, 2.0 / 3.0}, {1.0, 1.0, 1.0, 2.0});
    EXPECT_NEAR(q.a, 0.0, 1e-15);
    EXPECT_NEAR(q.b, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(q.c, 0.0, 1e-15);
}

TEST(PqiGeometry, PullbackRejectsSingular) {
    try {
        (void)pullback({0.0, 1.0, 0.0}, {1.0, 2.0, 2.0, 4.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kSingularTransform);
    }
}
