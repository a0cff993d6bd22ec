#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eips/error.hpp"
#include "eips/relation.hpp"
#include "support.hpp"

using namespace eips;

namespace {

PlanarRelation cubic_output_relation(double lo = -2.0, double hi = 2.0, std::size_t n = 4001) {
    return PlanarRelation::param_curve(linspace(lo, hi, n), [](double s) { return s * s * s - s; },
                                       [](double s) { return s; });
}

double max_pointwise_gap(const PlanarRelation& a, const PlanarRelation& b) {
    const auto pa = a.samples(), pb = b.samples();
    EXPECT_EQ(pa.size(), pb.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(pa.size(), pb.size()); ++i) {
        worst = std::max(worst, (pa[i] - pb[i]).norm() / (1.0 + pa[i].norm()));
    }
    return worst;
}

std::vector<PlanarRelation> representations() {
    const auto grid = linspace(-2.0, 2.0, 401);
    std::vector<PlanarRelation> out;
    out.push_back(PlanarRelation::param_curve(grid, [](double s) { return s * s * s - s; },
                                              [](double s) { return std::sin(s) + s; }));
    std::vector<Point2> pts;
    for (double s : grid) pts.emplace_back(std::tanh(s) + 0.5 * s, s * s * s);
    out.push_back(PlanarRelation::sampled(pts));
    out.push_back(PlanarRelation::closed_form([](double u) { return u * u * u + 0.3 * u; },
                                              MapDirection::kInputToOutput, grid));
    out.push_back(PlanarRelation::closed_form([](double y) { return std::sinh(y); },
                                              MapDirection::kOutputToInput, grid));
    return out;
}

}  // namespace

TEST(Relation, RepresentationsAndInverse) {
    const auto k = cubic_output_relation(-1.0, 1.0, 3);
    const auto pts = k.samples();
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_DOUBLE_EQ(pts[0].x(), 0.0);
    EXPECT_DOUBLE_EQ(pts[0].y(), -1.0);
    const auto inv = k.inverse().samples();
    EXPECT_DOUBLE_EQ(inv[0].x(), -1.0);
    EXPECT_DOUBLE_EQ(inv[0].y(), 0.0);
    EXPECT_EQ(kind_name(k.kind()), "param_curve");
}

TEST(Relation, SampledDeduplicates) {
    const auto k = PlanarRelation::sampled({{0, 0}, {1, 1}, {0, 0}, {1, 1 + 1e-15}});
    EXPECT_EQ(k.samples().size(), 2u);
}

TEST(Relation, InvalidConstruction) {
    EXPECT_THROW((void)PlanarRelation::param_curve({0.0, 0.0}, [](double s) { return s; },
                                                   [](double s) { return s; }),
                 Error);
    EXPECT_THROW((void)PlanarRelation::param_curve({0.0, 1.0}, [](double s) { return 1.0 / (s - 1.0); },
                                                   [](double s) { return s; }),
                 Error);
}

TEST(Relation, OutputFeedbackShiftsCubic) {
    const auto k = cubic_output_relation();
    const auto lam = transform_relation(k, {1.0, 2.0, 0.0, 1.0});
    const auto grid = linspace(-2.0, 2.0, 4001);
    const auto pts = lam.samples();
    for (std::size_t i = 0; i < grid.size(); i += 97) {
        const double s = grid[i];
        EXPECT_NEAR(pts[i].x(), s * s * s + s, 1e-12);
        EXPECT_NEAR(pts[i].y(), s, 0.0);
    }
}

TEST(Relation, StageCompositionAgreesWithDirectTransform) {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        Transform2 t{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        if (trial % 10 == 0) t.a = 0.0;
        if (std::abs(t.det()) < 0.05) continue;
        const auto e = decompose(t);
        for (const auto& k : representations()) {
            const double gap = max_pointwise_gap(transform_relation(k, t), compose_via_stages(k, e));
            ASSERT_LT(gap, 1e-10) << "trial " << trial << " kind " << kind_name(k.kind());
        }
    }
}

TEST(Relation, ClosedFormSurvivesCompatibleStages) {
    const auto k = PlanarRelation::closed_form([](double u) { return u * u * u; },
                                               MapDirection::kInputToOutput, linspace(-1, 1, 11));
    EXPECT_EQ(apply_stage(k, Stage::kPostGain, 2.0).kind(), RelationKind::kClosedForm);
    EXPECT_EQ(apply_stage(k, Stage::kInputFeedthrough, 2.0).kind(), RelationKind::kClosedForm);
    EXPECT_EQ(apply_stage(k, Stage::kPreGain, -3.0).kind(), RelationKind::kClosedForm);
    EXPECT_EQ(apply_stage(k, Stage::kOutputFeedback, 2.0).kind(), RelationKind::kParamCurve);
    const auto inv = k.inverse();
    EXPECT_EQ(apply_stage(inv, Stage::kOutputFeedback, 2.0).kind(), RelationKind::kClosedForm);
}

TEST(Relation, TransformRejectsSingular) {
    try {
        (void)transform_relation(cubic_output_relation(), {1.0, 1.0, 1.0, 1.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kSingularTransform);
    }
}

TEST(IntegralFunction, TrapezoidMatchesClosedForm) {
    // primitive of y^3 - y anchored at y = -2
    const auto f = integral_function(cubic_output_relation(), IntegralOf::kKInverse);
    auto exact = [](double y) { return 0.25 * std::pow(y, 4) - 0.5 * y * y - (4.0 - 2.0); };
    double worst = 0.0;
    for (std::size_t i = 0; i < f.grid.size(); ++i) worst = std::max(worst, std::abs(f.values[i] - exact(f.grid[i])));
    // trapezoid error <= L h^2 max|f''| / 12 = 4 * 1e-6 * 12 / 12
    EXPECT_LT(worst, 4e-6 + 1e-12);
    EXPECT_EQ(f.values.front(), 0.0);
    EXPECT_FALSE(f.convex);
}

TEST(IntegralFunction, MonotoneTransformedRelationIsConvex) {
    const auto lam = transform_relation(cubic_output_relation(), {1.0, 2.0, 0.0, 1.0});
    const auto f = integral_function(lam, IntegralOf::kKInverse);
    EXPECT_TRUE(f.convex);
    auto exact = [](double y) { return 0.25 * std::pow(y, 4) + 0.5 * y * y - 6.0; };
    for (double y : {-1.5, 0.0, 0.7, 2.0}) EXPECT_NEAR(f.value(y), exact(y), 1e-5);
    EXPECT_NEAR(f.derivative(1.0), 2.0, 1e-9);
    // linear extrapolation beyond the grid
    EXPECT_NEAR(f.value(3.0), f.value(2.0) + 10.0, 1e-9);
}

TEST(IntegralFunction, FoldedAbscissaIsMultiValued) {
    // u = s^3 - s is not monotone in s
    try {
        (void)integral_function(cubic_output_relation(), IntegralOf::kK);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kMultiValued);
    }
}

TEST(IntegralFunction, DecreasingAbscissaIsReversed) {
    const auto k = PlanarRelation::param_curve(linspace(-1, 1, 201), [](double s) { return -s; },
                                               [](double s) { return -2.0 * s; });
    const auto f = integral_function(k, IntegralOf::kK);
    EXPECT_LT(f.grid.front(), f.grid.back());
    EXPECT_NEAR(f.value(1.0), 0.0, 1e-12);  // u^2 from -1 to 1
    EXPECT_NEAR(f.value(0.0), -1.0, 1e-12);
}

TEST(IntegralFunction, ResampledOntoGrid) {
    const auto lam = transform_relation(cubic_output_relation(), {1.0, 2.0, 0.0, 1.0});
    const auto grid = linspace(-3.0, 3.0, 601);
    const auto f = integral_function(lam, IntegralOf::kKInverse, &grid);
    EXPECT_NEAR(f.grid.front(), -2.0, 1e-12);
    EXPECT_NEAR(f.grid.back(), 2.0, 1e-12);
    EXPECT_EQ(f.grid.size(), 401u);
}

TEST(IntegralFunction, SampledRelationSortedBeforeIntegration) {
    std::vector<Point2> pts;
    for (double u : {0.5, -1.0, 1.0, 0.0, -0.5}) pts.emplace_back(u, 2.0 * u);
    const auto f = integral_function(PlanarRelation::sampled(pts), IntegralOf::kK);
    EXPECT_NEAR(f.value(1.0), 0.0, 1e-12);
    EXPECT_NEAR(f.value(0.0), -1.0, 1e-12);
}

TEST(Legendre, QuadraticIsSelfDual) {
    const auto grid = linspace(-4, 4, 801);
    const auto k = PlanarRelation::closed_form([](double u) { return u; }, MapDirection::kInputToOutput, grid);
    const auto f = integral_function(k, IntegralOf::kK);
    const auto dual = legendre(f, linspace(-3, 3, 601));
    EXPECT_TRUE(dual.convex);
    for (std::size_t j = 0; j < dual.grid.size(); j += 50) {
        const double y = dual.grid[j];
        // compare up to the anchoring constant, value at y = -3 is 4.5
        EXPECT_NEAR(dual.values[j], 0.5 * y * y - 4.5, 1e-9);
    }
}

TEST(Legendre, QuarticConjugate) {
    const auto k = PlanarRelation::closed_form([](double u) { return u * u * u; }, MapDirection::kInputToOutput,
                                               linspace(-3, 3, 6001));
    const auto f = integral_function(k, IntegralOf::kK);
    const auto dual = legendre(f, linspace(-8, 8, 1601));
    auto exact = [](double y) { return 0.75 * std::pow(std::abs(y), 4.0 / 3.0); };
    const double at0 = dual.value(0.0);
    for (double y : {-8.0, -1.0, 1.0, 8.0}) {
        EXPECT_NEAR(dual.value(y) - at0, exact(y), 1e-4) << y;
    }
    EXPECT_NEAR(dual.value(8.0) - at0, 12.0, 1e-4);
}

TEST(LegendreProperty, DoubleConjugateRecoversConvexFunction) {
    const double h = 0.01;
    const auto grid = linspace(-2, 2, 401);
    const std::vector<std::function<double(double)>> slopes = {
        [](double u) { return u; }, [](double u) { return u * u * u + u; },
        [](double u) { return std::sinh(u); }, [](double u) { return 2.0 * u + std::atan(u); }};
    for (const auto& g : slopes) {
        const auto f = integral_function(PlanarRelation::closed_form(g, MapDirection::kInputToOutput, grid),
                                         IntegralOf::kK);
        const double ylo = g(-2.0), yhi = g(2.0);
        const auto dual = legendre(f, linspace(ylo, yhi, static_cast<std::size_t>((yhi - ylo) / h) + 1));
        const auto back = legendre(dual, grid);
        const double shift = back.anchor + back.values[0] - (f.values[0] + f.anchor);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            ASSERT_LE(std::abs(back.values[i] + back.anchor - shift - f.values[i] - f.anchor), 5 * h * h)
                << "node " << i;
        }
    }
}

TEST(Monotonicity, DetectsShortageAndTransformedRelations) {
    const auto k = cubic_output_relation();
    EXPECT_FALSE(is_monotone(k));
    const auto lam = transform_relation(k, {1.0, 2.0, 0.0, 1.0});
    EXPECT_TRUE(is_monotone(lam));
    EXPECT_TRUE(is_monotone(lam, true));
    const auto flat = PlanarRelation::param_curve(linspace(-1, 1, 11), [](double s) { return s; },
                                                  [](double) { return 1.0; });
    EXPECT_TRUE(is_monotone(flat));
    EXPECT_FALSE(is_monotone(flat, true));
}

TEST(MonotonicityProperty, AgreesWithPairwiseDefinition) {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Point2> pts;
        const bool make_monotone = trial % 2 == 0;
        double u = 0.0, y = 0.0;
        for (int i = 0; i < 60; ++i) {
            u += rng.uniform(0.0, 1.0);
            y += make_monotone ? rng.uniform(0.0, 1.0) : rng.uniform(-1.0, 1.0);
            pts.emplace_back(u, y);
        }
        bool pairwise = true;
        for (const auto& p : pts) {
            for (const auto& q : pts) pairwise = pairwise && (p.x() - q.x()) * (p.y() - q.y()) >= 0.0;
        }
        EXPECT_EQ(is_monotone(PlanarRelation::sampled(pts)), pairwise);
    }
}

TEST(Cursive, LineAndShortageRelationsSupported) {
    const auto line = PlanarRelation::param_curve(linspace(-5, 5, 1001), [](double s) { return 2.0 * s; },
                                                  [](double s) { return s; });
    const auto r = is_cursive(line);
    EXPECT_TRUE(r.cursive());
    EXPECT_EQ(r.verdict(), "numerically supported");
    const auto shortage = PlanarRelation::param_curve(linspace(-3, 3, 4001),
                                                 [](double s) { return 2.0 * s - s * s * s; },
                                                 [](double s) { return s * s * s - s; });
    EXPECT_TRUE(is_cursive(shortage).cursive());
    const auto sine = PlanarRelation::param_curve(linspace(-40, 40, 4001),
                                                  [](double s) { return 2.5 * std::sin(s) + 0.1 * s; },
                                                  [](double s) { return s; });
    EXPECT_TRUE(is_cursive(sine).cursive());
}

TEST(Cursive, JumpIsDiscontinuous) {
    const auto k = PlanarRelation::param_curve(linspace(-1, 1, 400), [](double s) { return s; },
                                               [](double s) { return s + (s >= 0.0 ? 1.0 : 0.0); });
    const auto r = is_cursive(k);
    EXPECT_FALSE(r.continuous);
    EXPECT_FALSE(r.cursive());
}

TEST(Cursive, SteepButContinuousCurvePasses) {
    const auto k = PlanarRelation::param_curve(linspace(-1, 1, 400), [](double s) { return s; },
                                               [](double s) { return s + std::tanh(1e4 * s); });
    EXPECT_TRUE(is_cursive(k).continuous);
}

TEST(Cursive, BoundedCurveDoesNotDiverge) {
    const auto k = PlanarRelation::param_curve(linspace(-6, 6, 1001), [](double s) { return std::tanh(s); },
                                               [](double s) { return std::tanh(s); });
    const auto r = is_cursive(k);
    EXPECT_FALSE(r.diverges_high);
    EXPECT_FALSE(r.diverges_low);
    const auto declared = PlanarRelation::param_curve(linspace(-5, 5, 101), [](double s) { return s; },
                                                      [](double s) { return s; }, true, false);
    EXPECT_FALSE(is_cursive(declared).diverges_high);
    EXPECT_TRUE(is_cursive(declared).diverges_low);
}

TEST(Cursive, CrossingCurveSelfIntersects) {
    // (s^2 - 1, s (s^2 - 1)) passes the origin at s = -1 and s = 1
    const auto k = PlanarRelation::param_curve(linspace(-3, 3, 1001), [](double s) { return s * s - 1.0; },
                                               [](double s) { return s * (s * s - 1.0); });
    const auto r = is_cursive(k);
    EXPECT_FALSE(r.non_self_intersecting);
    EXPECT_GT(r.self_intersections, 0u);
}

TEST(Cursive, ConstantCurveRejected) {
    const auto k = PlanarRelation::param_curve(linspace(-1, 1, 50), [](double) { return 0.0; },
                                               [](double) { return 0.0; });
    const auto r = is_cursive(k);
    EXPECT_FALSE(r.cursive());
    EXPECT_FALSE(r.non_self_intersecting);
}

TEST(Cursive, RequiresParametricCurve) {
    try {
        (void)is_cursive(PlanarRelation::sampled({{0, 0}, {1, 1}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kWrongRepresentation);
    }
}

TEST(Cursive, InputAffineFlagsReported) {
    const auto k = cubic_output_relation();
    const auto r = is_cursive(k, {}, InputAffineFlags{true, true, true});
    ASSERT_TRUE(r.input_affine_condition.has_value());
    EXPECT_TRUE(*r.input_affine_condition);
    EXPECT_FALSE(is_cursive(k).input_affine_condition.has_value());
}

TEST(Cursive, MaximalMonotoneCombinesBoth) {
    const auto k = cubic_output_relation();
    EXPECT_FALSE(is_maximal_monotone(k).supported());
    EXPECT_TRUE(is_maximal_monotone(transform_relation(k, {1.0, 2.0, 0.0, 1.0})).supported());
}
