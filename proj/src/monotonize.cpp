#include "eips/monotonize.hpp"

#include <cmath>

#include "eips/error.hpp"

namespace eips {
namespace {

// Extended precision keeps the final rounding to double the only one that
// matters, so exactly representable transforms come out exactly.
using Real = long double;

struct Vec {
    Real x, y;
    [[nodiscard]] Point2 to_double() const { return {static_cast<double>(x), static_cast<double>(y)}; }
};

Real cross(const Vec& p, const Vec& q) { return p.x * q.y - p.y * q.x; }

Transform2 ray_map(const Vec& r1, const Vec& r2, const Vec& r3, const Vec& r4) {
    const Real det = cross(r1, r2);
    if (std::fabs(det) < 1e-300L) {
        throw Error(ErrorCode::kDegenerateRays, "source rays are colinear");
    }
    // [r3 r4] adj([r1 r2]) / det
    const Real a = (r3.x * r2.y - r4.x * r1.y) / det;
    const Real b = (r4.x * r1.x - r3.x * r2.x) / det;
    const Real c = (r3.y * r2.y - r4.y * r1.y) / det;
    const Real d = (r4.y * r1.x - r3.y * r2.x) / det;
    return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c), static_cast<double>(d)};
}

Vec extend(const Point2& p) { return {p.x(), p.y()}; }

// Line xi = tau chi as (tau, 1); the line chi = 0 as (1, 0).
std::array<Vec, 2> line_representatives(const Pqi& p) {
    const Real a = p.a, b = p.b, c = p.c;
    const Real n = std::sqrt(a * a + b * b + c * c);
    const Real sq = std::sqrt(b * b - 4 * a * c);
    const Real q = -0.5L * (b + std::copysign(sq, b));
    if (std::fabs(a) <= 1e-14L * n) {
        // one root at infinity, the other solves b tau + c = 0
        return {Vec{1, 0}, Vec{-c / b, 1}};
    }
    // a tau^2 + b tau + c = 0, stable pair q/a and c/q
    return {Vec{q / a, 1}, Vec{c / q, 1}};
}

std::array<Vec, 2> oriented_generators(const Pqi& p) {
    require_nontrivial(p);
    auto lines = line_representatives(p);
    // Order the lines by angle in [0, pi) of their canonical representatives.
    auto angle = [](const Vec& v) { return std::atan2(v.y, v.x); };
    if (angle(lines[1]) < angle(lines[0])) std::swap(lines[0], lines[1]);
    const Point2 bisector = lines[0].to_double().normalized() + lines[1].to_double().normalized();
    Vec start = lines[0], end = lines[1];
    if (!(p(bisector) > 0.0)) std::swap(start, end);
    const Real orient = cross(start, end);
    const Real scale = std::hypot(start.x, start.y) * std::hypot(end.x, end.y);
    if (std::fabs(orient) < 1e-14L * scale) {
        throw Error(ErrorCode::kDegenerateRays, "boundary rays are colinear");
    }
    if (orient < 0) start = {-start.x, -start.y};
    return {start, end};
}

bool same_alpha_sign(const Pqi& source, const Pqi& target, const Point2& r1, const Point2& r2, const Point2& r3,
                     const Point2& r4) {
    return (source(r1 + r2) > 0.0) == (target(r3 + r4) > 0.0);
}

}  // namespace

ConeGenerators cone_generators(const Pqi& p) {
    const auto g = oriented_generators(p);
    return {g[0].to_double(), g[1].to_double()};
}

std::array<Transform2, 2> candidate_transforms(const Point2& r1, const Point2& r2, const Point2& r3,
                                               const Point2& r4) {
    const Vec e1 = extend(r1), e2 = extend(r2), e3 = extend(r3), e4 = extend(r4);
    return {ray_map(e1, e2, e3, e4), ray_map(e1, e2, e3, Vec{-e4.x, -e4.y})};
}

Transform2 select_candidate(const Pqi& source, const Pqi& target, const Point2& r1, const Point2& r2,
                            const Point2& r3, const Point2& r4) {
    const auto ts = candidate_transforms(r1, r2, r3, r4);
    return same_alpha_sign(source, target, r1, r2, r3, r4) ? ts[0] : ts[1];
}

Transform2 mapping_transform(const Pqi& source, const Pqi& target) {
    const auto g = oriented_generators(source);
    const auto h = oriented_generators(target);
    const bool keep = same_alpha_sign(source, target, g[0].to_double(), g[1].to_double(), h[0].to_double(),
                                      h[1].to_double());
    const Vec r4 = keep ? h[1] : Vec{-h[1].x, -h[1].y};
    return ray_map(g[0], g[1], h[0], r4);
}

Transform2 passivize(const PassivityIndices& source, const PassivityIndices& target) {
    return mapping_transform(to_pqi(source), to_pqi(target));
}

std::string_view stage_label(Stage s) noexcept {
    switch (s) {
        case Stage::kOutputFeedback: return "output-feedback";
        case Stage::kPostGain: return "post-gain";
        case Stage::kInputFeedthrough: return "input-feedthrough";
        case Stage::kPreGain: return "pre-gain";
    }
    return "unknown";
}

Transform2 ElementaryDecomposition::product() const {
    const Transform2 la{1.0, delta_a, 0.0, 1.0};
    const Transform2 lb{1.0, 0.0, 0.0, delta_b};
    const Transform2 lc{1.0, 0.0, delta_c, 1.0};
    const Transform2 ld{delta_d, 0.0, 0.0, 1.0};
    return ld * lc * lb * la;
}

Transform2 ElementaryDecomposition::reconstruct() const {
    const Transform2 t = product();
    return column_swapped ? Transform2{t.b, t.a, t.d, t.c} : t;
}

std::array<std::pair<Stage, double>, 4> ElementaryDecomposition::stages() const {
    return {{{Stage::kOutputFeedback, delta_a},
             {Stage::kPostGain, delta_b},
             {Stage::kInputFeedthrough, delta_c},
             {Stage::kPreGain, delta_d}}};
}

ElementaryDecomposition decompose(const Transform2& t) {
    require_invertible(t);
    ElementaryDecomposition e;
    Transform2 w = t;
    const double scale = std::sqrt(t.a * t.a + t.b * t.b + t.c * t.c + t.d * t.d);
    if (std::abs(t.a) <= 1e-3 * scale) {
        w = {t.b, t.a, t.d, t.c};
        e.column_swapped = true;
    }
    e.delta_a = w.b / w.a;
    e.delta_b = w.d - w.b * w.c / w.a;
    e.delta_c = w.c;
    e.delta_d = w.a;
    return e;
}

}  // namespace eips
