#include "eips/pqi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "eips/error.hpp"

namespace eips {
namespace {

Point2 canonical_direction(Point2 v) {
    v.normalize();
    if (v.y() < 0.0 || (v.y() == 0.0 && v.x() < 0.0)) v = -v;
    return v;
}

double line_angle(const Point2& v) { return std::atan2(v.y(), v.x()); }

double cross(const Point2& p, const Point2& q) { return p.x() * q.y() - p.y() * q.x(); }

}  // namespace

double Pqi::norm() const { return std::sqrt(a * a + b * b + c * c); }

Pqi to_pqi(const PassivityIndices& p) {
    if (!(p.rho * p.nu < 0.25)) {
        throw Error(ErrorCode::kTrivialPqi, "indices with rho*nu >= 1/4 give a trivial PQI");
    }
    return {-p.nu, 1.0, -p.rho};
}

bool is_nontrivial(const Pqi& p) {
    const double n2 = p.a * p.a + p.b * p.b + p.c * p.c;
    return std::isfinite(n2) && p.discriminant() > 1e-12 * n2;
}

void require_nontrivial(const Pqi& p) {
    if (!is_nontrivial(p)) {
        throw Error(ErrorCode::kTrivialPqi,
                    "PQI has non-positive discriminant (" + std::to_string(p.discriminant()) + ")");
    }
}

std::array<Point2, 2> boundary_rays(const Pqi& p) {
    require_nontrivial(p);
    const double n = p.norm();
    const double sq = std::sqrt(p.discriminant());
    const double q = -0.5 * (p.b + std::copysign(sq, p.b));
    std::array<Point2, 2> rays;
    if (std::abs(p.a) <= 1e-14 * n && std::abs(p.c) <= 1e-14 * n) {
        rays = {Point2(1.0, 0.0), Point2(0.0, 1.0)};
    } else if (std::abs(p.c) >= std::abs(p.a)) {
        // chi = t xi with c t^2 + b t + a = 0
        rays = {Point2(1.0, q / p.c), Point2(1.0, p.a / q)};
    } else {
        // xi = s chi with a s^2 + b s + c = 0
        rays = {Point2(q / p.a, 1.0), Point2(p.c / q, 1.0)};
    }
    for (auto& r : rays) r = canonical_direction(r);
    if (line_angle(rays[1]) < line_angle(rays[0])) std::swap(rays[0], rays[1]);
    if (std::abs(cross(rays[0], rays[1])) < 1e-14) {
        throw Error(ErrorCode::kDegenerateRays, "boundary rays are colinear");
    }
    return rays;
}

SymmetricDoubleCone solution_set(const Pqi& p) {
    const auto rays = boundary_rays(p);
    Point2 s = (rays[0] + rays[1]).normalized();
    if (!(p(s) > 0.0)) s = Point2(-s.y(), s.x());
    return {rays[0], rays[1], s};
}

bool SymmetricDoubleCone::contains(const Point2& z, double tol) const {
    // Express z in the basis of ray representatives oriented toward the probe.
    Eigen::Matrix2d basis;
    basis.col(0) = ray1;
    basis.col(1) = ray2;
    const Eigen::Vector2d probe_coords = basis.inverse() * probe;
    basis.col(0) *= probe_coords(0) >= 0.0 ? 1.0 : -1.0;
    basis.col(1) *= probe_coords(1) >= 0.0 ? 1.0 : -1.0;
    const Eigen::Vector2d w = basis.inverse() * z;
    return w(0) * w(1) >= -tol * z.squaredNorm();
}

Pqi pqi_from_cone(const SymmetricDoubleCone& cone) {
    // (r1 x z)(r2 x z) vanishes on both lines.
    const Point2& r = cone.ray1;
    const Point2& s = cone.ray2;
    Pqi q{r.y() * s.y(), -(r.y() * s.x() + r.x() * s.y()), r.x() * s.x()};
    if (q(cone.probe) < 0.0) q = {-q.a, -q.b, -q.c};
    const double n = q.norm();
    return {q.a / n, q.b / n, q.c / n};
}

bool contains(const Pqi& p, const Point2& z, double tol) {
    return p(z) >= -tol * p.norm() * z.squaredNorm();
}

Pqi pullback(const Pqi& p, const Transform2& t) {
    const Transform2 m = t.inverse();
    const double m11 = m.a, m12 = m.b, m21 = m.c, m22 = m.d;
    return {p.a * m11 * m11 + p.b * m11 * m21 + p.c * m21 * m21,
            2.0 * p.a * m11 * m12 + p.b * (m11 * m22 + m12 * m21) + 2.0 * p.c * m21 * m22,
            p.a * m12 * m12 + p.b * m12 * m22 + p.c * m22 * m22};
}

double normalized_distance(const Pqi& p, const Pqi& q) {
    const double np = p.norm(), nq = q.norm();
    const double da = p.a / np - q.a / nq, db = p.b / np - q.b / nq, dc = p.c / np - q.c / nq;
    return std::sqrt(da * da + db * db + dc * dc);
}

}  // namespace eips
