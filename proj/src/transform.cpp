#include "eips/transform.hpp"

#include <cmath>

#include "eips/error.hpp"

namespace eips {

Transform2 Transform2::from_matrix(const Eigen::Matrix2d& m) {
    return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

Eigen::Matrix2d Transform2::matrix() const {
    Eigen::Matrix2d m;
    m << a, b, c, d;
    return m;
}

bool Transform2::is_invertible() const {
    const double scale = a * a + b * b + c * c + d * d;
    return std::isfinite(det()) && std::abs(det()) > 1e-12 * scale;
}

bool Transform2::is_identity(double tol) const {
    return std::abs(a - 1.0) <= tol && std::abs(b) <= tol && std::abs(c) <= tol &&
           std::abs(d - 1.0) <= tol;
}

Transform2 Transform2::inverse() const {
    require_invertible(*this);
    const double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
}

Point2 Transform2::apply(const Point2& p) const {
    return {a * p.x() + b * p.y(), c * p.x() + d * p.y()};
}

Transform2 operator*(const Transform2& l, const Transform2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
            l.c * r.b + l.d * r.d};
}

void require_invertible(const Transform2& t) {
    if (!t.is_invertible()) {
        throw Error(ErrorCode::kSingularTransform, "transform is singular (det = " +
                                                       std::to_string(t.det()) + ")");
    }
}

}  // namespace eips
