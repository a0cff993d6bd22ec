#pragma once

#include <Eigen/Core>

namespace eips {

using Point2 = Eigen::Vector2d;

/// Invertible linear map on the (u, y) plane:
/// [u~; y~] = [[a, b], [c, d]] [u; y].
struct Transform2 {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 1.0;

    [[nodiscard]] static Transform2 identity() { return {}; }
    [[nodiscard]] static Transform2 from_matrix(const Eigen::Matrix2d& m);

    [[nodiscard]] Eigen::Matrix2d matrix() const;
    [[nodiscard]] double det() const { return a * d - b * c; }
    [[nodiscard]] bool is_invertible() const;
    [[nodiscard]] bool is_identity(double tol = 0.0) const;

    /// Throws SingularTransform when not invertible.
    [[nodiscard]] Transform2 inverse() const;
    [[nodiscard]] Point2 apply(const Point2& p) const;
    [[nodiscard]] Point2 apply(double u, double y) const { return apply(Point2(u, y)); }

    friend Transform2 operator*(const Transform2& l, const Transform2& r);
};

void require_invertible(const Transform2& t);

}  // namespace eips
