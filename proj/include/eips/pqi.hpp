#pragma once

#include <array>

#include "eips/transform.hpp"

namespace eips {

/// Quadratic inequality a*xi^2 + b*xi*chi + c*chi^2 >= 0 on the plane.
struct Pqi {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    [[nodiscard]] double operator()(const Point2& z) const {
        return a * z.x() * z.x() + b * z.x() * z.y() + c * z.y() * z.y();
    }
    [[nodiscard]] double discriminant() const { return b * b - 4.0 * a * c; }
    [[nodiscard]] double norm() const;
};

/// Equilibrium-independent passivity indices: output index rho, input index nu.
struct PassivityIndices {
    double rho = 0.0;
    double nu = 0.0;
};

/// (rho, nu) -> (-nu, 1, -rho) acting on (delta u, delta y). Throws TrivialPqi
/// when rho * nu >= 1/4.
[[nodiscard]] Pqi to_pqi(const PassivityIndices& p);

[[nodiscard]] bool is_nontrivial(const Pqi& p);
void require_nontrivial(const Pqi& p);

/// Closed double cone bounded by two lines through the origin.
struct SymmetricDoubleCone {
    Point2 ray1;   // unit, angle in [0, pi)
    Point2 ray2;   // unit, angle in [0, pi), angle(ray1) < angle(ray2)
    Point2 probe;  // unit, strictly inside

    [[nodiscard]] bool contains(const Point2& z, double tol = 1e-12) const;
};

/// Unit directions of the two boundary lines, sorted by angle in [0, pi).
[[nodiscard]] std::array<Point2, 2> boundary_rays(const Pqi& p);
[[nodiscard]] SymmetricDoubleCone solution_set(const Pqi& p);

/// Quadratic inequality whose solution set is exactly the cone (unit scale).
[[nodiscard]] Pqi pqi_from_cone(const SymmetricDoubleCone& cone);

/// Polynomial test with relative tolerance band.
[[nodiscard]] bool contains(const Pqi& p, const Point2& z, double tol = 1e-12);

/// q with q(T z) = p(z) for all z.
[[nodiscard]] Pqi pullback(const Pqi& p, const Transform2& t);

/// Coefficient vectors agree after normalisation to unit length.
[[nodiscard]] double normalized_distance(const Pqi& p, const Pqi& q);

}  // namespace eips
