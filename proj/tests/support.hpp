#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "eips/pqi.hpp"
#include "eips/random.hpp"

namespace eips::testing {

inline Pqi random_pqi(Rng& rng, double min_relative_discriminant = 1e-3) {
    for (;;) {
        Pqi p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double n2 = p.a * p.a + p.b * p.b + p.c * p.c;
        if (p.discriminant() > min_relative_discriminant * n2) return p;
    }
}

inline Point2 random_point(Rng& rng, double scale = 10.0) {
    return {rng.uniform(-scale, scale), rng.uniform(-scale, scale)};
}

// Boundary directions found by scanning the unit half-circle for sign changes
// of the quadratic form and bisecting each bracket.
inline std::vector<double> scanned_boundary_angles(const Pqi& p, int samples = 200000) {
    auto f = [&](double t) { return p(Point2(std::cos(t), std::sin(t))); };
    std::vector<double> out;
    const double h = std::numbers::pi / samples;
    double prev = f(0.0);
    if (prev == 0.0) out.push_back(0.0);
    for (int i = 1; i <= samples; ++i) {
        const double t = i * h;
        const double cur = f(t);
        if (cur == 0.0 && i < samples) {
            out.push_back(t);
        } else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
            double lo = t - h, hi = t;
            for (int k = 0; k < 80; ++k) {
                const double mid = 0.5 * (lo + hi);
                ((f(mid) < 0.0) == (f(lo) < 0.0) ? lo : hi) = mid;
            }
            if (i < samples || f(0.0) != 0.0) out.push_back(0.5 * (lo + hi));
        }
        prev = cur;
    }
    return out;
}

}  // namespace eips::testing
