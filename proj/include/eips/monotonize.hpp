#pragma once

#include <array>
#include <string_view>

#include "eips/pqi.hpp"
#include "eips/transform.hpp"

namespace eips {

/// Boundary-line representatives of a cone, oriented so that the cone is swept
/// counter-clockwise from `start` to `end`. Each line is scaled to (tau, 1),
/// or (1, 0) for the horizontal line; det[start end] > 0 and start + end lies
/// inside the cone.
struct ConeGenerators {
    Point2 start;
    Point2 end;
};

[[nodiscard]] ConeGenerators cone_generators(const Pqi& p);

/// T1 = [r3 r4][r1 r2]^-1 and T2 = [r3 -r4][r1 r2]^-1.
[[nodiscard]] std::array<Transform2, 2> candidate_transforms(const Point2& r1, const Point2& r2,
                                                             const Point2& r3, const Point2& r4);

/// Picks T1 when p(r1 + r2) and q(r3 + r4) share a sign, T2 otherwise.
[[nodiscard]] Transform2 select_candidate(const Pqi& source, const Pqi& target, const Point2& r1,
                                          const Point2& r2, const Point2& r3, const Point2& r4);

/// T with T(solution set of source) = solution set of target.
[[nodiscard]] Transform2 mapping_transform(const Pqi& source, const Pqi& target);

/// Transform that takes systems with indices `source` to indices `target`.
[[nodiscard]] Transform2 passivize(const PassivityIndices& source,
                                   const PassivityIndices& target = {0.0, 0.0});

enum class Stage { kOutputFeedback, kPostGain, kInputFeedthrough, kPreGain };

[[nodiscard]] std::string_view stage_label(Stage s) noexcept;

/// T (P) = L_D L_C L_B L_A, with P the column swap when column_swapped is set.
struct ElementaryDecomposition {
    double delta_a = 0.0;  // output feedback
    double delta_b = 1.0;  // post-gain
    double delta_c = 0.0;  // input feedthrough
    double delta_d = 1.0;  // pre-gain
    bool column_swapped = false;

    [[nodiscard]] Transform2 product() const;
    /// product() with the column swap undone; equals the decomposed T.
    [[nodiscard]] Transform2 reconstruct() const;
    [[nodiscard]] std::array<std::pair<Stage, double>, 4> stages() const;
};

[[nodiscard]] ElementaryDecomposition decompose(const Transform2& t);

}  // namespace eips
