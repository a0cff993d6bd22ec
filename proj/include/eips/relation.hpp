#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "eips/monotonize.hpp"
#include "eips/transform.hpp"

namespace eips {

using ScalarMap = std::function<double(double)>;

/// sigma -> (u(sigma), y(sigma)) evaluated on a strictly increasing grid.
struct ParamCurve {
    std::vector<double> sigma;
    ScalarMap u_of;
    ScalarMap y_of;
    bool unbounded_low = true;
    bool unbounded_high = true;
};

struct SampledRelation {
    std::vector<Point2> points;
};

enum class MapDirection { kInputToOutput, kOutputToInput };

/// y = f(u) or u = f(y) on a grid of the free variable.
struct ClosedFormRelation {
    ScalarMap map;
    MapDirection direction = MapDirection::kInputToOutput;
    std::vector<double> grid;
};

enum class RelationKind { kParamCurve, kSampled, kClosedForm };

/// Steady-state input-output relation of a system, a subset of the (u, y) plane.
class PlanarRelation {
public:
    using Rep = std::variant<ParamCurve, SampledRelation, ClosedFormRelation>;

    [[nodiscard]] static PlanarRelation param_curve(std::vector<double> sigma, ScalarMap u_of,
                                                    ScalarMap y_of, bool unbounded_low = true,
                                                    bool unbounded_high = true);
    /// Points are de-duplicated; order is kept.
    [[nodiscard]] static PlanarRelation sampled(std::vector<Point2> points);
    [[nodiscard]] static PlanarRelation closed_form(ScalarMap map, MapDirection direction,
                                                    std::vector<double> grid);

    [[nodiscard]] RelationKind kind() const;
    [[nodiscard]] const Rep& rep() const { return rep_; }
    [[nodiscard]] const ParamCurve* as_param_curve() const { return std::get_if<ParamCurve>(&rep_); }

    /// Points in parameter order.
    [[nodiscard]] std::vector<Point2> samples() const;
    /// The same set with u and y exchanged.
    [[nodiscard]] PlanarRelation inverse() const;

private:
    explicit PlanarRelation(Rep rep) : rep_(std::move(rep)) {}
    Rep rep_;
};

[[nodiscard]] std::string_view kind_name(RelationKind k) noexcept;

/// Image of the relation under T. Parametric and closed-form inputs give a
/// parametric curve over the same grid; sampled input stays sampled.
[[nodiscard]] PlanarRelation transform_relation(const PlanarRelation& k, const Transform2& t);

/// One elementary stage; closed forms are kept where the stage allows it.
[[nodiscard]] PlanarRelation apply_stage(const PlanarRelation& k, Stage stage, double delta);

/// Composition of the elementary stages (with the column swap applied first
/// when present). Agrees pointwise with transform_relation.
[[nodiscard]] PlanarRelation compose_via_stages(const PlanarRelation& k,
                                                const ElementaryDecomposition& e);

enum class IntegralOf { kK, kKInverse };

/// Anchored primitive of a single-valued branch of the relation, sampled on a
/// grid. value() and derivative() interpolate linearly and extrapolate with the
/// end slope.
struct IntegralFunction {
    std::vector<double> grid;
    std::vector<double> values;       // values.front() == 0
    std::vector<double> derivatives;  // a subgradient at each node
    double anchor = 0.0;              // constant removed by anchoring
    bool convex = false;

    [[nodiscard]] double value(double x) const;
    [[nodiscard]] double derivative(double x) const;
};

/// Cumulative trapezoid of k (abscissa u) or of k^-1 (abscissa y). Throws
/// MultiValued if the abscissa is not monotone along the parameter. With a
/// grid, the ordinate is first interpolated onto the part of the grid inside
/// the relation's range.
[[nodiscard]] IntegralFunction integral_function(const PlanarRelation& k, IntegralOf which,
                                                 const std::vector<double>* grid = nullptr);

/// Discrete conjugate max_i (x_i y - F(x_i)) on the dual grid, anchored.
[[nodiscard]] IntegralFunction legendre(const IntegralFunction& f, const std::vector<double>& dual_grid);

/// Certificate computed from slopes of the sampled values.
[[nodiscard]] bool convexity_certificate(const std::vector<double>& grid,
                                         const std::vector<double>& values);

[[nodiscard]] bool is_monotone(const PlanarRelation& k, bool strict = false, double tol = 1e-9);

struct CursivityOptions {
    double jump_ratio = 10.0;
    double self_distance_factor = 0.25;
    double tail_fraction = 0.1;
    double growth_factor = 1.5;
};

/// Structural information about an input-affine system, used to report
/// whether the sufficient condition for cursiveness applies.
struct InputAffineFlags {
    bool dynamics_affine_in_input = false;
    bool output_independent_of_input = false;
    bool input_determined_by_state = false;
};

struct CursivityReport {
    bool continuous = false;
    bool diverges_low = false;
    bool diverges_high = false;
    bool non_self_intersecting = false;
    double max_jump_ratio = 0.0;
    std::size_t self_intersections = 0;
    std::optional<bool> input_affine_condition;

    [[nodiscard]] bool cursive() const {
        return continuous && diverges_low && diverges_high && non_self_intersecting;
    }
    /// Numerical evidence only; never a proof.
    [[nodiscard]] std::string_view verdict() const {
        return cursive() ? "numerically supported" : "not supported";
    }
};

/// Requires a parametric curve (WrongRepresentation otherwise).
[[nodiscard]] CursivityReport is_cursive(const PlanarRelation& k, const CursivityOptions& opts = {},
                                         const std::optional<InputAffineFlags>& flags = std::nullopt);

struct MaximalMonotoneReport {
    bool monotone = false;
    CursivityReport cursivity;
    [[nodiscard]] bool supported() const { return monotone && cursivity.cursive(); }
};

[[nodiscard]] MaximalMonotoneReport is_maximal_monotone(const PlanarRelation& k);

[[nodiscard]] std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace eips
