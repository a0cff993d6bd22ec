#include "eips/agents.hpp"

#include <cmath>

#include "eips/error.hpp"

namespace eips {
namespace {

State scalar(double v) {
    State x(1);
    x(0) = v;
    return x;
}

double half_square(const State& x, const State& xe) { return 0.5 * (x - xe).squaredNorm(); }

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

}  // namespace

AgentODE first_order_agent(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::kInvalidInput, "first-order rate must be positive");
    AgentODE ag;
    ag.name = "first-order";
    ag.dynamics = [a](const State& x, double u) { return State(scalar(-a * x(0) + u)); };
    ag.output = [](const State& x, double) { return x(0); };
    ag.storage = half_square;
    ag.indices = PassivityIndices{a, 0.0};
    ag.steady_state = PlanarRelation::param_curve(
        linspace(-20.0, 20.0, kRelationPoints), [a](double s) { return a * s; }, [](double s) { return s; });
    ag.equilibrium_state = [](double s) { return scalar(s); };
    ag.integral = ClosedFormIntegral{[a](double u) { return 0.5 * u * u / a; }, [a](double u) { return u / a; }};
    ag.dual_integral = ClosedFormIntegral{[a](double y) { return 0.5 * a * y * y; }, [a](double y) { return a * y; }};
    ag.structure = InputAffineFlags{true, true, false};
    return ag;
}

AgentODE shifted_agent(double c) {
    AgentODE ag;
    ag.name = "shifted";
    ag.dynamics = [c](const State& x, double u) { return State(scalar(-(x(0) - c) + u)); };
    ag.output = [](const State& x, double) { return x(0); };
    ag.storage = half_square;
    ag.indices = PassivityIndices{1.0, 0.0};
    ag.steady_state = PlanarRelation::param_curve(
        linspace(-20.0, 20.0, kRelationPoints), [c](double s) { return s - c; }, [](double s) { return s; });
    ag.equilibrium_state = [](double s) { return scalar(s); };
    ag.integral = ClosedFormIntegral{[c](double u) { return 0.5 * u * u + c * u; }, [c](double u) { return u + c; }};
    ag.dual_integral =
        ClosedFormIntegral{[c](double y) { return 0.5 * (y - c) * (y - c); }, [c](double y) { return y - c; }};
    ag.structure = InputAffineFlags{true, true, false};
    return ag;
}

AgentODE gradient_agent(double r1, double r2) {
    if (!(r1 > 0.0) || !(r2 > 0.0)) throw Error(ErrorCode::kInvalidInput, "gradient agent needs r1, r2 > 0");
    AgentODE ag;
    ag.name = "gradient";
    ag.dynamics = [r1, r2](const State& x, double u) {
        return State(scalar(-(r1 * std::sin(x(0)) + r2 * x(0)) + u));
    };
    ag.output = [](const State& x, double) { return x(0); };
    ag.storage = half_square;
    ag.indices = PassivityIndices{r2 - r1, 0.0};
    ag.steady_state = PlanarRelation::param_curve(
        linspace(-40.0, 40.0, kRelationPoints), [r1, r2](double s) { return r1 * std::sin(s) + r2 * s; },
        [](double s) { return s; });
    ag.equilibrium_state = [](double s) { return scalar(s); };
    ag.dual_integral = ClosedFormIntegral{
        [r1, r2](double y) { return r1 * (1.0 - std::cos(y)) + 0.5 * r2 * y * y; },
        [r1, r2](double y) { return r1 * std::sin(y) + r2 * y; }};
    ag.structure = InputAffineFlags{true, true, false};
    return ag;
}

AgentODE cubic_output_agent() {
    AgentODE ag;
    ag.name = "cubic-output";
    ag.dynamics = [](const State& x, double u) { return State(scalar(-x(0) + std::cbrt(x(0)) + u)); };
    ag.output = [](const State& x, double) { return std::cbrt(x(0)); };
    ag.indices = PassivityIndices{-1.0, 0.0};
    ag.steady_state = PlanarRelation::param_curve(
        linspace(-20.0, 20.0, kRelationPoints), [](double s) { return s * s * s - s; }, [](double s) { return s; });
    ag.equilibrium_state = [](double s) { return scalar(s * s * s); };
    ag.dual_integral = ClosedFormIntegral{[](double y) { return 0.25 * y * y * y * y - 0.5 * y * y; },
                                          [](double y) { return y * y * y - y; }};
    ag.structure = InputAffineFlags{true, true, false};
    return ag;
}

AgentODE cubic_input_agent() {
    AgentODE ag;
    ag.name = "cubic-input";
    ag.feedthrough = true;
    ag.dynamics = [](const State& x, double u) { return State(scalar(-std::cbrt(x(0)) + u)); };
    ag.output = [](const State& x, double u) { return x(0) - u; };
    ag.indices = PassivityIndices{0.0, -1.0};
    ag.steady_state = PlanarRelation::param_curve(
        linspace(-20.0, 20.0, kRelationPoints), [](double s) { return s; }, [](double s) { return s * s * s - s; });
    ag.equilibrium_state = [](double s) { return scalar(s * s * s); };
    ag.integral = ClosedFormIntegral{[](double u) { return 0.25 * u * u * u * u - 0.5 * u * u; },
                                     [](double u) { return u * u * u - u; }};
    ag.structure = InputAffineFlags{true, false, false};
    return ag;
}

AgentODE shortage_agent() {
    AgentODE ag;
    ag.name = "shortage";
    ag.feedthrough = true;
    ag.dynamics = [](const State& x, double u) {
        return State(scalar(-std::cbrt(x(0)) + 0.5 * x(0) + 0.5 * u));
    };
    ag.output = [](const State& x, double u) { return 0.5 * x(0) - 0.5 * u; };
    ag.storage = [](const State& x, const State& xe) { return (x - xe).squaredNorm() / 6.0; };
    ag.indices = PassivityIndices{-2.0 / 3.0, -1.0 / 3.0};
    ag.steady_state = PlanarRelation::param_curve(
        linspace(-3.0, 3.0, kRelationPoints), [](double s) { return 2.0 * s - s * s * s; },
        [](double s) { return s * s * s - s; });
    ag.equilibrium_state = [](double s) { return scalar(s * s * s); };
    ag.structure = InputAffineFlags{true, false, false};
    return ag;
}

AgentODE make_agent(const std::string& kind, const std::map<std::string, double>& params) {
    if (kind == "first-order") return first_order_agent(param(params, "a", 1.0));
    if (kind == "shifted") return shifted_agent(param(params, "c", 0.0));
    if (kind == "gradient") return gradient_agent(param(params, "r1", 2.5), param(params, "r2", 0.1));
    if (kind == "cubic-output") return cubic_output_agent();
    if (kind == "cubic-input") return cubic_input_agent();
    if (kind == "shortage") return shortage_agent();
    throw Error(ErrorCode::kInvalidInput, "unknown agent kind '" + kind + "'");
}

}  // namespace eips
