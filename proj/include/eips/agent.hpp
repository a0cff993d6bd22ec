#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eips/pqi.hpp"
#include "eips/relation.hpp"
#include "eips/transform.hpp"

namespace eips {

using State = Eigen::VectorXd;
using Dynamics = std::function<State(const State& x, double u)>;
using OutputMap = std::function<double(const State& x, double u)>;
using StorageFn = std::function<double(const State& x, const State& x_eq)>;

struct ClosedFormIntegral {
    ScalarMap value;
    ScalarMap derivative;
};

/// SISO agent x' = f(x, u), y = h(x, u).
struct AgentODE {
    std::string name;
    int state_dim = 1;
    Dynamics dynamics;
    OutputMap output;
    bool feedthrough = false;

    StorageFn storage;  // optional, empty when unknown
    std::optional<PassivityIndices> indices;
    std::optional<PlanarRelation> steady_state;
    /// sigma -> equilibrium state for the parametrised steady-state relation
    std::function<State(double)> equilibrium_state;
    std::optional<ClosedFormIntegral> integral;       // K(u)
    std::optional<ClosedFormIntegral> dual_integral;  // K*(y)
    std::optional<InputAffineFlags> structure;
};

/// Loop-transformed agent with input u~ = a u + b y and output y~ = c u + d y.
/// Declared data is transported: the relation through T, the indices and the
/// storage (scaled by 1/tau) when the pulled-back PQI has b' = tau > 0.
[[nodiscard]] AgentODE transform_agent(const AgentODE& agent, const Transform2& t);

struct Equilibrium {
    State x;
    double u = 0.0;
    double y = 0.0;
};

/// Scalar-state equilibria: for every input on the grid, every sign change of
/// f(., u) on [x_min, x_max] is bisected.
[[nodiscard]] std::vector<Equilibrium> sample_equilibria(const AgentODE& agent, const std::vector<double>& inputs,
                                                         double x_min, double x_max, int cells = 2000);

/// Largest residual of f(x(sigma), u(sigma)) = 0 and h(x(sigma), u(sigma)) = y(sigma)
/// over the relation grid. Needs a parametric relation and equilibrium_state.
[[nodiscard]] double relation_residual(const AgentODE& agent);

}  // namespace eips
