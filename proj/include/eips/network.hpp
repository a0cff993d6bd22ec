#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "eips/agent.hpp"

namespace eips {

/// Directed edges (head, tail) on vertices 0..vertex_count-1.
struct Graph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;

    [[nodiscard]] int edge_count() const { return static_cast<int>(edges.size()); }
    /// +1 at the head, -1 at the tail.
    [[nodiscard]] Eigen::MatrixXd incidence() const;
    void validate() const;

    [[nodiscard]] static Graph path(int n);
};

/// Edge controller eta' = phi(eta, zeta), mu = psi(eta, zeta).
struct ControllerSpec {
    int state_dim = 0;
    std::function<State(const State& eta, double zeta)> phi;
    std::function<double(const State& eta, double zeta)> psi;
    std::optional<ClosedFormIntegral> integral;       // Gamma(zeta)
    std::optional<ClosedFormIntegral> dual_integral;  // Gamma*(mu)
    double gain = 0.0;                                // set for static gains

    /// mu = G zeta with Gamma = G zeta^2 / 2.
    [[nodiscard]] static ControllerSpec static_gain(double g);
    [[nodiscard]] bool is_static() const { return state_dim == 0; }
};

struct IntegratorConfig {
    double dt = 1e-3;
    double horizon = 100.0;
    double window = 1.0;
    double tol = 1e-6;
    int record_stride = 100;
};

struct NetworkSpec {
    Graph graph;
    std::vector<AgentODE> agents;
    std::vector<ControllerSpec> controllers;
    std::vector<State> initial_states;
    std::vector<State> controller_states;  // empty means zero for every dynamic controller
    IntegratorConfig config;

    void validate() const;
};

struct SimResult {
    std::vector<double> time;
    /// Rows are recorded instants.
    Eigen::MatrixXd x, u, y, zeta, mu;
    bool converged = false;
    double final_rate = 0.0;
    Eigen::VectorXd x_end, u_end, y_end, zeta_end, mu_end;
};

/// Fixed-step RK4 integration of the diffusively coupled closed loop
/// zeta = E^T y, u = -E mu. Algebraic loops through feedthrough are solved
/// by Newton's method at every evaluation.
[[nodiscard]] SimResult simulate(const NetworkSpec& spec);

/// Applies T_i to agent i; controllers and initial states are kept.
[[nodiscard]] NetworkSpec apply_network_transform(const NetworkSpec& spec, const std::vector<Transform2>& ts);

}  // namespace eips
