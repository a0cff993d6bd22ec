#pragma once

#include <cstdint>
#include <vector>

#include "eips/agent.hpp"

namespace eips {

struct PassivationOptions {
    int trials = 100;
    int equilibria = 20;
    double state_min = -5.0;
    double state_max = 5.0;
    /// Transformed inputs at which equilibria are searched.
    std::vector<double> input_grid = linspace(-2.0, 2.0, 41);
    /// Half-width of the random piecewise-constant input around the equilibrium input.
    double input_amplitude = 2.0;
    double switch_period = 0.25;
    double duration = 2.0;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    double tolerance = 1e-6;
    StorageFn storage;  // overrides the transported storage when set
};

struct PassivationReport {
    double max_violation = 0.0;
    int trials = 0;
    int equilibria = 0;
    int worst_trial = -1;
    bool passed = false;
};

/// Simulates random trajectories of the transformed agent and reports the worst
/// value of dS/dt - s(du, dy), where s is the target supply rate
/// -nu' du^2 + du dy - rho' dy^2 about a sampled equilibrium.
[[nodiscard]] PassivationReport verify_passivation(const AgentODE& agent, const Transform2& t,
                                                   const PassivityIndices& target,
                                                   const PassivationOptions& opts = {});

}  // namespace eips
