#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "eips/network.hpp"

namespace eips {

/// Seed for the gradient-network initial states; found by a pilot sweep to
/// give a clustered terminal state for the untransformed network.
inline constexpr std::uint64_t kGradientSeed = 13;

/// n gradient agents on a path graph with static gains, initial states
/// uniform in [-10, 10] drawn from the seed.
[[nodiscard]] NetworkSpec gradient_network(std::uint64_t seed = kGradientSeed, int n = 5, double gain = 1.0,
                                           double r1 = 2.5, double r2 = 0.1);

/// Agents with K*_i(y) = (y - c_i)^2 / 2 on a path graph with the given edge gains.
[[nodiscard]] NetworkSpec quadratic_network(const std::vector<double>& centers, const std::vector<double>& gains);

/// Number of groups after splitting the sorted values at gaps larger than separation.
[[nodiscard]] int cluster_count(const Eigen::VectorXd& values, double separation = 1.0);

}  // namespace eips
