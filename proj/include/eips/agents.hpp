#pragma once

#include <map>
#include <string>

#include "eips/agent.hpp"

namespace eips {

/// Default number of relation samples for the catalogue agents.
inline constexpr std::size_t kRelationPoints = 4001;

/// x' = -a x + u, y = x. EI-OP(a) with S = (x - x_eq)^2 / 2.
[[nodiscard]] AgentODE first_order_agent(double a);

/// x' = -(x - c) + u, y = x. K*(y) = (y - c)^2 / 2.
[[nodiscard]] AgentODE shifted_agent(double c);

/// x' = -(r1 sin x + r2 x) + u, y = x. EI-OP(r2 - r1).
[[nodiscard]] AgentODE gradient_agent(double r1, double r2);

/// x' = -x + cbrt(x) + u, y = cbrt(x). EI-OP(-1), K*(y) = y^4/4 - y^2/2.
[[nodiscard]] AgentODE cubic_output_agent();

/// x' = -cbrt(x) + u, y = x - u. EI-IP(-1), K(u) = u^4/4 - u^2/2.
[[nodiscard]] AgentODE cubic_input_agent();

/// x' = -cbrt(x) + x/2 + u/2, y = x/2 - u/2. EI-IOP(-2/3, -1/3) with S = (x - x_eq)^2 / 6.
[[nodiscard]] AgentODE shortage_agent();

/// Builds a catalogue agent by name: first-order (a), shifted (c), gradient (r1, r2),
/// cubic-output, cubic-input, shortage. Missing parameters take the defaults above.
[[nodiscard]] AgentODE make_agent(const std::string& kind, const std::map<std::string, double>& params = {});

}  // namespace eips
