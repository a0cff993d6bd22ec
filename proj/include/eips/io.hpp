#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eips/network.hpp"
#include "eips/relation.hpp"

namespace eips {

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_number(double v);

/// FNV-1a 64-bit digest, rendered as 16 hex digits.
[[nodiscard]] std::string fnv1a_hex(std::string_view bytes);

struct LoadedNetwork {
    NetworkSpec spec;
    std::vector<Transform2> transforms;  // empty when the document declares none
    std::optional<std::uint64_t> seed;
};

/// Reads a network document:
///   graph: {vertices, edges: [[head, tail], ...]}
///   agents: [{kind, params: {...}, x0: [...]}] or agent: {kind, params} with count = vertices
///   controllers: [{gain}] or gain (one static gain for every edge)
///   initial: {seed, low, high} draws x0 uniformly when agents omit it
///   transform: [a, b, c, d] for every agent, or transforms: [[a, b, c, d], ...]
///   integrator: {dt, horizon, window, tol, record_stride}
[[nodiscard]] LoadedNetwork parse_network(std::string_view json_text);
[[nodiscard]] LoadedNetwork load_network(const std::string& path);

/// Time-major CSV: t, x*, u*, y*, zeta*, mu*.
void write_trajectories_csv(std::ostream& os, const SimResult& r);
/// u, y columns in parameter order.
void write_relation_csv(std::ostream& os, const PlanarRelation& k);
/// x, value, derivative.
void write_integral_csv(std::ostream& os, const IntegralFunction& f, std::string_view abscissa);

/// JSON summary of a simulation run.
[[nodiscard]] std::string simulation_summary_json(const SimResult& r);

}  // namespace eips
