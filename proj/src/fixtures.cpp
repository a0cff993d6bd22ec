#include "eips/fixtures.hpp"

#include <algorithm>

#include "eips/agents.hpp"
#include "eips/error.hpp"
#include "eips/random.hpp"

namespace eips {

NetworkSpec gradient_network(std::uint64_t seed, int n, double gain, double r1, double r2) {
    if (n < 1) throw Error(ErrorCode::kInvalidInput, "network needs at least one agent");
    NetworkSpec s;
    s.graph = Graph::path(n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        s.agents.push_back(gradient_agent(r1, r2));
        State x(1);
        x(0) = rng.uniform(-10.0, 10.0);
        s.initial_states.push_back(x);
    }
    for (int k = 0; k + 1 < n; ++k) s.controllers.push_back(ControllerSpec::static_gain(gain));
    return s;
}

NetworkSpec quadratic_network(const std::vector<double>& centers, const std::vector<double>& gains) {
    const int n = static_cast<int>(centers.size());
    if (n < 1 || gains.size() + 1 != centers.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "a path of n agents needs n - 1 gains");
    }
    NetworkSpec s;
    s.graph = Graph::path(n);
    for (double c : centers) {
        s.agents.push_back(shifted_agent(c));
        s.initial_states.push_back(State::Zero(1));
    }
    for (double g : gains) s.controllers.push_back(ControllerSpec::static_gain(g));
    return s;
}

int cluster_count(const Eigen::VectorXd& values, double separation) {
    if (values.size() == 0) return 0;
    std::vector<double> v(values.data(), values.data() + values.size());
    std::sort(v.begin(), v.end());
    int groups = 1;
    for (std::size_t i = 1; i < v.size(); ++i) groups += v[i] - v[i - 1] > separation ? 1 : 0;
    return groups;
}

}  // namespace eips
