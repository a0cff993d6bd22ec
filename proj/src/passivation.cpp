#include "eips/passivation.hpp"

#include <algorithm>
#include <cmath>

#include "eips/error.hpp"
#include "eips/random.hpp"

namespace eips {
namespace {

double storage_rate(const StorageFn& s, const State& x, const State& xe, const State& dx) {
    double rate = 0.0;
    State xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-5 * (1.0 + std::abs(x(i)));
        xp(i) = x(i) + h;
        xm(i) = x(i) - h;
        rate += (s(xp, xe) - s(xm, xe)) / (2.0 * h) * dx(i);
        xp(i) = xm(i) = x(i);
    }
    return rate;
}

}  // namespace

PassivationReport verify_passivation(const AgentODE& agent, const Transform2& t, const PassivityIndices& target,
                                     const PassivationOptions& opts) {
    if (opts.trials < 1 || opts.equilibria < 1 || !(opts.dt > 0.0) || !(opts.duration > 0.0)) {
        throw Error(ErrorCode::kInvalidInput, "bad passivation check options");
    }
    const AgentODE sys = transform_agent(agent, t);
    const StorageFn storage = opts.storage ? opts.storage : sys.storage;
    if (!storage) throw Error(ErrorCode::kNoStorageFunction, "no storage function supplied for " + agent.name);

    const std::vector<Equilibrium> found = sample_equilibria(sys, opts.input_grid, opts.state_min, opts.state_max);
    if (found.empty()) throw Error(ErrorCode::kPreconditionFailed, "no equilibria found on the input grid");
    std::vector<Equilibrium> eqs;
    const int n_eq = std::min<int>(opts.equilibria, static_cast<int>(found.size()));
    for (int k = 0; k < n_eq; ++k) {
        const std::size_t idx = n_eq == 1 ? 0 : k * (found.size() - 1) / (n_eq - 1);
        eqs.push_back(found[idx]);
    }

    Rng rng(opts.seed);
    PassivationReport report;
    report.trials = opts.trials;
    report.equilibria = n_eq;
    report.max_violation = -std::numeric_limits<double>::infinity();
    const int steps = static_cast<int>(std::ceil(opts.duration / opts.dt));
    const int hold = std::max(1, static_cast<int>(std::lround(opts.switch_period / opts.dt)));

    for (int trial = 0; trial < opts.trials; ++trial) {
        const Equilibrium& eq = eqs[trial % n_eq];
        State x = eq.x;
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(opts.state_min, opts.state_max);
        double v = eq.u;
        double worst = -std::numeric_limits<double>::infinity();
        for (int k = 0; k <= steps; ++k) {
            if (k % hold == 0) v = eq.u + rng.uniform(-opts.input_amplitude, opts.input_amplitude);
            const State dx = sys.dynamics(x, v);
            const double y = sys.output(x, v);
            const double du = v - eq.u, dy = y - eq.y;
            const double supply = -target.nu * du * du + du * dy - target.rho * dy * dy;
            const double gap = storage_rate(storage, x, eq.x, dx) - supply;
            if (!std::isfinite(gap)) throw Error(ErrorCode::kNonFiniteState, "non-finite dissipation residual");
            worst = std::max(worst, gap);
            if (k == steps) break;
            const State k1 = dx;
            const State k2 = sys.dynamics(x + 0.5 * opts.dt * k1, v);
            const State k3 = sys.dynamics(x + 0.5 * opts.dt * k2, v);
            const State k4 = sys.dynamics(x + opts.dt * k3, v);
            x += opts.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!x.allFinite()) throw Error(ErrorCode::kNonFiniteState, "trajectory diverged");
        }
        if (worst > report.max_violation) {
            report.max_violation = worst;
            report.worst_trial = trial;
        }
    }
    report.passed = report.max_violation <= opts.tolerance;
    return report;
}

}  // namespace eips
