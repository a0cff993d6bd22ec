#include "eips/agent.hpp"

#include <cmath>
#include <string>

#include "eips/error.hpp"
#include "eips/monotonize.hpp"

namespace eips {
namespace {

// Solves a u + b h(x, u) = v for u.
double solve_input(const OutputMap& h, double a, double b, const State& x, double v) {
    double u = std::abs(a) > 1e-12 ? v / a : 0.0;
    double g = a * u + b * h(x, u) - v;
    for (int it = 0; it < 60; ++it) {
        const double scale = 1.0 + std::abs(v) + std::abs(a * u);
        if (std::abs(g) <= 1e-15 * scale) break;
        const double du = 1e-6 * (1.0 + std::abs(u));
        const double slope = a + b * (h(x, u + du) - h(x, u - du)) / (2.0 * du);
        if (!std::isfinite(slope) || std::abs(slope) < 1e-14) {
            throw Error(ErrorCode::kNotRealizable, "transformed input map is singular");
        }
        double step = g / slope;
        double next = u - step, gn = a * next + b * h(x, next) - v;
        for (int k = 0; k < 30 && std::abs(gn) > std::abs(g); ++k) {
            step *= 0.5;
            next = u - step;
            gn = a * next + b * h(x, next) - v;
        }
        if (std::abs(gn) >= std::abs(g)) break;
        u = next;
        g = gn;
    }
    if (!(std::abs(g) <= 1e-9 * (1.0 + std::abs(v) + std::abs(a * u)))) {
        throw Error(ErrorCode::kNoConvergence, "could not recover the original input");
    }
    return u;
}

}  // namespace

AgentODE transform_agent(const AgentODE& agent, const Transform2& t) {
    if (t.is_identity()) return agent;
    require_invertible(t);
    if (!agent.dynamics || !agent.output) throw Error(ErrorCode::kInvalidInput, "agent has no dynamics");
    AgentODE out;
    out.name = agent.name;
    out.state_dim = agent.state_dim;
    out.equilibrium_state = agent.equilibrium_state;

    const Dynamics f = agent.dynamics;
    const OutputMap h = agent.output;
    std::function<double(const State&, double)> input_of;
    if (!agent.feedthrough) {
        if (std::abs(t.a) <= 1e-12 * (std::abs(t.b) + std::abs(t.a) + 1.0)) {
            throw Error(ErrorCode::kNotRealizable, "u~ does not depend on u for a system without feedthrough");
        }
        const ElementaryDecomposition e = decompose(t);
        input_of = [h, e](const State& x, double v) { return v / e.delta_d - e.delta_a * h(x, 0.0); };
        out.feedthrough = t.c != 0.0;
    } else {
        input_of = [h, a = t.a, b = t.b](const State& x, double v) { return solve_input(h, a, b, x, v); };
        out.feedthrough = true;
    }
    out.dynamics = [f, input_of](const State& x, double v) { return f(x, input_of(x, v)); };
    out.output = [h, input_of, c = t.c, d = t.d](const State& x, double v) {
        const double u = input_of(x, v);
        return c * u + d * h(x, u);
    };
    if (agent.steady_state) out.steady_state = transform_relation(*agent.steady_state, t);

    out.storage = agent.storage;
    if (agent.indices) {
        const Pqi q = pullback(to_pqi(*agent.indices), t);
        const double tau = q.b;
        if (tau > 0.0 && std::isfinite(tau)) {
            out.indices = PassivityIndices{-q.c / tau, -q.a / tau};
            if (agent.storage) {
                out.storage = [s = agent.storage, tau](const State& x, const State& xe) { return s(x, xe) / tau; };
            }
        }
    }
    // pure output feedback keeps a closed-form dual integral: K*(y) + beta y^2 / 2
    if (agent.dual_integral && t.a == 1.0 && t.c == 0.0 && t.d == 1.0) {
        const auto k = *agent.dual_integral;
        const double beta = t.b;
        out.dual_integral = ClosedFormIntegral{[k, beta](double y) { return k.value(y) + 0.5 * beta * y * y; },
                                               [k, beta](double y) { return k.derivative(y) + beta * y; }};
    }
    return out;
}

std::vector<Equilibrium> sample_equilibria(const AgentODE& agent, const std::vector<double>& inputs, double x_min,
                                           double x_max, int cells) {
    if (agent.state_dim != 1) {
        throw Error(ErrorCode::kDimensionMismatch, "equilibrium sampling needs a scalar state");
    }
    if (!(x_max > x_min) || cells < 1) throw Error(ErrorCode::kInvalidInput, "bad equilibrium search interval");
    std::vector<Equilibrium> out;
    State x(1);
    auto f = [&](double s, double u) {
        x(0) = s;
        return agent.dynamics(x, u)(0);
    };
    const double h = (x_max - x_min) / cells;
    for (double u : inputs) {
        double lo = x_min, flo = f(lo, u);
        for (int i = 1; i <= cells; ++i) {
            const double hi = x_min + i * h;
            const double fhi = f(hi, u);
            double root = NAN;
            if (flo == 0.0) {
                root = lo;
            } else if ((flo < 0.0) != (fhi < 0.0) && fhi != 0.0) {
                double a = lo, b = hi, fa = flo;
                for (int k = 0; k < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(a)); ++k) {
                    const double m = 0.5 * (a + b);
                    const double fm = f(m, u);
                    if (fm == 0.0) {
                        a = b = m;
                        break;
                    }
                    if ((fm < 0.0) == (fa < 0.0)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                root = 0.5 * (a + b);
            }
            if (std::isfinite(root)) {
                State xe(1);
                xe(0) = root;
                out.push_back({xe, u, agent.output(xe, u)});
            }
            lo = hi;
            flo = fhi;
        }
        if (flo == 0.0) {
            State xe(1);
            xe(0) = lo;
            out.push_back({xe, u, agent.output(xe, u)});
        }
    }
    return out;
}

double relation_residual(const AgentODE& agent) {
    if (!agent.steady_state || !agent.equilibrium_state) {
        throw Error(ErrorCode::kPreconditionFailed, "agent declares no parametrised steady state");
    }
    const auto* c = agent.steady_state->as_param_curve();
    if (c == nullptr) throw Error(ErrorCode::kWrongRepresentation, "steady state is not parametric");
    double worst = 0.0;
    for (double s : c->sigma) {
        const State x = agent.equilibrium_state(s);
        const double u = c->u_of(s);
        worst = std::max(worst, agent.dynamics(x, u).cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(agent.output(x, u) - c->y_of(s)));
    }
    return worst;
}

}  // namespace eips
