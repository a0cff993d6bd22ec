#include "eips/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "eips/error.hpp"

namespace eips {

Eigen::MatrixXd Graph::incidence() const {
    validate();
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(vertex_count, edge_count());
    for (int k = 0; k < edge_count(); ++k) {
        e(edges[k].first, k) = 1.0;
        e(edges[k].second, k) = -1.0;
    }
    return e;
}

void Graph::validate() const {
    if (vertex_count < 0) throw Error(ErrorCode::kInvalidInput, "negative vertex count");
    for (const auto& [h, t] : edges) {
        if (h < 0 || t < 0 || h >= vertex_count || t >= vertex_count) {
            throw Error(ErrorCode::kDimensionMismatch, "edge endpoint out of range");
        }
        if (h == t) throw Error(ErrorCode::kInvalidInput, "self-loop edge");
    }
}

Graph Graph::path(int n) {
    Graph g;
    g.vertex_count = n;
    for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
    return g;
}

ControllerSpec ControllerSpec::static_gain(double g) {
    if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorCode::kNonpositiveGain, "static gain must be positive");
    ControllerSpec c;
    c.gain = g;
    c.psi = [g](const State&, double z) { return g * z; };
    c.integral = ClosedFormIntegral{[g](double z) { return 0.5 * g * z * z; }, [g](double z) { return g * z; }};
    c.dual_integral =
        ClosedFormIntegral{[g](double m) { return 0.5 * m * m / g; }, [g](double m) { return m / g; }};
    return c;
}

void NetworkSpec::validate() const {
    graph.validate();
    const auto n = static_cast<std::size_t>(graph.vertex_count);
    if (agents.size() != n || initial_states.size() != n) {
        throw Error(ErrorCode::kDimensionMismatch, "agents and initial states must match the vertex count");
    }
    if (controllers.size() != graph.edges.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "one controller per edge is required");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (initial_states[i].size() != agents[i].state_dim) {
            throw Error(ErrorCode::kDimensionMismatch, "initial state " + std::to_string(i) + " has wrong size");
        }
        if (!agents[i].dynamics || !agents[i].output) {
            throw Error(ErrorCode::kInvalidInput, "agent " + std::to_string(i) + " has no dynamics");
        }
    }
    if (!controller_states.empty() && controller_states.size() != controllers.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "controller states must match the edge count");
    }
    for (std::size_t k = 0; k < controllers.size(); ++k) {
        const auto& c = controllers[k];
        if (!c.psi || (c.state_dim > 0 && !c.phi)) {
            throw Error(ErrorCode::kInvalidInput, "controller " + std::to_string(k) + " is incomplete");
        }
        if (!controller_states.empty() && controller_states[k].size() != c.state_dim) {
            throw Error(ErrorCode::kDimensionMismatch, "controller state " + std::to_string(k) + " has wrong size");
        }
    }
    const auto& cfg = config;
    if (!(cfg.dt > 0.0) || !(cfg.horizon > 0.0) || !(cfg.window >= 0.0) || cfg.record_stride < 1) {
        throw Error(ErrorCode::kInvalidInput, "bad integrator configuration");
    }
}

namespace {

class ClosedLoop {
public:
    explicit ClosedLoop(const NetworkSpec& spec)
        : spec_(spec), e_(spec.graph.incidence()), et_(e_.transpose()) {
        const int n = spec.graph.vertex_count;
        for (int i = 0; i < n; ++i) {
            offsets_.push_back(dim_);
            dim_ += spec.agents[i].state_dim;
            loop_ = loop_ || spec.agents[i].feedthrough;
        }
        for (const auto& c : spec.controllers) {
            offsets_.push_back(dim_);
            dim_ += c.state_dim;
        }
        offsets_.push_back(dim_);
    }

    [[nodiscard]] Eigen::Index dim() const { return dim_; }

    [[nodiscard]] Eigen::VectorXd initial() const {
        Eigen::VectorXd z(dim_);
        const int n = spec_.graph.vertex_count;
        for (int i = 0; i < n; ++i) z.segment(offsets_[i], spec_.agents[i].state_dim) = spec_.initial_states[i];
        for (std::size_t k = 0; k < spec_.controllers.size(); ++k) {
            const int d = spec_.controllers[k].state_dim;
            z.segment(offsets_[n + k], d) =
                spec_.controller_states.empty() ? State(State::Zero(d)) : spec_.controller_states[k];
        }
        return z;
    }

    struct Signals {
        Eigen::VectorXd u, y, zeta, mu;
    };

    // Outputs and couplings consistent with the stacked state.
    [[nodiscard]] Signals signals(const Eigen::VectorXd& z) const {
        const int n = spec_.graph.vertex_count;
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = spec_.agents[i].output(agent_state(z, i), 0.0);
        if (loop_) y = solve_loop(z, y);
        return couple(z, y);
    }

    [[nodiscard]] Eigen::VectorXd rate(const Eigen::VectorXd& z, const Signals& s) const {
        Eigen::VectorXd dz(dim_);
        const int n = spec_.graph.vertex_count;
        for (int i = 0; i < n; ++i) {
            dz.segment(offsets_[i], spec_.agents[i].state_dim) = spec_.agents[i].dynamics(agent_state(z, i), s.u(i));
        }
        for (std::size_t k = 0; k < spec_.controllers.size(); ++k) {
            const auto& c = spec_.controllers[k];
            if (c.state_dim > 0) {
                dz.segment(offsets_[n + k], c.state_dim) = c.phi(controller_state(z, k), s.zeta(k));
            }
        }
        return dz;
    }

    [[nodiscard]] Eigen::VectorXd rate(const Eigen::VectorXd& z) const { return rate(z, signals(z)); }

private:
    [[nodiscard]] State agent_state(const Eigen::VectorXd& z, int i) const {
        return z.segment(offsets_[i], spec_.agents[i].state_dim);
    }
    [[nodiscard]] State controller_state(const Eigen::VectorXd& z, std::size_t k) const {
        return z.segment(offsets_[spec_.graph.vertex_count + k], spec_.controllers[k].state_dim);
    }

    [[nodiscard]] Signals couple(const Eigen::VectorXd& z, const Eigen::VectorXd& y) const {
        Signals s;
        s.y = y;
        s.zeta = et_ * y;
        s.mu.resize(s.zeta.size());
        for (Eigen::Index k = 0; k < s.zeta.size(); ++k) {
            s.mu(k) = spec_.controllers[k].psi(controller_state(z, k), s.zeta(k));
        }
        s.u = -(e_ * s.mu);
        return s;
    }

    [[nodiscard]] Eigen::VectorXd residual(const Eigen::VectorXd& z, const Eigen::VectorXd& y) const {
        const Signals s = couple(z, y);
        Eigen::VectorXd r(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            r(i) = y(i) - spec_.agents[i].output(agent_state(z, static_cast<int>(i)), s.u(i));
        }
        return r;
    }

    [[nodiscard]] Eigen::VectorXd solve_loop(const Eigen::VectorXd& z, Eigen::VectorXd y) const {
        Eigen::VectorXd r = residual(z, y);
        const Eigen::Index n = y.size();
        for (int it = 0; it < 50 && r.lpNorm<Eigen::Infinity>() > 1e-13 * (1.0 + y.lpNorm<Eigen::Infinity>()); ++it) {
            Eigen::MatrixXd jac(n, n);
            for (Eigen::Index j = 0; j < n; ++j) {
                const double h = 1e-7 * (1.0 + std::abs(y(j)));
                Eigen::VectorXd yp = y, ym = y;
                yp(j) += h;
                ym(j) -= h;
                jac.col(j) = (residual(z, yp) - residual(z, ym)) / (2.0 * h);
            }
            const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
            if (!(std::abs(lu.determinant()) > 1e-14)) {
                throw Error(ErrorCode::kNotRealizable, "algebraic loop is singular");
            }
            const Eigen::VectorXd next = y - lu.solve(r);
            const Eigen::VectorXd rn = residual(z, next);
            if (!(rn.lpNorm<Eigen::Infinity>() < r.lpNorm<Eigen::Infinity>())) break;
            y = next;
            r = rn;
        }
        if (!(r.lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + y.lpNorm<Eigen::Infinity>()))) {
            throw Error(ErrorCode::kNoConvergence, "algebraic loop did not converge");
        }
        return y;
    }

    const NetworkSpec& spec_;
    Eigen::MatrixXd e_, et_;
    std::vector<Eigen::Index> offsets_;
    Eigen::Index dim_ = 0;
    bool loop_ = false;
};

}  // namespace

SimResult simulate(const NetworkSpec& spec) {
    spec.validate();
    const ClosedLoop sys(spec);
    const auto& cfg = spec.config;
    const long steps = std::lround(cfg.horizon / cfg.dt);
    const long window_steps = std::max<long>(1, std::lround(cfg.window / cfg.dt));
    const long records = steps / cfg.record_stride + 1 + (steps % cfg.record_stride != 0 ? 1 : 0);
    const int n = spec.graph.vertex_count, m = spec.graph.edge_count();

    SimResult out;
    out.x.resize(records, sys.dim());
    out.u.resize(records, n);
    out.y.resize(records, n);
    out.zeta.resize(records, m);
    out.mu.resize(records, m);
    long row = 0;
    auto record = [&](double t, const Eigen::VectorXd& z, const ClosedLoop::Signals& s) {
        out.time.push_back(t);
        out.x.row(row) = z.transpose();
        out.u.row(row) = s.u.transpose();
        out.y.row(row) = s.y.transpose();
        out.zeta.row(row) = s.zeta.transpose();
        out.mu.row(row) = s.mu.transpose();
        ++row;
    };

    Eigen::VectorXd z = sys.initial();
    long calm = 0;
    double rate_norm = 0.0;
    const double h = cfg.dt;
    for (long k = 0;; ++k) {
        const ClosedLoop::Signals s = sys.signals(z);
        const Eigen::VectorXd k1 = sys.rate(z, s);
        if (!k1.allFinite() || !s.y.allFinite()) {
            throw Error(ErrorCode::kNonFiniteState, "non-finite state at t = " + std::to_string(k * h));
        }
        rate_norm = z.size() == 0 ? 0.0 : k1.lpNorm<Eigen::Infinity>();
        calm = rate_norm < cfg.tol ? calm + 1 : 0;
        if (k % cfg.record_stride == 0 || k == steps) record(static_cast<double>(k) * h, z, s);
        if (k == steps) {
            out.x_end = z;
            out.u_end = s.u;
            out.y_end = s.y;
            out.zeta_end = s.zeta;
            out.mu_end = s.mu;
            break;
        }
        const Eigen::VectorXd k2 = sys.rate(z + 0.5 * h * k1);
        const Eigen::VectorXd k3 = sys.rate(z + 0.5 * h * k2);
        const Eigen::VectorXd k4 = sys.rate(z + h * k3);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.final_rate = rate_norm;
    out.converged = calm >= window_steps;
    return out;
}

NetworkSpec apply_network_transform(const NetworkSpec& spec, const std::vector<Transform2>& ts) {
    if (ts.size() != spec.agents.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "one transform per agent is required");
    }
    NetworkSpec out = spec;
    for (std::size_t i = 0; i < ts.size(); ++i) out.agents[i] = transform_agent(spec.agents[i], ts[i]);
    return out;
}

}  // namespace eips
