#include "eips/optimization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "eips/error.hpp"

namespace eips {

ConvexTerm ConvexTerm::from_closed(const ClosedFormIntegral& f) {
    if (!f.value || !f.derivative) throw Error(ErrorCode::kInvalidInput, "closed-form term is incomplete");
    return {f.value, f.derivative};
}

namespace {

struct SampledC1 {
    std::vector<double> x, v, d;

    // Cell index i with x[i] <= t < x[i+1]; -1 / n-1 outside.
    [[nodiscard]] std::ptrdiff_t cell(double t) const {
        if (t < x.front()) return -1;
        if (t >= x.back()) return static_cast<std::ptrdiff_t>(x.size()) - 1;
        return std::upper_bound(x.begin(), x.end(), t) - x.begin() - 1;
    }
    [[nodiscard]] double correction(std::size_t i) const {
        const double h = x[i + 1] - x[i];
        return v[i + 1] - v[i] - 0.5 * h * (d[i] + d[i + 1]);
    }
    [[nodiscard]] double value(double t) const {
        const auto i = cell(t);
        if (i < 0) return v.front() + d.front() * (t - x.front());
        if (i == static_cast<std::ptrdiff_t>(x.size()) - 1) return v.back() + d.back() * (t - x.back());
        const auto k = static_cast<std::size_t>(i);
        const double h = x[k + 1] - x[k], s = t - x[k];
        return v[k] + d[k] * s + 0.5 * (d[k + 1] - d[k]) * s * s / h + correction(k) * s / h;
    }
    [[nodiscard]] double derivative(double t) const {
        const auto i = cell(t);
        if (i < 0) return d.front();
        if (i == static_cast<std::ptrdiff_t>(x.size()) - 1) return d.back();
        const auto k = static_cast<std::size_t>(i);
        const double h = x[k + 1] - x[k], s = t - x[k];
        return d[k] + (d[k + 1] - d[k]) * s / h + correction(k) / h;
    }
};

}  // namespace

ConvexTerm ConvexTerm::from_sampled(const IntegralFunction& f) {
    if (f.grid.size() < 2 || f.values.size() != f.grid.size() || f.derivatives.size() != f.grid.size()) {
        throw Error(ErrorCode::kInvalidInput, "sampled term needs at least two consistent nodes");
    }
    auto s = std::make_shared<SampledC1>(SampledC1{f.grid, f.values, f.derivatives});
    return {[s](double t) { return s->value(t); }, [s](double t) { return s->derivative(t); }};
}

ConvexTerm ConvexTerm::quadratic(double w, double c) {
    return {[w, c](double x) { return 0.5 * w * (x - c) * (x - c); }, [w, c](double x) { return w * (x - c); }};
}

double separable_objective(const std::vector<ConvexTerm>& p, const Eigen::MatrixXd& a,
                           const std::vector<ConvexTerm>& q, const Eigen::VectorXd& z) {
    double f = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) f += p[j].value(z(j));
    const Eigen::VectorXd w = a * z;
    for (Eigen::Index k = 0; k < w.size(); ++k) f += q[k].value(w(k));
    return f;
}

namespace {

Eigen::VectorXd gradient(const std::vector<ConvexTerm>& p, const Eigen::MatrixXd& a,
                         const std::vector<ConvexTerm>& q, const Eigen::VectorXd& z) {
    Eigen::VectorXd g(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) g(j) = p[j].derivative(z(j));
    const Eigen::VectorXd w = a * z;
    Eigen::VectorXd gw(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) gw(k) = q[k].derivative(w(k));
    return g + a.transpose() * gw;
}

}  // namespace

OptResult minimize_separable(const std::vector<ConvexTerm>& p, const Eigen::MatrixXd& a,
                             const std::vector<ConvexTerm>& q, Eigen::VectorXd z,
                             const SolverOptions& opts) {
    if (static_cast<Eigen::Index>(p.size()) != z.size() || a.cols() != z.size() ||
        static_cast<Eigen::Index>(q.size()) != a.rows()) {
        throw Error(ErrorCode::kDimensionMismatch, "objective terms do not match the variable size");
    }
    OptResult best;
    double f = separable_objective(p, a, q, z);
    Eigen::VectorXd g = gradient(p, a, q, z);
    best.primal = z;
    best.objective = f;
    best.grad_norm = z.size() == 0 ? 0.0 : g.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(f)) throw Error(ErrorCode::kInvalidInput, "objective is not finite at the start point");
    double step = 1.0 / std::max(1.0, best.grad_norm);
    int stalled = 0;
    for (int k = 1; k <= opts.max_iter; ++k) {
        const double gn = z.size() == 0 ? 0.0 : g.lpNorm<Eigen::Infinity>();
        if (gn <= opts.grad_tol * (1.0 + std::abs(f))) {
            best.converged = true;
            best.iterations = k - 1;
            best.primal = z;
            best.objective = f;
            best.grad_norm = gn;
            return best;
        }
        const double gg = g.squaredNorm();
        const double slack = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f));
        double t = step;
        Eigen::VectorXd zn;
        double fn = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            zn = z - t * g;
            fn = separable_objective(p, a, q, zn);
            if (std::isfinite(fn) && fn <= f - opts.armijo * t * gg + slack) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            t = opts.fallback_step / std::sqrt(static_cast<double>(k)) / std::max(1.0, std::sqrt(gg));
            zn = z - t * g;
            fn = separable_objective(p, a, q, zn);
            if (!std::isfinite(fn)) throw Error(ErrorCode::kNoConvergence, "objective became non-finite");
        }
        const Eigen::VectorXd gnew = gradient(p, a, q, zn);
        const Eigen::VectorXd s = zn - z, y = gnew - g;
        const double sy = s.dot(y);
        step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * t;
        z = std::move(zn);
        g = gnew;
        f = fn;
        best.iterations = k;
        if (f < best.objective) {
            best.primal = z;
            best.objective = f;
            best.grad_norm = g.lpNorm<Eigen::Infinity>();
            stalled = 0;
        } else if (++stalled > 200) {
            break;
        }
    }
    return best;
}

OptResult solve_opp(const Graph& g, const std::vector<ConvexTerm>& k_star, const std::vector<ConvexTerm>& gamma,
                    const SolverOptions& opts) {
    const Eigen::MatrixXd et = g.incidence().transpose();
    OptResult r = minimize_separable(k_star, et, gamma, Eigen::VectorXd::Zero(g.vertex_count), opts);
    r.coupled = et * r.primal;
    return r;
}

OptResult solve_ofp(const Graph& g, const std::vector<ConvexTerm>& k, const std::vector<ConvexTerm>& gamma_star,
                    const SolverOptions& opts) {
    const Eigen::MatrixXd ne = -g.incidence();
    OptResult r = minimize_separable(gamma_star, ne, k, Eigen::VectorXd::Zero(g.edge_count()), opts);
    r.coupled = ne * r.primal;
    return r;
}

std::vector<ConvexTerm> agent_dual_terms(const NetworkSpec& spec, const std::vector<double>& grid) {
    std::vector<ConvexTerm> out;
    for (std::size_t i = 0; i < spec.agents.size(); ++i) {
        const auto& a = spec.agents[i];
        if (!a.steady_state) {
            throw Error(ErrorCode::kPreconditionFailed, "agent " + std::to_string(i) + " has no steady-state relation");
        }
        const IntegralFunction f = integral_function(*a.steady_state, IntegralOf::kKInverse, &grid);
        if (!f.convex) {
            throw Error(ErrorCode::kNonConvexCertificate, "K* of agent " + std::to_string(i) + " is not convex");
        }
        out.push_back(ConvexTerm::from_sampled(f));
    }
    return out;
}

std::vector<ConvexTerm> agent_primal_terms(const NetworkSpec& spec, const std::vector<double>& grid) {
    std::vector<ConvexTerm> out;
    for (std::size_t i = 0; i < spec.agents.size(); ++i) {
        const auto& a = spec.agents[i];
        if (!a.steady_state) {
            throw Error(ErrorCode::kPreconditionFailed, "agent " + std::to_string(i) + " has no steady-state relation");
        }
        const IntegralFunction f = integral_function(*a.steady_state, IntegralOf::kK, &grid);
        if (!f.convex) {
            throw Error(ErrorCode::kNonConvexCertificate, "K of agent " + std::to_string(i) + " is not convex");
        }
        out.push_back(ConvexTerm::from_sampled(f));
    }
    return out;
}

std::vector<ConvexTerm> controller_terms(const NetworkSpec& spec) {
    std::vector<ConvexTerm> out;
    for (std::size_t k = 0; k < spec.controllers.size(); ++k) {
        const auto& c = spec.controllers[k];
        if (!c.integral) {
            throw Error(ErrorCode::kPreconditionFailed, "controller " + std::to_string(k) + " has no integral function");
        }
        out.push_back(ConvexTerm::from_closed(*c.integral));
    }
    return out;
}

std::vector<ConvexTerm> controller_dual_terms(const NetworkSpec& spec, const OptGrids& grids) {
    std::vector<ConvexTerm> out;
    for (std::size_t k = 0; k < spec.controllers.size(); ++k) {
        const auto& c = spec.controllers[k];
        if (c.dual_integral) {
            out.push_back(ConvexTerm::from_closed(*c.dual_integral));
            continue;
        }
        if (!c.integral) {
            throw Error(ErrorCode::kPreconditionFailed, "controller " + std::to_string(k) + " has no integral function");
        }
        IntegralFunction f;
        f.grid = grids.zeta;
        const double base = c.integral->value(f.grid.front());
        for (double z : f.grid) {
            f.values.push_back(c.integral->value(z) - base);
            f.derivatives.push_back(c.integral->derivative(z));
        }
        f.anchor = base;
        f.convex = convexity_certificate(f.grid, f.values);
        if (!f.convex) {
            throw Error(ErrorCode::kNonConvexCertificate, "Gamma of controller " + std::to_string(k) + " is not convex");
        }
        out.push_back(ConvexTerm::from_sampled(legendre(f, grids.mu)));
    }
    return out;
}

OptResult solve_opp(const NetworkSpec& spec, const OptGrids& grids, const SolverOptions& opts) {
    spec.graph.validate();
    OptResult r = solve_opp(spec.graph, agent_dual_terms(spec, grids.y), controller_terms(spec), opts);
    if (!r.converged) throw Error(ErrorCode::kNoConvergence, "optimal potential problem did not converge");
    return r;
}

OptResult solve_ofp(const NetworkSpec& spec, const OptGrids& grids, const SolverOptions& opts) {
    spec.graph.validate();
    OptResult r = solve_ofp(spec.graph, agent_primal_terms(spec, grids.u), controller_dual_terms(spec, grids), opts);
    if (!r.converged) throw Error(ErrorCode::kNoConvergence, "optimal flow problem did not converge");
    return r;
}

std::vector<std::string> failed_hypotheses(const NetworkSpec& transformed) {
    std::vector<std::string> out;
    bool agents_strict = !transformed.agents.empty();
    for (std::size_t i = 0; i < transformed.agents.size(); ++i) {
        const auto& a = transformed.agents[i];
        const std::string tag = "agent " + std::to_string(i);
        if (!a.steady_state) {
            out.push_back(tag + ": no steady-state relation");
        } else if (!is_maximal_monotone(*a.steady_state).supported()) {
            out.push_back(tag + ": relation not maximally monotone");
        }
        agents_strict = agents_strict && a.indices && a.indices->rho > 0.0;
    }
    bool controllers_strict = true;
    for (std::size_t k = 0; k < transformed.controllers.size(); ++k) {
        const auto& c = transformed.controllers[k];
        if (!c.integral) out.push_back("controller " + std::to_string(k) + ": no integral function");
        controllers_strict = controllers_strict && c.is_static() && c.gain > 0.0;
    }
    if (!agents_strict && !controllers_strict) {
        out.emplace_back("neither output-strict agents nor input-strict controllers");
    }
    return out;
}

PredictionReport predict_and_verify(const NetworkSpec& spec, const std::vector<Transform2>& ts,
                                    const PredictOptions& opts) {
    const NetworkSpec t = apply_network_transform(spec, ts);
    const auto failed = failed_hypotheses(t);
    if (!failed.empty()) {
        std::string msg = "hypotheses failed:";
        for (const auto& f : failed) msg += " [" + f + "]";
        throw Error(ErrorCode::kPreconditionFailed, msg);
    }
    PredictionReport r;
    r.topp = solve_opp(t, opts.grids, opts.solver);
    r.sim = simulate(t);
    r.gap = r.topp.primal.size() == 0 ? 0.0 : (r.sim.y_end - r.topp.primal).lpNorm<Eigen::Infinity>();
    r.passed = r.gap <= opts.tolerance;
    return r;
}

}  // namespace eips
