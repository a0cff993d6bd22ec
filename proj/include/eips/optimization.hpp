#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eips/network.hpp"
#include "eips/relation.hpp"

namespace eips {

/// Scalar convex function with a (sub)gradient.
struct ConvexTerm {
    std::function<double(double)> value;
    std::function<double(double)> derivative;

    [[nodiscard]] static ConvexTerm from_closed(const ClosedFormIntegral& f);
    /// Exact primitive of the linearly interpolated derivative samples, so the
    /// value is C1 and consistent with derivative() between nodes.
    [[nodiscard]] static ConvexTerm from_sampled(const IntegralFunction& f);
    /// w (x - c)^2 / 2
    [[nodiscard]] static ConvexTerm quadratic(double w, double c = 0.0);
};

struct SolverOptions {
    int max_iter = 200000;
    double grad_tol = 1e-11;
    double armijo = 1e-4;
    double fallback_step = 1.0;  // c in the c / sqrt(k) step used at kinks
};

struct OptResult {
    Eigen::VectorXd primal;   // y for OPP, mu for OFP
    Eigen::VectorXd coupled;  // zeta = E^T y for OPP, u = -E mu for OFP
    double objective = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Minimizes sum_j p_j(z_j) + sum_k q_k((A z)_k) by gradient descent with
/// Barzilai-Borwein trial steps and Armijo backtracking; when backtracking
/// stalls at a kink a diminishing c / sqrt(k) subgradient step is taken. The
/// best iterate is returned.
[[nodiscard]] OptResult minimize_separable(const std::vector<ConvexTerm>& p, const Eigen::MatrixXd& a,
                                           const std::vector<ConvexTerm>& q, Eigen::VectorXd z0,
                                           const SolverOptions& opts = {});

[[nodiscard]] double separable_objective(const std::vector<ConvexTerm>& p, const Eigen::MatrixXd& a,
                                         const std::vector<ConvexTerm>& q, const Eigen::VectorXd& z);

/// min sum K*_i(y_i) + sum Gamma_e((E^T y)_e)
[[nodiscard]] OptResult solve_opp(const Graph& g, const std::vector<ConvexTerm>& k_star,
                                  const std::vector<ConvexTerm>& gamma, const SolverOptions& opts = {});
/// min sum K_i((-E mu)_i) + sum Gamma*_e(mu_e)
[[nodiscard]] OptResult solve_ofp(const Graph& g, const std::vector<ConvexTerm>& k,
                                  const std::vector<ConvexTerm>& gamma_star, const SolverOptions& opts = {});

struct OptGrids {
    std::vector<double> y = linspace(-20.0, 20.0, 4001);
    std::vector<double> u = linspace(-20.0, 20.0, 4001);
    std::vector<double> mu = linspace(-20.0, 20.0, 4001);
    std::vector<double> zeta = linspace(-20.0, 20.0, 4001);
};

/// Sampled K* of every agent (NonConvexCertificate if one is not certified convex).
[[nodiscard]] std::vector<ConvexTerm> agent_dual_terms(const NetworkSpec& spec, const std::vector<double>& grid);
/// Sampled K of every agent.
[[nodiscard]] std::vector<ConvexTerm> agent_primal_terms(const NetworkSpec& spec, const std::vector<double>& grid);
[[nodiscard]] std::vector<ConvexTerm> controller_terms(const NetworkSpec& spec);
/// Gamma* from the closed form when declared, otherwise the discrete conjugate of Gamma.
[[nodiscard]] std::vector<ConvexTerm> controller_dual_terms(const NetworkSpec& spec, const OptGrids& grids);

/// Network-level optimal potential and optimal flow problems built from the
/// agents' steady-state relations and the controllers' integral functions.
[[nodiscard]] OptResult solve_opp(const NetworkSpec& spec, const OptGrids& grids = {},
                                  const SolverOptions& opts = {});
[[nodiscard]] OptResult solve_ofp(const NetworkSpec& spec, const OptGrids& grids = {},
                                  const SolverOptions& opts = {});

struct PredictionReport {
    OptResult topp;
    SimResult sim;
    double gap = 0.0;  // sup-norm distance of simulated and predicted outputs
    bool passed = false;
};

struct PredictOptions {
    OptGrids grids;
    SolverOptions solver;
    double tolerance = 1e-2;
};

/// Transforms the network, checks the hypotheses of the transformed steady-state
/// theorem (PreconditionFailed lists the failing ones), solves the transformed
/// optimal potential problem and compares it with simulation.
[[nodiscard]] PredictionReport predict_and_verify(const NetworkSpec& spec, const std::vector<Transform2>& ts,
                                                  const PredictOptions& opts = {});

/// Hypotheses of the transformed steady-state theorem that fail for the network.
[[nodiscard]] std::vector<std::string> failed_hypotheses(const NetworkSpec& transformed);

}  // namespace eips
