#include <gtest/gtest.h>

#include <cmath>

#include "eips/agents.hpp"
#include "eips/error.hpp"
#include "eips/fixtures.hpp"
#include "eips/network.hpp"

using namespace eips;

namespace {

State scalar(double v) {
    State x(1);
    x(0) = v;
    return x;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::kInvalidInput;
}

}  // namespace

TEST(Graph, IncidenceSigns) {
    Graph g{4, {{0, 1}, {2, 1}, {3, 0}}};
    const Eigen::MatrixXd e = g.incidence();
    ASSERT_EQ(e.rows(), 4);
    ASSERT_EQ(e.cols(), 3);
    EXPECT_EQ(e(0, 0), 1.0);
    EXPECT_EQ(e(1, 0), -1.0);
    EXPECT_EQ(e(2, 1), 1.0);
    EXPECT_EQ(e(1, 1), -1.0);
    EXPECT_EQ(e(3, 2), 1.0);
    EXPECT_EQ(e(0, 2), -1.0);
    EXPECT_EQ(e.colwise().sum().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(e.cwiseAbs().sum(), 6.0);
}

TEST(Graph, InvalidEdges) {
    EXPECT_EQ(code_of([] { (void)Graph{2, {{0, 2}}}.incidence(); }), ErrorCode::kDimensionMismatch);
    EXPECT_EQ(code_of([] { (void)Graph{2, {{1, 1}}}.incidence(); }), ErrorCode::kInvalidInput);
    EXPECT_EQ(code_of([] { (void)ControllerSpec::static_gain(0.0); }), ErrorCode::kNonpositiveGain);
}

TEST(Simulate, SingleAgentFollowsAutonomousFlow) {
    NetworkSpec s;
    s.graph.vertex_count = 1;
    s.agents.push_back(first_order_agent(1.0));
    s.initial_states.push_back(scalar(2.0));
    s.config.horizon = 5.0;
    const SimResult r = simulate(s);
    ASSERT_EQ(r.time.size(), 51u);
    for (std::size_t k = 0; k < r.time.size(); ++k) {
        EXPECT_NEAR(r.y(k, 0), 2.0 * std::exp(-r.time[k]), 1e-12);
        EXPECT_EQ(r.u(k, 0), 0.0);
    }
    EXPECT_EQ(r.zeta.cols(), 0);
}

TEST(Simulate, CouplingIdentitiesStoredExactly) {
    NetworkSpec s = gradient_network(kGradientSeed);
    s.config.horizon = 2.0;
    s.config.record_stride = 7;
    const SimResult r = simulate(s);
    const Eigen::MatrixXd e = s.graph.incidence();
    for (Eigen::Index k = 0; k < r.y.rows(); ++k) {
        const Eigen::VectorXd y = r.y.row(k).transpose();
        const Eigen::VectorXd mu = r.mu.row(k).transpose();
        const Eigen::VectorXd zeta = e.transpose() * y;
        const Eigen::VectorXd u = -(e * mu);
        EXPECT_EQ((r.zeta.row(k).transpose() - zeta).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ((r.u.row(k).transpose() - u).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ((mu - zeta).cwiseAbs().maxCoeff(), 0.0);
    }
    EXPECT_DOUBLE_EQ(r.time.back(), 2.0);
}

TEST(Simulate, TransformedGradientNetworkReachesOrigin) {
    const NetworkSpec s = gradient_network(kGradientSeed);
    const NetworkSpec t = apply_network_transform(s, std::vector<Transform2>(5, Transform2{1, 2.5, 0, 1}));
    const SimResult r = simulate(t);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.y_end.lpNorm<Eigen::Infinity>(), 1e-3);
}

TEST(Simulate, UntransformedGradientNetworkClusters) {
    const SimResult r = simulate(gradient_network(kGradientSeed));
    EXPECT_TRUE(r.converged);
    EXPECT_GE(cluster_count(r.y_end, 1.0), 2);
    for (int i = 0; i < 5; ++i) {
        const double x = r.y_end(i);
        EXPECT_NEAR(-(2.5 * std::sin(x) + 0.1 * x) + r.u_end(i), 0.0, 1e-5);
    }
}

TEST(Simulate, FeedthroughLoopSolved) {
    NetworkSpec s;
    s.graph = Graph::path(3);
    for (double x0 : {1.5, -0.5, 3.0}) {
        s.agents.push_back(transform_agent(cubic_input_agent(), Transform2{1, 0, 2, 1}));
        s.initial_states.push_back(scalar(x0));
    }
    s.controllers = {ControllerSpec::static_gain(1.0), ControllerSpec::static_gain(0.5)};
    s.config.horizon = 3.0;
    const SimResult r = simulate(s);
    for (Eigen::Index k = 0; k < r.y.rows(); ++k) {
        for (int i = 0; i < 3; ++i) {
            const double h = s.agents[i].output(scalar(r.x(k, i)), r.u(k, i));
            EXPECT_NEAR(r.y(k, i), h, 1e-9 * (1.0 + std::abs(h)));
        }
    }
}

TEST(Simulate, DynamicControllerIntegratesEdgeState) {
    NetworkSpec s;
    s.graph = Graph::path(2);
    s.agents = {first_order_agent(1.0), first_order_agent(1.0)};
    s.initial_states = {scalar(1.0), scalar(-1.0)};
    ControllerSpec c;
    c.state_dim = 1;
    c.phi = [](const State& eta, double z) { return State(scalar(-eta(0) + z)); };
    c.psi = [](const State& eta, double) { return eta(0); };
    c.integral = ClosedFormIntegral{[](double z) { return 0.5 * z * z; }, [](double z) { return z; }};
    s.controllers = {c};
    s.controller_states = {scalar(0.25)};
    s.config.horizon = 30.0;
    const SimResult r = simulate(s);
    EXPECT_EQ(r.x(0, 2), 0.25);
    EXPECT_LE(r.x_end.lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(Simulate, BlowUpReported) {
    NetworkSpec s;
    s.graph.vertex_count = 1;
    AgentODE a;
    a.dynamics = [](const State& x, double u) { return State(scalar(x(0) * x(0) + u)); };
    a.output = [](const State& x, double) { return x(0); };
    s.agents = {a};
    s.initial_states = {scalar(2.0)};
    s.config.horizon = 2.0;
    EXPECT_EQ(code_of([&] { (void)simulate(s); }), ErrorCode::kNonFiniteState);
}

TEST(Simulate, DimensionMismatch) {
    NetworkSpec s = gradient_network();
    s.initial_states.pop_back();
    EXPECT_EQ(code_of([&] { (void)simulate(s); }), ErrorCode::kDimensionMismatch);
    s = gradient_network();
    s.controllers.pop_back();
    EXPECT_EQ(code_of([&] { (void)simulate(s); }), ErrorCode::kDimensionMismatch);
    s = gradient_network();
    s.initial_states[0] = State::Zero(2);
    EXPECT_EQ(code_of([&] { (void)simulate(s); }), ErrorCode::kDimensionMismatch);
    s = gradient_network();
    s.config.dt = 0.0;
    EXPECT_EQ(code_of([&] { (void)simulate(s); }), ErrorCode::kInvalidInput);
}

TEST(NetworkTransform, IdentityKeepsSpec) {
    const NetworkSpec s = gradient_network();
    const NetworkSpec t = apply_network_transform(s, std::vector<Transform2>(5, Transform2::identity()));
    for (double x : linspace(-5, 5, 11)) {
        for (int i = 0; i < 5; ++i) EXPECT_EQ(t.agents[i].dynamics(scalar(x), 0.3)(0), s.agents[i].dynamics(scalar(x), 0.3)(0));
    }
    EXPECT_EQ(code_of([&] { (void)apply_network_transform(s, {Transform2::identity()}); }),
              ErrorCode::kDimensionMismatch);
    EXPECT_EQ(code_of([&] { (void)apply_network_transform(s, std::vector<Transform2>(5, Transform2{1, 2, 2, 4})); }),
              ErrorCode::kSingularTransform);
}

TEST(NetworkTransform, GradientOutputFeedbackClosedForm) {
    const NetworkSpec t =
        apply_network_transform(gradient_network(), std::vector<Transform2>(5, Transform2{1, 2.5, 0, 1}));
    for (double x : linspace(-9, 9, 37)) {
        const double f = t.agents[2].dynamics(scalar(x), 0.7)(0);
        EXPECT_NEAR(f, -(2.5 * std::sin(x) + 0.1 * x) - 2.5 * x + 0.7, 1e-12 * (1.0 + std::abs(f)));
    }
}

TEST(NetworkTransform, InverseRoundTrip) {
    NetworkSpec s = gradient_network();
    s.agents[1] = shortage_agent();
    s.agents[3] = cubic_input_agent();
    const std::vector<Transform2> ts{{1, 2.5, 0, 1}, {1, 1, 1, 2}, {2, 1, 1, 1}, {1, 4, 1, 5}, {1, -0.5, 0.3, 0.85}};
    std::vector<Transform2> inv;
    for (const auto& t : ts) inv.push_back(t.inverse());
    const NetworkSpec back = apply_network_transform(apply_network_transform(s, ts), inv);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        for (double x : linspace(-4, 4, 21)) {
            for (double u : linspace(-2, 2, 9)) {
                const double f0 = s.agents[i].dynamics(scalar(x), u)(0), f1 = back.agents[i].dynamics(scalar(x), u)(0);
                const double h0 = s.agents[i].output(scalar(x), u), h1 = back.agents[i].output(scalar(x), u);
                worst = std::max({worst, std::abs(f0 - f1) / (1 + std::abs(f0)), std::abs(h0 - h1) / (1 + std::abs(h0))});
            }
        }
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(Fixtures, ClusterCount) {
    Eigen::VectorXd v(5);
    v << 0.0, 0.5, 3.0, 3.2, -4.0;
    EXPECT_EQ(cluster_count(v, 1.0), 3);
    EXPECT_EQ(cluster_count(v, 10.0), 1);
    EXPECT_EQ(cluster_count(Eigen::VectorXd(), 1.0), 0);
}
