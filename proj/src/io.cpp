#include "eips/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "eips/agents.hpp"
#include "eips/error.hpp"
#include "eips/random.hpp"

namespace eips {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    return out;
}

namespace {

Transform2 transform_from(const json& j) {
    if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::kInvalidInput, "transform must be [a, b, c, d]");
    return Transform2{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

std::map<std::string, double> params_from(const json& j) {
    std::map<std::string, double> out;
    if (j.is_null()) return out;
    if (!j.is_object()) throw Error(ErrorCode::kInvalidInput, "agent params must be an object");
    for (const auto& [k, v] : j.items()) out[k] = v.get<double>();
    return out;
}

LoadedNetwork build(const json& doc) {
    LoadedNetwork out;
    NetworkSpec& s = out.spec;
    const json& g = doc.at("graph");
    s.graph.vertex_count = g.at("vertices").get<int>();
    if (g.contains("edges")) {
        for (const auto& e : g.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::kInvalidInput, "edge must be [head, tail]");
            s.graph.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
    } else if (g.value("topology", std::string("path")) == "path") {
        s.graph = Graph::path(s.graph.vertex_count);
    }
    s.graph.validate();
    const int n = s.graph.vertex_count;

    std::optional<Rng> rng;
    double lo = -10.0, hi = 10.0;
    if (doc.contains("initial")) {
        const json& init = doc.at("initial");
        out.seed = init.value("seed", std::uint64_t{1});
        lo = init.value("low", lo);
        hi = init.value("high", hi);
        rng.emplace(*out.seed);
    }
    auto add_agent = [&](const json& a) {
        AgentODE agent = make_agent(a.at("kind").get<std::string>(), params_from(a.value("params", json())));
        State x0(agent.state_dim);
        if (a.contains("x0")) {
            const auto v = a.at("x0").get<std::vector<double>>();
            if (static_cast<int>(v.size()) != agent.state_dim) {
                throw Error(ErrorCode::kDimensionMismatch, "x0 has wrong size");
            }
            for (int i = 0; i < agent.state_dim; ++i) x0(i) = v[static_cast<std::size_t>(i)];
        } else if (rng) {
            for (int i = 0; i < agent.state_dim; ++i) x0(i) = rng->uniform(lo, hi);
        } else {
            x0.setZero();
        }
        s.agents.push_back(std::move(agent));
        s.initial_states.push_back(std::move(x0));
    };
    if (doc.contains("agents")) {
        for (const auto& a : doc.at("agents")) add_agent(a);
    } else {
        for (int i = 0; i < n; ++i) add_agent(doc.at("agent"));
    }

    if (doc.contains("controllers")) {
        for (const auto& c : doc.at("controllers")) s.controllers.push_back(ControllerSpec::static_gain(c.at("gain")));
    } else {
        const double gain = doc.value("gain", 1.0);
        for (int k = 0; k < s.graph.edge_count(); ++k) s.controllers.push_back(ControllerSpec::static_gain(gain));
    }

    if (doc.contains("transform")) {
        out.transforms.assign(static_cast<std::size_t>(n), transform_from(doc.at("transform")));
    } else if (doc.contains("transforms")) {
        for (const auto& t : doc.at("transforms")) out.transforms.push_back(transform_from(t));
    }

    if (doc.contains("integrator")) {
        const json& c = doc.at("integrator");
        s.config.dt = c.value("dt", s.config.dt);
        s.config.horizon = c.value("horizon", s.config.horizon);
        s.config.window = c.value("window", s.config.window);
        s.config.tol = c.value("tol", s.config.tol);
        s.config.record_stride = c.value("record_stride", s.config.record_stride);
    }
    s.validate();
    return out;
}

}  // namespace

LoadedNetwork parse_network(std::string_view json_text) {
    try {
        return build(json::parse(json_text));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kInvalidInput, std::string("network document: ") + e.what());
    }
}

LoadedNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kInvalidInput, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str());
}

void write_trajectories_csv(std::ostream& os, const SimResult& r) {
    os << 't';
    auto header = [&](const char* name, Eigen::Index count) {
        for (Eigen::Index i = 0; i < count; ++i) os << ',' << name << i;
    };
    header("x", r.x.cols());
    header("u", r.u.cols());
    header("y", r.y.cols());
    header("zeta", r.zeta.cols());
    header("mu", r.mu.cols());
    os << '\n';
    for (std::size_t k = 0; k < r.time.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        os << format_number(r.time[k]);
        for (const Eigen::MatrixXd* m : {&r.x, &r.u, &r.y, &r.zeta, &r.mu}) {
            for (Eigen::Index i = 0; i < m->cols(); ++i) os << ',' << format_number((*m)(row, i));
        }
        os << '\n';
    }
}

void write_relation_csv(std::ostream& os, const PlanarRelation& k) {
    os << "u,y\n";
    for (const Point2& p : k.samples()) os << format_number(p.x()) << ',' << format_number(p.y()) << '\n';
}

void write_integral_csv(std::ostream& os, const IntegralFunction& f, std::string_view abscissa) {
    os << abscissa << ",value,derivative\n";
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        os << format_number(f.grid[i]) << ',' << format_number(f.values[i]) << ',' << format_number(f.derivatives[i])
           << '\n';
    }
}

namespace {

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

}  // namespace

std::string simulation_summary_json(const SimResult& r) {
    json j;
    j["converged"] = r.converged;
    j["final_rate"] = r.final_rate;
    j["t_end"] = r.time.empty() ? 0.0 : r.time.back();
    j["y_end"] = vector_json(r.y_end);
    j["u_end"] = vector_json(r.u_end);
    j["zeta_end"] = vector_json(r.zeta_end);
    j["mu_end"] = vector_json(r.mu_end);
    return j.dump(2);
}

}  // namespace eips
