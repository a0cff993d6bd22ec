#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "eips/agents.hpp"
#include "eips/error.hpp"
#include "eips/fixtures.hpp"
#include "eips/io.hpp"
#include "eips/lti.hpp"
#include "eips/monotonize.hpp"
#include "eips/optimization.hpp"

namespace eips::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct ExitCode {
    int code;
};

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_decimal(const std::string& text, const char* what) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw Usage(std::string(what) + " is not a decimal number: '" + text + "'");
    }
    return v;
}

double rounded(double v, int digits) {
    const double scale = std::pow(10.0, digits);
    const double r = std::round(v * scale) / scale;
    return r == 0.0 ? 0.0 : r;
}

Json matrix_json(const Transform2& t, int digits = -1) {
    auto f = [digits](double v) { return digits < 0 ? v : rounded(v, digits); };
    return Json::array({Json::array({f(t.a), f(t.b)}), Json::array({f(t.c), f(t.d)})});
}

Json vector_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json decomposition_json(const Transform2& t) {
    const ElementaryDecomposition e = decompose(t);
    Json j;
    j["delta_a"] = e.delta_a;
    j["delta_b"] = e.delta_b;
    j["delta_c"] = e.delta_c;
    j["delta_d"] = e.delta_d;
    j["column_swapped"] = e.column_swapped;
    Json stages = Json::array();
    for (const auto& [stage, gain] : e.stages()) {
        stages.push_back({{"realization", std::string(stage_label(stage))}, {"gain", gain}});
    }
    j["stages"] = stages;
    return j;
}

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
    return ".";
}

class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorCode::kInvalidInput, "cannot create output directory " + dir_.string());
    }
    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        std::ofstream os(dir_ / name, std::ios::binary);
        if (!os) throw Error(ErrorCode::kInvalidInput, "cannot write " + (dir_ / name).string());
        body(os);
        files_.push_back(name);
    }
    void text(const std::string& name, const std::string& content) {
        write(name, [&](std::ostream& os) { os << content << '\n'; });
    }
    void manifest(const std::string& command, const std::string& inputs, std::optional<std::uint64_t> seed) {
        Json m;
        m["command"] = command;
        m["input_digest"] = fnv1a_hex(inputs);
        m["version"] = kVersion;
        m["seed"] = seed ? Json(*seed) : Json(nullptr);
        m["outputs"] = files_;
        std::ofstream os(dir_ / "manifest.json", std::ios::binary);
        os << m.dump(2) << '\n';
    }
    [[nodiscard]] const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

// Acceptance-style check with the origin of the reference value.
struct Checks {
    Json items = Json::array();
    bool all = true;

    void add(const std::string& name, double value, double expected, double tol, const char* reference) {
        const bool ok = std::abs(value - expected) <= tol;
        push(name, value, expected, tol, reference, ok);
    }
    void at_most(const std::string& name, double value, double bound, const char* reference) {
        push(name, value, bound, 0.0, reference, value <= bound, "at_most");
    }
    void at_least(const std::string& name, double value, double bound, const char* reference) {
        push(name, value, bound, 0.0, reference, value >= bound, "at_least");
    }
    void holds(const std::string& name, bool ok, const char* reference) {
        Json j;
        j["name"] = name;
        j["value"] = ok;
        j["reference"] = reference;
        j["pass"] = ok;
        items.push_back(j);
        all = all && ok;
    }

private:
    void push(const std::string& name, double value, double expected, double tol, const char* reference, bool ok,
              const char* kind = "near") {
        Json j;
        j["name"] = name;
        j["kind"] = kind;
        j["value"] = value;
        j["expected"] = expected;
        if (std::string(kind) == "near") j["tolerance"] = tol;
        j["reference"] = reference;
        j["pass"] = ok;
        items.push_back(j);
        all = all && ok;
    }
};

constexpr const char* kPublished = "published";
constexpr const char* kComputed = "independent-oracle";

std::vector<double> parse_grid(const std::string& text) {
    // lo:hi:step
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_decimal(item, "lambda grid"));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
        throw Usage("lambda grid must be lo:hi:step with step > 0");
    }
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(parts[0] + static_cast<double>(k) * parts[2]);
    return out;
}

MuBound parse_bound(const std::string& s) {
    if (s == "linear") return MuBound::kLinearGain;
    if (s == "squared") return MuBound::kSquaredGain;
    throw Usage("--mu-bound must be linear or squared");
}

// ---- passivize -------------------------------------------------------------

struct PassivizeArgs {
    std::string rho, nu, rho_target = "0", nu_target = "0";
    int digits = 2;
};

int cmd_passivize(const PassivizeArgs& a, std::ostream& out) {
    const PassivityIndices src{parse_decimal(a.rho, "--rho"), parse_decimal(a.nu, "--nu")};
    const PassivityIndices dst{parse_decimal(a.rho_target, "--rho-target"), parse_decimal(a.nu_target, "--nu-target")};
    const Transform2 t = passivize(src, dst);
    Json j;
    j["command"] = "passivize";
    j["source"] = {{"rho", src.rho}, {"nu", src.nu}};
    j["target"] = {{"rho", dst.rho}, {"nu", dst.nu}};
    // displayed with |a| = 1
    const double scale = std::abs(t.a) > 1e-12 ? std::abs(t.a) : std::abs(t.b);
    j["T"] = matrix_json(Transform2{t.a / scale, t.b / scale, t.c / scale, t.d / scale}, a.digits);
    j["T_full"] = matrix_json(t);
    j["decomposition"] = decomposition_json(t);
    out << j.dump(2) << '\n';
    return 0;
}

// ---- analyze-lti -----------------------------------------------------------

struct LtiArgs {
    std::string num, den, lambda, grid = "0:10:1", bound = "linear", rho_target = "0", nu_target = "0";
};

Json indices_or_null(const RationalTF& g) {
    try {
        const PassivityIndices p = tf_passivity_indices(g);
        if (!std::isfinite(p.rho) || !std::isfinite(p.nu)) return nullptr;
        return {{"rho", p.rho}, {"nu", p.nu}};
    } catch (const Error&) {
        return nullptr;
    }
}

Json tf_json(const RationalTF& g) {
    return {{"num", g.num.coefficients()}, {"den", g.den.coefficients()}};
}

int cmd_analyze_lti(const LtiArgs& a, std::ostream& out) {
    const RationalTF g(parse_polynomial(a.num), parse_polynomial(a.den));
    const MuBound bound = parse_bound(a.bound);
    const EipsIndices e = a.lambda.empty() ? lambda_search(g, parse_grid(a.grid), bound)
                                           : eips_indices(g, parse_decimal(a.lambda, "--lambda"), bound);
    Json j;
    j["command"] = "analyze-lti";
    j["tf"] = tf_json(g);
    j["mu_bound"] = a.bound;
    j["lambda"] = e.lambda;
    j["lambda_searched"] = a.lambda.empty();
    j["kappa"] = e.kappa;
    j["mu"] = e.mu;
    j["rho"] = e.indices.rho;
    j["nu"] = e.indices.nu;
    j["sweep_indices"] = indices_or_null(g);
    const PassivityIndices dst{parse_decimal(a.rho_target, "--rho-target"), parse_decimal(a.nu_target, "--nu-target")};
    const Transform2 t = passivize(e.indices, dst);
    j["T"] = matrix_json(t);
    std::vector<std::string> warnings;
    const RationalTF gt = transformed_tf(g, t, &warnings);
    j["transformed"] = tf_json(gt);
    j["transformed"]["indices"] = indices_or_null(gt);
    j["warnings"] = warnings;
    out << j.dump(2) << '\n';
    return 0;
}

// ---- simulate / optimize ---------------------------------------------------

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kInvalidInput, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct NetArgs {
    std::string spec, outdir, problem = "opp";
    bool transform = false;
};

NetworkSpec network_for(const LoadedNetwork& net, bool transform) {
    if (!transform) return net.spec;
    if (net.transforms.empty()) throw Error(ErrorCode::kInvalidInput, "--transform given but the document has none");
    return apply_network_transform(net.spec, net.transforms);
}

int cmd_simulate(const NetArgs& a, std::ostream& out) {
    const std::string doc = read_file(a.spec);
    const LoadedNetwork net = parse_network(doc);
    const SimResult r = simulate(network_for(net, a.transform));
    OutputSet files(output_dir(a.outdir));
    files.write("trajectories.csv", [&](std::ostream& os) { write_trajectories_csv(os, r); });
    const std::string summary = simulation_summary_json(r);
    files.text("summary.json", summary);
    files.manifest("simulate", doc + (a.transform ? "|transform" : ""), net.seed);
    out << summary << '\n';
    return 0;
}

int cmd_optimize(const NetArgs& a, std::ostream& out) {
    const std::string doc = read_file(a.spec);
    const LoadedNetwork net = parse_network(doc);
    const NetworkSpec s = network_for(net, a.transform);
    OptResult r;
    if (a.problem == "opp") {
        r = solve_opp(s);
    } else if (a.problem == "ofp") {
        r = solve_ofp(s);
    } else {
        throw Usage("--problem must be opp or ofp");
    }
    Json j;
    j["command"] = "optimize";
    j["problem"] = a.problem;
    j[a.problem == "opp" ? "y" : "mu"] = vector_json(r.primal);
    j[a.problem == "opp" ? "zeta" : "u"] = vector_json(r.coupled);
    j["objective"] = r.objective;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    OutputSet files(output_dir(a.outdir));
    files.text("optimization.json", j.dump(2));
    files.manifest("optimize", doc + "|" + a.problem + (a.transform ? "|transform" : ""), net.seed);
    out << j.dump(2) << '\n';
    return 0;
}

// ---- case studies ----------------------------------------------------------

int case_lti(OutputSet& files, Json& summary) {
    Checks checks;
    const RationalTF g(Polynomial({0.75}), Polynomial({-2.0, 2.0, 1.0}));
    const EipsIndices e = eips_indices(g, 4.0, MuBound::kLinearGain);
    checks.add("mu", e.mu, 1.0, 1e-6, kPublished);
    checks.add("rho", e.indices.rho, -20.0 / 9.0, 1e-6, kPublished);
    checks.add("nu", e.indices.nu, -1.0 / 9.0, 1e-6, kPublished);
    const Transform2 t = passivize(e.indices);
    const double t_err = std::max({std::abs(t.a - 1), std::abs(t.b - 4), std::abs(t.c - 1), std::abs(t.d - 5)});
    checks.add("T_entries_max_error", t_err, 0.0, 1e-12, kPublished);
    const RationalTF gt = transformed_tf(g, t);
    const PassivityIndices strict = tf_passivity_indices(gt);
    checks.holds("transformed_rho_positive", strict.rho > 0.0, kComputed);
    checks.holds("transformed_nu_positive", strict.nu > 0.0, kComputed);
    const RationalTF displayed(Polynomial({3.0, 2.0, 1.0}), Polynomial({2.0, 2.0, 1.0}));
    const PassivityIndices shown = tf_passivity_indices(displayed);
    checks.add("displayed_tf_nu", shown.nu, 0.9, 0.02, kPublished);
    checks.add("displayed_tf_rho", shown.rho, 2.0 / 3.0, 0.02, kPublished);

    files.write("lambda_scan.csv", [&](std::ostream& os) {
        os << "lambda,kappa,mu,rho,nu,admissible\n";
        for (double lam : linspace(0.0, 10.0, 21)) {
            try {
                const EipsIndices s = eips_indices(g, lam, MuBound::kSquaredGain);
                os << format_number(lam) << ',' << format_number(s.kappa) << ',' << format_number(s.mu) << ','
                   << format_number(s.indices.rho) << ',' << format_number(s.indices.nu) << ",1\n";
            } catch (const Error&) {
                os << format_number(lam) << ",,,,,0\n";
            }
        }
    });
    files.write("frequency_response.csv", [&](std::ostream& os) {
        os << "omega,re_g,im_g,re_g_transformed,im_g_transformed\n";
        for (double lw : linspace(-3.0, 3.0, 601)) {
            const double w = std::pow(10.0, lw);
            const auto a = g({0.0, w});
            const auto b = gt({0.0, w});
            os << format_number(w) << ',' << format_number(a.real()) << ',' << format_number(a.imag()) << ','
               << format_number(b.real()) << ',' << format_number(b.imag()) << '\n';
        }
    });
    summary["lambda"] = e.lambda;
    summary["T"] = matrix_json(t);
    summary["transformed_tf"] = tf_json(gt);
    summary["transformed_indices"] = {{"rho", strict.rho}, {"nu", strict.nu}};
    summary["checks"] = checks.items;
    summary["pass"] = checks.all;
    return checks.all ? 0 : 1;
}

int case_gradient(OutputSet& files, Json& summary) {
    Checks checks;
    const NetworkSpec raw = gradient_network(kGradientSeed);
    const Transform2 t{1.0, 2.5, 0.0, 1.0};
    const Transform2 synthesized = passivize(*raw.agents[0].indices, {0.1, 0.0});
    const double t_err = std::max({std::abs(synthesized.a - t.a), std::abs(synthesized.b - t.b),
                                   std::abs(synthesized.c - t.c), std::abs(synthesized.d - t.d)});
    checks.add("T_entries_max_error", t_err, 0.0, 1e-12, kPublished);
    const NetworkSpec net = apply_network_transform(raw, std::vector<Transform2>(raw.agents.size(), t));

    const PlanarRelation& k = *raw.agents[0].steady_state;
    const PlanarRelation& lam = *net.agents[0].steady_state;
    const auto grid = linspace(-20.0, 20.0, 4001);
    const IntegralFunction k_star = integral_function(k, IntegralOf::kKInverse, &grid);
    const IntegralFunction lam_star = integral_function(lam, IntegralOf::kKInverse, &grid);
    const IntegralFunction lam_int = integral_function(lam, IntegralOf::kK, &grid);
    checks.holds("original_relation_not_monotone", !is_monotone(k), kPublished);
    checks.holds("k_star_not_convex", !k_star.convex, kPublished);
    checks.holds("transformed_relation_maximal_monotone", is_maximal_monotone(lam).supported(), kPublished);
    checks.holds("lambda_star_convex", lam_star.convex, kPublished);
    checks.holds("lambda_convex", lam_int.convex, kPublished);

    const SimResult sim_raw = simulate(raw);
    const PredictionReport pred = predict_and_verify(raw, std::vector<Transform2>(raw.agents.size(), t));
    checks.holds("transformed_converged", pred.sim.converged, kComputed);
    checks.at_most("transformed_output_sup_norm", pred.sim.y_end.lpNorm<Eigen::Infinity>(), 1e-3, kPublished);
    checks.at_most("topp_minimizer_sup_norm", pred.topp.primal.lpNorm<Eigen::Infinity>(), 1e-2, kPublished);
    checks.at_most("simulation_vs_topp_gap", pred.gap, 1e-2, kPublished);
    checks.at_least("untransformed_clusters", cluster_count(sim_raw.y_end, 1.0), 2.0, kPublished);

    files.write("k.csv", [&](std::ostream& os) { write_relation_csv(os, k); });
    files.write("lambda.csv", [&](std::ostream& os) { write_relation_csv(os, lam); });
    files.write("k_star.csv", [&](std::ostream& os) { write_integral_csv(os, k_star, "y"); });
    files.write("lambda_star.csv", [&](std::ostream& os) { write_integral_csv(os, lam_star, "y"); });
    files.write("lambda_integral.csv", [&](std::ostream& os) { write_integral_csv(os, lam_int, "u"); });
    files.write("trajectories.csv", [&](std::ostream& os) { write_trajectories_csv(os, pred.sim); });
    files.write("trajectories_untransformed.csv", [&](std::ostream& os) { write_trajectories_csv(os, sim_raw); });

    summary["seed"] = kGradientSeed;
    summary["agents"] = raw.agents.size();
    summary["T"] = matrix_json(t);
    summary["y_end_transformed"] = vector_json(pred.sim.y_end);
    summary["y_end_untransformed"] = vector_json(sim_raw.y_end);
    summary["topp_y"] = vector_json(pred.topp.primal);
    summary["checks"] = checks.items;
    summary["pass"] = checks.all;
    return checks.all ? 0 : 1;
}

int cmd_case_study(const std::string& name, const std::string& outdir, std::ostream& out) {
    if (name != "lti" && name != "gradient-network") {
        throw ExitCode{2};
    }
    OutputSet files(output_dir(outdir) / name);
    Json summary;
    summary["case"] = name;
    const int code = name == "lti" ? case_lti(files, summary) : case_gradient(files, summary);
    files.text("summary.json", summary.dump(2));
    files.manifest("case-study", name, name == "lti" ? std::nullopt : std::optional<std::uint64_t>(kGradientSeed));
    out << summary.dump(2) << '\n';
    return code;
}

int exit_code_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::kTrivialPqi:
        case ErrorCode::kNoStabilizingLambda:
            return 2;
        default:
            return 1;
    }
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Passivizing transformations for equilibrium-independent passive-short systems", "eips"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    PassivizeArgs pa;
    auto* passivize_cmd = app.add_subcommand("passivize", "Synthesize a passivizing loop transformation");
    passivize_cmd->add_option("--rho", pa.rho, "Output passivity index")->required();
    passivize_cmd->add_option("--nu", pa.nu, "Input passivity index")->required();
    passivize_cmd->add_option("--rho-target", pa.rho_target, "Target output index");
    passivize_cmd->add_option("--nu-target", pa.nu_target, "Target input index");
    passivize_cmd->add_option("--digits", pa.digits, "Decimals in the normalized matrix")->check(CLI::Range(0, 15));

    LtiArgs la;
    auto* lti_cmd = app.add_subcommand("analyze-lti", "Passivity indices of a rational transfer function");
    lti_cmd->add_option("--num", la.num, "Numerator, ascending coefficients")->required();
    lti_cmd->add_option("--den", la.den, "Denominator, ascending coefficients")->required();
    lti_cmd->add_option("--lambda", la.lambda, "Fixed lambda; searched when absent");
    lti_cmd->add_option("--lambda-grid", la.grid, "Search grid lo:hi:step");
    lti_cmd->add_option("--mu-bound", la.bound, "linear or squared");
    lti_cmd->add_option("--rho-target", la.rho_target, "Target output index");
    lti_cmd->add_option("--nu-target", la.nu_target, "Target input index");

    NetArgs sa;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a diffusively coupled network");
    sim_cmd->add_option("--spec", sa.spec, "Network JSON document")->required();
    sim_cmd->add_flag("--transform", sa.transform, "Apply the document's transforms first");
    sim_cmd->add_option("--outdir", sa.outdir, "Output directory");

    NetArgs oa;
    auto* opt_cmd = app.add_subcommand("optimize", "Solve the network optimization problem");
    opt_cmd->add_option("--spec", oa.spec, "Network JSON document")->required();
    opt_cmd->add_option("--problem", oa.problem, "opp or ofp");
    opt_cmd->add_flag("--transform", oa.transform, "Apply the document's transforms first");
    opt_cmd->add_option("--outdir", oa.outdir, "Output directory");

    std::string case_name, case_outdir;
    auto* case_cmd = app.add_subcommand("case-study", "Reproduce a case study and check it");
    case_cmd->add_option("name", case_name, "lti or gradient-network")->required();
    case_cmd->add_option("--outdir", case_outdir, "Output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: INVALID_ARGUMENTS: " << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        if (passivize_cmd->parsed()) return cmd_passivize(pa, out);
        if (lti_cmd->parsed()) return cmd_analyze_lti(la, out);
        if (sim_cmd->parsed()) return cmd_simulate(sa, out);
        if (opt_cmd->parsed()) return cmd_optimize(oa, out);
        if (case_cmd->parsed()) return cmd_case_study(case_name, case_outdir, out);
    } catch (const ExitCode&) {
        err << "error: UNKNOWN_CASE: no case study named '" << case_name << "'\n";
        return 2;
    } catch (const Usage& e) {
        err << "error: INVALID_ARGUMENTS: " << one_line(e.what()) << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << reason_code(e.code()) << ": " << one_line(e.what()) << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: INTERNAL: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 2;
}

}  // namespace eips::cli
