#include "corrdet/correlator_design.hpp"
#include "corrdet/errors.hpp"
#include "corrdet/exponents.hpp"
#include "corrdet/extended_detectors.hpp"
#include "corrdet/io.hpp"
#include "corrdet/joint_design.hpp"
#include "corrdet/montecarlo.hpp"
#include "corrdet/optimize.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

using namespace corrdet;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    int figure_id = 0;
};

// Writes to --out when given, otherwise to stdout.
void emit(const Options& opt, const std::function<void(std::ostream&)>& body)
{
    if (opt.out.empty()) {
        body(std::cout);
        return;
    }
    std::ofstream f(opt.out);
    if (!f)
        throw ConfigError("cannot open output file '" + opt.out + "'");
    body(f);
    if (!f)
        throw std::runtime_error("failed writing '" + opt.out + "'");
}

void emit_json(const Options& opt, const Json& j)
{
    emit(opt, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

Json load_config(const Options& opt)
{
    if (opt.config.empty())
        throw ConfigError("this command needs --config");
    return read_json_file(opt.config);
}

double number(const Json& j, const std::string& key)
{
    const auto& v = require(j, key);
    if (!v.is_number())
        throw ConfigError("field '" + key + "' must be a number");
    return v.get<double>();
}

int integer(const Json& j, const std::string& key)
{
    const auto& v = require(j, key);
    if (!v.is_number_integer())
        throw ConfigError("field '" + key + "' must be an integer");
    return v.get<int>();
}

// "theta": number, or "theta_grid": {"start", "stop", "points"}.
std::vector<double> theta_values(const Json& cfg)
{
    if (cfg.contains("theta_grid")) {
        const auto& g = cfg.at("theta_grid");
        const int points = integer(g, "points");
        if (points < 1)
            throw ConfigError("theta_grid.points must be >= 1");
        return linspace(number(g, "start"), number(g, "stop"), points);
    }
    return {number(cfg, "theta")};
}

PowerBudget budget_of(const Json& cfg)
{
    return budget_from_json(cfg.contains("budget") ? cfg.at("budget") : Json());
}

int cmd_cgf(const Options& opt)
{
    const auto cfg = load_config(opt);
    const auto model = model_from_json(require(cfg, "model"));
    std::vector<double> vs;
    if (cfg.contains("v")) {
        for (const auto& v : cfg.at("v")) {
            if (!v.is_number())
                throw ConfigError("'v' must be an array of numbers");
            vs.push_back(v.get<double>());
        }
    } else {
        const auto& g = require(cfg, "v_grid");
        vs = linspace(number(g, "start"), number(g, "stop"), integer(g, "points"));
    }
    std::vector<std::vector<double>> rows;
    for (double v : vs)
        rows.push_back({v, cgf_eval(model, v), cgf_deriv(model, v)});
    emit(opt, [&](std::ostream& os) { write_csv(os, {"v", "cgf", "cdot"}, rows); });
    return 0;
}

int cmd_fa(const Options& opt)
{
    const auto cfg = load_config(opt);
    const auto budget = budget_of(cfg);
    std::vector<std::vector<double>> rows;
    for (double theta : theta_values(cfg))
        rows.push_back({theta, fa_exponent(theta, budget)});
    emit(opt, [&](std::ostream& os) { write_csv(os, {"theta", "e_fa"}, rows); });
    return 0;
}

int cmd_md(const Options& opt)
{
    const auto cfg = load_config(opt);
    const auto model = model_from_json(require(cfg, "model"));
    const auto budget = budget_of(cfg);
    const auto joint = joint_from_json(require(cfg, "joint"));
    std::vector<std::vector<double>> rows;
    for (double theta : theta_values(cfg)) {
        const auto r = md_exponent(joint, theta, budget, model);
        rows.push_back({theta, r.value, r.lambda_star});
    }
    emit(opt, [&](std::ostream& os) { write_csv(os, {"theta", "e_md", "lambda_star"}, rows); });
    return 0;
}

int cmd_design(const Options& opt)
{
    const auto cfg = load_config(opt);
    const auto model = model_from_json(require(cfg, "model"));
    const auto budget = budget_of(cfg);
    const auto signal = signal_from_json(require(cfg, "signal"));
    if (cfg.contains("theta_grid")) {
        const auto classical = design_classical(signal, budget);
        std::vector<std::vector<double>> rows;
        for (double theta : theta_values(cfg)) {
            const auto opt_design = design_optimal(model, signal, theta, budget);
            rows.push_back({theta, fa_exponent(theta, budget), md_exponent(classical, theta, budget, model).value,
                            opt_design.e_md.value});
        }
        emit(opt, [&](std::ostream& os) {
            write_csv(os, {"theta", "e_fa", "e_md_classical", "e_md_optimal"}, rows);
        });
        return 0;
    }
    const double theta = number(cfg, "theta");
    const std::string method = cfg.value("method", std::string("optimal"));
    DetectorDesign d;
    if (method == "optimal") {
        d = design_optimal(model, signal, theta, budget);
    } else if (method == "classical" || method == "binary") {
        d.joint = method == "classical" ? design_classical(signal, budget) : design_binary(signal, budget);
        d.theta = theta;
        d.e_fa = fa_exponent(theta, budget);
        d.e_md = md_exponent(d.joint, theta, budget, model);
    } else {
        throw ConfigError("unknown design method '" + method + "' (expected optimal, classical or binary)");
    }
    emit_json(opt, to_json(d));
    return 0;
}

int cmd_quantize(const Options& opt)
{
    const auto cfg = load_config(opt);
    const auto model = model_from_json(require(cfg, "model"));
    const auto budget = budget_of(cfg);
    const auto signal = signal_from_json(require(cfg, "signal"));
    const auto q = design_quantized(model, signal, integer(cfg, "k"), number(cfg, "theta"), budget);
    emit_json(opt, to_json(q));
    return 0;
}

int cmd_joint(const Options& opt)
{
    const auto cfg = load_config(opt);
    const auto model = model_from_json(require(cfg, "model"));
    const auto budget = budget_of(cfg);
    JointSearchOptions search;
    if (cfg.contains("p_cap"))
        search.p_cap = number(cfg, "p_cap");
    const auto r = joint_md_exponent(model, budget, number(cfg, "theta"), search);
    auto j = to_json(r);
    j["atoms"] = to_json(r.atoms());
    emit_json(opt, j);
    return 0;
}

int cmd_roots(const Options& opt)
{
    const auto cfg = load_config(opt);
    const auto model = model_from_json(require(cfg, "model"));
    const double lambda = number(cfg, "lambda");
    const double kappa = number(cfg, "kappa");
    std::optional<double> w_max;
    if (cfg.contains("w_max"))
        w_max = number(cfg, "w_max");
    const auto levels = stationary_levels(model, lambda, kappa, w_max);

    double plot_max = w_max.value_or(std::isfinite(cgf_limit(model)) ? 0.99 * cgf_limit(model) / lambda : 10.0);
    const int points = cfg.contains("points") ? integer(cfg, "points") : 500;
    std::vector<std::vector<double>> rows;
    for (double w : linspace(0.0, plot_max, points))
        rows.push_back({w, cgf_deriv(model, lambda * w), kappa * w});
    emit(opt, [&](std::ostream& os) { write_csv(os, {"w", "cdot", "linear"}, rows); });
    if (!opt.out.empty()) {
        Json j{{"kappa", levels.kappa}, {"roots", levels.roots}, {"continuum", levels.continuum}};
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_extended(const Options& opt)
{
    const auto cfg = load_config(opt);
    const auto model = model_from_json(require(cfg, "model"));
    const auto budget = budget_of(cfg);
    const auto joint = joint_from_json(require(cfg, "joint"));
    const auto& kind_field = require(cfg, "kind");
    if (!kind_field.is_string())
        throw ConfigError("'kind' must be \"energy\" or \"abs\"");
    DetectorKind kind;
    try {
        kind = detector_kind_from_string(kind_field.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const double theta = number(cfg, "theta");

    if (cfg.contains("sweep")) {
        const auto& sw = cfg.at("sweep");
        std::optional<std::vector<double>> alphas;
        if (sw.contains("alphas"))
            alphas = sw.at("alphas").get<std::vector<double>>();
        const auto r = sweep_alpha_fixed_fa(model, joint, number(sw, "e_fa_target"), kind, theta, budget, alphas);
        std::vector<std::vector<double>> rows;
        for (const auto& p : r.points)
            rows.push_back({p.alpha, p.p_w, p.e_fa, p.e_md.value});
        emit(opt, [&](std::ostream& os) { write_csv(os, {"alpha", "p_w", "e_fa", "e_md"}, rows); });
        return 0;
    }

    const double alpha = number(cfg, "alpha");
    const ExtendedDetectorSpec spec{joint, alpha, theta, kind};
    ExponentResult fa, md;
    if (kind == DetectorKind::energy) {
        fa = fa_exponent_energy(theta, budget, alpha);
        md = md_exponent_energy(spec, budget, model);
    } else {
        fa = fa_exponent_abs(theta, budget, alpha, joint);
        md = md_exponent_abs(spec, budget, model);
    }
    emit_json(opt, Json{{"kind", to_string(kind)}, {"alpha", alpha}, {"theta", theta}, {"e_fa", to_json(fa)},
                        {"e_md", to_json(md)}});
    return 0;
}

int cmd_simulate(const Options& opt)
{
    const auto cfg = load_config(opt);
    const auto model = model_from_json(require(cfg, "model"));
    const auto budget = budget_of(cfg);
    const auto joint = joint_from_json(require(cfg, "joint"));
    const double theta = number(cfg, "theta");
    SimConfig sim;
    if (cfg.contains("n_values"))
        sim.n_values = cfg.at("n_values").get<std::vector<int>>();
    if (cfg.contains("trials"))
        sim.trials = integer(cfg, "trials");
    if (cfg.contains("seed"))
        sim.seed = cfg.at("seed").get<std::uint64_t>();
    if (opt.seed)
        sim.seed = *opt.seed;
    sim.threads = opt.threads;
    // "tilt": number, or "auto" for the Chernoff optimizer of the pattern.
    const auto tilt = cfg.value("tilt", Json("auto"));
    if (tilt.is_string() && tilt.get<std::string>() == "auto")
        sim.tilt_lambda = md_exponent(joint, theta, budget, model).lambda_star;
    else if (tilt.is_number())
        sim.tilt_lambda = tilt.get<double>();
    else
        throw ConfigError("'tilt' must be a number or \"auto\"");
    try {
        sim.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    // Each atom contributes round(weight * 1000) entries to the tiled pattern,
    // reduced by the common divisor so short blocks see every atom.
    std::vector<long> counts;
    long common = 0;
    for (Eigen::Index i = 0; i < joint.size(); ++i) {
        counts.push_back(std::lround(joint.weight()[i] * 1000.0));
        common = std::gcd(common, counts.back());
    }
    std::vector<double> w, s;
    for (Eigen::Index i = 0; i < joint.size(); ++i) {
        const long reps = common > 0 ? counts[static_cast<std::size_t>(i)] / common : 0;
        for (long r = 0; r < reps; ++r) {
            w.push_back(joint.w()[i]);
            s.push_back(joint.s()[i]);
        }
    }
    if (cfg.contains("pattern")) {
        const auto& p = cfg.at("pattern");
        w = p.at("w").get<std::vector<double>>();
        s = p.at("s").get<std::vector<double>>();
    }
    const Eigen::ArrayXd wa = Eigen::Map<const Eigen::ArrayXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    const Eigen::ArrayXd sa = Eigen::Map<const Eigen::ArrayXd>(s.data(), static_cast<Eigen::Index>(s.size()));
    const auto per_n = md_probability(model, wa, sa, theta, sim, budget);
    double slope = std::numeric_limits<double>::quiet_NaN();
    try {
        slope = estimate_slope(per_n).slope;
    } catch (const InsufficientData& e) {
        std::cerr << "warning: " << e.what() << '\n';
    }
    std::vector<std::vector<double>> rows;
    for (const auto& p : per_n)
        rows.push_back({static_cast<double>(p.n), p.prob, p.prob * p.rel_stderr, slope});
    emit(opt, [&](std::ostream& os) { write_csv(os, {"n", "prob", "stderr", "slope"}, rows); });
    return 0;
}

int cmd_figure(const Options& opt)
{
    const PowerBudget budget{1.0, std::nullopt, 1.0};
    const double a = 4.0;
    if (opt.figure_id == 4) {
        const NoiseModel model = MixtureBinaryLaplace{0.95, 0.5, 5.0};
        std::vector<std::vector<double>> rows;
        for (double w : linspace(0.0, 4.95, 500))
            rows.push_back({w, cgf_deriv(model, w), 0.13 * w});
        emit(opt, [&](std::ostream& os) { write_csv(os, {"w", "cdot_curve", "linear_line"}, rows); });
        return 0;
    }
    NoiseModel model;
    switch (opt.figure_id) {
    case 1:
        model = BinarySymmetric{7.0};
        break;
    case 2:
        model = Uniform{7.0};
        break;
    case 3:
        model = Laplacian{0.1};
        break;
    default:
        throw ConfigError("figure id must be 1, 2, 3 or 4");
    }
    // 4-ASK levels +-a, +-3a give E{S^2} = 5 a^2; the grid ends at sqrt(P_w E{S^2}).
    const double classical_alpha = std::sqrt(budget.p_w / 5.0);
    const double top = std::sqrt(budget.p_w * 5.0 * a * a);
    std::vector<std::vector<double>> rows;
    for (double theta : linspace(0.0, top, 200)) {
        const double classical = four_ask_exponent(model, a, classical_alpha, theta, budget).value;
        const double optimal = design_4ask(model, a, theta, budget).e_md.value;
        rows.push_back({theta, classical, optimal});
    }
    emit(opt, [&](std::ostream& os) { write_csv(os, {"theta", "e_md_classical", "e_md_optimal"}, rows); });
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Correlation detector design under signal-induced noise"};
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed = 0;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"cgf", "CGF and its derivative on a grid of v"},
        {"fa", "false-alarm exponent over theta"},
        {"md", "missed-detection exponent of given (w, s) atoms"},
        {"design", "optimal, classical or binary correlator for a signal"},
        {"quantize", "k-level quantized correlator"},
        {"joint", "joint signal/correlator design"},
        {"roots", "stationary levels and the cdot/linear curves"},
        {"extended", "energy or absolute-value detector exponents"},
        {"simulate", "Monte Carlo missed-detection probabilities and slope"},
        {"figure", "regenerate the data behind figures 1-4"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "JSON config file");
        sub->add_option("--out", opt.out, "output file (default: stdout)");
        auto* seed_opt = sub->add_option("--seed", seed, "RNG seed");
        seed_opt->each([&](const std::string&) { opt.seed = seed; });
        sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
        if (name == "figure")
            sub->add_option("--id", opt.figure_id, "figure number 1-4")->required();
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const std::map<std::string, std::function<int(const Options&)>> handlers{
        {"cgf", cmd_cgf},           {"fa", cmd_fa},         {"md", cmd_md},           {"design", cmd_design},
        {"quantize", cmd_quantize}, {"joint", cmd_joint},   {"roots", cmd_roots},     {"extended", cmd_extended},
        {"simulate", cmd_simulate}, {"figure", cmd_figure},
    };
    try {
        for (const auto& [name, sub] : subs)
            if (sub->parsed())
                return handlers.at(name)(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DegenerateTilt& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitConfig;
}
