#include "corrdet/joint_design.hpp"

#include "corrdet/errors.hpp"
#include "corrdet/exponents.hpp"
#include "corrdet/optimize.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace corrdet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_positive(double x, const char* what)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}

// Largest power p with lambda sqrt(p) strictly inside the CGF domain.
double power_limit(const NoiseModel& model, double lambda)
{
    const double lim = cgf_limit(model);
    if (std::isinf(lim))
        return std::numeric_limits<double>::infinity();
    const double w = lim / lambda * (1.0 - 1e-12);
    return w * w;
}

}  // namespace

std::string to_string(Curvature c)
{
    switch (c) {
    case Curvature::convex:
        return "convex";
    case Curvature::concave:
        return "concave";
    case Curvature::mixed:
        return "mixed";
    }
    return "unknown";
}

Curvature classify_curvature(const NoiseModel& model, double lambda, double p_max)
{
    require_positive(lambda, "lambda");
    require_positive(p_max, "p_max");
    if (p_max > power_limit(model, lambda))
        throw DomainError("classify_curvature: lambda sqrt(p_max) reaches the CGF pole");
    constexpr int n = 10000;
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i)
        h[static_cast<std::size_t>(i)] = cgf_eval(model, lambda * std::sqrt(p_max * i / (n - 1)));
    bool pos = false, neg = false;
    for (std::size_t i = 1; i + 1 < h.size(); ++i) {
        const double d2 = h[i + 1] + h[i - 1] - 2.0 * h[i];
        const double tol = 1e-10 * std::max(1.0, std::abs(h[i]));
        pos = pos || d2 > tol;
        neg = neg || d2 < -tol;
    }
    if (pos && neg)
        return Curvature::mixed;
    return neg ? Curvature::concave : Curvature::convex;
}

StationaryLevels stationary_levels(const NoiseModel& model, double lambda, double kappa, std::optional<double> w_max,
                                   int grid_points)
{
    require_positive(lambda, "lambda");
    require_positive(kappa, "kappa");
    StationaryLevels out{kappa, {0.0}, false};
    if (const auto* g = std::get_if<Gaussian>(&model)) {
        const double slope = g->var_z * lambda;
        out.continuum = std::abs(slope - kappa) <= 1e-12 * std::max(slope, kappa);
        return out;
    }
    double hi;
    if (w_max) {
        hi = *w_max;
    } else {
        const double lim = cgf_limit(model);
        if (std::isfinite(lim)) {
            hi = lim / lambda * (1.0 - 1e-12);
        } else {
            // Binary and uniform: |C'| <= z0, so no root beyond z0 / kappa.
            const double z0 = std::holds_alternative<BinarySymmetric>(model) ? std::get<BinarySymmetric>(model).z0
                                                                            : std::get<Uniform>(model).z0;
            hi = 2.0 * z0 / kappa;
        }
    }
    auto f = [&](double w) { return cgf_deriv(model, lambda * w) - kappa * w; };
    const auto grid = linspace(0.0, hi, grid_points);
    double prev_w = grid[1];
    double prev_f = f(prev_w);
    if (prev_f == 0.0)
        out.roots.push_back(prev_w);
    for (std::size_t i = 2; i < grid.size(); ++i) {
        const double w = grid[i];
        const double fw = f(w);
        if (fw == 0.0) {
            out.roots.push_back(w);
        } else if (prev_f != 0.0 && (fw > 0.0) != (prev_f > 0.0)) {
            std::uintmax_t iters = 200;
            const auto br = boost::math::tools::toms748_solve(f, prev_w, w, prev_f, fw,
                                                              boost::math::tools::eps_tolerance<double>(52), iters);
            out.roots.push_back(0.5 * (br.first + br.second));
        }
        prev_w = w;
        prev_f = fw;
    }
    return out;
}

CgfEnvelope::CgfEnvelope(const NoiseModel& model, double lambda, double p_cap)
    : model_(model), lambda_(lambda), p_cap_(p_cap)
{
    require_positive(lambda, "lambda");
    require_positive(p_cap, "p_cap");
    if (p_cap > power_limit(model, lambda)) {
        std::ostringstream msg;
        msg << "envelope cap " << p_cap << " puts lambda sqrt(p) past the CGF pole";
        throw DomainError(msg.str());
    }
    const double u_cap = lambda * lambda * p_cap;
    std::vector<double> u{0.0};
    for (double x : logspace(u_cap * 1e-12, u_cap, 5000))
        u.push_back(std::min(x, u_cap));
    for (double x : linspace(u_cap / 5000.0, u_cap, 5000))
        u.push_back(std::min(x, u_cap));
    u.back() = u_cap;
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    std::vector<double> h(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        h[i] = cgf_eval(model, std::sqrt(u[i]));
    hull_ = LowerHull(u, h);
}

EnvelopeValue CgfEnvelope::at(double p) const
{
    if (p < 0.0 || p > p_cap_ * (1.0 + 1e-12))
        throw std::invalid_argument("envelope evaluated outside [0, p_cap]");
    p = std::min(p, p_cap_);
    const double l2 = lambda_ * lambda_;
    const auto seg = hull_.at(l2 * p);
    // The hull is built on a grid; p itself is a candidate support point.
    const double direct = cgf_eval(model_, lambda_ * std::sqrt(p));
    if (seg.left == seg.right || direct <= seg.value + 1e-12 * std::max(1.0, std::abs(seg.value)))
        return {std::min(direct, seg.value), p, p, 1.0};
    return {seg.value, hull_.x()[seg.left] / l2, hull_.x()[seg.right] / l2, seg.t};
}

EnvelopeValue c_tilde(const NoiseModel& model, double lambda, double p, double p_cap)
{
    if (p > p_cap)
        throw std::invalid_argument("c_tilde: p exceeds p_cap");
    return CgfEnvelope(model, lambda, p_cap).at(p);
}

JointAtoms JointDesignResult::atoms() const
{
    const double sa = signal_scale * a;
    const double sb = signal_scale * b;
    if (a == b) {
        Eigen::ArrayXd w(2), s(2), p(2);
        w << b, -b;
        s << sb, -sb;
        p << 0.5, 0.5;
        return {w, s, p};
    }
    Eigen::ArrayXd w(4), s(4), p(4);
    w << a, -a, b, -b;
    s << sa, -sa, sb, -sb;
    p << 0.5 * (1.0 - mix_alpha), 0.5 * (1.0 - mix_alpha), 0.5 * mix_alpha, 0.5 * mix_alpha;
    return {w, s, p};
}

namespace {

struct GridPoint {
    double lambda = 0.0;
    double power = 0.0;
    double value = kNegInf;
    std::size_t i = 0, j = 0;
};

struct JointProblem {
    const NoiseModel& model;
    double p_s;
    double p_w;
    double var_n;
    double theta;
    double p_cap;

    std::optional<CgfEnvelope> envelope(double lambda) const
    {
        const double cap = std::min(p_cap, power_limit(model, lambda));
        if (!(cap > 0.0))
            return std::nullopt;
        return CgfEnvelope(model, lambda, cap);
    }

    double objective(const CgfEnvelope& env, double power) const
    {
        if (power > env.p_cap())
            return kNegInf;
        const double l = env.lambda();
        return l * (std::sqrt(p_s * power) - theta) - env.at(power).value - 0.5 * l * l * var_n * power;
    }

    GridPoint search(const std::vector<double>& lambdas, const std::vector<double>& powers) const
    {
        GridPoint best;
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            const auto env = envelope(lambdas[i]);
            if (!env)
                continue;
            for (std::size_t j = 0; j < powers.size(); ++j) {
                const double v = objective(*env, powers[j]);
                if (v > best.value)
                    best = {lambdas[i], powers[j], v, i, j};
            }
        }
        return best;
    }
};

std::vector<double> power_grid(double lo, double hi, double p_w, int n)
{
    auto g = logspace(lo, std::min(hi, p_w), n);
    for (auto& p : g)
        p = std::min(p, p_w);
    if (hi >= p_w)
        g.back() = p_w;
    return g;
}

JointDesignResult solve_joint(const NoiseModel& model, const PowerBudget& budget, double theta, double p_cap)
{
    const double p_s = budget.signal_power();
    const JointProblem prob{model, p_s, budget.p_w, budget.var_n, theta, p_cap};
    const double lambda_ref = std::sqrt(p_s / budget.p_w) / budget.var_n;

    auto lambdas = logspace(1e-5 * lambda_ref, 10.0 * lambda_ref, 100);
    auto powers = power_grid(1e-4 * budget.p_w, budget.p_w, budget.p_w, 100);
    GridPoint best = prob.search(lambdas, powers);
    for (int round = 0; round < 3 && best.value > kNegInf; ++round) {
        const double l_lo = lambdas[best.i == 0 ? 0 : best.i - 1];
        const double l_hi = lambdas[std::min(best.i + 1, lambdas.size() - 1)];
        const double p_lo = powers[best.j == 0 ? 0 : best.j - 1];
        const double p_hi = powers[std::min(best.j + 1, powers.size() - 1)];
        lambdas = logspace(l_lo, l_hi, 21);
        powers = power_grid(p_lo, p_hi, budget.p_w, 21);
        const auto next = prob.search(lambdas, powers);
        if (next.value >= best.value)
            best = next;
        else
            break;
    }

    JointDesignResult out;
    out.p_cap = p_cap;
    if (!(best.value > 0.0)) {
        out.p_star = budget.p_w;
        out.a = out.b = std::sqrt(budget.p_w);
        out.mix_alpha = 1.0;
        out.signal_scale = std::sqrt(p_s / budget.p_w);
        const double l = lambda_ref;
        out.curvature = classify_curvature(model, l, std::min(p_cap, power_limit(model, l)));
        return out;
    }
    const auto env = prob.envelope(best.lambda);
    const auto ev = env->at(best.power);
    out.e_md = best.value;
    out.lambda_star = best.lambda;
    out.p_star = best.power;
    out.a = std::sqrt(ev.p0);
    out.b = std::sqrt(ev.p1);
    out.mix_alpha = ev.mix_alpha;
    out.signal_scale = std::sqrt(p_s / best.power);
    out.c_tilde = ev.value;
    out.curvature = classify_curvature(model, best.lambda, env->p_cap());
    return out;
}

}  // namespace

JointDesignResult joint_md_exponent(const NoiseModel& model, const PowerBudget& budget, double theta,
                                    const JointSearchOptions& options)
{
    budget.validate();
    const double p_cap = options.p_cap.value_or(1e6 * budget.p_w);
    require_positive(p_cap, "p_cap");
    auto out = solve_joint(model, budget, theta, p_cap);
    if (options.check_cap) {
        const auto doubled = solve_joint(model, budget, theta, 2.0 * p_cap);
        out.cap_converged = std::abs(doubled.e_md - out.e_md) < 1e-6;
    }
    return out;
}

JointDesignResult two_level_direct(const NoiseModel& model, const PowerBudget& budget, double theta,
                                   std::optional<double> p1_max)
{
    budget.validate();
    const double p_w = budget.p_w;
    const double p_s = budget.signal_power();
    const double ratio = std::sqrt(p_s / p_w);
    const double p1_top = p1_max.value_or(1e6 * p_w);

    struct Candidate {
        double p0 = 0.0, p1 = 0.0, mix = 1.0;
        ExponentResult e;
        double a_lo = 0.0, a_hi = 0.0, b_lo = 0.0, b_hi = 0.0;  // neighbouring grid values
        bool valid = false;
    };
    auto evaluate = [&](double p0, double p1) {
        Candidate c;
        // Refinement grids may overshoot P_w by rounding.
        c.p0 = p0 = std::min(p0, p_w);
        c.p1 = p1 = std::max(p1, p_w);
        c.mix = p1 > p0 ? (p_w - p0) / (p1 - p0) : 1.0;
        const double a = std::sqrt(p0), b = std::sqrt(p1);
        Eigen::ArrayXd w(2), s(2), p(2);
        w << a, b;
        s << ratio * a, ratio * b;
        p << 1.0 - c.mix, c.mix;
        c.e = md_exponent(JointAtoms(w, s, p), theta, budget, model);
        c.valid = true;
        return c;
    };
    auto search = [&](const std::vector<double>& p0s, const std::vector<double>& p1s) {
        Candidate best;
        for (std::size_t i = 0; i < p0s.size(); ++i)
            for (std::size_t j = 0; j < p1s.size(); ++j) {
                auto c = evaluate(p0s[i], p1s[j]);
                c.a_lo = p0s[i == 0 ? 0 : i - 1];
                c.a_hi = p0s[std::min(i + 1, p0s.size() - 1)];
                c.b_lo = p1s[j == 0 ? 0 : j - 1];
                c.b_hi = p1s[std::min(j + 1, p1s.size() - 1)];
                if (!best.valid || c.e.value > best.e.value)
                    best = c;
            }
        return best;
    };

    auto p0s = linspace(0.0, p_w, 41);
    auto p1s = logspace(p_w, p1_top, 41);
    p0s.back() = p_w;
    p1s.front() = p_w;
    auto best = search(p0s, p1s);
    for (int round = 0; round < 3; ++round) {
        p0s = linspace(best.a_lo, best.a_hi, 11);
        p1s = logspace(best.b_lo, best.b_hi, 11);
        const auto next = search(p0s, p1s);
        if (next.e.value >= best.e.value)
            best = next;
    }

    JointDesignResult out;
    out.e_md = best.e.value;
    out.lambda_star = best.e.lambda_star;
    out.p_star = p_w;
    const bool single = best.p1 <= best.p0 || best.mix >= 1.0 || best.mix <= 0.0;
    if (single) {
        const double level = best.mix <= 0.0 ? best.p0 : best.p1;
        out.a = out.b = std::sqrt(level);
        out.mix_alpha = 1.0;
    } else {
        out.a = std::sqrt(best.p0);
        out.b = std::sqrt(best.p1);
        out.mix_alpha = best.mix;
    }
    out.signal_scale = ratio;
    out.c_tilde = (1.0 - out.mix_alpha) * cgf_eval(model, out.lambda_star * out.a) +
                  out.mix_alpha * cgf_eval(model, out.lambda_star * out.b);
    out.p_cap = p1_top;
    if (out.lambda_star > 0.0)
        out.curvature = classify_curvature(model, out.lambda_star, std::min(p1_top, power_limit(model, out.lambda_star)));
    return out;
}

}  // namespace corrdet
