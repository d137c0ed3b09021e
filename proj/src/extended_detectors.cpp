#include "corrdet/extended_detectors.hpp"

#include "corrdet/errors.hpp"
#include "corrdet/optimize.hpp"
#include "corrdet/quadrature.hpp"
#include "corrdet/special.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace corrdet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Gaussian envelopes are cut where they fall below e^-37.
constexpr double kTailExponent = 37.0;

void require_var_n(double var_n)
{
    if (!(var_n > 0.0) || !std::isfinite(var_n))
        throw std::invalid_argument("var_n must be finite and > 0");
}

void require_alpha_lambda(double alpha, double lambda)
{
    if (!(alpha > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("alpha and lambda must be > 0");
}

ExponentResult to_result(const ScalarMax& m)
{
    ExponentResult r;
    r.value = std::max(m.value, 0.0);
    r.lambda_star = m.value > 0.0 ? m.x : 0.0;
    r.iterations = m.iterations;
    r.bracket_lo = m.bracket_lo;
    r.bracket_hi = m.bracket_hi;
    return r;
}

double fa_energy_objective(double lambda, double theta, double p_w, double var_n, double alpha)
{
    const double shrink = 1.0 - 2.0 * alpha * lambda * var_n;
    if (!(shrink > 0.0))
        return -kInf;
    return lambda * theta - lambda * lambda * var_n * p_w / (2.0 * shrink) + 0.5 * std::log(shrink);
}

// Allows p_w = 0, where the correlation part vanishes.
ExponentResult fa_energy(double theta, double p_w, double var_n, double alpha)
{
    if (alpha < kAlphaFloor) {
        ExponentResult r;
        if (theta <= 0.0)
            return r;
        if (p_w <= 0.0) {
            r.value = kInf;
            r.lambda_star = kInf;
            return r;
        }
        r.value = theta * theta / (2.0 * var_n * p_w);
        r.lambda_star = theta / (var_n * p_w);
        return r;
    }
    auto f = [&](double l) { return fa_energy_objective(l, theta, p_w, var_n, alpha); };
    return to_result(maximize_concave_from_zero(f, 1.0 / (2.0 * alpha * var_n)));
}

double positive_weight_max_abs(const Eigen::ArrayXd& x, const Eigen::ArrayXd& weight)
{
    double m = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (weight[i] > 0.0)
            m = std::max(m, std::abs(x[i]));
    return m;
}

double log_of_positive(double x, const char* what)
{
    if (!(x > 0.0))
        throw QuadratureFailure(std::string(what) + ": integral is not positive, cannot take its logarithm");
    return std::log(x);
}

// ln E{exp(-v X - c |s + X|)} - var_n v^2 / 2 for X ~ N(0, var_z + var_n).
double c_alpha_abs_gaussian(double var_z, double v, double s, double c, double var_n)
{
    const double tau2 = var_z + var_n;
    const double tau = std::sqrt(tau2);
    const double kp = v + c;
    const double km = v - c;
    const double upper = -kp * s + 0.5 * kp * kp * tau2 + log_phi((s - kp * tau2) / tau);
    const double lower = -km * s + 0.5 * km * km * tau2 + log_phi(-(s - km * tau2) / tau);
    return v * s + log_sum_exp(upper, lower) - 0.5 * var_n * v * v;
}

}  // namespace

std::string to_string(DetectorKind kind)
{
    return kind == DetectorKind::energy ? "energy" : "abs";
}

DetectorKind detector_kind_from_string(const std::string& name)
{
    if (name == "energy")
        return DetectorKind::energy;
    if (name == "abs")
        return DetectorKind::abs;
    throw std::invalid_argument("unknown detector kind '" + name + "' (expected energy or abs)");
}

ExponentResult fa_exponent_energy(double theta, const PowerBudget& budget, double alpha)
{
    budget.validate();
    if (alpha < 0.0)
        throw std::invalid_argument("alpha must be >= 0");
    return fa_energy(theta, budget.p_w, budget.var_n, alpha);
}

double c_alpha_energy_gaussian(double var_z, double v, double alpha, double lambda, double var_n)
{
    const double a = alpha * lambda;
    const double s2 = var_z + var_n;
    const double d = 1.0 + 2.0 * a * s2;
    return -0.5 * std::log(d) + v * v * s2 / (2.0 * d) - 0.5 * var_n * v * v;
}

double c_alpha_energy(const NoiseModel& model, double v, double alpha, double lambda, double var_n)
{
    require_alpha_lambda(alpha, lambda);
    require_var_n(var_n);
    const double base = cgf_eval(model, v);
    const double a = alpha * lambda;
    const double b = 0.5 * var_n + 1.0 / (4.0 * a);
    const double upper = std::sqrt(kTailExponent / b);
    const double scale = 2.0 / std::sqrt(4.0 * std::numbers::pi * a);
    auto f = [&](double q) {
        const auto phase = std::exp(std::complex<double>(0.0, -var_n * v * q));
        return scale * std::real(mgf_ratio(model, -v, q) * phase) * std::exp(-b * q * q);
    };
    std::vector<double> pts{0.0};
    for (double frac : {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0})
        pts.push_back(frac * upper);
    const auto r = integrate_pieces(f, pts);
    return base + log_of_positive(r.value, "c_alpha_energy");
}

ExponentResult md_exponent_energy(const ExtendedDetectorSpec& spec, const PowerBudget& budget,
                                  const NoiseModel& model)
{
    if (spec.kind != DetectorKind::energy)
        throw std::invalid_argument("md_exponent_energy needs an energy detector");
    if (spec.alpha < 0.0)
        throw std::invalid_argument("alpha must be >= 0");
    require_var_n(budget.var_n);
    const auto& j = spec.joint;
    if (spec.alpha < kAlphaFloor)
        return md_exponent(j, spec.theta, budget, model);

    const double alpha = spec.alpha;
    const double var_n = budget.var_n;
    const Eigen::ArrayXd u = j.w() + 2.0 * alpha * j.s();
    const double drift = j.correlation() + alpha * j.s_power() - spec.theta;
    const auto* gauss = std::get_if<Gaussian>(&model);
    auto objective = [&](double lambda) {
        if (lambda <= 0.0)
            return 0.0;
        double value = lambda * drift;
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double p = j.weight()[i];
            if (p == 0.0)
                continue;
            const double v = lambda * u[i];
            const double c = gauss ? c_alpha_energy_gaussian(gauss->var_z, v, alpha, lambda, var_n)
                                   : c_alpha_energy(model, v, alpha, lambda, var_n);
            value -= p * (c + 0.5 * var_n * v * v);
        }
        return value;
    };
    const double max_u = positive_weight_max_abs(u, j.weight());
    const double limit = max_u > 0.0 ? lambda_limit(model, max_u) : kInf;
    return to_result(maximize_concave_from_zero(objective, limit));
}

ExponentResult fa_exponent_abs(double theta, const PowerBudget& budget, double alpha, const JointAtoms& joint)
{
    require_var_n(budget.var_n);
    if (alpha < 0.0)
        throw std::invalid_argument("alpha must be >= 0");
    const double var_n = budget.var_n;
    if (alpha < kAlphaFloor)
        return fa_energy(theta, joint.w_power(), var_n, 0.0);
    const double sigma = std::sqrt(var_n);
    const auto& w = joint.w();
    const auto& p = joint.weight();
    auto objective = [&](double lambda) {
        if (lambda <= 0.0)
            return 0.0;
        double value = lambda * theta;
        const double l2 = lambda * lambda * var_n;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            if (p[i] == 0.0)
                continue;
            const double wi = w[i];
            const double mix = log_sum_exp(l2 * wi * alpha + log_phi(lambda * sigma * (wi + alpha)),
                                           -l2 * wi * alpha + log_q(lambda * sigma * (wi - alpha)));
            value -= p[i] * (0.5 * l2 * (wi * wi + alpha * alpha) + mix);
        }
        return value;
    };
    return to_result(maximize_concave_from_zero(objective));
}

double c_alpha_abs(const NoiseModel& model, double v, double s, double alpha, double lambda, double var_n)
{
    require_alpha_lambda(alpha, lambda);
    require_var_n(var_n);
    const double base = cgf_eval(model, v);
    const double c = alpha * lambda;
    const double upper = std::sqrt(2.0 * kTailExponent / var_n);
    const double shift = s - var_n * v;
    auto f = [&](double q) {
        const auto phase = std::exp(std::complex<double>(0.0, shift * q));
        const double kernel = 2.0 * c / std::numbers::pi * std::exp(-0.5 * var_n * q * q) / (q * q + c * c);
        return kernel * std::real(mgf_ratio(model, -v, q) * phase);
    };
    std::vector<double> pts{0.0};
    for (double x = 1e-2 * c; x < upper; x *= 10.0)
        pts.push_back(x);
    for (double frac : {1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0})
        pts.push_back(frac * upper);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const auto r = integrate_pieces(f, pts);
    return base + log_of_positive(r.value, "c_alpha_abs");
}

ExponentResult md_exponent_abs(const ExtendedDetectorSpec& spec, const PowerBudget& budget, const NoiseModel& model)
{
    if (spec.kind != DetectorKind::abs)
        throw std::invalid_argument("md_exponent_abs needs an abs detector");
    if (spec.alpha < 0.0)
        throw std::invalid_argument("alpha must be >= 0");
    require_var_n(budget.var_n);
    const auto& j = spec.joint;
    if (spec.alpha < kAlphaFloor)
        return md_exponent(j, spec.theta, budget, model);

    const double alpha = spec.alpha;
    const double var_n = budget.var_n;
    const double drift = j.correlation() - spec.theta;
    const auto* gauss = std::get_if<Gaussian>(&model);
    auto objective = [&](double lambda) {
        if (lambda <= 0.0)
            return 0.0;
        double value = lambda * drift;
        for (Eigen::Index i = 0; i < j.size(); ++i) {
            const double p = j.weight()[i];
            if (p == 0.0)
                continue;
            const double v = lambda * j.w()[i];
            const double c = gauss ? c_alpha_abs_gaussian(gauss->var_z, v, j.s()[i], alpha * lambda, var_n)
                                   : c_alpha_abs(model, v, j.s()[i], alpha, lambda, var_n);
            value -= p * (c + 0.5 * var_n * v * v);
        }
        return value;
    };
    return to_result(maximize_concave_from_zero(objective, lambda_limit(model, j.max_abs_w())));
}

AlphaSweep sweep_alpha_fixed_fa(const NoiseModel& model, const JointAtoms& joint, double e_fa_target,
                                DetectorKind kind, double theta, const PowerBudget& budget,
                                std::optional<std::vector<double>> alphas)
{
    if (!(e_fa_target > 0.0))
        throw std::invalid_argument("e_fa_target must be > 0");
    require_var_n(budget.var_n);
    const double shape_power = joint.w_power();
    if (!(shape_power > 0.0))
        throw DegenerateSignal("sweep_alpha_fixed_fa needs a weight shape with positive power");
    const Eigen::ArrayXd shape = joint.w() / std::sqrt(shape_power);
    const auto grid = alphas.value_or(linspace(0.0, 2.0, 101));
    const double var_n = budget.var_n;

    auto scaled = [&](double p_w) { return JointAtoms(shape * std::sqrt(p_w), joint.s(), joint.weight()); };
    auto fa_at = [&](double alpha, double p_w) {
        if (kind == DetectorKind::energy)
            return fa_energy(theta, p_w, var_n, alpha).value;
        return fa_exponent_abs(theta, budget, alpha, scaled(p_w)).value;
    };

    AlphaSweep out;
    for (double alpha : grid) {
        if (alpha < 0.0)
            throw std::invalid_argument("alpha grid must be >= 0");
        // FA exponent is non-increasing in P_w: bracket the target, then bisect.
        if (fa_at(alpha, 0.0) < e_fa_target) {
            out.skipped.push_back(alpha);
            continue;
        }
        double lo = 0.0;
        double hi = budget.p_w;
        int doublings = 0;
        while (fa_at(alpha, hi) > e_fa_target && doublings < 200) {
            lo = hi;
            hi *= 2.0;
            ++doublings;
        }
        if (doublings == 200) {
            out.skipped.push_back(alpha);
            continue;
        }
        double mid = hi;
        double fa_mid = fa_at(alpha, hi);
        for (int it = 0; it < 200 && std::abs(fa_mid - e_fa_target) > 1e-10; ++it) {
            mid = 0.5 * (lo + hi);
            if (!(mid > lo && mid < hi))
                break;
            fa_mid = fa_at(alpha, mid);
            (fa_mid > e_fa_target ? lo : hi) = mid;
        }
        if (std::abs(fa_mid - e_fa_target) > 1e-6) {
            out.skipped.push_back(alpha);
            continue;
        }
        PowerBudget b = budget;
        b.p_w = mid;
        const ExtendedDetectorSpec spec{scaled(mid), alpha, theta, kind};
        const auto md = kind == DetectorKind::energy ? md_exponent_energy(spec, b, model) : md_exponent_abs(spec, b, model);
        out.points.push_back({alpha, mid, fa_mid, md});
    }
    if (out.points.empty())
        throw Infeasible("no alpha on the grid attains the requested FA exponent");
    for (std::size_t i = 1; i < out.points.size(); ++i)
        if (out.points[i].e_md.value > out.points[out.best].e_md.value)
            out.best = i;
    return out;
}

}  // namespace corrdet
