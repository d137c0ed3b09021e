#include "corrdet/montecarlo.hpp"

#include "corrdet/errors.hpp"
#include "corrdet/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace corrdet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::ArrayXd tile(const Eigen::ArrayXd& pattern, int n)
{
    Eigen::ArrayXd out(n);
    for (int t = 0; t < n; ++t)
        out[t] = pattern[t % pattern.size()];
    return out;
}

double tilted_laplacian(double q, double t, SplitMix64& rng)
{
    const bool positive = rng.uniform() < (q + t) / (2.0 * q);
    const double e = -std::log(rng.uniform());
    return positive ? e / (q - t) : -e / (q + t);
}

double tilted_uniform(double z0, double t, SplitMix64& rng)
{
    const double u = rng.uniform();
    if (t == 0.0)
        return z0 * (2.0 * u - 1.0);
    if (t < 0.0)
        return -tilted_uniform(z0, -t, rng);
    return z0 + std::log1p((1.0 - u) * std::expm1(-2.0 * t * z0)) / t;
}

double tilted_binary(double z0, double t, SplitMix64& rng)
{
    const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * t * z0));
    return rng.uniform() < p_plus ? z0 : -z0;
}

}  // namespace

void SimConfig::validate() const
{
    if (n_values.empty())
        throw std::invalid_argument("n_values must not be empty");
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (n_values[i] <= 0)
            throw std::invalid_argument("n_values must be positive");
        if (i > 0 && n_values[i] <= n_values[i - 1])
            throw std::invalid_argument("n_values must be strictly ascending");
    }
    if (trials < 1000)
        throw std::invalid_argument("trials must be >= 1000");
    if (!(tilt_lambda >= 0.0) || !std::isfinite(tilt_lambda))
        throw std::invalid_argument("tilt_lambda must be finite and >= 0");
    if (threads < 1)
        throw std::invalid_argument("threads must be >= 1");
}

double log_fa_probability_exact(const Eigen::ArrayXd& w, double theta, int n, double var_n)
{
    if (n <= 0 || w.size() == 0)
        throw std::invalid_argument("fa_probability_exact needs n > 0 and a non-empty weight pattern");
    const double norm = std::sqrt(tile(w, n).square().sum());
    if (!(norm > 0.0))
        throw DegenerateSignal("fa_probability_exact: zero weight vector");
    return log_q(theta * n / (std::sqrt(var_n) * norm));
}

double fa_probability_exact(const Eigen::ArrayXd& w, double theta, int n, double var_n)
{
    return std::exp(log_fa_probability_exact(w, theta, n, var_n));
}

double sample_tilted(const NoiseModel& model, double t, SplitMix64& rng)
{
    if (std::abs(t) >= cgf_limit(model)) {
        std::ostringstream msg;
        msg << "tilt " << t << " leaves the CGF domain of the " << model_name(model) << " model";
        throw DegenerateTilt(msg.str());
    }
    return std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Gaussian>) {
                return t * m.var_z + std::sqrt(m.var_z) * rng.normal();
            } else if constexpr (std::is_same_v<M, Laplacian>) {
                return tilted_laplacian(m.q, t, rng);
            } else if constexpr (std::is_same_v<M, BinarySymmetric>) {
                return tilted_binary(m.z0, t, rng);
            } else if constexpr (std::is_same_v<M, Uniform>) {
                return tilted_uniform(m.z0, t, rng);
            } else {
                const double log_b = std::log(m.delta) + log_cosh(t * m.z0);
                const double log_l = std::log1p(-m.delta) - std::log1p(-(t * t) / (m.q * m.q));
                const double p_binary = 1.0 / (1.0 + std::exp(log_l - log_b));
                return rng.uniform() < p_binary ? tilted_binary(m.z0, t, rng) : tilted_laplacian(m.q, t, rng);
            }
        },
        model);
}

std::vector<ProbabilityEstimate> md_probability(const NoiseModel& model, const Eigen::ArrayXd& w,
                                                const Eigen::ArrayXd& s, double theta, const SimConfig& config,
                                                const PowerBudget& budget)
{
    validate(model);
    config.validate();
    if (w.size() == 0 || w.size() != s.size())
        throw std::invalid_argument("weight and signal patterns must be non-empty and of equal length");
    const double lambda = config.tilt_lambda;
    const double var_n = budget.var_n;
    const double sigma = std::sqrt(var_n);
    if (lambda * w.abs().maxCoeff() >= cgf_limit(model))
        throw DegenerateTilt("tilt_lambda * max|w| leaves the CGF domain");

    std::vector<ProbabilityEstimate> out;
    for (int n : config.n_values) {
        const Eigen::ArrayXd wn = tile(w, n);
        const Eigen::ArrayXd sn = tile(s, n);
        // Per-index log normalizers of the tilted laws.
        double log_norm = 0.0;
        for (int t = 0; t < n; ++t) {
            const double lw = lambda * wn[t];
            log_norm += cgf_eval(model, lw) + 0.5 * lw * lw * var_n;
        }
        const double mean_part = (wn * sn).sum();
        const double limit = theta * n;

        std::vector<double> log_weight(static_cast<std::size_t>(config.trials), kNegInf);
        auto run = [&](int begin, int end) {
            for (int trial = begin; trial < end; ++trial) {
                SplitMix64 rng(stream_seed(config.seed, static_cast<std::uint64_t>(n),
                                           static_cast<std::uint64_t>(trial)));
                double noise = 0.0;
                for (int t = 0; t < n; ++t) {
                    const double lw = lambda * wn[t];
                    const double z = sample_tilted(model, -lw, rng);
                    const double nn = -lw * var_n + sigma * rng.normal();
                    noise += wn[t] * (z + nn);
                }
                if (mean_part + noise <= limit)
                    log_weight[static_cast<std::size_t>(trial)] = lambda * noise + log_norm;
            }
        };
        const int workers = std::min(config.threads, config.trials);
        if (workers == 1) {
            run(0, config.trials);
        } else {
            std::vector<std::thread> pool;
            const int chunk = (config.trials + workers - 1) / workers;
            for (int k = 0; k < workers; ++k)
                pool.emplace_back(run, k * chunk, std::min(config.trials, (k + 1) * chunk));
            for (auto& th : pool)
                th.join();
        }

        // Ordered reduction in log space.
        ProbabilityEstimate est;
        est.n = n;
        double peak = kNegInf;
        for (double lw : log_weight)
            peak = std::max(peak, lw);
        if (peak == kNegInf) {
            est.prob = 0.0;
            est.log_prob = kNegInf;
            est.rel_stderr = std::numeric_limits<double>::infinity();
            out.push_back(est);
            continue;
        }
        double s1 = 0.0, s2 = 0.0;
        for (double lw : log_weight) {
            if (lw == kNegInf)
                continue;
            const double e = std::exp(lw - peak);
            s1 += e;
            s2 += e * e;
            ++est.hits;
        }
        const double trials = config.trials;
        est.log_prob = peak + std::log(s1 / trials);
        est.prob = std::exp(est.log_prob);
        const double rel_var = std::max(0.0, s2 * trials / (s1 * s1) - 1.0);
        est.rel_stderr = std::sqrt(rel_var / trials);
        out.push_back(est);
    }
    return out;
}

SlopeEstimate estimate_slope(const std::vector<ProbabilityEstimate>& per_n)
{
    std::vector<const ProbabilityEstimate*> usable;
    for (const auto& p : per_n)
        if (std::isfinite(p.log_prob) && p.rel_stderr < 0.2)
            usable.push_back(&p);
    if (usable.size() < 3)
        throw InsufficientData("estimate_slope needs at least 3 points with rel_stderr < 0.2");
    const bool unit = std::any_of(usable.begin(), usable.end(), [](auto* p) { return p->rel_stderr == 0.0; });

    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (auto* p : usable) {
        const double wt = unit ? 1.0 : 1.0 / (p->rel_stderr * p->rel_stderr);
        sw += wt;
        sx += wt * p->n;
        sy += wt * -p->log_prob;
    }
    const double xm = sx / sw, ym = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (auto* p : usable) {
        const double wt = unit ? 1.0 : 1.0 / (p->rel_stderr * p->rel_stderr);
        sxx += wt * (p->n - xm) * (p->n - xm);
        sxy += wt * (p->n - xm) * (-p->log_prob - ym);
    }
    SlopeEstimate out;
    out.per_n = per_n;
    out.slope = sxy / sxx;
    out.intercept = ym - out.slope * xm;
    if (unit) {
        double rss = 0.0;
        for (auto* p : usable) {
            const double r = -p->log_prob - out.intercept - out.slope * p->n;
            rss += r * r;
        }
        const double dof = static_cast<double>(usable.size()) - 2.0;
        out.slope_stderr = std::sqrt(rss / dof / sxx);
    } else {
        out.slope_stderr = std::sqrt(1.0 / sxx);
    }
    return out;
}

}  // namespace corrdet
