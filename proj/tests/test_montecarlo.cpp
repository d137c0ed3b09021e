#include "corrdet/errors.hpp"
#include "corrdet/exponents.hpp"
#include "corrdet/montecarlo.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <cmath>

using namespace corrdet;

namespace {

Eigen::ArrayXd vec(std::initializer_list<double> xs)
{
    Eigen::ArrayXd a(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs)
        a[i++] = x;
    return a;
}

std::vector<ProbabilityEstimate> synthetic(const std::function<double(int)>& log_p, std::vector<int> ns)
{
    std::vector<ProbabilityEstimate> out;
    for (int n : ns) {
        ProbabilityEstimate e;
        e.n = n;
        e.log_prob = log_p(n);
        e.prob = std::exp(e.log_prob);
        out.push_back(e);
    }
    return out;
}

}  // namespace

TEST_SUITE("montecarlo")
{
    TEST_CASE("exact FA probability")
    {
        const auto w = vec({1.0, -1.0});
        CHECK(fa_probability_exact(w, 0.0, 10, 1.0) == doctest::Approx(0.5));
        const double p = fa_probability_exact(w, 0.3, 50, 2.0);
        CHECK(p == doctest::Approx(0.5 * std::erfc(0.3 * 50 / (std::sqrt(2.0) * std::sqrt(50.0)) / std::sqrt(2.0))));
        CHECK(fa_probability_exact(w * 3.0, 0.9, 40, 1.0) == doctest::Approx(fa_probability_exact(w, 0.3, 40, 1.0)));
        // Gap to the exponent shrinks with n.
        const PowerBudget b{1.0, std::nullopt, 1.0};
        const double e = fa_exponent(0.5, b);
        double prev_gap = std::numeric_limits<double>::infinity();
        for (int n : {100, 200, 400, 800}) {
            const double rate = -log_fa_probability_exact(w, 0.5, n, 1.0) / n;
            const double gap = (rate - e) / e;
            CHECK(gap > 0.0);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
        CHECK(prev_gap < 0.05);
        CHECK(std::isfinite(log_fa_probability_exact(w, 5.0, 4000, 1.0)));
    }

    TEST_CASE("tilted samplers have mean C'(t)")
    {
        const std::vector<NoiseModel> models{Gaussian{1.5}, Laplacian{2.0}, BinarySymmetric{1.0}, Uniform{2.0},
                                             MixtureBinaryLaplace{0.6, 1.0, 3.0}};
        for (const auto& m : models)
            for (double t : {-1.2, 0.0, 0.7}) {
                SplitMix64 rng(stream_seed(42, 1, static_cast<std::uint64_t>(t * 10 + 100)));
                const int n = 200000;
                double sum = 0.0, sum2 = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double z = sample_tilted(m, t, rng);
                    sum += z;
                    sum2 += z * z;
                }
                const double mean = sum / n;
                const double sd = std::sqrt(sum2 / n - mean * mean);
                CHECK(std::abs(mean - cgf_deriv(m, t)) < 5.0 * sd / std::sqrt(n));
            }
        SplitMix64 rng(1);
        CHECK_THROWS_AS(sample_tilted(Laplacian{1.0}, 1.0, rng), DegenerateTilt);
    }

    TEST_CASE("uniform draws and normals")
    {
        SplitMix64 rng(7);
        double sum = 0.0, sum2 = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const double u = rng.uniform();
            CHECK_MESSAGE((u > 0.0 && u < 1.0), "uniform draw outside (0,1)");
            const double z = rng.normal();
            sum += z;
            sum2 += z * z;
        }
        CHECK(std::abs(sum / n) < 0.02);
        CHECK(std::abs(sum2 / n - 1.0) < 0.02);
        CHECK(stream_seed(1, 2, 3) != stream_seed(1, 2, 4));
        CHECK(stream_seed(1, 2, 3) != stream_seed(1, 3, 3));
    }

    TEST_CASE("tilted estimator matches exhaustive enumeration for binary interference")
    {
        const double z0 = 1.0;
        const auto w = vec({1.0, 0.5, -1.0, 1.5, 0.8, -0.6, 1.1, 0.9});
        const auto s = vec({1.0, 0.4, -0.8, 1.2, 0.6, -0.5, 1.0, 0.7});
        const double theta = 0.2;
        const PowerBudget b{1.0, std::nullopt, 0.5};
        const double exact = oracle::md_probability_binary_exhaustive(
            z0, std::vector<double>(w.data(), w.data() + 8), std::vector<double>(s.data(), s.data() + 8), theta, 0.5);
        for (double tilt : {0.0, 0.6}) {
            SimConfig cfg;
            cfg.n_values = {8};
            cfg.trials = 200000;
            cfg.seed = 99;
            cfg.tilt_lambda = tilt;
            const auto r = md_probability(BinarySymmetric{z0}, w, s, theta, cfg, b);
            const double se = r[0].prob * r[0].rel_stderr;
            CHECK(std::abs(r[0].prob - exact) < 3.0 * se);
        }
    }

    TEST_CASE("tilting reduces variance and agrees with plain sampling")
    {
        const auto w = vec({1.0, -1.0});
        const auto s = vec({1.0, -1.0});
        const PowerBudget b{1.0, std::nullopt, 1.0};
        const NoiseModel m = Laplacian{2.0};
        const double theta = 0.5;
        Eigen::ArrayXd p(2);
        p << 0.5, 0.5;
        const auto e = md_exponent(JointAtoms(w, s, p), theta, b, m);
        SimConfig plain;
        plain.n_values = {20};
        plain.trials = 100000;
        plain.seed = 5;
        SimConfig tilted = plain;
        tilted.tilt_lambda = e.lambda_star;
        const auto a = md_probability(m, w, s, theta, plain, b)[0];
        const auto t = md_probability(m, w, s, theta, tilted, b)[0];
        const double se = std::hypot(a.prob * a.rel_stderr, t.prob * t.rel_stderr);
        CHECK(std::abs(a.prob - t.prob) < 3.0 * se);
        CHECK(t.rel_stderr < a.rel_stderr);
    }

    TEST_CASE("Chernoff bound direction and seed determinism")
    {
        const auto w = vec({1.0, 0.5, -0.7});
        const auto s = vec({1.2, 0.3, -1.0});
        const PowerBudget b{1.0, std::nullopt, 1.0};
        const NoiseModel m = Uniform{1.5};
        Eigen::ArrayXd p = Eigen::ArrayXd::Constant(3, 1.0 / 3.0);
        const double theta = 0.2;
        const auto e = md_exponent(JointAtoms(w, s, p), theta, b, m);
        SimConfig cfg;
        cfg.n_values = {30, 60, 90};
        cfg.trials = 20000;
        cfg.seed = 17;
        cfg.tilt_lambda = e.lambda_star;
        const auto r1 = md_probability(m, w, s, theta, cfg, b);
        for (const auto& x : r1)
            CHECK(-x.log_prob / x.n >= e.value - 3.0 * x.rel_stderr / x.n);
        cfg.threads = 3;
        const auto r2 = md_probability(m, w, s, theta, cfg, b);
        for (std::size_t i = 0; i < r1.size(); ++i) {
            CHECK(r1[i].log_prob == r2[i].log_prob);
            CHECK(r1[i].rel_stderr == r2[i].rel_stderr);
        }
        cfg.seed = 18;
        CHECK(md_probability(m, w, s, theta, cfg, b)[0].log_prob != r1[0].log_prob);
    }

    TEST_CASE("tilt outside the CGF domain is rejected")
    {
        SimConfig cfg;
        cfg.n_values = {4};
        cfg.trials = 1000;
        cfg.tilt_lambda = 3.0;
        CHECK_THROWS_AS(md_probability(Laplacian{1.0}, vec({1.0}), vec({1.0}), 0.0, cfg, {}), DegenerateTilt);
        cfg.trials = 10;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg.trials = 1000;
        cfg.n_values = {10, 5};
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }

    TEST_CASE("slope estimation")
    {
        const std::vector<int> ns{50, 100, 200, 400};
        const auto exact = estimate_slope(synthetic([](int n) { return -0.3 * n; }, ns));
        CHECK(std::abs(exact.slope - 0.3) < 1e-12);
        const auto pref = estimate_slope(synthetic([](int n) { return std::log(n) - 0.3 * n; }, ns));
        CHECK(std::abs(pref.slope - 0.3) < 0.02 * 0.3);
        const auto flat = estimate_slope(synthetic([](int) { return std::log(0.2); }, ns));
        CHECK(std::abs(flat.slope) < 1e-14);
        CHECK(flat.slope_stderr >= 0.0);
        auto few = synthetic([](int n) { return -0.1 * n; }, {10, 20});
        CHECK_THROWS_AS(estimate_slope(few), InsufficientData);
        auto noisy = synthetic([](int n) { return -0.1 * n; }, ns);
        for (auto& x : noisy)
            x.rel_stderr = 0.5;
        CHECK_THROWS_AS(estimate_slope(noisy), InsufficientData);
    }
}
