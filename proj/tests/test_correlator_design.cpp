#include "corrdet/correlator_design.hpp"
#include "corrdet/errors.hpp"
#include "corrdet/optimize.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace corrdet;

namespace {

SignalAtoms uniform_signal(double half_width, int atoms)
{
    Eigen::ArrayXd s(atoms);
    for (int i = 0; i < atoms; ++i)
        s[i] = -half_width + (i + 0.5) * 2.0 * half_width / atoms;
    return SignalAtoms::uniform(s);
}

SignalAtoms random_signal(std::mt19937_64& rng, int atoms)
{
    std::uniform_real_distribution<double> u(-3.0, 3.0), p(0.1, 1.0);
    Eigen::ArrayXd s(atoms), w(atoms);
    for (int i = 0; i < atoms; ++i) {
        s[i] = u(rng);
        w[i] = p(rng);
    }
    return {s, w};
}

SignalAtoms four_ask_signal(double a)
{
    Eigen::ArrayXd s(4);
    s << -3.0 * a, -a, a, 3.0 * a;
    return SignalAtoms::uniform(s);
}

const std::vector<NoiseModel> kModels{Gaussian{1.2}, Laplacian{1.5}, BinarySymmetric{2.0}, Uniform{3.0},
                                      MixtureBinaryLaplace{0.95, 0.5, 5.0}};

}  // namespace

TEST_SUITE("correlator_design")
{
    TEST_CASE("g is zero at the origin, linear for Gaussian, strictly increasing")
    {
        for (const auto& m : kModels)
            CHECK(g_eval(m, 0.0, 0.3, 0.7, 1.0) == 0.0);
        for (double w : {-2.0, 0.5, 3.0})
            CHECK(g_eval(Gaussian{2.0}, w, 0.4, 0.8, 1.5) ==
                  doctest::Approx(((1.5 + 2.0) * 0.8 + 0.4 / 0.8) * w).epsilon(1e-14));
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (const auto& m : kModels) {
            const double lambda = 0.9;
            const double wmax = std::min(cgf_limit(m) / lambda, 10.0) * 0.999;
            std::vector<double> ws;
            for (int i = 0; i < 200; ++i)
                ws.push_back(wmax * u(rng));
            std::sort(ws.begin(), ws.end());
            for (std::size_t i = 1; i < ws.size(); ++i)
                if (ws[i] > ws[i - 1])
                    CHECK(g_eval(m, ws[i], 0.1, lambda, 1.0) > g_eval(m, ws[i - 1], 0.1, lambda, 1.0));
        }
    }

    TEST_CASE("g inverse")
    {
        for (const auto& m : kModels)
            CHECK(g_inverse(m, 0.0, 0.2, 1.1, 1.0) == 0.0);
        const double lambda = 0.6, rho = 0.3;
        CHECK(g_inverse(Gaussian{2.0}, 1.7, rho, lambda, 1.0) ==
              doctest::Approx(lambda * 1.7 / ((1.0 + 2.0) * lambda * lambda + rho)).epsilon(1e-13));
        std::mt19937_64 rng(10);
        std::uniform_real_distribution<double> u(-20.0, 20.0), l(0.05, 3.0);
        for (const auto& m : kModels)
            for (int k = 0; k < 100; ++k) {
                const double s = u(rng), lam = l(rng), r = 0.5 * l(rng);
                const double w = g_inverse(m, s, r, lam, 0.8);
                CHECK(std::abs(g_eval(m, w, r, lam, 0.8) - s) < 1e-9 * (1.0 + std::abs(s)));
            }
    }

    TEST_CASE("rho tuning")
    {
        const auto sig = uniform_signal(2.0, 40);
        const PowerBudget b{1.0, std::nullopt, 1.0};
        const double lambda = 0.5;
        const double expect = lambda * std::sqrt(sig.second_moment() / b.p_w) - (1.0 + 0.5) * lambda * lambda;
        REQUIRE(expect > 0.0);
        CHECK(tune_rho(Gaussian{0.5}, sig, lambda, b) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(tune_rho(Gaussian{0.5}, sig, lambda, {1e6, std::nullopt, 1.0}) == 0.0);

        const PowerBudget fig{1.0, std::nullopt, 1.0};
        const auto ask = four_ask_signal(4.0);
        for (double l : {0.05, 0.3, 1.0}) {
            const double rho = tune_rho(BinarySymmetric{7.0}, ask, l, fig);
            const auto w = optimal_weights(BinarySymmetric{7.0}, ask, rho, l, 1.0);
            const double power = (ask.weight() * w.square()).sum();
            if (rho > 0.0)
                CHECK(std::abs(power - 1.0) < 1e-8);
            else
                CHECK(power <= 1.0);
        }
    }

    TEST_CASE("Gaussian interference: optimal design is the matched filter")
    {
        const auto sig = uniform_signal(3.0, 16);
        const PowerBudget b{1.0, std::nullopt, 1.0};
        const double es2 = sig.second_moment();
        for (double theta : {0.0, 0.5, 1.0}) {
            const auto d = design_optimal(Gaussian{1.0}, sig, theta, b);
            const double mean = std::sqrt(b.p_w * es2);
            const double expect = (mean - theta) * (mean - theta) / (2.0 * 2.0 * b.p_w);
            CHECK(d.e_md.value == doctest::Approx(expect).epsilon(1e-6));
            // At theta = 0 the exponent is scale free, so only the shape is pinned down.
            const double ratio = theta > 0.0 ? std::sqrt(b.p_w / es2) : d.joint.w()[0] / sig.s()[0];
            for (Eigen::Index i = 0; i < sig.size(); ++i)
                CHECK(std::abs(d.joint.w()[i] - ratio * sig.s()[i]) <= 1e-9 * std::abs(ratio * sig.s()[i]) + 1e-15);
            CHECK(d.e_fa == doctest::Approx(fa_exponent(theta, b)));
            CHECK(d.joint.w_power() <= b.p_w + 1e-9);
        }
        const auto d = design_optimal(Gaussian{1.0}, sig, 100.0, b);
        CHECK(d.e_md.value == 0.0);
        CHECK_THROWS_AS(design_optimal(Gaussian{1.0}, SignalAtoms::uniform(Eigen::ArrayXd::Zero(3)), 0.1, b),
                        DegenerateSignal);
    }

    TEST_CASE("stationarity residuals and dominance on random instances")
    {
        std::mt19937_64 rng(21);
        for (int k = 0; k < 10; ++k) {
            const auto m = oracle::random_model(rng);
            const auto sig = random_signal(rng, 6);
            const PowerBudget b{1.0, std::nullopt, 0.5};
            const double theta = 0.3 * std::sqrt(sig.second_moment());
            const auto d = design_optimal(m, sig, theta, b);
            const double l = d.lambda_design;
            for (Eigen::Index i = 0; i < sig.size(); ++i) {
                const double w = d.joint.w()[i];
                CHECK(std::abs(g_eval(m, w, d.rho_star, l, b.var_n) - sig.s()[i]) < 1e-8);
            }
            const double opt = d.e_md.value;
            CHECK(opt >= md_exponent(design_classical(sig, b), theta, b, m).value - 1e-9);
            CHECK(opt >= md_exponent(design_binary(sig, b), theta, b, m).value - 1e-9);
            CHECK(opt >= design_quantized(m, sig, 3, theta, b).e_md.value - 1e-9);
        }
    }

    TEST_CASE("classical and binary correlators")
    {
        const auto ask = four_ask_signal(4.0);
        const PowerBudget b{1.0, std::nullopt, 1.0};
        const auto c = design_classical(ask, b);
        CHECK(c.w_power() == doctest::Approx(1.0).epsilon(1e-14));
        for (Eigen::Index i = 0; i < ask.size(); ++i)
            if (std::abs(ask.s()[i]) == 4.0)
                CHECK(std::abs(c.w()[i]) == doctest::Approx(std::sqrt(1.0 / 5.0)).epsilon(1e-14));
        const auto flat = design_classical(SignalAtoms::uniform(Eigen::ArrayXd::Constant(3, 2.5)), {4.0, {}, 1.0});
        CHECK((flat.w() - 2.0).abs().maxCoeff() < 1e-15);

        const auto sig = uniform_signal(2.0, 10);
        const auto bin = design_binary(sig, {2.0, {}, 1.0});
        CHECK(bin.correlation() == doctest::Approx(std::sqrt(2.0) * sig.mean_abs()).epsilon(1e-14));
        Eigen::ArrayXd zero(1);
        zero << 0.0;
        CHECK(design_binary(SignalAtoms::uniform(zero), b).w()[0] == 1.0);

        // Binary weights under Gaussian interference: closed form below the kink.
        const double mean = std::sqrt(2.0) * sig.mean_abs();
        for (double theta : {0.0, 0.5, 1.0}) {
            const double expect = (mean - theta) * (mean - theta) / (2.0 * (1.0 + 0.7) * 2.0);
            CHECK(md_exponent(bin, theta, {2.0, {}, 1.0}, Gaussian{0.7}).value == doctest::Approx(expect).epsilon(1e-10));
        }
    }

    TEST_CASE("quantizer: uniform signal under Gaussian interference has uniform boundaries")
    {
        const auto sig = uniform_signal(2.0, 400);
        const PowerBudget b{1.0, std::nullopt, 1.0};
        const auto q = design_quantized(Gaussian{1.0}, sig, 4, 0.3, b);
        REQUIRE(q.boundaries.size() == 3);
        CHECK(std::abs(q.boundaries[0] + 1.0) < 1e-6);
        CHECK(std::abs(q.boundaries[1]) < 1e-6);
        CHECK(std::abs(q.boundaries[2] - 1.0) < 1e-6);
        CHECK(q.converged);
        for (std::size_t i = 1; i < q.levels.size(); ++i)
            CHECK(q.levels[i] >= q.levels[i - 1]);
        double power = 0.0;
        for (std::size_t i = 0; i < q.levels.size(); ++i)
            power += q.cell_probability[i] * q.levels[i] * q.levels[i];
        CHECK(power <= b.p_w + 1e-9);
    }

    TEST_CASE("quantizer: two levels reduce to the sign correlator")
    {
        const PowerBudget b{1.0, std::nullopt, 1.0};
        for (const auto& m : kModels) {
            const auto sig = uniform_signal(2.0, 20);
            const auto q = design_quantized(m, sig, 2, 0.2, b);
            const auto bin = design_binary(sig, b);
            CHECK(std::abs(q.boundaries[0]) < 1e-12);
            CHECK((q.joint.w() - bin.w()).abs().maxCoeff() < 1e-8);
            CHECK(q.e_md.value == doctest::Approx(md_exponent(bin, 0.2, b, m).value).epsilon(1e-8));
        }
    }

    TEST_CASE("quantizer: fixed point satisfies both update equations")
    {
        std::mt19937_64 rng(33);
        const PowerBudget b{1.0, std::nullopt, 0.8};
        for (const auto& m : kModels) {
            const auto sig = random_signal(rng, 30);
            const auto q = design_quantized(m, sig, 3, 0.2, b);
            if (!q.converged)
                continue;
            const double l = q.lambda;
            for (std::size_t i = 0; i < q.levels.size(); ++i)
                if (q.cell_probability[i] > 0.0)
                    CHECK(std::abs(g_eval(m, q.levels[i], q.rho, l, b.var_n) - q.centroids[i]) < 1e-8);
            for (std::size_t i = 1; i < q.levels.size(); ++i) {
                const double w0 = q.levels[i - 1], w1 = q.levels[i];
                if (w1 == w0)
                    continue;
                const double a = (cgf_eval(m, l * w1) - cgf_eval(m, l * w0) +
                                  0.5 * (q.rho + l * l * b.var_n) * (w1 * w1 - w0 * w0)) /
                                 (l * (w1 - w0));
                CHECK(std::abs(a - q.boundaries[i - 1]) < 1e-8);
            }
        }
    }

    TEST_CASE("quantizer: one more level does not hurt")
    {
        std::mt19937_64 rng(44);
        const PowerBudget b{1.0, std::nullopt, 1.0};
        for (const auto& m : {NoiseModel{BinarySymmetric{2.0}}, NoiseModel{Laplacian{1.0}}, NoiseModel{Uniform{2.5}}}) {
            const auto sig = random_signal(rng, 40);
            const auto q3 = design_quantized(m, sig, 3, 0.3, b);
            auto init = q3.boundaries;
            init.push_back(init.back() + 1.0);
            const auto q4 = design_quantized(m, sig, 4, 0.3, b, init);
            CHECK(q4.e_md.value >= q3.e_md.value - 1e-9);
        }
    }

    TEST_CASE("4-ASK: optimal weights beat the classical ones under binary interference")
    {
        const PowerBudget b{1.0, std::nullopt, 1.0};
        const NoiseModel m = BinarySymmetric{7.0};
        const double classical = std::sqrt(0.2);
        double max_gap = 0.0, last_gap = 0.0;
        const double top = std::sqrt(5.0 * 16.0);
        for (double theta : linspace(0.0, top, 25)) {
            const auto d = design_4ask(m, 4.0, theta, b);
            const double c = four_ask_exponent(m, 4.0, classical, theta, b).value;
            CHECK(d.e_md.value >= c - 1e-9);
            CHECK(d.beta == doctest::Approx(std::sqrt(2.0 - d.alpha * d.alpha)));
            max_gap = std::max(max_gap, d.e_md.value - c);
            last_gap = d.e_md.value - c;
        }
        CHECK(max_gap > 0.0);
        CHECK(last_gap < 0.1 * max_gap);
        // Classical weights are the proportional choice.
        const auto cl = design_classical(four_ask_signal(4.0), b);
        CHECK(four_ask_exponent(m, 4.0, classical, 1.0, b).value ==
              doctest::Approx(md_exponent(cl, 1.0, b, m).value).epsilon(1e-10));
    }
}
