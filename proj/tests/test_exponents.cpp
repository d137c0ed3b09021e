#include "corrdet/errors.hpp"
#include "corrdet/exponents.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace corrdet;

namespace {

JointAtoms four_ask(double a, double alpha, double p_w)
{
    const double beta = std::sqrt(2.0 * p_w - alpha * alpha);
    Eigen::ArrayXd w(4), s(4), p(4);
    w << alpha, -alpha, beta, -beta;
    s << a, -a, 3.0 * a, -3.0 * a;
    p << 0.25, 0.25, 0.25, 0.25;
    return {w, s, p};
}

JointAtoms random_joint(std::mt19937_64& rng, int atoms)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0), pw(0.1, 1.0);
    Eigen::ArrayXd w(atoms), s(atoms), p(atoms);
    for (int i = 0; i < atoms; ++i) {
        s[i] = u(rng);
        w[i] = s[i] + 0.5 * u(rng);
        p[i] = pw(rng);
    }
    return {w, s, p};
}

}  // namespace

TEST_SUITE("exponents")
{
    TEST_CASE("false-alarm exponent")
    {
        CHECK(fa_exponent(1.0, {1.0, std::nullopt, 1.0}) == doctest::Approx(0.5));
        CHECK(fa_exponent(0.0, {3.0, std::nullopt, 2.0}) == 0.0);
        CHECK(fa_exponent(2.0, {2.0, std::nullopt, 1.0}) == doctest::Approx(1.0));
        CHECK(theta_for_fa(0.5, {1.0, std::nullopt, 1.0}) == doctest::Approx(1.0));
        CHECK(theta_for_fa(0.0, {1.0, std::nullopt, 1.0}) == 0.0);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(0.01, 5.0);
        for (int k = 0; k < 100; ++k) {
            const PowerBudget b{u(rng), std::nullopt, u(rng)};
            const double e = u(rng);
            CHECK(std::abs(fa_exponent(theta_for_fa(e, b), b) - e) < 1e-12 * std::max(1.0, e));
        }
    }

    TEST_CASE("objective hand evaluation")
    {
        Eigen::ArrayXd w(1), s(1), p(1);
        w << 1.0;
        s << 2.0;
        p << 1.0;
        const JointAtoms j(w, s, p);
        const PowerBudget b{1.0, std::nullopt, 1.0};
        CHECK(md_objective(j, 0.5, 1.0, b, Gaussian{1.0}) == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(md_objective(j, 0.0, 1.0, b, Laplacian{0.5}) == 0.0);
        CHECK_THROWS_AS(md_objective(j, 0.6, 1.0, b, Laplacian{0.5}), DomainError);
    }

    TEST_CASE("objective at theta = E{WS} is maximized at zero")
    {
        std::mt19937_64 rng(2);
        const auto j = random_joint(rng, 6);
        const PowerBudget b{1.0, std::nullopt, 1.0};
        const double theta = j.correlation();
        for (double l : {0.01, 0.1, 0.5, 1.0, 3.0})
            CHECK(md_objective(j, l, theta, b, BinarySymmetric{1.5}) <= 1e-15);
        const auto r = md_exponent(j, theta, b, BinarySymmetric{1.5});
        CHECK(r.value == 0.0);
        CHECK(r.lambda_star == 0.0);
    }

    TEST_CASE("Gaussian closed form with w proportional to s")
    {
        for (double theta : {0.0, 1.0, 2.0, 3.0, 5.0}) {
            Eigen::ArrayXd s(2), p(2);
            s << 2.0, 6.0;
            p << 0.5, 0.5;
            const double es2 = 20.0;
            const double p_w = 1.5;
            const Eigen::ArrayXd w = s * std::sqrt(p_w / es2);
            const JointAtoms j(w, s, p);
            const PowerBudget b{p_w, std::nullopt, 0.7};
            const double mean = std::sqrt(p_w * es2);
            const double expect = theta < mean ? (mean - theta) * (mean - theta) / (2.0 * (0.7 + 1.3) * p_w) : 0.0;
            CHECK(md_exponent(j, theta, b, Gaussian{1.3}).value == doctest::Approx(expect).epsilon(1e-10));
        }
    }

    TEST_CASE("binary interference against a dense lambda grid")
    {
        const PowerBudget b{1.0, std::nullopt, 1.0};
        const NoiseModel m = BinarySymmetric{7.0};
        for (double alpha : {std::sqrt(0.2), 0.8, 1.2}) {
            const auto j = four_ask(4.0, alpha, 1.0);
            for (double theta : {0.5, 2.0, 5.0}) {
                const auto r = md_exponent(j, theta, b, m);
                const double hi = std::max(4.0 * r.lambda_star, 1.0);
                const double brute = oracle::grid_then_polish(
                    [&](double l) { return md_objective(j, l, theta, b, m); }, 0.0, hi, 100000);
                CHECK(r.value == doctest::Approx(brute).epsilon(1e-8));
            }
        }
    }

    TEST_CASE("pole models keep lambda inside the domain")
    {
        std::mt19937_64 rng(4);
        const auto j = random_joint(rng, 5);
        const PowerBudget b{1.0, std::nullopt, 0.1};
        const NoiseModel m = Laplacian{0.3};
        const auto r = md_exponent(j, -3.0, b, m);
        CHECK(r.value > 0.0);
        CHECK(r.lambda_star * j.max_abs_w() < 0.3);
        CHECK(r.lambda_star <= lambda_limit(m, j.max_abs_w()));
        CHECK(std::isinf(lambda_limit(Gaussian{1.0}, 1.0)));
    }

    TEST_CASE("concavity, probe bound, theta monotonicity, scaling invariance")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 40; ++k) {
            const auto m = oracle::random_model(rng);
            const auto j = random_joint(rng, 1 + static_cast<int>(rng() % 8));
            const PowerBudget b{1.0, std::nullopt, 0.2 + u(rng)};
            const double lmax = std::min(lambda_limit(m, j.max_abs_w()), 5.0);
            const double l1 = lmax * u(rng), l2 = lmax * u(rng);
            const double theta = j.correlation() * u(rng);
            const double mid = md_objective(j, 0.5 * (l1 + l2), theta, b, m);
            const double avg = 0.5 * (md_objective(j, l1, theta, b, m) + md_objective(j, l2, theta, b, m));
            CHECK(mid >= avg - 1e-10);

            const auto r = md_exponent(j, theta, b, m);
            CHECK(r.value >= 0.0);
            for (int t = 0; t < 5; ++t)
                CHECK(r.value >= md_objective(j, lmax * u(rng), theta, b, m) - 1e-12);
            CHECK(md_exponent(j, theta + 0.1, b, m).value <= r.value + 1e-12);

            const double c = 0.2 + 3.0 * u(rng);
            const JointAtoms scaled(j.w() * c, j.s(), j.weight());
            const auto rs = md_exponent(scaled, theta * c, b, m);
            CHECK(std::abs(rs.value - r.value) <= 1e-9 * std::max(1.0, r.value));
        }
    }
}
