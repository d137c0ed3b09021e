#include "corrdet/noise_model.hpp"

#include "corrdet/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace corrdet {

namespace {

constexpr double kPoleMargin = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// ln(a + b) from ln a and ln b.
double log_add(double la, double lb)
{
    const double hi = std::max(la, lb);
    if (hi == -std::numeric_limits<double>::infinity())
        return hi;
    return hi + std::log1p(std::exp(std::min(la, lb) - hi));
}

// Langevin function coth(x) - 1/x.
double langevin(double x)
{
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return x * (1.0 / 3.0 - x2 / 45.0 + 2.0 * x2 * x2 / 945.0);
    }
    return 1.0 / std::tanh(x) - 1.0 / x;
}

double laplace_log_mgf(double v, double q)
{
    const double r = v / q;
    return -std::log1p(-r * r);
}

void check_domain(const NoiseModel& model, double v)
{
    if (!std::isfinite(v) || std::abs(v) >= cgf_limit(model)) {
        std::ostringstream msg;
        msg << "CGF argument " << v << " outside the domain of the " << model_name(model) << " model";
        throw DomainError(msg.str());
    }
}

std::complex<double> binary_ratio(double z0, double v, double omega)
{
    const double y = z0 * omega;
    return {std::cos(y), std::tanh(z0 * v) * std::sin(y)};
}

std::complex<double> uniform_ratio(double z0, double v, double omega)
{
    const double x = z0 * v;
    const double y = z0 * omega;
    if (y == 0.0)
        return 1.0;
    if (std::abs(x) < 1.0) {
        const std::complex<double> t(x, y);
        const std::complex<double> sinhc_t = std::sinh(t) / t;
        const double sinhc_x = x == 0.0 ? 1.0 : std::sinh(x) / x;
        return sinhc_t / sinhc_x;
    }
    // sinh(x + jy) / sinh(x) = cos y + j coth(x) sin y
    const std::complex<double> r(std::cos(y), std::sin(y) / std::tanh(x));
    return r * (x / std::complex<double>(x, y));
}

std::complex<double> laplace_ratio(double q, double v, double omega)
{
    const std::complex<double> t(v, omega);
    return (q * q - v * v) / (q * q - t * t);
}

}  // namespace

double log_cosh(double x)
{
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double log_sinhc(double x)
{
    const double a = std::abs(x);
    if (a < 1e-3) {
        const double a2 = a * a;
        return a2 / 6.0 - a2 * a2 / 180.0 + a2 * a2 * a2 / 2835.0;
    }
    return a + std::log(-std::expm1(-2.0 * a)) - std::numbers::ln2 - std::log(a);
}

void validate(const NoiseModel& model)
{
    auto positive = [](double x, const char* what) {
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument(std::string(what) + " must be finite and > 0");
    };
    std::visit(overloaded{
                   [&](const Gaussian& m) { positive(m.var_z, "var_z"); },
                   [&](const Laplacian& m) { positive(m.q, "q"); },
                   [&](const BinarySymmetric& m) { positive(m.z0, "z0"); },
                   [&](const Uniform& m) { positive(m.z0, "z0"); },
                   [&](const MixtureBinaryLaplace& m) {
                       if (!(m.delta > 0.0 && m.delta < 1.0))
                           throw std::invalid_argument("delta must lie in (0, 1)");
                       positive(m.z0, "z0");
                       positive(m.q, "q");
                   },
               },
               model);
}

std::string model_name(const NoiseModel& model)
{
    return std::visit(overloaded{
                          [](const Gaussian&) { return std::string("gaussian"); },
                          [](const Laplacian&) { return std::string("laplacian"); },
                          [](const BinarySymmetric&) { return std::string("binary"); },
                          [](const Uniform&) { return std::string("uniform"); },
                          [](const MixtureBinaryLaplace&) { return std::string("mixture_binary_laplace"); },
                      },
                      model);
}

std::pair<double, double> cgf_domain(const NoiseModel& model)
{
    static constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(overloaded{
                          [](const Laplacian& m) { return std::pair{-m.q, m.q}; },
                          [](const MixtureBinaryLaplace& m) { return std::pair{-m.q, m.q}; },
                          [](const auto&) { return std::pair{-inf, inf}; },
                      },
                      model);
}

double cgf_limit(const NoiseModel& model)
{
    const double hi = cgf_domain(model).second;
    return std::isinf(hi) ? hi : hi * (1.0 - kPoleMargin);
}

double cgf_eval(const NoiseModel& model, double v)
{
    check_domain(model, v);
    return std::visit(overloaded{
                          [v](const Gaussian& m) { return 0.5 * m.var_z * v * v; },
                          [v](const Laplacian& m) { return laplace_log_mgf(v, m.q); },
                          [v](const BinarySymmetric& m) { return log_cosh(m.z0 * v); },
                          [v](const Uniform& m) { return log_sinhc(m.z0 * v); },
                          [v](const MixtureBinaryLaplace& m) {
                              if (v == 0.0)
                                  return 0.0;
                              return log_add(std::log(m.delta) + log_cosh(m.z0 * v),
                                             std::log1p(-m.delta) + laplace_log_mgf(v, m.q));
                          },
                      },
                      model);
}

double cgf_deriv(const NoiseModel& model, double v)
{
    check_domain(model, v);
    return std::visit(overloaded{
                          [v](const Gaussian& m) { return m.var_z * v; },
                          [v](const Laplacian& m) { return 2.0 * v / (m.q * m.q - v * v); },
                          [v](const BinarySymmetric& m) { return m.z0 * std::tanh(m.z0 * v); },
                          [v](const Uniform& m) { return m.z0 * langevin(m.z0 * v); },
                          [v](const MixtureBinaryLaplace& m) {
                              const double lb = std::log(m.delta) + log_cosh(m.z0 * v);
                              const double ll = std::log1p(-m.delta) + laplace_log_mgf(v, m.q);
                              const double c = log_add(lb, ll);
                              return std::exp(lb - c) * m.z0 * std::tanh(m.z0 * v) +
                                     std::exp(ll - c) * 2.0 * v / (m.q * m.q - v * v);
                          },
                      },
                      model);
}

std::complex<double> mgf_ratio(const NoiseModel& model, double v, double omega)
{
    check_domain(model, v);
    return std::visit(
        overloaded{
            [=](const Gaussian& m) {
                return std::exp(std::complex<double>(-0.5 * m.var_z * omega * omega, m.var_z * v * omega));
            },
            [=](const Laplacian& m) { return laplace_ratio(m.q, v, omega); },
            [=](const BinarySymmetric& m) { return binary_ratio(m.z0, v, omega); },
            [=](const Uniform& m) { return uniform_ratio(m.z0, v, omega); },
            [=](const MixtureBinaryLaplace& m) {
                const double lb = std::log(m.delta) + log_cosh(m.z0 * v);
                const double ll = std::log1p(-m.delta) + laplace_log_mgf(v, m.q);
                const double c = log_add(lb, ll);
                return std::exp(lb - c) * binary_ratio(m.z0, v, omega) +
                       std::exp(ll - c) * laplace_ratio(m.q, v, omega);
            },
        },
        model);
}

double noise_variance(const NoiseModel& model)
{
    return std::visit(overloaded{
                          [](const Gaussian& m) { return m.var_z; },
                          [](const Laplacian& m) { return 2.0 / (m.q * m.q); },
                          [](const BinarySymmetric& m) { return m.z0 * m.z0; },
                          [](const Uniform& m) { return m.z0 * m.z0 / 3.0; },
                          [](const MixtureBinaryLaplace& m) {
                              return m.delta * m.z0 * m.z0 + (1.0 - m.delta) * 2.0 / (m.q * m.q);
                          },
                      },
                      model);
}

}  // namespace corrdet
