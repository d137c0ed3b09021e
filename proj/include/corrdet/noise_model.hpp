#pragma once

#include <complex>
#include <string>
#include <utility>
#include <variant>

namespace corrdet {

struct Gaussian {
    double var_z;
};

struct Laplacian {
    double q;
};

struct BinarySymmetric {
    double z0;
};

struct Uniform {
    double z0;
};

// delta * BinarySymmetric{z0} + (1 - delta) * Laplacian{q}
struct MixtureBinaryLaplace {
    double delta;
    double z0;
    double q;
};

/// Symmetric zero-mean distribution of the signal-induced noise Z.
///
/// The family is closed: every member has its cumulant generating function
/// C(v) = ln E{exp(vZ)}, its derivative and its (complex) moment generating
/// function in closed form, and admits exact exponentially tilted sampling.
using NoiseModel = std::variant<Gaussian, Laplacian, BinarySymmetric, Uniform, MixtureBinaryLaplace>;

/// Validates the parameters and throws std::invalid_argument on bad input.
void validate(const NoiseModel& model);

std::string model_name(const NoiseModel& model);

/// Open interval (lo, hi) on which C is finite. Infinite bounds for
/// Gaussian, binary and uniform models.
std::pair<double, double> cgf_domain(const NoiseModel& model);

/// Largest |v| accepted by cgf_eval/cgf_deriv: q(1 - 1e-9) for models with a
/// pole at |v| = q, +inf otherwise.
double cgf_limit(const NoiseModel& model);

double cgf_eval(const NoiseModel& model, double v);
double cgf_deriv(const NoiseModel& model, double v);

/// M(v + j*omega) / M(v), where M(t) = E{exp(tZ)}; modulus <= 1.
std::complex<double> mgf_ratio(const NoiseModel& model, double v, double omega);

/// Variance of Z (C''(0)).
double noise_variance(const NoiseModel& model);

/// Numerically stable ln cosh(x).
double log_cosh(double x);
/// Numerically stable ln(sinh(x) / x), zero at x = 0.
double log_sinhc(double x);

}  // namespace corrdet
