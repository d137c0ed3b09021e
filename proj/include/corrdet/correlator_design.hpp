#pragma once

#include "corrdet/atoms.hpp"
#include "corrdet/exponents.hpp"
#include "corrdet/noise_model.hpp"

#include <optional>
#include <vector>

namespace corrdet {

/// A designed detector: weight/signal atoms, threshold, energy (or |.|)
/// coefficient, and the exponents it achieves.
struct DetectorDesign {
    JointAtoms joint;
    double theta = 0.0;
    double alpha = 0.0;
    double e_fa = 0.0;
    ExponentResult e_md;
    double rho_star = 0.0;
    double lambda_design = 0.0;  // lambda at which the weights were generated
};

/// k-level correlator: W = levels[i] whenever S lies in cell i, where cell i
/// is [boundaries[i-1], boundaries[i]) with open outer ends.
struct QuantizerDesign {
    std::vector<double> boundaries;
    std::vector<double> levels;
    std::vector<double> cell_probability;
    std::vector<double> centroids;
    double rho = 0.0;
    double lambda = 0.0;
    int sweeps = 0;
    bool converged = false;
    JointAtoms joint;
    ExponentResult e_md;
};

struct FourAskDesign {
    double alpha = 0.0;  // weight on the +-a symbols
    double beta = 0.0;   // weight on the +-3a symbols
    ExponentResult e_md;
};

/// g(w | rho, lambda) = C'(lambda w) + (rho / lambda + sigma_N^2 lambda) w.
double g_eval(const NoiseModel& model, double w, double rho, double lambda, double var_n);

/// Inverse of the strictly increasing map g(. | rho, lambda).
double g_inverse(const NoiseModel& model, double s, double rho, double lambda, double var_n);

/// Lagrange multiplier of the correlator power constraint at a given lambda:
/// 0 when E{[g^-1(S|0,lambda)]^2} <= P_w, otherwise the rho meeting the
/// constraint with equality.
double tune_rho(const NoiseModel& model, const SignalAtoms& signal, double lambda, const PowerBudget& budget);

/// Maps every signal atom through g^-1(. | rho, lambda).
Eigen::ArrayXd optimal_weights(const NoiseModel& model, const SignalAtoms& signal, double rho, double lambda,
                               double var_n);

/// Optimal correlator for a given signal, searching lambda on a log grid
/// with golden-section refinement around the best grid point.
DetectorDesign design_optimal(const NoiseModel& model, const SignalAtoms& signal, double theta,
                              const PowerBudget& budget);

/// w proportional to s with power exactly P_w.
JointAtoms design_classical(const SignalAtoms& signal, const PowerBudget& budget);

/// w = sqrt(P_w) sgn(s), with sgn(0) = +1.
JointAtoms design_binary(const SignalAtoms& signal, const PowerBudget& budget);

/// k-level correlator by alternating boundary and level updates (Lloyd
/// style), wrapped in the same outer lambda search as design_optimal.
/// `initial_boundaries`, when given, replaces the quantile initializer.
QuantizerDesign design_quantized(const NoiseModel& model, const SignalAtoms& signal, int k, double theta,
                                 const PowerBudget& budget,
                                 const std::optional<std::vector<double>>& initial_boundaries = std::nullopt);

/// MD exponent of the 4-ASK signal (+-a, +-3a equiprobable) correlated with
/// weights +-alpha and +-beta, beta = sqrt(2 P_w - alpha^2).
ExponentResult four_ask_exponent(const NoiseModel& model, double a, double alpha, double theta,
                                 const PowerBudget& budget);

/// Maximizes four_ask_exponent over alpha in [0, sqrt(2 P_w)].
FourAskDesign design_4ask(const NoiseModel& model, double a, double theta, const PowerBudget& budget);

}  // namespace corrdet
