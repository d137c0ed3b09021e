#pragma once

#include "corrdet/atoms.hpp"
#include "corrdet/convex_envelope.hpp"
#include "corrdet/noise_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace corrdet {

enum class Curvature { convex, concave, mixed };

std::string to_string(Curvature c);

/// Shape of p -> C(lambda sqrt(p)) on [0, p_max], from the sign pattern of
/// second differences on a 10^4-point grid. Linear counts as convex.
Curvature classify_curvature(const NoiseModel& model, double lambda, double p_max);

/// Non-negative solutions w of C'(lambda w) = kappa w.
struct StationaryLevels {
    double kappa = 0.0;
    std::vector<double> roots;  // ascending, always starts with 0
    bool continuum = false;     // Gaussian model with kappa = var_z lambda: every w solves
};

StationaryLevels stationary_levels(const NoiseModel& model, double lambda, double kappa,
                                   std::optional<double> w_max = std::nullopt, int grid_points = 100000);

/// Value of the restricted envelope together with its (at most) two support
/// power levels: value = (1 - mix_alpha) C(lambda sqrt(p0)) + mix_alpha C(lambda sqrt(p1)).
struct EnvelopeValue {
    double value = 0.0;
    double p0 = 0.0;
    double p1 = 0.0;
    double mix_alpha = 0.0;
};

/// Lower convex envelope of p -> C(lambda sqrt(p)) over [0, p_cap].
///
/// Built in the scaled variable u = lambda^2 p, so envelopes that share
/// lambda^2 p_cap coincide. The grid mixes 5000 log-spaced and 5000
/// linearly spaced abscissae.
class CgfEnvelope {
public:
    CgfEnvelope(const NoiseModel& model, double lambda, double p_cap);

    EnvelopeValue at(double p) const;
    double lambda() const { return lambda_; }
    double p_cap() const { return p_cap_; }

private:
    NoiseModel model_;
    double lambda_;
    double p_cap_;
    LowerHull hull_;
};

/// One-shot envelope evaluation. Throws DomainError when lambda sqrt(p_cap)
/// leaves the CGF domain.
EnvelopeValue c_tilde(const NoiseModel& model, double lambda, double p, double p_cap);

/// Jointly optimal signal and correlator: at most two magnitude levels a <= b
/// used with frequencies 1 - mix_alpha and mix_alpha; the signal is the
/// correlator scaled by sqrt(P_s / p_star).
struct JointDesignResult {
    double e_md = 0.0;
    double lambda_star = 0.0;
    double p_star = 0.0;
    double a = 0.0;
    double b = 0.0;
    double mix_alpha = 0.0;
    double signal_scale = 0.0;
    double c_tilde = 0.0;  // envelope value at the optimizer
    Curvature curvature = Curvature::convex;
    double p_cap = 0.0;
    bool cap_converged = true;

    /// +-a and +-b weight atoms (split symmetrically) with their signal levels.
    JointAtoms atoms() const;
};

struct JointSearchOptions {
    std::optional<double> p_cap;  // default 1e6 P_w
    bool check_cap = true;        // re-solve at 2 p_cap and compare
};

/// sup over lambda >= 0 and P <= P_w of
/// lambda (sqrt(P_s P) - theta) - C~_lambda(P) - lambda^2 sigma_N^2 P / 2.
JointDesignResult joint_md_exponent(const NoiseModel& model, const PowerBudget& budget, double theta,
                                    const JointSearchOptions& options = {});

/// Direct maximization over two-level designs (a, b, mix) at full power P_w
/// with the signal proportional to the correlator. Independent of the
/// envelope construction.
JointDesignResult two_level_direct(const NoiseModel& model, const PowerBudget& budget, double theta,
                                   std::optional<double> p1_max = std::nullopt);

}  // namespace corrdet
