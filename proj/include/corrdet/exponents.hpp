#pragma once

#include "corrdet/atoms.hpp"
#include "corrdet/noise_model.hpp"

namespace corrdet {

/// An error exponent together with the Chernoff parameter that attains it.
struct ExponentResult {
    double value = 0.0;
    double lambda_star = 0.0;
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

/// False-alarm exponent theta^2 / (2 sigma_N^2 P_w) of a plain correlator.
double fa_exponent(double theta, const PowerBudget& budget);

/// Threshold giving the false-alarm exponent e_fa: sigma_N sqrt(2 P_w e_fa).
double theta_for_fa(double e_fa, const PowerBudget& budget);

/// lambda (E{WS} - theta) - E{C(lambda W)} - lambda^2 sigma_N^2 E{W^2} / 2.
double md_objective(const JointAtoms& joint, double lambda, double theta, const PowerBudget& budget,
                    const NoiseModel& model);

/// Missed-detection exponent: sup over lambda >= 0 of md_objective. The
/// objective is concave in lambda; for models whose CGF has poles the search
/// is confined to the feasible lambda range.
ExponentResult md_exponent(const JointAtoms& joint, double theta, const PowerBudget& budget,
                           const NoiseModel& model);

/// Largest lambda for which lambda * max|w| stays inside the CGF domain.
double lambda_limit(const NoiseModel& model, double max_abs_w);

}  // namespace corrdet
