#pragma once

#include "corrdet/atoms.hpp"
#include "corrdet/noise_model.hpp"
#include "corrdet/rng.hpp"

#include <cstdint>
#include <vector>

namespace corrdet {

struct SimConfig {
    std::vector<int> n_values{50, 100, 200, 400};
    int trials = 100000;
    std::uint64_t seed = 0;
    double tilt_lambda = 0.0;  // 0 gives plain Monte Carlo
    int threads = 1;

    void validate() const;
};

struct ProbabilityEstimate {
    int n = 0;
    double prob = 0.0;
    double log_prob = 0.0;
    double rel_stderr = 0.0;
    int hits = 0;
};

struct SlopeEstimate {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    std::vector<ProbabilityEstimate> per_n;
};

/// Q(theta n / (sigma_N ||w||)), with the weight pattern tiled to length n.
double fa_probability_exact(const Eigen::ArrayXd& w, double theta, int n, double var_n);
/// Natural log of fa_probability_exact, finite deep in the tail.
double log_fa_probability_exact(const Eigen::ArrayXd& w, double theta, int n, double var_n);

/// Draws from the density proportional to f_Z(z) e^{t z}.
double sample_tilted(const NoiseModel& model, double t, SplitMix64& rng);

/// Pr{sum_t w_t (s_t + Z_t + N_t) <= theta n} for each n in the config, with
/// the (w, s) patterns tiled to length n. With tilt_lambda > 0 every Z_t and
/// N_t is drawn from its exponentially tilted law (tilt -lambda w_t) and
/// reweighted by the likelihood ratio.
std::vector<ProbabilityEstimate> md_probability(const NoiseModel& model, const Eigen::ArrayXd& w,
                                                const Eigen::ArrayXd& s, double theta, const SimConfig& config,
                                                const PowerBudget& budget);

/// Weighted least-squares slope of -ln(prob) against n. Points with zero
/// probability or rel_stderr >= 0.2 are dropped; inverse-variance weights
/// (unit weights when some rel_stderr is exactly zero).
SlopeEstimate estimate_slope(const std::vector<ProbabilityEstimate>& per_n);

}  // namespace corrdet
