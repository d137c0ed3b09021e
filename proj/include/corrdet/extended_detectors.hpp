#pragma once

#include "corrdet/atoms.hpp"
#include "corrdet/exponents.hpp"
#include "corrdet/noise_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace corrdet {

/// energy: sum_t (w_t Y_t + alpha Y_t^2) >= theta n decides H1.
/// abs:    sum_t (w_t Y_t + alpha |Y_t|) >= theta n decides H1.
enum class DetectorKind { energy, abs };

std::string to_string(DetectorKind kind);
DetectorKind detector_kind_from_string(const std::string& name);

struct ExtendedDetectorSpec {
    JointAtoms joint;
    double alpha = 0.0;
    double theta = 0.0;
    DetectorKind kind = DetectorKind::energy;
};

/// Below this coefficient the extended detectors fall back to the plain correlator.
inline constexpr double kAlphaFloor = 1e-8;

/// FA exponent of the energy detector; depends on the weights only through P_w.
ExponentResult fa_exponent_energy(double theta, const PowerBudget& budget, double alpha);

/// ln E{exp(-v X - alpha lambda X^2)} - sigma_N^2 v^2 / 2 with X = Z + N,
/// evaluated through the Gaussian-kernel Fourier representation.
double c_alpha_energy(const NoiseModel& model, double v, double alpha, double lambda, double var_n);

/// Closed form of c_alpha_energy for Gaussian Z.
double c_alpha_energy_gaussian(double var_z, double v, double alpha, double lambda, double var_n);

ExponentResult md_exponent_energy(const ExtendedDetectorSpec& spec, const PowerBudget& budget,
                                  const NoiseModel& model);

/// FA exponent of the absolute-value detector; needs the whole W
/// distribution (w and weight columns of `joint`).
ExponentResult fa_exponent_abs(double theta, const PowerBudget& budget, double alpha, const JointAtoms& joint);

/// ln E{exp(-v X - alpha lambda |s + X|)} - sigma_N^2 v^2 / 2 with X = Z + N,
/// evaluated through the Lorentzian-kernel Fourier representation.
double c_alpha_abs(const NoiseModel& model, double v, double s, double alpha, double lambda, double var_n);

ExponentResult md_exponent_abs(const ExtendedDetectorSpec& spec, const PowerBudget& budget, const NoiseModel& model);

struct AlphaSweepPoint {
    double alpha = 0.0;
    double p_w = 0.0;
    double e_fa = 0.0;
    ExponentResult e_md;
};

struct AlphaSweep {
    std::vector<AlphaSweepPoint> points;  // feasible alphas only, in grid order
    std::vector<double> skipped;          // alphas for which no P_w attains the FA target
    std::size_t best = 0;                 // index into points
};

/// For each alpha, rescales the weight shape of `joint` to the power P_w that
/// puts the FA exponent at e_fa_target, evaluates the MD exponent and keeps
/// the best. The default alpha grid is 101 points over [0, 2].
AlphaSweep sweep_alpha_fixed_fa(const NoiseModel& model, const JointAtoms& joint, double e_fa_target,
                                DetectorKind kind, double theta, const PowerBudget& budget,
                                std::optional<std::vector<double>> alphas = std::nullopt);

}  // namespace corrdet
