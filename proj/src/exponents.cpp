#include "corrdet/exponents.hpp"

#include "corrdet/optimize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace corrdet {

double fa_exponent(double theta, const PowerBudget& budget)
{
    if (theta < 0.0)
        throw std::invalid_argument("fa_exponent: theta must be >= 0");
    return theta * theta / (2.0 * budget.var_n * budget.p_w);
}

double theta_for_fa(double e_fa, const PowerBudget& budget)
{
    if (e_fa < 0.0)
        throw std::invalid_argument("theta_for_fa: e_fa must be >= 0");
    return std::sqrt(2.0 * budget.var_n * budget.p_w * e_fa);
}

double md_objective(const JointAtoms& joint, double lambda, double theta, const PowerBudget& budget,
                    const NoiseModel& model)
{
    if (lambda < 0.0)
        throw std::invalid_argument("md_objective: lambda must be >= 0");
    if (lambda == 0.0)
        return 0.0;
    const auto& w = joint.w();
    const auto& p = joint.weight();
    double mean_cgf = 0.0;
    for (Eigen::Index i = 0; i < joint.size(); ++i)
        if (p[i] > 0.0)
            mean_cgf += p[i] * cgf_eval(model, lambda * w[i]);
    return lambda * (joint.correlation() - theta) - mean_cgf -
           0.5 * lambda * lambda * budget.var_n * joint.w_power();
}

double lambda_limit(const NoiseModel& model, double max_abs_w)
{
    const double lim = cgf_limit(model);
    if (std::isinf(lim) || max_abs_w == 0.0)
        return std::numeric_limits<double>::infinity();
    return lim / max_abs_w;
}

ExponentResult md_exponent(const JointAtoms& joint, double theta, const PowerBudget& budget,
                           const NoiseModel& model)
{
    if (joint.correlation() - theta <= 0.0)
        return {};
    auto objective = [&](double lambda) { return md_objective(joint, lambda, theta, budget, model); };
    const auto best = maximize_concave_from_zero(objective, lambda_limit(model, joint.max_abs_w()));
    if (best.value <= 0.0)
        return {0.0, 0.0, best.iterations, best.bracket_lo, best.bracket_hi};
    return {best.value, best.x, best.iterations, best.bracket_lo, best.bracket_hi};
}

}  // namespace corrdet
