#include "corrdet/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace corrdet {

double q_function(double x)
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double log_q(double x)
{
    if (x < 30.0)
        return std::log(q_function(x));
    // Asymptotic expansion of the Mills ratio; the truncation error is far
    // below double precision for x >= 30.
    const double r = 1.0 / (x * x);
    const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r * (1.0 - 9.0 * r))));
    return -0.5 * x * x - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double log_phi(double x)
{
    if (x < 0.0)
        return log_q(-x);
    return std::log1p(-q_function(x));
}

double log_sum_exp(double a, double b)
{
    const double hi = std::max(a, b);
    if (hi == -std::numeric_limits<double>::infinity())
        return hi;
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace corrdet
