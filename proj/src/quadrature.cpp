#include "corrdet/quadrature.hpp"

#include "corrdet/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

namespace corrdet {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// One Kronrod step on [a, b]. The rule is applied on [-1, 1] to a rescaled
// integrand because Boost 1.74 reports the error estimate without the
// interval half-width factor.
QuadratureResult kronrod(const std::function<double(double)>& f, double a, double b)
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double err = 0.0;
    const double v = GK::integrate([&](double x) { return half * f(mid + half * x); }, -1.0, 1.0, 0, 0.0, &err);
    return {v, err};
}

// Bisects until each piece meets its share of the tolerance, the depth runs
// out, or the shared budget of Kronrod steps is spent.
QuadratureResult adaptive(const std::function<double(double)>& f, double a, double b, double tol, int depth,
                          int& budget)
{
    const auto whole = kronrod(f, a, b);
    --budget;
    if (whole.error <= tol || depth == 0 || budget <= 0)
        return whole;
    const double mid = 0.5 * (a + b);
    const auto left = adaptive(f, a, mid, 0.5 * tol, depth - 1, budget);
    const auto right = adaptive(f, mid, b, 0.5 * tol, depth - 1, budget);
    return {left.value + right.value, left.error + right.error};
}

}  // namespace

QuadratureResult integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& points,
                                  double abs_tol)
{
    QuadratureResult out;
    int budget = 20000;
    const double share = 0.1 * abs_tol / static_cast<double>(points.size());
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i]))
            continue;
        const auto piece = adaptive(f, points[i], points[i + 1], share, 40, budget);
        out.value += piece.value;
        out.error += piece.error;
    }
    if (!std::isfinite(out.value) || !(out.error <= abs_tol)) {
        std::ostringstream msg;
        msg << "quadrature error estimate " << out.error << " exceeds " << abs_tol;
        throw QuadratureFailure(msg.str());
    }
    return out;
}

}  // namespace corrdet
