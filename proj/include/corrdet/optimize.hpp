#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace corrdet {

struct ScalarMax {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Stops when the interval is narrower than rel_tol * max(|lo|, |hi|) or
/// after max_iter iterations. The endpoints are candidates too, so a
/// maximum at the boundary is returned exactly.
template <class F>
ScalarMax golden_section_max(F&& f, double lo, double hi, double rel_tol = 1e-12, int max_iter = 200)
{
    constexpr double inv_phi = std::numbers::phi - 1.0;
    const double scale = std::max(std::abs(lo), std::abs(hi));
    ScalarMax out{lo, f(lo), 0, lo, hi};
    const double f_hi = f(hi);
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    int it = 0;
    for (; it < max_iter && (b - a) > rel_tol * scale; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    out.iterations = it;
    // Ties resolve towards the smaller abscissa.
    auto take = [&](double x, double fx) {
        if (fx > out.value || (fx == out.value && x < out.x)) {
            out.x = x;
            out.value = fx;
        }
    };
    take(c, fc);
    take(d, fd);
    take(hi, f_hi);
    return out;
}

/// Maximizes a concave f on [0, limit): expands the bracket [0, 1] by
/// doubling until f decreases at the right edge or the limit is reached,
/// then runs golden-section search inside the bracket.
template <class F>
ScalarMax maximize_concave_from_zero(F&& f, double limit = std::numeric_limits<double>::infinity(),
                                     double rel_tol = 1e-12, int max_iter = 200)
{
    const double edge = std::isinf(limit) ? limit : limit * (1.0 - 1e-12);
    double lo = 0.0;
    double mid = std::min(1.0, edge);
    double f_lo = f(0.0);
    double f_mid = f(mid);
    double hi = mid;
    if (f_mid >= f_lo) {
        for (int k = 0; k < 1100; ++k) {
            hi = std::min(2.0 * mid, edge);
            if (hi == mid)
                break;
            const double f_hi = f(hi);
            if (f_hi < f_mid)
                break;
            lo = mid;
            f_lo = f_mid;
            mid = hi;
            f_mid = f_hi;
        }
    }
    auto out = golden_section_max(f, lo, hi, rel_tol, max_iter);
    if (f_lo > out.value) {
        out.x = lo;
        out.value = f_lo;
    }
    return out;
}

inline std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return out;
}

inline std::vector<double> logspace(double a, double b, int n)
{
    auto out = linspace(std::log(a), std::log(b), n);
    for (auto& x : out)
        x = std::exp(x);
    return out;
}

}  // namespace corrdet
