#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace corrdet {

/// Lower convex hull of a point set sorted by abscissa (monotone chain).
class LowerHull {
public:
    struct Segment {
        std::size_t left = 0;  // vertex index
        std::size_t right = 0;
        double t = 0.0;  // position of x inside [x_left, x_right]
        double value = 0.0;
    };

    LowerHull() = default;
    /// `x` must be non-decreasing.
    LowerHull(std::span<const double> x, std::span<const double> y);

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

    /// Piecewise-linear hull at x, clamped to the hull's abscissa range.
    Segment at(double x) const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
};

}  // namespace corrdet
