#include "corrdet/convex_envelope.hpp"

#include <algorithm>
#include <stdexcept>

namespace corrdet {

LowerHull::LowerHull(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("LowerHull: need matching, non-empty coordinate arrays");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i > 0 && x[i] < x[i - 1])
            throw std::invalid_argument("LowerHull: abscissae must be sorted");
        if (!x_.empty() && x[i] == x_.back()) {
            if (y[i] < y_.back()) {
                x_.pop_back();
                y_.pop_back();
            } else {
                continue;
            }
        }
        // Pop while the last vertex lies on or above the chord to the new point.
        while (x_.size() >= 2) {
            const std::size_t n = x_.size();
            const double cross = (x_[n - 1] - x_[n - 2]) * (y[i] - y_[n - 2]) - (y_[n - 1] - y_[n - 2]) * (x[i] - x_[n - 2]);
            if (cross > 0.0)
                break;
            x_.pop_back();
            y_.pop_back();
        }
        x_.push_back(x[i]);
        y_.push_back(y[i]);
    }
}

LowerHull::Segment LowerHull::at(double x) const
{
    if (x_.size() == 1 || x <= x_.front())
        return {0, 0, 0.0, y_.front()};
    if (x >= x_.back())
        return {x_.size() - 1, x_.size() - 1, 0.0, y_.back()};
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t r = static_cast<std::size_t>(it - x_.begin());
    const std::size_t l = r - 1;
    if (x == x_[l])
        return {l, l, 0.0, y_[l]};
    const double t = (x - x_[l]) / (x_[r] - x_[l]);
    return {l, r, t, (1.0 - t) * y_[l] + t * y_[r]};
}

}  // namespace corrdet
