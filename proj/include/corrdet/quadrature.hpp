#pragma once

#include <functional>
#include <vector>

namespace corrdet {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod integration of f over consecutive pieces
/// [points[0], points[1]], [points[1], points[2]], ... Throws
/// QuadratureFailure when the summed error estimate exceeds abs_tol.
QuadratureResult integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& points,
                                  double abs_tol = 1e-9);

}  // namespace corrdet
