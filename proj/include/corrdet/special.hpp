#pragma once

namespace corrdet {

/// Gaussian tail probability Q(x) = Pr{N(0,1) >= x}.
double q_function(double x);

/// ln Q(x), accurate far into the upper tail where Q underflows.
double log_q(double x);

/// ln(1 - Q(x)) = ln Phi(x).
double log_phi(double x);

/// ln(e^a + e^b).
double log_sum_exp(double a, double b);

}  // namespace corrdet
