#pragma once

namespace chattox::stats {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// P(F >= f) for F ~ F(d1, d2).
double f_upper_tail(double f, double d1, double d2);

/// Two-sided P(|T| >= |t|) for T ~ Student t with df degrees of freedom.
double t_two_sided(double t, double df);

}  // namespace chattox::stats
