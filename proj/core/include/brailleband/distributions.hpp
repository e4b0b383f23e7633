#pragma once

namespace brailleband {

/// Regularized incomplete beta I_x(a, b), evaluated with the modified Lentz
/// continued fraction (converged to ~1e-15 relative). Requires a, b > 0 and
/// 0 <= x <= 1.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided Student-t tail probability P(|T| >= |t|) for df > 0 degrees of
/// freedom.
double t_sf(double t, double df);

/// Upper tail P(F >= f) of the F distribution with (df1, df2) degrees of freedom.
double f_sf(double f, double df1, double df2);

}  // namespace brailleband
