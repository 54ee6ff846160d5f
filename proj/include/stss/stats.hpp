#pragma once

#include "stss/types.hpp"

namespace stss {

/// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
/// Continued-fraction evaluation, absolute accuracy better than 1e-12.
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

double population_variance(const Vector& v);

}  // namespace stss
