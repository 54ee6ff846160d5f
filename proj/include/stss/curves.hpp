#pragma once

#include "stss/classifiers.hpp"
#include "stss/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace stss {

/// One Monte Carlo measurement: the best-of-methods accuracy for a
/// (dataset, size, fold, rep) training subset.
struct AccuracyRecord {
  std::string dataset_id;
  long size = 0;
  int fold = 0;
  int rep = 0;
  MethodId winning_method = MethodId::Logistic;
  double accuracy = 0.0;
};

struct CurvePoint {
  long size = 0;
  int n_samples = 0;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

enum class BoundKind { Lower, Mean };

/// Fitted inverse power law f(x) = alpha - beta * x^gamma with
/// y_max <= alpha <= 1, beta >= 0, gamma <= 0.
struct PowerLawCurve {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  double mae = 0.0;
  double sse = 0.0;
  BoundKind bound_kind = BoundKind::Lower;
  bool converged = true;
};

struct StssCriteria {
  double t1 = 0.9;   // confidence level
  double t2 = 0.05;  // accuracy tolerance
  long x_min = 1;    // smallest evaluated size

  // two-sided interval level implied by T1: above its lower bound with
  // probability T1
  double interval_level() const { return 1.0 - 2.0 * (1.0 - t1); }
};

struct StssResult {
  long stss = 0;
  bool clamped = false;
  double f_inf = 0.0;
  double analytic_value = 0.0;
};

/// Per size: the mean of the accuracies plus an exact central confidence
/// interval from order statistics. With k = ceil(n*(1+level)/2), the
/// lower bound is the k-th highest value and the upper bound the
/// (n+1-k)-th highest, so the closed interval holds ceil(n*level) of the
/// n samples (the 90th and 11th highest at n = 100, level = 0.8).
std::vector<CurvePoint> empirical_curve(const std::vector<AccuracyRecord>& records,
                                        double level = 0.8);

/// Least-squares inverse power law fit under the box constraints, by
/// deterministic multi-start Nelder-Mead (the {1, 0, 0} start plus a
/// fixed list away from that degenerate stationary point).
PowerLawCurve fit_power_law(const std::vector<std::pair<double, double>>& points, double y_max,
                            BoundKind kind = BoundKind::Lower);

/// Alpha of the curve fitted to the per-size mean accuracies: the
/// estimated best achievable accuracy f(infinity).
double estimate_asymptote(const std::vector<CurvePoint>& mean_points);

/// alpha - beta * x^gamma
double evaluate_curve(const PowerLawCurve& curve, double x);

/// Smallest integer size x with f(x) >= f_inf - T2 for the lower-bound
/// curve, clamped up to x_min when the analytic crossing lies below it.
/// Throws std::domain_error when the curve cannot reach the band
/// (alpha < f_inf - T2) and std::invalid_argument for the degenerate
/// gamma = 0 with beta > 0 curve.
StssResult compute_stss(const PowerLawCurve& lower_curve, double f_inf,
                        const StssCriteria& criteria);

}  // namespace stss
