#include "stss/curves.hpp"

#include "stss/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace stss {

namespace {

double power_law(double alpha, double beta, double gamma, double x) {
  return alpha - beta * std::pow(x, gamma);
}

double sse_of(const std::vector<std::pair<double, double>>& points, double alpha, double beta,
              double gamma) {
  double sse = 0.0;
  for (const auto& [x, y] : points) {
    const double r = y - power_law(alpha, beta, gamma, x);
    sse += r * r;
  }
  return sse;
}

}  // namespace

std::vector<CurvePoint> empirical_curve(const std::vector<AccuracyRecord>& records, double level) {
  if (records.empty()) throw std::invalid_argument("empirical_curve: no records");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("empirical_curve: level must be in (0, 1)");

  std::map<long, std::vector<double>> by_size;
  for (const auto& rec : records) by_size[rec.size].push_back(rec.accuracy);

  std::vector<CurvePoint> out;
  out.reserve(by_size.size());
  for (auto& [size, values] : by_size) {
    const int n = static_cast<int>(values.size());
    std::sort(values.begin(), values.end(), std::greater<double>());  // descending

    double sum = 0.0;
    for (double v : values) sum += v;

    // k-th highest lower bound, (n+1-k)-th highest upper bound
    const int k = static_cast<int>(std::ceil(n * (1.0 + level) / 2.0));
    const int k_clamped = std::clamp(k, 1, n);

    CurvePoint pt;
    pt.size = size;
    pt.n_samples = n;
    pt.mean = sum / n;
    pt.lower = values[k_clamped - 1];
    pt.upper = values[n - k_clamped];
    out.push_back(pt);
  }
  return out;
}

PowerLawCurve fit_power_law(const std::vector<std::pair<double, double>>& points, double y_max,
                            BoundKind kind) {
  {
    std::vector<double> xs;
    for (const auto& [x, y] : points)
      if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    if (xs.size() < 3)
      throw std::invalid_argument("fit_power_law: need at least 3 distinct sizes");
  }
  if (y_max > 1.0 + 1e-12) throw std::invalid_argument("fit_power_law: y_max above 1");
  y_max = std::min(y_max, 1.0);

  auto objective = [&](const Vector& p) { return sse_of(points, p[0], p[1], p[2]); };

  const Vector lo = (Vector(3) << y_max, 0.0, -60.0).finished();
  const Vector hi = (Vector(3) << 1.0, std::numeric_limits<double>::infinity(), 0.0).finished();

  // {1,0,0} is the canonical start but stationary in gamma (beta = 0
  // kills that gradient), so a fixed fan of interior starts backs it up.
  std::vector<Vector> starts;
  starts.push_back((Vector(3) << 1.0, 0.0, 0.0).finished());
  for (double beta0 : {0.1, 0.5, 1.0})
    for (double gamma0 : {-1.0, -0.5, -0.1})
      starts.push_back((Vector(3) << y_max, beta0, gamma0).finished());

  NelderMeadOptions opts;
  opts.max_iterations = 10000;
  opts.x_tolerance = 1e-10;
  opts.f_tolerance = 1e-18;

  Vector best = starts.front();
  double best_sse = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (const auto& start : starts) {
    auto res = nelder_mead_box<double>(objective, start, lo, hi, opts);
    if (res.value < best_sse) {
      best_sse = res.value;
      best = res.x;
      converged = res.converged;
    }
  }
  // polish: restart the simplex at the winner until it stops improving
  for (int round = 0; round < 3; ++round) {
    auto res = nelder_mead_box<double>(objective, best, lo, hi, opts);
    if (res.value + 1e-18 >= best_sse) {
      converged = converged || res.converged;
      break;
    }
    best_sse = res.value;
    best = res.x;
    converged = res.converged;
  }

  PowerLawCurve curve;
  curve.alpha = best[0];
  curve.beta = best[1];
  curve.gamma = best[2];
  curve.sse = best_sse;
  curve.bound_kind = kind;
  curve.converged = converged;

  double abs_sum = 0.0;
  for (const auto& [x, y] : points)
    abs_sum += std::abs(y - power_law(curve.alpha, curve.beta, curve.gamma, x));
  curve.mae = abs_sum / static_cast<double>(points.size());
  return curve;
}

double estimate_asymptote(const std::vector<CurvePoint>& mean_points) {
  std::vector<std::pair<double, double>> pts;
  double y_max = 0.0;
  for (const auto& p : mean_points) {
    pts.emplace_back(static_cast<double>(p.size), p.mean);
    y_max = std::max(y_max, p.mean);
  }
  return fit_power_law(pts, y_max, BoundKind::Mean).alpha;
}

double evaluate_curve(const PowerLawCurve& curve, double x) {
  return power_law(curve.alpha, curve.beta, curve.gamma, x);
}

StssResult compute_stss(const PowerLawCurve& lower_curve, double f_inf,
                        const StssCriteria& criteria) {
  if (!(criteria.t1 > 0.0 && criteria.t1 < 1.0 && criteria.t2 > 0.0 && criteria.t2 < 1.0))
    throw std::invalid_argument("compute_stss: criteria out of range");
  if (criteria.x_min < 1) throw std::invalid_argument("compute_stss: x_min must be >= 1");

  const double alpha = lower_curve.alpha;
  const double beta = lower_curve.beta;
  const double gamma = lower_curve.gamma;
  const double target = f_inf - criteria.t2;
  const double delta = alpha - target;  // headroom of the asymptote over the band edge

  StssResult result;
  result.f_inf = f_inf;

  if (delta <= 0.0)
    throw std::domain_error("compute_stss: curve asymptote never reaches f_inf - T2");

  if (beta == 0.0) {
    result.stss = criteria.x_min;
    result.clamped = true;
    result.analytic_value = 0.0;
    return result;
  }
  if (gamma == 0.0)
    throw std::invalid_argument("compute_stss: degenerate curve (gamma = 0 with beta > 0)");

  const double analytic = std::exp((std::log(delta) - std::log(beta)) / gamma);
  result.analytic_value = analytic;

  auto meets = [&](double x) { return evaluate_curve(lower_curve, x) >= target; };

  long candidate;
  if (!std::isfinite(analytic) || analytic > 9.0e18) {
    throw std::domain_error("compute_stss: crossing size overflows the integer range");
  }
  candidate = static_cast<long>(std::ceil(analytic));
  if (candidate < 1) candidate = 1;
  // absorb float noise at integer crossings: the contract is the smallest
  // integer satisfying the evaluated inequality
  for (int guard = 0; guard < 4 && candidate > 1 && meets(static_cast<double>(candidate - 1));
       ++guard)
    --candidate;
  for (int guard = 0; guard < 4 && !meets(static_cast<double>(candidate)); ++guard) ++candidate;

  if (candidate < criteria.x_min) {
    result.stss = criteria.x_min;
    result.clamped = true;
  } else {
    result.stss = candidate;
    result.clamped = false;
  }
  return result;
}

}  // namespace stss
