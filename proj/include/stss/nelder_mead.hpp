#pragma once

#include "stss/types.hpp"

#include <array>
#include <limits>
#include <vector>

namespace stss {

struct NelderMeadOptions {
  int max_iterations = 10000;
  double x_tolerance = 1e-10;
  double f_tolerance = 1e-18;
};

template <typename ScalarT>
struct NelderMeadResult {
  Eigen::Matrix<ScalarT, Eigen::Dynamic, 1> x;
  ScalarT value = std::numeric_limits<ScalarT>::infinity();
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead downhill simplex with box constraints: every proposed
/// vertex is clamped into [lo, hi] before evaluation. Dimensions with
/// lo == hi stay pinned. Deterministic: no randomness, fixed simplex
/// construction from the start point.
template <typename ScalarT, typename F>
NelderMeadResult<ScalarT> nelder_mead_box(
    F&& objective, const Eigen::Matrix<ScalarT, Eigen::Dynamic, 1>& start,
    const Eigen::Matrix<ScalarT, Eigen::Dynamic, 1>& lo,
    const Eigen::Matrix<ScalarT, Eigen::Dynamic, 1>& hi,
    const NelderMeadOptions& opts = {}) {
  using VectorT = Eigen::Matrix<ScalarT, Eigen::Dynamic, 1>;
  const Index dim = start.size();

  auto clamp = [&](VectorT v) {
    for (Index i = 0; i < dim; ++i) {
      if (v[i] < lo[i]) v[i] = lo[i];
      if (v[i] > hi[i]) v[i] = hi[i];
    }
    return v;
  };

  // free = coordinates the simplex actually spans
  std::vector<Index> free;
  for (Index i = 0; i < dim; ++i)
    if (lo[i] < hi[i]) free.push_back(i);

  NelderMeadResult<ScalarT> result;
  VectorT x0 = clamp(start);
  if (free.empty()) {
    result.x = x0;
    result.value = objective(x0);
    result.converged = true;
    return result;
  }

  const Index n = static_cast<Index>(free.size());
  std::vector<VectorT> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(x0);
  for (Index j = 0; j < n; ++j) {
    VectorT v = x0;
    const Index i = free[j];
    ScalarT step = ScalarT(0.1) * std::max<ScalarT>(ScalarT(1), std::abs(x0[i]));
    // keep the vertex strictly inside a finite box
    if (std::isfinite(hi[i]) && std::isfinite(lo[i]))
      step = std::min(step, ScalarT(0.25) * (hi[i] - lo[i]));
    if (x0[i] + step > hi[i]) step = -step;
    v[i] += step;
    simplex.push_back(clamp(v));
  }

  std::vector<ScalarT> fv(n + 1);
  for (Index i = 0; i <= n; ++i) fv[i] = objective(simplex[i]);

  std::vector<Index> order(n + 1);
  auto sort_simplex = [&] {
    for (Index i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return fv[a] < fv[b] || (fv[a] == fv[b] && a < b);
    });
  };

  constexpr ScalarT kReflect = ScalarT(1);
  constexpr ScalarT kExpand = ScalarT(2);
  constexpr ScalarT kContract = ScalarT(0.5);
  constexpr ScalarT kShrink = ScalarT(0.5);

  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    sort_simplex();
    const Index best = order[0];
    const Index worst = order[n];

    ScalarT spread_f = ScalarT(0);
    ScalarT spread_x = ScalarT(0);
    for (Index i = 0; i <= n; ++i) {
      spread_f = std::max(spread_f, std::abs(fv[i] - fv[best]));
      spread_x = std::max<ScalarT>(
          spread_x, (simplex[i] - simplex[best]).template lpNorm<Eigen::Infinity>());
    }
    if (spread_x < opts.x_tolerance && spread_f < opts.f_tolerance) {
      result.converged = true;
      break;
    }

    VectorT centroid = VectorT::Zero(dim);
    for (Index i = 0; i <= n; ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= ScalarT(n);

    VectorT reflected = clamp(centroid + kReflect * (centroid - simplex[worst]));
    const ScalarT f_reflected = objective(reflected);

    if (f_reflected < fv[order[0]]) {
      VectorT expanded = clamp(centroid + kExpand * (reflected - centroid));
      const ScalarT f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        fv[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        fv[worst] = f_reflected;
      }
    } else if (f_reflected < fv[order[n - 1]]) {
      simplex[worst] = reflected;
      fv[worst] = f_reflected;
    } else {
      const bool outside = f_reflected < fv[worst];
      VectorT contracted = outside ? clamp(centroid + kContract * (reflected - centroid))
                                   : clamp(centroid - kContract * (centroid - simplex[worst]));
      const ScalarT f_contracted = objective(contracted);
      if (f_contracted < std::min(f_reflected, fv[worst])) {
        simplex[worst] = contracted;
        fv[worst] = f_contracted;
      } else {
        const VectorT& anchor = simplex[order[0]];
        for (Index i = 0; i <= n; ++i) {
          if (i == order[0]) continue;
          simplex[i] = clamp(anchor + kShrink * (simplex[i] - anchor));
          fv[i] = objective(simplex[i]);
        }
      }
    }
  }

  sort_simplex();
  result.x = simplex[order[0]];
  result.value = fv[order[0]];
  result.iterations = iter;
  return result;
}

}  // namespace stss
