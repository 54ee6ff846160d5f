#include "stss/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>
#include <vector>

namespace stss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kernel rows on demand: the full matrix when small, otherwise a bounded
// FIFO row cache (~64 MB).
class KernelCache {
 public:
  KernelCache(const Matrix& X, double gamma) : X_(X), gamma_(gamma) {
    const Index n = X.rows();
    if (n <= 2048) {
      full_.resize(n, n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j <= i; ++j) {
          const double k = kernel(i, j);
          full_(i, j) = k;
          full_(j, i) = k;
        }
      }
    } else {
      capacity_ = std::max<std::size_t>(2, (64ULL << 20) / (8 * static_cast<std::size_t>(n)));
    }
    diag_.resize(n);
    for (Index i = 0; i < n; ++i) diag_[i] = full_.size() > 0 ? full_(i, i) : kernel(i, i);
  }

  double diag(Index i) const { return diag_[i]; }

  void row_into(Index i, Vector& out) {
    if (full_.size() > 0) {
      out = full_.row(i);
      return;
    }
    auto it = cache_.find(i);
    if (it == cache_.end()) {
      Vector r(X_.rows());
      for (Index j = 0; j < X_.rows(); ++j) r[j] = kernel(i, j);
      if (cache_.size() >= capacity_) {
        cache_.erase(order_.front());
        order_.pop_front();
      }
      order_.push_back(i);
      it = cache_.emplace(i, std::move(r)).first;
    }
    out = it->second;
  }

  double kernel(Index i, Index j) const {
    if (gamma_ > 0.0) {
      return std::exp(-gamma_ * (X_.row(i) - X_.row(j)).squaredNorm());
    }
    return X_.row(i).dot(X_.row(j));
  }

 private:
  const Matrix& X_;
  double gamma_;
  Matrix full_;
  Vector diag_;
  std::unordered_map<Index, Vector> cache_;
  std::deque<Index> order_;
  std::size_t capacity_ = 0;
};

}  // namespace

SvmModel train_svm(const Matrix& X, const std::vector<int>& y_local, const SvmConfig& cfg) {
  const Index n = X.rows();
  const double C = cfg.penalty_c;

  double gamma = 0.0;
  if (cfg.kernel == SvmConfig::Kernel::Rbf) {
    if (cfg.rbf_gamma) {
      gamma = *cfg.rbf_gamma;
    } else {
      // 1 / (#columns * overall feature variance)
      const double mean = X.mean();
      const double var = (X.array() - mean).square().sum() / static_cast<double>(X.size());
      gamma = var > 0.0 ? 1.0 / (static_cast<double>(X.cols()) * var) : 1.0;
    }
  }

  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = y_local[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;

  KernelCache cache(X, gamma);
  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);  // G_i = sum_j Q_ij a_j - 1
  Vector Ki(n), Kj(n);

  const long max_iter = std::max<long>(100000, 100 * n);
  for (long iter = 0; iter < max_iter; ++iter) {
    // maximal violating pair
    Index i = -1, j = -1;
    double up_max = -kInf, low_min = kInf;
    for (Index t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool in_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
      const bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
      if (in_up && v > up_max) {
        up_max = v;
        i = t;
      }
      if (in_low && v < low_min) {
        low_min = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || up_max - low_min < cfg.tolerance) break;

    cache.row_into(i, Ki);
    cache.row_into(j, Kj);

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    // squared feature-space distance, the curvature along the pair
    double quad = cache.diag(i) + cache.diag(j) - 2.0 * Ki[j];
    if (quad <= 0.0) quad = 1e-12;

    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else {
        if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = -diff;
        }
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = C + diff;
        }
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = sum;
        }
        if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = sum;
        }
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    if (dai != 0.0 || daj != 0.0) {
      for (Index t = 0; t < n; ++t)
        grad[t] += y[t] * (y[i] * Ki[t] * dai + y[j] * Kj[t] * daj);
    }
  }

  // rho from the KKT conditions
  double upper = kInf, lower = -kInf, sum_free = 0.0;
  long n_free = 0;
  for (Index t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (upper + lower);

  SvmModel model;
  model.gamma = gamma;
  model.bias = rho;
  std::vector<Index> sv;
  for (Index t = 0; t < n; ++t)
    if (alpha[t] > 0.0) sv.push_back(t);
  model.support_vectors.resize(static_cast<Index>(sv.size()), X.cols());
  model.dual_coef.resize(static_cast<Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(static_cast<Index>(s)) = X.row(sv[s]);
    model.dual_coef[static_cast<Index>(s)] = alpha[sv[s]] * y[sv[s]];
  }
  return model;
}

}  // namespace stss
