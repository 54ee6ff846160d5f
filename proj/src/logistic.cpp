#include "stss/classifiers.hpp"

#include <cmath>

namespace stss {

namespace {

// Newton/IRLS for one binary problem: minimize
//   sum_i log(1 + exp(-s_i * (b + w.x_i))) + l2/2 * |w|^2
// (intercept unpenalized). Returns the (d+1) coefficient vector.
Vector fit_binary(const Matrix& X, const std::vector<char>& positive, const LogisticConfig& cfg) {
  const Index n = X.rows();
  const Index d = X.cols();
  Vector beta = Vector::Zero(d + 1);

  Matrix A(n, d + 1);
  A.col(0).setOnes();
  A.rightCols(d) = X;

  Vector sign(n);
  for (Index i = 0; i < n; ++i) sign[i] = positive[static_cast<std::size_t>(i)] ? 1.0 : -1.0;

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const Vector margin = A * beta;
    Vector p(n), w(n);
    for (Index i = 0; i < n; ++i) {
      const double mu = 1.0 / (1.0 + std::exp(-margin[i]));
      p[i] = mu;
      w[i] = std::max(mu * (1.0 - mu), 1e-10);
    }
    Vector y01(n);
    for (Index i = 0; i < n; ++i) y01[i] = sign[i] > 0 ? 1.0 : 0.0;

    Vector grad = A.transpose() * (p - y01);
    grad.tail(d) += cfg.l2_strength * beta.tail(d);
    if (grad.lpNorm<Eigen::Infinity>() < 1e-8) break;

    Matrix hess = A.transpose() * w.asDiagonal() * A;
    for (Index j = 1; j <= d; ++j) hess(j, j) += cfg.l2_strength;
    hess.diagonal().array() += 1e-12;

    const Vector step = hess.ldlt().solve(grad);
    beta -= step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  return beta;
}

}  // namespace

LogisticModel train_logistic(const Matrix& X, const std::vector<int>& y_local, int m,
                             const LogisticConfig& cfg) {
  LogisticModel model;
  model.coef.resize(X.cols() + 1, m);

  if (m == 2) {
    // single binary fit; symmetric one-vs-rest columns
    std::vector<char> positive(y_local.size());
    for (std::size_t i = 0; i < y_local.size(); ++i) positive[i] = y_local[i] == 1;
    const Vector beta = fit_binary(X, positive, cfg);
    model.coef.col(0) = -beta;
    model.coef.col(1) = beta;
    return model;
  }

  for (int c = 0; c < m; ++c) {
    std::vector<char> positive(y_local.size());
    for (std::size_t i = 0; i < y_local.size(); ++i) positive[i] = y_local[i] == c;
    model.coef.col(c) = fit_binary(X, positive, cfg);
  }
  return model;
}

}  // namespace stss
