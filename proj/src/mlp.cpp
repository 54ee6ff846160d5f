#include "stss/mlp.hpp"

#include <cmath>

namespace stss {

namespace {

struct Forward {
  Matrix pre_hidden;  // n x h
  Matrix hidden;      // relu(pre_hidden)
  Matrix logits;      // n x m
  double loss = 0.0;
};

Forward forward_pass(const MlpModel& p, const Matrix& X, const std::vector<int>& y) {
  Forward f;
  f.pre_hidden = (X * p.w1.transpose()).rowwise() + p.b1.transpose();
  f.hidden = f.pre_hidden.cwiseMax(0.0);
  f.logits = (f.hidden * p.w2.transpose()).rowwise() + p.b2.transpose();

  const Index n = X.rows();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double mx = f.logits.row(i).maxCoeff();
    const double lse = mx + std::log((f.logits.row(i).array() - mx).exp().sum());
    total += lse - f.logits(i, y[static_cast<std::size_t>(i)]);
  }
  f.loss = total / static_cast<double>(n);
  return f;
}

}  // namespace

double mlp_loss(const MlpModel& params, const Matrix& X, const std::vector<int>& y_local) {
  return forward_pass(params, X, y_local).loss;
}

double mlp_loss_and_gradient(const MlpModel& params, const Matrix& X,
                             const std::vector<int>& y_local, MlpModel& grad) {
  const Forward f = forward_pass(params, X, y_local);
  const Index n = X.rows();
  const Index m = params.w2.rows();

  Matrix dlogits(n, m);
  for (Index i = 0; i < n; ++i) {
    const double mx = f.logits.row(i).maxCoeff();
    Eigen::RowVectorXd e = (f.logits.row(i).array() - mx).exp();
    e /= e.sum();
    dlogits.row(i) = e;
    dlogits(i, y_local[static_cast<std::size_t>(i)]) -= 1.0;
  }
  dlogits /= static_cast<double>(n);

  grad.w2 = dlogits.transpose() * f.hidden;
  grad.b2 = dlogits.colwise().sum().transpose();

  Matrix dhidden = dlogits * params.w2;
  dhidden = (f.pre_hidden.array() > 0.0).select(dhidden, 0.0);

  grad.w1 = dhidden.transpose() * X;
  grad.b1 = dhidden.colwise().sum().transpose();
  return f.loss;
}

Vector mlp_flatten(const MlpModel& p) {
  Vector flat(p.w1.size() + p.b1.size() + p.w2.size() + p.b2.size());
  Index at = 0;
  flat.segment(at, p.w1.size()) = Eigen::Map<const Vector>(p.w1.data(), p.w1.size());
  at += p.w1.size();
  flat.segment(at, p.b1.size()) = p.b1;
  at += p.b1.size();
  flat.segment(at, p.w2.size()) = Eigen::Map<const Vector>(p.w2.data(), p.w2.size());
  at += p.w2.size();
  flat.segment(at, p.b2.size()) = p.b2;
  return flat;
}

MlpModel mlp_unflatten(const Vector& flat, Index d, Index hidden, Index m) {
  MlpModel p;
  Index at = 0;
  p.w1 = Eigen::Map<const Matrix>(flat.data() + at, hidden, d);
  at += hidden * d;
  p.b1 = flat.segment(at, hidden);
  at += hidden;
  p.w2 = Eigen::Map<const Matrix>(flat.data() + at, m, hidden);
  at += m * hidden;
  p.b2 = flat.segment(at, m);
  return p;
}

MlpModel train_mlp(const Matrix& X, const std::vector<int>& y_local, int m, int hidden_width,
                   const MlpConfig& cfg, std::uint64_t seed) {
  const Index d = X.cols();
  const Index h = hidden_width;

  Rng rng(seed);
  MlpModel p;
  p.w1.resize(h, d);
  p.w2.resize(m, h);
  const double scale1 = std::sqrt(2.0 / static_cast<double>(d));
  const double scale2 = std::sqrt(2.0 / static_cast<double>(h));
  for (Index i = 0; i < h; ++i)
    for (Index j = 0; j < d; ++j) p.w1(i, j) = rng.normal() * scale1;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < h; ++j) p.w2(i, j) = rng.normal() * scale2;
  p.b1 = Vector::Zero(h);
  p.b2 = Vector::Zero(m);

  // full-batch Adam
  Vector theta = mlp_flatten(p);
  Vector m1 = Vector::Zero(theta.size());
  Vector m2 = Vector::Zero(theta.size());
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;

  MlpModel grad;
  for (int t = 1; t <= cfg.max_iterations; ++t) {
    p = mlp_unflatten(theta, d, h, m);
    mlp_loss_and_gradient(p, X, y_local, grad);
    const Vector g = mlp_flatten(grad);
    if (g.lpNorm<Eigen::Infinity>() < 1e-8) break;

    m1 = kBeta1 * m1 + (1.0 - kBeta1) * g;
    m2 = kBeta2 * m2 + (1.0 - kBeta2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(kBeta1, t);
    const double c2 = 1.0 - std::pow(kBeta2, t);
    theta -= (cfg.learning_rate / c1) * m1.cwiseQuotient(((m2 / c2).cwiseSqrt().array() + kEps).matrix());
  }
  return mlp_unflatten(theta, d, h, m);
}

}  // namespace stss
