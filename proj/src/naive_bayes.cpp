#include "stss/classifiers.hpp"

#include <cmath>
#include <vector>

namespace stss {

NaiveBayesModel train_naive_bayes(const Matrix& X, const std::vector<int>& y_local, int m,
                                  const NaiveBayesConfig& cfg) {
  const Index n = X.rows();
  const Index d = X.cols();

  NaiveBayesModel model;
  model.log_prior.resize(m);
  model.mean = Matrix::Zero(m, d);
  model.variance = Matrix::Zero(m, d);

  std::vector<long> counts(static_cast<std::size_t>(m), 0);
  for (int label : y_local) ++counts[static_cast<std::size_t>(label)];

  for (Index i = 0; i < n; ++i) model.mean.row(y_local[static_cast<std::size_t>(i)]) += X.row(i);
  for (int c = 0; c < m; ++c) model.mean.row(c) /= static_cast<double>(counts[c]);

  for (Index i = 0; i < n; ++i) {
    const int c = y_local[static_cast<std::size_t>(i)];
    model.variance.row(c) += (X.row(i) - model.mean.row(c)).array().square().matrix();
  }
  for (int c = 0; c < m; ++c) model.variance.row(c) /= static_cast<double>(counts[c]);

  // relative smoothing against zero variances
  double max_feature_var = 0.0;
  for (Index j = 0; j < d; ++j) {
    const double mean_j = X.col(j).mean();
    const double var_j = (X.col(j).array() - mean_j).square().sum() / static_cast<double>(n);
    max_feature_var = std::max(max_feature_var, var_j);
  }
  double epsilon = cfg.variance_floor * max_feature_var;
  if (epsilon <= 0.0) epsilon = 1e-12;
  model.variance.array() += epsilon;

  for (int c = 0; c < m; ++c)
    model.log_prior[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(n));
  return model;
}

}  // namespace stss
