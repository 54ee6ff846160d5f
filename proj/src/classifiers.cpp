#include "stss/classifiers.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace stss {

std::string method_name(MethodId m) {
  switch (m) {
    case MethodId::Logistic: return "LOGISTIC";
    case MethodId::NaiveBayes: return "NAIVE_BAYES";
    case MethodId::Mlp: return "MLP";
    case MethodId::RandomForest: return "RANDOM_FOREST";
    case MethodId::Svm: return "SVM";
  }
  throw std::invalid_argument("method_name: unknown method");
}

MethodId parse_method(const std::string& name) {
  for (MethodId m : kAllMethods)
    if (method_name(m) == name) return m;
  throw std::invalid_argument("parse_method: unknown method '" + name + "'");
}

DataView::DataView(const DesignMatrix& d)
    : X(&d.features),
      labels(&d.labels),
      n_classes(d.n_classes()),
      n_source_features(d.n_source_features) {
  rows.resize(d.labels.size());
  std::iota(rows.begin(), rows.end(), 0L);
}

DataView::DataView(const DesignMatrix& d, std::vector<long> row_subset)
    : X(&d.features),
      labels(&d.labels),
      rows(std::move(row_subset)),
      n_classes(d.n_classes()),
      n_source_features(d.n_source_features) {}

DataView::DataView(const Matrix& x, const std::vector<int>& y, int classes, int source_features)
    : X(&x), labels(&y), n_classes(classes), n_source_features(source_features) {
  rows.resize(y.size());
  std::iota(rows.begin(), rows.end(), 0L);
}

Matrix DataView::materialize_features() const {
  Matrix out(n_rows(), X->cols());
  for (Index i = 0; i < n_rows(); ++i) out.row(i) = X->row(rows[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<int> DataView::materialize_labels() const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (long r : rows) out.push_back((*labels)[static_cast<std::size_t>(r)]);
  return out;
}

namespace {

// global class indices present in y, ascending, plus y remapped onto them
std::pair<std::vector<int>, std::vector<int>> localize_labels(const std::vector<int>& y) {
  std::set<int> present(y.begin(), y.end());
  std::vector<int> classes(present.begin(), present.end());
  std::vector<int> local;
  local.reserve(y.size());
  for (int label : y) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), label);
    local.push_back(static_cast<int>(it - classes.begin()));
  }
  return {std::move(classes), std::move(local)};
}

}  // namespace

Model train(MethodId method, const DataView& view, const MethodConfig& config,
            std::uint64_t seed) {
  if (view.rows.empty()) throw std::invalid_argument("train: empty training view");

  const Matrix X = view.materialize_features();
  if (!X.allFinite()) throw std::invalid_argument("train: non-finite feature values");
  const std::vector<int> y = view.materialize_labels();

  auto [classes, y_local] = localize_labels(y);
  Model model;
  model.method = method;
  model.trained_classes = classes;

  if (classes.size() < 2) {
    model.params = ConstantModel{classes.front()};
    return model;
  }
  const int m = static_cast<int>(classes.size());

  switch (method) {
    case MethodId::Logistic:
      model.params = train_logistic(X, y_local, m, config.logistic);
      break;
    case MethodId::NaiveBayes:
      model.params = train_naive_bayes(X, y_local, m, config.naive_bayes);
      break;
    case MethodId::Mlp: {
      const int width =
          config.mlp.hidden_width
              ? *config.mlp.hidden_width
              : std::max(1, config.mlp.hidden_multiplier * view.n_source_features);
      model.params = train_mlp(X, y_local, m, width, config.mlp, seed);
      break;
    }
    case MethodId::RandomForest:
      model.params = train_random_forest(X, y_local, m, config.random_forest, seed);
      break;
    case MethodId::Svm:
      if (m != 2) throw std::invalid_argument("train: SVM requires exactly two classes");
      model.params = train_svm(X, y_local, config.svm);
      break;
  }
  return model;
}

namespace {

struct PredictVisitor {
  const Matrix& X;
  const std::vector<int>& classes;

  std::vector<int> operator()(const ConstantModel& m) const {
    return std::vector<int>(static_cast<std::size_t>(X.rows()), m.class_index);
  }

  std::vector<int> argmax_scores(const Matrix& scores) const {
    // scores: rows x m; ties go to the lowest class index
    std::vector<int> out(static_cast<std::size_t>(scores.rows()));
    for (Index i = 0; i < scores.rows(); ++i) {
      int best = 0;
      for (Index j = 1; j < scores.cols(); ++j)
        if (scores(i, j) > scores(i, best)) best = static_cast<int>(j);
      out[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(best)];
    }
    return out;
  }

  std::vector<int> operator()(const LogisticModel& m) const {
    if (X.cols() + 1 != m.coef.rows())
      throw std::invalid_argument("predict: feature column mismatch");
    Matrix scores = X * m.coef.bottomRows(X.cols());
    scores.rowwise() += m.coef.row(0);
    return argmax_scores(scores);
  }

  std::vector<int> operator()(const NaiveBayesModel& m) const {
    if (X.cols() != m.mean.cols()) throw std::invalid_argument("predict: feature column mismatch");
    const Index n = X.rows();
    const Index k = m.mean.rows();
    Matrix scores(n, k);
    constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
    for (Index c = 0; c < k; ++c) {
      const auto mu = m.mean.row(c).array();
      const auto var = m.variance.row(c).array();
      const double const_term = m.log_prior[c] - 0.5 * (kLogTwoPi + var.log()).sum();
      for (Index i = 0; i < n; ++i) {
        const auto xi = X.row(i).array();
        scores(i, c) = const_term - 0.5 * ((xi - mu).square() / var).sum();
      }
    }
    return argmax_scores(scores);
  }

  std::vector<int> operator()(const MlpModel& m) const {
    if (X.cols() != m.w1.cols()) throw std::invalid_argument("predict: feature column mismatch");
    Matrix hidden = (X * m.w1.transpose()).rowwise() + m.b1.transpose();
    hidden = hidden.cwiseMax(0.0);
    Matrix logits = (hidden * m.w2.transpose()).rowwise() + m.b2.transpose();
    return argmax_scores(logits);
  }

  std::vector<int> operator()(const ForestModel& m) const {
    const Index n = X.rows();
    Matrix votes = Matrix::Zero(n, static_cast<Index>(classes.size()));
    for (const Tree& tree : m.trees) {
      for (Index i = 0; i < n; ++i) {
        int node = 0;
        while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
          const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
          node = X(i, nd.feature) <= nd.threshold ? nd.left : nd.right;
        }
        votes(i, tree.nodes[static_cast<std::size_t>(node)].leaf_class) += 1.0;
      }
    }
    return argmax_scores(votes);
  }

  std::vector<int> operator()(const SvmModel& m) const {
    if (X.cols() != m.support_vectors.cols())
      throw std::invalid_argument("predict: feature column mismatch");
    const Index n = X.rows();
    std::vector<int> out(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      double decision = -m.bias;
      if (m.gamma > 0.0) {
        const auto diff = m.support_vectors.rowwise() - X.row(i);
        const Vector k = (-m.gamma * diff.rowwise().squaredNorm()).array().exp();
        decision += m.dual_coef.dot(k);
      } else {
        decision += m.dual_coef.dot(m.support_vectors * X.row(i).transpose());
      }
      out[static_cast<std::size_t>(i)] = decision > 0.0 ? classes[1] : classes[0];
    }
    return out;
  }
};

}  // namespace

std::vector<int> predict(const Model& model, const Matrix& X) {
  return std::visit(PredictVisitor{X, model.trained_classes}, model.params);
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

std::vector<MethodId> applicable_methods(const Characteristics& chars,
                                         const std::vector<MethodId>& requested,
                                         const SvmConfig& svm) {
  std::set<MethodId> unique(requested.begin(), requested.end());
  std::vector<MethodId> out;
  for (MethodId m : unique) {
    if (m == MethodId::Svm &&
        (chars.n_classes > svm.max_class_count || chars.n_points > svm.max_point_count))
      continue;
    out.push_back(m);
  }
  return out;
}

BestResult best_accuracy(const DataView& train_view, const DataView& test_view,
                         const std::vector<MethodId>& methods, const MethodConfig& config,
                         std::uint64_t seed) {
  if (methods.empty()) throw std::invalid_argument("best_accuracy: no methods");

  std::vector<MethodId> ordered(methods.begin(), methods.end());
  std::sort(ordered.begin(), ordered.end());
  const std::vector<int> truth = test_view.materialize_labels();
  const Matrix test_X = test_view.materialize_features();

  BestResult best;
  best.accuracy = -1.0;
  for (MethodId m : ordered) {
    const std::uint64_t method_seed = mix_seed(seed, static_cast<std::uint64_t>(m) + 1);
    Model model = train(m, train_view, config, method_seed);
    const double acc = accuracy(predict(model, test_X), truth);
    if (acc > best.accuracy) {
      best.accuracy = acc;
      best.winning_method = m;
    }
  }
  return best;
}

}  // namespace stss
