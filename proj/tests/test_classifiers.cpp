#include "stss/classifiers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stss/mlp.hpp"

using namespace stss;

namespace {

DataView view_of(const Matrix& X, const std::vector<int>& y, int classes) {
  return DataView(X, y, classes, static_cast<int>(X.cols()));
}

// two well-separated Gaussian blobs, labels 0/1
void make_blobs(Matrix& X, std::vector<int>& y, int n_per_class, double separation,
                std::uint64_t seed) {
  Rng rng(seed);
  X.resize(2 * n_per_class, 2);
  y.clear();
  for (int i = 0; i < 2 * n_per_class; ++i) {
    const int cls = i < n_per_class ? 0 : 1;
    const double cx = cls == 0 ? 0.0 : separation;
    X(i, 0) = cx + rng.normal();
    X(i, 1) = rng.normal();
    y.push_back(cls);
  }
}

// independent posterior computation for Gaussian naive Bayes: class
// priors from counts, per-class/per-feature normal log-densities summed
// by hand (tiny singleton-class variances overflow the linear-space
// product, so the comparison happens on the exponents, as it would on
// paper), the documented variance smoothing applied
int nb_posterior_oracle(const Matrix& train_X, const std::vector<int>& train_y,
                        const Vector& query, double variance_floor) {
  std::vector<int> classes(train_y.begin(), train_y.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  double max_var = 0.0;
  for (Index j = 0; j < train_X.cols(); ++j) {
    double mean = 0.0;
    for (Index i = 0; i < train_X.rows(); ++i) mean += train_X(i, j);
    mean /= train_X.rows();
    double var = 0.0;
    for (Index i = 0; i < train_X.rows(); ++i)
      var += (train_X(i, j) - mean) * (train_X(i, j) - mean);
    var /= train_X.rows();
    max_var = std::max(max_var, var);
  }
  double eps = variance_floor * max_var;
  if (eps <= 0.0) eps = 1e-12;

  int best_class = classes.front();
  double best_log_post = -std::numeric_limits<double>::infinity();
  for (int cls : classes) {
    std::vector<Index> members;
    for (Index i = 0; i < train_X.rows(); ++i)
      if (train_y[static_cast<std::size_t>(i)] == cls) members.push_back(i);
    double log_post =
        std::log(static_cast<double>(members.size()) / train_X.rows());
    for (Index j = 0; j < train_X.cols(); ++j) {
      double mean = 0.0;
      for (Index i : members) mean += train_X(i, j);
      mean /= members.size();
      double var = 0.0;
      for (Index i : members) var += (train_X(i, j) - mean) * (train_X(i, j) - mean);
      var = var / members.size() + eps;
      log_post += -0.5 * std::log(2.0 * M_PI * var) -
                  (query[j] - mean) * (query[j] - mean) / (2.0 * var);
    }
    if (log_post > best_log_post) {  // strict: ties keep the lowest class
      best_log_post = log_post;
      best_class = cls;
    }
  }
  return best_class;
}

}  // namespace

TEST_CASE("accuracy basics") {
  CHECK(accuracy({0, 1, 1, 0}, {0, 1, 0, 0}) == doctest::Approx(0.75));
  CHECK(accuracy({2, 2, 2}, {2, 2, 2}) == 1.0);
  CHECK(accuracy({0, 0}, {1, 1}) == 0.0);
  CHECK_THROWS(accuracy({0}, {0, 1}));
  CHECK_THROWS(accuracy({}, {}));
}

TEST_CASE("applicable_methods filters SVM by class count and size") {
  std::vector<MethodId> all(kAllMethods, kAllMethods + 5);
  Characteristics lre;
  lre.n_points = 20000;
  lre.n_classes = 26;
  auto methods = applicable_methods(lre, all);
  CHECK(methods.size() == 4);
  CHECK(std::find(methods.begin(), methods.end(), MethodId::Svm) == methods.end());

  Characteristics bcw;
  bcw.n_points = 683;
  bcw.n_classes = 2;
  CHECK(applicable_methods(bcw, all).size() == 5);

  Characteristics big_binary;
  big_binary.n_points = 10000;  // boundary: allowed at exactly 10000
  big_binary.n_classes = 2;
  CHECK(applicable_methods(big_binary, all).size() == 5);
  big_binary.n_points = 10001;
  CHECK(applicable_methods(big_binary, all).size() == 4);

  CHECK(applicable_methods(lre, {MethodId::RandomForest}) ==
        std::vector<MethodId>{MethodId::RandomForest});
}

TEST_CASE("single-class training yields a constant model for every method") {
  Matrix X(4, 2);
  X << 0, 1, 1, 0, 0.5, 0.5, 0.2, 0.8;
  std::vector<int> y = {0, 0, 0, 0};
  MethodConfig cfg;
  for (MethodId m : kAllMethods) {
    Model model = train(m, view_of(X, y, 3), cfg, 11);
    auto pred = predict(model, X);
    for (int p : pred) CHECK(p == 0);
    CHECK(model.trained_classes == std::vector<int>{0});
  }
}

TEST_CASE("gaussian NB: hand-computed 1-D example") {
  Matrix X(4, 1);
  X << -2, -1, 1, 2;
  std::vector<int> y = {0, 0, 1, 1};
  MethodConfig cfg;
  Model model = train(MethodId::NaiveBayes, view_of(X, y, 2), cfg, 1);
  Matrix query(1, 1);
  query << 0.9;
  CHECK(predict(model, query) == std::vector<int>{1});
}

TEST_CASE("gaussian NB matches posterior oracle on random small cases") {
  MethodConfig cfg;
  Rng rng(2024);
  int checked = 0;
  for (int round = 0; round < 100; ++round) {
    const int n = 3 + static_cast<int>(rng.bounded(3));  // 3..5 points
    const int d = 1 + static_cast<int>(rng.bounded(2));  // 1..2 features
    Matrix X(n, d);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-3.0, 3.0);
      y.push_back(static_cast<int>(rng.bounded(2)));
    }
    y[0] = 0;
    y[1] = 1;  // both classes present
    Model model = train(MethodId::NaiveBayes, view_of(X, y, 2), cfg, 1);
    for (int q = 0; q < 5; ++q) {
      Matrix query(1, d);
      for (int j = 0; j < d; ++j) query(0, j) = rng.uniform(-3.0, 3.0);
      const int expected =
          nb_posterior_oracle(X, y, query.row(0).transpose(), cfg.naive_bayes.variance_floor);
      CHECK(predict(model, query) == std::vector<int>{expected});
      ++checked;
    }
  }
  CHECK(checked == 500);
}

TEST_CASE("NB tie at equal posterior goes to the lowest class index") {
  // identical class-conditional distributions and equal priors
  Matrix X(4, 1);
  X << -1, 1, -1, 1;
  std::vector<int> y = {0, 0, 1, 1};
  MethodConfig cfg;
  Model model = train(MethodId::NaiveBayes, view_of(X, y, 2), cfg, 1);
  Matrix query(1, 1);
  query << 0.3;
  CHECK(predict(model, query) == std::vector<int>{0});
}

TEST_CASE("logistic learns a separable pair and a boundary around zero") {
  Matrix X(8, 1);
  X << -4, -3, -2, -1, 1, 2, 3, 4;
  std::vector<int> y = {0, 0, 0, 0, 1, 1, 1, 1};
  MethodConfig cfg;
  Model model = train(MethodId::Logistic, view_of(X, y, 2), cfg, 1);
  Matrix probe(2, 1);
  probe << -1.0, 1.0;
  CHECK(predict(model, probe) == std::vector<int>{0, 1});
}

TEST_CASE("logistic one-vs-rest on three classes") {
  Matrix X(9, 2);
  X << -5, 0, -4, 1, -5, -1, 0, 5, 1, 4, -1, 5, 5, 0, 4, -1, 5, 1;
  std::vector<int> y = {0, 0, 0, 1, 1, 1, 2, 2, 2};
  MethodConfig cfg;
  Model model = train(MethodId::Logistic, view_of(X, y, 3), cfg, 1);
  CHECK(predict(model, X) == y);
}

TEST_CASE("random forest unanimity and perfect training fit without bootstrap") {
  Matrix X(20, 3);
  std::vector<int> y;
  Rng rng(77);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform(0.0, 1.0);
    y.push_back(static_cast<int>(rng.bounded(3)));
  }
  y[0] = 0;
  y[1] = 1;
  y[2] = 2;

  MethodConfig cfg;
  cfg.random_forest.n_trees = 1;
  cfg.random_forest.bootstrap = false;
  Model model = train(MethodId::RandomForest, view_of(X, y, 3), cfg, 5);
  CHECK(accuracy(predict(model, X), y) == 1.0);

  // trees all voting the same class
  Matrix X2(6, 1);
  X2 << 0, 0.1, 0.2, 5, 5.1, 5.2;
  std::vector<int> y2 = {2, 2, 2, 0, 0, 0};
  cfg.random_forest.n_trees = 15;
  cfg.random_forest.bootstrap = true;
  Model forest = train(MethodId::RandomForest, view_of(X2, y2, 3), cfg, 5);
  Matrix probe(1, 1);
  probe << 0.05;
  CHECK(predict(forest, probe) == std::vector<int>{2});
}

TEST_CASE("mlp hidden width follows K * source feature count") {
  Matrix X(10, 3);
  std::vector<int> y;
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y.push_back(i % 2);
  }
  MethodConfig cfg;
  DataView v(X, y, 2, 9);  // pre-encoding feature count 9, K = 3
  Model model = train(MethodId::Mlp, v, cfg, 9);
  const auto& mlp = std::get<MlpModel>(model.params);
  CHECK(mlp.w1.rows() == 27);

  cfg.mlp.hidden_width = 8;
  Model overridden = train(MethodId::Mlp, v, cfg, 9);
  CHECK(std::get<MlpModel>(overridden.params).w1.rows() == 8);
}

TEST_CASE("mlp analytic gradient matches central finite differences") {
  // 5 points, 2 features, 3 classes
  Matrix X(5, 2);
  X << 0.3, -1.2, 1.1, 0.4, -0.7, 0.9, 0.05, -0.3, 1.4, 1.2;
  std::vector<int> y = {0, 1, 2, 1, 0};

  Rng rng(123);
  const Index d = 2, h = 4, m = 3;
  MlpModel p;
  p.w1.resize(h, d);
  p.w2.resize(m, h);
  p.b1.resize(h);
  p.b2.resize(m);
  for (Index i = 0; i < h; ++i)
    for (Index j = 0; j < d; ++j) p.w1(i, j) = rng.normal() * 0.7;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < h; ++j) p.w2(i, j) = rng.normal() * 0.7;
  for (Index i = 0; i < h; ++i) p.b1[i] = rng.normal() * 0.3;
  for (Index i = 0; i < m; ++i) p.b2[i] = rng.normal() * 0.3;

  MlpModel grad;
  mlp_loss_and_gradient(p, X, y, grad);
  const Vector analytic = mlp_flatten(grad);

  Vector theta = mlp_flatten(p);
  const double step = 1e-6;
  double worst = 0.0;
  for (Index i = 0; i < theta.size(); ++i) {
    Vector plus = theta, minus = theta;
    plus[i] += step;
    minus[i] -= step;
    const double f_plus = mlp_loss(mlp_unflatten(plus, d, h, m), X, y);
    const double f_minus = mlp_loss(mlp_unflatten(minus, d, h, m), X, y);
    const double numeric = (f_plus - f_minus) / (2.0 * step);
    const double scale = std::max({1.0, std::abs(numeric), std::abs(analytic[i])});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("svm separates blobs and respects the tie rule at zero decision") {
  Matrix X;
  std::vector<int> y;
  make_blobs(X, y, 40, 10.0, 9);
  MethodConfig cfg;
  Model model = train(MethodId::Svm, view_of(X, y, 2), cfg, 1);
  CHECK(accuracy(predict(model, X), y) == 1.0);
}

TEST_CASE("all five methods reach accuracy 1.0 on well-separated blobs") {
  Matrix train_X, test_X;
  std::vector<int> train_y, test_y;
  make_blobs(train_X, train_y, 100, 10.0, 41);
  make_blobs(test_X, test_y, 100, 10.0, 42);
  MethodConfig cfg;
  for (MethodId m : kAllMethods) {
    CAPTURE(method_name(m));
    Model model = train(m, view_of(train_X, train_y, 2), cfg, 17);
    CHECK(accuracy(predict(model, test_X), test_y) == 1.0);
  }
}

TEST_CASE("training is deterministic for fixed seed") {
  Matrix X;
  std::vector<int> y;
  make_blobs(X, y, 30, 3.0, 5);  // moderate separation: nontrivial models
  MethodConfig cfg;
  for (MethodId m : kAllMethods) {
    Model a = train(m, view_of(X, y, 2), cfg, 99);
    Model b = train(m, view_of(X, y, 2), cfg, 99);
    CHECK(predict(a, X) == predict(b, X));
  }
  // different seed should change mlp weights (sanity that seeding matters)
  Model m1 = train(MethodId::Mlp, view_of(X, y, 2), cfg, 1);
  Model m2 = train(MethodId::Mlp, view_of(X, y, 2), cfg, 2);
  const Matrix diff = std::get<MlpModel>(m1.params).w1 - std::get<MlpModel>(m2.params).w1;
  CHECK(diff.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("best_accuracy dominates each method and breaks ties in order") {
  Matrix X;
  std::vector<int> y;
  make_blobs(X, y, 25, 2.0, 21);
  Matrix tX;
  std::vector<int> ty;
  make_blobs(tX, ty, 25, 2.0, 22);

  MethodConfig cfg;
  std::vector<MethodId> methods(kAllMethods, kAllMethods + 5);
  DataView train_view = view_of(X, y, 2);
  DataView test_view = view_of(tX, ty, 2);
  BestResult best = best_accuracy(train_view, test_view, methods, cfg, 7);

  for (MethodId m : methods) {
    Model model = train(m, train_view, cfg, mix_seed(7, static_cast<std::uint64_t>(m) + 1));
    CHECK(best.accuracy >= accuracy(predict(model, tX), ty));
  }

  BestResult single = best_accuracy(train_view, test_view, {MethodId::NaiveBayes}, cfg, 7);
  CHECK(single.winning_method == MethodId::NaiveBayes);

  // all methods tie at 1.0 on trivially separable data -> first in order wins
  Matrix eX;
  std::vector<int> ey;
  make_blobs(eX, ey, 50, 12.0, 77);
  BestResult tie = best_accuracy(view_of(eX, ey, 2), view_of(eX, ey, 2), methods, cfg, 7);
  CHECK(tie.accuracy == 1.0);
  CHECK(tie.winning_method == MethodId::Logistic);
}

TEST_CASE("train rejects non-finite features and empty views") {
  Matrix X(2, 1);
  X << 1.0, std::numeric_limits<double>::quiet_NaN();
  std::vector<int> y = {0, 1};
  MethodConfig cfg;
  CHECK_THROWS(train(MethodId::Logistic, view_of(X, y, 2), cfg, 1));
}
