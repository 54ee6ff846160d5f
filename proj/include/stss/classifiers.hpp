#pragma once

#include "stss/dataset.hpp"
#include "stss/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace stss {

/// The five methods, in tie-break enumeration order.
enum class MethodId { Logistic = 0, NaiveBayes = 1, Mlp = 2, RandomForest = 3, Svm = 4 };

constexpr MethodId kAllMethods[] = {MethodId::Logistic, MethodId::NaiveBayes, MethodId::Mlp,
                                    MethodId::RandomForest, MethodId::Svm};

std::string method_name(MethodId m);
MethodId parse_method(const std::string& name);

struct LogisticConfig {
  double l2_strength = 1.0;
  int max_iterations = 100;
};

struct NaiveBayesConfig {
  // relative smoothing: epsilon = variance_floor * max feature variance,
  // added to every class-conditional variance
  double variance_floor = 1e-9;
};

struct MlpConfig {
  int hidden_layers = 1;      // fixed single hidden layer
  int hidden_multiplier = 3;  // K; width = K * (pre-encoding feature count)
  int max_iterations = 200;
  std::optional<int> hidden_width;  // overrides the K*N_F rule when set
  double learning_rate = 0.01;
};

struct RandomForestConfig {
  int n_trees = 100;
  std::optional<int> max_depth;  // unset = grow to purity
  bool bootstrap = true;
  // features per split follow the sqrt(#columns) rule
};

struct SvmConfig {
  enum class Kernel { Rbf, Linear };
  Kernel kernel = Kernel::Rbf;
  double penalty_c = 1.0;
  std::optional<double> rbf_gamma;  // unset = 1 / (#columns * mean feature variance)
  int max_class_count = 2;
  long max_point_count = 10000;
  double tolerance = 1e-3;
};

struct MethodConfig {
  LogisticConfig logistic;
  NaiveBayesConfig naive_bayes;
  MlpConfig mlp;
  RandomForestConfig random_forest;
  SvmConfig svm;
};

/// Read-only slice of a design matrix: the referenced rows of X plus
/// dataset-level facts the trainers need (class count, pre-encoding
/// feature count for the MLP width rule).
struct DataView {
  const Matrix* X = nullptr;
  const std::vector<int>* labels = nullptr;
  std::vector<long> rows;  // subset of row indices, in ascending order
  int n_classes = 0;
  int n_source_features = 0;

  DataView() = default;
  explicit DataView(const DesignMatrix& d);
  DataView(const DesignMatrix& d, std::vector<long> row_subset);
  DataView(const Matrix& x, const std::vector<int>& y, int classes, int source_features);

  Index n_rows() const { return static_cast<Index>(rows.size()); }
  Index n_cols() const { return X->cols(); }
  Matrix materialize_features() const;
  std::vector<int> materialize_labels() const;
};

// --- learned parameter sets (opaque outside this module) ---

struct ConstantModel {
  int class_index = 0;
};

struct LogisticModel {
  Matrix coef;  // (d+1) x m, intercept in row 0, one column per trained class
};

struct NaiveBayesModel {
  Vector log_prior;  // m
  Matrix mean;       // m x d
  Matrix variance;   // m x d, smoothed
};

struct MlpModel {
  Matrix w1;  // hidden x d
  Vector b1;
  Matrix w2;  // m x hidden
  Vector b2;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf_class = -1;  // local class index
};

struct Tree {
  std::vector<TreeNode> nodes;
};

struct ForestModel {
  std::vector<Tree> trees;
};

struct SvmModel {
  Matrix support_vectors;
  Vector dual_coef;  // alpha_i * y_i per support vector
  double bias = 0.0;
  double gamma = 0.0;  // 0 = linear kernel
};

struct Model {
  MethodId method = MethodId::Logistic;
  std::vector<int> trained_classes;  // ascending global class indices
  std::variant<ConstantModel, LogisticModel, NaiveBayesModel, MlpModel, ForestModel, SvmModel>
      params;
};

/// Trains one method on the view; deterministic for fixed inputs, config
/// and seed. A single-class training subset yields a constant model.
Model train(MethodId method, const DataView& view, const MethodConfig& config,
            std::uint64_t seed);

/// One class index per row of X; score ties break toward the lowest index.
std::vector<int> predict(const Model& model, const Matrix& X);

/// Fraction of exact matches.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Drops SVM when the dataset has more than two classes or more than
/// max_point_count points; everything else passes through.
std::vector<MethodId> applicable_methods(const Characteristics& chars,
                                         const std::vector<MethodId>& requested,
                                         const SvmConfig& svm = {});

struct BestResult {
  double accuracy = 0.0;
  MethodId winning_method = MethodId::Logistic;
};

/// Trains every method on the identical training view, evaluates each on
/// the identical test view, and returns the maximum accuracy; ties break
/// in enumeration order.
BestResult best_accuracy(const DataView& train_view, const DataView& test_view,
                         const std::vector<MethodId>& methods, const MethodConfig& config,
                         std::uint64_t seed);

// per-method trainers (implementation units; exposed for focused tests)
LogisticModel train_logistic(const Matrix& X, const std::vector<int>& y_local, int m,
                             const LogisticConfig& cfg);
NaiveBayesModel train_naive_bayes(const Matrix& X, const std::vector<int>& y_local, int m,
                                  const NaiveBayesConfig& cfg);
MlpModel train_mlp(const Matrix& X, const std::vector<int>& y_local, int m, int hidden_width,
                   const MlpConfig& cfg, std::uint64_t seed);
ForestModel train_random_forest(const Matrix& X, const std::vector<int>& y_local, int m,
                                const RandomForestConfig& cfg, std::uint64_t seed);
SvmModel train_svm(const Matrix& X, const std::vector<int>& y_local, const SvmConfig& cfg);

}  // namespace stss
