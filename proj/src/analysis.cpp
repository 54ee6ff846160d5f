#include "stss/analysis.hpp"

#include "stss/csv.hpp"
#include "stss/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace stss {

namespace {

struct OlsFit {
  Vector coef;      // intercept first
  Vector p_values;  // aligned with coef
  double sse = 0.0;
  bool ok = false;
};

// ordinary least squares with intercept; p-values from two-sided t-tests
// with n - #columns degrees of freedom
OlsFit ols(const Matrix& X, const Vector& y) {
  const Index n = X.rows();
  const Index p = X.cols() + 1;
  OlsFit fit;
  if (n <= p) return fit;

  Matrix A(n, p);
  A.col(0).setOnes();
  A.rightCols(X.cols()) = X;

  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  if (qr.rank() < p) return fit;

  fit.coef = qr.solve(y);
  const Vector residual = y - A * fit.coef;
  fit.sse = residual.squaredNorm();
  const double df = static_cast<double>(n - p);
  // an exactly-fit model would make every further term spuriously
  // significant (t = noise / 0); floor the error variance at the
  // round-off level of the data
  const double tss = (y.array() - y.mean()).square().sum();
  const double sigma2 = std::max(fit.sse, 1e-24 * std::max(tss, 1.0)) / df;

  const Matrix gram_inv = (A.transpose() * A).inverse();
  fit.p_values.resize(p);
  for (Index j = 0; j < p; ++j) {
    const double se = std::sqrt(sigma2 * gram_inv(j, j));
    const double t = se > 0.0 ? fit.coef[j] / se : std::numeric_limits<double>::infinity();
    fit.p_values[j] = student_t_two_sided_p(t, df);
  }
  fit.ok = true;
  return fit;
}

Matrix columns_of(const Matrix& X, const std::vector<int>& which) {
  Matrix out(X.rows(), static_cast<Index>(which.size()));
  for (std::size_t j = 0; j < which.size(); ++j) out.col(static_cast<Index>(j)) = X.col(which[j]);
  return out;
}

}  // namespace

std::vector<CorpusRow> load_corpus(const std::string& path) {
  CsvTable table = read_csv(path);
  const std::vector<std::string> expected = {"id",    "N_P", "N_F",   "N_CAT", "N_CONT",
                                             "R_CAT", "N_C", "C_MIN", "I_C",   "STSS"};
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < table.header.size(); ++i) pos[table.header[i]] = i;
  for (const auto& name : expected)
    if (!pos.count(name)) throw std::runtime_error(path + ": corpus missing column " + name);

  std::vector<CorpusRow> corpus;
  for (const auto& cells : table.rows) {
    CorpusRow row;
    row.id = cells[pos["id"]];
    row.chars.n_points = std::stol(cells[pos["N_P"]]);
    row.chars.n_features = std::stoi(cells[pos["N_F"]]);
    row.chars.n_categorical = std::stoi(cells[pos["N_CAT"]]);
    row.chars.n_continuous = std::stoi(cells[pos["N_CONT"]]);
    row.chars.r_categorical = std::stod(cells[pos["R_CAT"]]);
    row.chars.n_classes = std::stoi(cells[pos["N_C"]]);
    row.chars.c_min = std::stod(cells[pos["C_MIN"]]);
    row.chars.imbalance = std::stod(cells[pos["I_C"]]);
    row.stss = std::stol(cells[pos["STSS"]]);
    corpus.push_back(std::move(row));
  }
  return corpus;
}

StepwiseModel stepwise_fit(const Matrix& X, const std::vector<std::string>& column_names,
                           const Vector& y, double p_enter, double p_remove) {
  if (X.cols() != static_cast<Index>(column_names.size()))
    throw std::invalid_argument("stepwise_fit: column name count mismatch");
  if (X.rows() != y.size()) throw std::invalid_argument("stepwise_fit: row count mismatch");

  StepwiseModel model;
  model.p_enter = p_enter;
  model.p_remove = p_remove;

  std::vector<int> in;  // selected column indices, entry order
  auto is_in = [&](int j) { return std::find(in.begin(), in.end(), j) != in.end(); };

  for (;;) {
    bool changed = false;

    // forward: candidate with the smallest p-value if it were added
    int best_j = -1;
    double best_p = std::numeric_limits<double>::infinity();
    for (int j = 0; j < X.cols(); ++j) {
      if (is_in(j)) continue;
      std::vector<int> trial = in;
      trial.push_back(j);
      OlsFit fit = ols(columns_of(X, trial), y);
      if (!fit.ok) continue;  // rank-deficient addition
      const double p = fit.p_values[static_cast<Index>(trial.size())];
      if (p < best_p) {
        best_p = p;
        best_j = j;
      }
    }
    if (best_j >= 0 && best_p <= p_enter) {
      in.push_back(best_j);
      changed = true;
    }

    // backward: drop the worst included term while it exceeds p_remove
    for (;;) {
      if (in.empty()) break;
      OlsFit fit = ols(columns_of(X, in), y);
      if (!fit.ok) break;
      int worst_pos = -1;
      double worst_p = -1.0;
      for (std::size_t s = 0; s < in.size(); ++s) {
        const double p = fit.p_values[static_cast<Index>(s + 1)];
        if (p > worst_p) {
          worst_p = p;
          worst_pos = static_cast<int>(s);
        }
      }
      if (worst_p > p_remove) {
        in.erase(in.begin() + worst_pos);
        changed = true;
      } else {
        break;
      }
    }

    if (!changed) break;
  }

  // final refit for the reported coefficients
  OlsFit final_fit = ols(columns_of(X, in), y);
  if (!in.empty() && !final_fit.ok)
    throw std::runtime_error("stepwise_fit: final model is rank-deficient");

  if (in.empty()) {
    model.intercept = y.size() > 0 ? y.mean() : 0.0;
  } else {
    model.intercept = final_fit.coef[0];
    for (std::size_t s = 0; s < in.size(); ++s) {
      model.selected.push_back({column_names[in[s]], final_fit.coef[static_cast<Index>(s + 1)],
                                final_fit.p_values[static_cast<Index>(s + 1)]});
    }
  }

  // per-candidate report: in-model stats for selected, if-added for others
  for (int j = 0; j < X.cols(); ++j) {
    CandidateReport report;
    report.name = column_names[j];
    if (is_in(j)) {
      const auto pos = std::find(in.begin(), in.end(), j) - in.begin();
      report.selected = true;
      report.coefficient = final_fit.coef[pos + 1];
      report.p_value = final_fit.p_values[pos + 1];
    } else {
      std::vector<int> trial = in;
      trial.push_back(j);
      OlsFit fit = ols(columns_of(X, trial), y);
      if (fit.ok) {
        report.coefficient = fit.coef[static_cast<Index>(trial.size())];
        report.p_value = fit.p_values[static_cast<Index>(trial.size())];
      }
    }
    model.candidates.push_back(std::move(report));
  }
  return model;
}

StepwiseModel stepwise_fit_corpus(const std::vector<CorpusRow>& corpus, double p_enter,
                                  double p_remove) {
  const auto& names = stepwise_candidates();
  Matrix X(static_cast<Index>(corpus.size()), static_cast<Index>(names.size()));
  Vector y(static_cast<Index>(corpus.size()));
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& ch = corpus[i].chars;
    const Index r = static_cast<Index>(i);
    X(r, 0) = ch.n_categorical;
    X(r, 1) = ch.n_continuous;
    X(r, 2) = ch.n_features;
    X(r, 3) = ch.r_categorical;
    X(r, 4) = ch.n_classes;
    X(r, 5) = ch.c_min;
    X(r, 6) = ch.imbalance;
    y[r] = static_cast<double>(corpus[i].stss);
  }
  return stepwise_fit(X, names, y, p_enter, p_remove);
}

const GroupCell& RecommendationTable::cell(bool classes_low, bool features_low) const {
  const int idx = (classes_low ? 0 : 2) + (features_low ? 0 : 1);
  return cells[idx];
}

double RecommendationTable::recommended_for(bool classes_low, bool features_low) const {
  const int idx = (classes_low ? 0 : 2) + (features_low ? 0 : 1);
  return recommended[idx];
}

namespace {

int lower_median_int(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

}  // namespace

RecommendationTable build_groups(const std::vector<CorpusRow>& corpus,
                                 std::optional<int> class_threshold,
                                 std::optional<int> feature_threshold) {
  if (corpus.empty()) throw std::invalid_argument("build_groups: empty corpus");

  RecommendationTable table;
  if (class_threshold) {
    table.class_threshold = *class_threshold;
  } else {
    std::vector<int> v;
    for (const auto& row : corpus) v.push_back(row.chars.n_classes);
    table.class_threshold = lower_median_int(std::move(v));
  }
  if (feature_threshold) {
    table.feature_threshold = *feature_threshold;
  } else {
    std::vector<int> v;
    for (const auto& row : corpus) v.push_back(row.chars.n_features);
    table.feature_threshold = lower_median_int(std::move(v));
  }

  for (int i = 0; i < 4; ++i) {
    table.cells[i].classes_low = i < 2;
    table.cells[i].features_low = (i % 2) == 0;
  }
  for (const auto& row : corpus) {
    const bool cl = row.chars.n_classes <= table.class_threshold;
    const bool fl = row.chars.n_features <= table.feature_threshold;
    const int idx = (cl ? 0 : 2) + (fl ? 0 : 1);
    GroupCell& cell = table.cells[idx];
    cell.max_stss = cell.count == 0 ? row.stss : std::max(cell.max_stss, row.stss);
    ++cell.count;
  }
  for (int i = 0; i < 4; ++i) {
    table.recommended[i] =
        table.cells[i].count > 0 ? round_up_half_order(static_cast<double>(table.cells[i].max_stss))
                                 : 0.0;
  }
  return table;
}

double round_up_half_order(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("round_up_half_order: x must be positive");

  // first lattice value {10^M, 3*10^M} at or above x; start one decade
  // low to shrug off log10 rounding at exact powers
  int m = static_cast<int>(std::floor(std::log10(x))) - 1;
  for (;; ++m) {
    const double base = std::pow(10.0, m);
    if (base >= x) return base;
    if (3.0 * base >= x) return 3.0 * base;
  }
}

RecommendationTable published_recommendation_table() {
  RecommendationTable table;
  table.class_threshold = 2;
  table.feature_threshold = 20;
  table.cells[0] = {true, true, 8, 2044};
  table.cells[1] = {true, false, 5, 2851};
  table.cells[2] = {false, true, 2, 18944};
  table.cells[3] = {false, false, 5, 7598};
  for (int i = 0; i < 4; ++i)
    table.recommended[i] = round_up_half_order(static_cast<double>(table.cells[i].max_stss));
  return table;
}

long recommend(int n_classes, int n_features, const RecommendationTable& table) {
  if (n_classes < 2) throw std::invalid_argument("recommend: n_classes must be >= 2");
  if (n_features < 1) throw std::invalid_argument("recommend: n_features must be >= 1");
  const bool cl = n_classes <= table.class_threshold;
  const bool fl = n_features <= table.feature_threshold;
  if (table.cell(cl, fl).count == 0)
    throw std::runtime_error("recommend: no data in the matching corpus group");
  return static_cast<long>(std::llround(table.recommended_for(cl, fl)));
}

}  // namespace stss
