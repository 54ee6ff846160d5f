#pragma once

#include "stss/dataset.hpp"
#include "stss/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace stss {

struct CorpusRow {
  std::string id;
  Characteristics chars;
  long stss = 0;
};

/// Reads a corpus CSV with columns
///   id, N_P, N_F, N_CAT, N_CONT, R_CAT, N_C, C_MIN, I_C, STSS
std::vector<CorpusRow> load_corpus(const std::string& path);

/// Candidate characteristics regressed against STSS, in tie-break order.
inline const std::vector<std::string>& stepwise_candidates() {
  static const std::vector<std::string> names = {"N_CAT", "N_CONT", "N_F", "R_CAT",
                                                 "N_C",   "C_MIN",  "I_C"};
  return names;
}

struct SelectedTerm {
  std::string name;
  double coefficient = 0.0;
  double p_value = 0.0;
};

struct CandidateReport {
  std::string name;
  bool selected = false;
  double coefficient = 0.0;  // in-model for selected, if-added for the rest
  double p_value = 1.0;
};

struct StepwiseModel {
  std::vector<SelectedTerm> selected;  // in order of entry
  double intercept = 0.0;
  double p_enter = 0.05;
  double p_remove = 0.05;
  std::vector<CandidateReport> candidates;  // one per candidate column
};

/// Forward stepwise linear regression: repeatedly add the candidate whose
/// coefficient would have the smallest two-sided t-test p-value (if at
/// most p_enter), then drop any included term whose p-value exceeds
/// p_remove; stops when neither step changes the model. Rank-deficient
/// additions are skipped.
StepwiseModel stepwise_fit(const Matrix& X, const std::vector<std::string>& column_names,
                           const Vector& y, double p_enter = 0.05, double p_remove = 0.05);

/// Convenience wrapper: builds the candidate matrix from a corpus.
StepwiseModel stepwise_fit_corpus(const std::vector<CorpusRow>& corpus, double p_enter = 0.05,
                                  double p_remove = 0.05);

struct GroupCell {
  bool classes_low = true;   // N_C <= class_threshold
  bool features_low = true;  // N_F <= feature_threshold
  int count = 0;
  long max_stss = 0;  // meaningful only when count > 0
};

struct RecommendationTable {
  int class_threshold = 2;
  int feature_threshold = 20;
  // cell order: (low, low), (low, high), (high, low), (high, high)
  std::array<GroupCell, 4> cells;
  std::array<double, 4> recommended{};  // half-order rounded max STSS; 0 for empty cells

  const GroupCell& cell(bool classes_low, bool features_low) const;
  double recommended_for(bool classes_low, bool features_low) const;
};

/// Bins the corpus by N_C and N_F at the thresholds (default: corpus
/// lower medians) and records the member count and max STSS per cell.
RecommendationTable build_groups(const std::vector<CorpusRow>& corpus,
                                 std::optional<int> class_threshold = {},
                                 std::optional<int> feature_threshold = {});

/// Smallest value of the form 10^M or 3*10^M (integer M) that is >= x.
double round_up_half_order(double x);

/// The rounded recommendation table published for the studied corpus:
/// 3000 for two-class sets, 30000 above two classes with at most 20
/// features, 10000 above two classes with more than 20 features.
RecommendationTable published_recommendation_table();

/// Looks up the recommended training set size for a prospective dataset.
/// Throws std::runtime_error when the matching cell is empty.
long recommend(int n_classes, int n_features, const RecommendationTable& table);

}  // namespace stss
