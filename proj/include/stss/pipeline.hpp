#pragma once

#include "stss/analysis.hpp"
#include "stss/classifiers.hpp"
#include "stss/curves.hpp"
#include "stss/sampling.hpp"
#include "stss/store.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace stss {

/// Raised for malformed configuration or usage (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  std::string id;
  std::string data_path;
  std::string schema_path;
};

struct RunConfig {
  std::vector<DatasetSpec> datasets;
  std::uint64_t base_seed = 1;
  int folds = 10;
  int reps = 10;
  std::vector<MethodId> methods{kAllMethods, kAllMethods + 5};
  double level = 0.8;  // confidence-interval level; tied to t1
  double t1 = 0.9;
  double t2 = 0.05;
  std::string out_dir = "out";
  int workers = 1;
  MethodConfig method_config;

  void validate() const;  // throws ConfigError
};

/// Parses the run-config JSON (field names mirror RunConfig). `level` and
/// `t1` may each be derived from the other; both present must satisfy
/// level = 1 - 2(1 - t1).
RunConfig load_run_config(const std::string& path);

nlohmann::ordered_json characteristics_json(const std::string& id, const Characteristics& ch);

/// cmd_characterize: load + preprocess rules + characteristics.
nlohmann::ordered_json characterize_file(const std::string& data_path,
                                         const std::string& schema_path, const std::string& id);

struct FailedTask {
  long size = 0;
  int fold = 0;
  int rep = 0;
  std::string error;
};

struct DatasetRunResult {
  std::string id;
  std::size_t completed = 0;  // records now in the store
  std::size_t computed = 0;   // newly computed by this invocation
  std::size_t skipped = 0;    // already present (resume)
  std::vector<FailedTask> failed;
};

struct RunSummary {
  std::vector<DatasetRunResult> datasets;
  bool all_complete() const;
};

/// cmd_run: executes the Monte Carlo cross-validation experiment for
/// every configured dataset, resuming from existing stores. Each task's
/// outcome depends only on (base_seed, dataset id, size, fold, rep), so
/// worker count and interruption never change the results.
RunSummary run_experiment(const RunConfig& config);

struct FitResult {
  nlohmann::ordered_json report;
  std::string plot_csv;
};

/// cmd_fit: empirical curve, lower/mean inverse power law fits, f_inf and
/// STSS for one dataset's completed store. Throws std::runtime_error
/// listing missing (size, fold, rep) keys when the store is partial.
/// Writes <out>/<id>/curve_report.json and <out>/<id>/curve_data.csv.
FitResult fit_dataset(const std::string& out_dir, const std::string& dataset_id);

/// cmd_analyze: stepwise regression, 2x2 grouping and rounded size
/// recommendations for a corpus CSV.
nlohmann::ordered_json analyze_corpus(const std::string& corpus_path, double p_enter = 0.05,
                                      double p_remove = 0.05);

nlohmann::ordered_json recommendation_table_json(const RecommendationTable& table);
RecommendationTable recommendation_table_from_json(const nlohmann::json& j);

}  // namespace stss
