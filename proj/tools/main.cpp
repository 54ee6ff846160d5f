#include "stss/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int env_workers() {
  if (const char* env = std::getenv("STSS_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 0;
}

void require_input_file(const std::string& path, const std::string& what) {
  if (!fs::exists(path)) throw stss::ConfigError(what + " not found: " + path);
}

void write_text_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_characterize(const std::string& data, const std::string& schema, std::string id,
                     const std::string& out_dir) {
  if (id.empty()) id = fs::path(data).stem().string();
  const auto report = stss::characterize_file(data, schema, id);
  std::cout << report.dump(2) << std::endl;
  if (!out_dir.empty()) {
    write_text_file(fs::path(out_dir) / (id + "_characteristics.json"), report.dump(2) + "\n");
  }
  return 0;
}

int cmd_run(const stss::RunConfig& config) {
  const stss::RunSummary summary = stss::run_experiment(config);
  for (const auto& d : summary.datasets) {
    std::cout << d.id << ": " << d.completed << " records (" << d.computed << " computed, "
              << d.skipped << " resumed)" << std::endl;
    for (const auto& f : d.failed) {
      std::cerr << d.id << ": task (size=" << f.size << ", fold=" << f.fold << ", rep=" << f.rep
                << ") failed twice: " << f.error << std::endl;
    }
  }
  return summary.all_complete() ? 0 : 1;
}

int cmd_fit(const std::string& out_dir, const std::string& id, bool all) {
  std::vector<std::string> ids;
  if (all) {
    for (const auto& entry : fs::directory_iterator(out_dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "meta.json"))
        ids.push_back(entry.path().filename().string());
    }
    std::sort(ids.begin(), ids.end());
    if (ids.empty()) throw std::runtime_error("fit: no completed runs under " + out_dir);
  } else {
    ids.push_back(id);
  }
  for (const auto& one : ids) {
    const auto result = stss::fit_dataset(out_dir, one);
    std::cout << result.report.dump(2) << std::endl;
  }
  return 0;
}

int cmd_analyze(const std::string& corpus, double p_enter, double p_remove,
                const std::string& out_dir) {
  const auto report = stss::analyze_corpus(corpus, p_enter, p_remove);
  std::cout << report.dump(2) << std::endl;
  if (!out_dir.empty()) {
    write_text_file(fs::path(out_dir) / "analysis.json", report.dump(2) + "\n");
  }
  return 0;
}

int cmd_recommend(int classes, int features, const std::string& table_path) {
  stss::RecommendationTable table;
  if (table_path.empty()) {
    table = stss::published_recommendation_table();
  } else {
    std::ifstream in(table_path);
    if (!in) throw stss::ConfigError("cannot open table file: " + table_path);
    json j;
    in >> j;
    table = stss::recommendation_table_from_json(j.contains("groups") ? j.at("groups") : j);
  }
  std::cout << stss::recommend(classes, features, table) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sufficient training set size estimation for classification datasets"};
  app.require_subcommand(1);

  std::string config_path, out_dir, data_path, schema_path, dataset_id;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;

  app.add_option("--config", config_path, "run configuration JSON")->configurable(false);
  app.add_option("--out", out_dir, "output directory");
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t v) { seed = v; seed_given = true; }, "base seed")
      ->configurable(false);
  app.add_option("--workers", workers, "worker thread count (or env STSS_WORKERS)");

  // let the global flags (--out, --seed, ...) appear after the subcommand
  app.fallthrough();

  auto* characterize = app.add_subcommand("characterize", "dataset characteristics report");
  characterize->add_option("--data", data_path, "dataset CSV")->required();
  characterize->add_option("--schema", schema_path, "schema JSON")->required();
  characterize->add_option("--id", dataset_id, "short dataset code");

  auto* run = app.add_subcommand("run", "Monte Carlo cross-validation experiment");
  run->add_option("--data", data_path, "dataset CSV (single-dataset shorthand)");
  run->add_option("--schema", schema_path, "schema JSON");
  run->add_option("--id", dataset_id, "short dataset code");
  int folds = 0, reps = 0;
  run->add_option("--folds", folds, "cross-validation folds");
  run->add_option("--reps", reps, "subsets per fold");

  auto* fit = app.add_subcommand("fit", "learning curve fit + STSS for completed runs");
  bool fit_all = false;
  fit->add_option("--id", dataset_id, "dataset code to fit");
  fit->add_flag("--all", fit_all, "fit every completed dataset in the output directory");

  auto* analyze = app.add_subcommand("analyze", "corpus-level stepwise fit and recommendations");
  std::string corpus_path;
  double p_enter = 0.05, p_remove = 0.05;
  analyze->add_option("--corpus", corpus_path, "corpus CSV")->required();
  analyze->add_option("--p-enter", p_enter, "stepwise entry p-value threshold");
  analyze->add_option("--p-remove", p_remove, "stepwise removal p-value threshold");

  auto* recommend = app.add_subcommand("recommend", "training set size for a prospective dataset");
  int classes = 0, features = 0;
  std::string table_path;
  recommend->add_option("--classes", classes, "number of target classes")->required();
  recommend->add_option("--features", features, "number of features (before encoding)")->required();
  recommend->add_option("--table", table_path, "recommendation table JSON (from analyze)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (characterize->parsed()) {
      require_input_file(data_path, "dataset file");
      require_input_file(schema_path, "schema file");
      return cmd_characterize(data_path, schema_path, dataset_id, out_dir);
    }
    if (run->parsed()) {
      stss::RunConfig config;
      if (!config_path.empty()) {
        require_input_file(config_path, "config file");
        config = stss::load_run_config(config_path);
      } else {
        if (data_path.empty() || schema_path.empty())
          throw stss::ConfigError("run: provide --config or both --data and --schema");
        stss::DatasetSpec spec;
        spec.data_path = data_path;
        spec.schema_path = schema_path;
        spec.id = dataset_id.empty() ? fs::path(data_path).stem().string() : dataset_id;
        config.datasets.push_back(spec);
      }
      for (const auto& spec : config.datasets) {
        require_input_file(spec.data_path, "dataset file");
        require_input_file(spec.schema_path, "schema file");
      }
      if (seed_given) config.base_seed = seed;
      if (!out_dir.empty()) config.out_dir = out_dir;
      if (folds > 0) config.folds = folds;
      if (reps > 0) config.reps = reps;
      // precedence: --workers flag, then STSS_WORKERS, then config file
      if (workers > 0) {
        config.workers = workers;
      } else if (const int env = env_workers(); env > 0) {
        config.workers = env;
      }
      config.validate();
      return cmd_run(config);
    }
    if (fit->parsed()) {
      if (out_dir.empty()) out_dir = "out";
      if (!fit_all && dataset_id.empty())
        throw stss::ConfigError("fit: provide --id or --all");
      return cmd_fit(out_dir, dataset_id, fit_all);
    }
    if (analyze->parsed()) {
      require_input_file(corpus_path, "corpus file");
      return cmd_analyze(corpus_path, p_enter, p_remove, out_dir);
    }
    if (recommend->parsed()) {
      return cmd_recommend(classes, features, table_path);
    }
  } catch (const stss::ConfigError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
