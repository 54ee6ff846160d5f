#include "stss/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace stss {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void RunConfig::validate() const {
  if (datasets.empty()) throw ConfigError("config: no datasets given");
  for (const auto& d : datasets) {
    if (d.data_path.empty() || d.schema_path.empty())
      throw ConfigError("config: dataset '" + d.id + "' needs data and schema paths");
  }
  if (folds < 2) throw ConfigError("config: folds must be >= 2");
  if (reps < 1) throw ConfigError("config: reps must be >= 1");
  if (methods.empty()) throw ConfigError("config: empty method set");
  if (!(t1 > 0.0 && t1 < 1.0)) throw ConfigError("config: t1 must be in (0, 1)");
  if (!(t2 > 0.0 && t2 < 1.0)) throw ConfigError("config: t2 must be in (0, 1)");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("config: level must be in (0, 1)");
  if (std::abs(level - (1.0 - 2.0 * (1.0 - t1))) > 1e-9)
    throw ConfigError("config: level and t1 are inconsistent (level must equal 1 - 2(1 - t1))");
  if (workers < 1) throw ConfigError("config: workers must be >= 1");
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }

  RunConfig cfg;
  if (j.contains("datasets")) {
    for (const auto& d : j.at("datasets")) {
      DatasetSpec spec;
      spec.id = d.at("id").get<std::string>();
      spec.data_path = d.at("data").get<std::string>();
      spec.schema_path = d.at("schema").get<std::string>();
      cfg.datasets.push_back(std::move(spec));
    }
  } else if (j.contains("dataset")) {
    DatasetSpec spec;
    spec.data_path = j.at("dataset").get<std::string>();
    spec.schema_path = j.at("schema").get<std::string>();
    spec.id = j.value("id", fs::path(spec.data_path).stem().string());
    cfg.datasets.push_back(std::move(spec));
  }

  cfg.base_seed = j.value("base_seed", cfg.base_seed);
  cfg.folds = j.value("folds", cfg.folds);
  cfg.reps = j.value("reps", cfg.reps);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.t2 = j.value("t2", cfg.t2);

  const bool has_level = j.contains("level");
  const bool has_t1 = j.contains("t1");
  if (has_t1) cfg.t1 = j.at("t1").get<double>();
  if (has_level) cfg.level = j.at("level").get<double>();
  if (has_t1 && !has_level) cfg.level = 1.0 - 2.0 * (1.0 - cfg.t1);
  if (has_level && !has_t1) cfg.t1 = 1.0 - (1.0 - cfg.level) / 2.0;

  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& name : j.at("methods")) cfg.methods.push_back(parse_method(name));
  }

  if (j.contains("method_config")) {
    const auto& mc = j.at("method_config");
    auto& out = cfg.method_config;
    if (mc.contains("logistic")) {
      out.logistic.l2_strength = mc["logistic"].value("l2_strength", out.logistic.l2_strength);
      out.logistic.max_iterations =
          mc["logistic"].value("max_iterations", out.logistic.max_iterations);
    }
    if (mc.contains("naive_bayes")) {
      out.naive_bayes.variance_floor =
          mc["naive_bayes"].value("variance_floor", out.naive_bayes.variance_floor);
    }
    if (mc.contains("mlp")) {
      out.mlp.hidden_multiplier = mc["mlp"].value("hidden_multiplier", out.mlp.hidden_multiplier);
      out.mlp.max_iterations = mc["mlp"].value("max_iterations", out.mlp.max_iterations);
      out.mlp.learning_rate = mc["mlp"].value("learning_rate", out.mlp.learning_rate);
      if (mc["mlp"].contains("hidden_width"))
        out.mlp.hidden_width = mc["mlp"]["hidden_width"].get<int>();
    }
    if (mc.contains("random_forest")) {
      out.random_forest.n_trees = mc["random_forest"].value("n_trees", out.random_forest.n_trees);
      out.random_forest.bootstrap =
          mc["random_forest"].value("bootstrap", out.random_forest.bootstrap);
      if (mc["random_forest"].contains("max_depth"))
        out.random_forest.max_depth = mc["random_forest"]["max_depth"].get<int>();
    }
    if (mc.contains("svm")) {
      const auto& s = mc["svm"];
      out.svm.penalty_c = s.value("penalty_c", out.svm.penalty_c);
      out.svm.tolerance = s.value("tolerance", out.svm.tolerance);
      out.svm.max_point_count = s.value("max_point_count", out.svm.max_point_count);
      if (s.contains("kernel"))
        out.svm.kernel = s["kernel"].get<std::string>() == "linear" ? SvmConfig::Kernel::Linear
                                                                    : SvmConfig::Kernel::Rbf;
      if (s.contains("rbf_gamma")) out.svm.rbf_gamma = s["rbf_gamma"].get<double>();
    }
  }

  cfg.validate();
  return cfg;
}

nlohmann::ordered_json characteristics_json(const std::string& id, const Characteristics& ch) {
  ordered_json j;
  j["id"] = id;
  j["N_P"] = ch.n_points;
  j["N_F"] = ch.n_features;
  j["N_CAT"] = ch.n_categorical;
  j["N_CONT"] = ch.n_continuous;
  j["R_CAT"] = ch.r_categorical;
  j["N_C"] = ch.n_classes;
  j["C_MIN"] = ch.c_min;
  j["I_C"] = ch.imbalance;
  return j;
}

nlohmann::ordered_json characterize_file(const std::string& data_path,
                                         const std::string& schema_path, const std::string& id) {
  const Schema schema = load_schema(schema_path);
  const RawDataset raw = load_dataset(data_path, schema, id);
  return characteristics_json(id, characterize(raw));
}

bool RunSummary::all_complete() const {
  for (const auto& d : datasets)
    if (!d.failed.empty()) return false;
  return true;
}

namespace {

std::uint64_t fold_seed(std::uint64_t base_seed, const std::string& dataset_id) {
  return mix_seed(mix_seed(base_seed, hash64(dataset_id)), 0xF01D5EEDULL);
}

ordered_json meta_json(const DatasetSpec& spec, const RunConfig& cfg, const ExperimentPlan& plan,
                       const Characteristics& chars) {
  ordered_json meta;
  meta["id"] = spec.id;
  meta["base_seed"] = cfg.base_seed;
  meta["folds"] = plan.k;
  meta["reps"] = plan.reps;
  meta["level"] = cfg.level;
  meta["t1"] = cfg.t1;
  meta["t2"] = cfg.t2;
  meta["grid"] = plan.grid.sizes;
  std::vector<std::string> names;
  for (MethodId m : plan.methods) names.push_back(method_name(m));
  meta["methods"] = names;
  meta["characteristics"] = characteristics_json(spec.id, chars);
  return meta;
}

void check_meta_consistency(const fs::path& meta_path, const ordered_json& fresh) {
  std::ifstream in(meta_path);
  if (!in) return;
  json existing;
  try {
    in >> existing;
  } catch (const json::parse_error&) {
    throw ConfigError(meta_path.string() + ": corrupt meta file; remove the run directory to restart");
  }
  for (const auto& key : {"base_seed", "folds", "reps", "level", "t1", "t2", "grid", "methods"}) {
    if (existing.value(key, json()) != json(fresh.at(key))) {
      throw ConfigError(meta_path.string() + ": existing run used a different '" +
                        std::string(key) + "'; refusing to mix results");
    }
  }
}

DatasetRunResult run_one_dataset(const DatasetSpec& spec, const RunConfig& cfg) {
  DatasetRunResult result;
  result.id = spec.id;

  const Schema schema = load_schema(spec.schema_path);
  const RawDataset raw = load_dataset(spec.data_path, schema, spec.id);
  const DesignMatrix design = preprocess(raw);
  const Characteristics chars = characterize(raw);

  ExperimentPlan plan = plan_experiment(chars.n_points, chars, cfg.folds, cfg.reps, cfg.methods,
                                        spec.id, cfg.base_seed);

  const fs::path dir = fs::path(cfg.out_dir) / spec.id;
  fs::create_directories(dir);
  const ordered_json meta = meta_json(spec, cfg, plan, chars);
  check_meta_consistency(dir / "meta.json", meta);
  {
    std::ofstream out(dir / "meta.json");
    out << meta.dump(2) << '\n';
  }

  ResultStore store((dir / "records.jsonl").string());

  const FoldAssignment folds = stratified_kfold(design.labels, cfg.folds,
                                                fold_seed(cfg.base_seed, spec.id));
  std::vector<std::vector<long>> training_rows(static_cast<std::size_t>(cfg.folds));
  std::vector<std::vector<long>> test_rows(static_cast<std::size_t>(cfg.folds));
  for (int f = 0; f < cfg.folds; ++f) {
    training_rows[static_cast<std::size_t>(f)] = folds.training_rows(f);
    test_rows[static_cast<std::size_t>(f)] = folds.test_rows(f);
  }

  std::vector<const ExperimentTask*> pending;
  for (const auto& task : plan.tasks) {
    if (store.contains(task.size, task.fold, task.rep)) {
      ++result.skipped;
    } else {
      pending.push_back(&task);
    }
  }

  std::mutex sink;  // coordinates store appends and failure reports
  std::atomic<std::size_t> cursor{0};

  auto work = [&]() {
    for (;;) {
      const std::size_t at = cursor.fetch_add(1);
      if (at >= pending.size()) break;
      const ExperimentTask& task = *pending[at];

      AccuracyRecord record;
      bool ok = false;
      std::string error;
      for (int attempt = 0; attempt < 2 && !ok; ++attempt) {  // retry once
        try {
          const auto& train_pool = training_rows[static_cast<std::size_t>(task.fold)];
          SubsetPlan subset = draw_subset(train_pool, task.size, task.seed);
          DataView train_view(design, subset.rows);
          DataView test_view(design, test_rows[static_cast<std::size_t>(task.fold)]);
          const BestResult best =
              best_accuracy(train_view, test_view, plan.methods, cfg.method_config, task.seed);
          record = {spec.id, task.size, task.fold, task.rep, best.winning_method, best.accuracy};
          ok = true;
        } catch (const std::exception& e) {
          error = e.what();
        }
      }

      std::lock_guard<std::mutex> hold(sink);
      if (ok) {
        try {
          store.append(record);
          ++result.computed;
        } catch (const std::exception& e) {  // store write failure poisons the task
          result.failed.push_back({task.size, task.fold, task.rep, e.what()});
        }
      } else {
        result.failed.push_back({task.size, task.fold, task.rep, error});
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(pending.size())));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }

  result.completed = store.size();
  return result;
}

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

RunSummary run_experiment(const RunConfig& config) {
  config.validate();
  RunSummary summary;
  for (const auto& spec : config.datasets) summary.datasets.push_back(run_one_dataset(spec, config));
  return summary;
}

FitResult fit_dataset(const std::string& out_dir, const std::string& dataset_id) {
  const fs::path dir = fs::path(out_dir) / dataset_id;
  std::ifstream meta_in(dir / "meta.json");
  if (!meta_in) throw std::runtime_error("fit: no meta.json under " + dir.string() + " (run first)");
  json meta;
  meta_in >> meta;

  const std::vector<long> grid = meta.at("grid").get<std::vector<long>>();
  const int k = meta.at("folds").get<int>();
  const int reps = meta.at("reps").get<int>();
  const double level = meta.at("level").get<double>();
  const double t1 = meta.at("t1").get<double>();
  const double t2 = meta.at("t2").get<double>();

  ResultStore store((dir / "records.jsonl").string());

  // completeness gate: every (size, fold, rep) must be present
  std::vector<std::string> missing;
  for (long size : grid)
    for (int f = 0; f < k; ++f)
      for (int r = 0; r < reps; ++r)
        if (!store.contains(size, f, r) && missing.size() < 20)
          missing.push_back("(" + std::to_string(size) + "," + std::to_string(f) + "," +
                            std::to_string(r) + ")");
  if (!missing.empty()) {
    std::string list;
    for (const auto& key : missing) list += (list.empty() ? "" : " ") + key;
    throw std::runtime_error("fit: store incomplete for " + dataset_id + "; missing keys: " + list);
  }

  std::vector<AccuracyRecord> records = store.records();
  std::sort(records.begin(), records.end(), [](const AccuracyRecord& a, const AccuracyRecord& b) {
    return std::tie(a.size, a.fold, a.rep) < std::tie(b.size, b.fold, b.rep);
  });

  const std::vector<CurvePoint> points = empirical_curve(records, level);

  std::vector<std::pair<double, double>> lower_pts, mean_pts;
  double lower_max = 0.0, mean_max = 0.0;
  for (const auto& p : points) {
    lower_pts.emplace_back(static_cast<double>(p.size), p.lower);
    mean_pts.emplace_back(static_cast<double>(p.size), p.mean);
    lower_max = std::max(lower_max, p.lower);
    mean_max = std::max(mean_max, p.mean);
  }

  const PowerLawCurve lower_fit = fit_power_law(lower_pts, lower_max, BoundKind::Lower);
  const PowerLawCurve mean_fit = fit_power_law(mean_pts, mean_max, BoundKind::Mean);
  const double f_inf = mean_fit.alpha;

  StssCriteria criteria;
  criteria.t1 = t1;
  criteria.t2 = t2;
  criteria.x_min = grid.front();

  ordered_json report;
  report["dataset"] = dataset_id;
  report["n_records"] = records.size();
  report["level"] = level;
  report["t1"] = t1;
  report["t2"] = t2;
  report["x_min"] = criteria.x_min;

  ordered_json jpoints = ordered_json::array();
  for (const auto& p : points) {
    ordered_json jp;
    jp["size"] = p.size;
    jp["n"] = p.n_samples;
    jp["mean"] = p.mean;
    jp["lower"] = p.lower;
    jp["upper"] = p.upper;
    jpoints.push_back(std::move(jp));
  }
  report["points"] = std::move(jpoints);

  auto fit_json = [](const PowerLawCurve& c) {
    ordered_json j;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["gamma"] = c.gamma;
    j["mae"] = c.mae;
    j["sse"] = c.sse;
    j["converged"] = c.converged;
    return j;
  };
  report["lower_fit"] = fit_json(lower_fit);
  report["mean_fit"] = fit_json(mean_fit);
  report["f_inf"] = f_inf;

  ordered_json jstss;
  try {
    const StssResult stss = compute_stss(lower_fit, f_inf, criteria);
    jstss["value"] = stss.stss;
    jstss["clamped"] = stss.clamped;
    jstss["analytic"] = stss.analytic_value;
    jstss["status"] = "ok";
  } catch (const std::domain_error& e) {
    jstss["value"] = nullptr;
    jstss["clamped"] = false;
    jstss["analytic"] = nullptr;
    jstss["status"] = std::string("unreachable: ") + e.what();
  }
  report["stss"] = std::move(jstss);

  std::ostringstream csv;
  csv << "size,mean,lower,upper,fitted_lower,fitted_mean\n";
  for (const auto& p : points) {
    csv << p.size << ',' << format_double(p.mean) << ',' << format_double(p.lower) << ','
        << format_double(p.upper) << ','
        << format_double(evaluate_curve(lower_fit, static_cast<double>(p.size))) << ','
        << format_double(evaluate_curve(mean_fit, static_cast<double>(p.size))) << '\n';
  }

  FitResult out;
  out.report = std::move(report);
  out.plot_csv = csv.str();

  {
    std::ofstream f(dir / "curve_report.json");
    f << out.report.dump(2) << '\n';
  }
  {
    std::ofstream f(dir / "curve_data.csv");
    f << out.plot_csv;
  }
  return out;
}

nlohmann::ordered_json recommendation_table_json(const RecommendationTable& table) {
  ordered_json j;
  j["class_threshold"] = table.class_threshold;
  j["feature_threshold"] = table.feature_threshold;
  ordered_json cells = ordered_json::array();
  for (int i = 0; i < 4; ++i) {
    const GroupCell& cell = table.cells[i];
    ordered_json jc;
    jc["classes"] = cell.classes_low ? "<=" + std::to_string(table.class_threshold)
                                     : ">" + std::to_string(table.class_threshold);
    jc["features"] = cell.features_low ? "<=" + std::to_string(table.feature_threshold)
                                       : ">" + std::to_string(table.feature_threshold);
    jc["count"] = cell.count;
    if (cell.count > 0) {
      jc["max_stss"] = cell.max_stss;
      jc["recommended"] = static_cast<long>(std::llround(table.recommended[i]));
    } else {
      jc["max_stss"] = nullptr;
      jc["recommended"] = nullptr;
    }
    cells.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells);
  return j;
}

RecommendationTable recommendation_table_from_json(const nlohmann::json& j) {
  RecommendationTable table;
  table.class_threshold = j.at("class_threshold").get<int>();
  table.feature_threshold = j.at("feature_threshold").get<int>();
  const auto& cells = j.at("cells");
  if (cells.size() != 4) throw ConfigError("recommendation table: expected 4 cells");
  for (int i = 0; i < 4; ++i) {
    const auto& jc = cells[static_cast<std::size_t>(i)];
    GroupCell& cell = table.cells[i];
    cell.classes_low = i < 2;
    cell.features_low = (i % 2) == 0;
    cell.count = jc.at("count").get<int>();
    if (cell.count > 0) {
      cell.max_stss = jc.at("max_stss").get<long>();
      table.recommended[i] = jc.at("recommended").get<double>();
    }
  }
  return table;
}

nlohmann::ordered_json analyze_corpus(const std::string& corpus_path, double p_enter,
                                      double p_remove) {
  const std::vector<CorpusRow> corpus = load_corpus(corpus_path);
  if (corpus.size() < 5) throw std::runtime_error("analyze: corpus needs at least 5 rows");

  const StepwiseModel stepwise = stepwise_fit_corpus(corpus, p_enter, p_remove);
  const RecommendationTable table = build_groups(corpus);

  ordered_json report;
  report["corpus"] = corpus_path;
  report["n_datasets"] = corpus.size();

  ordered_json jstep;
  jstep["p_enter"] = stepwise.p_enter;
  jstep["p_remove"] = stepwise.p_remove;
  jstep["intercept"] = stepwise.intercept;
  ordered_json jsel = ordered_json::array();
  for (const auto& term : stepwise.selected) {
    ordered_json jt;
    jt["name"] = term.name;
    jt["coefficient"] = term.coefficient;
    jt["p_value"] = term.p_value;
    jsel.push_back(std::move(jt));
  }
  jstep["selected"] = std::move(jsel);
  ordered_json jcand = ordered_json::array();
  for (const auto& cand : stepwise.candidates) {
    ordered_json jt;
    jt["name"] = cand.name;
    jt["selected"] = cand.selected;
    jt["coefficient"] = cand.coefficient;
    jt["p_value"] = cand.p_value;
    jcand.push_back(std::move(jt));
  }
  jstep["candidates"] = std::move(jcand);
  report["stepwise"] = std::move(jstep);

  report["groups"] = recommendation_table_json(table);
  return report;
}

}  // namespace stss
