// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Exit 77 when only the optional public-data checks could not run (ctest
// treats that as skipped).

#include "stss/analysis.hpp"
#include "stss/classifiers.hpp"
#include "stss/curves.hpp"
#include "stss/mlp.hpp"
#include "stss/pipeline.hpp"
#include "stss/sampling.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace stss;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;
int skips = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const std::string& name, bool pass, const std::string& detail = "") {
  std::cout << (pass ? "PASS" : "FAIL") << " - " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++failures;
}

void report_skip(const std::string& name, const std::string& reason) {
  std::cout << "SKIP - " << name << " (" << reason << ")" << std::endl;
  ++skips;
}

std::string source_path(const std::string& rel) { return std::string(STSS_SOURCE_DIR) + "/" + rel; }

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  const std::string command = std::string(STSS_CLI_PATH) + " " + args + " 2>/dev/null";
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  char buffer[4096];
  while (std::size_t n = fread(buffer, 1, sizeof(buffer), pipe)) result.output.append(buffer, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// ---------------------------------------------------------------- criteria

void criterion_recommendation_rule() {
  const auto start = Clock::now();
  const CommandResult result = run_cli("analyze --corpus " + source_path("corpus/paper_tables.csv"));
  const double elapsed = seconds_since(start);

  bool ok = result.exit_code == 0;
  std::string detail;
  if (ok) {
    const auto report_json = nlohmann::json::parse(result.output, nullptr, false);
    if (report_json.is_discarded()) {
      ok = false;
      detail = "unparseable analyze output";
    } else {
      std::vector<int> counts;
      std::vector<long> maxima, recommended;
      for (const auto& cell : report_json["groups"]["cells"]) {
        counts.push_back(cell["count"].get<int>());
        maxima.push_back(cell["max_stss"].get<long>());
        recommended.push_back(cell["recommended"].get<long>());
      }
      ok = counts == std::vector<int>{8, 5, 2, 5} &&
           maxima == std::vector<long>{2044, 2851, 18944, 7598} &&
           recommended == std::vector<long>{3000, 3000, 30000, 10000} && elapsed < 1.0;
      detail = "counts/maxima/recommendations vs published table, " +
               std::to_string(elapsed).substr(0, 5) + "s";
    }
  } else {
    detail = "analyze exit code " + std::to_string(result.exit_code);
  }
  report("recommendation-rule reproduction", ok, detail);
}

void criterion_stepwise() {
  const auto start = Clock::now();
  const auto corpus = load_corpus(source_path("corpus/paper_tables.csv"));
  const StepwiseModel model = stepwise_fit_corpus(corpus);
  const double elapsed = seconds_since(start);

  const SelectedTerm* n_c = nullptr;
  const SelectedTerm* n_f = nullptr;
  for (const auto& term : model.selected) {
    if (term.name == "N_C") n_c = &term;
    if (term.name == "N_F") n_f = &term;
  }
  const bool ok = model.selected.size() == 2 && n_c && n_f && n_c->coefficient > 0.0 &&
                  n_f->coefficient < 0.0 && n_c->p_value < 0.001 && n_f->p_value >= 0.01 &&
                  n_f->p_value <= 0.07 && elapsed < 1.0;
  std::ostringstream detail;
  detail << "selected {";
  for (const auto& term : model.selected) detail << term.name << " ";
  detail << "}, p(N_C)=" << (n_c ? n_c->p_value : -1) << ", p(N_F)=" << (n_f ? n_f->p_value : -1)
         << ", " << elapsed << "s";
  report("stepwise reproduction", ok, detail.str());
}

void criterion_half_order() {
  Rng rng(20260808);
  bool ok = true;
  // lattice membership = the value is 10^M or 3*10^M for integer M
  auto on_lattice = [](double v) {
    const double e = std::floor(std::log10(v) + 0.5);
    for (int m = static_cast<int>(e) - 1; m <= static_cast<int>(e) + 1; ++m) {
      if (v == std::pow(10.0, m) || v == 3.0 * std::pow(10.0, m)) return true;
    }
    return false;
  };

  double prev_x = -1.0, prev_f = 0.0;
  for (long i = 0; i < 1000000 && ok; ++i) {
    const double x = std::exp(rng.uniform(std::log(1e-9), std::log(1e6)));
    const double f = round_up_half_order(x);
    ok = f >= x && on_lattice(f) && round_up_half_order(f) == f;
    if (ok && prev_x >= 0.0) {
      // monotone: compare against the previous draw in sorted order
      if (x >= prev_x && f < prev_f) ok = false;
      if (x <= prev_x && f > prev_f) ok = false;
    }
    prev_x = x;
    prev_f = f;
  }
  ok = ok && round_up_half_order(2044) == 3000.0 && round_up_half_order(2851) == 3000.0 &&
       round_up_half_order(18944) == 30000.0 && round_up_half_order(7598) == 10000.0;
  report("half-order rounding", ok, "1e6 random draws + published mappings");
}

void criterion_stss_closed_form() {
  const auto start = Clock::now();
  Rng rng(424242);
  StssCriteria crit;
  crit.x_min = 1;
  bool ok = true;
  long checked = 0;
  for (int round = 0; round < 1000 && ok; ++round) {
    PowerLawCurve curve;
    curve.alpha = rng.uniform(0.6, 1.0);
    curve.beta = rng.uniform(0.01, 2.0);
    curve.gamma = rng.uniform(-2.0, -0.05);
    curve.bound_kind = BoundKind::Lower;
    const double x_star = std::exp(rng.uniform(0.0, std::log(1e6)));
    const double f_inf = curve.alpha + crit.t2 - curve.beta * std::pow(x_star, curve.gamma);

    const StssResult closed = compute_stss(curve, f_inf, crit);
    const double target = f_inf - crit.t2;
    long scan = -1;
    for (long x = 1; x <= 10000000L; ++x) {
      if (evaluate_curve(curve, static_cast<double>(x)) >= target) {
        scan = x;
        break;
      }
    }
    ok = scan > 0 && closed.stss == scan;
    ++checked;
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 10.0;
  report("stss closed form vs linear scan", ok,
         std::to_string(checked) + " tuples, " + std::to_string(elapsed).substr(0, 5) + "s");
}

void criterion_curve_fit() {
  bool ok = true;
  std::string detail;

  {  // exact recovery of a noiseless instance
    std::vector<std::pair<double, double>> pts;
    for (double x : {10.0, 50.0, 100.0, 500.0, 1000.0, 5000.0})
      pts.emplace_back(x, 0.9 - 0.5 * std::pow(x, -0.5));
    double y_max = 0.0;
    for (auto& [x, y] : pts) y_max = std::max(y_max, y);
    const PowerLawCurve fit = fit_power_law(pts, y_max);
    ok = std::abs(fit.alpha - 0.9) < 1e-3 && std::abs(fit.beta - 0.5) < 1e-3 &&
         std::abs(fit.gamma + 0.5) < 1e-3;
    if (!ok) detail = "noiseless recovery failed";
  }

  Rng rng(777);
  int instances = 0;
  while (ok && instances < 20) {
    const double alpha = rng.uniform(0.75, 0.99);
    const double gamma = rng.uniform(-1.8, -0.1);
    const double beta = rng.uniform(0.05, 1.5);
    std::vector<std::pair<double, double>> pts;
    double y_max = 0.0, y_min = 1.0;
    for (double x : {10.0, 50.0, 100.0, 500.0, 1000.0, 5000.0}) {
      const double y = alpha - beta * std::pow(x, gamma);
      pts.emplace_back(x, y);
      y_max = std::max(y_max, y);
      y_min = std::min(y_min, y);
    }
    if (y_min < 0.05) continue;  // keep targets inside [0, 1]
    ++instances;

    const PowerLawCurve fit = fit_power_law(pts, y_max);
    double grid_best = std::numeric_limits<double>::infinity();
    const int g = 50;
    for (int ia = 0; ia <= g; ++ia) {
      const double a = y_max + (1.0 - y_max) * ia / g;
      for (int ib = 0; ib <= g; ++ib) {
        const double b = 2.0 * ib / g;
        for (int ig = 0; ig <= g; ++ig) {
          const double c = -2.0 * ig / g;
          double sse = 0.0;
          for (auto& [x, y] : pts) {
            const double r = y - (a - b * std::pow(x, c));
            sse += r * r;
          }
          if (sse < grid_best) grid_best = sse;
        }
      }
    }
    if (fit.sse > grid_best + 1e-12) {
      ok = false;
      detail = "optimizer lost to the 50^3 oracle grid";
    }
  }
  report("curve-fit recovery", ok, detail.empty() ? "1e-3 recovery + 20 grid-oracle instances" : detail);
}

void criterion_order_statistics() {
  Rng rng(909090);
  bool ok = true;

  for (int round = 0; round < 1000 && ok; ++round) {
    const int n = std::vector<int>{10, 100, 1000}[static_cast<std::size_t>(round) % 3];
    std::vector<AccuracyRecord> records;
    std::vector<double> values;
    for (int i = 0; i < n; ++i) {
      const double v = rng.uniform();
      values.push_back(v);
      records.push_back({"A", 10, i, 0, MethodId::Logistic, v});
    }
    const auto points = empirical_curve(records, 0.8);
    std::vector<double> ascending = values;
    std::sort(ascending.begin(), ascending.end());
    const int k = static_cast<int>(std::ceil(n * 1.8 / 2.0));
    ok = points.size() == 1 && points[0].lower == ascending[n - k] &&
         points[0].upper == ascending[k - 1];
  }

  // n = 100 convention: distinct values 0.01..1.00 -> 90th and 11th highest
  if (ok) {
    std::vector<AccuracyRecord> records;
    for (int i = 1; i <= 100; ++i)
      records.push_back({"A", 10, i, 0, MethodId::Logistic, i / 100.0});
    const auto points = empirical_curve(records, 0.8);
    ok = std::abs(points[0].lower - 0.11) < 1e-12 && std::abs(points[0].upper - 0.90) < 1e-12;
  }
  report("order statistics", ok, "brute-force oracle + 90th/11th highest at n=100");
}

void criterion_size_grid() {
  const long table1[] = {798,  683,   41188, 2126, 1728, 435,   30000, 1151, 5619,   583,
                         351,  20000, 19020, 972,  8124, 20560, 11044, 1055, 245057, 5456};
  bool ok = true;
  for (long n : table1) {
    const SizeGrid grid = size_grid(n);
    if (grid.sizes.size() < 11 || grid.sizes.size() > 20 ||
        grid.sizes.back() > std::llround(0.9 * static_cast<double>(n))) {
      ok = false;
      break;
    }
  }
  report("size-grid properties", ok, "all 20 studied dataset sizes");
}

// hand posterior on the exponents (log densities summed per feature)
int nb_oracle(const Matrix& X, const std::vector<int>& y, const Vector& query, double floor_scale) {
  std::vector<int> classes(y.begin(), y.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  double max_var = 0.0;
  for (Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    max_var = std::max(max_var, (X.col(j).array() - mean).square().sum() / X.rows());
  }
  double eps = floor_scale * max_var;
  if (eps <= 0.0) eps = 1e-12;

  int best = classes.front();
  double best_log_post = -std::numeric_limits<double>::infinity();
  for (int cls : classes) {
    std::vector<Index> members;
    for (Index i = 0; i < X.rows(); ++i)
      if (y[static_cast<std::size_t>(i)] == cls) members.push_back(i);
    double log_post = std::log(static_cast<double>(members.size()) / X.rows());
    for (Index j = 0; j < X.cols(); ++j) {
      double mean = 0.0;
      for (Index i : members) mean += X(i, j);
      mean /= members.size();
      double var = 0.0;
      for (Index i : members) var += (X(i, j) - mean) * (X(i, j) - mean);
      var = var / members.size() + eps;
      log_post += -0.5 * std::log(2.0 * M_PI * var) -
                  (query[j] - mean) * (query[j] - mean) / (2.0 * var);
    }
    if (log_post > best_log_post) {
      best_log_post = log_post;
      best = cls;
    }
  }
  return best;
}

void criterion_classifier_oracles() {
  MethodConfig cfg;
  bool nb_ok = true;
  Rng rng(5656);
  for (int round = 0; round < 100 && nb_ok; ++round) {
    const int n = 3 + static_cast<int>(rng.bounded(3));
    const int d = 1 + static_cast<int>(rng.bounded(2));
    Matrix X(n, d);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-3.0, 3.0);
      y.push_back(static_cast<int>(rng.bounded(2)));
    }
    y[0] = 0;
    y[1] = 1;
    DataView view(X, y, 2, d);
    Model model = train(MethodId::NaiveBayes, view, cfg, 1);
    Matrix query(1, d);
    for (int j = 0; j < d; ++j) query(0, j) = rng.uniform(-3.0, 3.0);
    nb_ok = predict(model, query)[0] ==
            nb_oracle(X, y, query.row(0).transpose(), cfg.naive_bayes.variance_floor);
  }

  // gradient check on a 5-point, 2-feature instance
  bool grad_ok = true;
  {
    Matrix X(5, 2);
    X << 0.3, -1.2, 1.1, 0.4, -0.7, 0.9, 0.05, -0.3, 1.4, 1.2;
    std::vector<int> y = {0, 1, 2, 1, 0};
    Rng wrng(31);
    MlpModel p;
    p.w1.resize(4, 2);
    p.w2.resize(3, 4);
    p.b1.resize(4);
    p.b2.resize(3);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 2; ++j) p.w1(i, j) = wrng.normal() * 0.6;
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 4; ++j) p.w2(i, j) = wrng.normal() * 0.6;
    for (Index i = 0; i < 4; ++i) p.b1[i] = wrng.normal() * 0.2;
    for (Index i = 0; i < 3; ++i) p.b2[i] = wrng.normal() * 0.2;

    MlpModel grad;
    mlp_loss_and_gradient(p, X, y, grad);
    const Vector analytic = mlp_flatten(grad);
    Vector theta = mlp_flatten(p);
    const double h = 1e-6;
    for (Index i = 0; i < theta.size() && grad_ok; ++i) {
      Vector plus = theta, minus = theta;
      plus[i] += h;
      minus[i] -= h;
      const double numeric = (mlp_loss(mlp_unflatten(plus, 2, 4, 3), X, y) -
                              mlp_loss(mlp_unflatten(minus, 2, 4, 3), X, y)) /
                             (2.0 * h);
      const double scale = std::max({1.0, std::abs(numeric), std::abs(analytic[i])});
      grad_ok = std::abs(numeric - analytic[i]) / scale < 1e-4;
    }
  }

  // separable blobs: every method at accuracy 1.0 (200 train / 200 test)
  bool blob_ok = true;
  {
    auto make_blobs = [](Matrix& X, std::vector<int>& y, int n_per_class, std::uint64_t seed) {
      Rng brng(seed);
      X.resize(2 * n_per_class, 2);
      y.clear();
      for (int i = 0; i < 2 * n_per_class; ++i) {
        const int cls = i < n_per_class ? 0 : 1;
        X(i, 0) = (cls ? 10.0 : 0.0) + brng.normal();
        X(i, 1) = brng.normal();
        y.push_back(cls);
      }
    };
    Matrix train_X, test_X;
    std::vector<int> train_y, test_y;
    make_blobs(train_X, train_y, 100, 808);
    make_blobs(test_X, test_y, 100, 809);
    DataView train_view(train_X, train_y, 2, 2);
    for (MethodId m : kAllMethods) {
      Model model = train(m, train_view, cfg, 99);
      if (accuracy(predict(model, test_X), test_y) != 1.0) {
        blob_ok = false;
        break;
      }
    }
  }

  report("classifier oracles", nb_ok && grad_ok && blob_ok,
         std::string("nb-posterior=") + (nb_ok ? "ok" : "FAIL") + ", mlp-grad=" +
             (grad_ok ? "ok" : "FAIL") + ", blobs=" + (blob_ok ? "ok" : "FAIL"));
}

// --- desk-scale runs -------------------------------------------------------

struct DeskData {
  fs::path dir;
  std::string data_path;
  std::string schema_path;
  std::string id;
  long n = 0;
  bool real = false;
};

// Real UCI files when fetched into data/ (scripts/fetch_uci.sh), otherwise
// a synthetic stand-in of the same shape for the criteria worded around
// dataset size rather than identity.
DeskData desk_dataset(const fs::path& work) {
  DeskData desk;
  desk.dir = work;
  const fs::path bcw = source_path("data/breast-cancer-wisconsin.data");
  if (fs::exists(bcw)) {
    // original file: id column + 9 integer features + class, no header
    std::ifstream in(bcw);
    std::string line;
    std::string csv =
        "id,clump,size_unif,shape_unif,adhesion,cell_size,bare_nuclei,chromatin,nucleoli,mitoses,"
        "class\n";
    while (std::getline(in, line))
      if (!line.empty()) csv += line + "\n";
    std::ofstream out(work / "bcw.csv");
    out << csv;
    std::ofstream schema(work / "bcw_schema.json");
    schema << R"({"target":"class","columns":[
      {"name":"clump","kind":"continuous"},{"name":"size_unif","kind":"continuous"},
      {"name":"shape_unif","kind":"continuous"},{"name":"adhesion","kind":"continuous"},
      {"name":"cell_size","kind":"continuous"},{"name":"bare_nuclei","kind":"continuous"},
      {"name":"chromatin","kind":"continuous"},{"name":"nucleoli","kind":"continuous"},
      {"name":"mitoses","kind":"continuous"}],"missing":["?",""]})";
    // the id column is not part of the schema -> loader rejects extra
    // columns, so strip it
    std::ifstream rein(work / "bcw.csv");
    std::string body, row;
    std::getline(rein, row);
    body = row.substr(row.find(',') + 1) + "\n";
    while (std::getline(rein, row)) {
      if (row.empty()) continue;
      body += row.substr(row.find(',') + 1) + "\n";
    }
    std::ofstream rewrite(work / "bcw.csv", std::ios::trunc);
    rewrite << body;

    desk.data_path = (work / "bcw.csv").string();
    desk.schema_path = (work / "bcw_schema.json").string();
    desk.id = "BCW";
    desk.n = 683;
    desk.real = true;
    return desk;
  }

  // synthetic stand-in: 683 points, 9 continuous features, 2 classes with
  // the 0.35/0.65 split, noisy enough that accuracy grows with size
  Rng rng(1847);
  std::string csv = "f1,f2,f3,f4,f5,f6,f7,f8,f9,label\n";
  for (int i = 0; i < 683; ++i) {
    const int cls = i < 239 ? 1 : 0;
    for (int j = 0; j < 9; ++j) {
      const double center = cls == 1 ? 1.1 * (j % 3 == 0 ? 1.0 : 0.4) : 0.0;
      csv += std::to_string(center + rng.normal()) + ",";
    }
    csv += (cls == 1 ? "malignant" : "benign");
    csv += "\n";
  }
  std::ofstream out(work / "synth_bcw.csv");
  out << csv;
  std::ofstream schema(work / "synth_bcw_schema.json");
  schema << R"({"target":"label","columns":[
    {"name":"f1","kind":"continuous"},{"name":"f2","kind":"continuous"},
    {"name":"f3","kind":"continuous"},{"name":"f4","kind":"continuous"},
    {"name":"f5","kind":"continuous"},{"name":"f6","kind":"continuous"},
    {"name":"f7","kind":"continuous"},{"name":"f8","kind":"continuous"},
    {"name":"f9","kind":"continuous"}]})";
  desk.data_path = (work / "synth_bcw.csv").string();
  desk.schema_path = (work / "synth_bcw_schema.json").string();
  desk.id = "SBC";
  desk.n = 683;
  desk.real = false;
  return desk;
}

RunConfig desk_config(const DeskData& desk, const fs::path& out, int workers) {
  RunConfig cfg;
  cfg.datasets.push_back({desk.id, desk.data_path, desk.schema_path});
  cfg.base_seed = 20260808;
  cfg.out_dir = out.string();
  cfg.workers = workers;
  return cfg;
}

void criterion_desk_scale(const DeskData& desk, const fs::path& out_dir, double run_seconds) {
  bool ok = run_seconds <= 15.0 * 60.0;
  std::string detail = (desk.real ? std::string("real BCW") : std::string("synthetic BCW-sized")) +
                       ", " + std::to_string(run_seconds).substr(0, 6) + "s";
  try {
    const FitResult fit = fit_dataset(out_dir.string(), desk.id);
    const auto& points = fit.report["points"];
    const double first_mean = points.front()["mean"].get<double>();
    const double last_mean = points.back()["mean"].get<double>();
    ok = ok && last_mean >= first_mean;
    if (fit.report["stss"]["status"] == "ok") {
      const long stss = fit.report["stss"]["value"].get<long>();
      const long x_min = fit.report["x_min"].get<long>();
      ok = ok && stss >= x_min && stss <= desk.n;
      detail += ", stss=" + std::to_string(stss);
    } else {
      ok = false;
      detail += ", stss status: " + fit.report["stss"]["status"].get<std::string>();
    }
  } catch (const std::exception& e) {
    ok = false;
    detail += std::string(", fit failed: ") + e.what();
  }
  report("desk-scale end-to-end", ok, detail);
}

void criterion_determinism(const DeskData& desk, const fs::path& out_a, const fs::path& out_b) {
  auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  bool ok = true;
  for (const char* name : {"curve_report.json", "curve_data.csv", "meta.json"}) {
    const std::string a = read_file(out_a / desk.id / name);
    const std::string b = read_file(out_b / desk.id / name);
    if (a.empty() || a != b) {
      ok = false;
      break;
    }
  }
  report("determinism across worker counts", ok,
         desk.real ? "two complete BCW runs, workers 4 vs 1"
                   : "two complete synthetic BCW-sized runs, workers 4 vs 1");
}

long half_order_bucket_index(double v) {
  // index of the smallest lattice point >= v; lattice 10^M, 3*10^M
  const double lattice = round_up_half_order(v);
  const int m = static_cast<int>(std::floor(std::log10(lattice) + 0.25));
  const double base = std::pow(10.0, m);
  const bool is_three = std::abs(lattice / base - 3.0) < 0.5;
  return 2L * m + (is_three ? 1 : 0);
}

void criterion_table6_band(const DeskData& desk, const fs::path& work) {
  if (!desk.real) {
    report_skip("best-effort published-stss band",
                "UCI files not bundled (no network in this environment); run "
                "scripts/fetch_uci.sh and re-run");
    return;
  }

  struct Target {
    const char* id;
    long published;
  };
  bool ok = true;
  std::string detail;

  // BCW already ran (desk-scale); CVR runs here
  const fs::path cvr_raw = source_path("data/house-votes-84.data");
  if (!fs::exists(cvr_raw)) {
    report_skip("best-effort published-stss band", "house-votes-84.data missing from data/");
    return;
  }
  {
    std::ifstream in(cvr_raw);
    std::string line;
    std::string csv = "party";
    for (int i = 1; i <= 16; ++i) csv += ",v" + std::to_string(i);
    csv += "\n";
    while (std::getline(in, line))
      if (!line.empty()) csv += line + "\n";
    std::ofstream out(work / "cvr.csv");
    out << csv;
    std::string schema = R"({"target":"party","columns":[)";
    for (int i = 1; i <= 16; ++i)
      schema += std::string(i > 1 ? "," : "") + R"({"name":"v)" + std::to_string(i) +
                R"(","kind":"categorical"})";
    schema += R"(],"missing":["?",""]})";
    std::ofstream sout(work / "cvr_schema.json");
    sout << schema;
  }

  RunConfig cvr_cfg;
  cvr_cfg.datasets.push_back({"CVR", (work / "cvr.csv").string(), (work / "cvr_schema.json").string()});
  cvr_cfg.base_seed = 20260808;
  cvr_cfg.out_dir = (work / "out_cvr").string();
  cvr_cfg.workers = 4;
  run_experiment(cvr_cfg);
  const FitResult cvr_fit = fit_dataset(cvr_cfg.out_dir, "CVR");

  const FitResult bcw_fit = fit_dataset((work / "out_a").string(), "BCW");
  const Target targets[] = {{"BCW", 65}, {"CVR", 69}};
  const FitResult* fits[] = {&bcw_fit, &cvr_fit};
  for (int i = 0; i < 2; ++i) {
    if ((*fits[i]).report["stss"]["status"] != "ok") {
      ok = false;
      detail += std::string(targets[i].id) + ": unreachable band; ";
      continue;
    }
    const long got = (*fits[i]).report["stss"]["value"].get<long>();
    const long got_bucket = half_order_bucket_index(static_cast<double>(got));
    const long want_bucket = half_order_bucket_index(static_cast<double>(targets[i].published));
    detail += std::string(targets[i].id) + ": stss=" + std::to_string(got) + " vs published " +
              std::to_string(targets[i].published) + "; ";
    if (std::labs(got_bucket - want_bucket) > 1) ok = false;
  }
  report("best-effort published-stss band", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const auto suite_start = Clock::now();
  const bool table6_only = argc > 1 && std::string(argv[1]) == "--table6";

  if (table6_only) {
    // standalone mode for ctest: exit 77 = skipped (data not bundled)
    fs::path work = fs::temp_directory_path() / "stss_acceptance_t6";
    fs::remove_all(work);
    fs::create_directories(work);
    const DeskData desk = desk_dataset(work);
    if (!desk.real) {
      report_skip("best-effort published-stss band",
                  "UCI files not bundled (no network in this environment); run "
                  "scripts/fetch_uci.sh and re-run");
      return 77;
    }
    run_experiment(desk_config(desk, work / "out_a", 4));
    criterion_table6_band(desk, work);
    return failures > 0 ? 1 : 0;
  }

  fs::path work = fs::temp_directory_path() / "stss_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  criterion_recommendation_rule();
  criterion_stepwise();
  criterion_half_order();
  criterion_stss_closed_form();
  criterion_curve_fit();
  criterion_order_statistics();
  criterion_size_grid();
  criterion_classifier_oracles();

  // desk-scale runs (shared by three criteria)
  const DeskData desk = desk_dataset(work);
  const RunConfig cfg_a = desk_config(desk, work / "out_a", 4);
  const auto run_start = Clock::now();
  run_experiment(cfg_a);
  const double run_seconds = seconds_since(run_start);
  criterion_desk_scale(desk, work / "out_a", run_seconds);

  const RunConfig cfg_b = desk_config(desk, work / "out_b", 1);
  run_experiment(cfg_b);
  fit_dataset(cfg_b.out_dir, desk.id);
  criterion_determinism(desk, work / "out_a", work / "out_b");

  criterion_table6_band(desk, work);  // skips without bundled data

  std::cout << "----" << std::endl;
  std::cout << "acceptance: " << failures << " failure(s), " << skips << " skip(s), "
            << seconds_since(suite_start) << "s total" << std::endl;
  return failures > 0 ? 1 : 0;
}
