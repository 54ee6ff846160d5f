#include "stss/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace stss {

SizeGrid size_grid(long n) {
  if (n < 20) throw std::invalid_argument("size_grid: dataset too small (n < 20)");

  const long cap = std::llround(0.90 * static_cast<double>(n));
  std::set<long> sizes;

  static constexpr double kFractions[] = {0.05, 0.10, 0.15, 0.20, 0.40, 0.60, 0.80, 0.90};
  for (double f : kFractions) {
    const long s = std::llround(f * static_cast<double>(n));  // half away from zero
    if (s >= 1 && s <= cap) sizes.insert(s);
  }
  for (long base = 10;; base *= 10) {   // j = 1, 2, ...
    const long b = 5 * base;            // 50, 500, ...
    const long c = 10 * base;           // 100, 1000, ...
    const long d = 20 * base;           // 200, 2000, ...
    bool any = false;
    if (b <= cap) sizes.insert(b), any = true;
    if (c <= cap) sizes.insert(c), any = true;
    if (d <= cap) sizes.insert(d), any = true;
    if (!any) break;
  }

  SizeGrid grid;
  grid.n = n;
  grid.sizes.assign(sizes.begin(), sizes.end());
  if (grid.sizes.empty()) throw std::invalid_argument("size_grid: empty grid");
  return grid;
}

std::vector<long> FoldAssignment::test_rows(int fold) const {
  std::vector<long> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(static_cast<long>(i));
  return out;
}

std::vector<long> FoldAssignment::training_rows(int fold) const {
  std::vector<long> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(static_cast<long>(i));
  return out;
}

FoldAssignment stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > labels.size())
    throw std::invalid_argument("stratified_kfold: k exceeds the number of rows");

  std::map<int, std::vector<long>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(static_cast<long>(i));

  FoldAssignment fa;
  fa.k = k;
  fa.fold_of.assign(labels.size(), -1);

  std::vector<long> fold_load(k, 0);
  std::vector<long> class_count(k, 0);

  // Per class: shuffle its rows, then assign each to the fold with the
  // fewest members of this class, breaking ties by total load then index.
  // Keeps both the per-class counts and the fold sizes within one.
  for (auto& [cls, rows] : by_class) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(cls) + 0x5851f42d4c957f2dULL));
    rng.shuffle(rows);
    std::fill(class_count.begin(), class_count.end(), 0);
    for (long row : rows) {
      int best = 0;
      for (int f = 1; f < k; ++f) {
        if (class_count[f] < class_count[best] ||
            (class_count[f] == class_count[best] && fold_load[f] < fold_load[best])) {
          best = f;
        }
      }
      fa.fold_of[row] = best;
      ++class_count[best];
      ++fold_load[best];
    }
  }
  return fa;
}

SubsetPlan draw_subset(const std::vector<long>& training_rows, long size, std::uint64_t task_seed) {
  if (training_rows.empty()) throw std::invalid_argument("draw_subset: empty training rows");
  if (size < 1) throw std::invalid_argument("draw_subset: size must be >= 1");

  const long take = std::min<long>(size, static_cast<long>(training_rows.size()));
  std::vector<long> pool = training_rows;
  Rng rng(task_seed);
  // partial Fisher-Yates: the first `take` entries are the sample
  for (long i = 0; i < take; ++i) {
    const long j = i + static_cast<long>(rng.bounded(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  SubsetPlan plan;
  plan.size = size;
  plan.rows.assign(pool.begin(), pool.begin() + take);
  std::sort(plan.rows.begin(), plan.rows.end());
  return plan;
}

std::uint64_t task_seed(std::uint64_t base_seed, const std::string& dataset_id, long size,
                        int fold, int rep) {
  std::uint64_t s = mix_seed(base_seed, hash64(dataset_id));
  s = mix_seed(s, static_cast<std::uint64_t>(size));
  s = mix_seed(s, static_cast<std::uint64_t>(fold) | (static_cast<std::uint64_t>(rep) << 32));
  return s;
}

ExperimentPlan plan_experiment(long n, const Characteristics& chars, int k, int reps,
                               const std::vector<MethodId>& requested,
                               const std::string& dataset_id, std::uint64_t base_seed) {
  ExperimentPlan plan;
  plan.dataset_id = dataset_id;
  plan.grid = size_grid(n);
  plan.k = k;
  plan.reps = reps;
  plan.methods = applicable_methods(chars, requested);
  plan.tasks.reserve(plan.grid.sizes.size() * static_cast<std::size_t>(k) * reps);
  for (long size : plan.grid.sizes) {
    for (int fold = 0; fold < k; ++fold) {
      for (int rep = 0; rep < reps; ++rep) {
        plan.tasks.push_back(
            {size, fold, rep, task_seed(base_seed, dataset_id, size, fold, rep)});
      }
    }
  }
  return plan;
}

}  // namespace stss
