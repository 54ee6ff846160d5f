#pragma once

#include "stss/classifiers.hpp"
#include "stss/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stss {

/// Training-set sizes evaluated for a dataset of N rows: the union of
///   A = round(f*N) for f in {.05,.10,.15,.20,.40,.60,.80,.90}
///   B_j = 5*10^j, C_j = 10^(j+1), D_j = 2*10^(j+1) for integer j >= 1
/// keeping members <= round(0.90*N), deduplicated and sorted.
struct SizeGrid {
  std::vector<long> sizes;
  long n = 0;
};

SizeGrid size_grid(long n);

struct FoldAssignment {
  std::vector<int> fold_of;  // per-row fold index, 0..k-1
  int k = 0;

  std::vector<long> test_rows(int fold) const;
  std::vector<long> training_rows(int fold) const;
};

/// Deterministic stratified k-fold split: fold sizes differ by at most
/// one, and so do each class's per-fold counts.
FoldAssignment stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed);

struct SubsetPlan {
  std::string dataset_id;
  long size = 0;
  int fold = 0;
  int rep = 0;
  std::vector<long> rows;  // distinct, sorted, drawn from outside the fold
};

/// Simple random sample without replacement of min(size, |training_rows|)
/// indices; a pure function of task_seed.
SubsetPlan draw_subset(const std::vector<long>& training_rows, long size, std::uint64_t task_seed);

struct ExperimentTask {
  long size = 0;
  int fold = 0;
  int rep = 0;
  std::uint64_t seed = 0;
};

struct ExperimentPlan {
  std::string dataset_id;
  SizeGrid grid;
  int k = 10;
  int reps = 10;
  std::vector<MethodId> methods;  // applicable methods, enumeration order
  std::vector<ExperimentTask> tasks;
};

std::uint64_t task_seed(std::uint64_t base_seed, const std::string& dataset_id, long size,
                        int fold, int rep);

/// One task per (size, fold, rep); |tasks| = |grid| * k * reps. Methods
/// are filtered by dataset-level applicability.
ExperimentPlan plan_experiment(long n, const Characteristics& chars, int k, int reps,
                               const std::vector<MethodId>& requested,
                               const std::string& dataset_id, std::uint64_t base_seed);

}  // namespace stss
