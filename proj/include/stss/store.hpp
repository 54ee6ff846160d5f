#pragma once

#include "stss/curves.hpp"

#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace stss {

/// Append-only accuracy record log, one JSON object per line. Records are
/// immutable once written; re-appending a completed (size, fold, rep) key
/// is ignored, which is what makes interrupted runs resumable.
class ResultStore {
 public:
  using Key = std::tuple<long, int, int>;  // size, fold, rep

  /// Opens (and reads back) the log at `path`, creating it when absent.
  explicit ResultStore(std::string path);

  bool contains(long size, int fold, int rep) const;

  /// Persists the record immediately (flushed line-by-line).
  /// Returns false when the key was already present.
  bool append(const AccuracyRecord& record);

  const std::vector<AccuracyRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::vector<AccuracyRecord> records_;
  std::set<Key> index_;
};

}  // namespace stss
