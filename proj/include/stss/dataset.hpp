#pragma once

#include "stss/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stss {

enum class ColumnKind { Categorical, Continuous };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
};

/// Declared layout of a raw tabular file: feature columns, the target
/// column, and the cell strings treated as missing.
struct Schema {
  std::string target_column;
  std::vector<ColumnSpec> columns;
  std::vector<std::string> missing_markers = {"?", ""};

  void validate() const;  // throws std::invalid_argument on broken invariants
};

/// Parses the schema JSON file:
///   {"target": name, "columns": [{"name":..., "kind":"categorical"|"continuous"}],
///    "missing": [strings]}
Schema load_schema(const std::string& path);

struct Cell {
  bool missing = false;
  std::string text;    // categorical value
  double value = 0.0;  // continuous value
};

struct RawRow {
  std::vector<Cell> cells;  // one per schema column, schema order
  std::string target;
  bool target_missing = false;
};

struct RawDataset {
  Schema schema;
  std::string id;
  std::vector<RawRow> rows;
};

/// Fully numeric, model-ready form: one-hot encoded categoricals,
/// standardized continuous columns, integer class labels.
struct DesignMatrix {
  Matrix features;
  std::vector<int> labels;                        // class index per row, 0..n_classes-1
  std::vector<std::string> class_names;           // index -> original target label
  std::vector<std::string> encoded_column_names;  // provenance of each encoded column
  int n_source_features = 0;                      // retained feature count before encoding

  int n_classes() const { return static_cast<int>(class_names.size()); }
  Index n_rows() const { return features.rows(); }
  Index n_cols() const { return features.cols(); }
};

/// Measurable per-dataset descriptors. Counts reflect the rows surviving
/// the missing-value removal rules and the retained (pre-encoding) features.
struct Characteristics {
  long n_points = 0;      // N_P
  int n_features = 0;     // N_F, before categorical encoding
  int n_categorical = 0;  // N_CAT
  int n_continuous = 0;   // N_CONT
  double r_categorical = 0.0;  // R_CAT = N_CAT / N_F
  int n_classes = 0;           // N_C
  double c_min = 0.0;          // minimum single-class proportion
  double imbalance = 0.0;      // I_C = (1/N_C - C_MIN) / (1/N_C)
};

/// Loads a CSV with a header row matching the schema column names (any
/// order; the target column must be present). Cells equal to a missing
/// marker become missing; continuous cells are parsed as numbers.
RawDataset load_dataset(const std::string& path, const Schema& schema, const std::string& id = "");

/// Applies the preprocessing rules, in order: drop rows with a missing
/// target; drop continuous columns missing in more than 10% of rows
/// (strictly more); drop rows with a missing value in any retained
/// continuous column; map categorical missing to an extra category;
/// one-hot encode categoricals (category order sorted, missing last);
/// standardize continuous columns to mean 0 / population std 1
/// (constant columns become all zeros).
DesignMatrix preprocess(const RawDataset& raw);

/// Computes the eight characteristics; the row/column removal rules are
/// applied first so N_P and N_F describe the data the models actually see.
Characteristics characterize(const RawDataset& raw);

/// (L_E - L) / L_E with L_E = 1/n_classes and L = c_min.
double class_imbalance(int n_classes, double c_min);

}  // namespace stss
