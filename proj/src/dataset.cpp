#include "stss/dataset.hpp"

#include "stss/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace stss {

namespace {

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

struct SurvivingData {
  std::vector<std::size_t> row_ids;     // indices into raw.rows
  std::vector<std::size_t> column_ids;  // indices into schema.columns (retained)
};

// Row/column removal rules shared by preprocess() and characterize().
SurvivingData apply_removal_rules(const RawDataset& raw) {
  const auto& cols = raw.schema.columns;

  std::vector<std::size_t> with_target;
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    if (!raw.rows[r].target_missing) with_target.push_back(r);
  }

  // continuous columns missing in strictly more than 10% of rows go first,
  // so their missing cells never trigger row drops
  std::vector<std::size_t> kept_cols;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].kind == ColumnKind::Categorical) {
      kept_cols.push_back(c);
      continue;
    }
    std::size_t n_missing = 0;
    for (std::size_t r : with_target) {
      if (raw.rows[r].cells[c].missing) ++n_missing;
    }
    if (10 * n_missing <= with_target.size()) kept_cols.push_back(c);
  }

  std::vector<std::size_t> kept_rows;
  for (std::size_t r : with_target) {
    bool drop = false;
    for (std::size_t c : kept_cols) {
      if (cols[c].kind == ColumnKind::Continuous && raw.rows[r].cells[c].missing) {
        drop = true;
        break;
      }
    }
    if (!drop) kept_rows.push_back(r);
  }
  return {std::move(kept_rows), std::move(kept_cols)};
}

std::map<std::string, long> label_counts(const RawDataset& raw, const std::vector<std::size_t>& rows) {
  std::map<std::string, long> counts;
  for (std::size_t r : rows) ++counts[raw.rows[r].target];
  return counts;
}

}  // namespace

void Schema::validate() const {
  if (target_column.empty()) throw std::invalid_argument("schema: target column is required");
  std::set<std::string> seen;
  for (const auto& col : columns) {
    if (col.name == target_column)
      throw std::invalid_argument("schema: target column '" + target_column + "' listed among features");
    if (!seen.insert(col.name).second)
      throw std::invalid_argument("schema: duplicate column name '" + col.name + "'");
  }
}

Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema file: " + path);
  nlohmann::json j;
  in >> j;

  Schema schema;
  schema.target_column = j.at("target").get<std::string>();
  for (const auto& col : j.at("columns")) {
    ColumnSpec spec;
    spec.name = col.at("name").get<std::string>();
    const std::string kind = col.at("kind").get<std::string>();
    if (kind == "categorical") {
      spec.kind = ColumnKind::Categorical;
    } else if (kind == "continuous") {
      spec.kind = ColumnKind::Continuous;
    } else {
      throw std::invalid_argument("schema: unknown column kind '" + kind + "'");
    }
    schema.columns.push_back(std::move(spec));
  }
  if (j.contains("missing")) {
    schema.missing_markers = j.at("missing").get<std::vector<std::string>>();
  }
  schema.validate();
  return schema;
}

RawDataset load_dataset(const std::string& path, const Schema& schema, const std::string& id) {
  schema.validate();
  CsvTable table = read_csv(path);

  std::map<std::string, std::size_t> header_pos;
  for (std::size_t i = 0; i < table.header.size(); ++i) header_pos[table.header[i]] = i;

  auto position_of = [&](const std::string& name) {
    auto it = header_pos.find(name);
    if (it == header_pos.end())
      throw std::runtime_error(path + ": header has no column '" + name + "'");
    return it->second;
  };

  const std::size_t target_pos = position_of(schema.target_column);
  std::vector<std::size_t> feature_pos;
  for (const auto& col : schema.columns) feature_pos.push_back(position_of(col.name));
  if (table.header.size() != schema.columns.size() + 1)
    throw std::runtime_error(path + ": header does not match schema (extra or missing columns)");

  auto is_missing = [&](const std::string& cell) {
    return std::find(schema.missing_markers.begin(), schema.missing_markers.end(), cell) !=
           schema.missing_markers.end();
  };

  RawDataset raw;
  raw.schema = schema;
  raw.id = id;
  raw.rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    RawRow row;
    row.cells.resize(schema.columns.size());
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      const std::string& text = cells[feature_pos[c]];
      Cell& cell = row.cells[c];
      if (is_missing(text)) {
        cell.missing = true;
      } else if (schema.columns[c].kind == ColumnKind::Continuous) {
        if (!parse_double(text, cell.value))
          throw std::runtime_error(path + ": row " + std::to_string(r + 2) + ", column '" +
                                   schema.columns[c].name + "': non-numeric value '" + text + "'");
      } else {
        cell.text = text;
      }
    }
    const std::string& target_text = cells[target_pos];
    if (is_missing(target_text)) {
      row.target_missing = true;
    } else {
      row.target = target_text;
    }
    raw.rows.push_back(std::move(row));
  }
  return raw;
}

DesignMatrix preprocess(const RawDataset& raw) {
  const auto& cols = raw.schema.columns;
  const auto [kept_rows, kept_cols] = apply_removal_rules(raw);

  if (kept_cols.empty()) throw std::runtime_error("preprocess: all feature columns were removed");
  if (kept_rows.empty()) throw std::runtime_error("preprocess: no rows survive missing-value removal");

  auto counts = label_counts(raw, kept_rows);
  if (counts.size() < 2) throw std::runtime_error("preprocess: fewer than 2 classes remain");

  DesignMatrix out;
  for (const auto& [name, n] : counts) out.class_names.push_back(name);
  std::map<std::string, int> class_index;
  for (std::size_t i = 0; i < out.class_names.size(); ++i)
    class_index[out.class_names[i]] = static_cast<int>(i);

  out.labels.reserve(kept_rows.size());
  for (std::size_t r : kept_rows) out.labels.push_back(class_index[raw.rows[r].target]);
  out.n_source_features = static_cast<int>(kept_cols.size());

  // column layout: per retained source column, in schema order
  struct Encoded {
    std::size_t source;
    bool categorical;
    std::vector<std::string> categories;  // sorted; "" marks the missing category (placed last)
  };
  std::vector<Encoded> layout;
  Index n_encoded = 0;
  for (std::size_t c : kept_cols) {
    Encoded enc{c, cols[c].kind == ColumnKind::Categorical, {}};
    if (enc.categorical) {
      std::set<std::string> cats;
      bool any_missing = false;
      for (std::size_t r : kept_rows) {
        const Cell& cell = raw.rows[r].cells[c];
        if (cell.missing) {
          any_missing = true;
        } else {
          cats.insert(cell.text);
        }
      }
      enc.categories.assign(cats.begin(), cats.end());
      if (any_missing) enc.categories.push_back("");
      n_encoded += static_cast<Index>(enc.categories.size());
    } else {
      n_encoded += 1;
    }
    layout.push_back(std::move(enc));
  }

  const Index n = static_cast<Index>(kept_rows.size());
  out.features = Matrix::Zero(n, n_encoded);

  Index col_out = 0;
  for (const auto& enc : layout) {
    const auto& name = cols[enc.source].name;
    if (enc.categorical) {
      std::map<std::string, Index> cat_offset;
      for (std::size_t k = 0; k < enc.categories.size(); ++k) {
        cat_offset[enc.categories[k]] = col_out + static_cast<Index>(k);
        out.encoded_column_names.push_back(
            name + "=" + (enc.categories[k].empty() ? "<missing>" : enc.categories[k]));
      }
      for (Index i = 0; i < n; ++i) {
        const Cell& cell = raw.rows[kept_rows[i]].cells[enc.source];
        const std::string& key = cell.missing ? std::string() : cell.text;
        out.features(i, cat_offset.at(key)) = 1.0;
      }
      col_out += static_cast<Index>(enc.categories.size());
    } else {
      for (Index i = 0; i < n; ++i)
        out.features(i, col_out) = raw.rows[kept_rows[i]].cells[enc.source].value;
      auto col = out.features.col(col_out);
      const double mean = col.mean();
      const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n));
      if (sd > 0.0) {
        col = (col.array() - mean) / sd;
      } else {
        col.setZero();
      }
      out.encoded_column_names.push_back(name);
      col_out += 1;
    }
  }
  return out;
}

Characteristics characterize(const RawDataset& raw) {
  const auto& cols = raw.schema.columns;
  const auto [kept_rows, kept_cols] = apply_removal_rules(raw);
  auto counts = label_counts(raw, kept_rows);
  if (counts.size() < 2) throw std::runtime_error("characterize: fewer than 2 classes remain");

  Characteristics ch;
  ch.n_points = static_cast<long>(kept_rows.size());
  ch.n_features = static_cast<int>(kept_cols.size());
  for (std::size_t c : kept_cols) {
    if (cols[c].kind == ColumnKind::Categorical) {
      ++ch.n_categorical;
    } else {
      ++ch.n_continuous;
    }
  }
  ch.r_categorical =
      ch.n_features > 0 ? static_cast<double>(ch.n_categorical) / ch.n_features : 0.0;
  ch.n_classes = static_cast<int>(counts.size());
  long min_count = counts.begin()->second;
  for (const auto& [name, n] : counts) min_count = std::min(min_count, n);
  ch.c_min = static_cast<double>(min_count) / static_cast<double>(ch.n_points);
  ch.imbalance = class_imbalance(ch.n_classes, ch.c_min);
  return ch;
}

double class_imbalance(int n_classes, double c_min) {
  if (n_classes < 2) throw std::invalid_argument("class_imbalance: n_classes must be >= 2");
  const double expected = 1.0 / static_cast<double>(n_classes);
  if (!(c_min > 0.0) || c_min > expected + 1e-12)
    throw std::invalid_argument("class_imbalance: c_min must be in (0, 1/n_classes]");
  return (expected - c_min) / expected;
}

}  // namespace stss
