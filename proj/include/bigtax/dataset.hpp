#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace bigtax {

enum class VariableKind { categorical, ordinal, interval, count, real, binary };

const char *kind_name(VariableKind k);
VariableKind kind_from_name(const std::string &s);

struct ColumnSchema {
  std::string name;
  VariableKind kind = VariableKind::real;
  // ordinal: declared level order; categorical: sorted distinct values.
  // cells of such columns are stored as 0-based level codes.
  std::vector<std::string> levels;
};

// Rectangular labeled dataset. Numeric cells (and level codes) live in X;
// MISSING is NaN. Labels are encoded 1..g; label_names[c-1] is the raw text.
struct Dataset {
  std::string name;
  std::vector<ColumnSchema> schema;
  Eigen::MatrixXd X;
  std::vector<int> labels;
  int g = 0;
  std::vector<std::string> label_names;
  std::string label_column;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }
  bool numeric_col(int j) const;
  bool all_numeric() const;
  void require_complete(const char *who) const;  // no MISSING anywhere

  Dataset subset_rows(const std::vector<int> &rows) const;
  Dataset subset_cols(const std::vector<int> &cols) const;
  Dataset without_row(int skip) const;
  std::vector<int> class_counts() const;  // size g
};

struct MissingnessSummary {
  std::vector<double> column_rates;
  long total_missing = 0;
  long rows_affected = 0;
};

enum class TransformKind { standardize, unitize };

struct TransformParams {
  TransformKind kind = TransformKind::standardize;
  bool sd_scale = false;  // standardize by sample sd instead of root sum of squares
  struct Col {
    std::string name;
    double a = 0.0;  // mean (standardize) or min (unitize)
    double b = 1.0;  // scale (standardize) or max (unitize)
  };
  std::vector<Col> cols;

  nlohmann::json to_json() const;
  static TransformParams from_json(const nlohmann::json &j);
};

enum class ImputePolicy { delete_rows, central };

Dataset load_csv(const std::string &path, const std::string &label_column,
                 const std::string &schema_path = "");
void write_csv(const Dataset &ds, const std::string &path,
               const std::string &comment = "");  // '#'-prefixed header lines
std::string format_double(double v);  // shortest round-trip text

MissingnessSummary missing_summary(const Dataset &ds);
Dataset impute(const Dataset &ds, ImputePolicy policy);
std::pair<Dataset, TransformParams> fit_transform(const Dataset &ds,
                                                  TransformKind kind,
                                                  bool sd_scale = false);
Dataset apply_transform(const TransformParams &params, const Dataset &ds);
std::pair<Dataset, Dataset> split(const Dataset &ds, double test_fraction,
                                  std::uint64_t seed);

}  // namespace bigtax
