#include "bigtax/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "bigtax/errors.hpp"
#include "bigtax/random.hpp"

namespace bigtax {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_missing_text(const std::string &s) { return s.empty() || s == "?"; }

bool parse_number(const std::string &s, double &out) {
  if (s.empty()) return false;
  char *end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  out = v;
  return true;
}

// one CSV record; handles quoted fields and CRLF
std::vector<std::string> split_csv_line(const std::string &line, int lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c == '\r' && i + 1 == line.size()) {
      // trailing CR from a CRLF file
    } else {
      cur.push_back(c);
    }
  }
  if (quoted)
    fail(ErrorCode::parse, "unterminated quote on line " + std::to_string(lineno));
  fields.push_back(cur);
  return fields;
}

}  // namespace

const char *kind_name(VariableKind k) {
  switch (k) {
    case VariableKind::categorical: return "categorical";
    case VariableKind::ordinal: return "ordinal";
    case VariableKind::interval: return "interval";
    case VariableKind::count: return "count";
    case VariableKind::real: return "real";
    case VariableKind::binary: return "binary";
  }
  return "?";
}

VariableKind kind_from_name(const std::string &s) {
  if (s == "categorical") return VariableKind::categorical;
  if (s == "ordinal") return VariableKind::ordinal;
  if (s == "interval") return VariableKind::interval;
  if (s == "count") return VariableKind::count;
  if (s == "real") return VariableKind::real;
  if (s == "binary") return VariableKind::binary;
  fail(ErrorCode::parse, "unknown column kind '" + s + "'");
}

bool Dataset::numeric_col(int j) const {
  VariableKind k = schema[j].kind;
  return k == VariableKind::interval || k == VariableKind::count ||
         k == VariableKind::real || k == VariableKind::binary;
}

bool Dataset::all_numeric() const {
  for (int j = 0; j < p(); ++j)
    if (!numeric_col(j)) return false;
  return true;
}

void Dataset::require_complete(const char *who) const {
  if (X.hasNaN())
    fail(ErrorCode::missing_values,
         std::string(who) + ": dataset contains MISSING cells; impute first");
}

Dataset Dataset::subset_rows(const std::vector<int> &rows) const {
  Dataset out;
  out.name = name;
  out.schema = schema;
  out.g = g;
  out.label_names = label_names;
  out.label_column = label_column;
  out.X.resize(static_cast<int>(rows.size()), p());
  out.labels.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<int>(i)) = X.row(rows[i]);
    out.labels[i] = labels[rows[i]];
  }
  return out;
}

Dataset Dataset::subset_cols(const std::vector<int> &cols) const {
  Dataset out;
  out.name = name;
  out.g = g;
  out.label_names = label_names;
  out.label_column = label_column;
  out.labels = labels;
  out.X.resize(n(), static_cast<int>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) {
    out.schema.push_back(schema[cols[j]]);
    out.X.col(static_cast<int>(j)) = X.col(cols[j]);
  }
  return out;
}

Dataset Dataset::without_row(int skip) const {
  std::vector<int> rows;
  rows.reserve(n() - 1);
  for (int i = 0; i < n(); ++i)
    if (i != skip) rows.push_back(i);
  return subset_rows(rows);
}

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(g, 0);
  for (int y : labels) ++counts[y - 1];
  return counts;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::json TransformParams::to_json() const {
  nlohmann::json cols_j = nlohmann::json::array();
  for (const Col &c : cols)
    cols_j.push_back({{"name", c.name}, {"a", c.a}, {"b", c.b}});
  return {{"kind", kind == TransformKind::standardize ? "standardize" : "unitize"},
          {"sd_scale", sd_scale},
          {"columns", cols_j}};
}

TransformParams TransformParams::from_json(const nlohmann::json &j) {
  TransformParams p;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "standardize") p.kind = TransformKind::standardize;
  else if (kind == "unitize") p.kind = TransformKind::unitize;
  else fail(ErrorCode::parse, "unknown transform kind '" + kind + "'");
  p.sd_scale = j.value("sd_scale", false);
  for (const auto &c : j.at("columns"))
    p.cols.push_back({c.at("name").get<std::string>(), c.at("a").get<double>(),
                      c.at("b").get<double>()});
  return p;
}

Dataset load_csv(const std::string &path, const std::string &label_column,
                 const std::string &schema_path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");

  // leading '#' lines are provenance comments written by this tool
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '#') continue;
    have_header = true;
    break;
  }
  if (!have_header) fail(ErrorCode::empty_data, "'" + path + "' is empty");
  std::vector<std::string> header = split_csv_line(line, lineno);
  {
    std::set<std::string> seen;
    for (const std::string &h : header)
      if (!seen.insert(h).second)
        fail(ErrorCode::parse, "duplicate column name '" + h + "'");
  }
  int label_idx = -1;
  for (size_t j = 0; j < header.size(); ++j)
    if (header[j] == label_column) label_idx = static_cast<int>(j);
  if (label_idx < 0)
    fail(ErrorCode::invalid_argument,
         "label column '" + label_column + "' not found in '" + path + "'");

  std::vector<std::vector<std::string>> cells;  // feature cells, row-major
  std::vector<std::string> raw_labels;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    if (line[0] == '#') continue;
    std::vector<std::string> fields = split_csv_line(line, lineno);
    if (fields.size() != header.size())
      fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected " +
                                 std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
    std::vector<std::string> row;
    row.reserve(header.size() - 1);
    for (size_t j = 0; j < fields.size(); ++j) {
      if (static_cast<int>(j) == label_idx) {
        if (is_missing_text(fields[j]))
          fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": missing label");
        raw_labels.push_back(fields[j]);
      } else {
        row.push_back(fields[j]);
      }
    }
    cells.push_back(std::move(row));
  }
  if (cells.empty()) fail(ErrorCode::empty_data, "'" + path + "' has a header but no rows");

  int n = static_cast<int>(cells.size());
  int p = static_cast<int>(header.size()) - 1;
  if (p < 1) fail(ErrorCode::invalid_argument, "'" + path + "' has no feature columns");

  Dataset ds;
  {
    // file stem as the dataset's report name
    size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    ds.name = dot == std::string::npos ? base : base.substr(0, dot);
  }
  ds.label_column = label_column;
  for (size_t j = 0; j < header.size(); ++j)
    if (static_cast<int>(j) != label_idx)
      ds.schema.push_back({header[j], VariableKind::real, {}});

  // declared kinds from the sidecar, if any
  std::map<std::string, ColumnSchema> declared;
  if (!schema_path.empty()) {
    std::ifstream sin(schema_path);
    if (!sin) fail(ErrorCode::io, "cannot open schema '" + schema_path + "'");
    nlohmann::json sj;
    try {
      sin >> sj;
    } catch (const std::exception &e) {
      fail(ErrorCode::parse, "schema '" + schema_path + "': " + e.what());
    }
    for (const auto &cj : sj.at("columns")) {
      ColumnSchema cs;
      cs.name = cj.at("name").get<std::string>();
      cs.kind = kind_from_name(cj.at("kind").get<std::string>());
      if (cj.contains("levels"))
        cs.levels = cj.at("levels").get<std::vector<std::string>>();
      if (cs.kind == VariableKind::ordinal && cs.levels.empty())
        fail(ErrorCode::parse, "ordinal column '" + cs.name + "' needs levels");
      declared[cs.name] = cs;
    }
  }

  ds.X.resize(n, p);
  for (int j = 0; j < p; ++j) {
    ColumnSchema &cs = ds.schema[j];
    auto it = declared.find(cs.name);
    bool has_decl = it != declared.end();
    if (has_decl) cs = it->second;

    // observed values of the column
    std::vector<std::string> observed;
    for (int i = 0; i < n; ++i)
      if (!is_missing_text(cells[i][j])) observed.push_back(cells[i][j]);

    if (!has_decl) {
      // infer: binary before count before real; any non-number -> categorical
      bool numeric = !observed.empty();
      bool binary = numeric, counts = numeric;
      for (const std::string &s : observed) {
        double v;
        if (!parse_number(s, v)) {
          numeric = false;
          break;
        }
        if (!(v == 0.0 || v == 1.0)) binary = false;
        if (!(v >= 0.0 && std::floor(v) == v && v < 9.0e15)) counts = false;
      }
      if (!numeric && !observed.empty()) {
        cs.kind = VariableKind::categorical;
      } else if (binary && !observed.empty()) {
        cs.kind = VariableKind::binary;
      } else if (counts && !observed.empty()) {
        cs.kind = VariableKind::count;
      } else {
        cs.kind = VariableKind::real;
      }
    }

    if (cs.kind == VariableKind::categorical && cs.levels.empty()) {
      std::set<std::string> uniq(observed.begin(), observed.end());
      cs.levels.assign(uniq.begin(), uniq.end());
    }

    std::map<std::string, int> level_code;
    for (size_t l = 0; l < cs.levels.size(); ++l) level_code[cs.levels[l]] = static_cast<int>(l);

    for (int i = 0; i < n; ++i) {
      const std::string &cell = cells[i][j];
      if (is_missing_text(cell)) {
        ds.X(i, j) = kNaN;
        continue;
      }
      if (cs.kind == VariableKind::categorical || cs.kind == VariableKind::ordinal) {
        auto lc = level_code.find(cell);
        if (lc == level_code.end())
          fail(ErrorCode::parse, "column '" + cs.name + "': value '" + cell +
                                     "' is not a declared level");
        ds.X(i, j) = static_cast<double>(lc->second);
        continue;
      }
      double v;
      if (!parse_number(cell, v))
        fail(ErrorCode::parse, "column '" + cs.name + "': cell '" + cell +
                                   "' is not numeric");
      if (!std::isfinite(v))
        fail(ErrorCode::parse, "column '" + cs.name + "': non-finite value");
      if (cs.kind == VariableKind::binary && !(v == 0.0 || v == 1.0))
        fail(ErrorCode::parse, "column '" + cs.name + "': value '" + cell +
                                   "' violates binary kind");
      if (cs.kind == VariableKind::count && !(v >= 0.0 && std::floor(v) == v))
        fail(ErrorCode::parse, "column '" + cs.name + "': value '" + cell +
                                   "' violates count kind");
      ds.X(i, j) = v;
    }
  }

  // labels: sorted distinct -> 1..g (numeric order when all labels are numbers)
  std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
  if (distinct.size() < 2)
    fail(ErrorCode::invalid_argument, "need at least 2 distinct labels, found " +
                                          std::to_string(distinct.size()));
  std::vector<std::string> names(distinct.begin(), distinct.end());
  bool all_num = true;
  std::vector<double> nums(names.size());
  for (size_t i = 0; i < names.size(); ++i)
    if (!parse_number(names[i], nums[i])) { all_num = false; break; }
  if (all_num) {
    std::vector<size_t> order(names.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return nums[a] < nums[b]; });
    std::vector<std::string> sorted;
    for (size_t i : order) sorted.push_back(names[i]);
    names = sorted;
  }
  std::map<std::string, int> encode;
  for (size_t c = 0; c < names.size(); ++c) encode[names[c]] = static_cast<int>(c) + 1;
  ds.label_names = names;
  ds.g = static_cast<int>(names.size());
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) ds.labels[i] = encode[raw_labels[i]];
  return ds;
}

void write_csv(const Dataset &ds, const std::string &path,
               const std::string &comment) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  out << comment;
  for (int j = 0; j < ds.p(); ++j) out << ds.schema[j].name << ",";
  out << ds.label_column << "\n";
  for (int i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < ds.p(); ++j) {
      double v = ds.X(i, j);
      if (std::isnan(v)) {
        out << "?";
      } else if (ds.schema[j].kind == VariableKind::categorical ||
                 ds.schema[j].kind == VariableKind::ordinal) {
        out << ds.schema[j].levels[static_cast<size_t>(v)];
      } else {
        out << format_double(v);
      }
      out << ",";
    }
    out << ds.label_names[ds.labels[i] - 1] << "\n";
  }
  if (!out) fail(ErrorCode::io, "write failed for '" + path + "'");
}

MissingnessSummary missing_summary(const Dataset &ds) {
  MissingnessSummary s;
  s.column_rates.assign(ds.p(), 0.0);
  for (int i = 0; i < ds.n(); ++i) {
    bool any = false;
    for (int j = 0; j < ds.p(); ++j) {
      if (std::isnan(ds.X(i, j))) {
        s.column_rates[j] += 1.0;
        ++s.total_missing;
        any = true;
      }
    }
    if (any) ++s.rows_affected;
  }
  for (double &r : s.column_rates) r /= ds.n();
  return s;
}

Dataset impute(const Dataset &ds, ImputePolicy policy) {
  if (policy == ImputePolicy::delete_rows) {
    std::vector<int> keep;
    for (int i = 0; i < ds.n(); ++i)
      if (!ds.X.row(i).hasNaN()) keep.push_back(i);
    if (keep.empty())
      fail(ErrorCode::empty_data, "impute(delete): every row has MISSING cells");
    return ds.subset_rows(keep);
  }

  Dataset out = ds;
  for (int j = 0; j < ds.p(); ++j) {
    std::vector<double> observed;
    for (int i = 0; i < ds.n(); ++i)
      if (!std::isnan(ds.X(i, j))) observed.push_back(ds.X(i, j));
    if (static_cast<int>(observed.size()) == ds.n()) continue;
    if (observed.empty())
      fail(ErrorCode::missing_values, "impute(central): column '" +
                                          ds.schema[j].name + "' is all MISSING");
    double fill = 0.0;
    switch (ds.schema[j].kind) {
      case VariableKind::real:
      case VariableKind::interval: {
        double sum = 0.0;
        for (double v : observed) sum += v;
        fill = sum / static_cast<double>(observed.size());
        break;
      }
      case VariableKind::count:
      case VariableKind::ordinal: {
        std::sort(observed.begin(), observed.end());
        fill = observed[(observed.size() - 1) / 2];  // lower median
        break;
      }
      case VariableKind::categorical:
      case VariableKind::binary: {
        std::map<double, int> freq;
        for (double v : observed) ++freq[v];
        int best = 0;
        for (const auto &[v, c] : freq)
          if (c > best) best = c;
        for (const auto &[v, c] : freq)
          if (c == best) { fill = v; break; }  // smallest value on ties
        break;
      }
    }
    for (int i = 0; i < ds.n(); ++i)
      if (std::isnan(out.X(i, j))) out.X(i, j) = fill;
  }
  return out;
}

std::pair<Dataset, TransformParams> fit_transform(const Dataset &ds,
                                                  TransformKind kind,
                                                  bool sd_scale) {
  TransformParams params;
  params.kind = kind;
  params.sd_scale = sd_scale;
  for (int j = 0; j < ds.p(); ++j) {
    if (!ds.numeric_col(j)) continue;
    Eigen::VectorXd col = ds.X.col(j);
    if (col.hasNaN())
      fail(ErrorCode::missing_values, "fit_transform: column '" +
                                          ds.schema[j].name +
                                          "' has MISSING cells; impute first");
    TransformParams::Col pc;
    pc.name = ds.schema[j].name;
    if (kind == TransformKind::standardize) {
      double mean = col.mean();
      double ss = (col.array() - mean).square().sum();
      double scale = sd_scale && ds.n() > 1
                         ? std::sqrt(ss / static_cast<double>(ds.n() - 1))
                         : std::sqrt(ss);
      if (scale <= 0.0)
        fail(ErrorCode::constant_column, "fit_transform: column '" +
                                             ds.schema[j].name + "' is constant");
      pc.a = mean;
      pc.b = scale;
    } else {
      double lo = col.minCoeff(), hi = col.maxCoeff();
      if (hi <= lo)
        fail(ErrorCode::constant_column, "fit_transform: column '" +
                                             ds.schema[j].name + "' is constant");
      pc.a = lo;
      pc.b = hi;
    }
    params.cols.push_back(pc);
  }
  return {apply_transform(params, ds), params};
}

Dataset apply_transform(const TransformParams &params, const Dataset &ds) {
  Dataset out = ds;
  for (const TransformParams::Col &pc : params.cols) {
    int j = -1;
    for (int c = 0; c < ds.p(); ++c)
      if (ds.schema[c].name == pc.name) { j = c; break; }
    if (j < 0 || !ds.numeric_col(j))
      fail(ErrorCode::schema_mismatch,
           "apply_transform: no numeric column named '" + pc.name + "'");
    if (params.kind == TransformKind::standardize)
      out.X.col(j) = (ds.X.col(j).array() - pc.a) / pc.b;
    else
      out.X.col(j) = (ds.X.col(j).array() - pc.a) / (pc.b - pc.a);
    out.schema[j].kind = VariableKind::real;  // {0,1}/count invariants no longer hold
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset &ds, double test_fraction,
                                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    fail(ErrorCode::invalid_argument, "split: test_fraction must be in (0,1)");
  int n = ds.n();
  int m = static_cast<int>(std::llround(n * test_fraction));
  if (m < 1 || n - m < 1)
    fail(ErrorCode::invalid_argument, "split: degenerate sizes (n=" +
                                          std::to_string(n) + ", test=" +
                                          std::to_string(m) + ")");
  RandomStream rs(seed);
  std::vector<int> perm = rs.permutation(n);
  std::vector<int> test_idx(perm.begin(), perm.begin() + m);
  std::vector<int> train_idx(perm.begin() + m, perm.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return {ds.subset_rows(train_idx), ds.subset_rows(test_idx)};
}

}  // namespace bigtax
