#include <cstring>
#include <string>

#include "bigtax.h"
#include "bigtax/dataset.hpp"
#include "bigtax/ensemble.hpp"
#include "bigtax/errors.hpp"
#include "bigtax/eval.hpp"
#include "bigtax/learners.hpp"
#include "bigtax/report.hpp"
#include "bigtax/taxonomy.hpp"

using namespace bigtax;

struct bigtax_dataset {
  Dataset ds;
};
struct bigtax_model {
  std::unique_ptr<Model> model;
};
struct bigtax_report {
  EvalReport report;
};

namespace {

thread_local std::string g_last_error;

bigtax_status map_code(ErrorCode c) {
  return static_cast<bigtax_status>(static_cast<int>(c));
}

template <typename F>
bigtax_status guarded(F &&f) {
  try {
    f();
    return BIGTAX_OK;
  } catch (const Error &e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception &e) {
    g_last_error = e.what();
    return BIGTAX_E_INTERNAL;
  }
}

char *dup_string(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char *msg) {
  if (!ok) fail(ErrorCode::invalid_argument, msg);
}

RunStamp parse_stamp(const char *lines) {
  RunStamp stamp;
  if (!lines) return stamp;
  std::string text = lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::parse, "stamp line without '=': " + line);
    stamp.add(line.substr(0, eq), line.substr(eq + 1));
  }
  return stamp;
}

}  // namespace

extern "C" {

const char *bigtax_version(void) { return "1.0.0"; }

const char *bigtax_last_error(void) { return g_last_error.c_str(); }

void bigtax_string_free(char *s) { std::free(s); }

bigtax_status bigtax_dataset_load_csv(const char *path, const char *label_column,
                                      const char *schema_path_or_null,
                                      bigtax_dataset **out) {
  return guarded([&] {
    require(path && label_column && out, "null argument");
    auto *h = new bigtax_dataset{
        load_csv(path, label_column, schema_path_or_null ? schema_path_or_null : "")};
    *out = h;
  });
}

void bigtax_dataset_free(bigtax_dataset *ds) { delete ds; }

bigtax_status bigtax_dataset_set_name(bigtax_dataset *ds, const char *name) {
  return guarded([&] {
    require(ds && name, "null argument");
    ds->ds.name = name;
  });
}

int bigtax_dataset_n(const bigtax_dataset *ds) { return ds ? ds->ds.n() : -1; }
int bigtax_dataset_p(const bigtax_dataset *ds) { return ds ? ds->ds.p() : -1; }
int bigtax_dataset_classes(const bigtax_dataset *ds) { return ds ? ds->ds.g : -1; }

bigtax_status bigtax_dataset_missing_json(const bigtax_dataset *ds, char **json_out) {
  return guarded([&] {
    require(ds && json_out, "null argument");
    MissingnessSummary ms = missing_summary(ds->ds);
    nlohmann::json cols = nlohmann::json::array();
    for (std::size_t j = 0; j < ms.column_rates.size(); ++j)
      cols.push_back({{"column", ds->ds.schema[j].name}, {"rate", ms.column_rates[j]}});
    nlohmann::json j{{"total_missing", ms.total_missing},
                     {"rows_affected", ms.rows_affected},
                     {"columns", cols}};
    *json_out = dup_string(j.dump(2));
  });
}

bigtax_status bigtax_dataset_impute(const bigtax_dataset *ds, const char *policy,
                                    bigtax_dataset **out) {
  return guarded([&] {
    require(ds && policy && out, "null argument");
    std::string p = policy;
    ImputePolicy ip;
    if (p == "delete")
      ip = ImputePolicy::delete_rows;
    else if (p == "central")
      ip = ImputePolicy::central;
    else
      fail(ErrorCode::invalid_argument, "unknown impute policy '" + p + "'");
    *out = new bigtax_dataset{impute(ds->ds, ip)};
  });
}

bigtax_status bigtax_dataset_transform(const bigtax_dataset *ds, const char *kind,
                                       int sd_scale, bigtax_dataset **out,
                                       char **params_json_out) {
  return guarded([&] {
    require(ds && kind && out, "null argument");
    std::string k = kind;
    TransformKind tk;
    if (k == "standardize")
      tk = TransformKind::standardize;
    else if (k == "unitize")
      tk = TransformKind::unitize;
    else
      fail(ErrorCode::invalid_argument, "unknown transform '" + k + "'");
    auto [t, params] = fit_transform(ds->ds, tk, sd_scale != 0);
    *out = new bigtax_dataset{std::move(t)};
    if (params_json_out) *params_json_out = dup_string(params.to_json().dump(2));
  });
}

bigtax_status bigtax_dataset_apply_transform(const bigtax_dataset *ds,
                                             const char *params_json,
                                             bigtax_dataset **out) {
  return guarded([&] {
    require(ds && params_json && out, "null argument");
    TransformParams params;
    try {
      params = TransformParams::from_json(nlohmann::json::parse(params_json));
    } catch (const nlohmann::json::exception &e) {
      fail(ErrorCode::parse, std::string("transform params: ") + e.what());
    }
    *out = new bigtax_dataset{apply_transform(params, ds->ds)};
  });
}

bigtax_status bigtax_dataset_write_csv(const bigtax_dataset *ds, const char *path,
                                       const char *stamp_lines_or_null) {
  return guarded([&] {
    require(ds && path, "null argument");
    write_csv(ds->ds, path, parse_stamp(stamp_lines_or_null).comment_block());
  });
}

bigtax_status bigtax_taxonomy_json(long n, long p, int heterogeneous, int missing,
                                   char **json_out) {
  return guarded([&] {
    require(json_out != nullptr, "null argument");
    TaxonomyReport rep = classify_dims(n, p);
    Recommendation rec = recommend(rep, heterogeneous != 0, missing != 0);
    nlohmann::json j = rep.to_json();
    j["recommendations"] = rec.to_json();
    *json_out = dup_string(j.dump(2));
  });
}

bigtax_status bigtax_fit(const bigtax_dataset *ds, const char *spec,
                         unsigned long long seed, bigtax_model **out) {
  return guarded([&] {
    require(ds && spec && out, "null argument");
    LearnerSpec ls = LearnerSpec::parse(spec);
    *out = new bigtax_model{fit_spec(ls, ds->ds, seed)};
  });
}

void bigtax_model_free(bigtax_model *m) { delete m; }

bigtax_status bigtax_model_save(const bigtax_model *m, const char *path,
                                const char *stamp_lines_or_null) {
  return guarded([&] {
    require(m && path, "null argument");
    nlohmann::json j = m->model->to_json();
    if (stamp_lines_or_null && *stamp_lines_or_null) {
      nlohmann::json cfg = nlohmann::json::object();
      for (const auto &[k, v] : parse_stamp(stamp_lines_or_null).kv) cfg[k] = v;
      j["config"] = cfg;
    }
    write_atomic(path, j.dump(2) + "\n");
  });
}

bigtax_status bigtax_model_load(const char *path, bigtax_model **out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new bigtax_model{load_model(path)};
  });
}

bigtax_status bigtax_model_method(const bigtax_model *m, char **out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = dup_string(m->model->method());
  });
}

bigtax_status bigtax_model_predict(const bigtax_model *m, const double *x, int p,
                                   int *label_out) {
  return guarded([&] {
    require(m && x && label_out, "null argument");
    Eigen::RowVectorXd row(p);
    for (int j = 0; j < p; ++j) row[j] = x[j];
    *label_out = m->model->predict(row);
  });
}

bigtax_status bigtax_evaluate(const bigtax_model *m, const bigtax_dataset *test,
                              double *epe_out) {
  return guarded([&] {
    require(m && test && epe_out, "null argument");
    *epe_out = epe(*m->model, test->ds);
  });
}

bigtax_status bigtax_loocv(const bigtax_dataset *ds, const char *spec,
                           double *cv_out) {
  return guarded([&] {
    require(ds && spec && cv_out, "null argument");
    *cv_out = loocv(LearnerSpec::parse(spec), ds->ds);
  });
}

bigtax_status bigtax_select_k(const bigtax_dataset *ds, const int *ks, int n_ks,
                              const char *distance, char **table_json_out) {
  return guarded([&] {
    require(ds && ks && n_ks > 0 && table_json_out, "null argument");
    DistanceSpec dspec =
        distance && *distance ? DistanceSpec::parse(distance) : DistanceSpec{};
    SelectResult res =
        select_k(ds->ds, std::vector<int>(ks, ks + n_ks), dspec, SelectCriterion{});
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t t = 0; t < res.ks.size(); ++t)
      table.push_back({{"k", res.ks[t]}, {"score", res.scores[t]}});
    nlohmann::json j{{"k_hat", res.k_hat}, {"table", table}};
    *table_json_out = dup_string(j.dump(2));
  });
}

bigtax_status bigtax_bench(const bigtax_dataset *const *datasets, int n_datasets,
                           const char *const *methods, int n_methods, int R,
                           double test_fraction, unsigned long long seed,
                           int standardize, bigtax_report **out) {
  return guarded([&] {
    require(datasets && n_datasets > 0 && methods && n_methods > 0 && out,
            "null argument");
    std::vector<Dataset> ds_list;
    for (int i = 0; i < n_datasets; ++i) {
      require(datasets[i] != nullptr, "null dataset handle");
      ds_list.push_back(datasets[i]->ds);
    }
    std::vector<std::string> method_list;
    for (int i = 0; i < n_methods; ++i) {
      require(methods[i] != nullptr, "null method");
      method_list.emplace_back(methods[i]);
    }
    *out = new bigtax_report{benchmark(ds_list, method_list, R, test_fraction,
                                       seed, standardize != 0)};
  });
}

void bigtax_report_free(bigtax_report *r) { delete r; }

bigtax_status bigtax_report_render(const bigtax_report *r, const char *format,
                                   const char *stamp_lines, char **out) {
  return guarded([&] {
    require(r && format && out, "null argument");
    RunStamp stamp = parse_stamp(stamp_lines);
    std::string f = format;
    std::string bytes;
    if (f == "csv_long")
      bytes = render_long_csv(r->report, stamp);
    else if (f == "csv_summary")
      bytes = render_summary_csv(r->report, stamp);
    else if (f == "md")
      bytes = render_markdown(r->report, stamp);
    else if (f == "json")
      bytes = report_to_json(r->report, stamp).dump(2) + "\n";
    else if (f == "svg")
      bytes = render_svg(r->report, stamp);
    else
      fail(ErrorCode::invalid_argument, "unknown report format '" + f + "'");
    *out = dup_string(bytes);
  });
}

bigtax_status bigtax_write_file_atomic(const char *path, const char *bytes) {
  return guarded([&] {
    require(path && bytes, "null argument");
    write_atomic(path, bytes);
  });
}

}  // extern "C"
