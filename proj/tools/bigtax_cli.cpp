// command-line front end; talks to the library through the C API only

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bigtax.h"

namespace {

struct DatasetHandle {
  bigtax_dataset *h = nullptr;
  ~DatasetHandle() { bigtax_dataset_free(h); }
};

struct ModelHandle {
  bigtax_model *h = nullptr;
  ~ModelHandle() { bigtax_model_free(h); }
};

struct ReportHandle {
  bigtax_report *h = nullptr;
  ~ReportHandle() { bigtax_report_free(h); }
};

struct OwnedString {
  char *s = nullptr;
  ~OwnedString() { bigtax_string_free(s); }
};

[[noreturn]] void die(const std::string &msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(1);
}

void check(bigtax_status st) {
  if (st != BIGTAX_OK) die(bigtax_last_error());
}

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die("cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

// flat key=value file; '#' lines are comments
std::map<std::string, std::string> read_config(const std::string &path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  if (!in) die("cannot open config '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) die("config line without '=': " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::vector<std::string> split_list(const std::string &text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// resolved configuration, echoed into every artifact
struct Stamp {
  std::string lines;
  void add(const std::string &k, const std::string &v) {
    lines += k + "=" + v + "\n";
  }
};

struct Common {
  std::string config_path;
  std::uint64_t seed = 42;
  bool seed_from_flag = false;

  // precedence: flag > config file > BIGTAX_SEED > 42
  void resolve_seed(const std::map<std::string, std::string> &cfg) {
    if (seed_from_flag) return;
    auto it = cfg.find("seed");
    if (it != cfg.end()) {
      seed = std::strtoull(it->second.c_str(), nullptr, 10);
      return;
    }
    if (const char *env = std::getenv("BIGTAX_SEED"))
      seed = std::strtoull(env, nullptr, 10);
  }
};

// "path" or "path:label"; label falls back to --label
void load_data(const std::string &arg, const std::string &fallback_label,
               const std::string &schema, DatasetHandle &out) {
  std::string path = arg, label = fallback_label;
  auto colon = arg.rfind(':');
  if (colon != std::string::npos && colon > 1) {  // leave "C:\..." alone
    path = arg.substr(0, colon);
    label = arg.substr(colon + 1);
  }
  if (label.empty()) die("no label column for '" + path + "' (use --label or path:label)");
  check(bigtax_dataset_load_csv(path.c_str(), label.c_str(),
                                schema.empty() ? nullptr : schema.c_str(), &out.h));
}

void emit(const std::string &out_path, const std::string &bytes) {
  if (out_path.empty() || out_path == "-") {
    std::cout << bytes;
    return;
  }
  check(bigtax_write_file_atomic(out_path.c_str(), bytes.c_str()));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"statistical learning toolkit"};
  app.require_subcommand(1);
  argv = app.ensure_utf8(argv);

  Common common;
  std::map<std::string, std::string> cfg;

  // shared options are registered per subcommand so help stays local
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", common.config_path, "flat key=value config file");
    auto *seed_opt = sub->add_option("--seed", common.seed, "master seed");
    sub->parse_complete_callback([&, seed_opt] {
      common.seed_from_flag = seed_opt->count() > 0;
      if (!common.config_path.empty()) cfg = read_config(common.config_path);
      common.resolve_seed(cfg);
    });
  };

  auto cfg_or = [&](const std::string &key, const std::string &fallback,
                    const std::string &flag_value, bool flag_set) {
    if (flag_set) return flag_value;
    auto it = cfg.find(key);
    return it != cfg.end() ? it->second : fallback;
  };

  // ---- taxonomy ----
  auto *tax = app.add_subcommand("taxonomy", "classify dataset bigness by (n, p)");
  long tax_n = 0, tax_p = 0;
  std::string tax_data, tax_label, tax_schema, tax_out;
  tax->add_option("--n", tax_n, "row count");
  tax->add_option("--p", tax_p, "feature count");
  tax->add_option("--data", tax_data, "CSV path (alternative to --n/--p)");
  tax->add_option("--label", tax_label, "label column for --data");
  tax->add_option("--schema", tax_schema, "schema JSON for --data");
  tax->add_option("--out", tax_out, "output path (default stdout)");
  add_common(tax);
  tax->callback([&] {
    int heterogeneous = 0, missing = 0;
    if (!tax_data.empty()) {
      DatasetHandle ds;
      load_data(tax_data, tax_label, tax_schema, ds);
      tax_n = bigtax_dataset_n(ds.h);
      tax_p = bigtax_dataset_p(ds.h);
      OwnedString mj;
      check(bigtax_dataset_missing_json(ds.h, &mj.s));
      missing = std::string(mj.s).find("\"total_missing\": 0") == std::string::npos;
    } else if (tax_n <= 0 || tax_p <= 0) {
      throw CLI::ValidationError("taxonomy", "need --n/--p > 0 or --data");
    }
    OwnedString json;
    check(bigtax_taxonomy_json(tax_n, tax_p, heterogeneous, missing, &json.s));
    emit(tax_out, std::string(json.s) + "\n");
  });

  // ---- preprocess ----
  auto *pre = app.add_subcommand("preprocess", "impute and transform a dataset");
  std::string pre_data, pre_label, pre_schema, pre_out, pre_params_out;
  std::string pre_impute, pre_transform, pre_params_in;
  bool pre_sd_scale = false;
  pre->add_option("--data", pre_data, "CSV path or path:label")->required();
  pre->add_option("--label", pre_label, "label column");
  pre->add_option("--schema", pre_schema, "schema JSON path");
  pre->add_option("--impute", pre_impute, "delete | central");
  pre->add_option("--transform", pre_transform, "standardize | unitize");
  pre->add_flag("--sd-scale", pre_sd_scale, "standardize by sample sd");
  pre->add_option("--params-in", pre_params_in,
                  "apply previously saved transform parameters");
  pre->add_option("--out", pre_out, "output CSV path")->required();
  pre->add_option("--params-out", pre_params_out, "transform parameter JSON path");
  add_common(pre);
  pre->callback([&] {
    pre_impute = cfg_or("impute", pre_impute, pre_impute, !pre_impute.empty());
    pre_transform =
        cfg_or("transform", pre_transform, pre_transform, !pre_transform.empty());
    if (!pre_transform.empty() && !pre_params_in.empty())
      die("--transform and --params-in are mutually exclusive");
    DatasetHandle ds;
    load_data(pre_data, pre_label, pre_schema, ds);
    bigtax_dataset *cur = ds.h;
    DatasetHandle imputed, transformed;
    if (!pre_impute.empty()) {
      check(bigtax_dataset_impute(cur, pre_impute.c_str(), &imputed.h));
      cur = imputed.h;
    }
    OwnedString params;
    if (!pre_transform.empty()) {
      check(bigtax_dataset_transform(cur, pre_transform.c_str(), pre_sd_scale,
                                     &transformed.h, &params.s));
      cur = transformed.h;
    } else if (!pre_params_in.empty()) {
      check(bigtax_dataset_apply_transform(cur, slurp(pre_params_in).c_str(),
                                           &transformed.h));
      cur = transformed.h;
    }
    Stamp stamp;
    stamp.add("command", "preprocess");
    stamp.add("data", pre_data);
    if (!pre_impute.empty()) stamp.add("impute", pre_impute);
    if (!pre_transform.empty()) {
      stamp.add("transform", pre_transform);
      stamp.add("sd_scale", pre_sd_scale ? "true" : "false");
    }
    if (!pre_params_in.empty()) stamp.add("params_in", pre_params_in);
    check(bigtax_dataset_write_csv(cur, pre_out.c_str(), stamp.lines.c_str()));
    if (!pre_params_out.empty()) {
      if (!params.s) die("--params-out set but no --transform requested");
      emit(pre_params_out, std::string(params.s) + "\n");
    }
  });

  // ---- fit ----
  auto *fit = app.add_subcommand("fit", "train a model and save it as JSON");
  std::string fit_data, fit_label, fit_schema, fit_method, fit_out, fit_transform;
  std::string fit_params_out;
  fit->add_option("--data", fit_data, "CSV path or path:label")->required();
  fit->add_option("--label", fit_label, "label column");
  fit->add_option("--schema", fit_schema, "schema JSON path");
  fit->add_option("--method", fit_method, "learner spec, e.g. svm(kernel=rbf)");
  fit->add_option("--transform", fit_transform, "standardize | unitize (fit on data)");
  fit->add_option("--params-out", fit_params_out,
                  "save the fitted transform parameters (with --transform)");
  fit->add_option("--out", fit_out, "model JSON path")->required();
  add_common(fit);
  fit->callback([&] {
    fit_method = cfg_or("method", fit_method, fit_method, !fit_method.empty());
    if (fit_method.empty())
      throw CLI::ValidationError("fit", "--method is required (flag or config)");
    DatasetHandle ds;
    load_data(fit_data, fit_label, fit_schema, ds);
    bigtax_dataset *cur = ds.h;
    DatasetHandle transformed;
    OwnedString tparams;
    if (!fit_transform.empty()) {
      check(bigtax_dataset_transform(cur, fit_transform.c_str(), 0, &transformed.h,
                                     &tparams.s));
      cur = transformed.h;
    }
    if (!fit_params_out.empty() && !tparams.s)
      die("--params-out set but no --transform requested");
    ModelHandle model;
    check(bigtax_fit(cur, fit_method.c_str(), common.seed, &model.h));
    Stamp stamp;
    stamp.add("command", "fit");
    stamp.add("data", fit_data);
    stamp.add("method", fit_method);
    if (!fit_transform.empty()) stamp.add("transform", fit_transform);
    stamp.add("seed", std::to_string(common.seed));
    check(bigtax_model_save(model.h, fit_out.c_str(), stamp.lines.c_str()));
    if (!fit_params_out.empty()) emit(fit_params_out, std::string(tparams.s) + "\n");
  });

  // ---- evaluate ----
  auto *ev = app.add_subcommand("evaluate", "test error of a saved model");
  std::string ev_model, ev_data, ev_label, ev_schema, ev_out;
  ev->add_option("--model", ev_model, "model JSON path")->required();
  ev->add_option("--data", ev_data, "test CSV path or path:label")->required();
  ev->add_option("--label", ev_label, "label column");
  ev->add_option("--schema", ev_schema, "schema JSON path");
  ev->add_option("--out", ev_out, "output path (default stdout)");
  add_common(ev);
  ev->callback([&] {
    ModelHandle model;
    check(bigtax_model_load(ev_model.c_str(), &model.h));
    DatasetHandle ds;
    load_data(ev_data, ev_label, ev_schema, ds);
    double e = 0.0;
    check(bigtax_evaluate(model.h, ds.h, &e));
    OwnedString method;
    check(bigtax_model_method(model.h, &method.s));
    std::string out = "{\n  \"config\": {\"command\": \"evaluate\", \"model\": \"" +
                      ev_model + "\", \"data\": \"" + ev_data +
                      "\"},\n  \"method\": \"" + std::string(method.s) +
                      "\",\n  \"epe\": " + std::to_string(e) + "\n}\n";
    emit(ev_out, out);
  });

  // ---- cv ----
  auto *cv = app.add_subcommand("cv", "leave-one-out cross-validation");
  std::string cv_data, cv_label, cv_schema, cv_method, cv_out, cv_distance;
  bool cv_select_k = false;
  int cv_kmin = 1, cv_kmax = 25, cv_kstep = 2;
  cv->add_option("--data", cv_data, "CSV path or path:label")->required();
  cv->add_option("--label", cv_label, "label column");
  cv->add_option("--schema", cv_schema, "schema JSON path");
  cv->add_option("--method", cv_method, "learner spec to cross-validate");
  cv->add_flag("--select-k", cv_select_k, "choose k for kNN by LOOCV");
  cv->add_option("--kmin", cv_kmin, "smallest k (with --select-k)");
  cv->add_option("--kmax", cv_kmax, "largest k (with --select-k)");
  cv->add_option("--kstep", cv_kstep, "k increment (with --select-k)");
  cv->add_option("--distance", cv_distance, "distance spec (with --select-k)");
  cv->add_option("--out", cv_out, "output path (default stdout)");
  add_common(cv);
  cv->callback([&] {
    DatasetHandle ds;
    load_data(cv_data, cv_label, cv_schema, ds);
    if (cv_select_k) {
      if (cv_kmin < 1 || cv_kstep < 1 || cv_kmax < cv_kmin)
        throw CLI::ValidationError("cv", "bad k range");
      std::vector<int> ks;
      for (int k = cv_kmin; k <= cv_kmax; k += cv_kstep) ks.push_back(k);
      OwnedString table;
      check(bigtax_select_k(ds.h, ks.data(), static_cast<int>(ks.size()),
                            cv_distance.c_str(), &table.s));
      emit(cv_out, std::string(table.s) + "\n");
      return;
    }
    cv_method = cfg_or("method", cv_method, cv_method, !cv_method.empty());
    if (cv_method.empty())
      throw CLI::ValidationError("cv", "--method or --select-k is required");
    double score = 0.0;
    check(bigtax_loocv(ds.h, cv_method.c_str(), &score));
    std::string out = "{\n  \"config\": {\"command\": \"cv\", \"data\": \"" +
                      cv_data + "\", \"method\": \"" + cv_method +
                      "\"},\n  \"loocv\": " + std::to_string(score) + "\n}\n";
    emit(cv_out, out);
  });

  // ---- bench ----
  auto *bench = app.add_subcommand("bench", "replicated train/test comparison");
  std::vector<std::string> bench_data;
  std::string bench_label, bench_schema, bench_methods, bench_out, bench_formats;
  int bench_R = 100;
  double bench_fraction = 1.0 / 3.0;
  bool bench_raw = false;
  bench->add_option("--data", bench_data, "CSV path or path:label (repeatable)")
      ->required();
  bench->add_option("--label", bench_label, "fallback label column");
  bench->add_option("--schema", bench_schema, "schema JSON applied to every dataset");
  bench->add_option("--methods", bench_methods, "comma-separated learner specs");
  auto *r_opt = bench->add_option("--replications", bench_R, "splits per pair");
  auto *f_opt =
      bench->add_option("--test-fraction", bench_fraction, "held-out fraction");
  bench->add_flag("--no-standardize", bench_raw, "skip per-split standardization");
  bench->add_option("--out", bench_out, "output path prefix")->required();
  bench->add_option("--formats", bench_formats, "subset of csv,md,json,svg");
  add_common(bench);
  bench->callback([&] {
    bench_methods = cfg_or("methods", bench_methods, bench_methods,
                           !bench_methods.empty());
    bench_formats = cfg_or("formats", bench_formats.empty() ? "csv,md,json" : bench_formats,
                           bench_formats, !bench_formats.empty());
    if (r_opt->count() == 0 && cfg.count("replications"))
      bench_R = std::atoi(cfg.at("replications").c_str());
    if (f_opt->count() == 0 && cfg.count("test_fraction"))
      bench_fraction = std::atof(cfg.at("test_fraction").c_str());
    if (bench_methods.empty())
      throw CLI::ValidationError("bench", "--methods is required (flag or config)");

    std::vector<std::unique_ptr<DatasetHandle>> handles;
    std::vector<bigtax_dataset *> raw_handles;
    for (const std::string &arg : bench_data) {
      auto h = std::make_unique<DatasetHandle>();
      load_data(arg, bench_label, bench_schema, *h);
      raw_handles.push_back(h->h);
      handles.push_back(std::move(h));
    }
    std::vector<std::string> methods = split_list(bench_methods, ',');
    std::vector<const char *> method_ptrs;
    for (const std::string &m : methods) method_ptrs.push_back(m.c_str());

    ReportHandle report;
    check(bigtax_bench(raw_handles.data(), static_cast<int>(raw_handles.size()),
                       method_ptrs.data(), static_cast<int>(method_ptrs.size()),
                       bench_R, bench_fraction, common.seed, bench_raw ? 0 : 1,
                       &report.h));

    Stamp stamp;
    stamp.add("command", "bench");
    for (const std::string &d : bench_data) stamp.add("data", d);
    stamp.add("methods", bench_methods);
    stamp.add("replications", std::to_string(bench_R));
    stamp.add("test_fraction", std::to_string(bench_fraction));
    stamp.add("seed", std::to_string(common.seed));
    stamp.add("standardize", bench_raw ? "false" : "true");

    auto render_to = [&](const char *fmt, const std::string &path) {
      OwnedString bytes;
      check(bigtax_report_render(report.h, fmt, stamp.lines.c_str(), &bytes.s));
      emit(path, bytes.s);
    };
    for (const std::string &f : split_list(bench_formats, ',')) {
      if (f == "csv") {
        render_to("csv_long", bench_out + "_long.csv");
        render_to("csv_summary", bench_out + "_summary.csv");
      } else if (f == "md") {
        render_to("md", bench_out + ".md");
      } else if (f == "json") {
        render_to("json", bench_out + ".json");
      } else if (f == "svg") {
        render_to("svg", bench_out + ".svg");
      } else {
        throw CLI::ValidationError("bench", "unknown format '" + f + "'");
      }
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }
  return 0;
}
