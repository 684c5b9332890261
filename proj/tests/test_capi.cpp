#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "bigtax.h"
#include "doctest.h"
#include "json.hpp"

namespace {

// scratch files under /tmp, removed on scope exit
struct Scratch {
  std::string path;
  explicit Scratch(const std::string &name) : path("/tmp/bigtax_capi_" + name) {}
  ~Scratch() { std::remove(path.c_str()); }
  void write(const std::string &bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
  }
  std::string read() const {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  }
};

std::string take(char *s) {
  std::string out = s ? s : "";
  bigtax_string_free(s);
  return out;
}

const char *clustered_csv =
    "x1,x2,y\n"
    "0.0,1.0,a\n"
    "0.5,2.0,a\n"
    "1.0,1.5,a\n"
    "1.5,0.5,a\n"
    "2.0,2.5,a\n"
    "2.5,1.0,a\n"
    "10.0,1.0,b\n"
    "10.5,2.0,b\n"
    "11.0,1.5,b\n"
    "11.5,0.5,b\n"
    "12.0,2.5,b\n"
    "12.5,1.0,b\n";

struct LoadedDataset {
  bigtax_dataset *ds = nullptr;
  ~LoadedDataset() { bigtax_dataset_free(ds); }
};

}  // namespace

TEST_CASE("version and null-handle probes behave") {
  REQUIRE(bigtax_version() != nullptr);
  CHECK(std::string(bigtax_version()).size() > 0);
  CHECK(bigtax_dataset_n(nullptr) == -1);
  CHECK(bigtax_dataset_p(nullptr) == -1);
  CHECK(bigtax_dataset_classes(nullptr) == -1);
}

TEST_CASE("datasets load, describe, and rewrite through the C face") {
  Scratch csv("roundtrip.csv");
  csv.write(clustered_csv);

  LoadedDataset h;
  REQUIRE(bigtax_dataset_load_csv(csv.path.c_str(), "y", nullptr, &h.ds) ==
          BIGTAX_OK);
  CHECK(bigtax_dataset_n(h.ds) == 12);
  CHECK(bigtax_dataset_p(h.ds) == 2);
  CHECK(bigtax_dataset_classes(h.ds) == 2);
  CHECK(bigtax_dataset_set_name(h.ds, "clusters") == BIGTAX_OK);

  Scratch out("rewritten.csv");
  REQUIRE(bigtax_dataset_write_csv(h.ds, out.path.c_str(), "run=7\ntool=test") ==
          BIGTAX_OK);
  std::string body = out.read();
  CHECK(body.rfind("# run=7\n# tool=test\n", 0) == 0);

  LoadedDataset back;  // the stamp comments must not confuse the reader
  REQUIRE(bigtax_dataset_load_csv(out.path.c_str(), "y", nullptr, &back.ds) ==
          BIGTAX_OK);
  CHECK(bigtax_dataset_n(back.ds) == 12);
  CHECK(bigtax_dataset_p(back.ds) == 2);
}

TEST_CASE("missingness report and imputation work over the boundary") {
  Scratch csv("missing.csv");
  csv.write(
      "a,b,y\n"
      "1,2,u\n"
      "?,3,u\n"
      "3,,v\n"
      "4,5,v\n"
      "5,6,u\n"
      "6,7,v\n");
  LoadedDataset h;
  REQUIRE(bigtax_dataset_load_csv(csv.path.c_str(), "y", nullptr, &h.ds) ==
          BIGTAX_OK);

  char *raw = nullptr;
  REQUIRE(bigtax_dataset_missing_json(h.ds, &raw) == BIGTAX_OK);
  nlohmann::json j = nlohmann::json::parse(take(raw));
  CHECK(j["total_missing"] == 2);
  CHECK(j["rows_affected"] == 2);
  REQUIRE(j["columns"].size() == 2);
  CHECK(j["columns"][0]["column"] == "a");
  CHECK(j["columns"][0]["rate"] == doctest::Approx(1.0 / 6.0));

  bigtax_dataset *filled = nullptr;
  REQUIRE(bigtax_dataset_impute(h.ds, "central", &filled) == BIGTAX_OK);
  char *after = nullptr;
  REQUIRE(bigtax_dataset_missing_json(filled, &after) == BIGTAX_OK);
  nlohmann::json j2 = nlohmann::json::parse(take(after));
  CHECK(j2["total_missing"] == 0);
  CHECK(bigtax_dataset_n(filled) == 6);
  bigtax_dataset_free(filled);

  bigtax_dataset *trimmed = nullptr;
  REQUIRE(bigtax_dataset_impute(h.ds, "delete", &trimmed) == BIGTAX_OK);
  CHECK(bigtax_dataset_n(trimmed) == 4);
  bigtax_dataset_free(trimmed);

  bigtax_dataset *bogus = nullptr;
  CHECK(bigtax_dataset_impute(h.ds, "sideways", &bogus) ==
        BIGTAX_E_INVALID_ARGUMENT);
  CHECK(std::string(bigtax_last_error()).find("sideways") != std::string::npos);
}

TEST_CASE("transforms return the new dataset plus its parameters") {
  Scratch csv("transform.csv");
  csv.write(clustered_csv);
  LoadedDataset h;
  REQUIRE(bigtax_dataset_load_csv(csv.path.c_str(), "y", nullptr, &h.ds) ==
          BIGTAX_OK);

  bigtax_dataset *scaled = nullptr;
  char *params = nullptr;
  REQUIRE(bigtax_dataset_transform(h.ds, "standardize", 0, &scaled, &params) ==
          BIGTAX_OK);
  nlohmann::json pj = nlohmann::json::parse(take(params));
  CHECK(pj["kind"] == "standardize");
  REQUIRE(pj["columns"].size() == 2);
  CHECK(pj["columns"][0]["name"] == "x1");
  bigtax_dataset_free(scaled);

  bigtax_dataset *unit = nullptr;
  REQUIRE(bigtax_dataset_transform(h.ds, "unitize", 0, &unit, nullptr) ==
          BIGTAX_OK);
  bigtax_dataset_free(unit);

  bigtax_dataset *bad = nullptr;
  CHECK(bigtax_dataset_transform(h.ds, "fold", 0, &bad, nullptr) ==
        BIGTAX_E_INVALID_ARGUMENT);
}

TEST_CASE("the taxonomy is reachable as JSON") {
  char *raw = nullptr;
  REQUIRE(bigtax_taxonomy_json(476, 166, 0, 0, &raw) == BIGTAX_OK);
  std::string text = take(raw);
  CHECK(text.find("\"cell\": \"E\"") != std::string::npos);
  nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j["recommendations"].is_object());

  char *bad = nullptr;
  CHECK(bigtax_taxonomy_json(0, 5, 0, 0, &bad) == BIGTAX_E_INVALID_ARGUMENT);
}

TEST_CASE("models fit, predict, evaluate, and survive disk round-trips") {
  Scratch csv("fit.csv");
  csv.write(clustered_csv);
  LoadedDataset h;
  REQUIRE(bigtax_dataset_load_csv(csv.path.c_str(), "y", nullptr, &h.ds) ==
          BIGTAX_OK);

  bigtax_model *m = nullptr;
  REQUIRE(bigtax_fit(h.ds, "lda", 0, &m) == BIGTAX_OK);
  char *name = nullptr;
  REQUIRE(bigtax_model_method(m, &name) == BIGTAX_OK);
  CHECK(take(name) == "lda");

  double left[2] = {1.0, 1.5};
  double right[2] = {11.0, 1.5};
  int label = 0;
  REQUIRE(bigtax_model_predict(m, left, 2, &label) == BIGTAX_OK);
  CHECK(label == 1);
  REQUIRE(bigtax_model_predict(m, right, 2, &label) == BIGTAX_OK);
  CHECK(label == 2);
  CHECK(bigtax_model_predict(m, left, 1, &label) != BIGTAX_OK);

  double err = 1.0;
  REQUIRE(bigtax_evaluate(m, h.ds, &err) == BIGTAX_OK);
  CHECK(err == 0.0);

  Scratch saved("model.json");
  REQUIRE(bigtax_model_save(m, saved.path.c_str(), "seed=0\nspec=lda") ==
          BIGTAX_OK);
  CHECK(saved.read().find("\"config\"") != std::string::npos);

  bigtax_model *loaded = nullptr;
  REQUIRE(bigtax_model_load(saved.path.c_str(), &loaded) == BIGTAX_OK);
  int again = 0;
  REQUIRE(bigtax_model_predict(loaded, right, 2, &again) == BIGTAX_OK);
  CHECK(again == 2);
  bigtax_model_free(loaded);
  bigtax_model_free(m);
}

TEST_CASE("penalized logistic keeps its method name across save and load") {
  Scratch csv("lasso.csv");
  csv.write(clustered_csv);
  LoadedDataset h;
  REQUIRE(bigtax_dataset_load_csv(csv.path.c_str(), "y", nullptr, &h.ds) ==
          BIGTAX_OK);
  bigtax_model *m = nullptr;
  REQUIRE(bigtax_fit(h.ds, "logistic(lambda=0.05)", 0, &m) == BIGTAX_OK);
  char *name = nullptr;
  REQUIRE(bigtax_model_method(m, &name) == BIGTAX_OK);
  CHECK(take(name) == "logistic_l1");

  Scratch saved("lasso_model.json");
  REQUIRE(bigtax_model_save(m, saved.path.c_str(), nullptr) == BIGTAX_OK);
  bigtax_model *loaded = nullptr;
  REQUIRE(bigtax_model_load(saved.path.c_str(), &loaded) == BIGTAX_OK);
  char *name2 = nullptr;
  REQUIRE(bigtax_model_method(loaded, &name2) == BIGTAX_OK);
  CHECK(take(name2) == "logistic_l1");
  bigtax_model_free(loaded);
  bigtax_model_free(m);
}

TEST_CASE("cross-validation and k selection answer through the C face") {
  Scratch csv("cv.csv");
  csv.write(clustered_csv);
  LoadedDataset h;
  REQUIRE(bigtax_dataset_load_csv(csv.path.c_str(), "y", nullptr, &h.ds) ==
          BIGTAX_OK);

  double cv = 1.0;
  REQUIRE(bigtax_loocv(h.ds, "knn(k=1)", &cv) == BIGTAX_OK);
  CHECK(cv == 0.0);

  int ks[3] = {5, 1, 3};
  char *raw = nullptr;
  REQUIRE(bigtax_select_k(h.ds, ks, 3, "euclidean", &raw) == BIGTAX_OK);
  nlohmann::json j = nlohmann::json::parse(take(raw));
  CHECK(j["k_hat"] == 1);  // every k is perfect here, ties go small
  REQUIRE(j["table"].size() == 3);
  CHECK(j["table"][0]["k"] == 1);
  CHECK(j["table"][0]["score"] == 0.0);
}

TEST_CASE("benchmarks render every artifact format") {
  Scratch csv("bench.csv");
  csv.write(clustered_csv);
  LoadedDataset h;
  REQUIRE(bigtax_dataset_load_csv(csv.path.c_str(), "y", nullptr, &h.ds) ==
          BIGTAX_OK);
  REQUIRE(bigtax_dataset_set_name(h.ds, "clusters") == BIGTAX_OK);

  const bigtax_dataset *ds_list[1] = {h.ds};
  const char *methods[2] = {"knn(k=1)", "frobnicate"};
  bigtax_report *rep = nullptr;
  REQUIRE(bigtax_bench(ds_list, 1, methods, 2, 3, 1.0 / 3.0, 42, 1, &rep) ==
          BIGTAX_OK);

  const char *formats[5] = {"csv_long", "csv_summary", "md", "json", "svg"};
  for (const char *f : formats) {
    char *raw = nullptr;
    REQUIRE(bigtax_report_render(rep, f, "seed=42", &raw) == BIGTAX_OK);
    std::string text = take(raw);
    CHECK(!text.empty());
    if (std::string(f) == "csv_summary")
      CHECK(text.find("skipped: unknown method") != std::string::npos);
    if (std::string(f) == "json") {
      nlohmann::json j = nlohmann::json::parse(text);
      CHECK(j["config"]["seed"] == "42");
      CHECK(j["entries"].size() == 2);
    }
    if (std::string(f) == "svg") CHECK(text.rfind("<svg ", 0) == 0);
  }
  char *bad = nullptr;
  CHECK(bigtax_report_render(rep, "docx", "", &bad) != BIGTAX_OK);
  bigtax_report_free(rep);

  Scratch out("artifact.txt");
  REQUIRE(bigtax_write_file_atomic(out.path.c_str(), "payload\n") == BIGTAX_OK);
  CHECK(out.read() == "payload\n");
}

TEST_CASE("failures come back as status codes with messages") {
  bigtax_dataset *ds = nullptr;
  CHECK(bigtax_dataset_load_csv("/no/such/file.csv", "y", nullptr, &ds) ==
        BIGTAX_E_IO);
  CHECK(std::string(bigtax_last_error()).size() > 0);

  Scratch csv("badlabel.csv");
  csv.write(clustered_csv);
  CHECK(bigtax_dataset_load_csv(csv.path.c_str(), "zz", nullptr, &ds) ==
        BIGTAX_E_INVALID_ARGUMENT);

  LoadedDataset h;
  REQUIRE(bigtax_dataset_load_csv(csv.path.c_str(), "y", nullptr, &h.ds) ==
          BIGTAX_OK);
  bigtax_model *m = nullptr;
  CHECK(bigtax_fit(h.ds, "knn(k=", 0, &m) == BIGTAX_E_PARSE);
  CHECK(bigtax_fit(h.ds, nullptr, 0, &m) == BIGTAX_E_INVALID_ARGUMENT);
  CHECK(bigtax_model_load("/no/such/model.json", &m) == BIGTAX_E_IO);
}
