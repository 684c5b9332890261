#include <cmath>
#include <cstdlib>

#include "bigtax/dataset.hpp"
#include "bigtax/errors.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bigtax;
using testutil::TempFile;

namespace {

Dataset load_text(const TempFile &f, const std::string &content,
                  const std::string &label = "y",
                  const std::string &schema = "") {
  f.write(content);
  return load_csv(f.path(), label, schema);
}

}  // namespace

TEST_CASE("column kinds are inferred binary before count before real") {
  TempFile f("kinds.csv");
  Dataset ds = load_text(f,
                         "bin,cnt,val,cat,y\n"
                         "0,0,1.5,a,pos\n"
                         "1,2,2.5,b,neg\n"
                         "1,5,-3.25,a,pos\n");
  REQUIRE(ds.n() == 3);
  REQUIRE(ds.p() == 4);
  CHECK(ds.schema[0].kind == VariableKind::binary);
  CHECK(ds.schema[1].kind == VariableKind::count);
  CHECK(ds.schema[2].kind == VariableKind::real);
  CHECK(ds.schema[3].kind == VariableKind::categorical);
  CHECK(ds.schema[3].levels == std::vector<std::string>{"a", "b"});
  CHECK(ds.X(0, 3) == 0.0);  // "a"
  CHECK(ds.X(1, 3) == 1.0);  // "b"
  CHECK(ds.all_numeric() == false);
  CHECK(ds.numeric_col(0));
  CHECK_FALSE(ds.numeric_col(3));
  // labels sort lexically when not all numeric: neg < pos
  CHECK(ds.label_names == std::vector<std::string>{"neg", "pos"});
  CHECK(ds.labels == std::vector<int>{2, 1, 2});
  CHECK(ds.g == 2);
  CHECK(ds.name == "bigtax_test_kinds");
}

TEST_CASE("numeric labels sort by value, not text") {
  TempFile f("numlab.csv");
  Dataset ds = load_text(f, "x,y\n1,10\n2,2\n3,10\n");
  CHECK(ds.label_names == std::vector<std::string>{"2", "10"});
  CHECK(ds.labels == std::vector<int>{2, 1, 2});
}

TEST_CASE("empty cells and question marks are MISSING") {
  TempFile f("miss.csv");
  Dataset ds = load_text(f, "a,b,y\n1,?,u\n,2,v\n3,4,u\n5,6,v\n");
  CHECK(std::isnan(ds.X(0, 1)));
  CHECK(std::isnan(ds.X(1, 0)));
  CHECK(ds.X(2, 0) == 3.0);
  MissingnessSummary s = missing_summary(ds);
  CHECK(s.total_missing == 2);
  CHECK(s.rows_affected == 2);
  CHECK(s.column_rates[0] == doctest::Approx(0.25));
  CHECK(s.column_rates[1] == doctest::Approx(0.25));
  CHECK_THROWS_AS(ds.require_complete("test"), Error);
}

TEST_CASE("declared schemas override inference") {
  TempFile f("declared.csv");
  TempFile sf("declared.schema.json");
  sf.write(R"({"columns":[
      {"name":"grade","kind":"ordinal","levels":["low","mid","high"]},
      {"name":"code","kind":"categorical"}]})");
  f.write("grade,code,y\nhigh,7,a\nlow,9,b\nmid,7,a\n");
  Dataset ds = load_csv(f.path(), "y", sf.path());
  CHECK(ds.schema[0].kind == VariableKind::ordinal);
  CHECK(ds.X(0, 0) == 2.0);  // declared order low<mid<high
  CHECK(ds.X(1, 0) == 0.0);
  CHECK(ds.X(2, 0) == 1.0);
  CHECK(ds.schema[1].kind == VariableKind::categorical);  // despite numeric text
  CHECK(ds.X(1, 1) == 1.0);                               // levels {"7","9"}
}

TEST_CASE("load failures carry the right codes") {
  TempFile f("bad.csv");
  auto code_of = [&](const std::string &content, const std::string &label) {
    f.write(content);
    try {
      load_csv(f.path(), label);
      return ErrorCode::ok;
    } catch (const Error &e) {
      return e.code();
    }
  };
  CHECK(code_of("", "y") == ErrorCode::empty_data);
  CHECK(code_of("a,y\n", "y") == ErrorCode::empty_data);
  CHECK(code_of("a,a,y\n1,2,u\n1,2,v\n", "y") == ErrorCode::parse);
  CHECK(code_of("a,y\n1,u\n2,v\n", "z") == ErrorCode::invalid_argument);
  CHECK(code_of("a,y\n1,u\n2,u\n", "y") == ErrorCode::invalid_argument);
  CHECK(code_of("a,y\n1,u\n2\n", "y") == ErrorCode::parse);
  CHECK(code_of("a,y\n1,\n2,v\n", "y") == ErrorCode::parse);  // missing label
  try {
    load_csv("/nonexistent/nowhere.csv", "y");
    FAIL_CHECK("expected io error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("CRLF, quoting and comment lines are tolerated") {
  TempFile f("crlf.csv");
  Dataset ds = load_text(f,
                         "# written by a previous run\n"
                         "# seed=42\n"
                         "a,word,y\r\n"
                         "1,\"hello, world\",u\r\n"
                         "2,\"say \"\"hi\"\"\",v\r\n");
  REQUIRE(ds.n() == 2);
  CHECK(ds.schema[1].levels ==
        std::vector<std::string>{"hello, world", "say \"hi\""});
}

TEST_CASE("impute delete removes exactly the rows with MISSING") {
  TempFile f("impdel.csv");
  Dataset ds = load_text(f, "a,b,y\n1,?,u\n2,2,v\n3,3,u\n");
  Dataset clean = impute(ds, ImputePolicy::delete_rows);
  REQUIRE(clean.n() == 2);
  CHECK(clean.X(0, 0) == 2.0);
  CHECK(clean.labels == std::vector<int>{2, 1});
  Dataset all_missing = load_text(f, "a,y\n?,u\n?,v\n");
  CHECK_THROWS_AS(impute(all_missing, ImputePolicy::delete_rows), Error);
}

TEST_CASE("central imputation matches each kind's central tendency") {
  TempFile f("impc.csv");
  TempFile sf("impc.schema.json");
  sf.write(R"({"columns":[
      {"name":"r","kind":"real"},
      {"name":"c","kind":"count"},
      {"name":"k","kind":"categorical"}]})");
  f.write(
      "r,c,k,y\n"
      "1,1,a,u\n"
      "2,2,a,v\n"
      "3,5,b,u\n"
      "6,6,b,v\n"
      "?,?,?,u\n");
  Dataset ds = load_csv(f.path(), "y", sf.path());
  Dataset filled = impute(ds, ImputePolicy::central);
  CHECK(filled.X(4, 0) == doctest::Approx(3.0));  // mean of 1,2,3,6
  CHECK(filled.X(4, 1) == 2.0);                   // lower median of 1,2,5,6
  CHECK(filled.X(4, 2) == 0.0);  // mode tie a/b -> smallest level code
  CHECK_FALSE(filled.X.hasNaN());
  CHECK(filled.X(0, 0) == 1.0);  // observed cells untouched
}

TEST_CASE("standardize divides by the root sum of squared deviations") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  Dataset ds = testutil::make_ds(X, {1, 2, 1});
  auto [t, params] = fit_transform(ds, TransformKind::standardize);
  CHECK(t.X(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(t.X(1, 0) == doctest::Approx(0.0));
  CHECK(t.X(2, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(params.cols[0].a == doctest::Approx(2.0));
  CHECK(params.cols[0].b == doctest::Approx(std::sqrt(2.0)));
  CHECK(t.schema[0].kind == VariableKind::real);

  auto [t2, p2] = fit_transform(ds, TransformKind::standardize, true);
  CHECK(p2.cols[0].b == doctest::Approx(1.0));  // sample sd of 1,2,3
  CHECK(t2.X(0, 0) == doctest::Approx(-1.0));

  Eigen::MatrixXd C(3, 1);
  C << 4, 4, 4;
  try {
    fit_transform(testutil::make_ds(C, {1, 2, 1}), TransformKind::standardize);
    FAIL_CHECK("expected constant_column");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::constant_column);
  }
}

TEST_CASE("unitize maps the observed range onto [0,1]") {
  Eigen::MatrixXd X(3, 2);
  X << 1, 10, 2, 30, 3, 20;
  Dataset ds = testutil::make_ds(X, {1, 2, 1});
  auto [t, params] = fit_transform(ds, TransformKind::unitize);
  CHECK(t.X(0, 0) == doctest::Approx(0.0));
  CHECK(t.X(1, 0) == doctest::Approx(0.5));
  CHECK(t.X(2, 0) == doctest::Approx(1.0));
  CHECK(t.X(1, 1) == doctest::Approx(1.0));
  CHECK(t.X(2, 1) == doctest::Approx(0.5));
  CHECK(params.cols[1].a == 10.0);
  CHECK(params.cols[1].b == 30.0);
}

TEST_CASE("apply_transform reuses fitted parameters on new data") {
  Eigen::MatrixXd X(3, 1), Z(1, 1);
  X << 1, 2, 3;
  Z << 4;
  Dataset train = testutil::make_ds(X, {1, 2, 1});
  Dataset test = testutil::make_ds(Z, {1});
  auto [t, params] = fit_transform(train, TransformKind::standardize);
  Dataset tz = apply_transform(params, test);
  CHECK(tz.X(0, 0) == doctest::Approx(2.0 / std::sqrt(2.0)));
  test.schema[0].name = "other";
  CHECK_THROWS_AS(apply_transform(params, test), Error);
}

TEST_CASE("categorical columns pass through transforms untouched") {
  TempFile f("trcat.csv");
  Dataset ds = load_text(f, "v,k,y\n1,a,u\n2,b,v\n3,a,u\n");
  auto [t, params] = fit_transform(ds, TransformKind::standardize);
  REQUIRE(params.cols.size() == 1);
  CHECK(params.cols[0].name == "v");
  CHECK(t.X(1, 1) == 1.0);  // level code unchanged
  CHECK(t.schema[1].kind == VariableKind::categorical);
}

TEST_CASE("split draws llround(n*fraction) test rows in original order") {
  Eigen::MatrixXd X(9, 1);
  std::vector<int> y(9);
  for (int i = 0; i < 9; ++i) {
    X(i, 0) = i;
    y[i] = i % 2 + 1;
  }
  Dataset ds = testutil::make_ds(X, y);
  auto [train, test] = split(ds, 1.0 / 3.0, 42);
  REQUIRE(train.n() == 6);
  REQUIRE(test.n() == 3);
  std::vector<double> seen;
  for (int i = 0; i < train.n(); ++i) seen.push_back(train.X(i, 0));
  for (int i = 0; i < test.n(); ++i) seen.push_back(test.X(i, 0));
  std::sort(seen.begin(), seen.end());
  for (int i = 0; i < 9; ++i) CHECK(seen[i] == i);
  for (int i = 1; i < train.n(); ++i) CHECK(train.X(i, 0) > train.X(i - 1, 0));
  for (int i = 1; i < test.n(); ++i) CHECK(test.X(i, 0) > test.X(i - 1, 0));

  auto [train2, test2] = split(ds, 1.0 / 3.0, 42);
  CHECK(train2.X == train.X);
  auto [train3, test3] = split(ds, 1.0 / 3.0, 43);
  CHECK(train3.X != train.X);

  auto [t4, s4] = split(ds, 0.5, 1);  // llround(4.5) = 5 (round half away)
  CHECK(s4.n() == 5);
  CHECK_THROWS_AS(split(ds, 0.0, 1), Error);
  CHECK_THROWS_AS(split(ds, 1.0, 1), Error);
  Eigen::MatrixXd small(2, 1);
  small << 1, 2;
  CHECK_THROWS_AS(split(testutil::make_ds(small, {1, 2}), 0.1, 1), Error);
}

TEST_CASE("row subsets keep schema, classes and allow repeats") {
  Eigen::MatrixXd X(4, 2);
  X << 1, 2, 3, 4, 5, 6, 7, 8;
  Dataset ds = testutil::make_ds(X, {1, 2, 2, 1});
  Dataset b = ds.subset_rows({0, 0, 3});
  REQUIRE(b.n() == 3);
  CHECK(b.X(0, 0) == 1.0);
  CHECK(b.X(1, 0) == 1.0);
  CHECK(b.labels == std::vector<int>{1, 1, 1});
  CHECK(b.g == 2);  // class identity survives even when a class drops out
  CHECK(b.label_names == ds.label_names);

  Dataset w = ds.without_row(1);
  REQUIRE(w.n() == 3);
  CHECK(w.X(1, 0) == 5.0);
  CHECK(ds.class_counts() == std::vector<int>{2, 2});
  CHECK(b.class_counts() == std::vector<int>{3, 0});

  Dataset c = ds.subset_cols({1});
  REQUIRE(c.p() == 1);
  CHECK(c.X(2, 0) == 6.0);
  CHECK(c.schema[0].name == "x2");
}

TEST_CASE("write_csv round-trips values, MISSING and comments") {
  TempFile f("round1.csv");
  Dataset ds = load_text(f,
                         "a,b,k,y\n"
                         "0.1,?,red,u\n"
                         "2.25,3,blue,v\n"
                         "-7,4,red,u\n");
  TempFile out("round2.csv");
  write_csv(ds, out.path(), "# seed=42\n# source=unit\n");
  std::string text = out.read();
  CHECK(text.rfind("# seed=42\n# source=unit\n", 0) == 0);
  Dataset back = load_csv(out.path(), "y");
  REQUIRE(back.n() == ds.n());
  REQUIRE(back.p() == ds.p());
  for (int i = 0; i < ds.n(); ++i)
    for (int j = 0; j < ds.p(); ++j) {
      if (std::isnan(ds.X(i, j)))
        CHECK(std::isnan(back.X(i, j)));
      else
        CHECK(back.X(i, j) == ds.X(i, j));
    }
  CHECK(back.labels == ds.labels);
  CHECK(back.label_names == ds.label_names);
  CHECK(back.schema[2].levels == ds.schema[2].levels);
}

TEST_CASE("format_double is exact under round-trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1234567.0, 0.0, 1e300}) {
    std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}
