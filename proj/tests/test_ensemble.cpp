#include <cmath>

#include "bigtax/ensemble.hpp"
#include "bigtax/errors.hpp"
#include "bigtax/learners.hpp"
#include "bigtax/random.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bigtax;
using testutil::rv;

namespace {

// a model that always answers `label` regardless of input: a depth-0 tree
// trained on rows dominated by that class
std::unique_ptr<Model> constant_model(int label) {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  std::vector<int> y = label == 1 ? std::vector<int>{1, 1, 2}
                                  : std::vector<int>{2, 2, 1};
  TreeOptions opt;
  opt.max_depth = 0;
  opt.min_leaf = 1;
  return fit_tree(testutil::make_ds(X, y), opt);
}

}  // namespace

TEST_CASE("a single-member bag is the base learner on its bootstrap") {
  Dataset ds = testutil::blobs(12, 2, 2.0, 101);
  LearnerSpec spec = LearnerSpec::parse("tree(max_depth=3, min_leaf=2)");
  std::unique_ptr<EnsembleModel> ens = bag(spec, ds, 1, 7);
  REQUIRE(ens->members.size() == 1);
  CHECK(ens->weights == std::vector<double>{1.0});

  RandomStream rs(7, 1);
  std::vector<int> idx(ds.n());
  for (int i = 0; i < ds.n(); ++i)
    idx[i] = static_cast<int>(rs.bounded(ds.n()));
  std::unique_ptr<Model> manual =
      fit_spec(spec, ds.subset_rows(idx), derive_seed(7, 1));

  RandomStream qs(8);
  for (int t = 0; t < 50; ++t) {
    Eigen::RowVectorXd x = rv({2.0 * qs.normal(), 2.0 * qs.normal()});
    CHECK(ens->predict(x) == manual->predict(x));
  }
}

TEST_CASE("unanimous members agree under any weights") {
  std::vector<std::unique_ptr<Model>> members;
  members.push_back(constant_model(2));
  members.push_back(constant_model(2));
  members.push_back(constant_model(2));
  std::unique_ptr<EnsembleModel> ens =
      weighted_aggregate(std::move(members), {0.7, 0.2, 0.1});
  CHECK(ens->predict(rv({0.0})) == 2);
  std::vector<double> mass = ens->vote_distribution(rv({0.0}));
  CHECK(mass[1] == doctest::Approx(1.0));
}

TEST_CASE("weighted votes follow the mass, ties to the smaller class") {
  std::vector<std::unique_ptr<Model>> members;
  members.push_back(constant_model(2));
  members.push_back(constant_model(1));
  members.push_back(constant_model(1));
  std::unique_ptr<EnsembleModel> ens =
      weighted_aggregate(std::move(members), {0.6, 0.2, 0.2});
  CHECK(ens->predict(rv({0.0})) == 2);
  std::vector<double> mass = ens->vote_distribution(rv({0.0}));
  CHECK(mass[0] == doctest::Approx(0.4));
  CHECK(mass[1] == doctest::Approx(0.6));
  CHECK(mass[0] + mass[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ens->value(rv({0.0})) == doctest::Approx(0.6 * 2 + 0.4 * 1));

  std::vector<std::unique_ptr<Model>> pair;
  pair.push_back(constant_model(2));
  pair.push_back(constant_model(1));
  std::unique_ptr<EnsembleModel> even =
      weighted_aggregate(std::move(pair), {0.5, 0.5});
  CHECK(even->predict(rv({0.0})) == 1);
}

TEST_CASE("non-convex weights are rejected outright") {
  auto build = [](std::vector<double> w) {
    std::vector<std::unique_ptr<Model>> members;
    for (size_t i = 0; i < w.size(); ++i) members.push_back(constant_model(1));
    return weighted_aggregate(std::move(members), w);
  };
  CHECK_THROWS_AS(build({0.5, 0.4}), Error);   // sums to 0.9, not renormalized
  CHECK_THROWS_AS(build({1.2, -0.2}), Error);  // negative entry
  CHECK(build({0.5, 0.25, 0.25, 0.0})->members.size() == 4);  // zero is fine
  CHECK(build({0.25, 0.25, 0.25, 0.25})->members.size() == 4);

  std::vector<std::unique_ptr<Model>> members;
  members.push_back(constant_model(1));
  CHECK_THROWS_AS(weighted_aggregate(std::move(members), {0.5, 0.5}), Error);
}

TEST_CASE("bagging is deterministic in (spec, data, B, seed)") {
  Dataset ds = testutil::blobs(15, 3, 1.5, 103);
  LearnerSpec spec = LearnerSpec::parse("tree(max_depth=4, min_leaf=2)");
  std::unique_ptr<EnsembleModel> a = bag(spec, ds, 8, 11);
  std::unique_ptr<EnsembleModel> b = bag(spec, ds, 8, 11);
  CHECK(a->to_json().dump() == b->to_json().dump());
  std::unique_ptr<EnsembleModel> c = bag(spec, ds, 8, 12);
  CHECK(a->to_json().dump() != c->to_json().dump());
}

TEST_CASE("feature subsampling records the chosen columns") {
  Dataset ds = testutil::blobs(15, 5, 2.0, 105);
  LearnerSpec spec = LearnerSpec::parse("tree(max_depth=3, min_leaf=2)");
  std::unique_ptr<EnsembleModel> ens = bag(spec, ds, 6, 13, 2);
  REQUIRE(ens->member_cols.size() == 6);
  bool varied = false;
  for (const std::vector<int> &cols : ens->member_cols) {
    REQUIRE(cols.size() == 2);
    CHECK(cols[0] < cols[1]);  // stored sorted
    CHECK(cols[1] < 5);
    CHECK(cols[0] >= 0);
    if (cols != ens->member_cols[0]) varied = true;
  }
  CHECK(varied);
  CHECK(ens->members[0]->n_features() == 2);
  CHECK(ens->n_features() == 5);  // the ensemble still takes full-width rows
  RandomStream rs(14);
  for (int t = 0; t < 20; ++t) {
    Eigen::RowVectorXd x(5);
    for (int j = 0; j < 5; ++j) x[j] = 2.0 * rs.normal();
    int label = ens->predict(x);
    CHECK((label == 1 || label == 2));
  }
}

TEST_CASE("member failures name the offending draw") {
  Eigen::MatrixXd X(6, 1);
  X << 1, 2, 3, 4, 5, 6;
  Dataset three = testutil::make_ds(X, {1, 2, 3, 1, 2, 3});
  try {
    bag(LearnerSpec::parse("svm"), three, 2, 7);
    FAIL_CHECK("expected member failure");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("bag: member") != std::string::npos);
  }
}

TEST_CASE("vote distributions stay normalized on real ensembles") {
  Dataset ds = testutil::blobs(10, 2, 1.0, 107);
  std::unique_ptr<EnsembleModel> ens =
      bag(LearnerSpec::parse("tree(min_leaf=2)"), ds, 9, 15);
  RandomStream rs(16);
  for (int t = 0; t < 25; ++t) {
    Eigen::RowVectorXd x = rv({2.0 * rs.normal(), 2.0 * rs.normal()});
    std::vector<double> mass = ens->vote_distribution(x);
    double sum = 0.0;
    for (double v : mass) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    Prediction pr = ens->predict_full(x);
    int arg = 0;
    for (size_t c = 1; c < mass.size(); ++c)
      if (mass[c] > mass[arg]) arg = static_cast<int>(c);
    CHECK(pr.label == arg + 1);
  }
}

TEST_CASE("models survive JSON round-trips") {
  Dataset ds = testutil::blobs(10, 3, 1.5, 109);
  std::unique_ptr<EnsembleModel> ens =
      bag(LearnerSpec::parse("tree(max_depth=3, min_leaf=2)"), ds, 5, 17, 2);
  std::unique_ptr<Model> back = model_from_json(ens->to_json());
  CHECK(back->method() == "ensemble");
  RandomStream rs(18);
  for (int t = 0; t < 25; ++t) {
    Eigen::RowVectorXd x = rv({rs.normal(), rs.normal(), rs.normal()});
    CHECK(back->predict(x) == ens->predict(x));
  }
}
