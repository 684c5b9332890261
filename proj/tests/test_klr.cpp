#include <cmath>

#include "bigtax/errors.hpp"
#include "bigtax/kernels.hpp"
#include "bigtax/learner.hpp"
#include "bigtax/learners.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bigtax;
using testutil::rv;

TEST_CASE("fitted values obey the representer expansion exactly") {
  Dataset ds = testutil::blobs(10, 2, 2.0, 91);
  KlrOptions opt;
  opt.kernel = KernelSpec::parse("rbf(tau=1)");
  opt.lambda = 0.1;
  std::unique_ptr<KlrModel> m = fit_klr(ds, opt);
  CHECK(m->converged());
  GramMatrix g = gram(opt.kernel, ds.X);
  Eigen::VectorXd fitted = (g.K * m->w).array() + m->v;
  for (int i = 0; i < ds.n(); ++i)
    CHECK(std::abs(m->g_value(ds.X.row(i)) - fitted[i]) < 1e-10);
}

TEST_CASE("two mirrored points give an antisymmetric score") {
  Eigen::MatrixXd X(2, 1);
  X << -1, 1;
  Dataset ds = testutil::make_ds(X, {1, 2});
  KlrOptions opt;
  opt.kernel = KernelSpec::parse("rbf(tau=1)");
  opt.lambda = 0.1;
  std::unique_ptr<KlrModel> m = fit_klr(ds, opt);
  CHECK(std::abs(m->v) < 1e-6);
  CHECK(m->g_value(rv({1.0})) == doctest::Approx(-m->g_value(rv({-1.0}))));
  CHECK(m->g_value(rv({1.0})) > 0.0);
  CHECK(m->predict(rv({0.9})) == 2);
  CHECK(m->predict(rv({-0.9})) == 1);
  Prediction pr = m->predict_full(rv({0.0}));
  CHECK(pr.scores[1] == doctest::Approx(0.5));
  CHECK(pr.label == 2);  // probability exactly one half rounds up
}

TEST_CASE("an rbf kernel linearizes XOR") {
  Dataset ds = testutil::xor_ds(3, 0.05, 93);
  KlrOptions opt;
  opt.kernel = KernelSpec::parse("rbf(tau=0.5)");
  opt.lambda = 1e-3;
  std::unique_ptr<KlrModel> m = fit_klr(ds, opt);
  for (int i = 0; i < ds.n(); ++i)
    CHECK(m->predict(ds.X.row(i)) == ds.labels[i]);
}

TEST_CASE("a crushing penalty leaves only the prior probability") {
  Dataset ds = testutil::blobs(8, 2, 2.0, 95);  // balanced
  KlrOptions opt;
  opt.kernel = KernelSpec::parse("rbf(tau=1)");
  opt.lambda = 1e6;
  std::unique_ptr<KlrModel> m = fit_klr(ds, opt);
  for (int i = 0; i < ds.n(); ++i) {
    Prediction pr = m->predict_full(ds.X.row(i));
    CHECK(pr.scores[1] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(pr.label == (pr.scores[1] >= 0.5 ? 2 : 1));
  }
}

TEST_CASE("hyperparameters and class structure are validated") {
  Dataset ds = testutil::blobs(5, 1, 1.0, 96);
  KlrOptions bad;
  bad.kernel = KernelSpec::parse("rbf(tau=1)");
  bad.lambda = 0.0;
  CHECK_THROWS_AS(fit_klr(ds, bad), Error);
  Eigen::MatrixXd X(6, 1);
  X << 1, 2, 3, 4, 5, 6;
  Dataset three = testutil::make_ds(X, {1, 2, 3, 1, 2, 3});
  KlrOptions opt;
  opt.kernel = KernelSpec::parse("rbf(tau=1)");
  try {
    fit_klr(three, opt);
    FAIL_CHECK("expected unsupported");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::unsupported);
  }
}

TEST_CASE("models survive JSON round-trips") {
  Dataset ds = testutil::blobs(8, 2, 1.5, 97);
  KlrOptions opt;
  opt.kernel = KernelSpec::parse("laplace(tau=2)");
  opt.lambda = 0.05;
  std::unique_ptr<KlrModel> m = fit_klr(ds, opt);
  std::unique_ptr<Model> back = model_from_json(m->to_json());
  CHECK(back->method() == "klr");
  RandomStream rs(98);
  for (int t = 0; t < 25; ++t) {
    Eigen::RowVectorXd x = rv({2.0 * rs.normal(), 2.0 * rs.normal()});
    CHECK(back->predict(x) == m->predict(x));
    Prediction a = m->predict_full(x), b = back->predict_full(x);
    CHECK(a.scores[1] == doctest::Approx(b.scores[1]));
  }
}
