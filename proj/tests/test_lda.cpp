#include <cmath>

#include "bigtax/errors.hpp"
#include "bigtax/learner.hpp"
#include "bigtax/learners.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bigtax;
using testutil::rv;

namespace {

Dataset hand_example() {
  Eigen::MatrixXd X(6, 1);
  X << -1, 0, 1, 2, 3, 4;
  return testutil::make_ds(X, {1, 1, 1, 2, 2, 2});
}

}  // namespace

TEST_CASE("one-dimensional fit recovers the hand-computed rule") {
  std::unique_ptr<LdaModel> m = fit_lda(hand_example(), {});
  CHECK(m->means(0, 0) == doctest::Approx(0.0));
  CHECK(m->means(1, 0) == doctest::Approx(3.0));
  CHECK(m->sigma(0, 0) == doctest::Approx(2.0 / 3.0));  // pooled, 1/n
  CHECK(m->priors[0] == doctest::Approx(0.5));
  CHECK(m->beta[0] == doctest::Approx(4.5));
  CHECK(m->beta0 == doctest::Approx(-6.75));
  // boundary at 1.5
  CHECK(m->predict(rv({1.49})) == 1);
  CHECK(m->predict(rv({1.51})) == 2);
  CHECK(m->predict(rv({-5})) == 1);
  CHECK(m->predict(rv({10})) == 2);
  CHECK(m->reg_used == LdaReg::none);
  CHECK(m->n_classes() == 2);
}

TEST_CASE("discriminant argmax agrees with the linear rule under equal priors") {
  Dataset ds = testutil::blobs(40, 3, 2.0, 13);
  std::unique_ptr<LdaModel> m = fit_lda(ds, {});
  RandomStream rs(14);
  for (int t = 0; t < 200; ++t) {
    Eigen::RowVectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = 3.0 * rs.normal();
    double lin = m->beta0 + m->beta.dot(x);
    CHECK(m->predict(x) == (lin >= 0.0 ? 2 : 1));
  }
}

TEST_CASE("per-class posterior scores rank like the discriminants") {
  Eigen::MatrixXd X(9, 2);
  X << 0, 0, 0, 1, 1, 0, 5, 5, 5, 6, 6, 5, 0, 5, 1, 5, 0, 6;
  Dataset ds = testutil::make_ds(X, {1, 1, 1, 2, 2, 2, 3, 3, 3});
  std::unique_ptr<LdaModel> m = fit_lda(ds, {});
  CHECK(m->n_classes() == 3);
  for (int i = 0; i < ds.n(); ++i) {
    Prediction pred = m->predict_full(ds.X.row(i));
    CHECK(pred.label == ds.labels[i]);
    int arg = 0;
    for (int c = 1; c < 3; ++c)
      if (pred.scores[c] > pred.scores[arg]) arg = c;
    CHECK(arg + 1 == pred.label);
  }
}

TEST_CASE("singular covariance demands an explicit regularizer") {
  Dataset wide = testutil::blobs(3, 10, 1.0, 3);  // p > n
  try {
    fit_lda(wide, {});
    FAIL_CHECK("expected singular");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::singular);
    CHECK(std::string(e.what()).find("reg=convex") != std::string::npos);
  }

  LdaOptions opt;
  opt.reg = LdaReg::convex;
  opt.alpha = 0.1;
  std::unique_ptr<LdaModel> m = fit_lda(wide, opt);
  CHECK(m->reg_used == LdaReg::convex);
  CHECK(m->sigma_reg != m->sigma);

  opt.reg = LdaReg::ridge;
  opt.lambda = 0.5;
  CHECK(fit_lda(wide, opt)->reg_used == LdaReg::ridge);
  opt.reg = LdaReg::scaled;
  CHECK(fit_lda(wide, opt)->reg_used == LdaReg::scaled);

  LdaOptions fb;
  fb.reg = LdaReg::auto_fallback;
  CHECK(fit_lda(wide, fb)->reg_used == LdaReg::convex);
  CHECK(fit_lda(testutil::blobs(40, 2, 1.0, 3), fb)->reg_used == LdaReg::none);
}

TEST_CASE("regularizer parameters are validated") {
  Dataset ds = testutil::blobs(10, 2, 1.0, 8);
  LdaOptions opt;
  opt.reg = LdaReg::convex;
  opt.alpha = 0.0;
  CHECK_THROWS_AS(fit_lda(ds, opt), Error);
  opt.alpha = 1.0;
  CHECK_THROWS_AS(fit_lda(ds, opt), Error);
  opt.reg = LdaReg::ridge;
  opt.lambda = -1.0;
  CHECK_THROWS_AS(fit_lda(ds, opt), Error);
}

TEST_CASE("degenerate class structure is rejected") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  CHECK_THROWS_AS(fit_lda(testutil::make_ds(X, {1, 1, 2}), {}), Error);  // n_2 = 1
  Eigen::MatrixXd M(4, 1);
  M << 1, 2, 1, 2;
  // identical class clouds still fit (boundary is degenerate but defined)
  Dataset same = testutil::make_ds(M, {1, 1, 2, 2});
  std::unique_ptr<LdaModel> m = fit_lda(same, {});
  CHECK(m->beta[0] == doctest::Approx(0.0));
}

TEST_CASE("models survive JSON round-trips") {
  std::unique_ptr<LdaModel> m = fit_lda(hand_example(), {});
  std::unique_ptr<Model> back = model_from_json(m->to_json());
  CHECK(back->method() == "lda");
  for (double x : {-3.0, 0.0, 1.4, 1.6, 9.0}) {
    Prediction a = m->predict_full(rv({x}));
    Prediction b = back->predict_full(rv({x}));
    CHECK(a.label == b.label);
    CHECK(a.scores[0] == doctest::Approx(b.scores[0]));
  }
}

TEST_CASE("bayes_risk matches the Gaussian formula") {
  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd mu1(2);
  mu1 << std::sqrt(2.0), 0.0;  // Delta = 2
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
  CHECK(bayes_risk(mu0, mu1, sigma) == doctest::Approx(0.23975).epsilon(1e-4));
  CHECK(bayes_risk(mu0, mu0, sigma) == doctest::Approx(0.5));
  mu1 << 2.0, 0.0;  // Delta = 4 -> Phi(-1)
  CHECK(bayes_risk(mu0, mu1, sigma) == doctest::Approx(normal_cdf(-1.0)));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.158655).epsilon(1e-5));
}
