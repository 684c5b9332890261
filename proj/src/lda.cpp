#include <cmath>

#include "bigtax/errors.hpp"
#include "bigtax/learners.hpp"

namespace bigtax {

namespace {

const char *reg_name(LdaReg r) {
  switch (r) {
    case LdaReg::none: return "none";
    case LdaReg::convex: return "convex";
    case LdaReg::ridge: return "ridge";
    case LdaReg::scaled: return "scaled";
    case LdaReg::auto_fallback: return "auto";
  }
  return "?";
}

LdaReg reg_from_name(const std::string &s) {
  if (s == "none") return LdaReg::none;
  if (s == "convex") return LdaReg::convex;
  if (s == "ridge") return LdaReg::ridge;
  if (s == "scaled") return LdaReg::scaled;
  if (s == "auto") return LdaReg::auto_fallback;
  fail(ErrorCode::parse, "unknown lda regularization '" + s + "'");
}

std::unique_ptr<LdaModel> fit_lda_resolved(const Dataset &ds, LdaReg reg,
                                           double alpha, double lambda) {
  int n = ds.n(), p = ds.p(), g = ds.g;
  auto model = std::make_unique<LdaModel>();
  model->reg_used = reg;
  model->alpha = alpha;
  model->lambda = lambda;

  std::vector<int> counts = ds.class_counts();
  for (int c = 0; c < g; ++c)
    if (counts[c] < 2)
      fail(ErrorCode::invalid_argument,
           "lda: class " + std::to_string(c + 1) + " has " +
               std::to_string(counts[c]) + " rows (need at least 2)");

  model->priors.resize(g);
  model->means.setZero(g, p);
  for (int i = 0; i < n; ++i) model->means.row(ds.labels[i] - 1) += ds.X.row(i);
  for (int c = 0; c < g; ++c) {
    model->priors[c] = static_cast<double>(counts[c]) / n;
    model->means.row(c) /= static_cast<double>(counts[c]);
  }

  // pooled covariance with the 1/n normalization
  model->sigma.setZero(p, p);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd d = ds.X.row(i) - model->means.row(ds.labels[i] - 1);
    model->sigma.noalias() += d.transpose() * d;
  }
  model->sigma /= static_cast<double>(n);

  switch (reg) {
    case LdaReg::none:
    case LdaReg::auto_fallback:
      model->sigma_reg = model->sigma;
      break;
    case LdaReg::convex:
      if (!(alpha > 0.0 && alpha < 1.0))
        fail(ErrorCode::invalid_argument, "lda: convex alpha must be in (0,1)");
      model->sigma_reg = (1.0 - alpha) * model->sigma +
                         alpha * Eigen::MatrixXd::Identity(p, p);
      break;
    case LdaReg::ridge:
      if (!(lambda > 0.0))
        fail(ErrorCode::invalid_argument, "lda: ridge lambda must be > 0");
      model->sigma_reg = model->sigma + lambda * Eigen::MatrixXd::Identity(p, p);
      break;
    case LdaReg::scaled:
      if (!(lambda > 0.0))
        fail(ErrorCode::invalid_argument, "lda: scaled lambda must be > 0");
      model->sigma_reg = lambda * model->sigma + Eigen::MatrixXd::Identity(p, p);
      break;
  }

  if (reg == LdaReg::none || reg == LdaReg::auto_fallback) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model->sigma_reg);
    if (es.info() != Eigen::Success)
      fail(ErrorCode::singular, "lda: eigensolver failed on pooled covariance");
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo >= 1e12)
      fail(ErrorCode::singular,
           "lda: pooled covariance is numerically singular (condition >= 1e12); "
           "use a regularized form, e.g. reg=convex with alpha in (0,1)");
  }

  Eigen::LLT<Eigen::MatrixXd> llt(model->sigma_reg);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::singular, "lda: regularized covariance is not positive definite");
  model->coef.resize(g, p);
  for (int c = 0; c < g; ++c)
    model->coef.row(c) = llt.solve(model->means.row(c).transpose()).transpose();

  if (g == 2) {
    model->beta = (model->coef.row(1) - model->coef.row(0)).transpose();
    model->beta0 = -0.5 * (model->means.row(1) + model->means.row(0))
                              .dot(model->coef.row(1) - model->coef.row(0)) +
                   std::log(model->priors[1] / model->priors[0]);
  } else {
    model->beta.resize(0);
  }
  return model;
}

}  // namespace

std::unique_ptr<LdaModel> fit_lda(const Dataset &ds, const LdaOptions &opt) {
  if (!ds.all_numeric())
    fail(ErrorCode::invalid_argument, "lda: all columns must be numeric");
  ds.require_complete("lda");
  if (opt.reg == LdaReg::auto_fallback) {
    try {
      return fit_lda_resolved(ds, LdaReg::none, opt.alpha, opt.lambda);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::singular) throw;
      // ill-conditioned pooled covariance: fall back to the convex form
      return fit_lda_resolved(ds, LdaReg::convex, opt.alpha, opt.lambda);
    }
  }
  return fit_lda_resolved(ds, opt.reg, opt.alpha, opt.lambda);
}

Prediction LdaModel::predict_full(const Eigen::RowVectorXd &x) const {
  check_dims(x);
  Prediction pr;
  int g = n_classes();
  pr.scores.resize(g);
  for (int c = 0; c < g; ++c)
    pr.scores[c] = x.dot(coef.row(c)) - 0.5 * means.row(c).dot(coef.row(c)) +
                   std::log(priors[c]);
  pr.label = 1;
  for (int c = 1; c < g; ++c)
    if (pr.scores[c] > pr.scores[pr.label - 1]) pr.label = c + 1;
  return pr;
}

nlohmann::json LdaModel::to_json() const {
  nlohmann::json j{{"method", "lda"},
                   {"format_version", 1},
                   {"g", n_classes()},
                   {"p", n_features()},
                   {"reg", reg_name(reg_used)},
                   {"alpha", alpha},
                   {"lambda", lambda},
                   {"priors", vec_to_json(priors)},
                   {"means", mat_to_json(means)},
                   {"sigma", mat_to_json(sigma)},
                   {"sigma_reg", mat_to_json(sigma_reg)},
                   {"coef", mat_to_json(coef)}};
  if (n_classes() == 2) {
    j["beta0"] = beta0;
    j["beta"] = vec_to_json(beta);
  }
  return j;
}

std::unique_ptr<LdaModel> LdaModel::from_json(const nlohmann::json &j) {
  auto m = std::make_unique<LdaModel>();
  m->reg_used = reg_from_name(j.at("reg").get<std::string>());
  m->alpha = j.at("alpha").get<double>();
  m->lambda = j.at("lambda").get<double>();
  m->priors = vec_from_json(j.at("priors"));
  m->means = mat_from_json(j.at("means"));
  m->sigma = mat_from_json(j.at("sigma"));
  m->sigma_reg = mat_from_json(j.at("sigma_reg"));
  m->coef = mat_from_json(j.at("coef"));
  if (j.contains("beta0")) {
    m->beta0 = j.at("beta0").get<double>();
    m->beta = vec_from_json(j.at("beta"));
  }
  return m;
}

}  // namespace bigtax
