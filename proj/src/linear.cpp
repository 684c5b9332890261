#include <cmath>

#include "bigtax/errors.hpp"
#include "bigtax/learners.hpp"

namespace bigtax {

namespace {

double log1pexp(double z) {  // log(1 + e^z), overflow-safe
  if (z > 35.0) return z;
  if (z < -35.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd signed_labels(const Dataset &ds) {
  Eigen::VectorXd y(ds.n());
  for (int i = 0; i < ds.n(); ++i) y[i] = ds.labels[i] == 1 ? -1.0 : 1.0;
  return y;
}

void check_binary_numeric(const Dataset &ds, const char *who) {
  if (!ds.all_numeric())
    fail(ErrorCode::invalid_argument, std::string(who) + ": all columns must be numeric");
  ds.require_complete(who);
  if (ds.g != 2)
    fail(ErrorCode::unsupported,
         std::string(who) + ": needs exactly 2 classes, got " + std::to_string(ds.g));
  std::vector<int> counts = ds.class_counts();
  if (counts[0] == 0 || counts[1] == 0)
    fail(ErrorCode::invalid_argument, std::string(who) + ": a class has no rows");
}

double penalized_objective(const Dataset &ds, const Eigen::VectorXd &y,
                           double beta0, const Eigen::VectorXd &beta,
                           double lambda, bool pen_intercept) {
  Eigen::VectorXd eta = (ds.X * beta).array() + beta0;
  double risk = 0.0;
  for (int i = 0; i < ds.n(); ++i) risk += log1pexp(-y[i] * eta[i]);
  risk /= ds.n();
  double pen = lambda * beta.lpNorm<1>();
  if (pen_intercept) pen += lambda * std::abs(beta0);
  return risk + pen;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

void fit_newton(const Dataset &ds, const Eigen::VectorXd &y, LogisticModel &m,
                const LogisticOptions &opt) {
  int n = ds.n(), p = ds.p();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p + 1);  // [beta0, beta]
  Eigen::MatrixXd Xt(n, p + 1);
  Xt.col(0).setOnes();
  Xt.rightCols(p) = ds.X;

  auto risk_at = [&](const Eigen::VectorXd &bb) {
    Eigen::VectorXd eta = Xt * bb;
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += log1pexp(-y[i] * eta[i]);
    return r / n;
  };

  double risk = risk_at(b);
  m.converged_ = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    Eigen::VectorXd eta = Xt * b;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p + 1);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
      double s = sigmoid(-y[i] * eta[i]);  // d/deta of log1pexp(-y eta) is -y*s
      grad.noalias() += (-y[i] * s) * Xt.row(i).transpose();
      double mu = sigmoid(eta[i]);
      w[i] = std::max(mu * (1.0 - mu), 1e-10);
    }
    grad /= n;
    Eigen::MatrixXd H = Xt.transpose() * w.asDiagonal() * Xt / n;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd step = ldlt.solve(-grad);
    if (!step.allFinite())
      fail(ErrorCode::singular, "logistic: Newton system is singular");

    // backtrack on objective increase (guards quasi-separation)
    double t = 1.0, next = risk_at(b + step);
    while (next > risk && t > 1e-8) {
      t *= 0.5;
      next = risk_at(b + t * step);
    }
    b += t * step;
    double drop = risk - next;
    risk = next;
    if (b.norm() > 1e6) break;  // separated data: estimates diverge
    if (drop >= 0.0 && drop <= opt.tol * std::max(1.0, std::abs(risk))) {
      m.converged_ = true;
      break;
    }
  }
  m.beta0 = b[0];
  m.beta = b.tail(p);
}

void fit_lasso_cd(const Dataset &ds, const Eigen::VectorXd &y, LogisticModel &m,
                  const LogisticOptions &opt) {
  int n = ds.n(), p = ds.p();
  double beta0 = 0.0;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double obj = penalized_objective(ds, y, beta0, beta, opt.lambda,
                                   opt.penalize_intercept);
  m.converged_ = false;
  for (int outer = 0; outer < opt.max_iter; ++outer) {
    // quadratic approximation at the current iterate
    Eigen::VectorXd eta = (ds.X * beta).array() + beta0;
    Eigen::VectorXd w(n), z(n);
    for (int i = 0; i < n; ++i) {
      double mu = sigmoid(eta[i]);
      double t = y[i] > 0 ? 1.0 : 0.0;
      w[i] = std::max(mu * (1.0 - mu), 1e-5);
      z[i] = eta[i] + (t - mu) / w[i];
    }
    Eigen::VectorXd resid = z - eta;

    for (int sweep = 0; sweep < 1000; ++sweep) {
      double delta = 0.0;
      {  // intercept coordinate
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
          num += w[i] * (resid[i] + beta0);
          den += w[i];
        }
        num /= n;
        den /= n;
        double nb = opt.penalize_intercept
                        ? soft_threshold(num, opt.lambda) / den
                        : num / den;
        if (nb != beta0) {
          resid.array() += beta0 - nb;
          delta = std::max(delta, std::abs(nb - beta0));
          beta0 = nb;
        }
      }
      for (int j = 0; j < p; ++j) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
          double xij = ds.X(i, j);
          num += w[i] * xij * (resid[i] + xij * beta[j]);
          den += w[i] * xij * xij;
        }
        num /= n;
        den /= n;
        if (den <= 0.0) continue;
        double nb = soft_threshold(num, opt.lambda) / den;
        if (nb != beta[j]) {
          resid += ds.X.col(j) * (beta[j] - nb);
          delta = std::max(delta, std::abs(nb - beta[j]));
          beta[j] = nb;
        }
      }
      if (delta < opt.cd_tol) break;
    }

    double next = penalized_objective(ds, y, beta0, beta, opt.lambda,
                                      opt.penalize_intercept);
    double drop = std::abs(obj - next);
    obj = next;
    if (drop <= opt.tol * std::max(1.0, std::abs(obj))) {
      m.converged_ = true;
      break;
    }
  }
  m.beta0 = beta0;
  m.beta = beta;
}

}  // namespace

std::unique_ptr<LogisticModel> fit_logistic(const Dataset &ds,
                                            const LogisticOptions &opt) {
  check_binary_numeric(ds, opt.lasso ? "logistic_l1" : "logistic");
  if (opt.lasso && opt.lambda < 0.0)
    fail(ErrorCode::invalid_argument, "logistic_l1: lambda must be >= 0");
  Eigen::VectorXd y = signed_labels(ds);
  auto m = std::make_unique<LogisticModel>();
  m->lasso = opt.lasso;
  m->lambda = opt.lasso ? opt.lambda : 0.0;
  if (opt.lasso)
    fit_lasso_cd(ds, y, *m, opt);
  else
    fit_newton(ds, y, *m, opt);
  return m;
}

double logistic_risk(const Dataset &ds, double beta0, const Eigen::VectorXd &beta) {
  Eigen::VectorXd y = signed_labels(ds);
  Eigen::VectorXd eta = (ds.X * beta).array() + beta0;
  double r = 0.0;
  for (int i = 0; i < ds.n(); ++i) r += log1pexp(-y[i] * eta[i]);
  return r / ds.n();
}

Eigen::VectorXd logistic_risk_gradient(const Dataset &ds, double beta0,
                                       const Eigen::VectorXd &beta) {
  Eigen::VectorXd y = signed_labels(ds);
  Eigen::VectorXd eta = (ds.X * beta).array() + beta0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(ds.p() + 1);
  for (int i = 0; i < ds.n(); ++i) {
    double s = sigmoid(-y[i] * eta[i]);
    grad[0] += -y[i] * s;
    grad.tail(ds.p()).noalias() += (-y[i] * s) * ds.X.row(i).transpose();
  }
  return grad / ds.n();
}

double LogisticModel::eta(const Eigen::RowVectorXd &x) const {
  check_dims(x);
  return beta0 + x.dot(beta);
}

Prediction LogisticModel::predict_full(const Eigen::RowVectorXd &x) const {
  double prob2 = sigmoid(eta(x));
  Prediction pr;
  pr.label = prob2 >= 0.5 ? 2 : 1;
  pr.scores = {1.0 - prob2, prob2};
  return pr;
}

nlohmann::json LogisticModel::to_json() const {
  return {{"method", lasso ? "logistic_l1" : "logistic"},
          {"format_version", 1},
          {"beta0", beta0},
          {"beta", vec_to_json(beta)},
          {"lambda", lambda},
          {"converged", converged_}};
}

std::unique_ptr<LogisticModel> LogisticModel::from_json(const nlohmann::json &j) {
  auto m = std::make_unique<LogisticModel>();
  m->lasso = j.at("method").get<std::string>() == "logistic_l1";
  m->beta0 = j.at("beta0").get<double>();
  m->beta = vec_from_json(j.at("beta"));
  m->lambda = j.at("lambda").get<double>();
  m->converged_ = j.at("converged").get<bool>();
  return m;
}

}  // namespace bigtax
