#include <cmath>

#include "bigtax/errors.hpp"
#include "bigtax/learners.hpp"

namespace bigtax {

namespace {

double log1pexp(double z) {
  if (z > 35.0) return z;
  if (z < -35.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::unique_ptr<KlrModel> fit_klr(const Dataset &ds, const KlrOptions &opt) {
  if (!ds.all_numeric())
    fail(ErrorCode::invalid_argument, "klr: all columns must be numeric");
  ds.require_complete("klr");
  if (ds.g != 2)
    fail(ErrorCode::unsupported,
         "klr: needs exactly 2 classes, got " + std::to_string(ds.g));
  if (!(opt.lambda > 0.0))
    fail(ErrorCode::invalid_argument, "klr: lambda must be > 0");

  int n = ds.n();
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = ds.labels[i] == 1 ? -1.0 : 1.0;

  Eigen::MatrixXd K = gram(opt.kernel, ds.X).K;
  // jittered copy keeps the Newton system solvable when K is rank-deficient;
  // the objective and gradient always use the exact K
  Eigen::MatrixXd Kj = K + 1e-10 * Eigen::MatrixXd::Identity(n, n);

  double v = 0.0;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);

  auto objective = [&](double vv, const Eigen::VectorXd &ww) {
    Eigen::VectorXd g = (K * ww).array() + vv;
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += log1pexp(-y[i] * g[i]);
    return r / n + 0.5 * opt.lambda * ww.dot(K * ww);
  };

  auto m = std::make_unique<KlrModel>();
  m->converged_ = false;
  double obj = objective(v, w);
  for (int it = 0; it < opt.max_iter; ++it) {
    Eigen::VectorXd g = (K * w).array() + v;
    Eigen::VectorXd q(n), wt(n);
    for (int i = 0; i < n; ++i) {
      q[i] = -y[i] * sigmoid(-y[i] * g[i]) / n;
      double mu = sigmoid(g[i]);
      wt[i] = std::max(mu * (1.0 - mu), 1e-10) / n;
    }
    Eigen::VectorXd grad(n + 1);
    grad[0] = q.sum();
    grad.tail(n) = K * q + opt.lambda * (K * w);

    Eigen::MatrixXd WK = wt.asDiagonal() * Kj;
    Eigen::MatrixXd H(n + 1, n + 1);
    H(0, 0) = wt.sum();
    H.block(0, 1, 1, n) = wt.transpose() * Kj;
    H.block(1, 0, n, 1) = H.block(0, 1, 1, n).transpose();
    H.block(1, 1, n, n) = Kj.transpose() * WK + opt.lambda * Kj;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success)
      fail(ErrorCode::singular, "klr: Newton system is singular");
    Eigen::VectorXd step = ldlt.solve(-grad);
    if (!step.allFinite())
      fail(ErrorCode::singular, "klr: Newton system is singular");

    double t = 1.0;
    double next = objective(v + t * step[0], w + t * step.tail(n));
    while (next > obj && t > 1e-8) {
      t *= 0.5;
      next = objective(v + t * step[0], w + t * step.tail(n));
    }
    v += t * step[0];
    w += t * step.tail(n);
    double drop = obj - next;
    obj = next;
    if (drop >= 0.0 && drop <= opt.tol * std::max(1.0, std::abs(obj))) {
      m->converged_ = true;
      break;
    }
  }

  m->kernel = opt.kernel;
  m->v = v;
  m->w = w;
  m->lambda = opt.lambda;
  m->train_X = ds.X;
  return m;
}

double KlrModel::g_value(const Eigen::RowVectorXd &x) const {
  check_dims(x);
  double g = v;
  for (int j = 0; j < train_X.rows(); ++j)
    g += w[j] * kernel_eval(kernel, x, train_X.row(j));
  return g;
}

Prediction KlrModel::predict_full(const Eigen::RowVectorXd &x) const {
  double prob2 = sigmoid(g_value(x));
  Prediction pr;
  pr.label = prob2 >= 0.5 ? 2 : 1;
  pr.scores = {1.0 - prob2, prob2};
  return pr;
}

nlohmann::json KlrModel::to_json() const {
  return {{"method", "klr"},
          {"format_version", 1},
          {"kernel", kernel.to_string()},
          {"v", v},
          {"w", vec_to_json(w)},
          {"lambda", lambda},
          {"train_X", mat_to_json(train_X)},
          {"converged", converged_}};
}

std::unique_ptr<KlrModel> KlrModel::from_json(const nlohmann::json &j) {
  auto m = std::make_unique<KlrModel>();
  m->kernel = KernelSpec::parse(j.at("kernel").get<std::string>());
  m->v = j.at("v").get<double>();
  m->w = vec_from_json(j.at("w"));
  m->lambda = j.at("lambda").get<double>();
  m->train_X = mat_from_json(j.at("train_X"));
  m->converged_ = j.at("converged").get<bool>();
  return m;
}

}  // namespace bigtax
