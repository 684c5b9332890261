#include <algorithm>
#include <cmath>
#include <vector>

#include "bigtax/errors.hpp"
#include "bigtax/learners.hpp"

namespace bigtax {

namespace {

Eigen::VectorXd signed_labels(const Dataset &ds) {
  Eigen::VectorXd y(ds.n());
  for (int i = 0; i < ds.n(); ++i) y[i] = ds.labels[i] == 1 ? -1.0 : 1.0;
  return y;
}

double primal_objective(const Eigen::MatrixXd &Xt, const Eigen::VectorXd &y,
                        double lambda, const Eigen::VectorXd &theta) {
  Eigen::VectorXd eta = Xt * theta;
  double hinge = 0.0;
  for (int i = 0; i < eta.size(); ++i)
    hinge += std::max(0.0, 1.0 - y[i] * eta[i]);
  return hinge / eta.size() + 0.5 * lambda * theta.squaredNorm();
}

// pairwise-distance lower median, for bandwidth selection
double median_pairwise(const Eigen::MatrixXd &X, bool manhattan) {
  int n = static_cast<int>(X.rows());
  if (n < 2)
    fail(ErrorCode::invalid_argument, "svm: need >= 2 rows for an automatic tau");
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      d.push_back(manhattan ? (X.row(i) - X.row(j)).lpNorm<1>()
                            : (X.row(i) - X.row(j)).norm());
  std::size_t mid = (d.size() - 1) / 2;
  std::nth_element(d.begin(), d.begin() + mid, d.end());
  return d[mid];
}

void fit_linear(const Dataset &ds, const Eigen::VectorXd &y, SvmModel &m,
                const SvmOptions &opt) {
  int n = ds.n(), p = ds.p();
  Eigen::MatrixXd Xt(n, p + 1);
  Xt.col(0).setOnes();
  Xt.rightCols(p) = ds.X;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd avg = theta;
  int avg_count = 1;
  Eigen::VectorXd best = theta;
  double best_obj = primal_objective(Xt, y, opt.lambda, theta);
  m.objective_trace.clear();
  m.objective_trace.push_back(best_obj);

  double half_obj = best_obj;
  for (int t = 1; t <= opt.max_iter; ++t) {
    Eigen::VectorXd sub = opt.lambda * theta;
    Eigen::VectorXd eta = Xt * theta;
    for (int i = 0; i < n; ++i)
      if (y[i] * eta[i] < 1.0) sub.noalias() -= (y[i] / n) * Xt.row(i).transpose();
    theta -= sub / (opt.lambda * t);

    // restart the running average at powers of two, so the candidate is
    // always a suffix average covering at least the trailing half
    if ((t & (t - 1)) == 0) {
      avg = theta;
      avg_count = 1;
    } else {
      ++avg_count;
      avg += (theta - avg) / avg_count;
    }
    double obj = primal_objective(Xt, y, opt.lambda, avg);
    if (obj < best_obj) {
      best_obj = obj;
      best = avg;
    }
    m.objective_trace.push_back(best_obj);
    if (t == opt.max_iter / 2) half_obj = best_obj;
  }
  m.converged_ = half_obj - best_obj <= 1e-6 * std::max(1.0, best_obj);
  m.beta0 = best[0];
  m.beta = best.tail(p);
}

struct Smo {
  const Eigen::MatrixXd &K;
  const Eigen::VectorXd &y;
  double C, tol;
  Eigen::VectorXd alpha, E;  // E_i = f(x_i) - y_i
  double b = 0.0;
  int n;

  Smo(const Eigen::MatrixXd &K_, const Eigen::VectorXd &y_, double C_, double tol_)
      : K(K_), y(y_), C(C_), tol(tol_), n(static_cast<int>(y_.size())) {
    alpha = Eigen::VectorXd::Zero(n);
    E = -y;  // f == 0 at the start
  }

  bool free_mult(int i) const { return alpha[i] > 1e-8 && alpha[i] < C - 1e-8; }

  bool take_step(int i1, int i2) {
    if (i1 == i2) return false;
    double a1 = alpha[i1], a2 = alpha[i2];
    double y1 = y[i1], y2 = y[i2], s = y1 * y2;
    double L, H;
    if (s < 0) {
      L = std::max(0.0, a2 - a1);
      H = std::min(C, C + a2 - a1);
    } else {
      L = std::max(0.0, a1 + a2 - C);
      H = std::min(C, a1 + a2);
    }
    if (L >= H) return false;
    double E1 = E[i1], E2 = E[i2];
    double k11 = K(i1, i1), k22 = K(i2, i2), k12 = K(i1, i2);
    double eta = k11 + k22 - 2.0 * k12;
    double a2new;
    if (eta > 1e-12) {
      a2new = std::clamp(a2 + y2 * (E1 - E2) / eta, L, H);
    } else {
      // flat or concave direction: evaluate the dual gain at both ends
      auto gain = [&](double cand) {
        double d2 = cand - a2, d1 = -s * d2;
        return d1 + d2 - d1 * y1 * (E1 + y1 - b) - d2 * y2 * (E2 + y2 - b) -
               0.5 * d1 * d1 * k11 - 0.5 * d2 * d2 * k22 - s * d1 * d2 * k12;
      };
      double gl = gain(L), gh = gain(H);
      if (gl > gh + 1e-12)
        a2new = L;
      else if (gh > gl + 1e-12)
        a2new = H;
      else
        return false;
    }
    if (std::abs(a2new - a2) < 1e-12 * (a2new + a2 + 1e-12)) return false;
    double a1new = std::clamp(a1 + s * (a2 - a2new), 0.0, C);

    double d1 = y1 * (a1new - a1), d2 = y2 * (a2new - a2);
    double b1 = b - E1 - d1 * k11 - d2 * k12;
    double b2 = b - E2 - d1 * k12 - d2 * k22;
    double bnew;
    if (a1new > 1e-8 && a1new < C - 1e-8)
      bnew = b1;
    else if (a2new > 1e-8 && a2new < C - 1e-8)
      bnew = b2;
    else
      bnew = 0.5 * (b1 + b2);

    E += d1 * K.col(i1) + d2 * K.col(i2);
    E.array() += bnew - b;
    alpha[i1] = a1new;
    alpha[i2] = a2new;
    b = bnew;
    return true;
  }

  int examine(int i2) {
    double r2 = E[i2] * y[i2];
    bool violated = (r2 < -tol && alpha[i2] < C) || (r2 > tol && alpha[i2] > 0);
    if (!violated) return 0;
    int best = -1;
    double gap = -1.0;
    for (int i = 0; i < n; ++i)
      if (free_mult(i) && std::abs(E[i] - E[i2]) > gap) {
        gap = std::abs(E[i] - E[i2]);
        best = i;
      }
    if (best >= 0 && take_step(best, i2)) return 1;
    for (int i = 0; i < n; ++i)
      if (free_mult(i) && take_step(i, i2)) return 1;
    for (int i = 0; i < n; ++i)
      if (take_step(i, i2)) return 1;
    return 0;
  }

  bool solve(int max_epochs) {
    int changed = 0;
    bool examine_all = true;
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
      changed = 0;
      for (int i = 0; i < n; ++i)
        if (examine_all || free_mult(i)) changed += examine(i);
      if (examine_all) {
        if (changed == 0) return true;
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    return false;
  }
};

void fit_kernel(const Dataset &ds, const Eigen::VectorXd &y, SvmModel &m,
                const SvmOptions &opt) {
  int n = ds.n();
  KernelSpec spec = opt.kernel;
  if (opt.tau_auto &&
      (spec.kind == KernelSpec::Kind::rbf || spec.kind == KernelSpec::Kind::laplace)) {
    double med = median_pairwise(ds.X, spec.kind == KernelSpec::Kind::laplace);
    if (!(med > 0.0))
      fail(ErrorCode::invalid_argument,
           "svm: automatic tau failed (median pairwise distance is 0)");
    spec.tau = opt.tau_scale * med;
  }
  m.kernel = spec;
  m.C = 1.0 / (n * opt.lambda);

  Eigen::MatrixXd K = gram(spec, ds.X).K;
  Smo smo(K, y, m.C, opt.kkt_tol);
  m.converged_ = smo.solve(1000);
  m.bias = smo.b;
  for (int i = 0; i < n; ++i)
    if (smo.alpha[i] > 1e-8) {
      m.sv_alpha.conservativeResize(m.sv_alpha.size() + 1);
      m.sv_alpha[m.sv_alpha.size() - 1] = smo.alpha[i];
      m.sv_y.push_back(y[i]);
      m.sv_X.conservativeResize(m.sv_X.rows() + 1, ds.p());
      m.sv_X.row(m.sv_X.rows() - 1) = ds.X.row(i);
    }
}

}  // namespace

std::unique_ptr<SvmModel> fit_svm(const Dataset &ds, const SvmOptions &opt) {
  if (!ds.all_numeric())
    fail(ErrorCode::invalid_argument, "svm: all columns must be numeric");
  ds.require_complete("svm");
  if (ds.g != 2)
    fail(ErrorCode::unsupported,
         "svm: needs exactly 2 classes, got " + std::to_string(ds.g));
  if (!(opt.lambda > 0.0))
    fail(ErrorCode::invalid_argument, "svm: lambda must be > 0");

  Eigen::VectorXd y = signed_labels(ds);
  auto m = std::make_unique<SvmModel>();
  m->linear_form = opt.linear;
  m->lambda = opt.lambda;
  m->p_ = ds.p();
  if (opt.linear) {
    m->sv_X.resize(0, ds.p());
    fit_linear(ds, y, *m, opt);
  } else {
    m->sv_X.resize(0, ds.p());
    fit_kernel(ds, y, *m, opt);
  }
  return m;
}

double SvmModel::decision_value(const Eigen::RowVectorXd &x) const {
  check_dims(x);
  if (linear_form) return beta0 + x.dot(beta);
  double f = bias;
  for (int i = 0; i < sv_X.rows(); ++i)
    f += sv_alpha[i] * sv_y[i] * kernel_eval(kernel, x, sv_X.row(i));
  return f;
}

Prediction SvmModel::predict_full(const Eigen::RowVectorXd &x) const {
  double d = decision_value(x);
  Prediction pr;
  pr.label = d >= 0.0 ? 2 : 1;
  pr.scores = {d};
  return pr;
}

nlohmann::json SvmModel::to_json() const {
  nlohmann::json j{{"method", "svm"},
                   {"format_version", 1},
                   {"form", linear_form ? "linear" : "kernel"},
                   {"p", p_},
                   {"lambda", lambda},
                   {"converged", converged_}};
  if (linear_form) {
    j["beta0"] = beta0;
    j["beta"] = vec_to_json(beta);
  } else {
    j["kernel"] = kernel.to_string();
    j["C"] = C;
    j["bias"] = bias;
    j["sv_alpha"] = vec_to_json(sv_alpha);
    j["sv_y"] = sv_y;
    j["sv_X"] = mat_to_json(sv_X);
  }
  return j;
}

std::unique_ptr<SvmModel> SvmModel::from_json(const nlohmann::json &j) {
  auto m = std::make_unique<SvmModel>();
  m->linear_form = j.at("form").get<std::string>() == "linear";
  m->p_ = j.at("p").get<int>();
  m->lambda = j.at("lambda").get<double>();
  m->converged_ = j.at("converged").get<bool>();
  if (m->linear_form) {
    m->beta0 = j.at("beta0").get<double>();
    m->beta = vec_from_json(j.at("beta"));
  } else {
    m->kernel = KernelSpec::parse(j.at("kernel").get<std::string>());
    m->C = j.at("C").get<double>();
    m->bias = j.at("bias").get<double>();
    m->sv_alpha = vec_from_json(j.at("sv_alpha"));
    m->sv_y = j.at("sv_y").get<std::vector<double>>();
    m->sv_X = mat_from_json(j.at("sv_X"));
  }
  return m;
}

}  // namespace bigtax
