#include "bigtax/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bigtax/ensemble.hpp"
#include "bigtax/errors.hpp"
#include "bigtax/learners.hpp"
#include "bigtax/random.hpp"

namespace bigtax {

void Model::check_dims(const Eigen::RowVectorXd &x) const {
  if (static_cast<int>(x.size()) != n_features())
    fail(ErrorCode::schema_mismatch,
         method() + ": expected " + std::to_string(n_features()) +
             " features, got " + std::to_string(x.size()));
}

LearnerSpec LearnerSpec::parse(const std::string &text) {
  LearnerSpec s;
  s.text = text;
  s.node = parse_spec(text);
  return s;
}

bool binary_only(const std::string &method_name) {
  return method_name == "svm" || method_name == "logistic" ||
         method_name == "logistic_l1" || method_name == "klr";
}

namespace {

DistanceSpec distance_from_node(const SpecNode &node, const char *key) {
  auto nested = node.kv_nodes.find(key);
  if (nested != node.kv_nodes.end()) return DistanceSpec::from_node(nested->second);
  return DistanceSpec::parse(node.str(key, "euclidean"));
}

KernelSpec kernel_from_node(const SpecNode &node, const char *key,
                            const std::string &fallback) {
  auto nested = node.kv_nodes.find(key);
  if (nested != node.kv_nodes.end()) return KernelSpec::from_node(nested->second);
  return KernelSpec::parse(node.str(key, fallback));
}

std::unique_ptr<Model> fit_named(const SpecNode &node, const std::string &text,
                                 const Dataset &ds, std::uint64_t seed);

}  // namespace

std::unique_ptr<Model> fit_spec(const LearnerSpec &spec, const Dataset &ds,
                                std::uint64_t seed) {
  return fit_named(spec.node, spec.text, ds, seed);
}

namespace {

std::unique_ptr<Model> fit_named(const SpecNode &node, const std::string &text,
                                 const Dataset &ds, std::uint64_t seed) {
  const std::string &name = node.name;

  if (name == "lda" || name == "lda_r") {
    LdaOptions opt;
    std::string reg = node.str("reg", name == "lda_r" ? "convex" : "auto");
    if (reg == "none") opt.reg = LdaReg::none;
    else if (reg == "convex") opt.reg = LdaReg::convex;
    else if (reg == "ridge") opt.reg = LdaReg::ridge;
    else if (reg == "scaled") opt.reg = LdaReg::scaled;
    else if (reg == "auto") opt.reg = LdaReg::auto_fallback;
    else fail(ErrorCode::parse, "lda: unknown reg '" + reg + "'");
    opt.alpha = node.num("alpha", 0.1);
    opt.lambda = node.num("lambda", 1.0);
    return fit_lda(ds, opt);
  }

  if (name == "knn") {
    DistanceSpec dist = distance_from_node(node, "distance");
    if (node.has("k")) {
      int k = static_cast<int>(node.integer("k", 0));
      return fit_knn(ds, k, dist);
    }
    bool tune = node.str("select", "") == "loocv" || node.has("kmin") ||
                node.has("kmax") || node.has("kstep");
    if (!tune) return fit_knn(ds, std::min(5, ds.n()), dist);
    // select=loocv: pick k by LOOCV on the training data over a small grid
    int kmin = static_cast<int>(node.integer("kmin", 1));
    int kmax = static_cast<int>(node.integer("kmax", 25));
    int kstep = static_cast<int>(node.integer("kstep", 2));
    std::vector<int> ks;
    for (int k = kmin; k <= kmax && k < ds.n(); k += kstep) ks.push_back(k);
    if (ks.empty()) ks.push_back(1);
    std::vector<double> scores = knn_loocv_scores(ds, ks, dist);
    int best = 0;
    for (size_t i = 1; i < ks.size(); ++i)
      if (scores[i] < scores[best]) best = static_cast<int>(i);
    return fit_knn(ds, ks[best], dist);
  }

  if (name == "svm") {
    SvmOptions opt;
    std::string kern = node.str("kernel", "rbf");
    if (node.kv_nodes.count("kernel") || kern != "linear") {
      opt.linear = false;
      opt.kernel = kernel_from_node(node, "kernel", "rbf");
      bool tau_given = node.kv_nodes.count("kernel") &&
                       node.kv_nodes.at("kernel").has("tau");
      opt.tau_auto = (opt.kernel.kind == KernelSpec::Kind::rbf ||
                      opt.kernel.kind == KernelSpec::Kind::laplace) &&
                     !tau_given;
      opt.tau_scale = node.num("tau_scale", 0.5);
    }
    opt.lambda = node.num("lambda", 1.0 / ds.n());
    opt.max_iter = static_cast<int>(node.integer("max_iter", 5000));
    return fit_svm(ds, opt);
  }

  if (name == "logistic" || name == "logistic_l1") {
    LogisticOptions opt;
    std::string penalty = node.str("penalty", name == "logistic_l1" ? "lasso" : "none");
    if (penalty == "lasso" || node.has("lambda")) {
      opt.lasso = true;
      opt.lambda = node.num("lambda", 1e-4);
    } else if (penalty != "none") {
      fail(ErrorCode::parse, "logistic: unknown penalty '" + penalty + "'");
    }
    std::string pi = node.str("intercept_penalty", "true");
    opt.penalize_intercept = pi != "false" && pi != "0";
    return fit_logistic(ds, opt);
  }

  if (name == "klr") {
    KlrOptions opt;
    opt.kernel = kernel_from_node(node, "kernel", "rbf(tau=1)");
    opt.lambda = node.num("lambda", 0.1);
    return fit_klr(ds, opt);
  }

  if (name == "tree" || name == "cart") {
    TreeOptions opt;
    opt.max_depth = static_cast<int>(node.integer("max_depth", 10));
    opt.min_leaf = static_cast<int>(node.integer("min_leaf", 5));
    return fit_tree(ds, opt);
  }

  if (name == "bag" || name == "rforest") {
    LearnerSpec base_spec;
    auto nested = node.kv_nodes.find("base");
    if (nested != node.kv_nodes.end()) {
      base_spec.node = nested->second;
      base_spec.text = nested->second.to_text();
    } else {
      // scalar args other than bag's own are forwarded to the base learner,
      // so rforest(max_depth=6) configures its trees
      std::string base_text = node.str("base", "tree");
      std::string args;
      for (const auto &[k, v] : node.kv) {
        if (k == "base" || k == "B" || k == "feature_subsample" || k == "m") continue;
        if (!args.empty()) args += ",";
        args += k + "=" + v;
      }
      if (!args.empty()) base_text += "(" + args + ")";
      base_spec = LearnerSpec::parse(base_text);
    }
    int B = static_cast<int>(node.integer("B", 100));
    int m = static_cast<int>(node.integer("feature_subsample", node.integer("m", 0)));
    if (name == "rforest" && m == 0)
      m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(ds.p()))));
    return bag(base_spec, ds, B, seed, m);
  }

  fail(ErrorCode::parse, "unknown method '" + name + "' in '" + text + "'");
}

}  // namespace

std::unique_ptr<Model> model_from_json(const nlohmann::json &j) {
  std::string method = j.at("method").get<std::string>();
  int version = j.value("format_version", 1);
  if (version != 1)
    fail(ErrorCode::parse, "unsupported model format version " +
                               std::to_string(version));
  if (method == "lda") return LdaModel::from_json(j);
  if (method == "knn") return KnnModel::from_json(j);
  if (method == "svm") return SvmModel::from_json(j);
  if (method == "logistic" || method == "logistic_l1")
    return LogisticModel::from_json(j);
  if (method == "klr") return KlrModel::from_json(j);
  if (method == "tree") return TreeModel::from_json(j);
  if (method == "ensemble") return EnsembleModel::from_json(j);
  fail(ErrorCode::parse, "unknown model method '" + method + "'");
}

std::unique_ptr<Model> load_model(const std::string &path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open model '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception &e) {
    fail(ErrorCode::parse, "model '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

void save_model(const Model &m, const std::string &path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write model '" + path + "'");
  out << m.to_json().dump(2) << "\n";
  if (!out) fail(ErrorCode::io, "write failed for '" + path + "'");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

nlohmann::json mat_to_json(const Eigen::MatrixXd &m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd mat_from_json(const nlohmann::json &j) {
  int rows = static_cast<int>(j.size());
  int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  return m;
}

nlohmann::json vec_to_json(const Eigen::VectorXd &v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vec_from_json(const nlohmann::json &j) {
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

double bayes_risk(const Eigen::VectorXd &mu0, const Eigen::VectorXd &mu1,
                  const Eigen::MatrixXd &sigma) {
  if (mu0.size() != mu1.size() || sigma.rows() != sigma.cols() ||
      sigma.rows() != mu0.size())
    fail(ErrorCode::invalid_argument, "bayes_risk: dimension mismatch");
  if (!sigma.isApprox(sigma.transpose(), 1e-10))
    fail(ErrorCode::invalid_argument, "bayes_risk: sigma not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::invalid_argument, "bayes_risk: sigma not positive definite");
  Eigen::VectorXd d = mu1 - mu0;
  double delta = d.dot(llt.solve(d));
  return normal_cdf(-std::sqrt(delta) / 2.0);
}

}  // namespace bigtax
