#pragma once

// concrete classifiers; fit_* preconditions are checked and reported as Errors

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "bigtax/dataset.hpp"
#include "bigtax/kernels.hpp"
#include "bigtax/learner.hpp"
#include "bigtax/metrics.hpp"

namespace bigtax {

// ---------------------------------------------------------------- LDA

enum class LdaReg { none, convex, ridge, scaled, auto_fallback };

struct LdaOptions {
  LdaReg reg = LdaReg::none;
  double alpha = 0.1;   // convex weight on I
  double lambda = 1.0;  // ridge / scaled
};

class LdaModel : public Model {
 public:
  Eigen::VectorXd priors;     // g
  Eigen::MatrixXd means;      // g x p
  Eigen::MatrixXd sigma;      // pooled (1/n), unregularized
  Eigen::MatrixXd sigma_reg;  // after regularization (== sigma when none)
  Eigen::MatrixXd coef;       // g x p, row j = sigma_reg^{-1} mu_j
  double beta0 = 0.0;         // g == 2 only
  Eigen::VectorXd beta;
  LdaReg reg_used = LdaReg::none;
  double alpha = 0.0, lambda = 0.0;

  std::string method() const override { return "lda"; }
  int n_features() const override { return static_cast<int>(means.cols()); }
  int n_classes() const override { return static_cast<int>(means.rows()); }
  Prediction predict_full(const Eigen::RowVectorXd &x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<LdaModel> from_json(const nlohmann::json &j);
};

std::unique_ptr<LdaModel> fit_lda(const Dataset &ds, const LdaOptions &opt);

// ---------------------------------------------------------------- kNN

class KnnModel : public Model {
 public:
  int k = 1;
  DistanceSpec spec;
  Eigen::MatrixXd train_X;
  std::vector<int> train_y;
  int g = 2;

  std::string method() const override { return "knn"; }
  int n_features() const override { return static_cast<int>(train_X.cols()); }
  int n_classes() const override { return g; }
  Prediction predict_full(const Eigen::RowVectorXd &x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<KnnModel> from_json(const nlohmann::json &j);
};

std::unique_ptr<KnnModel> fit_knn(const Dataset &ds, int k, const DistanceSpec &spec);

// LOOCV error for each k in ks, sharing one distance matrix; exactly equal to
// refitting per fold (neighbor order is (distance, row index))
std::vector<double> knn_loocv_scores(const Dataset &ds, const std::vector<int> &ks,
                                     const DistanceSpec &spec);

// ---------------------------------------------------------------- SVM

struct SvmOptions {
  bool linear = true;
  KernelSpec kernel;       // used when !linear
  bool tau_auto = false;   // rbf/laplace tau from training data
  double tau_scale = 0.5;  // fraction of the median pairwise distance
  double lambda = 0.01;
  int max_iter = 5000;     // linear subgradient cap
  double kkt_tol = 1e-3;   // SMO stopping tolerance
};

class SvmModel : public Model {
 public:
  bool linear_form = true;
  double lambda = 0.01;
  // linear
  double beta0 = 0.0;
  Eigen::VectorXd beta;
  std::vector<double> objective_trace;  // best-so-far primal objective
  // kernel
  KernelSpec kernel;
  double C = 1.0;
  Eigen::VectorXd sv_alpha;  // > 0 only
  std::vector<double> sv_y;  // -1 / +1
  Eigen::MatrixXd sv_X;
  double bias = 0.0;
  int p_ = 0;
  bool converged_ = true;

  std::string method() const override { return "svm"; }
  int n_features() const override { return p_; }
  int n_classes() const override { return 2; }
  bool converged() const override { return converged_; }
  double decision_value(const Eigen::RowVectorXd &x) const;
  Prediction predict_full(const Eigen::RowVectorXd &x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<SvmModel> from_json(const nlohmann::json &j);
};

std::unique_ptr<SvmModel> fit_svm(const Dataset &ds, const SvmOptions &opt);

// ------------------------------------------------- logistic / LASSO

struct LogisticOptions {
  bool lasso = false;
  double lambda = 0.0;             // lasso penalty
  bool penalize_intercept = true;  // the l1 sum runs from j = 0
  int max_iter = 100;
  double tol = 1e-8;     // Newton relative objective tolerance
  double cd_tol = 1e-7;  // coordinate descent coefficient tolerance
};

class LogisticModel : public Model {
 public:
  double beta0 = 0.0;
  Eigen::VectorXd beta;
  bool lasso = false;
  double lambda = 0.0;
  bool converged_ = true;

  std::string method() const override { return lasso ? "logistic_l1" : "logistic"; }
  int n_features() const override { return static_cast<int>(beta.size()); }
  int n_classes() const override { return 2; }
  bool converged() const override { return converged_; }
  double eta(const Eigen::RowVectorXd &x) const;
  Prediction predict_full(const Eigen::RowVectorXd &x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<LogisticModel> from_json(const nlohmann::json &j);
};

std::unique_ptr<LogisticModel> fit_logistic(const Dataset &ds,
                                            const LogisticOptions &opt);

// empirical risk and gradient of the unpenalized model, for gradient checks
double logistic_risk(const Dataset &ds, double beta0, const Eigen::VectorXd &beta);
Eigen::VectorXd logistic_risk_gradient(const Dataset &ds, double beta0,
                                       const Eigen::VectorXd &beta);

// ---------------------------------------------------------------- KLR

struct KlrOptions {
  KernelSpec kernel;
  double lambda = 0.1;
  int max_iter = 100;
  double tol = 1e-8;
};

class KlrModel : public Model {
 public:
  KernelSpec kernel;
  double v = 0.0;
  Eigen::VectorXd w;  // length n
  double lambda = 0.1;
  Eigen::MatrixXd train_X;
  bool converged_ = true;

  std::string method() const override { return "klr"; }
  int n_features() const override { return static_cast<int>(train_X.cols()); }
  int n_classes() const override { return 2; }
  bool converged() const override { return converged_; }
  double g_value(const Eigen::RowVectorXd &x) const;
  Prediction predict_full(const Eigen::RowVectorXd &x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<KlrModel> from_json(const nlohmann::json &j);
};

std::unique_ptr<KlrModel> fit_klr(const Dataset &ds, const KlrOptions &opt);

// --------------------------------------------------------------- tree

struct TreeOptions {
  int max_depth = 10;
  int min_leaf = 5;
};

class TreeModel : public Model {
 public:
  struct Node {
    bool leaf = true;
    int label = 1;
    std::vector<double> counts;  // class frequencies at the node
    int col = -1;
    bool categorical = false;
    double threshold = 0.0;  // numeric: x <= threshold goes left
    double category = 0.0;   // categorical: x == category goes left
    int left = -1, right = -1;
  };
  std::vector<Node> nodes;  // nodes[0] is the root
  int g = 2, p = 0;
  int leaves = 0;

  std::string method() const override { return "tree"; }
  int n_features() const override { return p; }
  int n_classes() const override { return g; }
  Prediction predict_full(const Eigen::RowVectorXd &x) const override;
  int leaf_index(const Eigen::RowVectorXd &x) const;
  nlohmann::json to_json() const override;
  static std::unique_ptr<TreeModel> from_json(const nlohmann::json &j);
};

std::unique_ptr<TreeModel> fit_tree(const Dataset &ds, const TreeOptions &opt);

}  // namespace bigtax
