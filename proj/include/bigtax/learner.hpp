#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bigtax/dataset.hpp"
#include "bigtax/specstring.hpp"
#include "json.hpp"

namespace bigtax {

struct Prediction {
  int label = 0;                // 1..g
  std::vector<double> scores;   // per-class where defined, else decision values
};

// common face of every fitted classifier
class Model {
 public:
  virtual ~Model() = default;
  virtual std::string method() const = 0;
  virtual int n_features() const = 0;
  virtual int n_classes() const = 0;
  virtual Prediction predict_full(const Eigen::RowVectorXd &x) const = 0;
  virtual bool converged() const { return true; }
  virtual nlohmann::json to_json() const = 0;

  int predict(const Eigen::RowVectorXd &x) const { return predict_full(x).label; }
  // regression view for aggregation: numeric label by default
  virtual double value(const Eigen::RowVectorXd &x) const {
    return static_cast<double>(predict(x));
  }

 protected:
  void check_dims(const Eigen::RowVectorXd &x) const;
};

// method name + hyperparameters in the config mini-language, e.g.
// "lda", "knn(k=5)", "svm(kernel=rbf(tau=2),lambda=0.01)", "tree(max_depth=4)"
struct LearnerSpec {
  std::string text;
  SpecNode node;
  static LearnerSpec parse(const std::string &text);
};

// dispatch a spec to the right fitter; seed feeds bagging-style specs only
std::unique_ptr<Model> fit_spec(const LearnerSpec &spec, const Dataset &ds,
                                std::uint64_t seed = 0);
// methods that only handle two classes (used to pre-validate benchmark pairs)
bool binary_only(const std::string &method_name);

std::unique_ptr<Model> model_from_json(const nlohmann::json &j);
std::unique_ptr<Model> load_model(const std::string &path);
void save_model(const Model &m, const std::string &path);

// risk of the optimal rule for two equal-covariance Gaussians
double bayes_risk(const Eigen::VectorXd &mu0, const Eigen::VectorXd &mu1,
                  const Eigen::MatrixXd &sigma);

// standard normal CDF at high accuracy
double normal_cdf(double x);

// matrix/vector <-> JSON (row-major nested arrays)
nlohmann::json mat_to_json(const Eigen::MatrixXd &m);
Eigen::MatrixXd mat_from_json(const nlohmann::json &j);
nlohmann::json vec_to_json(const Eigen::VectorXd &v);
Eigen::VectorXd vec_from_json(const nlohmann::json &j);

}  // namespace bigtax
