#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bigtax/dataset.hpp"
#include "bigtax/learner.hpp"

namespace bigtax {

enum class EnsembleTask { classification, regression };

class EnsembleModel : public Model {
 public:
  std::vector<std::unique_ptr<Model>> members;
  std::vector<double> weights;                 // convex
  std::vector<std::vector<int>> member_cols;   // feature subset per member; empty = all
  EnsembleTask task = EnsembleTask::classification;
  std::uint64_t seed = 0;
  std::string base_text;  // member spec, for reports
  int g = 2, p = 0;

  std::string method() const override { return "ensemble"; }
  int n_features() const override { return p; }
  int n_classes() const override { return g; }
  Prediction predict_full(const Eigen::RowVectorXd &x) const override;
  double value(const Eigen::RowVectorXd &x) const override;
  // per-class weight mass behind each label (classification)
  std::vector<double> vote_distribution(const Eigen::RowVectorXd &x) const;
  nlohmann::json to_json() const override;
  static std::unique_ptr<EnsembleModel> from_json(const nlohmann::json &j);
};

// size-n bootstrap per member, streams keyed by (seed, b); feature_subsample
// additionally draws that many columns per member (random-forest stand-in)
std::unique_ptr<EnsembleModel> bag(const LearnerSpec &spec, const Dataset &ds,
                                   int B, std::uint64_t seed,
                                   int feature_subsample = 0,
                                   EnsembleTask task = EnsembleTask::classification);

std::unique_ptr<EnsembleModel> weighted_aggregate(
    std::vector<std::unique_ptr<Model>> members, const std::vector<double> &weights,
    EnsembleTask task = EnsembleTask::classification);

}  // namespace bigtax
