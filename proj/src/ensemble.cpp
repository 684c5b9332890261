#include <algorithm>
#include <cmath>

#include "bigtax/ensemble.hpp"
#include "bigtax/errors.hpp"
#include "bigtax/random.hpp"

namespace bigtax {

std::unique_ptr<EnsembleModel> bag(const LearnerSpec &spec, const Dataset &ds,
                                   int B, std::uint64_t seed,
                                   int feature_subsample, EnsembleTask task) {
  if (B < 1) fail(ErrorCode::invalid_argument, "bag: B must be >= 1");
  if (ds.n() < 1) fail(ErrorCode::empty_data, "bag: empty dataset");
  if (feature_subsample < 0 || feature_subsample > ds.p())
    fail(ErrorCode::invalid_argument, "bag: feature_subsample must be in [1, p]");

  auto em = std::make_unique<EnsembleModel>();
  em->task = task;
  em->seed = seed;
  em->base_text = spec.text;
  em->g = ds.g;
  em->p = ds.p();

  int n = ds.n();
  for (int b = 1; b <= B; ++b) {
    RandomStream rs(seed, static_cast<std::uint64_t>(b));
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i)
      idx[i] = static_cast<int>(rs.bounded(static_cast<std::uint64_t>(n)));
    Dataset boot = ds.subset_rows(idx);

    std::vector<int> cols;
    if (feature_subsample > 0) {
      cols = rs.sample_without_replacement(ds.p(), feature_subsample);
      std::sort(cols.begin(), cols.end());
      boot = boot.subset_cols(cols);
    }
    try {
      em->members.push_back(fit_spec(spec, boot, derive_seed(seed, b)));
    } catch (const Error &e) {
      fail(e.code(), "bag: member " + std::to_string(b) + " failed: " + e.what());
    }
    em->member_cols.push_back(std::move(cols));
  }
  em->weights.assign(B, 1.0 / B);
  return em;
}

std::unique_ptr<EnsembleModel> weighted_aggregate(
    std::vector<std::unique_ptr<Model>> members, const std::vector<double> &weights,
    EnsembleTask task) {
  if (members.empty()) fail(ErrorCode::invalid_argument, "aggregate: no members");
  if (weights.size() != members.size())
    fail(ErrorCode::invalid_argument, "aggregate: |weights| != |members|");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) fail(ErrorCode::invalid_argument, "aggregate: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(ErrorCode::invalid_argument,
         "aggregate: weights must sum to 1 (got " + std::to_string(sum) + ")");

  auto em = std::make_unique<EnsembleModel>();
  em->task = task;
  em->p = members.front()->n_features();
  em->g = members.front()->n_classes();
  for (const auto &m : members) {
    if (m->n_features() != em->p)
      fail(ErrorCode::schema_mismatch, "aggregate: member feature counts differ");
    em->g = std::max(em->g, m->n_classes());
  }
  em->base_text = members.front()->method();
  em->members = std::move(members);
  em->weights = weights;
  em->member_cols.assign(em->members.size(), {});
  return em;
}

std::vector<double> EnsembleModel::vote_distribution(const Eigen::RowVectorXd &x) const {
  check_dims(x);
  std::vector<double> mass(g, 0.0);
  for (std::size_t b = 0; b < members.size(); ++b) {
    int label;
    if (member_cols[b].empty()) {
      label = members[b]->predict(x);
    } else {
      Eigen::RowVectorXd sub(member_cols[b].size());
      for (std::size_t j = 0; j < member_cols[b].size(); ++j)
        sub[j] = x[member_cols[b][j]];
      label = members[b]->predict(sub);
    }
    mass[label - 1] += weights[b];
  }
  return mass;
}

Prediction EnsembleModel::predict_full(const Eigen::RowVectorXd &x) const {
  if (task == EnsembleTask::regression) {
    Prediction pr;
    pr.label = static_cast<int>(std::lround(value(x)));
    pr.scores = {value(x)};
    return pr;
  }
  Prediction pr;
  pr.scores = vote_distribution(x);
  pr.label = 1;
  for (int c = 1; c < g; ++c)
    if (pr.scores[c] > pr.scores[pr.label - 1]) pr.label = c + 1;
  return pr;
}

double EnsembleModel::value(const Eigen::RowVectorXd &x) const {
  check_dims(x);
  double out = 0.0;
  for (std::size_t b = 0; b < members.size(); ++b) {
    if (member_cols[b].empty()) {
      out += weights[b] * members[b]->value(x);
    } else {
      Eigen::RowVectorXd sub(member_cols[b].size());
      for (std::size_t j = 0; j < member_cols[b].size(); ++j)
        sub[j] = x[member_cols[b][j]];
      out += weights[b] * members[b]->value(sub);
    }
  }
  return out;
}

nlohmann::json EnsembleModel::to_json() const {
  nlohmann::json marr = nlohmann::json::array();
  for (const auto &m : members) marr.push_back(m->to_json());
  return {{"method", "ensemble"},
          {"format_version", 1},
          {"task", task == EnsembleTask::classification ? "classification" : "regression"},
          {"g", g},
          {"p", p},
          {"seed", seed},
          {"base", base_text},
          {"weights", weights},
          {"member_cols", member_cols},
          {"members", marr}};
}

std::unique_ptr<EnsembleModel> EnsembleModel::from_json(const nlohmann::json &j) {
  auto em = std::make_unique<EnsembleModel>();
  em->task = j.at("task").get<std::string>() == "regression"
                 ? EnsembleTask::regression
                 : EnsembleTask::classification;
  em->g = j.at("g").get<int>();
  em->p = j.at("p").get<int>();
  em->seed = j.at("seed").get<std::uint64_t>();
  em->base_text = j.at("base").get<std::string>();
  em->weights = j.at("weights").get<std::vector<double>>();
  em->member_cols = j.at("member_cols").get<std::vector<std::vector<int>>>();
  for (const auto &mj : j.at("members")) em->members.push_back(model_from_json(mj));
  return em;
}

}  // namespace bigtax
