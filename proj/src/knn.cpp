#include <algorithm>
#include <utility>

#include "bigtax/errors.hpp"
#include "bigtax/learners.hpp"

namespace bigtax {

namespace {

// vote over the k nearest of the (distance, index) pairs, assumed sorted;
// ties go to the smallest class label
int vote(const std::vector<std::pair<double, int>> &order, int k,
         const std::vector<int> &y, int g, std::vector<double> *scores) {
  std::vector<int> counts(g, 0);
  for (int r = 0; r < k; ++r) ++counts[y[order[r].second] - 1];
  int best = 0;
  for (int c = 1; c < g; ++c)
    if (counts[c] > counts[best]) best = c;
  if (scores) {
    scores->resize(g);
    for (int c = 0; c < g; ++c) (*scores)[c] = static_cast<double>(counts[c]) / k;
  }
  return best + 1;
}

}  // namespace

std::unique_ptr<KnnModel> fit_knn(const Dataset &ds, int k,
                                  const DistanceSpec &spec) {
  ds.require_complete("knn");
  if (ds.n() < 1) fail(ErrorCode::empty_data, "knn: empty training set");
  if (k < 1 || k > ds.n())
    fail(ErrorCode::invalid_argument,
         "knn: k must be in [1, n]; got k=" + std::to_string(k) +
             " with n=" + std::to_string(ds.n()));
  auto m = std::make_unique<KnnModel>();
  m->k = k;
  m->spec = spec;
  m->train_X = ds.X;
  m->train_y = ds.labels;
  m->g = ds.g;
  return m;
}

Prediction KnnModel::predict_full(const Eigen::RowVectorXd &x) const {
  check_dims(x);
  int n = static_cast<int>(train_X.rows());
  std::vector<std::pair<double, int>> order(n);
  for (int j = 0; j < n; ++j)
    order[j] = {distance(spec, x, train_X.row(j)), j};
  std::sort(order.begin(), order.end());
  Prediction pr;
  pr.label = vote(order, k, train_y, g, &pr.scores);
  return pr;
}

std::vector<double> knn_loocv_scores(const Dataset &ds, const std::vector<int> &ks,
                                     const DistanceSpec &spec) {
  ds.require_complete("knn");
  int n = ds.n();
  if (n < 2) fail(ErrorCode::invalid_argument, "knn loocv: need at least 2 rows");
  for (int k : ks)
    if (k < 1 || k > n - 1)
      fail(ErrorCode::invalid_argument,
           "knn loocv: k must be in [1, n-1]; got k=" + std::to_string(k));

  // one shared distance matrix; the fold that drops row i sees the same
  // (distance, index) order as a fresh fit on the remaining rows
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i) {
    D(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      double d = distance(spec, ds.X.row(i), ds.X.row(j));
      D(i, j) = d;
      D(j, i) = d;
    }
  }

  std::vector<double> err(ks.size(), 0.0);
  std::vector<std::pair<double, int>> order;
  order.reserve(n - 1);
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) order.emplace_back(D(i, j), j);
    std::sort(order.begin(), order.end());
    for (std::size_t t = 0; t < ks.size(); ++t)
      if (vote(order, ks[t], ds.labels, ds.g, nullptr) != ds.labels[i])
        err[t] += 1.0;
  }
  for (double &e : err) e /= n;
  return err;
}

nlohmann::json KnnModel::to_json() const {
  return {{"method", "knn"},
          {"format_version", 1},
          {"k", k},
          {"g", g},
          {"distance", spec.to_string()},
          {"train_X", mat_to_json(train_X)},
          {"train_y", train_y}};
}

std::unique_ptr<KnnModel> KnnModel::from_json(const nlohmann::json &j) {
  auto m = std::make_unique<KnnModel>();
  m->k = j.at("k").get<int>();
  m->g = j.at("g").get<int>();
  m->spec = DistanceSpec::parse(j.at("distance").get<std::string>());
  m->train_X = mat_from_json(j.at("train_X"));
  m->train_y = j.at("train_y").get<std::vector<int>>();
  return m;
}

}  // namespace bigtax
