#include <algorithm>
#include <cmath>

#include "bigtax/errors.hpp"
#include "bigtax/learners.hpp"

namespace bigtax {

namespace {

double gini(const std::vector<double> &counts, double total) {
  double s = 0.0;
  for (double c : counts) s += (c / total) * (c / total);
  return 1.0 - s;
}

struct Builder {
  const Dataset &ds;
  const TreeOptions &opt;
  std::vector<TreeModel::Node> nodes;

  std::vector<double> class_counts(const std::vector<int> &rows) const {
    std::vector<double> counts(ds.g, 0.0);
    for (int r : rows) counts[ds.labels[r] - 1] += 1.0;
    return counts;
  }

  struct Split {
    double gain = 1e-12;  // anything at or below this is not worth splitting
    int col = -1;
    bool categorical = false;
    double threshold = 0.0, category = 0.0;
  };

  Split best_split(const std::vector<int> &rows, const std::vector<double> &counts,
                   double parent_gini) const {
    Split best;
    double n = static_cast<double>(rows.size());
    std::vector<int> sorted;
    std::vector<double> left(ds.g), right(ds.g);
    for (int j = 0; j < ds.p(); ++j) {
      if (ds.numeric_col(j)) {
        sorted = rows;
        std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
          return ds.X(a, j) < ds.X(b, j);
        });
        std::fill(left.begin(), left.end(), 0.0);
        right = counts;
        std::size_t i = 0;
        while (i < sorted.size()) {
          double v = ds.X(sorted[i], j);
          while (i < sorted.size() && ds.X(sorted[i], j) == v) {
            int c = ds.labels[sorted[i]] - 1;
            left[c] += 1.0;
            right[c] -= 1.0;
            ++i;
          }
          if (i == sorted.size()) break;
          double nl = static_cast<double>(i), nr = n - nl;
          if (nl < opt.min_leaf || nr < opt.min_leaf) continue;
          double gain =
              parent_gini - (nl / n) * gini(left, nl) - (nr / n) * gini(right, nr);
          if (gain > best.gain) {
            best.gain = gain;
            best.col = j;
            best.categorical = false;
            best.threshold = 0.5 * (v + ds.X(sorted[i], j));
          }
        }
      } else {
        // binary split on membership in one category, tried in code order
        std::vector<double> codes;
        for (int r : rows) codes.push_back(ds.X(r, j));
        std::sort(codes.begin(), codes.end());
        codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
        if (codes.size() < 2) continue;
        for (double code : codes) {
          std::fill(left.begin(), left.end(), 0.0);
          double nl = 0.0;
          for (int r : rows)
            if (ds.X(r, j) == code) {
              left[ds.labels[r] - 1] += 1.0;
              nl += 1.0;
            }
          double nr = n - nl;
          if (nl < opt.min_leaf || nr < opt.min_leaf) continue;
          for (int c = 0; c < ds.g; ++c) right[c] = counts[c] - left[c];
          double gain =
              parent_gini - (nl / n) * gini(left, nl) - (nr / n) * gini(right, nr);
          if (gain > best.gain) {
            best.gain = gain;
            best.col = j;
            best.categorical = true;
            best.category = code;
          }
        }
      }
    }
    return best;
  }

  int build(const std::vector<int> &rows, int depth) {
    int idx = static_cast<int>(nodes.size());
    nodes.push_back({});
    TreeModel::Node node;
    node.counts = class_counts(rows);
    node.label = 1;
    for (int c = 1; c < ds.g; ++c)
      if (node.counts[c] > node.counts[node.label - 1]) node.label = c + 1;

    double n = static_cast<double>(rows.size());
    double node_gini = gini(node.counts, n);
    bool pure = node.counts[node.label - 1] == n;
    if (depth < opt.max_depth && !pure &&
        rows.size() >= 2 * static_cast<std::size_t>(opt.min_leaf)) {
      Split s = best_split(rows, node.counts, node_gini);
      if (s.col >= 0) {
        std::vector<int> lrows, rrows;
        for (int r : rows) {
          bool go_left = s.categorical ? ds.X(r, s.col) == s.category
                                       : ds.X(r, s.col) <= s.threshold;
          (go_left ? lrows : rrows).push_back(r);
        }
        node.leaf = false;
        node.col = s.col;
        node.categorical = s.categorical;
        node.threshold = s.threshold;
        node.category = s.category;
        node.left = build(lrows, depth + 1);
        node.right = build(rrows, depth + 1);
      }
    }
    nodes[idx] = std::move(node);
    return idx;
  }
};

}  // namespace

std::unique_ptr<TreeModel> fit_tree(const Dataset &ds, const TreeOptions &opt) {
  ds.require_complete("tree");
  if (opt.min_leaf < 1)
    fail(ErrorCode::invalid_argument, "tree: min_leaf must be >= 1");
  if (opt.max_depth < 0)
    fail(ErrorCode::invalid_argument, "tree: max_depth must be >= 0");
  if (ds.n() < opt.min_leaf)
    fail(ErrorCode::invalid_argument,
         "tree: need at least min_leaf=" + std::to_string(opt.min_leaf) + " rows");

  Builder b{ds, opt, {}};
  std::vector<int> rows(ds.n());
  for (int i = 0; i < ds.n(); ++i) rows[i] = i;
  b.build(rows, 0);

  auto m = std::make_unique<TreeModel>();
  m->nodes = std::move(b.nodes);
  m->g = ds.g;
  m->p = ds.p();
  m->leaves = 0;
  for (const auto &nd : m->nodes)
    if (nd.leaf) ++m->leaves;
  return m;
}

int TreeModel::leaf_index(const Eigen::RowVectorXd &x) const {
  check_dims(x);
  int i = 0;
  while (!nodes[i].leaf) {
    const Node &nd = nodes[i];
    bool go_left = nd.categorical ? x[nd.col] == nd.category : x[nd.col] <= nd.threshold;
    i = go_left ? nd.left : nd.right;
  }
  return i;
}

Prediction TreeModel::predict_full(const Eigen::RowVectorXd &x) const {
  const Node &leaf = nodes[leaf_index(x)];
  Prediction pr;
  pr.label = leaf.label;
  double total = 0.0;
  for (double c : leaf.counts) total += c;
  pr.scores.resize(leaf.counts.size());
  for (std::size_t c = 0; c < leaf.counts.size(); ++c)
    pr.scores[c] = leaf.counts[c] / total;
  return pr;
}

nlohmann::json TreeModel::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &nd : nodes) {
    nlohmann::json n{{"leaf", nd.leaf}, {"label", nd.label}, {"counts", nd.counts}};
    if (!nd.leaf) {
      n["col"] = nd.col;
      n["categorical"] = nd.categorical;
      n["threshold"] = nd.threshold;
      n["category"] = nd.category;
      n["left"] = nd.left;
      n["right"] = nd.right;
    }
    arr.push_back(std::move(n));
  }
  return {{"method", "tree"},
          {"format_version", 1},
          {"g", g},
          {"p", p},
          {"leaves", leaves},
          {"nodes", arr}};
}

std::unique_ptr<TreeModel> TreeModel::from_json(const nlohmann::json &j) {
  auto m = std::make_unique<TreeModel>();
  m->g = j.at("g").get<int>();
  m->p = j.at("p").get<int>();
  m->leaves = j.at("leaves").get<int>();
  for (const auto &n : j.at("nodes")) {
    Node nd;
    nd.leaf = n.at("leaf").get<bool>();
    nd.label = n.at("label").get<int>();
    nd.counts = n.at("counts").get<std::vector<double>>();
    if (!nd.leaf) {
      nd.col = n.at("col").get<int>();
      nd.categorical = n.at("categorical").get<bool>();
      nd.threshold = n.at("threshold").get<double>();
      nd.category = n.at("category").get<double>();
      nd.left = n.at("left").get<int>();
      nd.right = n.at("right").get<int>();
    }
    m->nodes.push_back(std::move(nd));
  }
  return m;
}

}  // namespace bigtax
