#include <algorithm>
#include <cmath>

#include "bigtax/errors.hpp"
#include "bigtax/eval.hpp"
#include "bigtax/learners.hpp"
#include "bigtax/random.hpp"

namespace bigtax {

namespace {

double quartile(const std::vector<double> &sorted, double q) {
  double h = (sorted.size() - 1) * q;
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

std::string known_method_or_reason(const SpecNode &node, const Dataset &ds) {
  static const std::vector<std::string> known = {
      "lda",  "lda_r", "knn",  "svm", "logistic", "logistic_l1",
      "klr",  "tree",  "cart", "bag", "rforest"};
  if (std::find(known.begin(), known.end(), node.name) == known.end())
    return "unknown method '" + node.name + "'";
  if (binary_only(node.name) && ds.g != 2)
    return "method handles 2 classes, dataset has " + std::to_string(ds.g);
  return "";
}

}  // namespace

void summarize(EvalEntry &entry) {
  if (entry.errors.empty()) return;
  std::vector<double> sorted = entry.errors;
  std::sort(sorted.begin(), sorted.end());
  double n = static_cast<double>(sorted.size());
  double mean = 0.0;
  for (double e : sorted) mean += e;
  mean /= n;
  double ss = 0.0;
  for (double e : sorted) ss += (e - mean) * (e - mean);
  entry.mean = mean;
  entry.sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  entry.min = sorted.front();
  entry.q1 = quartile(sorted, 0.25);
  entry.median = quartile(sorted, 0.5);
  entry.q3 = quartile(sorted, 0.75);
  entry.max = sorted.back();
}

double epe(const Model &model, const Dataset &test) {
  if (test.n() == 0) fail(ErrorCode::empty_data, "epe: empty test set");
  if (test.p() != model.n_features())
    fail(ErrorCode::schema_mismatch,
         "epe: model expects " + std::to_string(model.n_features()) +
             " features, test set has " + std::to_string(test.p()));
  int wrong = 0;
  for (int i = 0; i < test.n(); ++i)
    if (model.predict(test.X.row(i)) != test.labels[i]) ++wrong;
  return static_cast<double>(wrong) / test.n();
}

EvalEntry replicate_epe(const LearnerSpec &spec, const Dataset &ds, int R,
                        double test_fraction, std::uint64_t seed,
                        bool standardize) {
  if (R < 1) fail(ErrorCode::invalid_argument, "replicate_epe: R must be >= 1");
  EvalEntry entry;
  entry.dataset = ds.name;
  entry.method = spec.text;
  entry.R = R;
  entry.test_fraction = test_fraction;
  entry.seed = seed;
  for (int r = 1; r <= R; ++r) {
    std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    try {
      auto [train, test] = split(ds, test_fraction, rep_seed);
      if (standardize) {
        auto [train_t, params] = fit_transform(train, TransformKind::standardize);
        Dataset test_t = apply_transform(params, test);
        auto model = fit_spec(spec, train_t, rep_seed);
        entry.errors.push_back(epe(*model, test_t));
      } else {
        auto model = fit_spec(spec, train, rep_seed);
        entry.errors.push_back(epe(*model, test));
      }
      entry.r_ids.push_back(r);
    } catch (const Error &e) {
      entry.failures.push_back("r=" + std::to_string(r) + ": " + e.what());
    }
  }
  summarize(entry);
  return entry;
}

double loocv(const LearnerSpec &spec, const Dataset &ds) {
  int n = ds.n();
  if (n < 2) fail(ErrorCode::invalid_argument, "loocv: need at least 2 rows");
  int wrong = 0;
  for (int i = 0; i < n; ++i) {
    Dataset fold = ds.without_row(i);
    std::vector<int> counts = fold.class_counts();
    for (int c = 0; c < fold.g; ++c)
      if (counts[c] == 0)
        fail(ErrorCode::invalid_argument,
             "loocv: removing row " + std::to_string(i + 1) + " leaves class " +
                 std::to_string(c + 1) + " empty");
    auto model = fit_spec(spec, fold, 0);
    if (model->predict(ds.X.row(i)) != ds.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / n;
}

SelectResult select_k(const Dataset &ds, const std::vector<int> &ks,
                      const DistanceSpec &spec, const SelectCriterion &crit) {
  if (ks.empty()) fail(ErrorCode::invalid_argument, "select_k: empty k set");
  SelectResult res;
  res.ks = ks;
  std::sort(res.ks.begin(), res.ks.end());
  res.ks.erase(std::unique(res.ks.begin(), res.ks.end()), res.ks.end());

  if (crit.kind == SelectCriterion::Kind::loocv) {
    res.scores = knn_loocv_scores(ds, res.ks, spec);
  } else {
    res.scores.clear();
    for (int k : res.ks) {
      LearnerSpec ls = LearnerSpec::parse("knn(k=" + std::to_string(k) +
                                          ",distance=" + spec.to_string() + ")");
      EvalEntry e = replicate_epe(ls, ds, crit.R, crit.test_fraction, crit.seed,
                                  crit.standardize);
      if (e.errors.empty())
        fail(ErrorCode::invalid_argument,
             "select_k: every replication failed for k=" + std::to_string(k));
      res.scores.push_back(e.mean);
    }
  }
  std::size_t best = 0;
  for (std::size_t t = 1; t < res.scores.size(); ++t)
    if (res.scores[t] < res.scores[best]) best = t;
  res.k_hat = res.ks[best];
  return res;
}

EvalReport benchmark(const std::vector<Dataset> &datasets,
                     const std::vector<std::string> &methods, int R,
                     double test_fraction, std::uint64_t seed, bool standardize) {
  EvalReport report;
  report.R = R;
  report.test_fraction = test_fraction;
  report.seed = seed;
  report.standardized = standardize;
  for (const Dataset &ds : datasets) {
    for (const std::string &text : methods) {
      std::uint64_t pair_seed =
          derive_seed(derive_seed(seed, hash_str(ds.name)), hash_str(text));
      EvalEntry entry;
      entry.dataset = ds.name;
      entry.method = text;
      entry.R = R;
      entry.test_fraction = test_fraction;
      entry.seed = pair_seed;
      try {
        LearnerSpec spec = LearnerSpec::parse(text);
        std::string reason = known_method_or_reason(spec.node, ds);
        if (!reason.empty()) {
          entry.skip_reason = reason;
        } else {
          entry = replicate_epe(spec, ds, R, test_fraction, pair_seed, standardize);
        }
      } catch (const Error &e) {
        entry.skip_reason = e.what();
      }
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

}  // namespace bigtax
