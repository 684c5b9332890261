#include "bigtax/taxonomy.hpp"

#include <sstream>

#include "bigtax/errors.hpp"

namespace bigtax {

TaxonomyReport classify_dims(long n, long p) {
  if (n < 1 || p < 1)
    fail(ErrorCode::invalid_argument, "classify_dims: need n >= 1 and p >= 1");
  TaxonomyReport r;
  r.n = n;
  r.p = p;
  r.ratio = static_cast<double>(n) / static_cast<double>(p);
  r.p_class = p <= 50 ? "standard" : (p <= 100 ? "big" : "massive");
  r.n_class = n > 1000 ? "observation_massive" : "ordinary";
  r.info_class = r.ratio < 1.0 ? "poverty" : (r.ratio < 10.0 ? "scarcity" : "abundance");
  int col = r.info_class == "poverty" ? 0 : (r.info_class == "scarcity" ? 1 : 2);
  r.cell = n > 1000 ? static_cast<char>('A' + col) : static_cast<char>('D' + col);
  return r;
}

nlohmann::json TaxonomyReport::to_json() const {
  return {{"n", n},
          {"p", p},
          {"ratio", ratio},
          {"p_class", p_class},
          {"n_class", n_class},
          {"info_class", info_class},
          {"cell", std::string(1, cell)}};
}

std::string TaxonomyReport::to_text() const {
  std::ostringstream os;
  os << "n=" << n << " p=" << p << " n/p=" << ratio << "\n"
     << "p_class=" << p_class << " n_class=" << n_class
     << " info_class=" << info_class << "\n"
     << "cell=" << cell << "\n";
  return os.str();
}

Recommendation recommend(const TaxonomyReport &report, bool heterogeneous_schema,
                         bool has_missing) {
  Recommendation rec;
  auto add = [&](const std::string &tag, const std::string &why) {
    for (const auto &it : rec.items)
      if (it.tag == tag) return;
    rec.items.push_back({tag, why});
  };
  bool poverty = report.info_class == "poverty";
  if (poverty) {
    add("regularization", "n/p < 1: empirical covariance and risk minimizers are ill-posed");
    add("kernelization_dual", "n/p < 1: n x n dual problems are smaller than p x p primal ones");
    add("dimensionality_reduction", "n/p < 1: project to intrinsic dimension before fitting");
    add("variable_selection", "n/p < 1: most of the p variables cannot be supported by n");
    add("bagging_variance_reduction", "information poverty makes fits unstable; aggregate them");
  }
  if (report.n_class == "observation_massive")
    add("subsampling_or_sequentialization",
        "n > 1000: O(n^3) dual methods need subsampled or sequential updates");
  if (report.p_class != "standard")
    add("variable_selection", "p > 50: prune redundant or noise variables");
  if (heterogeneous_schema)
    add("hybridization", "mixed variable types call for combined distances/kernels");
  rec.imputation_note = has_missing;
  add("transformation_scaling", "standardize or unitize so no variable dominates the scale");
  return rec;
}

nlohmann::json Recommendation::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &it : items)
    arr.push_back({{"tag", it.tag}, {"rationale", it.rationale}});
  return {{"recommendations", arr}, {"imputation_required_first", imputation_note}};
}

}  // namespace bigtax
