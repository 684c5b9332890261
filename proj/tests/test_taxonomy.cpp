#include <set>
#include <string>

#include "bigtax/errors.hpp"
#include "bigtax/random.hpp"
#include "bigtax/taxonomy.hpp"
#include "doctest.h"

using namespace bigtax;

TEST_CASE("known datasets land in their cells") {
  TaxonomyReport r = classify_dims(476, 166);
  CHECK(r.cell == 'E');
  CHECK(r.p_class == "massive");
  CHECK(r.n_class == "ordinary");
  CHECK(r.info_class == "scarcity");
  CHECK(r.to_json()["cell"] == "E");

  CHECK(classify_dims(768, 8).cell == 'F');
  CHECK(classify_dims(200, 5).cell == 'F');
  CHECK(classify_dims(1500, 3000).cell == 'A');
  CHECK(classify_dims(2000, 50).cell == 'C');
}

TEST_CASE("class boundaries sit exactly where declared") {
  CHECK(classify_dims(10, 50).p_class == "standard");
  CHECK(classify_dims(10, 51).p_class == "big");
  CHECK(classify_dims(10, 100).p_class == "big");
  CHECK(classify_dims(10, 101).p_class == "massive");

  CHECK(classify_dims(1000, 10).n_class == "ordinary");
  CHECK(classify_dims(1001, 10).n_class == "observation_massive");

  CHECK(classify_dims(9, 10).info_class == "poverty");    // ratio < 1
  CHECK(classify_dims(10, 10).info_class == "scarcity");  // 1 <= ratio < 10
  CHECK(classify_dims(99, 10).info_class == "scarcity");
  CHECK(classify_dims(100, 10).info_class == "abundance");  // ratio >= 10
}

TEST_CASE("every dimension pair falls in exactly one of the six cells") {
  RandomStream rs(99);
  for (int trial = 0; trial < 500; ++trial) {
    long n = rs.uniform_int(1, 5000);
    long p = rs.uniform_int(1, 5000);
    TaxonomyReport r = classify_dims(n, p);
    REQUIRE(r.cell >= 'A');
    REQUIRE(r.cell <= 'F');
    int col = r.info_class == "poverty" ? 0 : (r.info_class == "scarcity" ? 1 : 2);
    char expect = static_cast<char>((n > 1000 ? 'A' : 'D') + col);
    CHECK(r.cell == expect);
    // the (row, column) pair determines the cell uniquely and vice versa
    CHECK((r.cell - 'A') % 3 == col);
    CHECK(((r.cell - 'A') / 3 == 0) == (r.n_class == "observation_massive"));
  }
}

TEST_CASE("degenerate dimensions are rejected") {
  CHECK_THROWS_AS(classify_dims(0, 5), Error);
  CHECK_THROWS_AS(classify_dims(5, 0), Error);
  CHECK_THROWS_AS(classify_dims(-1, 1), Error);
}

TEST_CASE("recommendations track the cell, schema and missingness") {
  auto tags = [](const Recommendation &rec) {
    std::set<std::string> out;
    for (const auto &it : rec.items) out.insert(it.tag);
    return out;
  };

  Recommendation poor = recommend(classify_dims(100, 500), false, false);
  std::set<std::string> pt = tags(poor);
  CHECK(pt.count("regularization") == 1);
  CHECK(pt.count("kernelization_dual") == 1);
  CHECK(pt.count("dimensionality_reduction") == 1);
  CHECK(pt.count("variable_selection") == 1);
  CHECK(pt.count("bagging_variance_reduction") == 1);
  CHECK(poor.imputation_note == false);
  CHECK(pt.size() == static_cast<size_t>(poor.items.size()));  // no duplicates

  Recommendation tall = recommend(classify_dims(50000, 10), false, false);
  CHECK(tags(tall).count("subsampling_or_sequentialization") == 1);
  CHECK(tags(tall).count("regularization") == 0);

  Recommendation het = recommend(classify_dims(100, 5), true, true);
  CHECK(tags(het).count("hybridization") == 1);
  CHECK(het.imputation_note == true);
  CHECK(het.to_json()["imputation_required_first"] == true);

  // everyone gets the scaling advice
  CHECK(tags(recommend(classify_dims(30, 2), false, false))
            .count("transformation_scaling") == 1);
}
