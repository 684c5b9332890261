#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace bigtax {

// six-cell classification of dataset bigness by (n, p, n/p)
struct TaxonomyReport {
  long n = 0;
  long p = 0;
  double ratio = 0.0;
  std::string p_class;     // standard | big | massive
  std::string n_class;     // ordinary | observation_massive
  std::string info_class;  // poverty | scarcity | abundance
  char cell = '?';         // A..F

  nlohmann::json to_json() const;
  std::string to_text() const;
};

struct Recommendation {
  struct Item {
    std::string tag;
    std::string rationale;
  };
  std::vector<Item> items;
  bool imputation_note = false;

  nlohmann::json to_json() const;
};

TaxonomyReport classify_dims(long n, long p);
Recommendation recommend(const TaxonomyReport &report, bool heterogeneous_schema,
                         bool has_missing);

}  // namespace bigtax
