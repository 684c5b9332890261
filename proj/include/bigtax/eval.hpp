#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bigtax/dataset.hpp"
#include "bigtax/learner.hpp"
#include "bigtax/metrics.hpp"

namespace bigtax {

// one (dataset, method) cell of a report: per-replication errors plus the
// summary statistics recomputable from them
struct EvalEntry {
  std::string dataset;
  std::string method;
  std::vector<double> errors;         // E_r for successful replications
  std::vector<int> r_ids;             // matching replication numbers, 1-based
  std::vector<std::string> failures;  // "r=<r>: <message>"
  std::string skip_reason;            // nonempty: pair never ran
  double mean = 0, sd = 0, min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  int R = 0;
  double test_fraction = 0;
  std::uint64_t seed = 0;
};

struct EvalReport {
  std::vector<EvalEntry> entries;
  int R = 0;
  double test_fraction = 0;
  std::uint64_t seed = 0;
  bool standardized = true;
};

// fill mean/sd/min/quartiles from entry.errors (sample sd; quartiles by
// linear interpolation between order statistics)
void summarize(EvalEntry &entry);

double epe(const Model &model, const Dataset &test);

EvalEntry replicate_epe(const LearnerSpec &spec, const Dataset &ds, int R,
                        double test_fraction, std::uint64_t seed,
                        bool standardize = true);

double loocv(const LearnerSpec &spec, const Dataset &ds);

struct SelectCriterion {
  enum class Kind { loocv, replicate };
  Kind kind = Kind::loocv;
  int R = 20;  // replicate mode only
  double test_fraction = 1.0 / 3.0;
  std::uint64_t seed = 0;
  bool standardize = false;
};

struct SelectResult {
  int k_hat = 1;
  std::vector<int> ks;         // ascending
  std::vector<double> scores;  // criterion value per k
};

SelectResult select_k(const Dataset &ds, const std::vector<int> &ks,
                      const DistanceSpec &spec, const SelectCriterion &crit = {});

EvalReport benchmark(const std::vector<Dataset> &datasets,
                     const std::vector<std::string> &methods, int R,
                     double test_fraction, std::uint64_t seed,
                     bool standardize = true);

}  // namespace bigtax
