#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bigtax/specstring.hpp"

namespace bigtax {

// Distance measure over feature vectors. hybrid applies two sub-distances to
// disjoint column groups and combines them by direct sum or a convex weight.
struct DistanceSpec {
  enum class Kind { euclidean, manhattan, hamming, jaccard, hybrid };
  Kind kind = Kind::euclidean;
  bool convex = false;  // hybrid mode; false = direct sum
  double alpha = 0.5;   // weight on the first part when convex
  std::vector<DistanceSpec> parts;          // exactly 2 for hybrid
  std::vector<std::vector<int>> part_cols;  // 0-based columns per part

  static DistanceSpec parse(const std::string &text);
  static DistanceSpec from_node(const SpecNode &node);
  std::string to_string() const;
};

double distance(const DistanceSpec &spec, const Eigen::RowVectorXd &x,
                const Eigen::RowVectorXd &z);

}  // namespace bigtax
