#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bigtax/specstring.hpp"

namespace bigtax {

struct KernelSpec {
  enum class Kind { vanilla, rbf, laplace, polynomial, hybrid };
  Kind kind = Kind::vanilla;
  double tau = 1.0;     // rbf / laplace bandwidth
  double scale = 1.0;   // polynomial
  double offset = 1.0;  // polynomial
  int degree = 2;       // polynomial
  double alpha = 0.5;   // hybrid convex weight on the first part
  std::vector<KernelSpec> parts;            // exactly 2 for hybrid
  std::vector<std::vector<int>> part_cols;  // 0-based columns per part

  static KernelSpec parse(const std::string &text);
  static KernelSpec from_node(const SpecNode &node);
  std::string to_string() const;
};

struct GramMatrix {
  Eigen::MatrixXd K;
  KernelSpec spec;
  bool centered = false;
};

struct KpcaResult {
  Eigen::VectorXd eigenvalues;   // descending, clamped at 0
  Eigen::MatrixXd eigenvectors;  // n x q, unit columns, sign-fixed
  Eigen::MatrixXd projections;   // n x q, sqrt(n*lambda_j) * v_j
};

double kernel_eval(const KernelSpec &spec, const Eigen::RowVectorXd &x,
                   const Eigen::RowVectorXd &z);
GramMatrix gram(const KernelSpec &spec, const Eigen::MatrixXd &X);
// cross Gram: K[i,j] = k(A_i, B_j)
Eigen::MatrixXd gram_cross(const KernelSpec &spec, const Eigen::MatrixXd &A,
                           const Eigen::MatrixXd &B);
GramMatrix center_gram(const GramMatrix &g);
KpcaResult kernel_pca(const GramMatrix &g, int q);

}  // namespace bigtax
