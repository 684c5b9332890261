#pragma once

// shared builders for the unit tests

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "bigtax/dataset.hpp"
#include "bigtax/random.hpp"

namespace testutil {

inline Eigen::RowVectorXd rv(std::initializer_list<double> v) {
  Eigen::RowVectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// all-real-column dataset from a matrix and 1..g labels
inline bigtax::Dataset make_ds(const Eigen::MatrixXd &X,
                               const std::vector<int> &labels) {
  bigtax::Dataset ds;
  ds.name = "test";
  ds.X = X;
  ds.labels = labels;
  ds.g = 0;
  for (int c : labels) ds.g = std::max(ds.g, c);
  for (int c = 1; c <= ds.g; ++c) ds.label_names.push_back(std::to_string(c));
  ds.label_column = "y";
  for (int j = 0; j < X.cols(); ++j) {
    bigtax::ColumnSchema cs;
    cs.name = "x" + std::to_string(j + 1);
    cs.kind = bigtax::VariableKind::real;
    ds.schema.push_back(cs);
  }
  return ds;
}

// two spherical Gaussians; class 2 is shifted by `shift` on coordinate 0
inline bigtax::Dataset blobs(int n_per_class, int p, double shift,
                             std::uint64_t seed) {
  bigtax::RandomStream rs(seed);
  int n = 2 * n_per_class;
  Eigen::MatrixXd X(n, p);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    int cls = i < n_per_class ? 1 : 2;
    y[i] = cls;
    for (int j = 0; j < p; ++j)
      X(i, j) = rs.normal() + (cls == 2 && j == 0 ? shift : 0.0);
  }
  return make_ds(X, y);
}

// jittered copies of the four XOR corners; class 2 iff signs differ
inline bigtax::Dataset xor_ds(int reps = 1, double jitter = 0.0,
                              std::uint64_t seed = 1) {
  bigtax::RandomStream rs(seed);
  Eigen::MatrixXd X(4 * reps, 2);
  std::vector<int> y(4 * reps);
  const double cx[4] = {-1, -1, 1, 1};
  const double cy[4] = {-1, 1, -1, 1};
  for (int r = 0, i = 0; r < reps; ++r) {
    for (int c = 0; c < 4; ++c, ++i) {
      X(i, 0) = cx[c] + jitter * rs.normal();
      X(i, 1) = cy[c] + jitter * rs.normal();
      y[i] = cx[c] * cy[c] > 0 ? 1 : 2;
    }
  }
  return make_ds(X, y);
}

class TempFile {
 public:
  explicit TempFile(const std::string &name)
      : path_(std::string("/tmp/bigtax_test_") + name) {}
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string &path() const { return path_; }
  void write(const std::string &content) const {
    std::ofstream os(path_);
    os << content;
  }
  std::string read() const {
    std::ifstream is(path_);
    return std::string(std::istreambuf_iterator<char>(is),
                       std::istreambuf_iterator<char>());
  }

 private:
  std::string path_;
};

}  // namespace testutil
