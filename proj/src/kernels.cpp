#include "bigtax/kernels.hpp"

#include <cmath>
#include <sstream>

#include "bigtax/errors.hpp"
#include "bigtax/specstring.hpp"

namespace bigtax {

KernelSpec KernelSpec::from_node(const SpecNode &node) {
  KernelSpec k;
  if (node.name == "vanilla") {
    k.kind = KernelSpec::Kind::vanilla;
  } else if (node.name == "rbf" || node.name == "laplace") {
    k.kind = node.name == "rbf" ? KernelSpec::Kind::rbf : KernelSpec::Kind::laplace;
    k.tau = node.num("tau", 1.0);
    if (!(k.tau > 0.0))
      fail(ErrorCode::invalid_argument, node.name + ": tau must be > 0");
  } else if (node.name == "poly" || node.name == "polynomial") {
    k.kind = KernelSpec::Kind::polynomial;
    k.scale = node.num("scale", 1.0);
    k.offset = node.num("offset", 1.0);
    k.degree = static_cast<int>(node.integer("degree", 2));
    if (k.degree < 1)
      fail(ErrorCode::invalid_argument, "polynomial: degree must be >= 1");
  } else if (node.name == "hybrid") {
    k.kind = KernelSpec::Kind::hybrid;
    if (node.children.size() != 2)
      fail(ErrorCode::parse, "hybrid kernel needs exactly 2 sub-kernels");
    for (const SpecNode &child : node.children) {
      if (child.cols.empty())
        fail(ErrorCode::parse, "hybrid sub-kernels need @cols: column groups");
      k.parts.push_back(from_node(child));
      k.part_cols.push_back(child.cols);
    }
    for (int c : k.part_cols[0])
      for (int c2 : k.part_cols[1])
        if (c == c2)
          fail(ErrorCode::parse, "hybrid column groups overlap at column " +
                                     std::to_string(c + 1));
    k.alpha = node.num("alpha", 0.5);
    if (!(k.alpha > 0.0 && k.alpha < 1.0))
      fail(ErrorCode::invalid_argument, "hybrid alpha must be in (0,1)");
  } else {
    fail(ErrorCode::parse, "unknown kernel '" + node.name + "'");
  }
  return k;
}

namespace {

Eigen::RowVectorXd gather(const Eigen::RowVectorXd &x, const std::vector<int> &cols) {
  if (cols.empty()) return x;
  Eigen::RowVectorXd out(static_cast<int>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] >= x.size())
      fail(ErrorCode::invalid_argument, "kernel: column " +
                                            std::to_string(cols[i] + 1) +
                                            " out of range");
    out[static_cast<int>(i)] = x[cols[i]];
  }
  return out;
}

}  // namespace

KernelSpec KernelSpec::parse(const std::string &text) {
  return from_node(parse_spec(text));
}

std::string KernelSpec::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::vanilla:
      return "vanilla";
    case Kind::rbf:
      os << "rbf(tau=" << tau << ")";
      return os.str();
    case Kind::laplace:
      os << "laplace(tau=" << tau << ")";
      return os.str();
    case Kind::polynomial:
      os << "poly(scale=" << scale << ",offset=" << offset << ",degree=" << degree
         << ")";
      return os.str();
    case Kind::hybrid:
      break;
  }
  os << "hybrid(";
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) os << ", ";
    os << parts[i].to_string() << "@cols:";
    for (size_t c = 0; c < part_cols[i].size(); ++c) {
      if (c) os << ";";
      os << part_cols[i][c] + 1;
    }
  }
  os << ", alpha=" << alpha << ")";
  return os.str();
}

double kernel_eval(const KernelSpec &spec, const Eigen::RowVectorXd &x,
                   const Eigen::RowVectorXd &z) {
  if (x.size() != z.size())
    fail(ErrorCode::invalid_argument, "kernel_eval: dimension mismatch");
  if (!x.allFinite() || !z.allFinite())
    fail(ErrorCode::invalid_argument, "kernel_eval: non-finite input");
  switch (spec.kind) {
    case KernelSpec::Kind::vanilla:
      return x.dot(z);
    case KernelSpec::Kind::rbf:
      return std::exp(-0.5 * (x - z).squaredNorm() / (spec.tau * spec.tau));
    case KernelSpec::Kind::laplace:
      return std::exp(-0.5 * (x - z).cwiseAbs().sum() / spec.tau);
    case KernelSpec::Kind::polynomial:
      return std::pow(spec.scale * x.dot(z) + spec.offset, spec.degree);
    case KernelSpec::Kind::hybrid: {
      double k1 = kernel_eval(spec.parts[0], gather(x, spec.part_cols[0]),
                              gather(z, spec.part_cols[0]));
      double k2 = kernel_eval(spec.parts[1], gather(x, spec.part_cols[1]),
                              gather(z, spec.part_cols[1]));
      return spec.alpha * k1 + (1.0 - spec.alpha) * k2;
    }
  }
  fail(ErrorCode::invalid_argument, "kernel_eval: unreachable kind");
}

GramMatrix gram(const KernelSpec &spec, const Eigen::MatrixXd &X) {
  int n = static_cast<int>(X.rows());
  if (n < 1) fail(ErrorCode::invalid_argument, "gram: empty matrix");
  GramMatrix g;
  g.spec = spec;
  g.K.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = kernel_eval(spec, X.row(i), X.row(j));
      g.K(i, j) = v;
      g.K(j, i) = v;
    }
  }
  return g;
}

Eigen::MatrixXd gram_cross(const KernelSpec &spec, const Eigen::MatrixXd &A,
                           const Eigen::MatrixXd &B) {
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < B.rows(); ++j)
      K(i, j) = kernel_eval(spec, A.row(i), B.row(j));
  return K;
}

GramMatrix center_gram(const GramMatrix &g) {
  if (g.centered)
    fail(ErrorCode::invalid_argument, "center_gram: already centered");
  int n = static_cast<int>(g.K.rows());
  GramMatrix out;
  out.spec = g.spec;
  out.centered = true;
  // (I - 1/n) K (I - 1/n) expanded: K - rowmean - colmean + grandmean
  Eigen::VectorXd rm = g.K.rowwise().mean();
  double gm = g.K.mean();
  out.K = g.K;
  out.K.colwise() -= rm;
  out.K.rowwise() -= rm.transpose();
  out.K.array() += gm;
  (void)n;
  return out;
}

KpcaResult kernel_pca(const GramMatrix &g, int q) {
  int n = static_cast<int>(g.K.rows());
  if (q < 1 || q > n)
    fail(ErrorCode::invalid_argument, "kernel_pca: need 1 <= q <= n");
  GramMatrix centered = g.centered ? g : center_gram(g);
  Eigen::MatrixXd B = centered.K / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::not_converged, "kernel_pca: eigensolver failed");

  KpcaResult res;
  res.eigenvalues.resize(q);
  res.eigenvectors.resize(n, q);
  res.projections.resize(n, q);
  for (int j = 0; j < q; ++j) {
    int src = n - 1 - j;  // solver returns ascending order
    double lambda = solver.eigenvalues()[src];
    if (lambda < 0.0 && lambda > -1e-10) lambda = 0.0;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    // sign fixed so the largest-magnitude entry is positive
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    if (v[arg] < 0.0) v = -v;
    res.eigenvalues[j] = lambda;
    res.eigenvectors.col(j) = v;
    res.projections.col(j) =
        std::sqrt(std::max(0.0, static_cast<double>(n) * lambda)) * v;
  }
  return res;
}

}  // namespace bigtax
