#include "bigtax/metrics.hpp"

#include <cmath>
#include <sstream>

#include "bigtax/errors.hpp"

namespace bigtax {

namespace {

// gather the selected coordinates (empty selection = all)
Eigen::RowVectorXd gather(const Eigen::RowVectorXd &x, const std::vector<int> &cols) {
  if (cols.empty()) return x;
  Eigen::RowVectorXd out(static_cast<int>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] >= x.size())
      fail(ErrorCode::invalid_argument, "distance: column " +
                                            std::to_string(cols[i] + 1) +
                                            " out of range");
    out[static_cast<int>(i)] = x[cols[i]];
  }
  return out;
}

void require_binary(const Eigen::RowVectorXd &v, const char *who) {
  for (int i = 0; i < v.size(); ++i)
    if (!(v[i] == 0.0 || v[i] == 1.0))
      fail(ErrorCode::invalid_argument,
           std::string(who) + " distance needs binary {0,1} coordinates");
}

}  // namespace

DistanceSpec DistanceSpec::from_node(const SpecNode &node) {
  DistanceSpec d;
  if (node.name == "euclidean") d.kind = Kind::euclidean;
  else if (node.name == "manhattan") d.kind = Kind::manhattan;
  else if (node.name == "hamming") d.kind = Kind::hamming;
  else if (node.name == "jaccard") d.kind = Kind::jaccard;
  else if (node.name == "hybrid") {
    d.kind = Kind::hybrid;
    if (node.children.size() != 2)
      fail(ErrorCode::parse, "hybrid distance needs exactly 2 sub-distances");
    for (const SpecNode &child : node.children) {
      if (child.cols.empty())
        fail(ErrorCode::parse, "hybrid sub-distances need @cols: column groups");
      d.parts.push_back(from_node(child));
      d.part_cols.push_back(child.cols);
    }
    for (int c : d.part_cols[0])
      for (int c2 : d.part_cols[1])
        if (c == c2)
          fail(ErrorCode::parse, "hybrid column groups overlap at column " +
                                     std::to_string(c + 1));
    std::string mode = node.str("mode", node.has("alpha") ? "convex" : "direct_sum");
    if (mode == "convex") {
      d.convex = true;
      d.alpha = node.num("alpha", 0.5);
      if (!(d.alpha > 0.0 && d.alpha < 1.0))
        fail(ErrorCode::invalid_argument, "hybrid alpha must be in (0,1)");
    } else if (mode == "direct_sum" || mode == "direct") {
      d.convex = false;
    } else {
      fail(ErrorCode::parse, "unknown hybrid mode '" + mode + "'");
    }
  } else {
    fail(ErrorCode::parse, "unknown distance '" + node.name + "'");
  }
  return d;
}

DistanceSpec DistanceSpec::parse(const std::string &text) {
  return from_node(parse_spec(text));
}

std::string DistanceSpec::to_string() const {
  switch (kind) {
    case Kind::euclidean: return "euclidean";
    case Kind::manhattan: return "manhattan";
    case Kind::hamming: return "hamming";
    case Kind::jaccard: return "jaccard";
    case Kind::hybrid: break;
  }
  std::ostringstream os;
  os << "hybrid(";
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) os << ", ";
    os << parts[i].to_string() << "@cols:";
    for (size_t c = 0; c < part_cols[i].size(); ++c) {
      if (c) os << ";";
      os << part_cols[i][c] + 1;
    }
  }
  if (convex) os << ", alpha=" << alpha;
  else os << ", mode=direct_sum";
  os << ")";
  return os.str();
}

double distance(const DistanceSpec &spec, const Eigen::RowVectorXd &x,
                const Eigen::RowVectorXd &z) {
  if (x.size() != z.size())
    fail(ErrorCode::invalid_argument, "distance: dimension mismatch");
  switch (spec.kind) {
    case DistanceSpec::Kind::euclidean:
      return (x - z).norm();
    case DistanceSpec::Kind::manhattan:
      return (x - z).cwiseAbs().sum();
    case DistanceSpec::Kind::hamming: {
      require_binary(x, "hamming");
      require_binary(z, "hamming");
      double count = 0.0;
      for (int i = 0; i < x.size(); ++i)
        if (x[i] != z[i]) count += 1.0;
      return count;
    }
    case DistanceSpec::Kind::jaccard: {
      require_binary(x, "jaccard");
      require_binary(z, "jaccard");
      double xz = x.dot(z), xx = x.dot(x), zz = z.dot(z);
      double denom = xx + zz - xz;
      if (denom == 0.0)
        fail(ErrorCode::invalid_argument,
             "jaccard distance undefined for two all-zero vectors");
      return 1.0 - xz / denom;
    }
    case DistanceSpec::Kind::hybrid: {
      double d1 = distance(spec.parts[0], gather(x, spec.part_cols[0]),
                           gather(z, spec.part_cols[0]));
      double d2 = distance(spec.parts[1], gather(x, spec.part_cols[1]),
                           gather(z, spec.part_cols[1]));
      return spec.convex ? spec.alpha * d1 + (1.0 - spec.alpha) * d2 : d1 + d2;
    }
  }
  fail(ErrorCode::invalid_argument, "distance: unreachable kind");
}

}  // namespace bigtax
