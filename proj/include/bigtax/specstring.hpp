#pragma once

#include <map>
#include <string>
#include <vector>

namespace bigtax {

// Parsed form of the config mini-language used for distances, kernels and
// learners, e.g.
//   "rbf(tau=1.0)"
//   "hybrid(euclidean@cols:1-5, hamming@cols:6-9, alpha=0.5)"
//   "svm(kernel=rbf(tau=2), lambda=0.01)"
// Column selections are 1-based inclusive ranges in the text ("3", "1-5",
// "1-3;7") and stored 0-based.
struct SpecNode {
  std::string name;
  std::map<std::string, std::string> kv;     // scalar key=value arguments
  std::map<std::string, SpecNode> kv_nodes;  // key=<nested spec> arguments
  std::vector<SpecNode> children;            // positional nested specs
  std::vector<int> cols;                     // from @cols; empty = all

  bool has(const std::string &key) const { return kv.count(key) > 0; }
  double num(const std::string &key) const;
  double num(const std::string &key, double fallback) const;
  long integer(const std::string &key, long fallback) const;
  std::string str(const std::string &key, const std::string &fallback) const;
  std::string to_text() const;  // canonical round-trippable rendering
};

SpecNode parse_spec(const std::string &text);

// split on commas at parenthesis depth 0 (for "--methods lda,svm(...)")
std::vector<std::string> split_top_level(const std::string &text, char sep);

}  // namespace bigtax
