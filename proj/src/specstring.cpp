#include "bigtax/specstring.hpp"

#include <cctype>
#include <cstdlib>

#include "bigtax/errors.hpp"

namespace bigtax {

namespace {

std::string trim(const std::string &s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// "1-5", "3", "1-3;7" -> 0-based indices
std::vector<int> parse_cols(const std::string &text) {
  std::vector<int> out;
  for (const std::string &part : split_top_level(text, ';')) {
    std::string item = trim(part);
    if (item.empty()) fail(ErrorCode::parse, "empty column range in '" + text + "'");
    size_t dash = item.find('-', 1);  // allow no negatives, just ranges
    auto to_index = [&](const std::string &tok) {
      char *end = nullptr;
      long v = std::strtol(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end != '\0' || v < 1)
        fail(ErrorCode::parse, "bad column index '" + tok + "'");
      return static_cast<int>(v - 1);
    };
    if (dash == std::string::npos) {
      out.push_back(to_index(item));
    } else {
      int a = to_index(trim(item.substr(0, dash)));
      int b = to_index(trim(item.substr(dash + 1)));
      if (b < a) fail(ErrorCode::parse, "descending column range '" + item + "'");
      for (int c = a; c <= b; ++c) out.push_back(c);
    }
  }
  return out;
}

// one argument or the whole spec: name[(args)][@cols:...]
SpecNode parse_node(const std::string &text) {
  std::string s = trim(text);
  if (s.empty()) fail(ErrorCode::parse, "empty spec");

  SpecNode node;
  // peel a trailing @cols: suffix (never inside parentheses)
  size_t depth = 0;
  size_t at = std::string::npos;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')') --depth;
    else if (s[i] == '@' && depth == 0) at = i;
  }
  if (at != std::string::npos) {
    std::string suffix = trim(s.substr(at + 1));
    if (suffix.rfind("cols:", 0) != 0)
      fail(ErrorCode::parse, "expected @cols: in '" + s + "'");
    node.cols = parse_cols(trim(suffix.substr(5)));
    s = trim(s.substr(0, at));
  }

  size_t open = s.find('(');
  if (open == std::string::npos) {
    node.name = s;
    if (node.name.empty()) fail(ErrorCode::parse, "missing spec name");
    return node;
  }
  if (s.back() != ')')
    fail(ErrorCode::parse, "unbalanced parentheses in '" + s + "'");
  node.name = trim(s.substr(0, open));
  if (node.name.empty()) fail(ErrorCode::parse, "missing spec name in '" + s + "'");

  std::string args = s.substr(open + 1, s.size() - open - 2);
  for (const std::string &raw : split_top_level(args, ',')) {
    std::string arg = trim(raw);
    if (arg.empty()) continue;
    // key=value only when '=' appears ahead of any '('
    size_t eq = std::string::npos;
    for (size_t i = 0; i < arg.size(); ++i) {
      if (arg[i] == '(') break;
      if (arg[i] == '=') { eq = i; break; }
    }
    if (eq != std::string::npos) {
      std::string key = trim(arg.substr(0, eq));
      std::string val = trim(arg.substr(eq + 1));
      if (key.empty()) fail(ErrorCode::parse, "empty key in '" + arg + "'");
      if (val.find('(') != std::string::npos || val.find('@') != std::string::npos)
        node.kv_nodes.emplace(key, parse_node(val));
      else
        node.kv[key] = val;
    } else {
      node.children.push_back(parse_node(arg));
    }
  }
  return node;
}

}  // namespace

double SpecNode::num(const std::string &key) const {
  auto it = kv.find(key);
  if (it == kv.end()) fail(ErrorCode::parse, name + ": missing parameter '" + key + "'");
  char *end = nullptr;
  double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    fail(ErrorCode::parse, name + ": parameter '" + key + "' is not a number");
  return v;
}

double SpecNode::num(const std::string &key, double fallback) const {
  return has(key) ? num(key) : fallback;
}

long SpecNode::integer(const std::string &key, long fallback) const {
  if (!has(key)) return fallback;
  double v = num(key);
  long r = static_cast<long>(v);
  if (static_cast<double>(r) != v)
    fail(ErrorCode::parse, name + ": parameter '" + key + "' must be an integer");
  return r;
}

std::string SpecNode::str(const std::string &key, const std::string &fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

std::string SpecNode::to_text() const {
  std::string out = name;
  std::vector<std::string> args;
  for (const SpecNode &c : children) args.push_back(c.to_text());
  for (const auto &[k, v] : kv) args.push_back(k + "=" + v);
  for (const auto &[k, n] : kv_nodes) args.push_back(k + "=" + n.to_text());
  if (!args.empty()) {
    out += "(";
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) out += ", ";
      out += args[i];
    }
    out += ")";
  }
  if (!cols.empty()) {
    out += "@cols:";
    // compress runs of consecutive indices into a-b ranges
    size_t i = 0;
    bool first = true;
    while (i < cols.size()) {
      size_t j = i;
      while (j + 1 < cols.size() && cols[j + 1] == cols[j] + 1) ++j;
      if (!first) out += ";";
      first = false;
      out += std::to_string(cols[i] + 1);
      if (j > i) out += "-" + std::to_string(cols[j] + 1);
      i = j + 1;
    }
  }
  return out;
}

SpecNode parse_spec(const std::string &text) { return parse_node(text); }

std::vector<std::string> split_top_level(const std::string &text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    else if (c == ')') {
      --depth;
      if (depth < 0) fail(ErrorCode::parse, "unbalanced ')' in '" + text + "'");
    }
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (depth != 0) fail(ErrorCode::parse, "unbalanced '(' in '" + text + "'");
  out.push_back(cur);
  return out;
}

}  // namespace bigtax
