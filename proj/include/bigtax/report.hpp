#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bigtax/eval.hpp"
#include "json.hpp"

namespace bigtax {

// resolved run configuration, echoed into every artifact so any number in any
// output can be traced to the exact invocation that produced it
struct RunStamp {
  std::vector<std::pair<std::string, std::string>> kv;
  void add(const std::string &key, const std::string &value) {
    kv.emplace_back(key, value);
  }
  std::string comment_block() const;  // "# key=value" lines
  std::string one_line() const;       // "key=value; key=value"
};

std::string render_long_csv(const EvalReport &report, const RunStamp &stamp);
std::string render_summary_csv(const EvalReport &report, const RunStamp &stamp);
std::string render_markdown(const EvalReport &report, const RunStamp &stamp);
nlohmann::json report_to_json(const EvalReport &report, const RunStamp &stamp);
std::string render_svg(const EvalReport &report, const RunStamp &stamp);

void write_atomic(const std::string &path, const std::string &bytes);

}  // namespace bigtax
