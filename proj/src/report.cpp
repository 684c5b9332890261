#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "bigtax/errors.hpp"
#include "bigtax/report.hpp"

namespace bigtax {

namespace {

std::vector<std::string> ordered_unique(const std::vector<EvalEntry> &entries,
                                        bool datasets) {
  std::vector<std::string> out;
  for (const auto &e : entries) {
    const std::string &v = datasets ? e.dataset : e.method;
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

const EvalEntry *find_entry(const EvalReport &r, const std::string &ds,
                            const std::string &method) {
  for (const auto &e : r.entries)
    if (e.dataset == ds && e.method == method) return &e;
  return nullptr;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string RunStamp::comment_block() const {
  std::string out;
  for (const auto &[k, v] : kv) out += "# " + k + "=" + v + "\n";
  return out;
}

std::string RunStamp::one_line() const {
  std::string out;
  for (const auto &[k, v] : kv) {
    if (!out.empty()) out += "; ";
    out += k + "=" + v;
  }
  return out;
}

std::string render_long_csv(const EvalReport &report, const RunStamp &stamp) {
  std::string out = stamp.comment_block();
  out += "dataset,method,r,error\n";
  for (const auto &e : report.entries)
    for (std::size_t t = 0; t < e.errors.size(); ++t)
      out += e.dataset + "," + e.method + "," + std::to_string(e.r_ids[t]) + "," +
             format_double(e.errors[t]) + "\n";
  return out;
}

std::string render_summary_csv(const EvalReport &report, const RunStamp &stamp) {
  std::string out = stamp.comment_block();
  out += "dataset,method,mean,sd,min,q1,median,q3,max,R,test_fraction,seed,note\n";
  for (const auto &e : report.entries) {
    out += e.dataset + "," + e.method + ",";
    if (e.errors.empty()) {
      out += ",,,,,,,";
    } else {
      out += format_double(e.mean) + "," + format_double(e.sd) + "," +
             format_double(e.min) + "," + format_double(e.q1) + "," +
             format_double(e.median) + "," + format_double(e.q3) + "," +
             format_double(e.max) + ",";
    }
    out += std::to_string(e.R) + "," + format_double(e.test_fraction) + "," +
           std::to_string(e.seed) + ",";
    if (!e.skip_reason.empty())
      out += "skipped: " + e.skip_reason;
    else if (!e.failures.empty())
      out += std::to_string(e.failures.size()) + " replication(s) failed";
    out += "\n";
  }
  return out;
}

std::string render_markdown(const EvalReport &report, const RunStamp &stamp) {
  auto datasets = ordered_unique(report.entries, true);
  auto methods = ordered_unique(report.entries, false);
  std::string out = "Mean test error over R=" + std::to_string(report.R) +
                    " replications (test fraction " +
                    fixed4(report.test_fraction) + ")\n\n";
  out += "| dataset |";
  for (const auto &m : methods) out += " " + m + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < methods.size(); ++i) out += "---|";
  out += "\n";
  for (const auto &ds : datasets) {
    out += "| " + ds + " |";
    for (const auto &m : methods) {
      const EvalEntry *e = find_entry(report, ds, m);
      if (!e || e->errors.empty())
        out += " - |";
      else
        out += " " + fixed4(e->mean) + " |";
    }
    out += "\n";
  }
  out += "\nConfiguration: " + stamp.one_line() + "\n";
  return out;
}

nlohmann::json report_to_json(const EvalReport &report, const RunStamp &stamp) {
  nlohmann::json config = nlohmann::json::object();
  for (const auto &[k, v] : stamp.kv) config[k] = v;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto &e : report.entries) {
    nlohmann::json je{{"dataset", e.dataset},
                      {"method", e.method},
                      {"R", e.R},
                      {"test_fraction", e.test_fraction},
                      {"seed", e.seed}};
    if (!e.skip_reason.empty()) {
      je["skipped"] = e.skip_reason;
    } else {
      je["errors"] = e.errors;
      je["r_ids"] = e.r_ids;
      je["failures"] = e.failures;
      je["mean"] = e.mean;
      je["sd"] = e.sd;
      je["min"] = e.min;
      je["q1"] = e.q1;
      je["median"] = e.median;
      je["q3"] = e.q3;
      je["max"] = e.max;
    }
    entries.push_back(std::move(je));
  }
  return {{"config", config},
          {"R", report.R},
          {"test_fraction", report.test_fraction},
          {"seed", report.seed},
          {"standardized", report.standardized},
          {"entries", entries}};
}

std::string render_svg(const EvalReport &report, const RunStamp &stamp) {
  std::vector<const EvalEntry *> drawn;
  for (const auto &e : report.entries)
    if (!e.errors.empty()) drawn.push_back(&e);
  if (drawn.empty()) fail(ErrorCode::empty_data, "svg: report has no results to plot");

  auto datasets = ordered_unique(report.entries, true);

  const double box_w = 46, box_gap = 18, group_gap = 46;
  const double ml = 70, mt = 30, mb = 90, plot_h = 300;

  double ymax = 0.0;
  for (const auto *e : drawn) ymax = std::max(ymax, e->max);
  ymax = std::max(0.05, std::ceil(ymax * 20.0) / 20.0);
  auto ty = [&](double v) { return mt + plot_h * (1.0 - v / ymax); };

  // group layout: per dataset, its drawable entries in report order
  struct Group {
    std::string dataset;
    std::vector<const EvalEntry *> boxes;
    double x0 = 0;
  };
  std::vector<Group> groups;
  for (const auto &ds : datasets) {
    Group gr;
    gr.dataset = ds;
    for (const auto *e : drawn)
      if (e->dataset == ds) gr.boxes.push_back(e);
    if (!gr.boxes.empty()) groups.push_back(std::move(gr));
  }
  double x = ml;
  for (auto &gr : groups) {
    gr.x0 = x;
    x += gr.boxes.size() * (box_w + box_gap) - box_gap + group_gap;
  }
  double width = x - group_gap + 30;
  double height = mt + plot_h + mb;

  std::string s;
  auto num = [](double v) { return format_double(v); };
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(width) +
       " " + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<desc>" + stamp.one_line() + "</desc>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" +
       num(height) + "\" fill=\"white\"/>\n";

  // axes and y grid
  s += "<line x1=\"" + num(ml - 10) + "\" y1=\"" + num(ty(0)) + "\" x2=\"" +
       num(width - 15) + "\" y2=\"" + num(ty(0)) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(ml - 10) + "\" y1=\"" + num(ty(0)) + "\" x2=\"" +
       num(ml - 10) + "\" y2=\"" + num(mt) + "\" stroke=\"black\"/>\n";
  double step = ymax > 0.5 ? 0.1 : 0.05;
  for (double v = 0.0; v <= ymax + 1e-9; v += step) {
    s += "<line x1=\"" + num(ml - 14) + "\" y1=\"" + num(ty(v)) + "\" x2=\"" +
         num(ml - 10) + "\" y2=\"" + num(ty(v)) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(ml - 18) + "\" y=\"" + num(ty(v) + 4) +
         "\" text-anchor=\"end\">" + fixed4(v).substr(0, 4) + "</text>\n";
  }
  s += "<text x=\"14\" y=\"" + num(mt + plot_h / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       num(mt + plot_h / 2) + ")\">test error</text>\n";

  for (const auto &gr : groups) {
    for (std::size_t i = 0; i < gr.boxes.size(); ++i) {
      const EvalEntry *e = gr.boxes[i];
      double bx = gr.x0 + i * (box_w + box_gap);
      double cx = bx + box_w / 2;
      // whiskers with caps, box, median
      s += "<line x1=\"" + num(cx) + "\" y1=\"" + num(ty(e->min)) + "\" x2=\"" +
           num(cx) + "\" y2=\"" + num(ty(e->q1)) + "\" stroke=\"black\"/>\n";
      s += "<line x1=\"" + num(cx) + "\" y1=\"" + num(ty(e->q3)) + "\" x2=\"" +
           num(cx) + "\" y2=\"" + num(ty(e->max)) + "\" stroke=\"black\"/>\n";
      s += "<line x1=\"" + num(cx - 12) + "\" y1=\"" + num(ty(e->min)) +
           "\" x2=\"" + num(cx + 12) + "\" y2=\"" + num(ty(e->min)) +
           "\" stroke=\"black\"/>\n";
      s += "<line x1=\"" + num(cx - 12) + "\" y1=\"" + num(ty(e->max)) +
           "\" x2=\"" + num(cx + 12) + "\" y2=\"" + num(ty(e->max)) +
           "\" stroke=\"black\"/>\n";
      s += "<rect x=\"" + num(bx) + "\" y=\"" + num(ty(e->q3)) + "\" width=\"" +
           num(box_w) + "\" height=\"" + num(ty(e->q1) - ty(e->q3)) +
           "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
      s += "<line x1=\"" + num(bx) + "\" y1=\"" + num(ty(e->median)) +
           "\" x2=\"" + num(bx + box_w) + "\" y2=\"" + num(ty(e->median)) +
           "\" stroke=\"black\" stroke-width=\"2\"/>\n";
      s += "<text x=\"" + num(cx) + "\" y=\"" + num(mt + plot_h + 16) +
           "\" text-anchor=\"end\" transform=\"rotate(-40 " + num(cx) + " " +
           num(mt + plot_h + 16) + ")\">" + e->method + "</text>\n";
    }
    double gw = gr.boxes.size() * (box_w + box_gap) - box_gap;
    s += "<text x=\"" + num(gr.x0 + gw / 2) + "\" y=\"" + num(height - 12) +
         "\" text-anchor=\"middle\" font-weight=\"bold\">" + gr.dataset +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void write_atomic(const std::string &path, const std::string &bytes) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot open " + tmp + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::io, "write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    fail(ErrorCode::io, "cannot rename " + tmp + " to " + path);
}

}  // namespace bigtax
