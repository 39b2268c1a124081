#include "xflie/bench/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "xflie/bench/scenario.hpp"

namespace xflie::bench {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

const char* kHeader = "scenario,planner,query_id,layer,edges_exposed,plan_time_s,length_m,ok";

bool is_search(const MetricsRow& r) {
  return r.planner == "lsg" && (r.layer == "target" || r.layer == "level" || r.layer == "pose");
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kHeader << "\n";
  for (const auto& r : rows) {
    out << quote(r.scenario) << "," << r.planner << "," << quote(r.query_id) << "," << r.layer << ","
        << r.edges_exposed << "," << fmt(r.plan_time_s) << "," << fmt(r.length_m) << "," << (r.ok ? 1 : 0)
        << "\n";
  }
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_metrics_csv(out, rows);
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::MissingMetrics, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw Error(Errc::MissingMetrics, path.string() + ": bad header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8) throw Error(Errc::MissingMetrics, path.string() + ": bad row '" + line + "'");
    try {
      rows.push_back({f[0], f[1], f[2], f[3], std::stoull(f[4]), std::stod(f[5]), std::stod(f[6]), f[7] == "1"});
    } catch (const std::exception&) {
      throw Error(Errc::MissingMetrics, path.string() + ": bad number in '" + line + "'");
    }
  }
  return rows;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Summary summarize(const std::vector<const MetricsRow*>& rows) {
  std::vector<double> e;
  std::vector<double> t;
  std::vector<double> l;
  for (const auto* r : rows) {
    if (!r->ok) continue;
    e.push_back(static_cast<double>(r->edges_exposed));
    t.push_back(r->plan_time_s);
    l.push_back(r->length_m);
  }
  Summary s;
  s.calls = e.size();
  if (e.empty()) return s;
  s.median_edges = median(e);
  s.max_edges = *std::max_element(e.begin(), e.end());
  s.median_time_s = median(t);
  s.max_time_s = *std::max_element(t.begin(), t.end());
  s.median_length_m = median(l);
  s.max_length_m = *std::max_element(l.begin(), l.end());
  return s;
}

std::vector<ScenarioComparison> compare_planners(const std::vector<MetricsRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const MetricsRow*>> by_scenario;
  for (const auto& r : rows) {
    if (!by_scenario.contains(r.scenario)) order.push_back(r.scenario);
    by_scenario[r.scenario].push_back(&r);
  }
  if (order.empty()) throw Error(Errc::MissingMetrics, "no metrics rows");

  std::vector<ScenarioComparison> report;
  for (const auto& id : order) {
    const auto& rs = by_scenario[id];
    std::vector<const MetricsRow*> search;
    std::vector<const MetricsRow*> target;
    std::vector<const MetricsRow*> grid;
    std::vector<std::string> qorder;
    std::map<std::string, QueryComparison> q;
    for (const auto* r : rs) {
      if (is_search(*r)) search.push_back(r);
      if (is_search(*r) && r->layer == "target") target.push_back(r);
      if (r->planner == "grid") grid.push_back(r);
      if (r->layer == "query" || r->planner == "grid") {
        if (!q.contains(r->query_id)) {
          qorder.push_back(r->query_id);
          q[r->query_id].query_id = r->query_id;
        }
        auto& qc = q[r->query_id];
        if (r->planner == "grid") {
          qc.grid_ok = r->ok;
          qc.grid_length_m = r->length_m;
        } else {
          qc.lsg_ok = r->ok;
          qc.lsg_length_m = r->length_m;
        }
      }
    }
    if (search.empty()) throw Error(Errc::MissingMetrics, id + ": no LSG search rows");
    if (grid.empty()) throw Error(Errc::MissingMetrics, id + ": no grid rows");

    ScenarioComparison c;
    c.scenario = id;
    c.lsg = summarize(search);
    c.lsg_target_layer = summarize(target);
    c.grid = summarize(grid);
    c.speedup = c.lsg.median_time_s > 0.0 ? c.grid.median_time_s / c.lsg.median_time_s : 0.0;
    std::size_t both = 0;
    std::vector<double> ratios;
    for (const auto& qid : qorder) {
      auto qc = q[qid];
      if (qc.lsg_ok && qc.grid_ok) {
        ++both;
        if (qc.grid_length_m > 0.0) {
          qc.length_ratio = qc.lsg_length_m / qc.grid_length_m;
          ratios.push_back(*qc.length_ratio);
        }
      }
      c.queries.push_back(qc);
    }
    c.both_valid_fraction = qorder.empty() ? 0.0 : static_cast<double>(both) / static_cast<double>(qorder.size());
    c.median_length_ratio = median(ratios);
    report.push_back(std::move(c));
  }
  return report;
}

void write_comparison_csv(const std::filesystem::path& path, const std::vector<ScenarioComparison>& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "scenario,planner,calls,median_edges,max_edges,median_time_s,max_time_s,median_length_m,max_length_m,"
         "speedup,both_valid_fraction,median_length_ratio\n";
  for (const auto& c : report) {
    auto line = [&](const char* name, const Summary& s) {
      out << quote(c.scenario) << "," << name << "," << s.calls << "," << fmt(s.median_edges) << ","
          << fmt(s.max_edges) << "," << fmt(s.median_time_s) << "," << fmt(s.max_time_s) << ","
          << fmt(s.median_length_m) << "," << fmt(s.max_length_m) << "," << fmt(c.speedup) << ","
          << fmt(c.both_valid_fraction) << "," << fmt(c.median_length_ratio) << "\n";
    };
    line("lsg", c.lsg);
    line("lsg-target", c.lsg_target_layer);
    line("grid", c.grid);
  }
}

std::string format_summary_table(const std::vector<ScenarioComparison>& report) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %-10s %6s %10s %9s %13s %13s %10s\n", "scenario", "planner", "calls",
                "med.edges", "max.edges", "med.time[us]", "max.time[us]", "med.len[m]");
  out << buf;
  for (const auto& c : report) {
    auto line = [&](const char* name, const Summary& s) {
      std::snprintf(buf, sizeof buf, "%-14s %-10s %6zu %10.1f %9.0f %13.2f %13.2f %10.2f\n", c.scenario.c_str(), name,
                    s.calls, s.median_edges, s.max_edges, s.median_time_s * 1e6, s.max_time_s * 1e6,
                    s.median_length_m);
      out << buf;
    };
    line("lsg", c.lsg);
    line("lsg-target", c.lsg_target_layer);
    line("grid", c.grid);
    std::snprintf(buf, sizeof buf, "%-14s speedup %.1fx, both planners valid on %.1f%% of queries, median LSG/grid length %.3f\n",
                  c.scenario.c_str(), c.speedup, 100.0 * c.both_valid_fraction, c.median_length_ratio);
    out << buf;
  }
  return out.str();
}

}  // namespace xflie::bench
