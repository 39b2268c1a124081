#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace xflie::bench {

/// One planner call. Layer is target/level/pose for LSG searches, "query" for
/// the per-query LSG aggregate and "grid" for grid_plan calls.
struct MetricsRow {
  std::string scenario;
  std::string planner;
  std::string query_id;
  std::string layer;
  std::size_t edges_exposed = 0;
  double plan_time_s = 0.0;
  double length_m = 0.0;
  bool ok = true;

  bool operator==(const MetricsRow&) const = default;
};

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);
/// Throws Error(MissingMetrics) when the file is missing or malformed.
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

double median(std::vector<double> values);

struct Summary {
  std::size_t calls = 0;
  double median_edges = 0.0;
  double max_edges = 0.0;
  double median_time_s = 0.0;
  double max_time_s = 0.0;
  double median_length_m = 0.0;
  double max_length_m = 0.0;
};

/// Successful rows only.
Summary summarize(const std::vector<const MetricsRow*>& rows);

struct QueryComparison {
  std::string query_id;
  bool lsg_ok = false;
  bool grid_ok = false;
  double lsg_length_m = 0.0;
  double grid_length_m = 0.0;
  /// LSG over grid path length, when both succeeded.
  std::optional<double> length_ratio;
};

struct ScenarioComparison {
  std::string scenario;
  /// Per-search rows (target/level/pose layers).
  Summary lsg;
  Summary lsg_target_layer;
  Summary grid;
  /// grid median plan time over LSG median plan time.
  double speedup = 0.0;
  std::vector<QueryComparison> queries;
  double both_valid_fraction = 0.0;
  double median_length_ratio = 0.0;
};

/// Groups rows by scenario. Throws Error(MissingMetrics) when a scenario has
/// no LSG search rows or no grid rows.
std::vector<ScenarioComparison> compare_planners(const std::vector<MetricsRow>& rows);

void write_comparison_csv(const std::filesystem::path& path, const std::vector<ScenarioComparison>& report);
std::string format_summary_table(const std::vector<ScenarioComparison>& report);

}  // namespace xflie::bench
