#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "xflie/bench/metrics.hpp"
#include "xflie/bench/runner.hpp"
#include "xflie/bench/scenario.hpp"
#include "xflie/bench/worlds.hpp"

namespace {

using namespace xflie;

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("xflie_bench_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(RingWorld, ValidForManySizes) {
  for (int t : {1, 2, 3, 5, 10, 20}) {
    auto g = bench::ring_world(t, 3);
    EXPECT_EQ(g.world.targets.size(), static_cast<std::size_t>(t));
    EXPECT_NO_THROW(g.world.validate());
    EXPECT_TRUE(g.world.bounds.contains(g.start));
    EXPECT_FALSE(sim::inside_any_footprint(g.world, g.start.head<2>()));
  }
}

TEST(RingWorld, AlternatesVehicleClasses) {
  const auto g = bench::ring_world(4, 1);
  EXPECT_EQ(g.world.targets[0].sem_class, "car");
  EXPECT_EQ(g.world.targets[1].sem_class, "truck");
  EXPECT_EQ(g.world.targets[0].features.size(), 12u);
}

TEST(Metrics, CsvRoundTrip) {
  const std::vector<bench::MetricsRow> rows{{"s", "lsg", "q0", "pose", 12, 1.5e-6, 3.25, true},
                                            {"s", "grid", "q0", "grid", 9000, 2e-4, 3.5, false}};
  const auto dir = temp_dir("csv");
  bench::write_metrics_csv(dir / "m.csv", rows);
  EXPECT_THAT(read_file(dir / "m.csv"),
              ::testing::StartsWith("scenario,planner,query_id,layer,edges_exposed,plan_time_s,length_m,ok\n"));
  EXPECT_EQ(bench::read_metrics_csv(dir / "m.csv"), rows);
  std::filesystem::remove_all(dir);
}

TEST(Metrics, MissingOrMalformedFiles) {
  const auto dir = temp_dir("missing");
  auto code = [](const std::filesystem::path& p) {
    try {
      bench::read_metrics_csv(p);
    } catch (const bench::Error& e) {
      return e.code();
    }
    throw std::runtime_error("no error");
  };
  EXPECT_EQ(code(dir / "none.csv"), bench::Errc::MissingMetrics);
  std::ofstream(dir / "bad.csv") << "a,b\n1,2\n";
  EXPECT_EQ(code(dir / "bad.csv"), bench::Errc::MissingMetrics);
  std::filesystem::remove_all(dir);
}

TEST(Metrics, Median) {
  EXPECT_DOUBLE_EQ(bench::median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(bench::median({4, 1, 2, 3}), 2.5);
  EXPECT_DOUBLE_EQ(bench::median({}), 0.0);
}

TEST(Compare, NeedsBothPlanners) {
  const std::vector<bench::MetricsRow> lsg_only{{"s", "lsg", "q0", "pose", 1, 1e-6, 1.0, true}};
  try {
    bench::compare_planners(lsg_only);
    FAIL();
  } catch (const bench::Error& e) {
    EXPECT_EQ(e.code(), bench::Errc::MissingMetrics);
  }
  EXPECT_THROW(bench::compare_planners({}), bench::Error);
}

TEST(Compare, SpeedupAndLengthRatio) {
  const std::vector<bench::MetricsRow> rows{
      {"s", "lsg", "q0", "target", 4, 1e-6, 0.0, true},   {"s", "lsg", "q0", "pose", 8, 3e-6, 0.0, true},
      {"s", "lsg", "q0", "query", 12, 4e-6, 10.0, true},  {"s", "grid", "q0", "grid", 500, 2e-4, 8.0, true},
      {"s", "lsg", "q1", "query", 12, 4e-6, 6.0, true},   {"s", "grid", "q1", "grid", 500, 2e-4, 0.0, false}};
  const auto report = bench::compare_planners(rows);
  ASSERT_EQ(report.size(), 1u);
  const auto& r = report[0];
  EXPECT_EQ(r.lsg.calls, 2u);
  EXPECT_DOUBLE_EQ(r.lsg.median_time_s, 2e-6);
  EXPECT_DOUBLE_EQ(r.speedup, 100.0);
  ASSERT_EQ(r.queries.size(), 2u);
  EXPECT_DOUBLE_EQ(*r.queries[0].length_ratio, 1.25);
  EXPECT_FALSE(r.queries[1].length_ratio.has_value());
  EXPECT_DOUBLE_EQ(r.both_valid_fraction, 0.5);
  EXPECT_THAT(bench::format_summary_table(report), ::testing::HasSubstr("s"));
}

TEST(Scenario, LoadsTheShippedFiles) {
  for (const auto& entry : std::filesystem::directory_iterator(XFLIE_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto spec = bench::load_scenario(entry.path());
    EXPECT_FALSE(spec.id.empty()) << entry.path();
    EXPECT_FALSE(spec.queries.empty()) << entry.path();
    EXPECT_FALSE(spec.world.targets.empty()) << entry.path();
  }
}

TEST(Scenario, ConfigErrors) {
  for (const char* bad : {R"({"id": "x"})", R"({"id": "x", "world": {"generator": "grid"}})",
                          R"({"id": "x", "world": {"generator": "ring", "targets": 0}})",
                          R"({"id": "x", "world": {"generator": "ring", "targets": 2}, "planner": "rrt"})",
                          R"({"id": "x", "world": {"file": "nope.json"}})"}) {
    try {
      bench::scenario_from_json(nlohmann::json::parse(bad));
      FAIL() << bad;
    } catch (const bench::Error& e) {
      EXPECT_EQ(e.code(), bench::Errc::ConfigError) << bad;
    }
  }
  EXPECT_THROW(bench::load_scenario("/nonexistent/scenario.json"), bench::Error);
}

bench::ScenarioSpec small_spec() {
  return bench::scenario_from_json(nlohmann::json::parse(R"({
    "id": "small", "seed": 2,
    "world": {"generator": "ring", "targets": 2},
    "mission": {"modality": "ground"},
    "grid_resolution": 0.5,
    "queries": ["Visit front bumper-1 in Level-0 of car-0", "Visit hood-1 in Level-0 of car-9"]
  })"));
}

TEST(Runner, WritesArtifactsAndRecordsBothPlanners) {
  const auto dir = temp_dir("run");
  bench::RunOptions opts;
  opts.out_dir = dir;
  const auto r = bench::run_scenario(small_spec(), opts);
  EXPECT_FALSE(r.aborted) << r.abort_reason;
  EXPECT_EQ(r.inspected, 2u);
  EXPECT_EQ(r.query_plans.size(), 1u);
  ASSERT_EQ(r.query_errors.size(), 1u);
  EXPECT_THAT(r.query_errors[0], ::testing::HasSubstr("UnknownLabel"));
  for (const char* f : {"mission_log.jsonl", "graph.lsg.json", "metrics.csv", "grid.pgm", "summary.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const auto rows = bench::read_metrics_csv(dir / "metrics.csv");
  const auto grid_rows = std::count_if(rows.begin(), rows.end(), [](const auto& m) { return m.planner == "grid"; });
  const auto query_rows = std::count_if(rows.begin(), rows.end(), [](const auto& m) { return m.layer == "query"; });
  EXPECT_EQ(grid_rows, query_rows);
  EXPECT_NO_THROW(bench::compare_planners(rows));
  std::filesystem::remove_all(dir);
}

TEST(Runner, DeterministicArtifacts) {
  const auto a = temp_dir("det_a");
  const auto b = temp_dir("det_b");
  bench::RunOptions opts;
  opts.out_dir = a;
  bench::run_scenario(small_spec(), opts);
  opts.out_dir = b;
  bench::run_scenario(small_spec(), opts);
  for (const char* f : {"mission_log.jsonl", "graph.lsg.json", "grid.pgm"}) {
    EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Runner, LsgOnlyRecordsNoGridRows) {
  bench::RunOptions opts;
  opts.write_artifacts = false;
  opts.planner = bench::PlannerMode::Lsg;
  const auto r = bench::run_scenario(small_spec(), opts);
  for (const auto& row : r.rows) EXPECT_EQ(row.planner, "lsg");
}

}  // namespace
