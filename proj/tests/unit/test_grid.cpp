#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "xflie/grid/occupancy.hpp"

namespace {

using namespace xflie;
using grid::Cell;
using grid::CellIndex;
using grid::OccupancyGrid;

sim::WorldSpec world_with(std::vector<sim::GroundTruthTarget> targets) {
  sim::WorldSpec w;
  w.bounds.min = {0, -10, -1};
  w.bounds.max = {20, 10, 10};
  w.targets = std::move(targets);
  w.validate();
  return w;
}

sim::GroundTruthTarget wall(double x0, double x1, double y0, double y1) {
  return {"car",
          lsg::ConvexPolygon2D(std::vector<Eigen::Vector2d>{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}),
          1.5,
          {}};
}

OccupancyGrid all_free(int w, int h, double res, double inflation) {
  OccupancyGrid g(Eigen::Vector2d::Zero(), w, h, res, inflation);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) g.mark_free({i, j});
  }
  return g;
}

TEST(CastRay, FreeCellsThenTheHitCell) {
  const auto world = world_with({wall(5.35, 6.5, -3, 3)});
  OccupancyGrid g(Eigen::Vector2d(0, -10), 30, 29, 0.7, 0.0);
  // y = 0.15 is the centre of row 14.
  grid::cast_ray(g, world, Eigen::Vector2d(0.35, 0.15), 0.0, 20.0);
  for (int i = 0; i < 7; ++i) EXPECT_EQ(g.at({i, 14}), Cell::Free) << i;
  EXPECT_EQ(g.at({7, 14}), Cell::Occupied);
  EXPECT_EQ(g.at({8, 14}), Cell::Unknown);
  EXPECT_EQ(g.count(Cell::Free), 7u);
  EXPECT_EQ(g.count(Cell::Occupied), 1u);
}

TEST(CastRay, RangeLimitsFreeSpace) {
  const auto world = world_with({});
  OccupancyGrid g(Eigen::Vector2d(0, -10), 40, 40, 0.5, 0.0);
  grid::cast_ray(g, world, Eigen::Vector2d(0.25, 0.25), 0.0, 2.0);
  EXPECT_EQ(g.count(Cell::Occupied), 0u);
  EXPECT_EQ(g.count(Cell::Free), 5u);
}

TEST(UpdateOccupancy, IsIdempotent) {
  const auto world = world_with({wall(8, 10, -2, 2)});
  auto g = OccupancyGrid::covering(world.bounds, 0.5);
  const auto robot = sim::RobotState::at({2, 0, 0}, 0.0, sim::Modality::Ground);
  grid::update_occupancy(g, robot, world, {});
  const auto once = g;
  grid::update_occupancy(g, robot, world, {});
  EXPECT_EQ(g, once);
  EXPECT_GT(g.count(Cell::Occupied), 0u);
}

TEST(UpdateOccupancy, EmptyWorldHasNoObstacles) {
  const auto world = world_with({});
  auto g = OccupancyGrid::covering(world.bounds, 0.5);
  grid::update_occupancy(g, sim::RobotState::at({10, 0, 0}, 1.0, sim::Modality::Aerial), world, {});
  EXPECT_EQ(g.count(Cell::Occupied), 0u);
  EXPECT_GT(g.count(Cell::Free), 100u);
}

TEST(UpdateOccupancy, RobotOutsideBoundsThrows) {
  const auto world = world_with({});
  auto g = OccupancyGrid::covering(world.bounds, 0.5);
  EXPECT_THROW(grid::update_occupancy(g, sim::RobotState::at({-5, 0, 0}, 0.0, sim::Modality::Ground), world, {}),
               std::invalid_argument);
}

TEST(OccupancyGrid, OccupiedNeverReverts) {
  auto g = all_free(4, 4, 0.5, 0.0);
  g.mark_occupied({1, 1});
  g.mark_free({1, 1});
  EXPECT_EQ(g.at({1, 1}), Cell::Occupied);
  EXPECT_FALSE(g.traversable({1, 1}));
}

TEST(OccupancyGrid, InflationRadius) {
  auto g = all_free(9, 9, 0.5, 1.0);
  g.mark_occupied({4, 4});
  EXPECT_TRUE(g.inflated({6, 4}));
  EXPECT_FALSE(g.inflated({7, 4}));
  // Diagonal neighbour at 2 cells is sqrt(2) m away.
  EXPECT_FALSE(g.inflated({6, 6}));
  EXPECT_TRUE(g.inflated({5, 5}));
}

TEST(GridPlan, StraightCorridor) {
  auto g = all_free(24, 6, 0.5, 0.5);
  for (int i = 0; i < 24; ++i) {
    g.mark_occupied({i, 0});
    g.mark_occupied({i, 5});
  }
  const auto plan = grid::grid_plan(g, CellIndex{1, 2}, CellIndex{21, 2});
  EXPECT_NEAR(plan.length, 10.0, 1e-9);
  EXPECT_EQ(plan.cells.size(), 21u);
  for (const auto& c : plan.cells) EXPECT_TRUE(g.traversable(c));
}

TEST(GridPlan, InflationClosesANarrowGap) {
  auto g = all_free(11, 11, 0.5, 0.5);
  for (int j = 0; j < 11; ++j) {
    if (j != 5) g.mark_occupied({5, j});
  }
  try {
    grid::grid_plan(g, CellIndex{1, 5}, CellIndex{9, 5});
    FAIL();
  } catch (const grid::Error& e) {
    EXPECT_EQ(e.code(), grid::Errc::Unreachable);
  }
  auto thin = all_free(11, 11, 0.5, 0.0);
  for (int j = 0; j < 11; ++j) {
    if (j != 5) thin.mark_occupied({5, j});
  }
  EXPECT_NEAR(grid::grid_plan(thin, CellIndex{1, 5}, CellIndex{9, 5}).length, 4.0, 1e-9);
}

TEST(GridPlan, ErrorCodes) {
  auto g = all_free(5, 5, 0.5, 0.0);
  g.mark_occupied({0, 0});
  auto code = [&](auto&& f) {
    try {
      f();
    } catch (const grid::Error& e) {
      return e.code();
    }
    throw std::runtime_error("no error");
  };
  EXPECT_EQ(code([&] { grid::grid_plan(g, CellIndex{0, 0}, CellIndex{4, 4}); }), grid::Errc::StartOccupied);
  EXPECT_EQ(code([&] { grid::grid_plan(g, CellIndex{1, 1}, CellIndex{9, 9}); }), grid::Errc::OutOfGrid);
  EXPECT_EQ(code([&] { grid::grid_plan(g, Eigen::Vector2d(1, 1), Eigen::Vector2d(-3, 1)); }),
            grid::Errc::OutOfGrid);
  OccupancyGrid unknown(Eigen::Vector2d::Zero(), 5, 5, 0.5, 0.0);
  unknown.mark_free({0, 0});
  EXPECT_EQ(code([&] { grid::grid_plan(unknown, CellIndex{0, 0}, CellIndex{4, 4}); }), grid::Errc::Unreachable);
}

// Bellman-Ford relaxation to a fixed point over the same move rules.
double relaxation_oracle(const OccupancyGrid& g, CellIndex s, CellIndex t) {
  const int w = g.width();
  const int h = g.height();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(static_cast<std::size_t>(w) * h, inf);
  auto at = [&](int i, int j) -> double& { return d[static_cast<std::size_t>(j) * w + i]; };
  at(s.i, s.j) = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (!g.traversable({i, j}) || at(i, j) == inf) continue;
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            const int ni = i + di;
            const int nj = j + dj;
            if (ni < 0 || nj < 0 || ni >= w || nj >= h || !g.traversable({ni, nj})) continue;
            if (di != 0 && dj != 0 && (!g.traversable({i + di, j}) || !g.traversable({i, j + dj}))) continue;
            const double c = at(i, j) + g.resolution() * ((di != 0 && dj != 0) ? std::sqrt(2.0) : 1.0);
            if (c < at(ni, nj) - 1e-12) {
              at(ni, nj) = c;
              changed = true;
            }
          }
        }
      }
    }
  }
  return at(t.i, t.j);
}

TEST(GridPlan, MatchesRelaxationOracle) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> size(2, 30);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int solved = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int w = size(rng);
    const int h = size(rng);
    auto g = all_free(w, h, 0.5, trial % 3 == 0 ? 0.5 : 0.0);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (u(rng) < 0.25) g.mark_occupied({i, j});
      }
    }
    const CellIndex s{0, 0};
    const CellIndex t{w - 1, h - 1};
    if (!g.traversable(s)) continue;
    const double oracle = relaxation_oracle(g, s, t);
    if (std::isinf(oracle)) {
      EXPECT_THROW(grid::grid_plan(g, s, t), grid::Error);
      continue;
    }
    const auto plan = grid::grid_plan(g, s, t);
    EXPECT_NEAR(plan.length, oracle, 1e-9) << "trial " << trial;
    ASSERT_FALSE(plan.cells.empty());
    EXPECT_EQ(plan.cells.front(), s);
    EXPECT_EQ(plan.cells.back(), t);
    for (std::size_t k = 1; k < plan.cells.size(); ++k) {
      const auto& a = plan.cells[k - 1];
      const auto& b = plan.cells[k];
      EXPECT_LE(std::max(std::abs(a.i - b.i), std::abs(a.j - b.j)), 1);
      EXPECT_TRUE(g.traversable(b));
    }
    ++solved;
  }
  EXPECT_GT(solved, 20);
}

TEST(GridPlan, TraversableEdgeCount) {
  const auto g = all_free(3, 2, 0.5, 0.0);
  // 3 + 4 axis edges, 2 x 2 diagonals.
  EXPECT_EQ(g.traversable_edges(), 11u);
}

TEST(ExportPgm, WritesHeaderAndSidecar) {
  auto g = all_free(4, 3, 0.5, 0.0);
  g.mark_occupied({0, 2});
  const auto dir = std::filesystem::temp_directory_path() / "xflie_grid_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "g.pgm";
  grid::export_pgm(g, path);
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxv = 0;
  in >> magic >> w >> h >> maxv;
  in.get();
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(w, 4);
  EXPECT_EQ(h, 3);
  EXPECT_EQ(maxv, 255);
  // Top-left pixel is the max-y row, column 0.
  EXPECT_EQ(in.get(), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "g.pgm.json"));
  std::filesystem::remove_all(dir);
}

}  // namespace
