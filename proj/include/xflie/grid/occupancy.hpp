#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "xflie/sim/camera.hpp"
#include "xflie/sim/world.hpp"

namespace xflie::grid {

enum class Errc {
  StartOccupied,
  Unreachable,
  OutOfGrid,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

enum class Cell : std::uint8_t { Unknown, Free, Occupied };

struct CellIndex {
  int i = 0;  // column (x)
  int j = 0;  // row (y)
  bool operator==(const CellIndex&) const = default;
};

/// 2D occupancy grid over the world's xy bounds. Occupied cells never revert.
/// A cell is traversable when it is Free and no Occupied cell centre lies
/// within the inflation radius of its own centre.
class OccupancyGrid {
 public:
  OccupancyGrid(const Eigen::Vector2d& origin, int width, int height, double resolution,
                double inflation_radius);
  /// Covers the bounds; inflation defaults to 2 x resolution.
  static OccupancyGrid covering(const sim::Aabb& bounds, double resolution = 0.7,
                                std::optional<double> inflation_radius = std::nullopt);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double inflation_radius() const { return inflation_; }
  const Eigen::Vector2d& origin() const { return origin_; }

  bool in_grid(CellIndex c) const { return c.i >= 0 && c.j >= 0 && c.i < width_ && c.j < height_; }
  std::optional<CellIndex> cell_of(const Eigen::Vector2d& p) const;
  Eigen::Vector2d center(CellIndex c) const;

  Cell at(CellIndex c) const { return cells_[index(c)]; }
  void mark_free(CellIndex c);
  void mark_occupied(CellIndex c);
  bool inflated(CellIndex c) const { return inflation_count_[index(c)] > 0; }
  bool traversable(CellIndex c) const { return at(c) == Cell::Free && !inflated(c); }

  std::size_t count(Cell kind) const;
  /// Undirected 8-connected edges between traversable cells (same rule as grid_plan).
  std::size_t traversable_edges() const;

  bool operator==(const OccupancyGrid& o) const { return cells_ == o.cells_ && origin_ == o.origin_ &&
                                                     width_ == o.width_ && height_ == o.height_; }

 private:
  std::size_t index(CellIndex c) const { return static_cast<std::size_t>(c.j) * width_ + c.i; }

  Eigen::Vector2d origin_;
  int width_;
  int height_;
  double resolution_;
  double inflation_;
  std::vector<Cell> cells_;
  std::vector<std::uint16_t> inflation_count_;
  std::vector<CellIndex> kernel_;
};

/// Casts one ray from `from` along `heading` for at most `range` metres.
/// Cells crossed before the first footprint hit become Free, the hit cell Occupied.
void cast_ray(OccupancyGrid& grid, const sim::WorldSpec& world, const Eigen::Vector2d& from,
              double heading, double range);

/// Ray-casts the camera's horizontal field of view (about one ray per degree).
/// The robot's own cell is marked Free. Throws invalid_argument when the robot
/// lies outside the world bounds.
void update_occupancy(OccupancyGrid& grid, const sim::RobotState& robot, const sim::WorldSpec& world,
                      const sim::CameraModel& cam);

/// Marks the cells under a travelled trajectory Free (the robot occupied them).
void mark_trace(OccupancyGrid& grid, std::span<const lsg::Pose6> trace);

struct GridPlan {
  std::vector<CellIndex> cells;
  double length = 0.0;
  double plan_time_s = 0.0;
  std::size_t expanded = 0;
};

/// Dijkstra over 8-connected traversable cells. Diagonal moves need both
/// side cells traversable. Step cost is resolution (axis) or sqrt(2) x resolution.
/// With `timing_repeats` > 1 the search is repeated and timed by its fastest run.
GridPlan grid_plan(const OccupancyGrid& grid, const Eigen::Vector2d& start, const Eigen::Vector2d& goal,
                   int timing_repeats = 1);
GridPlan grid_plan(const OccupancyGrid& grid, CellIndex start, CellIndex goal, int timing_repeats = 1);

/// Greyscale snapshot: Unknown 128, Free 255, Occupied 0, inflated Free 200.
/// Row 0 of the image is the top (max y) row of the grid. A JSON sidecar with
/// origin/resolution/size is written next to it (`<path>.json`).
void export_pgm(const OccupancyGrid& grid, const std::filesystem::path& path);

}  // namespace xflie::grid
