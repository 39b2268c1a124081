#include "xflie/grid/occupancy.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <algorithm>
#include <queue>

#include <json.hpp>

namespace xflie::grid {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::StartOccupied: return "StartOccupied";
    case Errc::Unreachable: return "Unreachable";
    case Errc::OutOfGrid: return "OutOfGrid";
  }
  return "Unknown";
}

OccupancyGrid::OccupancyGrid(const Eigen::Vector2d& origin, int width, int height, double resolution,
                             double inflation_radius)
    : origin_(origin),
      width_(width),
      height_(height),
      resolution_(resolution),
      inflation_(inflation_radius) {
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  if (width <= 0 || height <= 0) throw std::invalid_argument("grid must have at least one cell");
  if (inflation_radius < 0.0) throw std::invalid_argument("inflation radius must be non-negative");
  cells_.assign(static_cast<std::size_t>(width) * height, Cell::Unknown);
  inflation_count_.assign(cells_.size(), 0);
  const int r = static_cast<int>(std::floor(inflation_ / resolution_ + 1e-9));
  for (int dj = -r; dj <= r; ++dj) {
    for (int di = -r; di <= r; ++di) {
      if (std::hypot(di, dj) * resolution_ <= inflation_ + 1e-9) kernel_.push_back({di, dj});
    }
  }
}

OccupancyGrid OccupancyGrid::covering(const sim::Aabb& bounds, double resolution,
                                      std::optional<double> inflation_radius) {
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  const Eigen::Vector2d extent = (bounds.max - bounds.min).head<2>();
  const int w = std::max(1, static_cast<int>(std::ceil(extent.x() / resolution - 1e-9)));
  const int h = std::max(1, static_cast<int>(std::ceil(extent.y() / resolution - 1e-9)));
  return OccupancyGrid(bounds.min.head<2>(), w, h, resolution, inflation_radius.value_or(2.0 * resolution));
}

std::optional<CellIndex> OccupancyGrid::cell_of(const Eigen::Vector2d& p) const {
  const Eigen::Vector2d q = (p - origin_) / resolution_;
  CellIndex c{static_cast<int>(std::floor(q.x())), static_cast<int>(std::floor(q.y()))};
  // Points on the far boundary belong to the last cell.
  if (c.i == width_ && q.x() <= width_ + 1e-9) c.i = width_ - 1;
  if (c.j == height_ && q.y() <= height_ + 1e-9) c.j = height_ - 1;
  if (!in_grid(c)) return std::nullopt;
  return c;
}

Eigen::Vector2d OccupancyGrid::center(CellIndex c) const {
  return origin_ + resolution_ * Eigen::Vector2d(c.i + 0.5, c.j + 0.5);
}

void OccupancyGrid::mark_free(CellIndex c) {
  auto& cell = cells_[index(c)];
  if (cell == Cell::Unknown) cell = Cell::Free;
}

void OccupancyGrid::mark_occupied(CellIndex c) {
  auto& cell = cells_[index(c)];
  if (cell == Cell::Occupied) return;
  cell = Cell::Occupied;
  for (const auto& k : kernel_) {
    const CellIndex n{c.i + k.i, c.j + k.j};
    if (in_grid(n)) ++inflation_count_[index(n)];
  }
}

std::size_t OccupancyGrid::count(Cell kind) const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), kind));
}

namespace {

constexpr int kDi[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDj[8] = {0, 0, 1, -1, 1, -1, 1, -1};

bool step_allowed(const OccupancyGrid& g, CellIndex c, int k) {
  const CellIndex n{c.i + kDi[k], c.j + kDj[k]};
  if (!g.in_grid(n) || !g.traversable(n)) return false;
  if (k >= 4) return g.traversable({c.i + kDi[k], c.j}) && g.traversable({c.i, c.j + kDj[k]});
  return true;
}

}  // namespace

std::size_t OccupancyGrid::traversable_edges() const {
  std::size_t n = 0;
  for (int j = 0; j < height_; ++j) {
    for (int i = 0; i < width_; ++i) {
      const CellIndex c{i, j};
      if (!traversable(c)) continue;
      for (int k = 0; k < 8; ++k) n += step_allowed(*this, c, k) ? 1 : 0;
    }
  }
  return n / 2;
}

void cast_ray(OccupancyGrid& grid, const sim::WorldSpec& world, const Eigen::Vector2d& from,
              double heading, double range) {
  const Eigen::Vector2d dir(std::cos(heading), std::sin(heading));
  const Eigen::Vector2d to = from + range * dir;
  double t_hit = std::numeric_limits<double>::infinity();
  for (const auto& t : world.targets) {
    double t_in = 0.0;
    double t_out = 0.0;
    if (lsg::clip_segment(t.footprint.vertices(), from, to, t_in, t_out)) t_hit = std::min(t_hit, t_in);
  }
  const double stop = std::isfinite(t_hit) ? t_hit * range : range;

  // Amanatides-Woo traversal in cell units.
  const double res = grid.resolution();
  const Eigen::Vector2d q = (from - grid.origin()) / res;
  CellIndex c{static_cast<int>(std::floor(q.x())), static_cast<int>(std::floor(q.y()))};
  const int si = dir.x() > 0 ? 1 : -1;
  const int sj = dir.y() > 0 ? 1 : -1;
  const double inf = std::numeric_limits<double>::infinity();
  const double dx = std::abs(dir.x()) > 1e-12 ? res / std::abs(dir.x()) : inf;
  const double dy = std::abs(dir.y()) > 1e-12 ? res / std::abs(dir.y()) : inf;
  double tx = std::abs(dir.x()) > 1e-12
                  ? ((si > 0 ? std::floor(q.x()) + 1.0 - q.x() : q.x() - std::floor(q.x())) * dx)
                  : inf;
  double ty = std::abs(dir.y()) > 1e-12
                  ? ((sj > 0 ? std::floor(q.y()) + 1.0 - q.y() : q.y() - std::floor(q.y())) * dy)
                  : inf;
  double t_enter = 0.0;
  while (grid.in_grid(c)) {
    const double t_exit = std::min(tx, ty);
    if (std::isfinite(t_hit) && stop <= t_exit) {
      grid.mark_occupied(c);
      return;
    }
    if (t_enter >= range) return;
    grid.mark_free(c);
    if (t_exit >= range) return;
    t_enter = t_exit;
    if (tx < ty) {
      c.i += si;
      tx += dx;
    } else {
      c.j += sj;
      ty += dy;
    }
  }
}

void update_occupancy(OccupancyGrid& grid, const sim::RobotState& robot, const sim::WorldSpec& world,
                      const sim::CameraModel& cam) {
  if (!world.bounds.contains(robot.pose.position)) {
    throw std::invalid_argument("robot outside world bounds");
  }
  const Eigen::Vector2d from = sim::camera_center(cam, robot.pose).head<2>();
  const double yaw = robot.yaw();
  const double half = 0.5 * cam.hfov();
  const int rays = static_cast<int>(std::ceil(2.0 * half * 180.0 / std::numbers::pi)) + 1;
  for (int r = 0; r < rays; ++r) {
    const double h = yaw - half + 2.0 * half * r / (rays - 1);
    cast_ray(grid, world, from, h, cam.d_max);
  }
  if (auto c = grid.cell_of(robot.pose.position.head<2>())) grid.mark_free(*c);
}

void mark_trace(OccupancyGrid& grid, std::span<const lsg::Pose6> trace) {
  for (const auto& p : trace) {
    if (auto c = grid.cell_of(p.position.head<2>())) grid.mark_free(*c);
  }
}

GridPlan grid_plan(const OccupancyGrid& grid, const Eigen::Vector2d& start, const Eigen::Vector2d& goal,
                   int timing_repeats) {
  const auto s = grid.cell_of(start);
  if (!s) throw Error(Errc::OutOfGrid, "start outside grid");
  const auto g = grid.cell_of(goal);
  if (!g) throw Error(Errc::OutOfGrid, "goal outside grid");
  return grid_plan(grid, *s, *g, timing_repeats);
}

namespace {

GridPlan grid_plan_once(const OccupancyGrid& grid, CellIndex start, CellIndex goal) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!grid.in_grid(start) || !grid.in_grid(goal)) throw Error(Errc::OutOfGrid, "cell index outside the grid");
  if (!grid.traversable(start)) throw Error(Errc::StartOccupied, "start cell not traversable");
  if (!grid.traversable(goal)) throw Error(Errc::Unreachable, "goal cell not traversable");

  const int w = grid.width();
  const std::size_t n = static_cast<std::size_t>(w) * grid.height();
  const double res = grid.resolution();
  const double step[8] = {res, res, res, res, std::sqrt(2.0) * res, std::sqrt(2.0) * res,
                          std::sqrt(2.0) * res, std::sqrt(2.0) * res};
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> prev(n, -1);
  std::vector<bool> done(n, false);
  auto idx = [w](CellIndex c) { return static_cast<std::size_t>(c.j) * w + c.i; };
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[idx(start)] = 0.0;
  open.push({0.0, idx(start)});
  GridPlan out;
  const std::size_t target = idx(goal);
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (done[u]) continue;
    done[u] = true;
    ++out.expanded;
    if (u == target) break;
    const CellIndex c{static_cast<int>(u % w), static_cast<int>(u / w)};
    for (int k = 0; k < 8; ++k) {
      if (!step_allowed(grid, c, k)) continue;
      const std::size_t v = idx({c.i + kDi[k], c.j + kDj[k]});
      const double nd = d + step[k];
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = static_cast<std::int64_t>(u);
        open.push({nd, v});
      }
    }
  }
  if (!done[target]) throw Error(Errc::Unreachable, "no traversable path to goal");
  for (std::int64_t v = static_cast<std::int64_t>(target); v >= 0; v = prev[static_cast<std::size_t>(v)]) {
    out.cells.push_back({static_cast<int>(v % w), static_cast<int>(v / w)});
  }
  std::reverse(out.cells.begin(), out.cells.end());
  out.length = dist[target];
  out.plan_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace

GridPlan grid_plan(const OccupancyGrid& grid, CellIndex start, CellIndex goal, int timing_repeats) {
  GridPlan out = grid_plan_once(grid, start, goal);
  for (int i = 1; i < timing_repeats; ++i) {
    out.plan_time_s = std::min(out.plan_time_s, grid_plan_once(grid, start, goal).plan_time_s);
  }
  return out;
}

void export_pgm(const OccupancyGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << grid.width() << " " << grid.height() << "\n255\n";
  for (int j = grid.height() - 1; j >= 0; --j) {
    for (int i = 0; i < grid.width(); ++i) {
      const CellIndex c{i, j};
      unsigned char v = 128;
      if (grid.at(c) == Cell::Occupied) v = 0;
      else if (grid.at(c) == Cell::Free) v = grid.inflated(c) ? 200 : 255;
      out.put(static_cast<char>(v));
    }
  }
  nlohmann::ordered_json meta{{"origin", {grid.origin().x(), grid.origin().y()}},
                              {"resolution", grid.resolution()},
                              {"inflation_radius", grid.inflation_radius()},
                              {"width", grid.width()},
                              {"height", grid.height()},
                              {"free", grid.count(Cell::Free)},
                              {"occupied", grid.count(Cell::Occupied)},
                              {"unknown", grid.count(Cell::Unknown)}};
  std::ofstream side(path.string() + ".json");
  side << meta.dump(2) << "\n";
}

}  // namespace xflie::grid
