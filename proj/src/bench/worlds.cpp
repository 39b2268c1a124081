#include "xflie/bench/worlds.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>
#include <stdexcept>

namespace xflie::bench {

namespace {

struct LocalFeature {
  const char* sem_class;
  double x;  // along the long axis, front positive
  double y;  // left positive
  double z;
  double area;
};

// Anchors sit on the footprint edges (|x| = L/2 or |y| = W/2).
const LocalFeature kCar[] = {
    {"front bumper", 1.0, 0.0, 0.4, 0.6},  {"hood", 1.0, 0.0, 0.9, 0.6},
    {"front glass", 1.0, 0.0, 1.3, 0.5},   {"rear bumper", -1.0, 0.0, 0.4, 0.6},
    {"trunk", -1.0, 0.0, 0.9, 0.5},        {"back glass", -1.0, 0.0, 1.3, 0.4},
    {"front door", 0.6, 1.0, 0.8, 0.8},    {"rear door", -0.6, 1.0, 0.8, 0.8},
    {"mirror", 1.2, 1.0, 1.1, 0.1},        {"front door", 0.6, -1.0, 0.8, 0.8},
    {"rear door", -0.6, -1.0, 0.8, 0.8},   {"mirror", 1.2, -1.0, 1.1, 0.1},
};

const LocalFeature kTruck[] = {
    {"front bumper", 1.0, 0.0, 0.5, 0.8},   {"grille", 1.0, 0.0, 1.1, 0.7},
    {"front glass", 1.0, 0.0, 2.2, 1.0},    {"roof marker", 1.0, 0.0, 3.0, 0.2},
    {"rear bumper", -1.0, 0.0, 0.5, 0.8},   {"cargo door", -1.0, 0.0, 1.6, 1.2},
    {"rear light", -1.0, 0.0, 2.8, 0.2},    {"front door", 0.4, 1.0, 1.5, 1.0},
    {"fuel tank", -0.7, 1.0, 0.6, 0.5},     {"front door", 0.4, -1.0, 1.5, 1.0},
    {"fuel tank", -0.7, -1.0, 0.6, 0.5},
};

}  // namespace

sim::GroundTruthTarget make_vehicle(bool truck, const Eigen::Vector2d& center, double heading) {
  const double len = truck ? 6.0 : 4.5;
  const double wid = truck ? 2.4 : 1.9;
  const Eigen::Vector2d ax(std::cos(heading), std::sin(heading));
  const Eigen::Vector2d ay(-ax.y(), ax.x());
  auto world = [&](double x, double y) { return Eigen::Vector2d(center + x * ax + y * ay); };

  sim::GroundTruthTarget t{truck ? "truck" : "car",
                           lsg::ConvexPolygon2D(std::vector<Eigen::Vector2d>{
                               world(len / 2, -wid / 2), world(len / 2, wid / 2),
                               world(-len / 2, wid / 2), world(-len / 2, -wid / 2)}),
                           truck ? 3.2 : 1.5,
                           {}};
  for (const auto& f : truck ? std::span<const LocalFeature>(kTruck) : std::span<const LocalFeature>(kCar)) {
    // Face features use x,y = +-1 as "on the end/side face"; side features give x in metres.
    const bool end_face = f.y == 0.0;
    const double x = end_face ? f.x * len / 2 : f.x;
    const double y = end_face ? 0.0 : f.y * wid / 2;
    const Eigen::Vector2d p = world(x, y);
    t.features.push_back({f.sem_class, Eigen::Vector3d(p.x(), p.y(), f.z), f.area, -1});
  }
  return t;
}

GeneratedWorld ring_world(int targets, std::uint64_t seed) {
  if (targets < 1) throw std::invalid_argument("ring world needs at least one target");
  const double spacing = 12.0;
  const double radius = targets == 1 ? 0.0 : spacing / (2.0 * std::sin(std::numbers::pi / targets));
  GeneratedWorld g;
  g.world.seed = seed;
  g.world.ground_z = 0.0;
  const double half = radius + 15.0;
  g.world.bounds.min = {-half, -half, -1.0};
  g.world.bounds.max = {half, half, 10.0};
  for (int i = 0; i < targets; ++i) {
    const double a = 2.0 * std::numbers::pi * i / targets;
    const Eigen::Vector2d c = radius * Eigen::Vector2d(std::cos(a), std::sin(a));
    g.world.targets.push_back(make_vehicle(i % 2 == 1, c, a + std::numbers::pi / 2));
  }
  g.start = {std::max(0.0, radius - 8.0), 0.0, 0.0};
  if (targets == 1) g.start = {-8.0, 0.0, 0.0};
  g.start_yaw = 0.0;
  g.world.validate();
  return g;
}

}  // namespace xflie::bench
