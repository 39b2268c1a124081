#include "xflie/sim/world.hpp"

#include <cmath>
#include <numbers>

#include "xflie/lsg/errors.hpp"
#include "xflie/sim/errors.hpp"

namespace xflie::sim {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::NoSupportingPoints: return "NoSupportingPoints";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::InvalidWorld: return "InvalidWorld";
    case Errc::InvalidCamera: return "InvalidCamera";
  }
  return "Unknown";
}

namespace {

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (a + t * ab - p).norm();
}

// Separating-axis test for convex polygons. Touching counts as overlap.
bool overlaps(const lsg::ConvexPolygon2D& p, const lsg::ConvexPolygon2D& q) {
  auto separated_by_edges_of = [](const lsg::ConvexPolygon2D& a, const lsg::ConvexPolygon2D& b) {
    const auto& va = a.vertices();
    for (std::size_t i = 0; i < va.size(); ++i) {
      const Eigen::Vector2d e = va[(i + 1) % va.size()] - va[i];
      const Eigen::Vector2d n(e.y(), -e.x());
      const double limit = n.dot(va[i]);
      bool all_outside = true;
      for (const auto& v : b.vertices()) {
        if (n.dot(v) <= limit) {
          all_outside = false;
          break;
        }
      }
      if (all_outside) return true;
    }
    return false;
  };
  return !separated_by_edges_of(p, q) && !separated_by_edges_of(q, p);
}

}  // namespace

Eigen::Vector3d GroundTruthTarget::centroid(double ground_z) const {
  const Eigen::Vector2d c = footprint.centroid();
  return {c.x(), c.y(), ground_z + 0.5 * height};
}

Eigen::Vector2d GroundTruthTarget::face_normal(int face) const {
  const auto& v = footprint.vertices();
  const Eigen::Vector2d e = v[(face + 1) % v.size()] - v[face];
  return Eigen::Vector2d(e.y(), -e.x()).normalized();
}

double GroundTruthTarget::perimeter() const {
  const auto& v = footprint.vertices();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += (v[(i + 1) % v.size()] - v[i]).norm();
  return sum;
}

void WorldSpec::validate() {
  if (!((bounds.max.array() > bounds.min.array()).all())) {
    throw Error(Errc::InvalidWorld, "bounds must have positive extent");
  }
  if (ground_z < bounds.min.z() || ground_z > bounds.max.z()) {
    throw Error(Errc::InvalidWorld, "ground plane outside bounds");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto& t = targets[i];
    const std::string name = "target " + std::to_string(i) + " (" + t.sem_class + ")";
    if (!(t.height > 0.0)) throw Error(Errc::InvalidWorld, name + ": height must be positive");
    if (ground_z + t.height > bounds.max.z()) {
      throw Error(Errc::InvalidWorld, name + ": taller than bounds");
    }
    for (const auto& v : t.footprint.vertices()) {
      if (!bounds.contains({v.x(), v.y(), ground_z})) {
        throw Error(Errc::InvalidWorld, name + ": footprint outside bounds");
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (overlaps(t.footprint, targets[j].footprint)) {
        throw Error(Errc::InvalidWorld, name + ": footprint overlaps target " + std::to_string(j));
      }
    }
    const auto& v = t.footprint.vertices();
    for (auto& f : t.features) {
      if (f.anchor.z() < ground_z - 1e-9 || f.anchor.z() > ground_z + t.height + 1e-9) {
        throw Error(Errc::InvalidWorld, name + ": feature " + f.sem_class + " outside height");
      }
      if (!(f.area > 0.0)) throw Error(Errc::InvalidWorld, name + ": feature area must be positive");
      int best = -1;
      double best_d = 1e-6;
      for (std::size_t e = 0; e < v.size(); ++e) {
        const double d = point_segment_distance(f.anchor.head<2>(), v[e], v[(e + 1) % v.size()]);
        if (d <= best_d) {
          best_d = d;
          best = static_cast<int>(e);
        }
      }
      if (best < 0) {
        throw Error(Errc::InvalidWorld, name + ": feature " + f.sem_class + " not on a face");
      }
      f.face = best;
    }
  }
}

std::vector<Eigen::Vector2d> offset_contour(const lsg::ConvexPolygon2D& footprint, double d,
                                            double arc_step) {
  const auto& v = footprint.vertices();
  const std::size_t n = v.size();
  auto normal = [&](std::size_t i) {
    const Eigen::Vector2d e = v[(i + 1) % n] - v[i];
    return Eigen::Vector2d(e.y(), -e.x()).normalized();
  };
  std::vector<Eigen::Vector2d> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d n0 = normal((i + n - 1) % n);
    const Eigen::Vector2d n1 = normal(i);
    const double a0 = std::atan2(n0.y(), n0.x());
    double sweep = std::atan2(n1.y(), n1.x()) - a0;
    while (sweep < 0.0) sweep += 2.0 * std::numbers::pi;
    const int m = std::max(1, static_cast<int>(std::ceil(sweep / arc_step)));
    for (int k = 0; k <= m; ++k) {
      const double a = a0 + sweep * k / m;
      out.push_back(v[i] + d * Eigen::Vector2d(std::cos(a), std::sin(a)));
    }
  }
  return out;
}

bool inside_any_footprint(const WorldSpec& world, const Eigen::Vector2d& p, int skip) {
  for (std::size_t i = 0; i < world.targets.size(); ++i) {
    if (static_cast<int>(i) == skip) continue;
    if (world.targets[i].footprint.contains(p)) return true;
  }
  return false;
}

nlohmann::ordered_json to_json(const WorldSpec& world) {
  using Json = nlohmann::ordered_json;
  Json targets = Json::array();
  for (const auto& t : world.targets) {
    Json fp = Json::array();
    for (const auto& v : t.footprint.vertices()) fp.push_back({v.x(), v.y()});
    Json feats = Json::array();
    for (const auto& f : t.features) {
      feats.push_back(Json{{"class", f.sem_class},
                           {"anchor", {f.anchor.x(), f.anchor.y(), f.anchor.z()}},
                           {"area", f.area}});
    }
    targets.push_back(Json{{"class", t.sem_class},
                           {"footprint", std::move(fp)},
                           {"height", t.height},
                           {"features", std::move(feats)}});
  }
  return Json{{"bounds",
               {{"min", {world.bounds.min.x(), world.bounds.min.y(), world.bounds.min.z()}},
                {"max", {world.bounds.max.x(), world.bounds.max.y(), world.bounds.max.z()}}}},
              {"ground_z", world.ground_z},
              {"seed", world.seed},
              {"targets", std::move(targets)}};
}

WorldSpec world_from_json(const nlohmann::json& j) {
  auto vec3 = [](const nlohmann::json& a) {
    return Eigen::Vector3d(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>());
  };
  WorldSpec w;
  try {
    w.bounds.min = vec3(j.at("bounds").at("min"));
    w.bounds.max = vec3(j.at("bounds").at("max"));
    w.ground_z = j.value("ground_z", 0.0);
    w.seed = j.value("seed", std::uint64_t{0});
    for (const auto& tj : j.at("targets")) {
      std::vector<Eigen::Vector2d> fp;
      for (const auto& v : tj.at("footprint")) fp.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
      GroundTruthTarget t{tj.at("class").get<std::string>(), lsg::ConvexPolygon2D(fp),
                          tj.at("height").get<double>(), {}};
      for (const auto& fj : tj.value("features", nlohmann::json::array())) {
        t.features.push_back({fj.at("class").get<std::string>(), vec3(fj.at("anchor")),
                              fj.value("area", 0.5), -1});
      }
      w.targets.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidWorld, e.what());
  } catch (const lsg::Error& e) {
    throw Error(Errc::InvalidWorld, e.what());
  }
  w.validate();
  return w;
}

}  // namespace xflie::sim
