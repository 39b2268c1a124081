#include "xflie/lsg/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "xflie/lsg/errors.hpp"

namespace xflie::lsg {

namespace {

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

double signed_area(std::span<const Eigen::Vector2d> ring) {
  double acc = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = ring[i];
    const auto& q = ring[(i + 1) % n];
    acc += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * acc;
}

ConvexPolygon2D::ConvexPolygon2D(std::span<const Eigen::Vector2d> vertices)
    : vertices_(vertices.begin(), vertices.end()) {
  if (vertices_.size() < 3) {
    throw Error(Errc::InvalidPolygon, "fewer than 3 vertices");
  }
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw Error(Errc::InvalidPolygon, "non-finite vertex");
  }
  const double area = signed_area(vertices_);
  if (std::abs(area) <= 1e-12) throw Error(Errc::InvalidPolygon, "zero area");
  if (area < 0.0) std::reverse(vertices_.begin(), vertices_.end());

  // Convex and simple: every turn is a left turn and the exterior angles sum
  // to exactly one revolution.
  const std::size_t n = vertices_.size();
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % n];
    const auto& c = vertices_[(i + 2) % n];
    if (cross(a, b, c) < -1e-12) throw Error(Errc::InvalidPolygon, "reflex vertex");
    const Eigen::Vector2d u = b - a;
    const Eigen::Vector2d w = c - b;
    if (u.norm() == 0.0 || w.norm() == 0.0) throw Error(Errc::InvalidPolygon, "duplicate vertex");
    turning += std::atan2(u.x() * w.y() - u.y() * w.x(), u.dot(w));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    throw Error(Errc::InvalidPolygon, "self-intersecting ring");
  }
}

ConvexPolygon2D ConvexPolygon2D::hull_of(std::span<const Eigen::Vector2d> points) {
  std::vector<Eigen::Vector2d> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw Error(Errc::InvalidPolygon, "hull of fewer than 3 points");

  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return ConvexPolygon2D(hull);
}

double ConvexPolygon2D::area() const { return signed_area(vertices_); }

Eigen::Vector2d ConvexPolygon2D::centroid() const {
  // Area-weighted centroid, computed relative to the first vertex to limit
  // cancellation for polygons far from the origin.
  const Eigen::Vector2d o = vertices_.front();
  double a2 = 0.0;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Eigen::Vector2d p = vertices_[i] - o;
    const Eigen::Vector2d q = vertices_[(i + 1) % vertices_.size()] - o;
    const double w = p.x() * q.y() - q.x() * p.y();
    a2 += w;
    c += w * (p + q);
  }
  return o + c / (3.0 * a2);
}

bool ConvexPolygon2D::contains(const Eigen::Vector2d& p, double eps) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % n];
    const double len = (b - a).norm();
    if (cross(a, b, p) < -eps * len) return false;
  }
  return true;
}

bool clip_segment(std::span<const Eigen::Vector2d> ring, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b, double& t_in, double& t_out) {
  // Cyrus-Beck against the inward half-planes of a CCW ring.
  t_in = 0.0;
  t_out = 1.0;
  const Eigen::Vector2d d = b - a;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& p = ring[i];
    const Eigen::Vector2d e = ring[(i + 1) % n] - p;
    const Eigen::Vector2d inward(-e.y(), e.x());
    const double num = inward.dot(a - p);
    const double den = inward.dot(d);
    if (den == 0.0) {
      if (num < 0.0) return false;
      continue;
    }
    const double t = -num / den;
    if (den > 0.0) {
      t_in = std::max(t_in, t);
    } else {
      t_out = std::min(t_out, t);
    }
    if (t_in > t_out) return false;
  }
  return true;
}

}  // namespace xflie::lsg
