#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace xflie::lsg {

/// Convex polygon in the XY plane, vertices stored counter-clockwise.
///
/// Construction validates convexity, simple winding and positive area and
/// throws Error(InvalidPolygon) otherwise. Clockwise input is reoriented.
class ConvexPolygon2D {
 public:
  explicit ConvexPolygon2D(std::span<const Eigen::Vector2d> vertices);

  /// Counter-clockwise convex hull (Andrew's monotone chain). Collinear and
  /// duplicate points are dropped.
  static ConvexPolygon2D hull_of(std::span<const Eigen::Vector2d> points);

  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  double area() const;
  Eigen::Vector2d centroid() const;

  /// Boundary points count as inside (tolerance `eps` meters).
  bool contains(const Eigen::Vector2d& p, double eps = 1e-9) const;

  bool operator==(const ConvexPolygon2D& other) const { return vertices_ == other.vertices_; }

 private:
  std::vector<Eigen::Vector2d> vertices_;
};

/// Signed area, positive for counter-clockwise order.
double signed_area(std::span<const Eigen::Vector2d> ring);

/// Parametric interval [t_in, t_out] of segment a->b (t in [0,1]) inside a
/// convex CCW ring. Returns false when the segment misses the polygon.
bool clip_segment(std::span<const Eigen::Vector2d> ccw_ring, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b, double& t_in, double& t_out);

}  // namespace xflie::lsg
