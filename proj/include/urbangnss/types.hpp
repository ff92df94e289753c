#pragma once

#include <Eigen/Dense>

namespace urbangnss {

// Small fixed-capacity vector: every set in this library lives in R^2 or R^3.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

namespace tol {
inline constexpr double geom = 1e-6;        // vertex dedup, meters
inline constexpr double feas = 1e-7;        // CZ membership feasibility
inline constexpr double sliverArea = 1e-6;  // m^2, regions below this are dropped
inline constexpr double sliverWidth = 1e-5; // m, area/perimeter below this is dropped
}  // namespace tol

// Planarity / feasibility tolerance for a point set of the given extent.
inline double scaledTol(double extent) { return 1e-9 + 1e-11 * extent; }

inline Vec toVec(const Vec3& v) { return Vec(v); }
inline Vec toVec(const Vec2& v) { return Vec(v); }
inline Vec3 toVec3(const Vec& v) { return Vec3(v(0), v(1), v.size() > 2 ? v(2) : 0.0); }

}  // namespace urbangnss
