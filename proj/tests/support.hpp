#pragma once

#include "mwl/geometry.hpp"
#include "mwl/random.hpp"
#include "mwl/world_sim.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace mwl::testing {

inline Vec3 random_unit(Rng& rng) {
  Vec3 v;
  do {
    v = Vec3(standard_normal(rng), standard_normal(rng), standard_normal(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline Mat3 axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

// Rotation with a uniformly random axis and angle in [0, max_angle].
inline Mat3 random_rotation_bounded(Rng& rng, double max_angle) {
  return axis_angle(random_unit(rng), uniform(rng, 0.0, max_angle));
}

// Unit vector orthogonal to d.
inline Vec3 random_orthogonal(Rng& rng, const Vec3& d) {
  Vec3 v;
  do {
    v = random_unit(rng);
    v -= v.dot(d) * d;
  } while (v.norm() < 1e-3);
  return v.normalized();
}

// A smooth 6-DoF profile with every component excited.
inline VelocityProfile test_profile() {
  VelocityProfile p;
  p.linear.offset = Vec3(0.05, -0.02, 0.03);
  p.linear.amplitude = Vec3(0.6, 0.5, 0.4);
  p.linear.frequency = Vec3(0.9, 1.3, 0.7);
  p.linear.phase = Vec3(0.1, 1.2, 2.3);
  p.angular.amplitude = Vec3(0.2, 0.15, 0.25);
  p.angular.frequency = Vec3(0.6, 1.1, 0.8);
  p.angular.phase = Vec3(0.4, 2.0, 3.1);
  return p;
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace mwl::testing
