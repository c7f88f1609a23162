#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include <array>
#include <cstdint>
#include <optional>

namespace mwl {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Manhattan direction a line belongs to. Labels 1..3 in files and on the
// command line, indices 0..2 in code.
enum class Axis : std::uint8_t { D1 = 0, D2 = 1, D3 = 2 };

constexpr int index_of(Axis a) { return static_cast<int>(a); }
constexpr int label_of(Axis a) { return static_cast<int>(a) + 1; }
Axis axis_from_label(int label);

// The two coordinates that survive when the axis component is dropped, in
// ascending index order: D1 keeps (1,2), D2 keeps (0,2), D3 keeps (0,1).
constexpr std::array<int, 2> surviving_indices(Axis a) {
  switch (a) {
    case Axis::D1: return {1, 2};
    case Axis::D2: return {0, 2};
    case Axis::D3: return {0, 1};
  }
  return {0, 1};
}

/// Proper rotation matrix. The checked constructor enforces RᵀR = I and
/// det R = +1 to 1e-9; `trusted` skips the check for matrices produced by
/// code that already guarantees it.
class Rotation3 {
 public:
  static constexpr double kTolerance = 1e-9;

  Rotation3() : m_(Mat3::Identity()) {}
  explicit Rotation3(const Mat3& m);

  static Rotation3 trusted(const Mat3& m) {
    Rotation3 r;
    r.m_ = m;
    return r;
  }
  static bool is_rotation(const Mat3& m, double tol = kTolerance);

  const Mat3& matrix() const { return m_; }
  Vec3 row(int i) const { return m_.row(i).transpose(); }
  Vec3 row(Axis a) const { return row(index_of(a)); }
  Rotation3 transpose() const { return trusted(m_.transpose()); }

  friend Rotation3 operator*(const Rotation3& a, const Rotation3& b) {
    return trusted(a.m_ * b.m_);
  }
  friend Vec3 operator*(const Rotation3& a, const Vec3& v) { return a.m_ * v; }

 private:
  Mat3 m_;
};

/// Minimal rotation chart: G = [c]x with c1 = G(2,1), c2 = G(0,2),
/// c3 = G(1,0), i.e.
///
///        [  0  -c3   c2 ]
///   G =  [  c3   0  -c1 ]
///        [ -c2   c1   0 ]
///
/// Undefined for rotations by pi.
struct CayleyParams {
  Vec3 value = Vec3::Zero();
};

struct PlueckerLine {
  Vec3 direction;  // unit
  Vec3 moment;     // unit, orthogonal to direction
  double depth;    // distance from the optical center, > 0
};

/// Moment expressed in the Manhattan frame with the (zero) component along
/// the line's own axis removed.
struct ReducedMoment {
  Vec2 tau = Vec2::Zero();
  Axis axis = Axis::D1;
};

Mat3 skew(const Vec3& v);

// Closed-form 3x3 inverse through the adjugate. Empty when |det| < det_guard.
std::optional<Mat3> inverse3(const Mat3& m, double det_guard = 1e-12);

/// G = (R - I)(R + I)^-1. Throws SingularRotation when |det(R + I)| < 1e-12.
Mat3 cayley_generator(const Rotation3& r);
CayleyParams cayley_from_rotation(const Rotation3& r);
Rotation3 rotation_from_cayley(const CayleyParams& c);

/// o = R n, with the axis component removed. Throws AxisMismatch when
/// |o_axis| > axis_tol.
ReducedMoment project_moment(const Rotation3& r, const Vec3& n, Axis axis,
                             double axis_tol = 1e-6);
// Same projection without the membership check (noisy measurements).
ReducedMoment drop_axis_component(const Rotation3& r, const Vec3& n, Axis axis);

// Zero-padded 3-vector o from tau.
Vec3 expand_moment(const ReducedMoment& m);
/// n = sum_j o_j d_j, with d_j the rows of R.
Vec3 reconstruct_moment(const ReducedMoment& m, const Rotation3& r);

/// Line through p with unit direction d. Throws DegenerateLine when
/// |p x d| <= 1e-9, i.e. the line passes through the optical center.
PlueckerLine line_from_point_direction(const Vec3& p, const Vec3& d);

}  // namespace mwl
