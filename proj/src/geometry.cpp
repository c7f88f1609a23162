#include "mwl/geometry.hpp"

#include "mwl/errors.hpp"

#include <cmath>
#include <sstream>

namespace mwl {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularRotation: return "SingularRotation";
    case ErrorKind::AxisMismatch: return "AxisMismatch";
    case ErrorKind::DegenerateLine: return "DegenerateLine";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
    case ErrorKind::RetryExhausted: return "RetryExhausted";
    case ErrorKind::DepthSingularity: return "DepthSingularity";
    case ErrorKind::ScaleDegenerate: return "ScaleDegenerate";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Axis axis_from_label(int label) {
  if (label < 1 || label > 3) {
    throw Error(ErrorKind::InvalidArgument,
                "axis label must be 1, 2 or 3, got " + std::to_string(label));
  }
  return static_cast<Axis>(label - 1);
}

bool Rotation3::is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
  return ortho <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Rotation3::Rotation3(const Mat3& m) : m_(m) {
  if (!is_rotation(m)) {
    std::ostringstream os;
    os << "matrix is not a proper rotation:\n" << m;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

std::optional<Mat3> inverse3(const Mat3& m, double det_guard) {
  Mat3 adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double det = m(0, 0) * adj(0, 0) + m(0, 1) * adj(1, 0) + m(0, 2) * adj(2, 0);
  if (!(std::abs(det) >= det_guard)) return std::nullopt;
  return adj / det;
}

Mat3 cayley_generator(const Rotation3& r) {
  const Mat3& m = r.matrix();
  const Mat3 eye = Mat3::Identity();
  const auto inv = inverse3(m + eye);
  if (!inv) {
    throw Error(ErrorKind::SingularRotation,
                "rotation by pi has no Cayley parameters (det(R + I) ~ 0)");
  }
  return (m - eye) * *inv;
}

CayleyParams cayley_from_rotation(const Rotation3& r) {
  const Mat3 g = cayley_generator(r);
  // The generator is skew up to roundoff; average the mirrored entries.
  return CayleyParams{Vec3(0.5 * (g(2, 1) - g(1, 2)),
                           0.5 * (g(0, 2) - g(2, 0)),
                           0.5 * (g(1, 0) - g(0, 1)))};
}

Rotation3 rotation_from_cayley(const CayleyParams& c) {
  // (I + G)(I - G)^-1 in closed form; det(I - G) = 1 + |c|^2.
  const Vec3& v = c.value;
  const double scale = 1.0 / (1.0 + v.squaredNorm());
  const Mat3 g = skew(v);
  const Mat3 m = Mat3::Identity() + 2.0 * scale * (g + g * g);
  return Rotation3::trusted(m);
}

ReducedMoment drop_axis_component(const Rotation3& r, const Vec3& n, Axis axis) {
  const Vec3 o = r * n;
  const auto keep = surviving_indices(axis);
  return ReducedMoment{Vec2(o(keep[0]), o(keep[1])), axis};
}

ReducedMoment project_moment(const Rotation3& r, const Vec3& n, Axis axis,
                             double axis_tol) {
  const Vec3 o = r * n;
  const double along = o(index_of(axis));
  if (std::abs(along) > axis_tol) {
    std::ostringstream os;
    os << "moment has component " << along << " along axis " << label_of(axis)
       << "; line is not assigned to that direction";
    throw Error(ErrorKind::AxisMismatch, os.str());
  }
  const auto keep = surviving_indices(axis);
  return ReducedMoment{Vec2(o(keep[0]), o(keep[1])), axis};
}

Vec3 expand_moment(const ReducedMoment& m) {
  Vec3 o = Vec3::Zero();
  const auto keep = surviving_indices(m.axis);
  o(keep[0]) = m.tau(0);
  o(keep[1]) = m.tau(1);
  return o;
}

Vec3 reconstruct_moment(const ReducedMoment& m, const Rotation3& r) {
  return r.matrix().transpose() * expand_moment(m);
}

PlueckerLine line_from_point_direction(const Vec3& p, const Vec3& d) {
  const Vec3 m = p.cross(d);
  const double len = m.norm();
  if (!(len > 1e-9)) {
    throw Error(ErrorKind::DegenerateLine,
                "line passes through the optical center (|p x d| <= 1e-9)");
  }
  return PlueckerLine{d, m / len, len};
}

}  // namespace mwl
