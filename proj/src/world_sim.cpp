#include "mwl/world_sim.hpp"

#include "mwl/errors.hpp"
#include "mwl/integrator.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mwl {

namespace {

constexpr double kDepthFloor = 0.1;
constexpr double kMaxSceneAngle = M_PI - 0.1;
constexpr int kMaxAttempts = 100;
constexpr double kNearFace = 5.0;
constexpr double kSingularDepth = 1e-6;

double deg2rad(double d) { return d * M_PI / 180.0; }

template <typename TwistAt>
CameraPose rk4_pose(const CameraPose& pose, TwistAt twist_at, double dt) {
  auto shifted = [&](const PoseRate& k, double h) {
    return CameraPose{Rotation3::trusted(pose.rotation.matrix() + h * k.rotation),
                      pose.position + h * k.position};
  };
  const PoseRate k1 = pose_rate(pose, twist_at(0.0));
  const PoseRate k2 = pose_rate(shifted(k1, 0.5 * dt), twist_at(0.5 * dt));
  const PoseRate k3 = pose_rate(shifted(k2, 0.5 * dt), twist_at(0.5 * dt));
  const PoseRate k4 = pose_rate(shifted(k3, dt), twist_at(dt));
  const Mat3 r = pose.rotation.matrix() +
                 (dt / 6.0) * (k1.rotation + 2.0 * k2.rotation + 2.0 * k3.rotation + k4.rotation);
  const Vec3 p = pose.position +
                 (dt / 6.0) * (k1.position + 2.0 * k2.position + 2.0 * k3.position + k4.position);
  return CameraPose{Rotation3::trusted(nearest_rotation(r)), p};
}

}  // namespace

Vec3 Sinusoid3::value(double t) const {
  Vec3 out;
  for (int k = 0; k < 3; ++k) out(k) = offset(k) + amplitude(k) * std::sin(frequency(k) * t + phase(k));
  return out;
}

Vec3 Sinusoid3::derivative(double t) const {
  Vec3 out;
  for (int k = 0; k < 3; ++k)
    out(k) = amplitude(k) * frequency(k) * std::cos(frequency(k) * t + phase(k));
  return out;
}

double Sinusoid3::peak_bound() const {
  return (offset.cwiseAbs() + amplitude.cwiseAbs()).norm();
}

Vec3 VelocityProfile::body_acceleration(double t) const {
  return linear.derivative(t) + angular.value(t).cross(linear.value(t));
}

double VelocityProfile::max_body_acceleration(double duration, double step) const {
  double best = 0.0;
  for (double t = 0.0; t <= duration + 1e-12; t += step)
    best = std::max(best, body_acceleration(t).norm());
  return best;
}

double VelocityProfile::max_angular_rate(double duration, double step) const {
  double best = 0.0;
  for (double t = 0.0; t <= duration + 1e-12; t += step) best = std::max(best, angular.value(t).norm());
  return best;
}

double VelocityProfile::distance(double t0, double t1, int panels) const {
  if (t1 <= t0) return 0.0;
  if (panels % 2) ++panels;
  const double h = (t1 - t0) / panels;
  double sum = linear.value(t0).norm() + linear.value(t1).norm();
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * linear.value(t0 + i * h).norm();
  return sum * h / 3.0;
}

Mat3 random_rotation(Rng& rng) {
  Eigen::Quaterniond q(standard_normal(rng), standard_normal(rng), standard_normal(rng),
                       standard_normal(rng));
  q.normalize();
  return q.toRotationMatrix();
}

double rotation_angle(const Mat3& r) {
  return std::acos(std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0));
}

WorldScene random_scene(std::uint64_t seed, std::array<int, 3> lines_per_axis, double cube_side) {
  if (lines_per_axis[0] < 0 || lines_per_axis[1] < 0 || lines_per_axis[2] < 0 ||
      lines_per_axis[0] + lines_per_axis[1] + lines_per_axis[2] < 1) {
    throw Error(ErrorKind::InvalidArgument, "scene needs at least one line");
  }
  if (!(cube_side > 0.0)) throw Error(ErrorKind::InvalidArgument, "cube side must be positive");

  Rng rng(derive_seed(seed, stream::kScene));
  WorldScene scene;
  scene.seed = seed;

  Mat3 frame = random_rotation(rng);
  for (int attempt = 0; rotation_angle(frame) > kMaxSceneAngle; ++attempt) {
    if (attempt >= kMaxAttempts) {
      throw Error(ErrorKind::RetryExhausted, "could not draw a Manhattan frame inside the chart");
    }
    frame = random_rotation(rng);
  }
  scene.frame = Rotation3::trusted(frame);

  const double half = 0.5 * cube_side;
  const Vec3 center(0.0, 0.0, kNearFace + half);
  for (int j = 0; j < 3; ++j) {
    const Axis axis = static_cast<Axis>(j);
    const Vec3 d = scene.direction(axis);
    for (int i = 0; i < lines_per_axis[j]; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
        const Vec3 p = center + Vec3(uniform(rng, -half, half), uniform(rng, -half, half),
                                     uniform(rng, -half, half));
        if (p.cross(d).norm() > kDepthFloor) {
          scene.lines.push_back(SceneLine{p, axis});
          placed = true;
        }
      }
      if (!placed) {
        throw Error(ErrorKind::RetryExhausted, "could not place a line above the depth floor");
      }
    }
  }

  scene.plane.normal = Vec3(0.0, 0.0, -1.0);
  scene.plane.offset = uniform(rng, 4.0, 6.0);
  return scene;
}

PoseRate pose_rate(const CameraPose& pose, const BodyTwist& twist) {
  const Mat3& r = pose.rotation.matrix();
  return PoseRate{-skew(twist.w) * r, r.transpose() * twist.v};
}

CameraPose advance_pose(const CameraPose& pose, const BodyTwist& twist, double dt) {
  return rk4_pose(pose, [&](double) { return twist; }, dt);
}

CameraPose advance_pose(const CameraPose& pose, const VelocityProfile& profile, double t,
                        double dt) {
  return rk4_pose(pose, [&](double s) { return profile.at(t + s); }, dt);
}

Vec3 compensate_gravity(const Vec3& specific_force, const CameraPose& pose,
                        const ImuExtrinsics& ext) {
  const Mat3 world_to_imu = ext.rotation.matrix().transpose() * pose.rotation.matrix();
  return specific_force + world_to_imu * Vec3(0.0, 0.0, ext.gravity);
}

ImuSample synthesize_imu(const VelocityProfile& profile, double t, const CameraPose& pose,
                         const ImuExtrinsics& ext) {
  ImuSample s;
  s.omega = profile.angular.value(t);
  const Mat3 w2 = skew(s.omega) * skew(s.omega);
  s.accel = ext.rotation.matrix().transpose() * (profile.body_acceleration(t) - w2 * ext.translation);
  const Mat3 world_to_imu = ext.rotation.matrix().transpose() * pose.rotation.matrix();
  s.specific_force = s.accel - world_to_imu * Vec3(0.0, 0.0, ext.gravity);
  return s;
}

MeasurementFrame observe(const WorldScene& scene, const CameraPose& pose, const BodyTwist& twist,
                         const ImuSample& imu, double t) {
  MeasurementFrame f;
  f.t = t;
  const Mat3& r = pose.rotation.matrix();
  f.frame = Rotation3::trusted(scene.frame.matrix() * r.transpose());
  f.cayley = cayley_from_rotation(f.frame);
  f.twist = to_scene_twist(twist);
  f.imu = imu;

  f.lines.reserve(scene.lines.size());
  for (const SceneLine& line : scene.lines) {
    const Vec3 p = r * (line.anchor - pose.position);
    const Vec3 d = f.frame.row(line.axis);
    const Vec3 m = p.cross(d);
    const double depth = m.norm();
    if (!(depth > kSingularDepth)) {
      std::ostringstream os;
      os << "line depth " << depth << " at t = " << t << " reached the optical center";
      throw Error(ErrorKind::DepthSingularity, os.str());
    }
    LineMeasurement lm;
    lm.axis = line.axis;
    lm.direction = d;
    lm.moment = m / depth;
    lm.depth = depth;
    lm.inv_depth = 1.0 / depth;
    lm.tau = project_moment(f.frame, lm.moment, line.axis);
    f.lines.push_back(lm);
  }

  // Plane fields are NaN once the plane is no longer in front of the camera.
  const double rho = scene.plane.offset + scene.plane.normal.dot(pose.position);
  f.plane.normal = r * scene.plane.normal;
  f.plane.depth = rho;
  if (rho > kSingularDepth) {
    f.plane.inv_depth = 1.0 / rho;
    f.plane.scaled_velocity = twist.v * f.plane.inv_depth;
  } else {
    f.plane.inv_depth = std::numeric_limits<double>::quiet_NaN();
    f.plane.scaled_velocity.setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  return f;
}

Mat3 small_rotation(double sigma_deg, Rng& rng) {
  // Uniform on [-a, a] has standard deviation a / sqrt(3).
  const double half_width = std::sqrt(3.0) * deg2rad(sigma_deg);
  const double yaw = uniform(rng, -half_width, half_width);
  const double pitch = uniform(rng, -half_width, half_width);
  const double roll = uniform(rng, -half_width, half_width);
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

NoiseDraw sample_noise(double sigma_deg, std::size_t n_lines, Rng& rng) {
  if (!(sigma_deg >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise level must be >= 0");
  NoiseDraw draw;
  draw.frame = small_rotation(sigma_deg, rng);
  draw.moments.reserve(n_lines);
  for (std::size_t i = 0; i < n_lines; ++i) draw.moments.push_back(small_rotation(sigma_deg, rng));
  return draw;
}

MeasurementFrame apply_noise(const MeasurementFrame& frame, const NoiseDraw& noise) {
  if (noise.moments.size() != frame.lines.size()) {
    throw Error(ErrorKind::InvalidArgument, "noise draw does not match the number of lines");
  }
  MeasurementFrame out = frame;
  out.frame = Rotation3::trusted(noise.frame * frame.frame.matrix());
  out.cayley = cayley_from_rotation(out.frame);
  for (std::size_t i = 0; i < out.lines.size(); ++i) {
    LineMeasurement& lm = out.lines[i];
    lm.moment = noise.moments[i] * frame.lines[i].moment;
    lm.tau = drop_axis_component(out.frame, lm.moment, lm.axis);
  }
  return out;
}

MeasurementFrame perturb(const MeasurementFrame& frame, double sigma_deg, Rng& rng) {
  if (!(sigma_deg >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise level must be >= 0");
  if (sigma_deg == 0.0) return frame;
  return apply_noise(frame, sample_noise(sigma_deg, frame.lines.size(), rng));
}

}  // namespace mwl
