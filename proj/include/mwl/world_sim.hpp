#pragma once

#include "mwl/geometry.hpp"
#include "mwl/random.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mwl {

// Camera velocity expressed in the camera frame: linear velocity v of the
// optical center and angular rate w. This is what odometry or a gyro reads.
struct BodyTwist {
  Vec3 v = Vec3::Zero();
  Vec3 w = Vec3::Zero();
};

// Apparent motion of the static scene in camera coordinates: every fixed
// point X obeys dX/dt = omega x X + nu. The line kinematics are written in
// these inputs; nu = -v and omega = -w.
struct SceneTwist {
  Vec3 nu = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

inline SceneTwist to_scene_twist(const BodyTwist& b) { return SceneTwist{-b.v, -b.w}; }

struct SceneLine {
  Vec3 anchor;  // a point on the line, world frame
  Axis axis;
};

// Points X on the plane satisfy normal . X = -offset: the normal points from
// the plane toward the camera and offset is the plane depth.
struct Plane {
  Vec3 normal = Vec3(0.0, 0.0, -1.0);
  double offset = 5.0;
};

/// Static Manhattan scene. The world frame is the initial camera frame; the
/// rows of `frame` are the three dominant directions in that frame.
struct WorldScene {
  Rotation3 frame;
  std::vector<SceneLine> lines;
  Plane plane;
  std::uint64_t seed = 0;

  Vec3 direction(Axis a) const { return frame.row(a); }
};

/// rotation maps world to camera coordinates; position is the optical center
/// in the world frame. X_cam = rotation * (X_world - position).
struct CameraPose {
  Rotation3 rotation;
  Vec3 position = Vec3::Zero();
};

// offset + amplitude * sin(frequency * t + phase), per component.
struct Sinusoid3 {
  Vec3 offset = Vec3::Zero();
  Vec3 amplitude = Vec3::Zero();
  Vec3 frequency = Vec3::Zero();
  Vec3 phase = Vec3::Zero();

  Vec3 value(double t) const;
  Vec3 derivative(double t) const;
  // sup_t |value(t)| <= peak_bound(), attained when the phases line up.
  double peak_bound() const;
};

/// Camera body twist as per-axis sinusoids.
struct VelocityProfile {
  Sinusoid3 linear;
  Sinusoid3 angular;

  BodyTwist at(double t) const { return BodyTwist{linear.value(t), angular.value(t)}; }
  // dv/dt of the body-frame velocity components.
  Vec3 linear_acceleration(double t) const { return linear.derivative(t); }
  // Acceleration of the optical center in the camera frame: dv/dt + w x v.
  Vec3 body_acceleration(double t) const;

  // Maxima over [0, duration] sampled every `step` seconds.
  double max_body_acceleration(double duration, double step = 1e-3) const;
  double max_angular_rate(double duration, double step = 1e-3) const;
  // Integral of |v| over [t0, t1] by composite Simpson with n panels.
  double distance(double t0, double t1, int panels = 2000) const;
};

struct ImuExtrinsics {
  Rotation3 rotation;                    // IMU to camera
  Vec3 translation = Vec3::Zero();       // IMU to camera
  double gravity = 9.80665;
};

struct ImuSample {
  Vec3 omega = Vec3::Zero();           // body rate, camera frame
  Vec3 accel = Vec3::Zero();           // gravity-compensated, IMU frame
  Vec3 specific_force = Vec3::Zero();  // raw accelerometer reading
};

struct LineMeasurement {
  Axis axis = Axis::D1;
  ReducedMoment tau;
  Vec3 moment = Vec3::Zero();
  Vec3 direction = Vec3::Zero();
  double depth = 0.0;
  double inv_depth = 0.0;
};

struct PlaneMeasurement {
  Vec3 normal = Vec3::Zero();
  Vec3 scaled_velocity = Vec3::Zero();  // v / rho, body velocity
  double inv_depth = 0.0;
  double depth = 0.0;
};

/// Everything the observers may read at one instant, synthesized from the
/// ground truth. After `perturb`, frame/cayley/tau/moment carry noise while
/// direction, depth and inv_depth stay exact.
struct MeasurementFrame {
  double t = 0.0;
  Rotation3 frame;  // Manhattan frame in camera coordinates
  CayleyParams cayley;
  std::vector<LineMeasurement> lines;
  PlaneMeasurement plane;
  SceneTwist twist;
  ImuSample imu;
};

/// Random scene: frame uniform on SO(3) with rotation angle <= pi - 0.1,
/// anchors uniform in an axis-aligned cube of the given side centered at
/// (0, 0, 5 + side/2), plane facing the camera at a depth drawn in [4, 6].
/// Throws RetryExhausted if an anchor cannot meet the 0.1 depth floor in 100
/// draws.
WorldScene random_scene(std::uint64_t seed, std::array<int, 3> lines_per_axis,
                        double cube_side = 25.0);

// Uniformly distributed rotation (Haar measure).
Mat3 random_rotation(Rng& rng);
double rotation_angle(const Mat3& r);

// Time derivatives of (rotation, position) under a body twist.
struct PoseRate {
  Mat3 rotation;
  Vec3 position;
};
PoseRate pose_rate(const CameraPose& pose, const BodyTwist& twist);

/// RK4 step of dR/dt = -[w]x R, dp/dt = R^T v with a constant twist, followed
/// by re-orthonormalization of R.
CameraPose advance_pose(const CameraPose& pose, const BodyTwist& twist, double dt);
// Same, with the twist taken from the profile at the RK4 stage times.
CameraPose advance_pose(const CameraPose& pose, const VelocityProfile& profile, double t,
                        double dt);

/// Gyro and gravity-compensated accelerometer consistent with the profile:
/// R_ic * a_I + [w]x^2 t_ic equals the body acceleration.
ImuSample synthesize_imu(const VelocityProfile& profile, double t, const CameraPose& pose,
                         const ImuExtrinsics& ext);
// a_I = f_I + R_wi [0, 0, g].
Vec3 compensate_gravity(const Vec3& specific_force, const CameraPose& pose,
                        const ImuExtrinsics& ext);

/// Exact measurements at the given pose. Throws DepthSingularity when a line
/// passes within 1e-6 of the optical center and SingularRotation when the
/// Manhattan frame leaves the Cayley chart.
MeasurementFrame observe(const WorldScene& scene, const CameraPose& pose, const BodyTwist& twist,
                         const ImuSample& imu, double t = 0.0);

/// Small-rotation noise for one frame: one rotation for the Manhattan frame
/// and one per line moment.
struct NoiseDraw {
  Mat3 frame = Mat3::Identity();
  std::vector<Mat3> moments;
};

// Rotation from three Euler angles (z-y-x) each uniform with zero mean and
// standard deviation sigma_deg.
Mat3 small_rotation(double sigma_deg, Rng& rng);
NoiseDraw sample_noise(double sigma_deg, std::size_t n_lines, Rng& rng);
MeasurementFrame apply_noise(const MeasurementFrame& frame, const NoiseDraw& noise);
MeasurementFrame perturb(const MeasurementFrame& frame, double sigma_deg, Rng& rng);

// Key-value text format for trial replay; numbers are written in shortest
// round-trip form so a read-back scene is bit-identical.
void write_scene(std::ostream& os, const WorldScene& scene);
WorldScene read_scene(std::istream& is);

}  // namespace mwl
