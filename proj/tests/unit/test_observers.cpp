#include "mwl/errors.hpp"
#include "mwl/observers.hpp"
#include "mwl/trials.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace mwl;
using mwl::testing::max_abs;

namespace {

ReducedMoment tau_of(const Vec2& t, Axis a) { return ReducedMoment{t, a}; }

// Random exact reduced state with n lines.
struct RandomMw {
  Rotation3 frame;
  ManhattanEstimate state;
  ManhattanMeasurement meas;
};

RandomMw random_mw(Rng& rng, std::size_t n) {
  RandomMw r;
  r.frame = Rotation3(mwl::testing::random_rotation_bounded(rng, 2.5));
  r.state.c = cayley_from_rotation(r.frame);
  r.meas.c = r.state.c;
  for (std::size_t i = 0; i < n; ++i) {
    const Axis a = static_cast<Axis>(i % 3);
    const Vec3 moment = mwl::testing::random_orthogonal(rng, r.frame.row(a));
    const ReducedMoment t = project_moment(r.frame, moment, a);
    r.state.axes.push_back(a);
    r.state.tau.push_back(t.tau);
    r.state.chi.push_back(uniform(rng, 0.05, 1.0));
    r.meas.tau.push_back(t);
  }
  return r;
}

}  // namespace

TEST_CASE("Q matrix") {
  CHECK(max_abs(mw_Q(CayleyParams{}) + 0.5 * Mat3::Identity()) == 0.0);
  const Mat3 expected = -0.5 * (Mat3() << 2, 0, 0, 0, 1, -1, 0, 1, 1).finished();
  CHECK(max_abs(mw_Q(CayleyParams{Vec3(1, 0, 0)}) - expected) < 1e-15);
  const Vec3 c(0.3, -0.7, 1.9);
  const Mat3 q = mw_Q(CayleyParams{c});
  CHECK(q(0, 1) == doctest::Approx(-0.5 * (c(0) * c(1) - c(2))));
  CHECK(q(2, 0) == doctest::Approx(-0.5 * (c(0) * c(2) - c(1))));
  CHECK(q(1, 1) == doctest::Approx(-0.5 * (1 + c(1) * c(1))));
}

TEST_CASE("Cayley rates along a rotating trajectory") {
  WorldScene s = random_scene(4, {1, 1, 1}, 25.0);
  // Keep c moderate; near a half turn the finite difference itself loses digits.
  s.frame = Rotation3(mwl::testing::axis_angle(Vec3(0.3, -1.0, 0.6), 1.2));
  const VelocityProfile prof = mwl::testing::test_profile();
  const double h = 1e-4;
  CameraPose pose;
  double t = 0.0, worst = 0.0;
  for (int k = 0; k < 3000; ++k, t += 1e-3) {
    if (k % 100 == 0) {
      const CameraPose fwd = advance_pose(pose, prof, t, h);
      const CameraPose back = advance_pose(pose, prof, t, -h);
      const Vec3 cf = cayley_from_rotation(observe(s, fwd, prof.at(t + h), ImuSample{}).frame).value;
      const Vec3 cb = cayley_from_rotation(observe(s, back, prof.at(t - h), ImuSample{}).frame).value;
      const MeasurementFrame f = observe(s, pose, prof.at(t), ImuSample{}, t);
      const Vec3 rate = mw_Q(f.cayley) * f.twist.omega;
      worst = std::max(worst, ((cf - cb) / (2 * h) - rate).norm());
    }
    pose = advance_pose(pose, prof, t, 1e-3);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("X and T on the identity frame") {
  const ReducedMoment t = tau_of(Vec2(1, 0), Axis::D3);
  CHECK(mw_X(t, CayleyParams{}).isApprox(Vec3(0, -1, 0)));
  const Vec3 nu(0.4, -1.3, 2.2);
  const Vec2 rate = mw_T(t, CayleyParams{}).transpose() * nu;
  CHECK(rate(0) == doctest::Approx(0.0));
  CHECK(rate(1) == doctest::Approx(-nu(0)));
}

TEST_CASE("X and T structural properties") {
  Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const RandomMw r = random_mw(rng, 3);
    for (std::size_t k = 0; k < 3; ++k) {
      const ReducedMoment& t = r.meas.tau[k];
      const Vec3 d = r.frame.row(t.axis);
      CHECK(std::abs(mw_X(t, r.meas.c).dot(d)) < 1e-12);
      const Mat3 m = moment_rate_matrix(t, r.frame);
      CHECK(m.row(index_of(t.axis)).norm() < 1e-12);
      CHECK(max_abs(mw_T(t, r.meas.c) - mw_T(t, r.frame)) < 1e-9);
      // Depth never changes for motion along the line.
      const Vec3 n = reconstruct_moment(t, r.frame);
      CHECK(std::abs(d.cross(n).dot(0.7 * d)) < 1e-12);
    }
  }
}

TEST_CASE("Lyapunov function values") {
  ManhattanErrors e;
  const ManhattanGains g1 = ManhattanGains::uniform(1, 20, 20, 100);
  e.tau = {Vec2::Zero()};
  e.chi = {0.0};
  CHECK(lyapunov_V(e, g1) == 0.0);
  e.c = Vec3(1, 0, 0);
  CHECK(lyapunov_V(e, g1) == doctest::Approx(0.5));
  e.c.setZero();
  e.tau = {Vec2(0, 1)};
  e.chi = {2.0};
  CHECK(lyapunov_V(e, g1) == doctest::Approx(0.52));
}

TEST_CASE("observer with exact estimate reproduces the true dynamics") {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const RandomMw r = random_mw(rng, 6);
    const SceneTwist tw{mwl::testing::random_unit(rng), 0.3 * mwl::testing::random_unit(rng)};
    const ManhattanGains g = ManhattanGains::uniform(6, 20, 20, 100);
    const ManhattanEstimate obs = mw_observer_rhs(r.state, r.meas, tw, g);
    const ManhattanEstimate truth = mw_dynamics(r.state, tw);
    CHECK((obs.c.value - truth.c.value).norm() < 1e-14);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK((obs.tau[k] - truth.tau[k]).norm() < 1e-14);
      CHECK(std::abs(obs.chi[k] - truth.chi[k]) < 1e-14);
    }
  }
}

TEST_CASE("observer innovation and error dynamics agree") {
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const RandomMw r = random_mw(rng, 6);
    ManhattanEstimate est = r.state;
    est.c.value += 0.1 * mwl::testing::random_unit(rng);
    for (std::size_t k = 0; k < 6; ++k) {
      est.tau[k] += 0.05 * Vec2(standard_normal(rng), standard_normal(rng));
      est.chi[k] = uniform(rng, 0.05, 1.0);
    }
    const SceneTwist tw{mwl::testing::random_unit(rng), 0.3 * mwl::testing::random_unit(rng)};
    const ManhattanGains g = ManhattanGains::uniform(6, 20, 20, 100);
    const ManhattanEstimate dt = mw_dynamics(r.state, tw);
    const ManhattanEstimate de = mw_observer_rhs(est, r.meas, tw, g);
    const ManhattanErrors err = mw_errors(r.state, est);
    const ManhattanErrors rhs = mw_error_rhs(err, r.meas, r.state.chi, tw, g);
    CHECK((dt.c.value - de.c.value - rhs.c).norm() < 1e-12);
    CHECK((rhs.c + 20.0 * err.c).norm() < 1e-12);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK((dt.tau[k] - de.tau[k] - rhs.tau[k]).norm() < 1e-12);
      CHECK(std::abs(dt.chi[k] - de.chi[k] - rhs.chi[k]) < 1e-12);
    }
  }
}

TEST_CASE("pure rotation freezes the depth error") {
  Rng rng(10);
  const RandomMw r = random_mw(rng, 3);
  ManhattanErrors err = mw_errors(r.state, r.state);
  err.tau[1] = Vec2(0.2, -0.1);
  err.chi[2] = 0.4;
  const ManhattanGains g = ManhattanGains::uniform(3, 20, 20, 100);
  const ManhattanErrors rhs = mw_error_rhs(err, r.meas, r.state.chi, SceneTwist{Vec3::Zero(), Vec3(0.1, 0.2, 0.3)}, g);
  CHECK((rhs.tau[1] + 20.0 * err.tau[1]).norm() < 1e-15);
  CHECK(rhs.chi[2] == 0.0);
}

TEST_CASE("depth rates are invariant to a global camera rotation") {
  Rng rng(14);
  const RandomMw r = random_mw(rng, 6);
  const Mat3 gr = mwl::testing::random_rotation_bounded(rng, 0.5);
  // Rotating every camera-frame quantity by G: frame rows and nu turn, tau stays.
  const Rotation3 turned(r.frame.matrix() * gr.transpose());
  ManhattanMeasurement m2 = r.meas;
  m2.c = cayley_from_rotation(turned);
  ManhattanEstimate e2 = r.state;
  e2.c = m2.c;
  const Vec3 nu = mwl::testing::random_unit(rng);
  const ManhattanGains g = ManhattanGains::uniform(6, 20, 20, 100);
  const ManhattanEstimate a = mw_observer_rhs(r.state, r.meas, SceneTwist{nu, Vec3::Zero()}, g);
  const ManhattanEstimate b = mw_observer_rhs(e2, m2, SceneTwist{gr * nu, Vec3::Zero()}, g);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(a.chi[k] == doctest::Approx(b.chi[k]).epsilon(1e-10));
    CHECK((a.tau[k] - b.tau[k]).norm() < 1e-10);
  }
}

TEST_CASE("stability condition monitor") {
  ManhattanEstimate est;
  est.axes = {Axis::D3};
  est.tau = {Vec2(1, 0)};
  est.chi = {0.5};
  ManhattanMeasurement meas;
  meas.tau = {tau_of(Vec2(1, 0), Axis::D3)};
  // X = (0, -1, 0); X^T nu <= 0 needs nu_y >= 0; excitation needs nu_x != 0.
  StabilityConditions ok = check_conditions(est, meas, Vec3(1, 1, 0));
  CHECK(ok.hold());
  StabilityConditions bad_sign = check_conditions(est, meas, Vec3(1, -1, 0));
  CHECK_FALSE(bad_sign.sign_condition);
  CHECK(bad_sign.sign_violations == 1);
  StabilityConditions no_pe = check_conditions(est, meas, Vec3(0, 1, 0));
  CHECK_FALSE(no_pe.excitation);
  CHECK(no_pe.excitation_violations == 1);
}

TEST_CASE("plane observer") {
  Rng rng(2);
  ImuExtrinsics ext;
  ext.rotation = Rotation3(mwl::testing::axis_angle(Vec3(1, 0, 1), 0.3));
  ext.translation = Vec3(0.05, 0.0, -0.1);
  for (int i = 0; i < 50; ++i) {
    const PlaneVelState truth{Vec3(standard_normal(rng), standard_normal(rng), standard_normal(rng)),
                              uniform(rng, 0.1, 1.0)};
    const Vec3 m = mwl::testing::random_unit(rng);
    const Vec3 w = 0.5 * mwl::testing::random_unit(rng);
    const Vec3 a = 2.0 * mwl::testing::random_unit(rng);
    const PlaneVelState dyn = plane_dynamics(truth, m, w, a, ext);
    const PlaneVelState obs = plane_observer_rhs(truth, truth.s, m, w, a, ext, PlaneGains{});
    CHECK((dyn.s - obs.s).norm() < 1e-14);
    CHECK(std::abs(dyn.psi - obs.psi) < 1e-14);
    // Innovation pulls toward the measurement.
    PlaneVelState off = truth;
    off.s += Vec3(0.1, 0, 0);
    const PlaneVelState pulled = plane_observer_rhs(off, truth.s, m, w, a, ext, PlaneGains{});
    CHECK((pulled.s - obs.s - 2.0 * (truth.s - off.s)).norm() < 1e-12);
  }
}

TEST_CASE("velocity from the plane estimate") {
  CHECK(velocity_from_plane(PlaneVelState{Vec3(0, 0, 0.2), 0.2}).isApprox(Vec3(0, 0, -1)));
  try {
    velocity_from_plane(PlaneVelState{Vec3(0, 0, 0.2), 0.0});
    FAIL("psi = 0 accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ScaleDegenerate);
  }
  CHECK_THROWS_AS(velocity_from_plane(PlaneVelState{Vec3(1, 0, 0), 5e-5}), Error);
}

TEST_CASE("cascade at the true plane state equals the standalone observer") {
  const WorldScene s = random_scene(3, {2, 2, 2}, 25.0);
  const VelocityProfile prof = mwl::testing::test_profile();
  CameraPose pose;
  for (int k = 0; k < 500; ++k) pose = advance_pose(pose, prof, k * 1e-3, 1e-3);
  const double t = 0.5;
  const ImuExtrinsics ext;
  const MeasurementFrame f = observe(s, pose, prof.at(t), synthesize_imu(prof, t, pose, ext), t);
  const PlaneVelState plane{f.plane.scaled_velocity, f.plane.inv_depth};
  ManhattanEstimate est = state_from_frame(f);
  for (double& c : est.chi) c *= 1.3;
  CascadeGains g;
  g.mw = ManhattanGains::uniform(6, 20, 20, 200);
  const CascadeDerivative d = cascade_rhs(plane, est, f, ext, g);
  CHECK((d.nu_used - f.twist.nu).norm() < 1e-12);
  const ManhattanEstimate ref = mw_observer_rhs(est, ManhattanMeasurement::from(f), f.twist, g.mw);
  for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(d.mw.chi[k] - ref.chi[k]) < 1e-12);

  const CascadeDerivative forced = cascade_rhs(plane, est, f, ext, g, kDefaultPsiFloor, f.twist.nu);
  const ManhattanEstimate exact = mw_observer_rhs(est, ManhattanMeasurement::from(f),
                                                  SceneTwist{f.twist.nu, -f.imu.omega}, g.mw);
  for (std::size_t k = 0; k < 6; ++k) CHECK(forced.mw.chi[k] == exact.chi[k]);

  PlaneVelState zero = plane;
  zero.psi = 0.0;
  CHECK_THROWS_AS(cascade_rhs(zero, est, f, ext, g), Error);
}
