#include "mwl/observers.hpp"

#include "mwl/errors.hpp"

#include <cmath>
#include <sstream>

namespace mwl {

namespace {

void check_aligned(const ManhattanEstimate& est, const ManhattanMeasurement& meas) {
  if (est.tau.size() != est.size() || est.chi.size() != est.size() ||
      meas.tau.size() != est.size()) {
    throw Error(ErrorKind::InvalidArgument, "estimate and measurement line counts differ");
  }
}

void check_gains(const ManhattanGains& g, std::size_t n) {
  if (g.k_tau.size() != n || g.k_chi.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "gain vectors do not match the number of lines");
  }
}

}  // namespace

Vec3 plane_regressor(const Vec3& omega, const Vec3& accel, const ImuExtrinsics& ext) {
  const Mat3 w = skew(omega);
  return ext.rotation.matrix() * accel + w * w * ext.translation;
}

PlaneVelState plane_dynamics(const PlaneVelState& state, const Vec3& m, const Vec3& omega,
                             const Vec3& accel, const ImuExtrinsics& ext) {
  const double sm = state.s.dot(m);
  PlaneVelState d;
  d.s = -omega.cross(state.s) - state.s * sm + plane_regressor(omega, accel, ext) * state.psi;
  d.psi = -state.psi * sm;
  return d;
}

PlaneVelState plane_observer_rhs(const PlaneVelState& estimate, const Vec3& s_measured,
                                 const Vec3& m, const Vec3& omega, const Vec3& accel,
                                 const ImuExtrinsics& ext, const PlaneGains& gains) {
  const Vec3 omega_t = plane_regressor(omega, accel, ext);
  const Vec3 innovation = s_measured - estimate.s;
  const double sm = s_measured.dot(m);
  PlaneVelState d;
  d.s = -omega.cross(s_measured) - s_measured * sm + omega_t * estimate.psi +
        gains.k_s * innovation;
  d.psi = -estimate.psi * sm + gains.k_rho * omega_t.dot(innovation);
  return d;
}

ManhattanGains ManhattanGains::uniform(std::size_t n, double k_c, double k_tau, double k_chi) {
  ManhattanGains g;
  g.k_c = k_c;
  g.k_tau.assign(n, k_tau);
  g.k_chi.assign(n, k_chi);
  return g;
}

ManhattanMeasurement ManhattanMeasurement::from(const MeasurementFrame& frame) {
  ManhattanMeasurement m;
  m.c = frame.cayley;
  m.tau.reserve(frame.lines.size());
  for (const auto& l : frame.lines) m.tau.push_back(l.tau);
  return m;
}

Mat3 mw_Q(const CayleyParams& cp) {
  const double c1 = cp.value(0), c2 = cp.value(1), c3 = cp.value(2);
  Mat3 q;
  q << 1.0 + c1 * c1, c1 * c2 - c3, c1 * c3 + c2,
       c1 * c2 + c3, 1.0 + c2 * c2, c2 * c3 - c1,
       c1 * c3 - c2, c2 * c3 + c1, 1.0 + c3 * c3;
  return -0.5 * q;
}

Vec3 mw_X(const ReducedMoment& tau, const Rotation3& frame) {
  const Vec3 n = reconstruct_moment(tau, frame);
  return n.cross(frame.row(tau.axis));
}

Vec3 mw_X(const ReducedMoment& tau, const CayleyParams& c) {
  return mw_X(tau, rotation_from_cayley(c));
}

Mat3 moment_rate_matrix(const ReducedMoment& tau, const Rotation3& frame) {
  const Vec3 n = reconstruct_moment(tau, frame);
  return (frame * n.cross(frame.row(tau.axis))) * n.transpose();
}

Mat32 mw_T(const ReducedMoment& tau, const Rotation3& frame) {
  const Mat3 full = moment_rate_matrix(tau, frame);
  const auto keep = surviving_indices(tau.axis);
  Mat32 t;
  t.col(0) = full.row(keep[0]).transpose();
  t.col(1) = full.row(keep[1]).transpose();
  return t;
}

Mat32 mw_T(const ReducedMoment& tau, const CayleyParams& c) {
  return mw_T(tau, rotation_from_cayley(c));
}

ManhattanEstimate mw_dynamics(const ManhattanEstimate& state, const SceneTwist& twist) {
  const Rotation3 frame = rotation_from_cayley(state.c);
  ManhattanEstimate d;
  d.axes = state.axes;
  d.c.value = mw_Q(state.c) * twist.omega;
  d.tau.resize(state.size());
  d.chi.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const ReducedMoment rm{state.tau[i], state.axes[i]};
    const double chi = state.chi[i];
    d.tau[i] = mw_T(rm, frame).transpose() * twist.nu * chi;
    d.chi[i] = mw_X(rm, frame).dot(twist.nu) * chi * chi;
  }
  return d;
}

ManhattanEstimate mw_observer_rhs(const ManhattanEstimate& est, const ManhattanMeasurement& meas,
                                  const SceneTwist& twist, const ManhattanGains& gains) {
  check_aligned(est, meas);
  check_gains(gains, est.size());
  const Rotation3 frame = rotation_from_cayley(meas.c);
  ManhattanEstimate d;
  d.axes = est.axes;
  d.c.value = mw_Q(meas.c) * twist.omega + gains.k_c * (meas.c.value - est.c.value);
  d.tau.resize(est.size());
  d.chi.resize(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    const ReducedMoment& rm = meas.tau[i];
    const Vec2 t_nu = mw_T(rm, frame).transpose() * twist.nu;
    const Vec2 innovation = rm.tau - est.tau[i];
    const double chi = est.chi[i];
    d.tau[i] = t_nu * chi + gains.k_tau[i] * innovation;
    d.chi[i] = mw_X(rm, frame).dot(twist.nu) * chi * chi + gains.k_chi[i] * t_nu.dot(innovation);
  }
  return d;
}

double ManhattanErrors::norm() const {
  double sq = c.squaredNorm();
  for (const auto& t : tau) sq += t.squaredNorm();
  for (double x : chi) sq += x * x;
  return std::sqrt(sq);
}

ManhattanErrors mw_errors(const ManhattanEstimate& truth, const ManhattanEstimate& estimate) {
  if (truth.size() != estimate.size()) {
    throw Error(ErrorKind::InvalidArgument, "truth and estimate line counts differ");
  }
  ManhattanErrors e;
  e.c = truth.c.value - estimate.c.value;
  e.tau.resize(truth.size());
  e.chi.resize(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    e.tau[i] = truth.tau[i] - estimate.tau[i];
    e.chi[i] = truth.chi[i] - estimate.chi[i];
  }
  return e;
}

ManhattanErrors mw_error_rhs(const ManhattanErrors& err, const ManhattanMeasurement& meas,
                             const std::vector<double>& chi_true, const SceneTwist& twist,
                             const ManhattanGains& gains) {
  const std::size_t n = meas.tau.size();
  if (err.tau.size() != n || err.chi.size() != n || chi_true.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "error and measurement line counts differ");
  }
  check_gains(gains, n);
  const Rotation3 frame = rotation_from_cayley(meas.c);
  ManhattanErrors d;
  d.c = -gains.k_c * err.c;
  d.tau.resize(n);
  d.chi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ReducedMoment& rm = meas.tau[i];
    const Vec2 t_nu = mw_T(rm, frame).transpose() * twist.nu;
    const double chi_hat = chi_true[i] - err.chi[i];
    d.tau[i] = t_nu * err.chi[i] - gains.k_tau[i] * err.tau[i];
    d.chi[i] = mw_X(rm, frame).dot(twist.nu) * (chi_true[i] + chi_hat) * err.chi[i] -
               gains.k_chi[i] * t_nu.dot(err.tau[i]);
  }
  return d;
}

double lyapunov_V(const ManhattanErrors& err, const ManhattanGains& gains) {
  check_gains(gains, err.tau.size());
  if (err.chi.size() != err.tau.size()) {
    throw Error(ErrorKind::InvalidArgument, "error vectors differ in length");
  }
  double v = 0.5 * err.c.squaredNorm();
  for (std::size_t i = 0; i < err.tau.size(); ++i) {
    v += 0.5 * (err.tau[i].squaredNorm() + err.chi[i] * err.chi[i] / gains.k_chi[i]);
  }
  return v;
}

StabilityConditions check_conditions(const ManhattanEstimate& est, const ManhattanMeasurement& meas,
                                     const Vec3& nu) {
  check_aligned(est, meas);
  const Rotation3 frame = rotation_from_cayley(meas.c);
  StabilityConditions out;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double x_nu = mw_X(meas.tau[i], frame).dot(nu);
    const bool sign_ok = est.chi[i] > 0.0 ? x_nu <= 0.0 : x_nu == 0.0;
    if (!sign_ok) {
      out.sign_condition = false;
      ++out.sign_violations;
    }
    const Vec2 t_nu = mw_T(meas.tau[i], frame).transpose() * nu;
    if (!(t_nu.squaredNorm() > 0.0)) {
      out.excitation = false;
      ++out.excitation_violations;
    }
  }
  return out;
}

Vec3 velocity_from_plane(const PlaneVelState& plane, double psi_floor) {
  if (!(std::abs(plane.psi) > psi_floor)) {
    std::ostringstream os;
    os << "inverse plane depth estimate " << plane.psi << " is within the guard " << psi_floor;
    throw Error(ErrorKind::ScaleDegenerate, os.str());
  }
  return -plane.s / plane.psi;
}

CascadeDerivative cascade_rhs(const PlaneVelState& plane, const ManhattanEstimate& mw,
                              const MeasurementFrame& frame, const ImuExtrinsics& ext,
                              const CascadeGains& gains, double psi_floor,
                              const std::optional<Vec3>& forced_nu) {
  CascadeDerivative out;
  out.plane = plane_observer_rhs(plane, frame.plane.scaled_velocity, frame.plane.normal,
                                 frame.imu.omega, frame.imu.accel, ext, gains.plane);
  out.nu_used = forced_nu ? *forced_nu : velocity_from_plane(plane, psi_floor);
  const SceneTwist twist{out.nu_used, -frame.imu.omega};
  out.mw = mw_observer_rhs(mw, ManhattanMeasurement::from(frame), twist, gains.mw);
  return out;
}

}  // namespace mwl
