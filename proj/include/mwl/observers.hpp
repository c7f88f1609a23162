#pragma once

#include "mwl/geometry.hpp"
#include "mwl/world_sim.hpp"

#include <optional>
#include <vector>

namespace mwl {

using Mat32 = Eigen::Matrix<double, 3, 2>;

// ---------------------------------------------------------------------------
// Plane depth / scaled linear velocity observer.
//
// State [s, psi] with s = v / rho and psi = 1 / rho, where v is the camera
// body velocity and rho the plane depth. Inputs are the gyro rate w and the
// gravity-compensated accelerometer a_I; measurements are s and the plane
// normal m.
// ---------------------------------------------------------------------------

struct PlaneVelState {
  Vec3 s = Vec3::Zero();
  double psi = 0.0;
};

struct PlaneGains {
  double k_s = 2.0;
  double k_rho = 20.0;
};

// R_ic a_I + [w]x^2 t_ic, transposed in the observer equations.
Vec3 plane_regressor(const Vec3& omega, const Vec3& accel, const ImuExtrinsics& ext);

/// True dynamics:
///   ds/dt   = -[w]x s - s s^T m + (R_ic a_I + [w]x^2 t_ic) psi
///   dpsi/dt = -psi s^T m
PlaneVelState plane_dynamics(const PlaneVelState& state, const Vec3& m, const Vec3& omega,
                             const Vec3& accel, const ImuExtrinsics& ext);

/// Observer:
///   ds^/dt   = -[w]x s - s s^T m + Omega^T psi^ + k_s (s - s^)
///   dpsi^/dt = -psi^ s^T m + k_rho Omega (s - s^)
/// The motion terms use the measured s; only the innovation uses s^.
PlaneVelState plane_observer_rhs(const PlaneVelState& estimate, const Vec3& s_measured,
                                 const Vec3& m, const Vec3& omega, const Vec3& accel,
                                 const ImuExtrinsics& ext, const PlaneGains& gains);

// ---------------------------------------------------------------------------
// Manhattan-World multi-line observer.
//
// Reduced state: Cayley parameters c of the Manhattan frame, the reduced
// moments tau_i and the inverse depths chi_i. Inputs are the scene twist
// (nu, omega), see SceneTwist.
// ---------------------------------------------------------------------------

struct ManhattanEstimate {
  CayleyParams c;
  std::vector<Vec2> tau;
  std::vector<double> chi;
  std::vector<Axis> axes;

  std::size_t size() const { return axes.size(); }
};

struct ManhattanGains {
  double k_c = 20.0;
  std::vector<double> k_tau;
  std::vector<double> k_chi;

  static ManhattanGains uniform(std::size_t n, double k_c, double k_tau, double k_chi);
};

struct ManhattanMeasurement {
  CayleyParams c;
  std::vector<ReducedMoment> tau;

  static ManhattanMeasurement from(const MeasurementFrame& frame);
};

/// Q(c) with dc/dt = Q(c) omega:
///
///   Q = -1/2 [ 1+c1^2     c1c2-c3   c1c3+c2 ]
///            [ c1c2+c3    1+c2^2    c2c3-c1 ]
///            [ c1c3-c2    c2c3+c1   1+c3^2  ]
Mat3 mw_Q(const CayleyParams& c);

/// X_i = n_i x d_j, so that dchi_i/dt = X_i^T nu chi_i^2.
Vec3 mw_X(const ReducedMoment& tau, const CayleyParams& c);
Vec3 mw_X(const ReducedMoment& tau, const Rotation3& frame);

/// T_i with dtau_i/dt = T_i^T nu chi_i. T_i^T is the pair of surviving rows of
/// R (n_i x d_j) n_i^T; the omega terms of do_i/dt cancel.
Mat32 mw_T(const ReducedMoment& tau, const CayleyParams& c);
Mat32 mw_T(const ReducedMoment& tau, const Rotation3& frame);

// Full 3x3 R (n x d_j) n^T, exposed for the zero-row property.
Mat3 moment_rate_matrix(const ReducedMoment& tau, const Rotation3& frame);

/// Reduced model for the true state (oracle side):
///   dc/dt = Q omega, dtau_i/dt = T_i^T nu chi_i, dchi_i/dt = X_i^T nu chi_i^2.
ManhattanEstimate mw_dynamics(const ManhattanEstimate& state, const SceneTwist& twist);

/// Observer derivative. T, X and Q are evaluated at the measured (tau, c).
ManhattanEstimate mw_observer_rhs(const ManhattanEstimate& estimate,
                                  const ManhattanMeasurement& meas, const SceneTwist& twist,
                                  const ManhattanGains& gains);

struct ManhattanErrors {
  Vec3 c = Vec3::Zero();
  std::vector<Vec2> tau;
  std::vector<double> chi;

  double norm() const;
};

// truth - estimate
ManhattanErrors mw_errors(const ManhattanEstimate& truth, const ManhattanEstimate& estimate);

/// Error dynamics with exact inputs:
///   dc~/dt   = -k_c c~
///   dtau~/dt = T^T nu chi~ - k_tau tau~
///   dchi~/dt = X^T nu (chi + chi^) chi~ - k_chi (T^T nu)^T tau~
ManhattanErrors mw_error_rhs(const ManhattanErrors& err, const ManhattanMeasurement& meas,
                             const std::vector<double>& chi_true, const SceneTwist& twist,
                             const ManhattanGains& gains);

/// V = 1/2 sum_i (tau~_i^T tau~_i + chi~_i^2 / k_chi_i) + 1/2 c~^T c~.
double lyapunov_V(const ManhattanErrors& err, const ManhattanGains& gains);

/// Stability conditions at one instant: (1) X_i^T nu <= 0 when chi^_i > 0 and
/// X_i^T nu = 0 otherwise; (2) nu^T T_i T_i^T nu > 0. Both must hold for all
/// lines.
struct StabilityConditions {
  bool sign_condition = true;
  bool excitation = true;
  int sign_violations = 0;
  int excitation_violations = 0;

  bool hold() const { return sign_condition && excitation; }
};
StabilityConditions check_conditions(const ManhattanEstimate& estimate,
                                     const ManhattanMeasurement& meas, const Vec3& nu);

// ---------------------------------------------------------------------------
// Cascade: the plane observer supplies the linear velocity of the line
// observer.
// ---------------------------------------------------------------------------

inline constexpr double kDefaultPsiFloor = 1e-4;

/// Scene linear velocity from the plane estimate: nu^ = -s^ / psi^ (s holds
/// the body velocity, nu its negation). Throws ScaleDegenerate when
/// |psi^| <= psi_floor.
Vec3 velocity_from_plane(const PlaneVelState& plane, double psi_floor = kDefaultPsiFloor);

struct CascadeGains {
  PlaneGains plane;
  ManhattanGains mw;
};

struct CascadeDerivative {
  PlaneVelState plane;
  ManhattanEstimate mw;
  Vec3 nu_used = Vec3::Zero();
};

/// Plane observer driven by (s, m, w, a_I); its velocity estimate and the
/// gyro rate drive the line observer. `forced_nu` bypasses the plane
/// velocity and feeds the given value instead. Throws ScaleDegenerate as
/// velocity_from_plane.
CascadeDerivative cascade_rhs(const PlaneVelState& plane, const ManhattanEstimate& mw,
                              const MeasurementFrame& frame, const ImuExtrinsics& ext,
                              const CascadeGains& gains, double psi_floor = kDefaultPsiFloor,
                              const std::optional<Vec3>& forced_nu = std::nullopt);

}  // namespace mwl
