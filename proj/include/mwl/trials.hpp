#pragma once

#include "mwl/integrator.hpp"
#include "mwl/observers.hpp"
#include "mwl/world_sim.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mwl {

enum class Mode { MwOnly, Cascade };
enum class Verdict { Converged, Diverged, Timeout };

std::string_view to_string(Mode m);
std::string_view to_string(Verdict v);

/// Per-axis sinusoids for the camera body twist. With random_phases the
/// phases are drawn uniformly in [0, 2pi) from the trial seed.
struct ProfileConfig {
  Vec3 linear_offset = Vec3::Zero();
  Vec3 linear_amplitude = Vec3::Constant(1.1);
  Vec3 linear_frequency = Vec3(0.7, 1.1, 1.3);
  Vec3 angular_offset = Vec3::Zero();
  Vec3 angular_amplitude = Vec3::Constant(0.1);
  Vec3 angular_frequency = Vec3(0.5, 0.8, 0.9);
  bool random_phases = true;
  Vec3 linear_phase = Vec3::Zero();
  Vec3 angular_phase = Vec3::Zero();
};

VelocityProfile make_profile(const ProfileConfig& cfg, std::uint64_t seed);

struct TrialConfig {
  std::uint64_t seed = 1;
  std::array<int, 3> lines_per_axis{2, 2, 2};
  double cube_side = 25.0;
  Mode mode = Mode::MwOnly;

  double k_c = 20.0;
  double k_tau = 20.0;
  double k_chi = 100.0;
  double k_s = 2.0;
  double k_rho = 20.0;

  double dt = 1e-3;
  double duration = 15.0;
  Method method = Method::RK4;

  double noise_deg = 0.0;

  double convergence_fraction = 0.01;
  double divergence_factor = 1e3;
  double debounce = 0.2;

  // Unknowns start uniform in these ranges; measured quantities start at truth.
  double chi_init_min = 0.05;
  double chi_init_max = 1.0;
  double psi_init_min = 0.05;
  double psi_init_max = 1.0;
  double psi_floor = kDefaultPsiFloor;
  // Unknowns start at truth as well; zero initial error.
  bool start_at_truth = false;

  ProfileConfig profile;
  ImuExtrinsics imu;

  bool record_series = false;
  int decimation = 10;
  bool force_true_velocity = false;

  // Throws InvalidArgument naming the offending field.
  void validate() const;
  std::size_t line_count() const {
    return static_cast<std::size_t>(lines_per_axis[0] + lines_per_axis[1] + lines_per_axis[2]);
  }
};

/// One recorded sample of a trial.
struct SeriesSample {
  double t = 0.0;
  double state_error = 0.0;  // |[c~, tau~, chi~]|
  double cayley_error = 0.0;
  double lyapunov = 0.0;
  double plane_error = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> eps_d;
  std::vector<double> eps_l;
  std::vector<double> chi_hat;
};

/// Step-wise check of V along the trial. Steps where the stability
/// conditions fail at either end are excluded, and so are steps where the
/// true frame is within kChartMargin of a half turn: there |c| grows without
/// bound and a fixed step no longer resolves the Cayley dynamics.
inline constexpr double kChartMargin = 0.1;

struct LyapunovStats {
  long included_steps = 0;
  long excluded_steps = 0;
  long chart_excluded_steps = 0;
  double max_increase = -std::numeric_limits<double>::infinity();
};

struct TrialRecord {
  std::uint64_t seed = 0;
  Mode mode = Mode::MwOnly;
  Verdict verdict = Verdict::Timeout;
  std::string cause;  // failure kind for diverged trials
  double t_converged = std::numeric_limits<double>::quiet_NaN();
  double t_diverged = std::numeric_limits<double>::quiet_NaN();
  double t_end = 0.0;
  // Distance travelled until convergence, or until the trial stopped.
  double distance = 0.0;
  double total_distance = 0.0;
  double initial_error = 0.0;
  double final_error = 0.0;
  std::vector<double> chi_initial;
  std::vector<double> final_eps_d;
  std::vector<double> final_eps_l;

  // Cascade only.
  double plane_t_converged = std::numeric_limits<double>::quiet_NaN();
  double plane_initial_error = std::numeric_limits<double>::quiet_NaN();
  long scale_degenerate_events = 0;

  long sign_condition_violations = 0;
  long excitation_violations = 0;
  long condition_checks = 0;
  LyapunovStats lyapunov;

  std::vector<SeriesSample> series;

  bool success() const { return verdict == Verdict::Converged; }
};

/// Joint integrator of the camera pose and the observer states on a shared
/// clock. Measurements at every RK4 stage are synthesized from the stage
/// pose; one noise draw is held across the stages of a step.
class TrialSimulator {
 public:
  explicit TrialSimulator(const TrialConfig& cfg);
  TrialSimulator(const TrialConfig& cfg, WorldScene scene, VelocityProfile profile);

  const TrialConfig& config() const { return cfg_; }
  const WorldScene& scene() const { return scene_; }
  const VelocityProfile& profile() const { return profile_; }
  const StateVector& state() const { return state_; }
  double time() const { return t_; }

  CameraPose pose() const;
  ManhattanEstimate estimate() const;
  void set_estimate(const ManhattanEstimate& est);
  PlaneVelState plane_estimate() const;
  void set_plane_estimate(const PlaneVelState& p);

  // Exact, noise-free measurements at the current time.
  MeasurementFrame truth() const;
  ManhattanEstimate true_state() const;
  PlaneVelState true_plane_state() const;
  ManhattanGains mw_gains() const { return gains_.mw; }

  void step();
  long scale_degenerate_events() const { return scale_degenerate_events_; }

  // Full derivative at (t, x); exposed for tests.
  Vector derivative(double t, const Vector& x);

 private:
  void init_layout();
  void init_estimates();
  CameraPose pose_from(const Vector& x) const;
  MeasurementFrame frame_at(double t, const CameraPose& pose) const;

  TrialConfig cfg_;
  WorldScene scene_;
  VelocityProfile profile_;
  CascadeGains gains_;
  StateVector state_;
  double t_ = 0.0;
  long step_index_ = 0;
  Rng noise_rng_;
  std::optional<NoiseDraw> noise_;
  long scale_degenerate_events_ = 0;
};

// Reduced state from an exact frame.
ManhattanEstimate state_from_frame(const MeasurementFrame& f);

TrialRecord run_trial(const TrialConfig& cfg);

/// Error metrics.
double direction_error(const Vec3& d_hat, const Vec3& d);
double depth_error(double l_hat, double l);

double median(std::vector<double> values);

struct AggregateReport {
  std::size_t n_trials = 0;
  std::size_t n_success = 0;
  std::size_t n_diverged = 0;
  double success_rate = 0.0;  // percent
  double median_t_converged = std::numeric_limits<double>::quiet_NaN();
  double median_distance = std::numeric_limits<double>::quiet_NaN();
  // Trial-end errors pooled over all lines of all trials; diverged trials
  // contribute their errors at the stop time.
  double median_eps_d = std::numeric_limits<double>::quiet_NaN();
  double median_eps_l = std::numeric_limits<double>::quiet_NaN();
  std::vector<TrialRecord> trials;  // ordered by trial index
};

/// Seed of trial i in a run with the given master seed.
std::uint64_t trial_seed(std::uint64_t master, std::size_t index);

AggregateReport aggregate(std::vector<TrialRecord> trials);

/// n_trials independent trials; trial i uses trial_seed(base.seed, i).
/// Results do not depend on the worker count.
AggregateReport run_monte_carlo(const TrialConfig& base, std::size_t n_trials,
                                std::size_t workers = 1);

struct SweepLevel {
  double sigma_deg = 0.0;
  AggregateReport report;
};

/// Same trial seeds at every level, so levels differ only in noise.
std::vector<SweepLevel> run_noise_sweep(const TrialConfig& base, const std::vector<double>& sigmas,
                                        std::size_t n_trials, std::size_t workers = 1);

// CSV writers; headers are fixed per line count.
void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials);
void write_series_csv(std::ostream& os, const TrialRecord& record);
void write_sweep_csv(std::ostream& os, const std::vector<SweepLevel>& levels);
std::string format_number(double v);

}  // namespace mwl
