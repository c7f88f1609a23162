#include "mwl/trials.hpp"

#include "mwl/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace mwl {

std::string_view to_string(Mode m) {
  return m == Mode::MwOnly ? "mw_only" : "cascade";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "converged";
    case Verdict::Diverged: return "diverged";
    case Verdict::Timeout: return "timeout";
  }
  return "unknown";
}

VelocityProfile make_profile(const ProfileConfig& cfg, std::uint64_t seed) {
  VelocityProfile p;
  p.linear.offset = cfg.linear_offset;
  p.linear.amplitude = cfg.linear_amplitude;
  p.linear.frequency = cfg.linear_frequency;
  p.angular.offset = cfg.angular_offset;
  p.angular.amplitude = cfg.angular_amplitude;
  p.angular.frequency = cfg.angular_frequency;
  if (cfg.random_phases) {
    Rng rng(derive_seed(seed, stream::kProfile));
    for (int k = 0; k < 3; ++k) p.linear.phase(k) = uniform(rng, 0.0, 2.0 * M_PI);
    for (int k = 0; k < 3; ++k) p.angular.phase(k) = uniform(rng, 0.0, 2.0 * M_PI);
  } else {
    p.linear.phase = cfg.linear_phase;
    p.angular.phase = cfg.angular_phase;
  }
  return p;
}

void TrialConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorKind::InvalidArgument, "'" + field + "' " + why);
  };
  for (int j = 0; j < 3; ++j) {
    if (lines_per_axis[j] < 0) fail("lines_per_axis", "entries must be >= 0");
  }
  if (line_count() < 1) fail("lines_per_axis", "must contain at least one line");
  if (!(cube_side > 0.0)) fail("cube_side", "must be positive");
  if (!(k_c > 0.0)) fail("k_c", "must be positive");
  if (!(k_tau > 0.0)) fail("k_tau", "must be positive");
  if (!(k_chi > 0.0)) fail("k_chi", "must be positive");
  if (!(k_s > 0.0)) fail("k_s", "must be positive");
  if (!(k_rho > 0.0)) fail("k_rho", "must be positive");
  if (!(dt > 0.0)) fail("dt", "must be positive");
  if (!(duration > 0.0)) fail("duration", "must be positive");
  if (!(noise_deg >= 0.0)) fail("noise_deg", "must be >= 0");
  if (!(convergence_fraction > 0.0)) fail("convergence_fraction", "must be positive");
  if (!(divergence_factor > 0.0)) fail("divergence_factor", "must be positive");
  if (!(debounce >= 0.0)) fail("debounce", "must be >= 0");
  if (!(chi_init_max > chi_init_min)) fail("chi_init_max", "must exceed chi_init_min");
  if (!(psi_init_max > psi_init_min)) fail("psi_init_max", "must exceed psi_init_min");
  if (!(psi_floor > 0.0)) fail("psi_floor", "must be positive");
  if (decimation < 1) fail("decimation", "must be >= 1");
}

// ---------------------------------------------------------------------------
// TrialSimulator

TrialSimulator::TrialSimulator(const TrialConfig& cfg)
    : TrialSimulator(cfg, random_scene(cfg.seed, cfg.lines_per_axis, cfg.cube_side),
                     make_profile(cfg.profile, cfg.seed)) {}

TrialSimulator::TrialSimulator(const TrialConfig& cfg, WorldScene scene, VelocityProfile profile)
    : cfg_(cfg),
      scene_(std::move(scene)),
      profile_(std::move(profile)),
      state_(Layout{}),
      noise_rng_(derive_seed(cfg.seed, stream::kNoise)) {
  cfg_.validate();
  const std::size_t n = scene_.lines.size();
  gains_.plane = PlaneGains{cfg_.k_s, cfg_.k_rho};
  gains_.mw = ManhattanGains::uniform(n, cfg_.k_c, cfg_.k_tau, cfg_.k_chi);
  init_layout();
  init_estimates();
}

void TrialSimulator::init_layout() {
  const int n = static_cast<int>(scene_.lines.size());
  Layout layout;
  layout.add("pose.rotation", 9, BlockKind::Rotation);
  layout.add("pose.position", 3);
  if (cfg_.mode == Mode::Cascade) {
    layout.add("plane.s", 3);
    layout.add("plane.psi", 1);
  }
  layout.add("mw.c", 3);
  layout.add("mw.tau", 2 * n);
  layout.add("mw.chi", n);
  state_ = StateVector(std::move(layout));
  pack_rotation(Mat3::Identity(), state_.segment("pose.rotation"));
}

void TrialSimulator::init_estimates() {
  // Measured quantities start at their true values, unknowns at random.
  const MeasurementFrame f = truth();
  Rng rng(derive_seed(cfg_.seed, stream::kInitialGuess));
  ManhattanEstimate est = state_from_frame(f);
  for (double& chi : est.chi) {
    const double guess = uniform(rng, cfg_.chi_init_min, cfg_.chi_init_max);
    if (!cfg_.start_at_truth) chi = guess;
  }
  set_estimate(est);
  if (cfg_.mode == Mode::Cascade) {
    PlaneVelState p;
    p.s = f.plane.scaled_velocity;
    const double guess = uniform(rng, cfg_.psi_init_min, cfg_.psi_init_max);
    p.psi = cfg_.start_at_truth ? f.plane.inv_depth : guess;
    set_plane_estimate(p);
  }
}

CameraPose TrialSimulator::pose_from(const Vector& x) const {
  const Block& r = state_.layout.block("pose.rotation");
  const Block& p = state_.layout.block("pose.position");
  return CameraPose{Rotation3::trusted(unpack_rotation(x.segment(r.offset, 9))),
                    x.segment<3>(p.offset)};
}

CameraPose TrialSimulator::pose() const { return pose_from(state_.values); }

namespace {

ManhattanEstimate decode_mw(const Layout& layout, const Vector& x, const std::vector<Axis>& axes) {
  const Block& c = layout.block("mw.c");
  const Block& tau = layout.block("mw.tau");
  const Block& chi = layout.block("mw.chi");
  ManhattanEstimate est;
  est.axes = axes;
  est.c.value = x.segment<3>(c.offset);
  est.tau.resize(axes.size());
  est.chi.resize(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    est.tau[i] = x.segment<2>(tau.offset + 2 * static_cast<int>(i));
    est.chi[i] = x(chi.offset + static_cast<int>(i));
  }
  return est;
}

void encode_mw(const Layout& layout, const ManhattanEstimate& est, Vector& x) {
  const Block& c = layout.block("mw.c");
  const Block& tau = layout.block("mw.tau");
  const Block& chi = layout.block("mw.chi");
  x.segment<3>(c.offset) = est.c.value;
  for (std::size_t i = 0; i < est.size(); ++i) {
    x.segment<2>(tau.offset + 2 * static_cast<int>(i)) = est.tau[i];
    x(chi.offset + static_cast<int>(i)) = est.chi[i];
  }
}

PlaneVelState decode_plane(const Layout& layout, const Vector& x) {
  return PlaneVelState{x.segment<3>(layout.block("plane.s").offset),
                       x(layout.block("plane.psi").offset)};
}

void encode_plane(const Layout& layout, const PlaneVelState& p, Vector& x) {
  x.segment<3>(layout.block("plane.s").offset) = p.s;
  x(layout.block("plane.psi").offset) = p.psi;
}

std::vector<Axis> axes_of(const WorldScene& scene) {
  std::vector<Axis> out;
  out.reserve(scene.lines.size());
  for (const auto& l : scene.lines) out.push_back(l.axis);
  return out;
}

}  // namespace

ManhattanEstimate TrialSimulator::estimate() const {
  return decode_mw(state_.layout, state_.values, axes_of(scene_));
}

void TrialSimulator::set_estimate(const ManhattanEstimate& est) {
  if (est.size() != scene_.lines.size()) {
    throw Error(ErrorKind::InvalidArgument, "estimate does not match the scene line count");
  }
  encode_mw(state_.layout, est, state_.values);
}

PlaneVelState TrialSimulator::plane_estimate() const {
  if (cfg_.mode != Mode::Cascade) {
    throw Error(ErrorKind::InvalidArgument, "plane observer only runs in cascade mode");
  }
  return decode_plane(state_.layout, state_.values);
}

void TrialSimulator::set_plane_estimate(const PlaneVelState& p) {
  if (cfg_.mode != Mode::Cascade) {
    throw Error(ErrorKind::InvalidArgument, "plane observer only runs in cascade mode");
  }
  encode_plane(state_.layout, p, state_.values);
}

MeasurementFrame TrialSimulator::frame_at(double t, const CameraPose& pose) const {
  const ImuSample imu = synthesize_imu(profile_, t, pose, cfg_.imu);
  MeasurementFrame f = observe(scene_, pose, profile_.at(t), imu, t);
  if (noise_) f = apply_noise(f, *noise_);
  return f;
}

MeasurementFrame TrialSimulator::truth() const {
  const CameraPose p = pose();
  return observe(scene_, p, profile_.at(t_), synthesize_imu(profile_, t_, p, cfg_.imu), t_);
}

ManhattanEstimate TrialSimulator::true_state() const { return state_from_frame(truth()); }

PlaneVelState TrialSimulator::true_plane_state() const {
  const MeasurementFrame f = truth();
  return PlaneVelState{f.plane.scaled_velocity, f.plane.inv_depth};
}

Vector TrialSimulator::derivative(double t, const Vector& x) {
  const Layout& layout = state_.layout;
  const CameraPose pose = pose_from(x);
  const PoseRate rate = pose_rate(pose, profile_.at(t));
  const MeasurementFrame frame = frame_at(t, pose);

  Vector d = Vector::Zero(x.size());
  pack_rotation(rate.rotation, d.segment(layout.block("pose.rotation").offset, 9));
  d.segment<3>(layout.block("pose.position").offset) = rate.position;

  const ManhattanEstimate est = decode_mw(layout, x, axes_of(scene_));
  if (cfg_.mode == Mode::MwOnly) {
    encode_mw(layout, mw_observer_rhs(est, ManhattanMeasurement::from(frame), frame.twist, gains_.mw),
              d);
    return d;
  }

  const PlaneVelState plane = decode_plane(layout, x);
  std::optional<Vec3> forced;
  if (cfg_.force_true_velocity) forced = frame.twist.nu;
  try {
    const CascadeDerivative cd =
        cascade_rhs(plane, est, frame, cfg_.imu, gains_, cfg_.psi_floor, forced);
    encode_plane(layout, cd.plane, d);
    encode_mw(layout, cd.mw, d);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ScaleDegenerate) throw;
    // Velocity scale unidentifiable: hold the line estimate for this stage.
    ++scale_degenerate_events_;
    encode_plane(layout,
                 plane_observer_rhs(plane, frame.plane.scaled_velocity, frame.plane.normal,
                                    frame.imu.omega, frame.imu.accel, cfg_.imu, gains_.plane),
                 d);
  }
  return d;
}

void TrialSimulator::step() {
  if (cfg_.noise_deg > 0.0) {
    noise_ = sample_noise(cfg_.noise_deg, scene_.lines.size(), noise_rng_);
  }
  const StepConfig sc{cfg_.dt, cfg_.method};
  Vector next = mwl::step([this](double t, const Vector& x) { return derivative(t, x); },
                          state_.values, t_, sc);
  renormalize_in_place(state_.layout, next);
  state_.values = std::move(next);
  ++step_index_;
  t_ = static_cast<double>(step_index_) * cfg_.dt;
  noise_.reset();
}

ManhattanEstimate state_from_frame(const MeasurementFrame& f) {
  ManhattanEstimate s;
  s.c = f.cayley;
  s.tau.reserve(f.lines.size());
  s.chi.reserve(f.lines.size());
  s.axes.reserve(f.lines.size());
  for (const auto& l : f.lines) {
    s.tau.push_back(l.tau.tau);
    s.chi.push_back(l.inv_depth);
    s.axes.push_back(l.axis);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Metrics and run_trial

double direction_error(const Vec3& d_hat, const Vec3& d) {
  return std::acos(std::clamp(d_hat.dot(d), -1.0, 1.0));
}

double depth_error(double l_hat, double l) { return std::abs(l_hat - l); }

double median(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

// Fires once the error has stayed below threshold for the debounce window;
// the reported time is the start of that window.
class ConvergenceDetector {
 public:
  ConvergenceDetector(double initial_error, double fraction, double debounce)
      : threshold_(fraction * initial_error), debounce_(debounce) {
    if (initial_error == 0.0) {
      done_ = true;
      t_ = 0.0;
    }
  }

  void update(double t, double error, double distance) {
    if (done_) return;
    if (error < threshold_) {
      if (!below_) {
        below_ = true;
        start_ = t;
        start_distance_ = distance;
      }
      if (t - start_ >= debounce_ - 1e-9) {
        done_ = true;
        t_ = start_;
        distance_ = start_distance_;
      }
    } else {
      below_ = false;
    }
  }

  bool done() const { return done_; }
  double time() const { return t_; }
  double distance() const { return distance_; }

 private:
  double threshold_;
  double debounce_;
  bool below_ = false;
  double start_ = 0.0;
  double start_distance_ = 0.0;
  bool done_ = false;
  double t_ = std::numeric_limits<double>::quiet_NaN();
  double distance_ = 0.0;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineErrors {
  std::vector<double> eps_d;
  std::vector<double> eps_l;
};

LineErrors line_errors(const MeasurementFrame& truth, const ManhattanEstimate& est) {
  LineErrors out;
  const Rotation3 frame_hat = rotation_from_cayley(est.c);
  for (std::size_t i = 0; i < truth.lines.size(); ++i) {
    const auto& l = truth.lines[i];
    const double ed = direction_error(frame_hat.row(l.axis), l.direction);
    const double el = depth_error(1.0 / est.chi[i], l.depth);
    // A blown-up estimate counts as an infinite error, not a missing one.
    out.eps_d.push_back(std::isfinite(ed) ? ed : kInf);
    out.eps_l.push_back(std::isfinite(el) ? el : kInf);
  }
  return out;
}

double plane_error(const MeasurementFrame& truth, const PlaneVelState& est) {
  const Vec3 ds = truth.plane.scaled_velocity - est.s;
  const double dpsi = truth.plane.inv_depth - est.psi;
  return std::sqrt(ds.squaredNorm() + dpsi * dpsi);
}

}  // namespace

TrialRecord run_trial(const TrialConfig& cfg) {
  cfg.validate();
  TrialRecord rec;
  rec.seed = cfg.seed;
  rec.mode = cfg.mode;

  TrialSimulator sim(cfg);
  const ManhattanGains gains = sim.mw_gains();
  const bool cascade = cfg.mode == Mode::Cascade;
  const bool check_lyapunov = !cascade && cfg.noise_deg == 0.0;

  MeasurementFrame truth = sim.truth();
  ManhattanEstimate est = sim.estimate();
  ManhattanErrors err = mw_errors(state_from_frame(truth), est);
  rec.initial_error = err.norm();
  rec.chi_initial = est.chi;
  ConvergenceDetector mw_detector(rec.initial_error, cfg.convergence_fraction, cfg.debounce);

  std::optional<ConvergenceDetector> plane_detector;
  if (cascade) {
    rec.plane_initial_error = plane_error(truth, sim.plane_estimate());
    plane_detector.emplace(rec.plane_initial_error, cfg.convergence_fraction, cfg.debounce);
  }

  auto sample = [&](double t, double state_error) {
    SeriesSample s;
    s.t = t;
    s.state_error = state_error;
    s.cayley_error = err.c.norm();
    s.lyapunov = lyapunov_V(err, gains);
    if (cascade) s.plane_error = plane_error(truth, sim.plane_estimate());
    LineErrors le = line_errors(truth, est);
    s.eps_d = std::move(le.eps_d);
    s.eps_l = std::move(le.eps_l);
    s.chi_hat = est.chi;
    rec.series.push_back(std::move(s));
  };
  if (cfg.record_series) sample(0.0, rec.initial_error);

  StabilityConditions cond_prev = check_conditions(est, ManhattanMeasurement::from(truth), truth.twist.nu);
  double v_prev = lyapunov_V(err, gains);
  bool in_chart_prev = rotation_angle(truth.frame.matrix()) <= M_PI - kChartMargin;

  const long n_steps = std::lround(cfg.duration / cfg.dt);
  double distance = 0.0;
  bool stopped = false;
  for (long k = 1; k <= n_steps; ++k) {
    const double t0 = sim.time();
    try {
      sim.step();
      truth = sim.truth();
    } catch (const Error& e) {
      rec.cause = std::string(to_string(e.kind()));
      rec.t_diverged = t0;
      rec.t_end = t0;
      stopped = true;
      break;
    }
    const double t = sim.time();
    const VelocityProfile& prof = sim.profile();
    distance += (t - t0) / 6.0 *
                (prof.linear.value(t0).norm() + 4.0 * prof.linear.value(0.5 * (t0 + t)).norm() +
                 prof.linear.value(t).norm());

    est = sim.estimate();
    err = mw_errors(state_from_frame(truth), est);
    const double e = err.norm();
    rec.t_end = t;

    const StabilityConditions cond = check_conditions(est, ManhattanMeasurement::from(truth), truth.twist.nu);
    ++rec.condition_checks;
    rec.sign_condition_violations += cond.sign_violations;
    rec.excitation_violations += cond.excitation_violations;
    const double v = lyapunov_V(err, gains);
    const bool in_chart = rotation_angle(truth.frame.matrix()) <= M_PI - kChartMargin;
    if (check_lyapunov) {
      if (!in_chart || !in_chart_prev) {
        ++rec.lyapunov.chart_excluded_steps;
      } else if (cond_prev.hold() && cond.hold()) {
        ++rec.lyapunov.included_steps;
        rec.lyapunov.max_increase = std::max(rec.lyapunov.max_increase, v - v_prev);
      } else {
        ++rec.lyapunov.excluded_steps;
      }
    }
    cond_prev = cond;
    in_chart_prev = in_chart;
    v_prev = v;

    if (!std::isfinite(e) || (rec.initial_error > 0.0 && e > cfg.divergence_factor * rec.initial_error)) {
      rec.cause = std::isfinite(e) ? "ErrorGrowth" : "NonFiniteState";
      rec.t_diverged = t;
      stopped = true;
      break;
    }
    mw_detector.update(t, e, distance);
    if (plane_detector) plane_detector->update(t, plane_error(truth, sim.plane_estimate()), distance);
    if (cfg.record_series && k % cfg.decimation == 0) sample(t, e);
  }

  rec.total_distance = distance;
  rec.scale_degenerate_events = sim.scale_degenerate_events();
  if (plane_detector && plane_detector->done()) rec.plane_t_converged = plane_detector->time();

  if (mw_detector.done()) {
    // Convergence is final even if the trial later stops early.
    rec.verdict = Verdict::Converged;
    rec.t_converged = mw_detector.time();
    rec.distance = mw_detector.distance();
    rec.t_diverged = std::numeric_limits<double>::quiet_NaN();
  } else if (stopped) {
    rec.verdict = Verdict::Diverged;
    rec.distance = distance;
  } else {
    rec.verdict = Verdict::Timeout;
    rec.distance = distance;
  }

  rec.final_error = err.norm();
  const LineErrors le = line_errors(truth, est);
  rec.final_eps_d = le.eps_d;
  rec.final_eps_l = le.eps_l;
  return rec;
}

// ---------------------------------------------------------------------------
// Monte Carlo

std::uint64_t trial_seed(std::uint64_t master, std::size_t index) {
  // Trial 0 reuses the master seed so a one-trial run matches `single`.
  return index == 0 ? master : derive_seed(master, 0x7269616cULL + index);
}

AggregateReport aggregate(std::vector<TrialRecord> trials) {
  AggregateReport r;
  r.n_trials = trials.size();
  std::vector<double> tc, dist, eps_d, eps_l;
  for (const auto& t : trials) {
    if (t.verdict == Verdict::Diverged) ++r.n_diverged;
    eps_d.insert(eps_d.end(), t.final_eps_d.begin(), t.final_eps_d.end());
    eps_l.insert(eps_l.end(), t.final_eps_l.begin(), t.final_eps_l.end());
    if (t.success()) {
      ++r.n_success;
      tc.push_back(t.t_converged);
      dist.push_back(t.distance);
    }
  }
  if (r.n_trials > 0) r.success_rate = 100.0 * static_cast<double>(r.n_success) / static_cast<double>(r.n_trials);
  r.median_t_converged = median(std::move(tc));
  r.median_distance = median(std::move(dist));
  r.median_eps_d = median(std::move(eps_d));
  r.median_eps_l = median(std::move(eps_l));
  r.trials = std::move(trials);
  return r;
}

namespace {

TrialRecord run_guarded(const TrialConfig& cfg) {
  try {
    return run_trial(cfg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::ConfigError) throw;
    TrialRecord rec;
    rec.seed = cfg.seed;
    rec.mode = cfg.mode;
    rec.verdict = Verdict::Diverged;
    rec.cause = std::string(to_string(e.kind()));
    rec.t_diverged = 0.0;
    return rec;
  }
}

std::vector<TrialRecord> run_batch(const std::vector<TrialConfig>& cfgs, std::size_t workers) {
  std::vector<TrialRecord> out(cfgs.size());
  workers = std::max<std::size_t>(1, std::min(workers, cfgs.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfgs.size()) return;
      try {
        out[i] = run_guarded(cfgs[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cfgs.size();
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<TrialConfig> trial_configs(const TrialConfig& base, std::size_t n) {
  std::vector<TrialConfig> cfgs(n, base);
  for (std::size_t i = 0; i < n; ++i) cfgs[i].seed = trial_seed(base.seed, i);
  return cfgs;
}

}  // namespace

AggregateReport run_monte_carlo(const TrialConfig& base, std::size_t n_trials, std::size_t workers) {
  base.validate();
  if (n_trials == 0) throw Error(ErrorKind::InvalidArgument, "'trials' must be >= 1");
  return aggregate(run_batch(trial_configs(base, n_trials), workers));
}

std::vector<SweepLevel> run_noise_sweep(const TrialConfig& base, const std::vector<double>& sigmas,
                                        std::size_t n_trials, std::size_t workers) {
  base.validate();
  if (n_trials == 0) throw Error(ErrorKind::InvalidArgument, "'trials' must be >= 1");
  if (sigmas.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one noise level");
  std::vector<SweepLevel> levels;
  for (double sigma : sigmas) {
    if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise levels must be >= 0");
    TrialConfig cfg = base;
    cfg.noise_deg = sigma;
    levels.push_back(SweepLevel{sigma, aggregate(run_batch(trial_configs(cfg, n_trials), workers))});
  }
  return levels;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials) {
  std::size_t n_lines = 0;
  for (const auto& t : trials) n_lines = std::max(n_lines, t.final_eps_d.size());
  os << "trial,seed,mode,verdict,cause,t_converged,t_diverged,t_end,distance,total_distance,"
        "initial_error,final_error,plane_t_converged,scale_degenerate_events,"
        "sign_condition_violations,excitation_violations";
  for (std::size_t i = 0; i < n_lines; ++i) os << ",eps_d_" << i + 1;
  for (std::size_t i = 0; i < n_lines; ++i) os << ",eps_l_" << i + 1;
  os << '\n';
  for (std::size_t k = 0; k < trials.size(); ++k) {
    const TrialRecord& t = trials[k];
    os << k << ',' << t.seed << ',' << to_string(t.mode) << ',' << to_string(t.verdict) << ','
       << t.cause << ',' << format_number(t.t_converged) << ',' << format_number(t.t_diverged) << ','
       << format_number(t.t_end) << ',' << format_number(t.distance) << ','
       << format_number(t.total_distance) << ',' << format_number(t.initial_error) << ','
       << format_number(t.final_error) << ',' << format_number(t.plane_t_converged) << ','
       << t.scale_degenerate_events << ',' << t.sign_condition_violations << ','
       << t.excitation_violations;
    for (std::size_t i = 0; i < n_lines; ++i)
      os << ',' << format_number(i < t.final_eps_d.size() ? t.final_eps_d[i] : NAN);
    for (std::size_t i = 0; i < n_lines; ++i)
      os << ',' << format_number(i < t.final_eps_l.size() ? t.final_eps_l[i] : NAN);
    os << '\n';
  }
}

void write_series_csv(std::ostream& os, const TrialRecord& record) {
  const std::size_t n = record.series.empty() ? 0 : record.series.front().eps_d.size();
  os << "t,state_error,cayley_error,lyapunov,plane_error";
  for (std::size_t i = 0; i < n; ++i) os << ",eps_d_" << i + 1;
  for (std::size_t i = 0; i < n; ++i) os << ",eps_l_" << i + 1;
  for (std::size_t i = 0; i < n; ++i) os << ",chi_hat_" << i + 1;
  os << '\n';
  for (const auto& s : record.series) {
    os << format_number(s.t) << ',' << format_number(s.state_error) << ','
       << format_number(s.cayley_error) << ',' << format_number(s.lyapunov) << ','
       << format_number(s.plane_error);
    for (double v : s.eps_d) os << ',' << format_number(v);
    for (double v : s.eps_l) os << ',' << format_number(v);
    for (double v : s.chi_hat) os << ',' << format_number(v);
    os << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepLevel>& levels) {
  os << "sigma_deg,n_trials,n_diverged,success_rate,median_eps_d_final,median_eps_l_final\n";
  for (const auto& l : levels) {
    os << format_number(l.sigma_deg) << ',' << l.report.n_trials << ',' << l.report.n_diverged
       << ',' << format_number(l.report.success_rate) << ',' << format_number(l.report.median_eps_d)
       << ',' << format_number(l.report.median_eps_l) << '\n';
  }
}

}  // namespace mwl
