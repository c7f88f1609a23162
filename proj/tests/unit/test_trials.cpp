#include "mwl/errors.hpp"
#include "mwl/trials.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace mwl;

namespace {

TrialConfig short_config(std::uint64_t seed = 3) {
  TrialConfig c;
  c.seed = seed;
  c.duration = 2.0;
  return c;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("direction and depth errors") {
  CHECK(direction_error(Vec3(0, 0, 1), Vec3(0, 0, 1)) == 0.0);
  CHECK(direction_error(Vec3(1, 0, 0), Vec3(0, 1, 0)) == doctest::Approx(M_PI / 2));
  const Vec3 over(1.0 + 1e-12, 0, 0);
  CHECK(direction_error(over, Vec3(1, 0, 0)) == 0.0);
  CHECK(depth_error(5, 5) == 0.0);
  CHECK(depth_error(4, 5) == 1.0);
  CHECK(depth_error(0.1, 5) == doctest::Approx(4.9));
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("config validation names the field") {
  TrialConfig c;
  CHECK_NOTHROW(c.validate());
  c.duration = 0.0;
  try {
    c.validate();
    FAIL("duration = 0 accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
    CHECK(std::string(e.what()).find("duration") != std::string::npos);
  }
  c = TrialConfig{};
  c.convergence_fraction = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("trial seeds") {
  CHECK(trial_seed(7, 0) == 7);
  CHECK(trial_seed(7, 1) != trial_seed(7, 2));
  CHECK(trial_seed(7, 1) == trial_seed(7, 1));
  CHECK(trial_seed(7, 1) != trial_seed(8, 1));
}

TEST_CASE("trials are reproducible") {
  TrialConfig c = short_config();
  c.record_series = true;
  const TrialRecord a = run_trial(c);
  const TrialRecord b = run_trial(c);
  std::ostringstream sa, sb;
  write_series_csv(sa, a);
  write_series_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(a.final_error == b.final_error);
  CHECK(a.chi_initial == b.chi_initial);

  c.seed = 4;
  CHECK(run_trial(c).final_error != a.final_error);
}

TEST_CASE("zero initial error converges at t = 0") {
  TrialSimulator sim(short_config());
  sim.set_estimate(sim.true_state());
  CHECK(mw_errors(sim.true_state(), sim.estimate()).norm() == 0.0);

  TrialConfig c = short_config();
  c.start_at_truth = true;
  const TrialRecord r = run_trial(c);
  CHECK(r.initial_error == 0.0);
  CHECK(r.verdict == Verdict::Converged);
  CHECK(r.t_converged == 0.0);
  CHECK(r.distance == 0.0);
}

TEST_CASE("distance and timing fields are consistent") {
  TrialConfig c = short_config(11);
  c.duration = 6.0;
  const TrialRecord r = run_trial(c);
  const VelocityProfile p = make_profile(c.profile, c.seed);
  CHECK(r.total_distance == doctest::Approx(p.distance(0.0, r.t_end)).epsilon(1e-9));
  CHECK(r.t_end <= c.duration + 1e-9);
  if (r.success()) {
    CHECK(r.distance == doctest::Approx(p.distance(0.0, r.t_converged)).epsilon(1e-9));
    CHECK(r.t_converged <= r.t_end);
  }
  CHECK(r.final_eps_d.size() == 6);
  CHECK(r.final_eps_l.size() == 6);
}

TEST_CASE("series decimation") {
  TrialConfig c = short_config();
  c.duration = 1.0;
  c.record_series = true;
  c.decimation = 100;
  const TrialRecord r = run_trial(c);
  REQUIRE(r.series.size() >= 10);
  CHECK(r.series.front().t == 0.0);
  CHECK(r.series[1].t == doctest::Approx(0.1));
  CHECK(r.series.front().eps_d.size() == 6);
}

TEST_CASE("monte carlo does not depend on the worker count") {
  TrialConfig c = short_config(5);
  const AggregateReport one = run_monte_carlo(c, 6, 1);
  const AggregateReport three = run_monte_carlo(c, 6, 3);
  std::ostringstream a, b;
  write_trials_csv(a, one.trials);
  write_trials_csv(b, three.trials);
  CHECK(a.str() == b.str());
  CHECK(one.n_trials == 6);
  CHECK(one.trials[0].seed == 5);

  TrialConfig single = c;
  const TrialRecord r = run_trial(single);
  CHECK(r.final_error == one.trials[0].final_error);
}

TEST_CASE("aggregate statistics") {
  std::vector<TrialRecord> recs(4);
  recs[0].verdict = Verdict::Converged;
  recs[0].t_converged = 2.0;
  recs[0].distance = 1.0;
  recs[1].verdict = Verdict::Converged;
  recs[1].t_converged = 4.0;
  recs[1].distance = 3.0;
  recs[2].verdict = Verdict::Diverged;
  recs[3].verdict = Verdict::Timeout;
  for (auto& r : recs) {
    r.final_eps_d = {0.1};
    r.final_eps_l = {0.2};
  }
  const AggregateReport a = aggregate(recs);
  CHECK(a.n_trials == 4);
  CHECK(a.n_success == 2);
  CHECK(a.n_diverged == 1);
  CHECK(a.success_rate == doctest::Approx(50.0));
  CHECK(a.median_t_converged == doctest::Approx(3.0));
  CHECK(a.median_distance == doctest::Approx(2.0));
  CHECK(a.median_eps_d == doctest::Approx(0.1));
}

TEST_CASE("csv headers") {
  std::vector<TrialRecord> recs(1);
  recs[0].final_eps_d = {0.0, 0.0};
  recs[0].final_eps_l = {0.0, 0.0};
  std::ostringstream os;
  write_trials_csv(os, recs);
  CHECK(first_line(os.str()) ==
        "trial,seed,mode,verdict,cause,t_converged,t_diverged,t_end,distance,total_distance,"
        "initial_error,final_error,plane_t_converged,scale_degenerate_events,"
        "sign_condition_violations,excitation_violations,eps_d_1,eps_d_2,eps_l_1,eps_l_2");

  std::vector<SweepLevel> levels(1);
  std::ostringstream sw;
  write_sweep_csv(sw, levels);
  CHECK(first_line(sw.str()) ==
        "sigma_deg,n_trials,n_diverged,success_rate,median_eps_d_final,median_eps_l_final");

  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("noise sweep reuses the trial seeds") {
  TrialConfig c = short_config(9);
  c.duration = 1.0;
  const auto levels = run_noise_sweep(c, {0.0, 2.0}, 3, 2);
  REQUIRE(levels.size() == 2);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(levels[0].report.trials[i].seed == levels[1].report.trials[i].seed);
    CHECK(levels[0].report.trials[i].chi_initial == levels[1].report.trials[i].chi_initial);
  }
}

TEST_CASE("cascade trials record the plane block") {
  TrialConfig c = short_config(2);
  c.mode = Mode::Cascade;
  c.k_chi = 200;
  c.duration = 3.0;
  const TrialRecord r = run_trial(c);
  CHECK(r.mode == Mode::Cascade);
  CHECK(std::isfinite(r.plane_initial_error));
  CHECK(r.plane_initial_error > 0.0);
}
