#include "mwl/cli.hpp"

#include "mwl/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace mwl {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot write '" + path.string() + "'");
  return f;
}

std::string fixed(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void write_summary(std::ostream& os, const AggregateReport& r) {
  os << "n_trials = " << r.n_trials << '\n';
  os << "n_success = " << r.n_success << '\n';
  os << "n_diverged = " << r.n_diverged << '\n';
  os << "success_rate_percent = " << format_number(r.success_rate) << '\n';
  os << "median_t_converged = " << format_number(r.median_t_converged) << '\n';
  os << "median_distance = " << format_number(r.median_distance) << '\n';
  os << "median_eps_d_final = " << format_number(r.median_eps_d) << '\n';
  os << "median_eps_l_final = " << format_number(r.median_eps_l) << '\n';
}

int cmd_single(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  TrialConfig t = cfg.trial;
  t.record_series = true;
  {
    auto f = open_out(dir / "scene.txt");
    write_scene(f, random_scene(t.seed, t.lines_per_axis, t.cube_side));
  }
  const TrialRecord rec = run_trial(t);
  {
    auto f = open_out(dir / "series.csv");
    write_series_csv(f, rec);
  }
  {
    auto f = open_out(dir / "trials.csv");
    write_trials_csv(f, {rec});
  }
  {
    auto f = open_out(dir / "summary.txt");
    f << "verdict = " << to_string(rec.verdict) << '\n';
    f << "cause = " << rec.cause << '\n';
    f << "t_converged = " << format_number(rec.t_converged) << '\n';
    f << "t_diverged = " << format_number(rec.t_diverged) << '\n';
    f << "distance = " << format_number(rec.distance) << '\n';
    f << "plane_t_converged = " << format_number(rec.plane_t_converged) << '\n';
    f << "initial_error = " << format_number(rec.initial_error) << '\n';
    f << "final_error = " << format_number(rec.final_error) << '\n';
  }
  if (cfg.emit_svg) {
    SvgSeries mw{"line observer", {}, {}};
    SvgSeries plane{"plane observer", {}, {}};
    for (const auto& s : rec.series) {
      mw.x.push_back(s.t);
      mw.y.push_back(s.state_error);
      plane.x.push_back(s.t);
      plane.y.push_back(s.plane_error);
    }
    std::vector<SvgSeries> lines{mw};
    if (t.mode == Mode::Cascade) lines.push_back(plane);
    auto f = open_out(dir / "series.svg");
    write_svg_plot(f, "Estimation error", "t [s]", "error norm", lines, true);
  }

  out << "verdict " << to_string(rec.verdict);
  if (rec.success()) out << " t_c " << fixed("%.3f", rec.t_converged) << " s";
  if (rec.verdict == Verdict::Diverged) out << " at " << fixed("%.3f", rec.t_diverged) << " s (" << rec.cause << ")";
  if (t.mode == Mode::Cascade) out << " plane t_c " << fixed("%.3f", rec.plane_t_converged) << " s";
  out << " distance " << fixed("%.3f", rec.distance) << '\n';
  return rec.verdict == Verdict::Diverged ? kExitDiverged : kExitOk;
}

int cmd_mc(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  TrialConfig t = cfg.trial;
  t.record_series = cfg.emit_series;
  const AggregateReport r = run_monte_carlo(t, cfg.trials, cfg.workers);
  {
    auto f = open_out(dir / "trials.csv");
    write_trials_csv(f, r.trials);
  }
  {
    auto f = open_out(dir / "summary.txt");
    write_summary(f, r);
  }
  if (cfg.emit_series) {
    fs::create_directories(dir / "series");
    for (std::size_t i = 0; i < r.trials.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "trial_%04zu.csv", i);
      auto f = open_out(dir / "series" / name);
      write_series_csv(f, r.trials[i]);
    }
  }
  if (cfg.emit_svg) {
    std::vector<double> tc;
    for (const auto& rec : r.trials) {
      if (rec.success()) tc.push_back(rec.t_converged);
    }
    std::sort(tc.begin(), tc.end());
    SvgSeries s{"converged trials", {}, {}};
    for (std::size_t i = 0; i < tc.size(); ++i) {
      s.x.push_back(tc[i]);
      s.y.push_back(100.0 * static_cast<double>(i + 1) / static_cast<double>(r.n_trials));
    }
    auto f = open_out(dir / "convergence.svg");
    write_svg_plot(f, "Convergence time", "t_c [s]", "trials converged [%]", {s});
  }
  out << report_row(r) << '\n';
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const auto levels = run_noise_sweep(cfg.trial, cfg.sigmas, cfg.trials, cfg.workers);
  {
    auto f = open_out(dir / "sweep.csv");
    write_sweep_csv(f, levels);
  }
  if (cfg.emit_svg) {
    SvgSeries d{"median direction error", {}, {}};
    SvgSeries l{"median depth error", {}, {}};
    for (const auto& lv : levels) {
      d.x.push_back(lv.sigma_deg);
      d.y.push_back(lv.report.median_eps_d);
      l.x.push_back(lv.sigma_deg);
      l.y.push_back(lv.report.median_eps_l);
    }
    auto fd = open_out(dir / "sweep_eps_d.svg");
    write_svg_plot(fd, "Direction error at trial end", "noise [deg]", "median eps_d [rad]", {d});
    auto fl = open_out(dir / "sweep_eps_l.svg");
    write_svg_plot(fl, "Depth error at trial end", "noise [deg]", "median eps_l", {l});
  }
  out << "sigma_deg  diverged  median_eps_d  median_eps_l\n";
  for (const auto& lv : levels) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%9.3g  %8zu  %12.4g  %12.4g\n", lv.sigma_deg, lv.report.n_diverged,
                  lv.report.median_eps_d, lv.report.median_eps_l);
    out << buf;
  }
  return kExitOk;
}

}  // namespace

std::string report_row(const AggregateReport& r) {
  return "trials " + std::to_string(r.n_trials) + " | success " + fixed("%.1f", r.success_rate) +
         " % | median t_c " + fixed("%.2f", r.median_t_converged) + " s | median distance " +
         fixed("%.2f", r.median_distance);
}

int run_command(const RunConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command != "single" && cfg.command != "mc" && cfg.command != "sweep") {
      throw Error(ErrorKind::ConfigError, "unknown command '" + cfg.command + "'");
    }
    cfg.trial.validate();
    if (cfg.trials == 0) throw Error(ErrorKind::ConfigError, "'run.trials' must be >= 1");
    if (cfg.workers == 0) throw Error(ErrorKind::ConfigError, "'run.workers' must be >= 1");
    if (cfg.command == "sweep" && cfg.sigmas.empty()) {
      throw Error(ErrorKind::ConfigError, "'sweep.sigmas' is empty");
    }

    fs::create_directories(opts.out_dir);
    {
      auto f = open_out(opts.out_dir / "manifest.ini");
      write_manifest(f, cfg, ManifestInfo{opts.config_path, opts.out_dir.string()});
    }
    if (cfg.command == "single") return cmd_single(cfg, opts.out_dir, out);
    if (cfg.command == "mc") return cmd_mc(cfg, opts.out_dir, out);
    return cmd_sweep(cfg, opts.out_dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::InvalidArgument) return kExitUsage;
    return cfg.command == "single" ? kExitDiverged : kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace mwl
