#include "mwl/cli.hpp"
#include "mwl/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Flags {
  std::string preset;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> workers;
  std::string out = "mwl-out";
  std::vector<double> noise;
  bool emit_series = false;
  bool emit_svg = false;
};

void add_flags(CLI::App* cmd, Flags& f, bool sweep) {
  cmd->add_option("--preset", f.preset, "Built-in preset")
      ->check(CLI::IsMember(mwl::preset_names()));
  cmd->add_option("--config", f.config, "INI config file (a manifest.ini works too)");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--trials", f.trials, "Number of trials (per noise level for sweep)");
  cmd->add_option("--workers", f.workers, "Worker threads");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  if (sweep) {
    cmd->add_option("--noise-deg", f.noise, "Noise levels in degrees")->expected(0, -1);
  } else {
    cmd->add_option("--noise-deg", f.noise, "Measurement noise in degrees")->expected(1);
  }
  cmd->add_flag("--emit-series", f.emit_series, "Write per-sample series CSV files");
  cmd->add_flag("--emit-svg", f.emit_svg, "Write SVG plots next to the CSV files");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Manhattan-world line depth observers: single trials, Monte Carlo and noise sweeps"};
  app.set_version_flag("--version", std::string(mwl::kToolVersion));
  app.require_subcommand(1);

  Flags flags;
  CLI::App* single = app.add_subcommand("single", "Run one trial");
  CLI::App* mc = app.add_subcommand("mc", "Run a Monte-Carlo batch");
  CLI::App* sweep = app.add_subcommand("sweep", "Run a noise sweep");
  add_flags(single, flags, false);
  add_flags(mc, flags, false);
  add_flags(sweep, flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return mwl::kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  mwl::RunConfig cfg;
  cfg.command = cmd->get_name();
  try {
    std::string preset = flags.preset;
    if (preset.empty() && !flags.config.empty()) {
      preset = mwl::preset_in_config(flags.config).value_or("");
    }
    if (!preset.empty()) mwl::apply_preset(cfg, preset);
    if (!flags.config.empty()) mwl::apply_config_file(cfg, flags.config);
    if (!flags.preset.empty()) cfg.preset = flags.preset;

    if (flags.seed) cfg.trial.seed = *flags.seed;
    if (flags.trials) cfg.trials = *flags.trials;
    if (flags.workers) cfg.workers = *flags.workers;
    if (cmd->count("--noise-deg")) {
      if (cfg.command == "sweep") {
        // A bare --noise-deg arrives as one empty result.
        const auto& raw = cmd->get_option("--noise-deg")->results();
        const bool bare = raw.size() == 1 && raw.front().empty();
        cfg.sigmas = bare ? std::vector<double>{} : flags.noise;
      } else {
        cfg.trial.noise_deg = flags.noise.front();
      }
    }
    if (flags.emit_series) cfg.emit_series = true;
    if (flags.emit_svg) cfg.emit_svg = true;
  } catch (const mwl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mwl::kExitUsage;
  }

  mwl::RunOptions opts;
  opts.out_dir = flags.out;
  opts.config_path = flags.config;
  return mwl::run_command(cfg, opts, std::cout, std::cerr);
}
