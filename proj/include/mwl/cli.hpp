#pragma once

#include "mwl/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mwl {

enum ExitCode : int { kExitOk = 0, kExitDiverged = 1, kExitUsage = 2 };

struct RunOptions {
  std::filesystem::path out_dir = "mwl-out";
  std::string config_path;  // recorded in the manifest only
};

/// Runs cfg.command. Writes manifest.ini into the output directory before
/// anything else, then the CSV outputs. Diagnostics go to `err`, the result
/// row to `out`. Returns an ExitCode; configuration problems give kExitUsage.
int run_command(const RunConfig& cfg, const RunOptions& opts, std::ostream& out,
                std::ostream& err);

// Table-style result line for a Monte-Carlo report.
std::string report_row(const AggregateReport& r);

/// Minimal line plot.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
void write_svg_plot(std::ostream& os, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<SvgSeries>& series,
                    bool log_y = false);

}  // namespace mwl
