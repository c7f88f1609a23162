#pragma once

#include "mwl/trials.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mwl {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything a run needs. Resolved from defaults, then a preset, then a
/// config file, then command-line flags.
struct RunConfig {
  std::string command = "single";  // single | mc | sweep
  std::string preset;               // informational once resolved
  TrialConfig trial;
  std::size_t trials = 200;
  std::size_t workers = 1;
  std::vector<double> sigmas{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  bool emit_series = false;
  bool emit_svg = false;
};

std::vector<std::string> preset_names();
// Throws ConfigError for an unknown name.
RunConfig preset(const std::string& name);
void apply_preset(RunConfig& cfg, const std::string& name);

/// Flat INI with sections. Unknown sections or keys and malformed values throw
/// ConfigError naming "section.key". A [manifest] section is accepted and
/// ignored so manifests can be fed back as configs.
void apply_config(RunConfig& cfg, std::istream& is);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

// Preset named in a config file's [run] section, if any.
std::optional<std::string> preset_in_config(const std::filesystem::path& path);

/// Full resolved parameter set; reading it back with apply_config gives the
/// same RunConfig bit for bit.
void write_config(std::ostream& os, const RunConfig& cfg);

struct ManifestInfo {
  std::string config_path;
  std::string output_dir;
};

// write_config plus a [manifest] section with tool version and paths.
void write_manifest(std::ostream& os, const RunConfig& cfg, const ManifestInfo& info);

}  // namespace mwl
