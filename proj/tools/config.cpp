#include "mwl/config.hpp"

#include "mwl/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace mwl {

namespace pt = boost::property_tree;

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::ConfigError, "invalid value for '" + key + "': " + what);
}

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) bad_value(key, "'" + tok + "' is not a number");
      out.push_back(v);
    } catch (const std::logic_error&) {
      bad_value(key, "'" + tok + "' is not a number");
    }
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  const auto v = parse_list(key, value);
  if (v.size() != 1) bad_value(key, "expected one number");
  return v[0];
}

Vec3 parse_vec3(const std::string& key, const std::string& value) {
  const auto v = parse_list(key, value);
  if (v.size() != 3) bad_value(key, "expected three numbers");
  return Vec3(v[0], v[1], v[2]);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    bad_value(key, "expected a non-negative integer");
  }
  try {
    return std::stoull(value);
  } catch (const std::out_of_range&) {
    bad_value(key, "out of range");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, "expected true or false");
}

std::string vec3(const Vec3& v) { return num(v.x()) + ' ' + num(v.y()) + ' ' + num(v.z()); }

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + num(v[i]);
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(RunConfig&, const std::string& name, const std::string& value)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define MWL_DOUBLE(sec, name, member)                                                       \
  Field {                                                                                   \
    sec, name,                                                                              \
        [](RunConfig& c, const std::string& k, const std::string& v) {                      \
          c.member = parse_double(k, v);                                                    \
        },                                                                                  \
        [](const RunConfig& c) { return num(c.member); }                                    \
  }

#define MWL_VEC3(sec, name, member)                                                         \
  Field {                                                                                   \
    sec, name,                                                                              \
        [](RunConfig& c, const std::string& k, const std::string& v) {                      \
          c.member = parse_vec3(k, v);                                                      \
        },                                                                                  \
        [](const RunConfig& c) { return vec3(c.member); }                                   \
  }

#define MWL_BOOL(sec, name, member)                                                         \
  Field {                                                                                   \
    sec, name,                                                                              \
        [](RunConfig& c, const std::string& k, const std::string& v) {                      \
          c.member = parse_bool(k, v);                                                      \
        },                                                                                  \
        [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }         \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"run", "preset",
            [](RunConfig& c, const std::string&, const std::string& v) { c.preset = v; },
            [](const RunConfig& c) { return c.preset; }},
      Field{"run", "seed",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.trial.seed = parse_u64(k, v);
            },
            [](const RunConfig& c) { return std::to_string(c.trial.seed); }},
      Field{"run", "trials",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.trials = parse_u64(k, v);
              if (c.trials == 0) bad_value(k, "must be >= 1");
            },
            [](const RunConfig& c) { return std::to_string(c.trials); }},
      Field{"run", "workers",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.workers = parse_u64(k, v);
              if (c.workers == 0) bad_value(k, "must be >= 1");
            },
            [](const RunConfig& c) { return std::to_string(c.workers); }},
      MWL_BOOL("run", "emit_series", emit_series),
      MWL_BOOL("run", "emit_svg", emit_svg),

      Field{"scene", "lines_per_axis",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              const auto n = parse_list(k, v);
              if (n.size() != 3) bad_value(k, "expected three counts");
              for (int j = 0; j < 3; ++j) {
                if (n[j] < 0 || n[j] != static_cast<int>(n[j])) bad_value(k, "counts must be integers >= 0");
                c.trial.lines_per_axis[j] = static_cast<int>(n[j]);
              }
            },
            [](const RunConfig& c) {
              const auto& n = c.trial.lines_per_axis;
              return std::to_string(n[0]) + ' ' + std::to_string(n[1]) + ' ' + std::to_string(n[2]);
            }},
      MWL_DOUBLE("scene", "cube_side", trial.cube_side),

      MWL_DOUBLE("gains", "k_c", trial.k_c),
      MWL_DOUBLE("gains", "k_tau", trial.k_tau),
      MWL_DOUBLE("gains", "k_chi", trial.k_chi),
      MWL_DOUBLE("gains", "k_s", trial.k_s),
      MWL_DOUBLE("gains", "k_rho", trial.k_rho),

      Field{"sim", "mode",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "mw_only") c.trial.mode = Mode::MwOnly;
              else if (v == "cascade") c.trial.mode = Mode::Cascade;
              else bad_value(k, "expected mw_only or cascade");
            },
            [](const RunConfig& c) { return std::string(to_string(c.trial.mode)); }},
      MWL_DOUBLE("sim", "dt", trial.dt),
      MWL_DOUBLE("sim", "duration", trial.duration),
      Field{"sim", "method",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "rk4") c.trial.method = Method::RK4;
              else if (v == "euler") c.trial.method = Method::Euler;
              else bad_value(k, "expected rk4 or euler");
            },
            [](const RunConfig& c) {
              return std::string(c.trial.method == Method::RK4 ? "rk4" : "euler");
            }},
      MWL_DOUBLE("sim", "noise_deg", trial.noise_deg),
      Field{"sim", "decimation",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              const auto d = parse_u64(k, v);
              if (d == 0 || d > 1000000) bad_value(k, "must be in [1, 1000000]");
              c.trial.decimation = static_cast<int>(d);
            },
            [](const RunConfig& c) { return std::to_string(c.trial.decimation); }},
      MWL_BOOL("sim", "force_true_velocity", trial.force_true_velocity),

      MWL_DOUBLE("criteria", "convergence_fraction", trial.convergence_fraction),
      MWL_DOUBLE("criteria", "divergence_factor", trial.divergence_factor),
      MWL_DOUBLE("criteria", "debounce", trial.debounce),

      MWL_DOUBLE("init", "chi_min", trial.chi_init_min),
      MWL_DOUBLE("init", "chi_max", trial.chi_init_max),
      MWL_DOUBLE("init", "psi_min", trial.psi_init_min),
      MWL_DOUBLE("init", "psi_max", trial.psi_init_max),
      MWL_DOUBLE("init", "psi_floor", trial.psi_floor),
      MWL_BOOL("init", "start_at_truth", trial.start_at_truth),

      MWL_BOOL("profile", "random_phases", trial.profile.random_phases),
      MWL_VEC3("profile", "linear_offset", trial.profile.linear_offset),
      MWL_VEC3("profile", "linear_amplitude", trial.profile.linear_amplitude),
      MWL_VEC3("profile", "linear_frequency", trial.profile.linear_frequency),
      MWL_VEC3("profile", "linear_phase", trial.profile.linear_phase),
      MWL_VEC3("profile", "angular_offset", trial.profile.angular_offset),
      MWL_VEC3("profile", "angular_amplitude", trial.profile.angular_amplitude),
      MWL_VEC3("profile", "angular_frequency", trial.profile.angular_frequency),
      MWL_VEC3("profile", "angular_phase", trial.profile.angular_phase),

      Field{"imu", "rotation",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              const auto n = parse_list(k, v);
              if (n.size() != 9) bad_value(k, "expected nine numbers, row-major");
              Mat3 m;
              for (int r = 0; r < 3; ++r)
                for (int q = 0; q < 3; ++q) m(r, q) = n[3 * r + q];
              if (!Rotation3::is_rotation(m)) bad_value(k, "not a rotation matrix");
              c.trial.imu.rotation = Rotation3::trusted(m);
            },
            [](const RunConfig& c) {
              const Mat3& m = c.trial.imu.rotation.matrix();
              std::string out;
              for (int r = 0; r < 3; ++r)
                for (int q = 0; q < 3; ++q) out += (r || q ? " " : "") + num(m(r, q));
              return out;
            }},
      MWL_VEC3("imu", "translation", trial.imu.translation),
      MWL_DOUBLE("imu", "gravity", trial.imu.gravity),

      Field{"sweep", "sigmas",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.sigmas = parse_list(k, v);
              for (double s : c.sigmas) {
                if (!(s >= 0.0)) bad_value(k, "noise levels must be >= 0");
              }
            },
            [](const RunConfig& c) { return list(c.sigmas); }},
  };
  return table;
}

#undef MWL_DOUBLE
#undef MWL_VEC3
#undef MWL_BOOL

const Field* find_field(const std::string& section, const std::string& key) {
  for (const Field& f : fields()) {
    if (section == f.section && key == f.key) return &f;
  }
  return nullptr;
}

pt::ptree read_tree(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::ConfigError, "config line " + std::to_string(e.line()) + ": " + e.message());
  }
  return tree;
}

pt::ptree build_tree(const RunConfig& cfg) {
  pt::ptree tree;
  for (const Field& f : fields()) {
    tree.put(pt::ptree::path_type(std::string(f.section) + '/' + f.key, '/'), f.get(cfg));
  }
  return tree;
}

}  // namespace

std::vector<std::string> preset_names() { return {"mwlest-noiseless", "mwlest-noise", "cascade-vib"}; }

RunConfig preset(const std::string& name) {
  RunConfig cfg;
  apply_preset(cfg, name);
  return cfg;
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  // Every preset starts from the same baseline so the order of application
  // does not matter.
  const std::string command = cfg.command;
  cfg = RunConfig{};
  cfg.command = command;
  cfg.preset = name;
  TrialConfig& t = cfg.trial;
  if (name == "mwlest-noiseless") {
    t.mode = Mode::MwOnly;
    t.k_chi = 100.0;
    t.k_c = t.k_tau = 20.0;
    t.duration = 15.0;
    t.noise_deg = 0.0;
    cfg.trials = 200;
  } else if (name == "mwlest-noise") {
    t.mode = Mode::MwOnly;
    t.k_chi = 100.0;
    t.k_c = t.k_tau = 20.0;
    t.duration = 15.0;
    t.noise_deg = 1.0;
    cfg.trials = 200;
    cfg.sigmas = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  } else if (name == "cascade-vib") {
    t.mode = Mode::Cascade;
    t.k_s = 2.0;
    t.k_rho = 20.0;
    t.k_c = 20.0;
    t.k_tau = 20.0;
    t.k_chi = 200.0;
    t.duration = 12.0;
    t.noise_deg = 0.0;
    // Peak |a| about 2 and peak |w| about 0.5 over the 12 s run.
    ProfileConfig& p = t.profile;
    p.random_phases = false;
    p.linear_offset = Vec3::Zero();
    p.linear_amplitude = Vec3::Constant(0.35);
    p.linear_frequency = Vec3(2.415, 3.1395, 4.1055);
    p.linear_phase = Vec3(0.0, 2.1, 4.2);
    p.angular_offset = Vec3::Zero();
    p.angular_amplitude = Vec3::Constant(0.29);
    p.angular_frequency = Vec3(0.6, 0.72, 0.9);
    p.angular_phase = Vec3(0.5, 2.6, 4.7);
    cfg.trials = 20;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::ConfigError, "unknown preset '" + name + "' (known: " + known + ")");
  }
}

void apply_config(RunConfig& cfg, std::istream& is) {
  const pt::ptree tree = read_tree(is);
  for (const auto& [section, body] : tree) {
    if (section == "manifest") continue;
    if (body.empty()) {
      throw Error(ErrorKind::ConfigError, "key '" + section + "' must be inside a [section]");
    }
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      const Field* f = find_field(section, key);
      if (!f) throw Error(ErrorKind::ConfigError, "unknown config key '" + name + "'");
      f->set(cfg, name, value.get_value<std::string>());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file '" + path.string() + "'");
  apply_config(cfg, in);
}

std::optional<std::string> preset_in_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file '" + path.string() + "'");
  const pt::ptree tree = read_tree(in);
  const auto p = tree.get_optional<std::string>(pt::ptree::path_type("run/preset", '/'));
  if (p && !p->empty()) return *p;
  return std::nullopt;
}

void write_config(std::ostream& os, const RunConfig& cfg) { pt::write_ini(os, build_tree(cfg)); }

void write_manifest(std::ostream& os, const RunConfig& cfg, const ManifestInfo& info) {
  pt::ptree tree;
  tree.put("manifest.tool_version", kToolVersion);
  tree.put("manifest.command", cfg.command);
  tree.put("manifest.config_path", info.config_path);
  tree.put("manifest.output_dir", info.output_dir);
  for (const auto& child : build_tree(cfg)) tree.push_back(child);
  pt::write_ini(os, tree);
}

}  // namespace mwl
