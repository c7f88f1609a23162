#include "mwl/errors.hpp"
#include "mwl/world_sim.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace mwl {

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(int line_no, const std::string& what) {
  throw Error(ErrorKind::ConfigError, "scene file line " + std::to_string(line_no) + ": " + what);
}

template <int N>
Eigen::Matrix<double, N, 1> read_numbers(const std::string& value, int line_no,
                                         const std::string& key) {
  std::istringstream in(value);
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!(in >> out(i))) bad(line_no, "'" + key + "' expects " + std::to_string(N) + " numbers");
  }
  std::string extra;
  if (in >> extra) bad(line_no, "'" + key + "' has trailing data");
  return out;
}

}  // namespace

void write_scene(std::ostream& os, const WorldScene& scene) {
  os << "# mwl scene v1\n";
  os << "seed = " << scene.seed << '\n';
  os << "frame =";
  const Mat3& f = scene.frame.matrix();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) os << ' ' << num(f(r, c));
  os << '\n';
  os << "plane_normal = " << num(scene.plane.normal.x()) << ' ' << num(scene.plane.normal.y())
     << ' ' << num(scene.plane.normal.z()) << '\n';
  os << "plane_offset = " << num(scene.plane.offset) << '\n';
  os << "line_count = " << scene.lines.size() << '\n';
  for (const SceneLine& l : scene.lines) {
    os << "line = " << num(l.anchor.x()) << ' ' << num(l.anchor.y()) << ' ' << num(l.anchor.z())
       << ' ' << label_of(l.axis) << '\n';
  }
}

WorldScene read_scene(std::istream& is) {
  WorldScene scene;
  bool have_frame = false, have_normal = false, have_offset = false;
  long declared = -1;
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) bad(line_no, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key == "seed") {
      try {
        scene.seed = std::stoull(value);
      } catch (const std::exception&) {
        bad(line_no, "'seed' must be an unsigned integer");
      }
    } else if (key == "frame") {
      const auto v = read_numbers<9>(value, line_no, key);
      Mat3 m;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = v(3 * r + c);
      if (!Rotation3::is_rotation(m)) bad(line_no, "'frame' is not a rotation matrix");
      scene.frame = Rotation3::trusted(m);
      have_frame = true;
    } else if (key == "plane_normal") {
      scene.plane.normal = read_numbers<3>(value, line_no, key);
      have_normal = true;
    } else if (key == "plane_offset") {
      scene.plane.offset = read_numbers<1>(value, line_no, key)(0);
      if (!(scene.plane.offset > 0.0)) bad(line_no, "'plane_offset' must be positive");
      have_offset = true;
    } else if (key == "line_count") {
      declared = static_cast<long>(read_numbers<1>(value, line_no, key)(0));
    } else if (key == "line") {
      const auto v = read_numbers<4>(value, line_no, key);
      const double label = v(3);
      if (label != 1.0 && label != 2.0 && label != 3.0) bad(line_no, "axis label must be 1, 2 or 3");
      scene.lines.push_back(SceneLine{v.head<3>(), axis_from_label(static_cast<int>(label))});
    } else {
      bad(line_no, "unknown key '" + key + "'");
    }
  }
  if (!have_frame || !have_normal || !have_offset) {
    throw Error(ErrorKind::ConfigError, "scene file is missing frame, plane_normal or plane_offset");
  }
  if (declared >= 0 && declared != static_cast<long>(scene.lines.size())) {
    throw Error(ErrorKind::ConfigError, "scene file declares " + std::to_string(declared) +
                                            " lines but lists " + std::to_string(scene.lines.size()));
  }
  return scene;
}

}  // namespace mwl
