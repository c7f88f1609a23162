#include "mwl/config.hpp"
#include "mwl/errors.hpp"
#include "mwl/geometry.hpp"
#include "mwl/observers.hpp"
#include "mwl/trials.hpp"
#include "mwl/world_sim.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace mwl;

namespace {

Axis axis_arg(int label) {
  if (label < 1 || label > 3) throw Error(ErrorKind::InvalidArgument, "axis label must be 1, 2 or 3");
  return axis_from_label(label);
}

Mode mode_arg(const std::string& s) {
  if (s == "mw_only") return Mode::MwOnly;
  if (s == "cascade") return Mode::Cascade;
  throw Error(ErrorKind::InvalidArgument, "mode must be 'mw_only' or 'cascade'");
}

py::dict series_dict(const TrialRecord& r) {
  std::vector<double> t, e, c, v, p;
  std::vector<std::vector<double>> eps_d, eps_l, chi;
  for (const auto& s : r.series) {
    t.push_back(s.t);
    e.push_back(s.state_error);
    c.push_back(s.cayley_error);
    v.push_back(s.lyapunov);
    p.push_back(s.plane_error);
    eps_d.push_back(s.eps_d);
    eps_l.push_back(s.eps_l);
    chi.push_back(s.chi_hat);
  }
  py::dict d;
  d["t"] = t;
  d["state_error"] = e;
  d["cayley_error"] = c;
  d["lyapunov"] = v;
  d["plane_error"] = p;
  d["eps_d"] = eps_d;
  d["eps_l"] = eps_l;
  d["chi_hat"] = chi;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Manhattan-world line depth observers";
  m.attr("__version__") = kToolVersion;

  static py::exception<Error> exc(m, "MwlError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  // geometry
  m.def("cayley_from_rotation", [](const Mat3& r) { return cayley_from_rotation(Rotation3(r)).value; },
        py::arg("rotation"));
  m.def("rotation_from_cayley", [](const Vec3& c) { return rotation_from_cayley(CayleyParams{c}).matrix(); },
        py::arg("c"));
  m.def("project_moment",
        [](const Mat3& r, const Vec3& n, int axis) {
          return project_moment(Rotation3(r), n, axis_arg(axis)).tau;
        },
        py::arg("frame"), py::arg("moment"), py::arg("axis"),
        "Reduced moment of a line along the given axis label (1, 2 or 3).");
  m.def("reconstruct_moment",
        [](const Vec2& tau, int axis, const Mat3& r) {
          return reconstruct_moment(ReducedMoment{tau, axis_arg(axis)}, Rotation3(r));
        },
        py::arg("tau"), py::arg("axis"), py::arg("frame"));
  m.def("line_from_point_direction",
        [](const Vec3& p, const Vec3& d) {
          const PlueckerLine l = line_from_point_direction(p, d);
          py::dict out;
          out["direction"] = l.direction;
          out["moment"] = l.moment;
          out["depth"] = l.depth;
          return out;
        },
        py::arg("point"), py::arg("direction"));

  // observers
  m.def("mw_Q", [](const Vec3& c) { return mw_Q(CayleyParams{c}); }, py::arg("c"));
  m.def("mw_X",
        [](const Vec2& tau, int axis, const Vec3& c) {
          return mw_X(ReducedMoment{tau, axis_arg(axis)}, CayleyParams{c});
        },
        py::arg("tau"), py::arg("axis"), py::arg("c"));
  m.def("mw_T",
        [](const Vec2& tau, int axis, const Vec3& c) {
          return Eigen::Matrix<double, 3, 2>(mw_T(ReducedMoment{tau, axis_arg(axis)}, CayleyParams{c}));
        },
        py::arg("tau"), py::arg("axis"), py::arg("c"));

  // metrics
  m.def("direction_error", &direction_error, py::arg("d_hat"), py::arg("d"));
  m.def("depth_error", &depth_error, py::arg("l_hat"), py::arg("l"));

  // scene
  m.def("random_scene",
        [](std::uint64_t seed, std::array<int, 3> per_axis, double side) {
          const WorldScene s = random_scene(seed, per_axis, side);
          std::ostringstream os;
          write_scene(os, s);
          py::dict out;
          out["frame"] = s.frame.matrix();
          std::vector<Vec3> anchors;
          std::vector<int> axes;
          for (const auto& l : s.lines) {
            anchors.push_back(l.anchor);
            axes.push_back(label_of(l.axis));
          }
          out["anchors"] = anchors;
          out["axes"] = axes;
          out["plane_normal"] = s.plane.normal;
          out["plane_offset"] = s.plane.offset;
          out["text"] = os.str();
          return out;
        },
        py::arg("seed"), py::arg("lines_per_axis") = std::array<int, 3>{2, 2, 2},
        py::arg("cube_side") = 25.0);

  // trials
  py::class_<TrialConfig>(m, "TrialConfig")
      .def(py::init<>())
      .def_readwrite("seed", &TrialConfig::seed)
      .def_readwrite("lines_per_axis", &TrialConfig::lines_per_axis)
      .def_readwrite("cube_side", &TrialConfig::cube_side)
      .def_property(
          "mode", [](const TrialConfig& c) { return std::string(to_string(c.mode)); },
          [](TrialConfig& c, const std::string& s) { c.mode = mode_arg(s); })
      .def_readwrite("k_c", &TrialConfig::k_c)
      .def_readwrite("k_tau", &TrialConfig::k_tau)
      .def_readwrite("k_chi", &TrialConfig::k_chi)
      .def_readwrite("k_s", &TrialConfig::k_s)
      .def_readwrite("k_rho", &TrialConfig::k_rho)
      .def_readwrite("dt", &TrialConfig::dt)
      .def_readwrite("duration", &TrialConfig::duration)
      .def_readwrite("noise_deg", &TrialConfig::noise_deg)
      .def_readwrite("convergence_fraction", &TrialConfig::convergence_fraction)
      .def_readwrite("divergence_factor", &TrialConfig::divergence_factor)
      .def_readwrite("debounce", &TrialConfig::debounce)
      .def_readwrite("record_series", &TrialConfig::record_series)
      .def_readwrite("decimation", &TrialConfig::decimation)
      .def_readwrite("force_true_velocity", &TrialConfig::force_true_velocity)
      .def_readwrite("start_at_truth", &TrialConfig::start_at_truth)
      .def("validate", &TrialConfig::validate);

  m.def("preset", [](const std::string& name) { return preset(name).trial; }, py::arg("name"));
  m.def("preset_names", &preset_names);

  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("seed", &TrialRecord::seed)
      .def_property_readonly("verdict", [](const TrialRecord& r) { return std::string(to_string(r.verdict)); })
      .def_readonly("cause", &TrialRecord::cause)
      .def_readonly("t_converged", &TrialRecord::t_converged)
      .def_readonly("t_diverged", &TrialRecord::t_diverged)
      .def_readonly("t_end", &TrialRecord::t_end)
      .def_readonly("distance", &TrialRecord::distance)
      .def_readonly("total_distance", &TrialRecord::total_distance)
      .def_readonly("initial_error", &TrialRecord::initial_error)
      .def_readonly("final_error", &TrialRecord::final_error)
      .def_readonly("final_eps_d", &TrialRecord::final_eps_d)
      .def_readonly("final_eps_l", &TrialRecord::final_eps_l)
      .def_readonly("plane_t_converged", &TrialRecord::plane_t_converged)
      .def_readonly("sign_condition_violations", &TrialRecord::sign_condition_violations)
      .def_property_readonly("success", &TrialRecord::success)
      .def_property_readonly("series", &series_dict);

  py::class_<AggregateReport>(m, "AggregateReport")
      .def_readonly("n_trials", &AggregateReport::n_trials)
      .def_readonly("n_success", &AggregateReport::n_success)
      .def_readonly("n_diverged", &AggregateReport::n_diverged)
      .def_readonly("success_rate", &AggregateReport::success_rate)
      .def_readonly("median_t_converged", &AggregateReport::median_t_converged)
      .def_readonly("median_distance", &AggregateReport::median_distance)
      .def_readonly("median_eps_d", &AggregateReport::median_eps_d)
      .def_readonly("median_eps_l", &AggregateReport::median_eps_l)
      .def_readonly("trials", &AggregateReport::trials);

  m.def("run_trial", &run_trial, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_monte_carlo", &run_monte_carlo, py::arg("config"), py::arg("n_trials"),
        py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("run_noise_sweep",
        [](const TrialConfig& cfg, const std::vector<double>& sigmas, std::size_t n, std::size_t workers) {
          py::list out;
          std::vector<SweepLevel> levels;
          {
            py::gil_scoped_release release;
            levels = run_noise_sweep(cfg, sigmas, n, workers);
          }
          for (const auto& l : levels) out.append(py::make_tuple(l.sigma_deg, l.report));
          return out;
        },
        py::arg("config"), py::arg("sigmas"), py::arg("n_trials"), py::arg("workers") = 1);
  m.def("trials_csv",
        [](const std::vector<TrialRecord>& trials) {
          std::ostringstream os;
          write_trials_csv(os, trials);
          return os.str();
        },
        py::arg("trials"));
}
