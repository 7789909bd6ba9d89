#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "plasmondet/commands.hpp"
#include "plasmondet/config.hpp"
#include "plasmondet/detection_metrics.hpp"
#include "plasmondet/errors.hpp"
#include "plasmondet/spectra_imaging.hpp"

namespace py = pybind11;
using namespace plasmondet;

namespace {

LayerStack make_stack(const std::vector<std::pair<complex, double>>& layers, double wavelength) {
  std::vector<Layer> out;
  for (const auto& [n, d] : layers) out.push_back({n, d});
  return LayerStack(std::move(out), wavelength);
}

AtomLayerGeometry geometry(double gap, double thickness) { return {gap, thickness}; }

py::dict run(const std::string& command, const std::vector<std::string>& overrides,
             const std::string& config_path) {
  Config config = Config::defaults();
  if (!config_path.empty()) config.merge_file(config_path);
  for (const auto& a : overrides) config.set_assignment(a);
  const RunConfig resolved = resolve_config(config);
  CommandResult result;
  {
    py::gil_scoped_release release;
    result = run_command(command, resolved);
  }
  std::ostringstream text;
  write_result(text, config, resolved, result);
  py::dict d;
  d["command"] = result.command;
  d["header"] = result_header(config, resolved, result);
  d["columns"] = result.table.columns;
  d["rows"] = result.table.rows;
  d["notes"] = result.notes;
  d["text"] = text.str();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Plasmon-enhanced atom detection: optics, atomic response, detection metrics";

  // base class first: translators registered later are tried first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NotEvanescent>(m, "NotEvanescent", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<LayerStack>(m, "LayerStack")
      .def(py::init(&make_stack), py::arg("layers"), py::arg("wavelength"),
           "layers: [(index, thickness_m)], thickness inf for the two half-spaces")
      .def_property_readonly("wavelength", &LayerStack::vacuum_wavelength)
      .def_property_readonly("k0", &LayerStack::k0)
      .def_property_readonly("critical_angle", &LayerStack::critical_angle)
      .def("__len__", &LayerStack::size)
      .def("layers", [](const LayerStack& s) {
        std::vector<std::pair<complex, double>> out;
        for (const auto& l : s.layers()) out.emplace_back(l.index, l.thickness);
        return out;
      });

  m.def("reflectivity",
        [](const LayerStack& s, double angle) { return reflectivity(s, PlaneWaveContext(angle)); },
        py::arg("stack"), py::arg("angle"));
  m.def("transmittance",
        [](const LayerStack& s, double angle) { return transmittance(s, PlaneWaveContext(angle)); },
        py::arg("stack"), py::arg("angle"));
  m.def("reflection_amplitude",
        [](const LayerStack& s, double angle) {
          return reflection_amplitude(s, PlaneWaveContext(angle));
        },
        py::arg("stack"), py::arg("angle"));
  m.def("find_resonance_angle",
        py::overload_cast<const LayerStack&, double, double>(&find_resonance_angle),
        py::arg("stack"), py::arg("lo"), py::arg("hi"));
  m.def("evanescent_angle_window",
        [](const LayerStack& s, double span) {
          const AngleWindow w = evanescent_angle_window(s, span);
          return std::make_pair(w.lo, w.hi);
        },
        py::arg("stack"), py::arg("span") = 0.1745329251994);

  py::class_<AtomicTransition>(m, "AtomicTransition")
      .def(py::init<>())
      .def_readwrite("vacuum_wavelength", &AtomicTransition::vacuum_wavelength)
      .def_readwrite("natural_linewidth", &AtomicTransition::natural_linewidth);

  py::class_<AtomicMedium>(m, "AtomicMedium")
      .def(py::init<AtomicTransition, double, double>(), py::arg("transition"),
           py::arg("detuning_ratio"), py::arg("density"))
      .def_property_readonly("detuning_ratio", &AtomicMedium::detuning_ratio)
      .def_property_readonly("density", &AtomicMedium::density)
      .def_property_readonly("index", [](const AtomicMedium& a) { return refractive_index(a); });

  constexpr double inf = kSemiInfinite;
  m.def("delta_R_exact",
        [](const LayerStack& s, const AtomicMedium& a, double gap, double angle, double d4) {
          return delta_R_exact(s, a, geometry(gap, d4), PlaneWaveContext(angle));
        },
        py::arg("stack"), py::arg("medium"), py::arg("gap"), py::arg("angle"),
        py::arg("thickness") = inf);
  m.def("delta_R_linear",
        [](const LayerStack& s, const AtomicMedium& a, double gap, double angle) {
          return delta_R_linear(s, a, gap, PlaneWaveContext(angle));
        },
        py::arg("stack"), py::arg("medium"), py::arg("gap"), py::arg("angle"));
  m.def("absorbed_fraction",
        [](const LayerStack& s, const AtomicMedium& a, double gap, double angle, double d4) {
          const AbsorptionBudget b = absorbed_fraction(s, a, geometry(gap, d4), PlaneWaveContext(angle));
          py::dict d;
          d["full"] = b.full;
          d["simplified"] = b.simplified;
          d["exact"] = b.exact;
          d["clipped"] = b.clipped;
          return d;
        },
        py::arg("stack"), py::arg("medium"), py::arg("gap"), py::arg("angle"),
        py::arg("thickness") = inf);
  m.def("qnd_max_atoms",
        [](const LayerStack& s, const AtomicMedium& a, double gap, double angle, double eta) {
          return qnd_max_atoms(s, a, geometry(gap, inf), PlaneWaveContext(angle), eta);
        },
        py::arg("stack"), py::arg("medium"), py::arg("gap"), py::arg("angle"),
        py::arg("efficiency") = 1.0);
  m.def("maximize_qnd_over_angle",
        [](const LayerStack& s, const AtomicMedium& a, double gap, double eta, double span) {
          const QndOptimum q = maximize_qnd_over_angle(s, a, geometry(gap, inf), eta,
                                                       evanescent_angle_window(s, span));
          py::dict d;
          d["angle"] = q.angle;
          d["n_max"] = q.n_max;
          d["delta_r"] = q.delta_r;
          d["at_window_edge"] = q.at_window_edge;
          return d;
        },
        py::arg("stack"), py::arg("medium"), py::arg("gap"), py::arg("efficiency") = 1.0,
        py::arg("span") = 0.1745329251994);
  m.def("snr_photon_budget",
        [](const LayerStack& s, const AtomicMedium& a, double gap, double angle, double eta,
           double n_abs) {
          const PhotonBudgetSnr b =
              snr_photon_budget(s, a, geometry(gap, inf), PlaneWaveContext(angle), eta, n_abs);
          py::dict d;
          d["snr"] = b.snr;
          d["incident_photons"] = b.incident_photons;
          d["absorbed_fraction"] = b.absorbed_fraction;
          d["chi"] = b.chi;
          d["closed_form_snr"] = b.closed_form_snr;
          return d;
        },
        py::arg("stack"), py::arg("medium"), py::arg("gap"), py::arg("angle"),
        py::arg("efficiency") = 1.0, py::arg("max_absorbed_photons") = 1.0);

  py::class_<CloudModel>(m, "CloudModel")
      .def(py::init<>())
      .def_readwrite("radius_x", &CloudModel::radius_x)
      .def_readwrite("radius_y", &CloudModel::radius_y)
      .def_readwrite("radius_z", &CloudModel::radius_z)
      .def_readwrite("peak_density", &CloudModel::peak_density)
      .def_readwrite("atom_number", &CloudModel::atom_number)
      .def_readwrite("velocity_z", &CloudModel::velocity_z);
  py::class_<BeamModel>(m, "BeamModel")
      .def(py::init<>())
      .def_readwrite("waist_x", &BeamModel::waist_x)
      .def_readwrite("waist_y", &BeamModel::waist_y)
      .def_readwrite("intensity_ratio", &BeamModel::intensity_ratio);
  m.def("overlap_average_factor",
        py::overload_cast<const CloudModel&, const BeamModel&>(&overlap_average_factor),
        py::arg("cloud"), py::arg("beam"));
  m.def("atom_number_resolution", &atom_number_resolution, py::arg("atoms"), py::arg("snr"));

  m.def("commands", [] {
    std::vector<std::string> out;
    for (auto n : command_names()) out.emplace_back(n);
    return out;
  });
  m.def("run", &run, py::arg("command"), py::arg("overrides") = std::vector<std::string>{},
        py::arg("config") = std::string{},
        "Runs a CLI command in-process; returns header, columns, rows, notes and the CSV text");
}
