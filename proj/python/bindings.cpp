#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sns/advection.hpp"
#include "sns/runner.hpp"

namespace py = pybind11;

namespace {

// Thin handle so python holds the shared grid without exposing const-ness.
struct PyGrid {
  sns::GridPtr p;
};

sns::VorticityField field_from_coords(const PyGrid& g, const std::vector<double>& coords) {
  sns::VorticityField psi(g.p);
  if (static_cast<int>(coords.size()) != psi.num_modes())
    throw std::invalid_argument("coords length must equal num_modes");
  for (int i = 0; i < psi.num_modes(); ++i) psi.coord(i) = coords[i];
  return psi;
}

}  // namespace

PYBIND11_MODULE(pysns, m) {
  m.doc() = "spectral Galerkin simulator for stochastic 2D Navier-Stokes on the torus";

  py::register_exception<sns::ConfigError>(m, "ConfigError");
  py::register_exception<sns::DivergenceError>(m, "DivergenceError");
  py::register_exception<sns::StatisticsRefused>(m, "StatisticsRefused");

  py::class_<PyGrid>(m, "Grid")
      .def(py::init([](int cutoff) { return PyGrid{sns::make_grid(cutoff)}; }),
           py::arg("cutoff"))
      .def_property_readonly("cutoff", [](const PyGrid& g) { return g.p->cutoff(); })
      .def_property_readonly("num_modes", [](const PyGrid& g) { return g.p->num_modes(); })
      .def("modes",
           [](const PyGrid& g) {
             std::vector<std::pair<int, int>> out;
             for (auto k : g.p->ordered_modes()) out.emplace_back(k.k1, k.k2);
             return out;
           })
      .def("index_of",
           [](const PyGrid& g, int k1, int k2) { return g.p->index_of({k1, k2}); })
      .def("eigenvalue", [](const PyGrid& g, int n) { return g.p->ordered_eigenvalue(n); });

  py::class_<sns::VorticityField>(m, "Field")
      .def(py::init([](const PyGrid& g) { return sns::VorticityField(g.p); }), py::arg("grid"))
      .def(py::init(&field_from_coords), py::arg("grid"), py::arg("coords"))
      .def_property_readonly("num_modes", &sns::VorticityField::num_modes)
      .def("coords", [](const sns::VorticityField& f) { return f.coords(); })
      .def("coord", [](const sns::VorticityField& f, int i) { return f.coord(i); })
      .def("set_coord", [](sns::VorticityField& f, int i, double v) { f.coord(i) = v; })
      .def("norm_h", [](const sns::VorticityField& f) { return sns::norm(f, sns::Space::H); })
      .def("norm_v", [](const sns::VorticityField& f) { return sns::norm(f, sns::Space::V); });

  m.def(
      "advect",
      [](const sns::VorticityField& a, const sns::VorticityField& b) {
        sns::AdvectionWorkspace ws(a.grid_ptr());
        return sns::advect(a, b, ws);
      },
      py::arg("a"), py::arg("b"),
      "Dealiased Galerkin projection of biot_savart(a) . grad b");
  m.def("advect_oracle", &sns::advect_oracle, py::arg("a"), py::arg("b"),
        "Direct-convolution reference for advect (cutoff <= 8)");

  m.def(
      "z0_conditions",
      [](const std::vector<std::pair<int, int>>& pts) {
        std::vector<sns::WaveVector> z0;
        for (auto [a, b] : pts) z0.push_back({a, b});
        const sns::Z0Report r = sns::z0_conditions(z0);
        py::dict d;
        d["symmetric"] = r.symmetric;
        d["two_norms"] = r.two_norms;
        d["generates"] = r.generates;
        return d;
      },
      py::arg("z0"));

  m.def("ks_distance", &sns::ks_distance, py::arg("a"), py::arg("b"));
  m.def("config_hash", &sns::config_hash, py::arg("text"));

  m.def(
      "run",
      [](const std::string& config_json, const std::string& out_dir,
         std::optional<std::uint64_t> seed, std::optional<int> replicas) {
        sns::RunConfig cfg = sns::parse_config(config_json);
        sns::RunOverrides over;
        over.seed = seed;
        over.replicas = replicas;
        return sns::run_experiment(cfg, out_dir, over);
      },
      py::arg("config_json"), py::arg("out_dir"), py::arg("seed") = std::nullopt,
      py::arg("replicas") = std::nullopt,
      "Run a configured experiment, writing artifacts into out_dir");

  m.def(
      "simulate",
      [](const std::string& config_json) {
        sns::RunConfig cfg = sns::parse_config(config_json);
        cfg.sim.validate();
        const sns::TrajectoryRecord rec = sns::simulate(cfg.sim, 0);
        py::dict d;
        d["times"] = rec.times;
        d["energy"] = rec.energy;
        d["enstrophy"] = rec.enstrophy;
        d["mode_coords"] = rec.mode_coords;
        d["cfl_warning"] = rec.cfl_warning;
        return d;
      },
      py::arg("config_json"), "Integrate one trajectory and return the recorded series");
}
