#include <optional>
#include <vector>

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kinplume/condmom.hpp"
#include "kinplume/contour.hpp"
#include "kinplume/giddings.hpp"
#include "kinplume/lattice.hpp"
#include "kinplume/moments.hpp"
#include "kinplume/particle.hpp"
#include "kinplume/planar.hpp"
#include "kinplume/stehfest.hpp"

namespace py = pybind11;
using namespace kinplume;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> field_array(const planar::DensityField2D& f) {
  py::array_t<double> a({f.ny(), f.nx()});
  std::copy(f.values.begin(), f.values.end(), a.mutable_data());
  return a;
}

py::dict field_dict(const planar::DensityField2D& f) {
  py::dict d;
  d["x"] = to_array(f.x);
  d["y"] = to_array(f.y);
  d["values"] = field_array(f);
  d["origin_atom"] = f.origin_atom;
  d["line_atom"] = f.line_atom;
  d["line_atom_y_variance"] = f.line_atom_y_variance;
  d["grid_mass"] = f.grid_mass();
  return d;
}

}  // namespace

PYBIND11_MODULE(_kinplume, m) {
  m.doc() = "Kinetic sorption transport: particles, lattice, moments and analytic plumes";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", error.ptr());
  py::register_exception<DegenerateKinetics>(m, "DegenerateKinetics", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());

  py::enum_<Phase>(m, "Phase").value("Free", Phase::Free).value("Adsorbed", Phase::Adsorbed);
  py::enum_<Initial>(m, "Initial")
      .value("Free", Initial::Free)
      .value("Adsorbed", Initial::Adsorbed)
      .value("Equilibrium", Initial::Equilibrium);
  py::enum_<moments::Conditioning>(m, "Conditioning")
      .value("None_", moments::Conditioning::None)
      .value("FreeAtT", moments::Conditioning::FreeAtT)
      .value("AdsorbedAtT", moments::Conditioning::AdsorbedAtT);

  py::class_<KineticsParams>(m, "KineticsParams")
      .def(py::init([](double lambda, double mu) { return KineticsParams{lambda, mu}; }),
           py::arg("lambda_"), py::arg("mu"))
      .def_readwrite("lambda_", &KineticsParams::lambda)
      .def_readwrite("mu", &KineticsParams::mu)
      .def("validate", &KineticsParams::validate)
      .def("__repr__", [](const KineticsParams& k) {
        return "KineticsParams(lambda_=" + std::to_string(k.lambda) + ", mu=" + std::to_string(k.mu) + ")";
      });
  py::class_<TransportParams>(m, "TransportParams")
      .def(py::init([](double v, double d_l, double d_t) { return TransportParams{v, d_l, d_t}; }),
           py::arg("v"), py::arg("d_l") = 0.0, py::arg("d_t") = 0.0)
      .def_readwrite("v", &TransportParams::v)
      .def_readwrite("d_l", &TransportParams::d_l)
      .def_readwrite("d_t", &TransportParams::d_t)
      .def("validate", &TransportParams::validate);
  py::class_<DerivedQuantities>(m, "DerivedQuantities")
      .def_readonly("pi_f", &DerivedQuantities::pi_f)
      .def_readonly("pi_a", &DerivedQuantities::pi_a)
      .def_readonly("v_star", &DerivedQuantities::v_star)
      .def_readonly("d_star", &DerivedQuantities::d_star)
      .def_readonly("v_e", &DerivedQuantities::v_e)
      .def_readonly("d_e", &DerivedQuantities::d_e)
      .def_readonly("retardation", &DerivedQuantities::retardation);

  m.def("derive", &derive, py::arg("kinetics"), py::arg("transport"));
  m.def("transition_probability", &transition_probability, py::arg("from_"), py::arg("to"),
        py::arg("t"), py::arg("kinetics"));
  m.def("occupancy", &occupancy, py::arg("initial"), py::arg("to"), py::arg("t"), py::arg("kinetics"));

  py::class_<moments::MomentSet>(m, "MomentSet")
      .def_readonly("mean", &moments::MomentSet::mean)
      .def_readonly("variance", &moments::MomentSet::variance)
      .def_readonly("third_central", &moments::MomentSet::third_central)
      .def_readonly("probability", &moments::MomentSet::probability)
      .def_readonly("t", &moments::MomentSet::t);
  m.def("moments", &moments::moments_s, py::arg("kinetics"), py::arg("transport"), py::arg("t"),
        py::arg("conditioning") = moments::Conditioning::None, py::arg("initial") = Initial::Equilibrium);
  m.def("sigma_ff_sq", &moments::sigma_ff_sq, py::arg("kinetics"), py::arg("transport"), py::arg("t"));
  m.def("mean_kn", &moments::mean_kn, py::arg("a"), py::arg("b"), py::arg("n"));
  m.def("var_kn", &moments::var_kn, py::arg("a"), py::arg("b"), py::arg("n"));

  m.def(
      "simulate",
      [](const KineticsParams& kin, const TransportParams& tp, double t, std::size_t count,
         Initial initial, std::uint64_t seed, int dims, unsigned threads) {
        particle::EnsembleOptions eo;
        eo.t = t;
        eo.count = count;
        eo.initial = initial;
        eo.seed = seed;
        eo.dims = dims;
        eo.threads = threads;
        const auto r = particle::run_ensemble(kin, tp, eo);
        std::vector<double> x, y, tau;
        std::vector<int> phase;
        for (const auto& rec : r.records) {
          x.push_back(rec.final.x);
          y.push_back(rec.final.y);
          tau.push_back(rec.final.tau_free);
          phase.push_back(rec.final.phase == Phase::Free ? 0 : 1);
        }
        py::dict d;
        d["x"] = to_array(x);
        d["y"] = to_array(y);
        d["tau_free"] = to_array(tau);
        d["final_phase"] = py::array_t<int>(phase.size(), phase.data());
        d["centroid"] = r.stats.centroid.value;
        d["centroid_se"] = r.stats.centroid.standard_error;
        d["variance"] = r.stats.variance.value;
        return d;
      },
      py::arg("kinetics"), py::arg("transport"), py::arg("t"), py::arg("count") = 1000,
      py::arg("initial") = Initial::Equilibrium, py::arg("seed") = 42, py::arg("dims") = 1,
      py::arg("threads") = 0);

  m.def(
      "lattice",
      [](const KineticsParams& kin, const TransportParams& tp, double dt, double t, Initial initial) {
        const long n = static_cast<long>(std::llround(t / dt));
        const auto cfg = lattice::make_config(tp, kin, dt, t);
        auto s = lattice::init_lattice(cfg, initial, n);
        lattice::advance(s, cfg, n);
        std::vector<double> x;
        for (long c = -s.half_width; c <= s.half_width; ++c) x.push_back(cfg.x(c));
        const auto lm = lattice::lattice_moments(s, cfg);
        py::dict d;
        d["x"] = to_array(x);
        d["p_f"] = to_array(s.p_f);
        d["p_a"] = to_array(s.p_a);
        d["mean"] = lm.total.mean;
        d["variance"] = lm.total.variance;
        d["beta"] = cfg.beta;
        d["delta"] = cfg.delta;
        d["alpha"] = cfg.alpha;
        return d;
      },
      py::arg("kinetics"), py::arg("transport"), py::arg("dt"), py::arg("t"),
      py::arg("initial") = Initial::Equilibrium);

  m.def("residence_density", &giddings::density, py::arg("initial"), py::arg("final_phase"),
        py::arg("tau"), py::arg("t"), py::arg("kinetics"));
  m.def(
      "profile_1d",
      [](double t, const KineticsParams& kin, double v, const std::vector<double>& x, Initial initial) {
        const auto p = giddings::profile_1d(t, kin, v, x, initial);
        py::dict d;
        d["x"] = to_array(p.x);
        d["n_f"] = to_array(p.n_f);
        d["n_a"] = to_array(p.n_a);
        d["n_tot"] = to_array(p.n_tot);
        d["gaussian_ref"] = to_array(p.gaussian_ref);
        d["atom_x0"] = p.atom_x0;
        d["atom_vt"] = p.atom_vt;
        return d;
      },
      py::arg("t"), py::arg("kinetics"), py::arg("v"), py::arg("x"), py::arg("initial") = Initial::Equilibrium);

  m.def(
      "full_2d",
      [](Initial initial, std::optional<Phase> phase, double t, const KineticsParams& kin,
         const TransportParams& tp, std::size_t nx, std::size_t ny, unsigned threads) {
        const auto grid = planar::default_full_grid(t, tp, nx, ny);
        return field_dict(planar::full_2d(initial, phase, t, kin, tp, grid, {1e-8, 1e-8, 4000, 4}, threads));
      },
      py::arg("initial"), py::arg("phase"), py::arg("t"), py::arg("kinetics"), py::arg("transport"),
      py::arg("nx") = 120, py::arg("ny") = 80, py::arg("threads") = 0);
  m.def(
      "transverse_only",
      [](Initial initial, std::optional<Phase> phase, double t, const KineticsParams& kin, double v,
         double d_t, std::size_t nx, std::size_t ny) {
        const auto grid = planar::default_transverse_grid(t, v, d_t, nx, ny);
        return field_dict(planar::transverse_only(initial, phase, t, kin, v, d_t, grid));
      },
      py::arg("initial"), py::arg("phase"), py::arg("t"), py::arg("kinetics"), py::arg("v"),
      py::arg("d_t"), py::arg("nx") = 120, py::arg("ny") = 80);

  m.def("stehfest_invert", &laplace::stehfest_invert, py::arg("f"), py::arg("t"), py::arg("n_terms") = 12);
  m.def(
      "x_moments_given_y",
      [](int order, Phase phase, const std::vector<double>& y, double t, const KineticsParams& kin,
         const TransportParams& tp, bool normalized) {
        const auto c = condmom::x_moments_given_y(order, phase, y, t, kin, tp, normalized);
        return py::make_tuple(to_array(c.values), c.atom_weight);
      },
      py::arg("order"), py::arg("phase"), py::arg("y"), py::arg("t"), py::arg("kinetics"),
      py::arg("transport"), py::arg("normalized") = false);
  m.def(
      "transverse_variance_ratio",
      [](const std::vector<double>& x, double t, const KineticsParams& kin, const TransportParams& tp) {
        return to_array(condmom::transverse_variance_ratio(x, t, kin, tp).values);
      },
      py::arg("x"), py::arg("t"), py::arg("kinetics"), py::arg("transport"));
}
