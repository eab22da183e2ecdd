// Python bindings: the lattice/growth/trace core, the exclusion coupling,
// the limit-shape formulas, the statistics kit, and the experiment runner.
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "cgl/coupling.hpp"
#include "cgl/errors.hpp"
#include "cgl/experiment.hpp"
#include "cgl/growth.hpp"
#include "cgl/interface.hpp"
#include "cgl/lattice.hpp"
#include "cgl/rng.hpp"
#include "cgl/shape.hpp"
#include "cgl/stats.hpp"
#include "cgl/tasep.hpp"
#include "cgl/trace.hpp"
#include "cgl/weights.hpp"

namespace py = pybind11;
using namespace cgl;

namespace {

py::array_t<double> field_array(const WeightField& f) {
    const auto rows = (py::ssize_t)f.region.height();
    const auto cols = (py::ssize_t)f.region.width();
    py::array_t<double> out({rows, cols});
    std::copy(f.w.begin(), f.w.end(), out.mutable_data());
    return out;
}

// dense copies padded to the bounding rectangle of D; NaN / 0 off-domain
py::array_t<double> table_g_array(const GrowthTable& t) {
    int32_t mn = t.n;
    for (int32_t x : t.xlo) mn = std::min(mn, x);
    const auto rows = (py::ssize_t)(t.n - t.y_min + 1);
    const auto cols = (py::ssize_t)(t.n - mn + 1);
    py::array_t<double> out({rows, cols});
    auto a = out.mutable_unchecked<2>();
    for (py::ssize_t r = 0; r < rows; ++r)
        for (py::ssize_t c = 0; c < cols; ++c) {
            Site z{(int32_t)(mn + c), (int32_t)(t.y_min + r)};
            a(r, c) = t.in_domain(z) ? t.g[t.idx(z)]
                                     : std::numeric_limits<double>::quiet_NaN();
        }
    return out;
}

py::array_t<uint8_t> table_label_array(const GrowthTable& t) {
    int32_t mn = t.n;
    for (int32_t x : t.xlo) mn = std::min(mn, x);
    const auto rows = (py::ssize_t)(t.n - t.y_min + 1);
    const auto cols = (py::ssize_t)(t.n - mn + 1);
    py::array_t<uint8_t> out({rows, cols});
    auto a = out.mutable_unchecked<2>();
    for (py::ssize_t r = 0; r < rows; ++r)
        for (py::ssize_t c = 0; c < cols; ++c) {
            Site z{(int32_t)(mn + c), (int32_t)(t.y_min + r)};
            a(r, c) = t.in_domain(z) ? t.label[t.idx(z)] : 0;
        }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "corner growth laboratory: exponential last-passage percolation "
              "with a two-sided staircase, the coupled exclusion process, and "
              "the limit-law experiment runner";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const UsageError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const ParameterError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const ValidationError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const DomainError& e) {
            PyErr_SetString(PyExc_IndexError, e.what());
        }
    });

    // ------------------------------------------------------------ lattice --
    py::class_<Site>(m, "Site")
        .def(py::init<int32_t, int32_t>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &Site::x)
        .def_readwrite("y", &Site::y)
        .def("__eq__", [](Site a, Site b) { return a == b; })
        .def("__repr__", [](Site z) { return to_string(z); });

    py::class_<LatticeBox>(m, "LatticeBox")
        .def(py::init<Site, Site>(), py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &LatticeBox::lo)
        .def_readwrite("hi", &LatticeBox::hi)
        .def("contains", &LatticeBox::contains)
        .def("width", &LatticeBox::width)
        .def("height", &LatticeBox::height);

    py::class_<RngStream>(m, "RngStream")
        .def(py::init([](uint64_t seed, uint64_t stream) {
                 return RngStream{seed, stream};
             }),
             py::arg("seed"), py::arg("stream") = 0)
        .def_readwrite("seed", &RngStream::seed)
        .def_readwrite("stream", &RngStream::stream);

    // ---------------------------------------------------------- interface --
    py::class_<InitialInterface>(m, "InitialInterface")
        .def_readonly("alpha", &InitialInterface::alpha)
        .def_readonly("beta", &InitialInterface::beta)
        .def_readonly("lam", &InitialInterface::lambda)
        .def_readonly("rho", &InitialInterface::rho)
        .def_readonly("slope_alpha", &InitialInterface::slope_alpha)
        .def_readonly("slope_beta", &InitialInterface::slope_beta)
        .def("alpha_at", &InitialInterface::alpha_at)
        .def("beta_at", &InitialInterface::beta_at)
        .def("corner_a", &InitialInterface::corner_a)
        .def("corner_b", &InitialInterface::corner_b);

    py::class_<ExclusionProfile>(m, "ExclusionProfile")
        .def_readonly("left", &ExclusionProfile::left)
        .def_readonly("right", &ExclusionProfile::right)
        .def("occupied", &ExclusionProfile::occupied)
        .def("lo", &ExclusionProfile::lo)
        .def("hi", &ExclusionProfile::hi);

    m.def("sample_random_walk", &sample_random_walk, py::arg("lam"),
          py::arg("rho"), py::arg("length"), py::arg("stream"),
          "stationary two-arm staircase with the given densities");
    m.def("build_deterministic", &build_deterministic, py::arg("alpha"),
          py::arg("beta"), py::arg("lam"), py::arg("rho"));
    m.def("build_flat_L", &build_flat_L, py::arg("L"), py::arg("length"));
    m.def("default_truncation", &default_truncation, py::arg("box_n"));
    m.def("to_exclusion", &to_exclusion);
    m.def("from_exclusion", &from_exclusion, py::arg("profile"),
          py::arg("lam"), py::arg("rho"));

    // ------------------------------------------------------------ weights --
    py::class_<WeightField>(m, "WeightField")
        .def_readonly("region", &WeightField::region)
        .def("at", &WeightField::at)
        .def("array", &field_array,
             "row-major copy, row 0 at the region's low corner");

    m.def("sample_weights", &sample_weights, py::arg("region"),
          py::arg("stream"), py::arg("max_bytes") = size_t(3) << 30,
          "site-keyed exponential weights: overlapping regions agree bitwise");
    m.def("passage_time", &passage_time, py::arg("field"), py::arg("src"),
          py::arg("dst"), py::call_guard<py::gil_scoped_release>(),
          "maximal directed path weight, both endpoints included");

    // ------------------------------------------------------------- growth --
    py::class_<GrowthTable>(m, "GrowthTable")
        .def_readonly("n", &GrowthTable::n)
        .def_readonly("y_min", &GrowthTable::y_min)
        .def_readonly("iface", &GrowthTable::iface)
        .def("in_domain", &GrowthTable::in_domain)
        .def("in_gamma0", &GrowthTable::in_gamma0)
        .def("g_at", &GrowthTable::g_at)
        .def("g_or_zero", &GrowthTable::g_or_zero)
        .def("label_at", &GrowthTable::label_at)
        .def("back_at", &GrowthTable::back_at)
        .def("g_array", &table_g_array,
             "dense copy over the bounding rectangle, NaN off the domain")
        .def("label_array", &table_label_array);

    py::class_<CompetitionPath>(m, "CompetitionPath")
        .def_readonly("steps", &CompetitionPath::steps)
        .def_readonly("times", &CompetitionPath::times)
        .def_readonly("horizon", &CompetitionPath::horizon);

    py::class_<DirectedPath>(m, "DirectedPath")
        .def_readonly("sites", &DirectedPath::sites)
        .def_readonly("weight", &DirectedPath::weight);

    py::class_<ContactPoint>(m, "ContactPoint")
        .def_readonly("side", &ContactPoint::side)
        .def_readonly("index", &ContactPoint::index)
        .def_readonly("site", &ContactPoint::site);

    py::class_<YField>(m, "YField")
        .def_readonly("sites", &YField::sites)
        .def_readonly("values", &YField::values);

    m.def("compute_growth", &compute_growth, py::arg("field"), py::arg("iface"),
          py::arg("n"), py::arg("max_bytes") = size_t(3) << 30,
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "interface_path",
        [](const GrowthTable& t, int64_t max_steps,
           bool allow_partial) -> py::tuple {
            try {
                CompetitionPath p = competition_interface(t, max_steps);
                return py::make_tuple(std::move(p), false);
            } catch (const BoxExhausted& e) {
                if (!allow_partial) throw;
                return py::make_tuple(e.partial, true);
            }
        },
        py::arg("table"), py::arg("max_steps") = -1,
        py::arg("allow_partial") = true,
        "(path, exhausted): the competition interface, partial if it left "
        "the box");
    m.def("psi_at", &psi_at, py::arg("path"), py::arg("t"),
          "interface position at time t");
    m.def("geodesic_backtrack", &geodesic_backtrack, py::arg("table"),
          py::arg("z"));
    m.def("contact_point", &contact_point, py::arg("table"), py::arg("z"));
    m.def("reversed_weight_at", &reversed_weight_at, py::arg("table"),
          py::arg("z"));
    m.def("reversed_weights", &reversed_weights, py::arg("table"),
          py::arg("margin") = 1);
    m.def("nems_geodesic_check", &nems_geodesic_check, py::arg("table"),
          py::arg("path"), py::arg("max_span") = 12, py::arg("margin") = 2,
          py::call_guard<py::gil_scoped_release>());

    // -------------------------------------------------------------- shape --
    py::class_<DensityPair>(m, "DensityPair")
        .def(py::init([](double lam, double rho) {
                 return DensityPair{lam, rho};
             }),
             py::arg("lam"), py::arg("rho"))
        .def_readwrite("lam", &DensityPair::lambda)
        .def_readwrite("rho", &DensityPair::rho);

    py::enum_<ShapeRegime>(m, "ShapeRegime")
        .value("curved", ShapeRegime::curved)
        .value("left_linear", ShapeRegime::left_linear)
        .value("right_linear", ShapeRegime::right_linear);

    py::class_<ShapeValue>(m, "ShapeValue")
        .def_readonly("p", &ShapeValue::p)
        .def_readonly("p1", &ShapeValue::p1)
        .def_readonly("p2", &ShapeValue::p2)
        .def_readonly("regime", &ShapeValue::regime);

    py::class_<DirectionPrediction>(m, "DirectionPrediction")
        .def_readonly("deterministic", &DirectionPrediction::deterministic)
        .def_readonly("tan_theta", &DirectionPrediction::tan_theta)
        .def_readonly("tan_lo", &DirectionPrediction::tan_lo)
        .def_readonly("tan_hi", &DirectionPrediction::tan_hi)
        .def_readonly("u_lo", &DirectionPrediction::u_lo)
        .def_readonly("u_hi", &DirectionPrediction::u_hi);

    py::class_<CltMoments>(m, "CltMoments")
        .def_readonly("mean_i_rate", &CltMoments::mean_i_rate)
        .def_readonly("mean_j_rate", &CltMoments::mean_j_rate)
        .def_readonly("var_i_rate", &CltMoments::var_i_rate)
        .def_readonly("var_j_rate", &CltMoments::var_j_rate)
        .def_readonly("cov_rate", &CltMoments::cov_rate)
        .def_readonly("divergent", &CltMoments::divergent);

    m.def("mu_shape", &mu_shape, py::arg("x"), py::arg("y"),
          "limit of g(Nx, Ny)/N for the packed-corner staircase");
    m.def("d_lambda", &d_lambda);
    m.def("d_rho", &d_rho);
    m.def("w_star", &w_star,
          "deterministic interface slope when lam <= rho");
    m.def("shape_p", &shape_p, py::arg("densities"), py::arg("x"),
          py::arg("y"));
    m.def("direction_prediction", &direction_prediction);
    m.def("u_from_tan", &u_from_tan);
    m.def("tan_from_u", &tan_from_u);
    m.def("i_coord", &i_coord);
    m.def("j_coord", &j_coord);
    m.def("clt_moments", &clt_moments);

    // -------------------------------------------------------------- stats --
    py::class_<KsResult>(m, "KsResult")
        .def_readonly("d", &KsResult::d)
        .def_readonly("p", &KsResult::p)
        .def_readonly("n", &KsResult::n)
        .def_readonly("out_of_support", &KsResult::out_of_support);

    py::class_<ExponentFit>(m, "ExponentFit")
        .def_readonly("slope", &ExponentFit::slope)
        .def_readonly("intercept", &ExponentFit::intercept)
        .def_readonly("boot_lo", &ExponentFit::boot_lo)
        .def_readonly("boot_hi", &ExponentFit::boot_hi)
        .def_readonly("medians", &ExponentFit::medians);

    m.def("median", &median);
    m.def("ks_uniform_test", &ks_uniform_test, py::arg("xs"), py::arg("lo"),
          py::arg("hi"), py::arg("tol") = 1e-9);
    m.def("ks_two_sample", &ks_two_sample, py::arg("a"), py::arg("b"));
    m.def("ks_cdf_test", &ks_cdf_test, py::arg("xs"), py::arg("cdf"));
    m.def("fluctuation_exponent", &fluctuation_exponent, py::arg("radii"),
          py::arg("deviations"), py::arg("boot_stream"),
          py::arg("boot_rounds") = 1000,
          "log-log slope of per-radius median deviations with a replica "
          "bootstrap");

    // -------------------------------------------------------------- tasep --
    py::class_<TasepState>(m, "TasepState")
        .def_readonly("window", &TasepState::window)
        .def_readonly("sites", &TasepState::sites)
        .def_readonly("tag_pos", &TasepState::tag_pos)
        .def("at", &TasepState::at)
        .def("set", &TasepState::set);

    py::class_<TasepEvent>(m, "TasepEvent")
        .def_readonly("time", &TasepEvent::time)
        .def_readonly("site", &TasepEvent::site);

    py::class_<HarrisResult>(m, "HarrisResult")
        .def_readonly("state", &HarrisResult::state)
        .def_readonly("tag_samples", &HarrisResult::tag_samples)
        .def_readonly("events", &HarrisResult::events)
        .def_readonly("rings", &HarrisResult::rings);

    m.def("make_empty_state", &make_empty_state, py::arg("window"));
    m.def("nu_second_class_state", &nu_second_class_state, py::arg("lam"),
          py::arg("rho"), py::arg("window"), py::arg("stream"));
    m.def("state_from_profile", &state_from_profile, py::arg("profile"),
          py::arg("window"));
    m.def("harris_margin", &harris_margin, py::arg("t_max"));
    m.def(
        "harris_simulate",
        [](const TasepState& init, double t_max,
           const std::vector<double>& sample_times, bool log_events,
           RngStream stream) {
            HarrisOptions opt;
            opt.t_max = t_max;
            opt.sample_times = sample_times;
            opt.log_events = log_events;
            TasepState st = init;
            py::gil_scoped_release release;
            return harris_simulate(std::move(st), opt, stream);
        },
        py::arg("init"), py::arg("t_max"),
        py::arg("sample_times") = std::vector<double>{},
        py::arg("log_events") = false, py::arg("stream"),
        "graphical-construction run over the frozen-edge window");

    // ----------------------------------------------------------- coupling --
    py::class_<LabeledEvent>(m, "LabeledEvent")
        .def_readonly("time", &LabeledEvent::time)
        .def_readonly("hole", &LabeledEvent::hole)
        .def_readonly("particle", &LabeledEvent::particle);

    py::class_<GrowthExclusion>(m, "GrowthExclusion")
        .def(py::init<const GrowthTable&, size_t>(), py::arg("table"),
             py::arg("max_bytes") = size_t(3) << 30)
        .def("hole_lo", &GrowthExclusion::hole_lo)
        .def("particle_lo", &GrowthExclusion::particle_lo)
        .def("top", &GrowthExclusion::top)
        .def("hole_start", &GrowthExclusion::hole_start)
        .def("particle_start", &GrowthExclusion::particle_start)
        .def("hole_complete_until", &GrowthExclusion::hole_complete_until)
        .def("particle_complete_until",
             &GrowthExclusion::particle_complete_until)
        .def("events", &GrowthExclusion::events,
             py::return_value_policy::reference_internal)
        .def("advance_to", &GrowthExclusion::advance_to,
             py::call_guard<py::gil_scoped_release>())
        .def("advance_all", &GrowthExclusion::advance_all,
             py::call_guard<py::gil_scoped_release>())
        .def("time", &GrowthExclusion::time)
        .def("hole_pos", &GrowthExclusion::hole_pos)
        .def("particle_pos", &GrowthExclusion::particle_pos)
        .def("config", &GrowthExclusion::config, py::arg("lo"), py::arg("hi"))
        .def("particle_flux", &GrowthExclusion::particle_flux)
        .def("hole_flux", &GrowthExclusion::hole_flux)
        .def("path", &GrowthExclusion::path,
             py::return_value_policy::reference_internal)
        .def("pair_horizon", &GrowthExclusion::pair_horizon)
        .def("tag_position", &GrowthExclusion::tag_position)
        .def("verified_path_events", &GrowthExclusion::verified_path_events);

    // --------------------------------------------------------- experiment --
    py::enum_<Experiment>(m, "Experiment")
        .value("shape", Experiment::shape)
        .value("direction", Experiment::direction)
        .value("udist", Experiment::udist)
        .value("clt", Experiment::clt)
        .value("fluct", Experiment::fluct)
        .value("coupling", Experiment::coupling)
        .value("duality", Experiment::duality)
        .value("tasep", Experiment::tasep);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("experiment", &ExperimentConfig::experiment)
        .def_readwrite("lam", &ExperimentConfig::lambda)
        .def_readwrite("rho", &ExperimentConfig::rho)
        .def_readwrite("n", &ExperimentConfig::n)
        .def_readwrite("t", &ExperimentConfig::t)
        .def_readwrite("replicas", &ExperimentConfig::replicas)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("threads", &ExperimentConfig::threads)
        .def_readwrite("out", &ExperimentConfig::out)
        .def_readwrite("format", &ExperimentConfig::format)
        .def_readwrite("resume", &ExperimentConfig::resume);

    py::class_<Verdict>(m, "Verdict")
        .def_readonly("name", &Verdict::name)
        .def_readonly("pass_", &Verdict::pass)
        .def_readonly("observed", &Verdict::observed)
        .def_readonly("lo", &Verdict::lo)
        .def_readonly("hi", &Verdict::hi)
        .def_readonly("note", &Verdict::note)
        .def("__repr__", [](const Verdict& v) {
            return "<Verdict " + v.name + (v.pass ? " pass" : " FAIL") + ">";
        });

    py::class_<RunReport>(m, "RunReport")
        .def_readonly("config", &RunReport::config)
        .def_readonly("verdicts", &RunReport::verdicts)
        .def_readonly("all_pass", &RunReport::all_pass)
        .def_readonly("replicas_completed", &RunReport::replicas_completed)
        .def_readonly("replicas_retried", &RunReport::replicas_retried)
        .def_readonly("replicas_failed", &RunReport::replicas_failed)
        .def_readonly("rows_path", &RunReport::rows_path)
        .def_readonly("report_path", &RunReport::report_path)
        .def_readonly("wall_seconds", &RunReport::wall_seconds);

    m.def("experiment_name", &experiment_name);
    m.def("experiment_from_name", &experiment_from_name);
    m.def("run_experiment", &run_experiment, py::arg("config"),
          py::call_guard<py::gil_scoped_release>(),
          "run replicas, write rows + report artifacts, return the verdicts");
}
