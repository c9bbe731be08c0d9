// Python bindings for the core analysis and the harness commands.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpurify/commands.hpp"
#include "qpurify/config.hpp"
#include "qpurify/control.hpp"
#include "qpurify/error.hpp"
#include "qpurify/liouville.hpp"
#include "qpurify/model.hpp"
#include "qpurify/reduced.hpp"

namespace py = pybind11;
using namespace qpurify;

namespace {

py::object cell_to_py(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return py::float_(*d);
    if (const auto* i = std::get_if<long long>(&c)) return py::int_(*i);
    return py::str(std::get<std::string>(c));
}

py::dict report_to_dict(const Report& r) {
    py::dict out;
    out["command"] = r.command;
    py::dict cfg;
    for (const auto& [k, v] : r.config) cfg[py::str(k)] = v;
    out["config"] = cfg;
    py::dict meta;
    for (const auto& [k, v] : r.metadata) meta[py::str(k)] = cell_to_py(v);
    out["metadata"] = meta;
    out["columns"] = r.columns;
    py::list rows;
    for (const auto& row : r.rows) {
        py::list pr;
        for (const auto& c : row) pr.append(cell_to_py(c));
        rows.append(pr);
    }
    out["rows"] = rows;
    out["exit_code"] = r.exit_code;
    return out;
}

template <std::size_t N>
py::dict trajectory_to_dict(const Trajectory<N>& tr) {
    py::dict out;
    out["t"] = tr.times;
    std::vector<std::vector<double>> states;
    for (const auto& s : tr.states) states.emplace_back(s.begin(), s.end());
    out["states"] = states;
    py::list events;
    for (const auto& e : tr.events) {
        py::dict d;
        d["t"] = e.t;
        d["kind"] = e.kind;
        events.append(d);
    }
    out["events"] = events;
    return out;
}

InitialStateSpec make_spec(double mu_q, double nu_q, std::complex<double> xi) { return {mu_q, nu_q, xi}; }

AnalysisOptions make_options(double horizon, double abs_tol, double rel_tol) {
    AnalysisOptions o;
    o.horizon_multiple = horizon;
    o.tol.abs_tol = abs_tol;
    o.tol.rel_tol = rel_tol;
    return o;
}

} // namespace

PYBIND11_MODULE(_qpurify, m) {
    m.doc() = "Time-optimal purification of a qubit coupled to a dissipative two-level system";

    static py::exception<Error> error(m, "QpurifyError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string msg = std::string(to_string(e.code())) + ": " + e.what() +
                                    (e.parameter().empty() ? "" : " [" + e.parameter() + "]");
            py::set_error(error, msg.c_str());
        }
    });

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double omega_q, double omega_tls, double beta, double J, double kappa) {
                 return ModelParams(ModelParams::Inputs{omega_q, omega_tls, beta, J, kappa});
             }),
             py::arg("omega_q") = 1.0, py::arg("omega_tls") = 3.0, py::arg("beta") = 1.0, py::arg("J") = 0.1,
             py::arg("kappa") = 0.05)
        .def_property_readonly("omega_q", &ModelParams::omega_q)
        .def_property_readonly("omega_tls", &ModelParams::omega_tls)
        .def_property_readonly("beta", &ModelParams::beta)
        .def_property_readonly("J", &ModelParams::J)
        .def_property_readonly("kappa", &ModelParams::kappa)
        .def_property_readonly("gamma", &ModelParams::gamma)
        .def_property_readonly("gamma1", &ModelParams::gamma1)
        .def_property_readonly("gamma2", &ModelParams::gamma2)
        .def_property_readonly("eta", &ModelParams::eta)
        .def_property_readonly("T0", &ModelParams::T0)
        .def_property_readonly("J_min", &ModelParams::J_min)
        .def("with_J", &ModelParams::with_J)
        .def("with_beta", &ModelParams::with_beta)
        .def("with_kappa", &ModelParams::with_kappa)
        .def("with_gamma", &ModelParams::with_gamma);

    m.def("xi_max", py::overload_cast<const ModelParams&>(&xi_max), py::arg("params"));
    m.def("mu_max", &mu_max, py::arg("xi"), py::arg("params"));
    m.def(
        "min_eigenvalue",
        [](const ModelParams& p, double mu_q, double nu_q, std::complex<double> xi) {
            return min_eigenvalue(build_initial_state(make_spec(mu_q, nu_q, xi), p, 1.0));
        },
        py::arg("params"), py::arg("mu_q") = 0.0, py::arg("nu_q") = 0.0, py::arg("xi") = 0.0);

    m.def("t_min_uncorrelated", &t_min_uncorrelated, py::arg("J"), py::arg("gamma"));
    m.def(
        "t_min_numeric",
        [](const ModelParams& p, std::complex<double> xi, double mu_q, double horizon, double abs_tol,
           double rel_tol) {
            const PurificationRun run = t_min_numeric(p, xi, make_options(horizon, abs_tol, rel_tol), mu_q);
            py::dict d;
            d["t_min"] = run.t_min ? py::cast(*run.t_min) : py::none();
            d["stop"] = std::string(to_string(run.stop));
            d["t_stop"] = run.t_stop;
            d["theta_dot_stop"] = run.theta_dot_stop;
            d["purity_stop"] = run.purity_stop;
            d["horizon"] = run.horizon;
            return d;
        },
        py::arg("params"), py::arg("xi") = 0.0, py::arg("mu_q") = 0.0, py::arg("horizon") = 20.0,
        py::arg("abs_tol") = 1e-10, py::arg("rel_tol") = 1e-10);
    m.def("regime", [](double J, double gamma) { return std::string(to_string(classify_regime(J, gamma))); },
          py::arg("J"), py::arg("gamma"));
    m.def(
        "region",
        [](const ModelParams& p, double xi, double horizon) -> py::object {
            const RegionResult r = classify_region(p, xi, make_options(horizon, 1e-10, 1e-10));
            if (!r.region) return py::none();
            return py::str(std::string(to_string(*r.region)));
        },
        py::arg("params"), py::arg("xi"), py::arg("horizon") = 20.0);
    m.def(
        "xi_fixed",
        [](const ModelParams& p) {
            const XiFixed x = xi_fixed(p);
            py::dict d;
            d["xi"] = x.xi;
            d["saturated"] = x.saturated;
            d["residual"] = x.residual;
            d["closed_form"] = x.closed_form ? py::cast(*x.closed_form) : py::none();
            return d;
        },
        py::arg("params"));
    m.def(
        "delta_p",
        [](const ModelParams& p, double xi, double mu_q, double horizon) {
            return delta_p(p, xi, mu_q, make_options(horizon, 1e-10, 1e-10));
        },
        py::arg("params"), py::arg("xi"), py::arg("mu_q"), py::arg("horizon") = 20.0);
    m.def("s2_resonant_solution", &s2_resonant_solution, py::arg("t"), py::arg("mu_q"), py::arg("J"),
          py::arg("gamma"));

    m.def(
        "propagate_reduced",
        [](const ModelParams& p, double t_end, double mu_q, double nu_q, std::complex<double> xi,
           std::vector<double> samples, bool stop_at_north_pole) {
            PropagationOptions po;
            po.sample_times = std::move(samples);
            po.stop_at_north_pole = stop_at_north_pole;
            const ZVector z0 = initial_z(make_spec(mu_q, nu_q, xi), p, false);
            return trajectory_to_dict(propagate_reduced(z0, ControlLaw::resonant(), p, 0.0, t_end, po));
        },
        py::arg("params"), py::arg("t_end"), py::arg("mu_q") = 0.0, py::arg("nu_q") = 0.0, py::arg("xi") = 0.0,
        py::arg("samples") = std::vector<double>{}, py::arg("stop_at_north_pole") = false);
    m.def(
        "propagate_full",
        [](const ModelParams& p, double t_end, double mu_q, double nu_q, std::complex<double> xi,
           std::vector<double> samples) {
            PropagationOptions po;
            po.sample_times = std::move(samples);
            const DensityState x0 = build_initial_state(make_spec(mu_q, nu_q, xi), p);
            return trajectory_to_dict(propagate_full(x0, ControlLaw::resonant(), p, 0.0, t_end, po));
        },
        py::arg("params"), py::arg("t_end"), py::arg("mu_q") = 0.0, py::arg("nu_q") = 0.0, py::arg("xi") = 0.0,
        py::arg("samples") = std::vector<double>{});
    m.def("x_to_z", [](const std::array<double, 16>& x) { return x_to_z(XVector(x)); }, py::arg("x"));

    m.def(
        "run",
        [](const std::string& command, const std::map<std::string, std::string>& settings) {
            RunConfig cfg;
            for (const auto& [k, v] : settings) {
                if (k == "workers") cfg.workers = static_cast<unsigned>(std::stoul(v));
                else if (k == "frame") {
                    if (v != "lab" && v != "rwa") throw Error(ErrorCode::Config, "frame must be rwa or lab", "frame");
                    cfg.frame = v == "lab" ? Frame::Lab : Frame::Rwa;
                }
                else if (k == "inject_fault") cfg.inject_fault = v;
                else apply_setting(cfg, k, v);
            }
            Report r;
            {
                py::gil_scoped_release release;
                r = run_command(command, cfg);
            }
            return report_to_dict(r);
        },
        py::arg("command"), py::arg("settings") = std::map<std::string, std::string>{});
    m.attr("commands") = command_names();
}
