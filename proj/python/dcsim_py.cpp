// Copyright 2026 The dcsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dcsim/analysis.hpp"
#include "dcsim/cli.hpp"
#include "dcsim/dlm_pbs.hpp"
#include "dcsim/experiment.hpp"
#include "dcsim/io.hpp"
#include "dcsim/optics.hpp"

namespace py = pybind11;
using namespace dcsim;

namespace {

py::dict row_to_dict(const CountRow &row) {
    py::dict d;
    d["run_id"] = row.run_id;
    d["r"] = row.r;
    d["mode"] = to_string(row.mode);
    d["config"] = to_string(row.config);
    d["phi"] = row.phi;
    d["n"] = row.n;
    d["n_d0"] = row.n_d0;
    d["n_d1"] = row.n_d1;
    d["n_d0_path0"] = row.n_split[0][0];
    d["n_d0_path1"] = row.n_split[0][1];
    d["n_d1_path0"] = row.n_split[1][0];
    d["n_d1_path1"] = row.n_split[1][1];
    d["seed"] = row.seed;
    return d;
}

py::list rows_to_list(const CountTable &rows) {
    py::list out;
    for (const auto &row : rows) out.append(row_to_dict(row));
    return out;
}

Mode mode_from(const std::string &text) {
    auto m = parse_mode(text);
    if (!m) throw py::value_error("unknown mode '" + text + "'");
    return *m;
}

ExperimentConfig make_config(double r, const std::string &mode, std::uint64_t events, std::uint64_t seed,
                             double alpha, std::optional<std::vector<double>> phi_grid, double warmup) {
    ExperimentConfig cfg = default_config();
    cfg.r = r;
    cfg.mode = mode_from(mode);
    cfg.events_per_point = events;
    cfg.seed = seed;
    cfg.alpha = alpha;
    cfg.warmup_fraction = warmup;
    if (phi_grid) cfg.phi_grid = *phi_grid;
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Event-by-event delayed-choice interferometer simulator.";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<DegenerateState>(m, "DegenerateState", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<TopologyError>(m, "TopologyError", PyExc_RuntimeError);
    py::register_exception<InsufficientData>(m, "InsufficientData", PyExc_ValueError);

    py::class_<Message>(m, "Message")
        .def_property_readonly("components", [](const Message &msg) {
            auto c = msg.components();
            return py::make_tuple(c[0], c[1], c[2], c[3], c[4], c[5]);
        })
        .def("max_norm_error", &Message::max_norm_error)
        .def("__eq__", [](const Message &a, const Message &b) { return a == b; })
        .def("__repr__", [](const Message &msg) { return "Message(" + to_string(msg) + ")"; });

    m.def("make_message", &make_message, py::arg("psi_h"), py::arg("psi_v"), py::arg("xi"));
    m.def("to_jones", [](const Message &msg) {
        JonesPair j = to_jones(msg);
        return py::make_tuple(j.h, j.v);
    });
    m.def("from_jones", [](Complex h, Complex v) { return from_jones({h, v}); }, py::arg("h"), py::arg("v"));

    m.def("apply_hwp", &apply_hwp, py::arg("message"), py::arg("theta_fast"));
    m.def(
        "apply_eom",
        [](const Message &msg, double reflectivity, bool voltage_on) {
            return apply_eom(msg, {reflectivity, voltage_on});
        },
        py::arg("message"), py::arg("reflectivity"), py::arg("voltage_on"));
    m.def("apply_phase_shift", &apply_phase_shift, py::arg("message"), py::arg("phi"));
    m.def("reflectivity_from_voltage", &reflectivity_from_voltage, py::arg("v_eom"), py::arg("beta"),
          py::arg("v_pi"));

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::string>(), py::arg("seed"), py::arg("stream_id"))
        .def("uniform", &RngStream::uniform)
        .def("bernoulli", &RngStream::bernoulli, py::arg("p"));

    py::class_<DlmPbs>(m, "DlmPbs")
        .def_static("init", &DlmPbs::init, py::arg("alpha"), py::arg("rng"))
        .def_property_readonly("x", [](const DlmPbs &d) { return d.state().x; })
        .def_property_readonly("alpha", &DlmPbs::alpha)
        .def("update_internal", &DlmPbs::update_internal, py::arg("k"))
        .def("store_registers", &DlmPbs::store_registers, py::arg("k"), py::arg("message"))
        .def("transform", [](const DlmPbs &d) {
            AmplitudeQuad b = d.transform();
            return py::make_tuple(b.b0_h, b.b0_v, b.b1_h, b.b1_v);
        })
        .def("output_weights", [](const DlmPbs &d) {
            OutputWeights w = d.output_weights();
            return py::make_tuple(w.u_sq, w.v_sq);
        })
        .def("process", [](DlmPbs &d, int k, const Message &msg, RngStream &rng) {
            Emission e = d.process(k, msg, rng);
            return py::make_tuple(e.channel, e.message);
        }, py::arg("k"), py::arg("message"), py::arg("rng"))
        .def("__repr__", &DlmPbs::describe);

    m.def(
        "run_point",
        [](double r, double phi, const std::string &mode, std::uint64_t events, std::uint64_t seed,
           double alpha) {
            ExperimentConfig cfg = make_config(r, mode, events, seed, alpha, std::nullopt, 0.0);
            PointResult p = run_point(cfg, phi, 0);
            py::list records;
            for (const EventRecord &e : p.slice.records) records.append(py::make_tuple(e.x, e.y, e.a));
            py::dict out;
            out["rows"] = rows_to_list(p.rows);
            out["records"] = records;
            out["absorbed"] = p.absorbed;
            return out;
        },
        py::arg("r"), py::arg("phi"), py::arg("mode") = "delayed_choice", py::arg("events") = 10000,
        py::arg("seed") = 20080530, py::arg("alpha") = 0.99,
        "One phase point. Returns count rows, per-event (x, y, a) records and the absorbed count.");

    m.def(
        "run_phase_sweep",
        [](double r, const std::string &mode, std::uint64_t events, std::uint64_t seed, double alpha,
           std::optional<std::vector<double>> phi_grid) {
            return rows_to_list(run_phase_sweep(make_config(r, mode, events, seed, alpha, phi_grid, 0.0)).rows);
        },
        py::arg("r"), py::arg("mode") = "delayed_choice", py::arg("events") = 10000, py::arg("seed") = 20080530,
        py::arg("alpha") = 0.99, py::arg("phi_grid") = py::none());

    m.def(
        "run_distinguishability",
        [](double r, std::uint64_t events, std::uint64_t seed) {
            BlockedRuns b = run_distinguishability(make_config(r, "closed", events, seed, 0.99, std::nullopt, 0.0));
            Distinguishability d = distinguishability(b.arm0_blocked, b.arm1_blocked);
            py::dict out;
            out["arm0_blocked"] = row_to_dict(b.arm0_blocked);
            out["arm1_blocked"] = row_to_dict(b.arm1_blocked);
            out["d_hat"] = d.d_hat;
            out["d_err"] = d.d_err;
            return out;
        },
        py::arg("r"), py::arg("events") = 10000, py::arg("seed") = 20080530);

    m.def(
        "fit_visibility",
        [](const std::vector<std::tuple<double, std::uint64_t, std::uint64_t>> &points) {
            std::vector<FringePoint> pts;
            for (const auto &[phi, n, n0] : points) pts.push_back({phi, n, n0});
            FringeFit f = fit_visibility(pts);
            py::dict out;
            out["v_hat"] = f.v_hat;
            out["v_err"] = f.v_err;
            out["phase_offset"] = f.phase_offset;
            out["baseline"] = f.baseline;
            out["residual_rms"] = f.residual_rms;
            out["v_maxmin"] = f.v_maxmin;
            return out;
        },
        py::arg("points"), "Fit N0/N over (phi, n, n0) triples.");

    m.def("v_theory", &v_theory, py::arg("r"));
    m.def("d_theory", &d_theory, py::arg("r"));

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::ostringstream out, err;
            int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line front end in-process. Returns (exit_code, stdout, stderr).");
}
