// Copyright 2026 The qswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qswap/dynamics.hpp"
#include "qswap/fits.hpp"
#include "qswap/gateset.hpp"
#include "qswap/mitigation.hpp"
#include "qswap/noise.hpp"
#include "qswap/ramsey.hpp"
#include "qswap/readout.hpp"

namespace py = pybind11;
using namespace qswap;

namespace {

std::shared_ptr<const Backend> make_backend(const std::string& kind, long shots, std::uint64_t seed,
                                            std::optional<RMatrix> confusion) {
  const DeviceParams p;
  NoiseModel noise{{p.t1_s[0], p.t1_s[1]}, {p.t2star_s[0], p.t2star_s[1]}};
  if (kind == "exact") return std::make_shared<ExactBackend>();
  if (kind == "noisy") return std::make_shared<NoisyBackend>(noise);
  if (kind == "shots") return std::make_shared<ShotBackend>(std::make_shared<NoisyBackend>(noise), shots, seed, confusion);
  throw ValidationError("backend must be exact, noisy or shots");
}

GateKind gate_of(const std::string& name) { return parse_gate(name); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gate-set compiler and device simulator core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  m.def("standard_gate", [](const std::string& name, std::optional<double> phase) {
    return standard_gate(gate_of(name), phase);
  }, py::arg("name"), py::arg("phase") = py::none());

  m.def("verify_swap_decomposition", [](double perturb) {
    py::list out;
    for (const auto& c : verify_swap_decomposition(perturb).checks) out.append(py::make_tuple(c.name, c.max_deviation, c.passed));
    return out;
  }, py::arg("perturb") = 0.0);

  m.def("compile_swap", [](bool hadamard) {
    return compose(compile_swap(0, 1, {2, 2}, hadamard ? SwapForm::Hadamard : SwapForm::SDaggerShort));
  }, py::arg("hadamard") = false, "4x4 unitary of the compiled SWAP circuit");

  m.def("coherence_limited_fidelity", &coherence_limited_fidelity, py::arg("tau"), py::arg("t1s"));
  m.def("damping_process_fidelity", &damping_process_fidelity, py::arg("tau"), py::arg("t1s"));
  m.def("dephasing_time", &dephasing_time, py::arg("t1"), py::arg("t2"));

  m.def("coupler_frequency", [](double phi) { return coupler_frequency(phi, DeviceParams{}); }, py::arg("phi"));
  m.def("dressed_swap_frequency", []() { return dressed_swap_frequency(DeviceParams{}); });
  m.def("check_commensurability", [](double period, double lo) {
    const auto c = check_commensurability(period, lo);
    return py::dict(py::arg("commensurate") = c.commensurate, py::arg("cycles") = c.cycles,
                    py::arg("residual_phase") = c.residual_phase);
  }, py::arg("period"), py::arg("lo"));
  m.def("residual_population", &residual_population, py::arg("period"), py::arg("t1"));

  m.def("reconstruct", [](const RVector& y, const RMatrix& t, bool literal, bool normalize) {
    MitigationOptions o;
    o.orientation = literal ? Orientation::Literal : Orientation::Transposed;
    o.normalize = normalize;
    const auto r = reconstruct(y, t, o);
    return py::dict(py::arg("x") = r.x, py::arg("objective") = r.objective, py::arg("residual") = r.residual,
                    py::arg("iterations") = r.iterations, py::arg("condition") = r.condition,
                    py::arg("warnings") = r.warnings);
  }, py::arg("y"), py::arg("t"), py::arg("literal") = false, py::arg("normalize") = false);

  m.def("joint_confusion", [](long shots, std::uint64_t seed) {
    return build_joint_confusion(default_readout(0), default_readout(1), shots, seed).probs;
  }, py::arg("shots") = 25000, py::arg("seed") = 1);
  m.def("assignment_fidelity", [](int qubit, long shots, std::uint64_t seed) {
    return assignment_fidelity(build_confusion(default_readout(qubit), shots, seed)).fidelity;
  }, py::arg("qubit"), py::arg("shots") = 100000, py::arg("seed") = 1);

  m.def("ramsey", [](const std::string& gate, int prep, const std::vector<double>& phi, const std::string& backend,
                     long shots, std::uint64_t seed, std::optional<RMatrix> confusion, int control) {
    const GateKind g = gate_of(gate);
    const Experiment e = g == GateKind::CZ ? Experiment::Conditional : Experiment::Cross;
    const Roles roles{control, 1 - control};
    const auto b = make_backend(backend, shots, seed, confusion);
    const RamseyTrace tr = sweep(e, g, prep ? Prep::One : Prep::Zero, phi, *b, roles);
    RMatrix pops(tr.phi.size(), 9);
    for (std::size_t k = 0; k < tr.phi.size(); ++k) pops.row(k) = tr.populations[k].transpose();
    return py::make_tuple(pops, tr.tracked[prep ? 1 : 0]);
  }, py::arg("gate"), py::arg("prep"), py::arg("phi"), py::arg("backend") = "exact", py::arg("shots") = 15000,
     py::arg("seed") = 1, py::arg("confusion") = py::none(), py::arg("control") = 0,
     "Populations (points x 9) and the tracked register index");

  m.def("fit_trace", [](const std::vector<double>& phi, const std::vector<double>& y, const std::vector<double>& ideal) {
    const auto f = fit_trace(phi, y, ideal);
    return py::dict(py::arg("swing") = f.swing, py::arg("delta_offset") = f.delta_offset,
                    py::arg("delta_phase") = f.delta_phase, py::arg("mse") = f.mse, py::arg("err_swing") = f.err_swing,
                    py::arg("err_offset") = f.err_offset, py::arg("err_phase") = f.err_phase);
  }, py::arg("phi"), py::arg("y"), py::arg("ideal"));

  m.def("fit_decoherence", [](const std::vector<double>& t, const std::vector<double>& y, const std::string& model) {
    const auto f = fit_decoherence(t, y, parse_model(model));
    return py::dict(py::arg("A") = f.A, py::arg("T") = f.T, py::arg("f") = f.f, py::arg("phi") = f.phi,
                    py::arg("m") = f.m, py::arg("err_T_frac") = f.err_T_frac, py::arg("accepted") = f.accepted,
                    py::arg("diagnostics") = f.diagnostics);
  }, py::arg("t"), py::arg("y"), py::arg("model") = "T1");
  m.def("doane_bins", &doane_bins, py::arg("samples"));
  m.def("propagate_frequency_error", &propagate_frequency_error, py::arg("coeffs"), py::arg("errors"));
  m.def("detuning_presets", []() {
    const auto d = detuning_presets({});
    return py::make_tuple(d.cz, d.iswap);
  });
}
