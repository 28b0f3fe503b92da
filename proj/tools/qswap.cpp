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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qswap/fits.hpp"
#include "qswap/io.hpp"
#include "qswap/mitigation.hpp"
#include "qswap/noise.hpp"
#include "qswap/ramsey.hpp"
#include "qswap/readout.hpp"

using nlohmann::json;
using namespace qswap;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitFailure = 3;

struct Globals {
  std::string device;
  std::string backend = "exact";
  long shots = 15000;
  std::uint64_t seed = 1;
  std::string mitigate;
  bool json = false;
  std::string out_dir = ".";
  int threads = 1;
};

DeviceConfig device_or_default(const Globals& g) {
  return g.device.empty() ? DeviceConfig{} : load_device_config(g.device);
}

std::string out_path(const Globals& g, const std::string& name) {
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / name).string();
}

void emit(const Globals& g, const json& j, const std::string& text) {
  if (g.json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << text;
  }
}

int cmd_verify(const Globals& g, double perturb) {
  const DecompositionReport r = verify_swap_decomposition(perturb);
  json j = json::array();
  std::ostringstream os;
  for (const auto& c : r.checks) {
    j.push_back({{"identity", c.name}, {"max_deviation", c.max_deviation}, {"passed", c.passed}});
    char line[160];
    std::snprintf(line, sizeof line, "%-34s %.3e  %s\n", c.name.c_str(), c.max_deviation, c.passed ? "ok" : "FAILED");
    os << line;
  }
  emit(g, {{"checks", j}, {"tolerance", r.tolerance}, {"passed", r.all_passed()}}, os.str());
  return r.all_passed() ? 0 : kExitFailure;
}

int cmd_calibrate(const Globals& g, bool skip_frame) {
  const DeviceConfig cfg = device_or_default(g);
  CalibrationOptions opt;
  opt.amplitude = cfg.drive_amplitude_phi0;
  opt.dt = cfg.dt_s;
  opt.threads = g.threads;
  ISwapCalibration is;
  CZCalibration cz;
  try {
    is = calibrate_iswap(cfg.params, opt);
    cz = calibrate_cz(cfg.params, opt);
  } catch (const CalibrationError& e) {
    const std::string path = out_path(g, "calibration_sweep.csv");
    write_text_file(path, sweep_map_to_csv(e.map()));
    std::cerr << "calibration failed: " << e.what() << " (sweep map in " << path << ")\n";
    return kExitFailure;
  }

  double f2qf = dressed_swap_frequency(cfg.params);
  if (!skip_frame) {
    std::vector<double> freqs, delays;
    for (int k = -3; k <= 3; ++k) freqs.push_back(is.frequency_hz + 0.4e6 * k);
    for (int k = 0; k < 24; ++k) delays.push_back(100e-9 * k);
    f2qf = measure_two_qubit_frame(cfg.params, is, freqs, delays, cfg.dt_s).frequency_hz;
  }
  CalibrationRecord rec = make_record(cz, is, f2qf);

  PulseBackend pulse(cfg.params, rec.pulse, cfg.dt_s);
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k) grid.push_back(-kPi + kTwoPi * k / 40.0);
  std::array<double, 2> swap{};
  for (int site = 0; site < 2; ++site) swap[site] = tune_swap_local_phase(pulse, site, grid, SwapForm::SDaggerShort).phase;
  rec.swap_phases = swap;

  const std::string path = out_path(g, "calibration.json");
  write_text_file(path, record_to_json(rec));
  std::ostringstream os;
  os.precision(6);
  os << "CZ     f = " << cz.frequency_hz / 1e6 << " MHz  tau = " << cz.duration * 1e9 << " ns  delta_f = "
     << cz.detuning_hz / 1e6 << " MHz  F = " << cz.fidelity << "\n"
     << "iSWAP  f = " << is.frequency_hz / 1e6 << " MHz  tau = " << is.duration * 1e9 << " ns  delta_f = "
     << is.detuning_hz / 1e6 << " MHz  F = " << is.fidelity << "\n"
     << "f_2qf = " << f2qf / 1e6 << " MHz   SWAP phases = " << swap[0] << ", " << swap[1] << " rad\n"
     << "record written to " << path << "\n";
  emit(g, json::parse(record_to_json(rec)), os.str());
  return 0;
}

GateKind ramsey_gate(const std::string& name) {
  if (name == "cz" || name == "CZ") return GateKind::CZ;
  if (name == "iswap" || name == "iSWAP") return GateKind::iSWAP;
  if (name == "swap" || name == "SWAP") return GateKind::SWAP;
  throw ValidationError("ramsey: gate must be cz, iswap or swap");
}

std::shared_ptr<const Backend> make_backend(const Globals& g, const DeviceConfig& cfg,
                                            const std::optional<CalibrationRecord>& rec) {
  NoiseModel noise;
  noise.t1 = {cfg.params.t1_s[0], cfg.params.t1_s[1]};
  noise.t2 = {cfg.params.t2star_s[0], cfg.params.t2star_s[1]};
  if (g.backend == "exact") return std::make_shared<ExactBackend>();
  if (g.backend == "noisy") return std::make_shared<NoisyBackend>(noise);
  if (g.backend == "pulse") {
    if (!rec) throw ValidationError("ramsey: the pulse backend needs --calibration");
    return std::make_shared<PulseBackend>(cfg.params, rec->pulse, cfg.dt_s);
  }
  if (g.backend == "shots") {
    const ConfusionMatrix t = build_joint_confusion(default_readout(0), default_readout(1), 25000, g.seed);
    return std::make_shared<ShotBackend>(std::make_shared<NoisyBackend>(noise), g.shots, g.seed, t.probs);
  }
  throw ValidationError("unknown backend '" + g.backend + "'");
}

int cmd_ramsey(const Globals& g, const std::string& gate_name_in, const std::string& calibration, int points) {
  const GateKind gate = ramsey_gate(gate_name_in);
  const DeviceConfig cfg = device_or_default(g);
  std::optional<CalibrationRecord> rec;
  if (!calibration.empty()) rec = record_from_json(read_text_file(calibration));
  std::optional<ConfusionMatrix> t;
  if (!g.mitigate.empty()) t = confusion_from_csv(read_text_file(g.mitigate));
  if (t && t->dim() != 9) throw ValidationError("ramsey: --mitigate needs a 9x9 confusion matrix");
  const auto backend = make_backend(g, cfg, rec);

  const int n = points > 0 ? points : (gate == GateKind::CZ ? 32 : 16);
  std::vector<double> phis;
  for (int i = 0; i < n; ++i) phis.push_back(kTwoPi * i / n);
  const Experiment e = gate == GateKind::CZ ? Experiment::Conditional : Experiment::Cross;
  SwapSpec spec;
  if (gate == GateKind::SWAP && g.backend == "pulse" && rec && rec->swap_phases) spec.post_cz_phases = rec->swap_phases;

  ExactBackend exact;
  json rows = json::array();
  std::ostringstream os;
  os << "pair   state  swing    d_offset  d_phase[mrad]  mse\n";
  for (Roles roles : {Roles{0, 1}, Roles{1, 0}}) {
    for (Prep prep : {Prep::Zero, Prep::One}) {
      RamseyTrace tr = sweep(e, gate, prep, phis, *backend, roles, spec, g.threads);
      const std::string stem = "ramsey_" + std::string(gate_name(gate)) + "_q" + std::to_string(roles.control + 1) +
                               "q" + std::to_string(roles.target + 1) + "_prep" + (prep == Prep::One ? "1" : "0");
      write_text_file(out_path(g, stem + ".csv"), trace_to_csv(tr));
      if (t) {
        tr = mitigate_trace(tr, t->probs, {}, g.threads).trace;
        write_text_file(out_path(g, stem + "_mitigated.csv"), "# mitigated with T = " + g.mitigate + "\n" + trace_to_csv(tr));
      }
      const RamseyTrace ideal = sweep(e, gate, prep, phis, exact, roles, spec);
      const int state = tr.tracked[prep == Prep::One ? 1 : 0];
      const RamseyFit f = fit_trace(phis, tr.series(state), ideal.series(state));
      const std::string pair = "q" + std::to_string(roles.control + 1) + ",q" + std::to_string(roles.target + 1);
      rows.push_back({{"gate", gate_name(gate)},
                      {"qc_qt", pair},
                      {"state", two_qutrit_label(state)},
                      {"swing", f.swing},
                      {"swing_err", f.err_swing},
                      {"delta_offset", f.delta_offset},
                      {"delta_offset_err", f.err_offset},
                      {"delta_phase_mrad", 1e3 * f.delta_phase},
                      {"delta_phase_err_mrad", 1e3 * f.err_phase},
                      {"mse", f.mse}});
      char line[160];
      std::snprintf(line, sizeof line, "%-6s |%s>   %.4f  %+.4f   %+9.1f     %.5f\n", pair.c_str(),
                    two_qutrit_label(state).c_str(), f.swing, f.delta_offset, 1e3 * f.delta_phase, f.mse);
      os << line;
    }
  }
  json out = {{"backend", backend->name()}, {"shots", backend->shots()}, {"mitigated", t.has_value()}, {"fits", rows}};
  write_text_file(out_path(g, "ramsey_" + std::string(gate_name(gate)) + "_fits.json"), out.dump(2) + "\n");
  emit(g, out, os.str());
  return 0;
}

int cmd_fidelity(const Globals& g) {
  const DeviceConfig cfg = device_or_default(g);
  const std::vector<double> t1{cfg.params.t1_s[0], cfg.params.t1_s[1]};
  struct Row {
    const char* name;
    double tau;
    std::vector<double> t1s;
  };
  const std::vector<Row> rows{{"1QB", cfg.tau_1qb_s, {t1[0]}},
                              {"CZ", cfg.tau_cz_s, t1},
                              {"iSWAP", cfg.tau_iswap_s, t1},
                              {"SWAP", cfg.tau_swap_circuit_s, t1}};
  json j = json::array();
  std::ostringstream os;
  os.precision(5);
  for (const auto& r : rows) {
    const double f = coherence_limited_fidelity(r.tau, r.t1s);
    const double fd = damping_process_fidelity(r.tau, r.t1s);
    j.push_back({{"gate", r.name}, {"duration_s", r.tau}, {"fidelity", f}, {"density_matrix_fidelity", fd}});
    os << r.name << "\t" << r.tau * 1e9 << " ns\tF = " << 100 * f << " %\t(density matrix " << 100 * fd << " %)\n";
  }
  const double three_cz = 3 * cfg.tau_cz_s;
  os << "SWAP circuit " << cfg.tau_swap_circuit_s * 1e6 << " us vs three CZ " << three_cz * 1e6 << " us\n";
  emit(g, {{"gates", j}, {"swap_circuit_s", cfg.tau_swap_circuit_s}, {"three_cz_s", three_cz}}, os.str());
  return 0;
}

int cmd_confusion(const Globals& g) {
  if (g.shots < 100) throw ValidationError("confusion: need at least 100 shots per state");
  const QubitReadout r1 = default_readout(0), r2 = default_readout(1);
  const ConfusionMatrix c1 = build_confusion(r1, g.shots, g.seed);
  const ConfusionMatrix c2 = build_confusion(r2, g.shots, g.seed + 1);
  const ConfusionMatrix cj = build_joint_confusion(r1, r2, g.shots, g.seed);
  write_text_file(out_path(g, "confusion_q1.csv"), confusion_to_csv(c1));
  write_text_file(out_path(g, "confusion_q2.csv"), confusion_to_csv(c2));
  write_text_file(out_path(g, "confusion_joint.csv"), confusion_to_csv(cj));
  const auto f1 = assignment_fidelity(c1), f2 = assignment_fidelity(c2);
  const auto diff = confusion_difference(cj, c1, c2);
  json top = json::array();
  std::ostringstream os;
  os.precision(4);
  os << "F_assign Q1 = " << f1.fidelity << " +/- " << f1.sem << "\nF_assign Q2 = " << f2.fidelity << " +/- " << f2.sem
     << "\nlargest joint - product deviations:\n";
  for (const auto& d : diff.largest) {
    top.push_back({{"prepared", two_qutrit_label(d.prepared)}, {"measured", two_qutrit_label(d.measured)}, {"value", d.value}});
    os << "  " << two_qutrit_label(d.prepared) << " -> " << two_qutrit_label(d.measured) << "  " << d.value << '\n';
  }
  emit(g,
       {{"fidelity_q1", f1.fidelity}, {"sem_q1", f1.sem}, {"fidelity_q2", f2.fidelity}, {"sem_q2", f2.sem},
        {"shots", g.shots}, {"largest_deviations", top}},
       os.str());
  return 0;
}

int cmd_mitigate(const Globals& g, const std::string& trace_file, bool literal, bool normalize) {
  if (g.mitigate.empty()) throw ValidationError("mitigate: --mitigate TFILE is required");
  const ConfusionMatrix t = confusion_from_csv(read_text_file(g.mitigate));
  const RamseyTrace tr = trace_from_csv(read_text_file(trace_file));
  MitigationOptions o;
  o.orientation = literal ? Orientation::Literal : Orientation::Transposed;
  o.normalize = normalize;
  const MitigatedTrace m = mitigate_trace(tr, t.probs, o, g.threads);
  const std::string path =
      out_path(g, std::filesystem::path(trace_file).stem().string() + "_mitigated.csv");
  write_text_file(path, "# mitigated with T = " + g.mitigate + "\n" + trace_to_csv(m.trace));
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
  std::ostringstream os;
  os << "mitigated " << m.trace.phi.size() << " points, max residual " << m.max_residual << ", written to " << path
     << '\n';
  emit(g, {{"points", m.trace.phi.size()}, {"max_residual", m.max_residual}, {"output", path}, {"warnings", m.warnings}},
       os.str());
  return 0;
}

std::vector<std::vector<double>> read_columns(const std::string& path, std::size_t columns) {
  std::istringstream is(read_text_file(path));
  std::string line;
  std::vector<std::vector<double>> out(columns);
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns) throw ValidationError("'" + path + "': expected " + std::to_string(columns) + " columns");
    try {
      std::vector<double> v;
      for (const auto& c : cells) v.push_back(std::stod(c));
      for (std::size_t k = 0; k < columns; ++k) out[k].push_back(v[k]);
    } catch (const std::invalid_argument&) {
      if (!out[0].empty()) throw ValidationError("'" + path + "': non-numeric row");  // header rows only at the top
    }
  }
  return out;
}

int cmd_fit(const Globals& g, const std::vector<std::string>& inputs, const std::string& model_name_in) {
  if (inputs.empty()) throw ValidationError("fit: need at least one --input CSV (t_s, signal)");
  const DecoherenceModel model = parse_model(model_name_in);
  std::ostringstream csv;
  csv.precision(10);
  csv << "file,model,A,T_s,f_hz,phi_rad,m,err_T_frac,accepted\n";
  json rows = json::array();
  for (const auto& in : inputs) {
    const auto cols = read_columns(in, 2);
    const DecoherenceFit f = fit_decoherence(cols[0], cols[1], model);
    csv << in << ',' << qswap::model_name(model) << ',' << f.A << ',' << f.T << ',' << f.f << ',' << f.phi << ',' << f.m
        << ',' << f.err_T_frac << ',' << (f.accepted ? 1 : 0) << '\n';
    rows.push_back({{"file", in}, {"model", qswap::model_name(model)}, {"A", f.A}, {"T_s", f.T}, {"f_hz", f.f},
                    {"phi_rad", f.phi}, {"m", f.m}, {"err_T_frac", f.err_T_frac}, {"accepted", f.accepted},
                    {"diagnostics", f.diagnostics}});
  }
  write_text_file(out_path(g, "fits.csv"), csv.str());
  emit(g, rows, csv.str());
  return 0;
}

int cmd_doane(const Globals& g, const std::string& input) {
  const auto cols = read_columns(input, 1);
  const int k = doane_bins(cols[0]);
  emit(g, {{"samples", cols[0].size()}, {"bins", k}},
       "N = " + std::to_string(cols[0].size()) + "  K = " + std::to_string(k) + "\n");
  return 0;
}

int cmd_commensurate(const Globals& g, double period, double lo) {
  const DeviceConfig cfg = device_or_default(g);
  const Commensurability c = check_commensurability(period, lo);
  const double p1 = residual_population(period, cfg.params.t1_s[0]);
  const double p2 = residual_population(period, cfg.params.t1_s[1]);
  std::ostringstream os;
  os.precision(6);
  os << "cycles = " << c.cycles << "  commensurate = " << (c.commensurate ? "yes" : "no")
     << "  residual phase = " << c.residual_phase << " rad\n"
     << "residual excited population: Q1 " << 100 * p1 << " %, Q2 " << 100 * p2 << " %\n";
  emit(g,
       {{"cycles", c.cycles}, {"commensurate", c.commensurate}, {"residual_phase_rad", c.residual_phase},
        {"residual_population", {p1, p2}}},
       os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gate-set compiler and device simulator for a CZ + iSWAP based SWAP"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--device", g.device, "Device parameter file (JSON)")->check(CLI::ExistingFile);
  app.add_option("--backend", g.backend, "exact | noisy | pulse | shots")
      ->check(CLI::IsMember({"exact", "noisy", "pulse", "shots"}));
  app.add_option("--shots", g.shots, "Shots per point / per prepared state");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--mitigate", g.mitigate, "9x9 confusion matrix CSV used for mitigation")->check(CLI::ExistingFile);
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--out-dir", g.out_dir, "Directory for written artifacts");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  double perturb = 0.0;
  auto* verify = app.add_subcommand("verify", "Check the SWAP decomposition identities");
  verify->add_option("--perturb", perturb, "Corrupt one entry of the composed SWAP (debugging)");

  bool skip_frame = false;
  auto* calibrate = app.add_subcommand("calibrate", "Pulse-level CZ / iSWAP tune-up");
  calibrate->add_flag("--skip-frame", skip_frame, "Use the dressed splitting instead of measuring f_2qf");

  std::string gate = "cz", calibration;
  int points = 0;
  auto* ramsey = app.add_subcommand("ramsey", "Conditional / cross-Ramsey experiments");
  ramsey->add_option("--gate", gate, "cz | iswap | swap");
  ramsey->add_option("--calibration", calibration, "Calibration record (pulse backend)")->check(CLI::ExistingFile);
  ramsey->add_option("--points", points, "Phase points per trace");

  app.add_subcommand("fidelity", "Coherence-limited fidelity budget");
  app.add_subcommand("confusion", "Simulated readout confusion matrices");

  std::string trace_file;
  bool literal = false, normalize = false;
  auto* mitigate = app.add_subcommand("mitigate", "Bounded least-squares SPAM mitigation of a trace");
  mitigate->add_option("--trace", trace_file, "Trace CSV")->required()->check(CLI::ExistingFile);
  mitigate->add_flag("--literal", literal, "Use y = T x instead of y = T^T x");
  mitigate->add_flag("--normalize", normalize, "Rescale each reconstructed vector to unit sum");

  std::vector<std::string> fit_inputs;
  std::string model = "T1";
  auto* fit = app.add_subcommand("fit", "Decoherence fits of (t_s, signal) CSV files");
  fit->add_option("--input", fit_inputs, "Input CSV")->check(CLI::ExistingFile);
  fit->add_option("--model", model, "T1 | T2star | T2echo");

  std::string doane_input;
  auto* doane = app.add_subcommand("doane", "Doane histogram bin count");
  doane->add_option("--input", doane_input, "One value per line")->required()->check(CLI::ExistingFile);

  double period = 400e-6, lo = 3.6e9;
  auto* comm = app.add_subcommand("commensurate", "Repetition period vs LO commensurability");
  comm->add_option("--period", period, "Repetition period (s)");
  comm->add_option("--lo", lo, "LO frequency (Hz)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*verify) return cmd_verify(g, perturb);
    if (*calibrate) return cmd_calibrate(g, skip_frame);
    if (*ramsey) return cmd_ramsey(g, gate, calibration, points);
    if (app.got_subcommand("fidelity")) return cmd_fidelity(g);
    if (app.got_subcommand("confusion")) return cmd_confusion(g);
    if (*mitigate) return cmd_mitigate(g, trace_file, literal, normalize);
    if (*fit) return cmd_fit(g, fit_inputs, model);
    if (*doane) return cmd_doane(g, doane_input);
    if (*comm) return cmd_commensurate(g, period, lo);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
