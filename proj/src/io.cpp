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

#include "qswap/io.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

namespace qswap {

using nlohmann::json;

namespace {

using Fields = std::map<std::string, std::function<double&(DeviceConfig&)>>;

const Fields& device_fields() {
  static const Fields f = {
      {"f01_q1_hz", [](DeviceConfig& c) -> double& { return c.params.f01_hz[0]; }},
      {"f01_q2_hz", [](DeviceConfig& c) -> double& { return c.params.f01_hz[1]; }},
      {"eta_q1_hz", [](DeviceConfig& c) -> double& { return c.params.eta_hz[0]; }},
      {"eta_q2_hz", [](DeviceConfig& c) -> double& { return c.params.eta_hz[1]; }},
      {"f_c0_hz", [](DeviceConfig& c) -> double& { return c.params.f_c0_hz; }},
      {"eta_c_hz", [](DeviceConfig& c) -> double& { return c.params.eta_c_hz; }},
      {"g_q1c_hz", [](DeviceConfig& c) -> double& { return c.params.g_hz[0]; }},
      {"g_q2c_hz", [](DeviceConfig& c) -> double& { return c.params.g_hz[1]; }},
      {"phi_bias", [](DeviceConfig& c) -> double& { return c.params.phi_bias; }},
      {"t1_q1_s", [](DeviceConfig& c) -> double& { return c.params.t1_s[0]; }},
      {"t1_q2_s", [](DeviceConfig& c) -> double& { return c.params.t1_s[1]; }},
      {"t2star_q1_s", [](DeviceConfig& c) -> double& { return c.params.t2star_s[0]; }},
      {"t2star_q2_s", [](DeviceConfig& c) -> double& { return c.params.t2star_s[1]; }},
      {"t2echo_q1_s", [](DeviceConfig& c) -> double& { return c.params.t2echo_s[0]; }},
      {"t2echo_q2_s", [](DeviceConfig& c) -> double& { return c.params.t2echo_s[1]; }},
      {"tau_1qb_s", [](DeviceConfig& c) -> double& { return c.tau_1qb_s; }},
      {"tau_cz_s", [](DeviceConfig& c) -> double& { return c.tau_cz_s; }},
      {"tau_iswap_s", [](DeviceConfig& c) -> double& { return c.tau_iswap_s; }},
      {"tau_swap_circuit_s", [](DeviceConfig& c) -> double& { return c.tau_swap_circuit_s; }},
      {"drive_amplitude_phi0", [](DeviceConfig& c) -> double& { return c.drive_amplitude_phi0; }},
      {"dt_s", [](DeviceConfig& c) -> double& { return c.dt_s; }},
  };
  return f;
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + ": invalid JSON (" + e.what() + ")");
  }
}

double number(const json& j, const std::string& key, const char* what) {
  if (!j.contains(key)) throw ValidationError(std::string(what) + ": missing key '" + key + "'");
  if (!j.at(key).is_number()) throw ValidationError(std::string(what) + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::array<double, 2> pair(const json& j, const std::string& key, const char* what) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 2) {
    throw ValidationError(std::string(what) + ": '" + key + "' must be a two-element array");
  }
  std::array<double, 2> out{};
  for (int i = 0; i < 2; ++i) {
    if (!j.at(key)[i].is_number()) throw ValidationError(std::string(what) + ": '" + key + "' must hold numbers");
    out[i] = j.at(key)[i].get<double>();
  }
  return out;
}

json gate_json(const PulseGate& g) {
  return {{"frequency_hz", g.frequency_hz},
          {"duration_s", g.duration},
          {"amplitude_phi0", g.amplitude},
          {"drive_phase_rad", g.phase},
          {"phi_comp_rad", {g.phi_comp[0], g.phi_comp[1]}}};
}

PulseGate gate_from(const json& j, const char* what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + ": gate block must be an object");
  PulseGate g;
  g.frequency_hz = number(j, "frequency_hz", what);
  g.duration = number(j, "duration_s", what);
  g.amplitude = number(j, "amplitude_phi0", what);
  g.phase = number(j, "drive_phase_rad", what);
  g.phi_comp = pair(j, "phi_comp_rad", what);
  return g;
}

}  // namespace

DeviceConfig parse_device_config(const std::string& json_text) {
  const json j = parse(json_text, "device config");
  if (!j.is_object()) throw ValidationError("device config: top level must be an object");
  DeviceConfig c;
  const auto& fields = device_fields();
  for (const auto& [key, value] : j.items()) {
    if (key == "levels") {
      if (!value.is_number_integer()) throw ValidationError("device config: 'levels' must be an integer");
      c.params.levels = value.get<int>();
      continue;
    }
    auto it = fields.find(key);
    if (it == fields.end()) throw ValidationError("device config: unknown key '" + key + "'");
    if (!value.is_number()) throw ValidationError("device config: '" + key + "' must be a number");
    it->second(c) = value.get<double>();
  }
  c.params.validate();
  for (double tau : {c.tau_1qb_s, c.tau_cz_s, c.tau_iswap_s, c.tau_swap_circuit_s}) {
    if (!(tau > 0)) throw ValidationError("device config: gate durations must be positive");
  }
  if (!(c.dt_s > 0)) throw ValidationError("device config: dt_s must be positive");
  if (c.drive_amplitude_phi0 < 0) throw ValidationError("device config: drive amplitude must be >= 0");
  return c;
}

DeviceConfig load_device_config(const std::string& path) { return parse_device_config(read_text_file(path)); }

std::string device_config_to_json(const DeviceConfig& config) {
  DeviceConfig c = config;
  json j = json::object();
  for (const auto& [key, get] : device_fields()) j[key] = get(c);
  j["levels"] = c.params.levels;
  return j.dump(2) + "\n";
}

CalibrationRecord make_record(const CZCalibration& cz, const ISwapCalibration& iswap, double f_2qf) {
  CalibrationRecord r;
  r.pulse.cz = {cz.frequency_hz, cz.duration, cz.amplitude, 0.0, cz.phi_comp};
  r.pulse.iswap = {iswap.frequency_hz, iswap.duration, iswap.amplitude, 0.0, iswap.phi_comp};
  r.pulse.f_2qf = f_2qf;
  r.cz_detuning_hz = cz.detuning_hz;
  r.cz_fidelity = cz.fidelity;
  r.cz_return_population = cz.return_population;
  r.cz_conditional_phase = cz.conditional_phase;
  r.cz_leakage = cz.leakage;
  r.cz_max_leakage = cz.max_leakage;
  r.iswap_detuning_hz = iswap.detuning_hz;
  r.iswap_fidelity = iswap.fidelity;
  r.iswap_transfer = iswap.transfer;
  r.iswap_coupler_phase = iswap.coupler_phase;
  return r;
}

std::string record_to_json(const CalibrationRecord& r) {
  json cz = gate_json(r.pulse.cz);
  cz["detuning_hz"] = r.cz_detuning_hz;
  cz["fidelity"] = r.cz_fidelity;
  cz["return_population"] = r.cz_return_population;
  cz["conditional_phase_rad"] = r.cz_conditional_phase;
  cz["leakage"] = r.cz_leakage;
  cz["max_leakage"] = r.cz_max_leakage;
  json is = gate_json(r.pulse.iswap);
  is["detuning_hz"] = r.iswap_detuning_hz;
  is["fidelity"] = r.iswap_fidelity;
  is["transfer"] = r.iswap_transfer;
  is["coupler_phase_rad"] = r.iswap_coupler_phase;
  json j = {{"cz", cz}, {"iswap", is}, {"two_qubit_frame_hz", r.pulse.f_2qf}};
  if (r.swap_phases) j["swap"] = {{"phi_comp_rad", {(*r.swap_phases)[0], (*r.swap_phases)[1]}}};
  return j.dump(2) + "\n";
}

CalibrationRecord record_from_json(const std::string& json_text) {
  const char* what = "calibration record";
  const json j = parse(json_text, what);
  if (!j.is_object() || !j.contains("cz") || !j.contains("iswap")) {
    throw ValidationError("calibration record: needs 'cz' and 'iswap' blocks");
  }
  CalibrationRecord r;
  const json& cz = j.at("cz");
  const json& is = j.at("iswap");
  r.pulse.cz = gate_from(cz, what);
  r.pulse.iswap = gate_from(is, what);
  r.pulse.f_2qf = number(j, "two_qubit_frame_hz", what);
  auto opt = [](const json& b, const char* k) { return b.contains(k) && b.at(k).is_number() ? b.at(k).get<double>() : 0.0; };
  r.cz_detuning_hz = opt(cz, "detuning_hz");
  r.cz_fidelity = opt(cz, "fidelity");
  r.cz_return_population = opt(cz, "return_population");
  r.cz_conditional_phase = opt(cz, "conditional_phase_rad");
  r.cz_leakage = opt(cz, "leakage");
  r.cz_max_leakage = opt(cz, "max_leakage");
  r.iswap_detuning_hz = opt(is, "detuning_hz");
  r.iswap_fidelity = opt(is, "fidelity");
  r.iswap_transfer = opt(is, "transfer");
  r.iswap_coupler_phase = opt(is, "coupler_phase_rad");
  if (j.contains("swap")) r.swap_phases = pair(j.at("swap"), "phi_comp_rad", what);
  return r;
}

std::string sweep_map_to_csv(const SweepMap& map) {
  std::ostringstream os;
  os.precision(12);
  os << "frequency_hz";
  for (double d : map.durations) os << ",t" << d;
  os << '\n';
  for (std::size_t i = 0; i < map.frequencies.size(); ++i) {
    os << map.frequencies[i];
    for (double p : map.population.at(i)) os << ',' << p;
    os << '\n';
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

}  // namespace qswap
