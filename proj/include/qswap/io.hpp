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

#pragma once

#include <array>
#include <optional>
#include <string>

#include "qswap/dynamics.hpp"
#include "qswap/ramsey.hpp"

namespace qswap {

// Device file: a flat JSON object. Every key is optional and defaults to the reference device;
// unknown keys and non-numeric values are rejected.
struct DeviceConfig {
  DeviceParams params;
  double tau_1qb_s = 20e-9;
  double tau_cz_s = 890e-9;
  double tau_iswap_s = 640e-9;
  double tau_swap_circuit_s = 1.960e-6;
  double drive_amplitude_phi0 = 0.0;  // 0: per-gate default
  double dt_s = 1e-12;
};

DeviceConfig parse_device_config(const std::string& json_text);
DeviceConfig load_device_config(const std::string& path);
std::string device_config_to_json(const DeviceConfig& config);

// Calibration results: one block each for CZ, iSWAP and the SWAP phase correction.
struct CalibrationRecord {
  PulseCalibration pulse;
  double cz_detuning_hz = 0.0;
  double cz_fidelity = 0.0;
  double cz_return_population = 0.0;
  double cz_conditional_phase = 0.0;
  double cz_leakage = 0.0;
  double cz_max_leakage = 0.0;
  double iswap_detuning_hz = 0.0;
  double iswap_fidelity = 0.0;
  double iswap_transfer = 0.0;
  double iswap_coupler_phase = 0.0;
  std::optional<std::array<double, 2>> swap_phases;  // post-CZ VirtualZ per qubit
};

CalibrationRecord make_record(const CZCalibration& cz, const ISwapCalibration& iswap, double f_2qf);
std::string record_to_json(const CalibrationRecord& record);
CalibrationRecord record_from_json(const std::string& json_text);

// Rows = frequencies, columns = durations.
std::string sweep_map_to_csv(const SweepMap& map);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qswap
