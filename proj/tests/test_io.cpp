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

#include <catch2/catch_amalgamated.hpp>

#include "qswap/io.hpp"

using namespace qswap;

TEST_CASE("device config defaults and overrides", "[io]") {
  const auto c = parse_device_config("{}");
  CHECK(c.params.f01_hz[0] == DeviceParams{}.f01_hz[0]);
  CHECK(c.tau_cz_s == 890e-9);
  const auto d = parse_device_config(R"({"t1_q1_s": 50e-6, "levels": 4, "tau_cz_s": 1e-6})");
  CHECK(d.params.t1_s[0] == 50e-6);
  CHECK(d.params.levels == 4);
  CHECK(d.tau_cz_s == 1e-6);
  const auto back = parse_device_config(device_config_to_json(d));
  CHECK(back.params.t1_s[0] == 50e-6);
  CHECK(back.params.levels == 4);
}

TEST_CASE("device config errors", "[io]") {
  CHECK_THROWS_AS(parse_device_config(R"({"f01_q3_hz": 1})"), ValidationError);
  CHECK_THROWS_AS(parse_device_config(R"({"t1_q1_s": "long"})"), ValidationError);
  CHECK_THROWS_AS(parse_device_config(R"({"eta_q1_hz": 2e8})"), ValidationError);
  CHECK_THROWS_AS(parse_device_config("[1, 2"), ValidationError);
  CHECK_THROWS_AS(load_device_config("/nonexistent/device.json"), ValidationError);
}

TEST_CASE("calibration record round-trip", "[io]") {
  CalibrationRecord r;
  r.pulse.cz = {207.4e6, 1.12e-6, 0.05, 0.0, {0.1, -0.2}};
  r.pulse.iswap = {461.6e6, 630e-9, 0.04, 0.3, {1.0, 2.0}};
  r.pulse.f_2qf = 462.17e6;
  r.cz_detuning_hz = -0.8e6;
  r.iswap_transfer = 0.995;
  r.swap_phases = std::array<double, 2>{-1.58, -1.57};
  const auto b = record_from_json(record_to_json(r));
  CHECK(b.pulse.cz.frequency_hz == r.pulse.cz.frequency_hz);
  CHECK(b.pulse.cz.phi_comp == r.pulse.cz.phi_comp);
  CHECK(b.pulse.iswap.phase == r.pulse.iswap.phase);
  CHECK(b.pulse.f_2qf == r.pulse.f_2qf);
  CHECK(b.cz_detuning_hz == r.cz_detuning_hz);
  CHECK(b.iswap_transfer == r.iswap_transfer);
  REQUIRE(b.swap_phases);
  CHECK((*b.swap_phases)[1] == -1.57);
  CHECK_THROWS_AS(record_from_json(R"({"cz": {}})"), ValidationError);
}

TEST_CASE("sweep map CSV layout", "[io]") {
  SweepMap m{{1e6, 2e6}, {1e-7, 2e-7, 3e-7}, {{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}}};
  const auto csv = sweep_map_to_csv(m);
  CHECK(csv.rfind("frequency_hz,t1e-07,t2e-07,t3e-07\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
