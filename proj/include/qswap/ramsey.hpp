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
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qswap/dynamics.hpp"
#include "qswap/gateset.hpp"
#include "qswap/noise.hpp"

namespace qswap {

enum class Prep { Zero, One };
enum class Experiment { Conditional, Cross };

// Sites 0 = Q1, 1 = Q2.
struct Roles {
  int control = 0;
  int target = 1;
};

// How the composite SWAP is expanded. If post_cz_phases is set, VirtualZ(phase[site]) replaces
// the two S-dagger gates (the SWAP local-phase correction).
struct SwapSpec {
  SwapForm form = SwapForm::SDaggerShort;
  std::optional<std::array<double, 2>> post_cz_phases;
};

inline const std::vector<int> kQutritPair{3, 3};

// [X or equal-length delay on q_c]; SqrtX q_t; CZ; VirtualZ(phi) q_t; SqrtX q_t.
// GateKind::Delay in place of CZ builds the no-gate reference.
Circuit build_conditional_ramsey(GateKind gate, Prep prep, double phi, Roles roles = {});

// [X or delay on q_c]; SqrtX q_t; iSWAP or SWAP; VirtualZ(phi) q_c; SqrtX q_c.
Circuit build_cross_ramsey(GateKind gate, Prep prep, double phi, Roles roles = {}, const SwapSpec& swap = {});

Circuit build_ramsey(Experiment e, GateKind gate, Prep prep, double phi, Roles roles = {}, const SwapSpec& swap = {});

// The two plotted states as register indices (3 n_Q1 + n_Q2): |q_c q_t> = |01>, |11> for CZ and
// |10>, |11> for iSWAP / SWAP.
std::array<int, 2> tracked_states(GateKind gate, Roles roles);

class Backend {
 public:
  virtual ~Backend() = default;
  // Nine populations over |n_Q1 n_Q2>. `point` keys the random stream of stochastic backends.
  virtual RVector populations(const Circuit& circuit, std::uint64_t point) const = 0;
  virtual std::string name() const = 0;
  virtual long shots() const { return 0; }
};

class ExactBackend : public Backend {
 public:
  RVector populations(const Circuit& circuit, std::uint64_t point) const override;
  std::string name() const override { return "exact"; }
};

class NoisyBackend : public Backend {
 public:
  explicit NoisyBackend(NoiseModel noise) : noise_(std::move(noise)) {}
  RVector populations(const Circuit& circuit, std::uint64_t point) const override;
  std::string name() const override { return "noisy"; }

 private:
  NoiseModel noise_;
};

// One calibrated parametric pulse plus its local-phase compensation.
struct PulseGate {
  double frequency_hz = 0.0;
  double duration = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;                     // coupler drive phase at t = 0
  std::array<double, 2> phi_comp{0, 0};  // VirtualZ per qubit after the pulse
};

struct PulseCalibration {
  PulseGate cz;
  PulseGate iswap;
  double f_2qf = 0.0;  // two-qubit frame frequency (Hz); iSWAP drive phases are tracked against it
};

// Runs circuits on the three-transmon model: CZ and iSWAP become flux pulses, single-qubit gates
// stay ideal. Evolution is carried in the rotating frame of the dressed states.
class PulseBackend : public Backend {
 public:
  PulseBackend(const DeviceParams& params, PulseCalibration cal, double dt = 1e-12);
  RVector populations(const Circuit& circuit, std::uint64_t point) const override;
  std::string name() const override { return "pulse"; }

  // Drive phase of an iSWAP pulse starting at t0 so that it acts like the one calibrated at t = 0.
  double tracked_iswap_phase(double t0) const;
  // Rotating-frame propagator (dressed basis, all levels) of a pulse starting at t0.
  const CMatrix& pulse_unitary(GateKind kind, double t0) const;
  const PulseCalibration& calibration() const { return cal_; }

 private:
  DeviceParams params_;
  PulseCalibration cal_;
  PulseEngine engine_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, long long>, CMatrix> cache_;
};

// Multinomial sampling of another backend's populations, optionally through a readout confusion
// matrix (rows = prepared): y = T^T x.
class ShotBackend : public Backend {
 public:
  ShotBackend(std::shared_ptr<const Backend> inner, long shots, std::uint64_t seed,
              std::optional<RMatrix> confusion = std::nullopt);
  RVector populations(const Circuit& circuit, std::uint64_t point) const override;
  std::string name() const override { return "shots"; }
  long shots() const override { return shots_; }

 private:
  std::shared_ptr<const Backend> inner_;
  long shots_;
  std::uint64_t seed_;
  std::optional<RMatrix> confusion_;
};

struct RamseyTrace {
  Experiment experiment = Experiment::Conditional;
  GateKind gate = GateKind::CZ;
  Prep prep = Prep::Zero;
  Roles roles;
  std::vector<double> phi;
  std::vector<RVector> populations;  // nine entries per point
  std::array<int, 2> tracked{0, 0};
  std::string backend;
  long shots = 0;
  bool mitigated = false;  // populations are reconstructed |beta|^2 and need not sum to 1

  std::vector<double> series(int state) const;
  void validate() const;
};

RamseyTrace sweep(Experiment e, GateKind gate, Prep prep, const std::vector<double>& phis, const Backend& backend,
                  Roles roles = {}, const SwapSpec& swap = {}, int threads = 1);

// A cos(phi + delta) + m, fitted by linear least squares in (cos, sin, 1). The grid needs at
// least eight points and no gap wider than pi/2 around the circle.
struct RamseyFit {
  double amplitude = 0.0, delta = 0.0, offset = 0.0;
  double swing = 0.0;         // 2 A
  double delta_offset = 0.0;  // 0.5 - m
  double delta_phase = 0.0;   // delta - delta_ideal, wrapped
  double mse = 0.0;           // mean (y - ideal)^2
  double err_swing = 0.0, err_offset = 0.0, err_phase = 0.0;
};

RamseyFit fit_trace(const std::vector<double>& phi, const std::vector<double>& y, const std::vector<double>& ideal);

// CSV with columns phi_rad, p00..p22, backend, shots.
// Lines starting with '#' are comments (provenance headers).
std::string trace_to_csv(const RamseyTrace& trace);
RamseyTrace trace_from_csv(const std::string& text);

// Sweeps the post-CZ phase on the measured qubit of the SWAP cross-Ramsey with q_c prepared in |1>
// and returns the phase maximizing P(1), refined by a parabola through the best three grid points.
// `measured` is the site read out (the cross-Ramsey control).
struct SwapPhaseTuneup {
  std::vector<double> grid;
  std::vector<double> population;
  double phase = 0.0;
};
SwapPhaseTuneup tune_swap_local_phase(const Backend& backend, int measured, const std::vector<double>& grid,
                                      SwapForm form = SwapForm::Hadamard);

}  // namespace qswap
