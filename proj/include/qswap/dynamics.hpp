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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qswap/gateset.hpp"
#include "qswap/types.hpp"

namespace qswap {

// Two fixed-frequency transmons (sites 0 and 1) plus a flux-tunable transmon coupler (site 2).
// Frequencies are ordinary frequencies in Hz; the Hamiltonian works in rad/s.
struct DeviceParams {
  std::array<double, 2> f01_hz{3.86011e9, 3.39741e9};
  std::array<double, 2> eta_hz{-256.07e6, -207.49e6};
  double f_c0_hz = 6.9373e9;  // coupler frequency at zero flux
  double eta_c_hz = -150e6;   // coupler anharmonicity (not reported for this device; model choice)
  std::array<double, 2> g_hz{37e6, 35e6};
  double phi_bias = -0.336;  // flux quanta
  std::array<double, 2> t1_s{77e-6, 79e-6};
  std::array<double, 2> t2star_s{37e-6, 33e-6};
  std::array<double, 2> t2echo_s{93e-6, 105e-6};
  int levels = 3;

  // Throws ValidationError for unphysical values; returns soft warnings (dispersive-regime check).
  std::vector<std::string> validate() const;

  double f12_hz(int qubit) const { return f01_hz.at(qubit) + eta_hz.at(qubit); }
  int dimension() const { return levels * levels * levels; }
};

// Symmetric-SQUID tuning curve f_c0 * sqrt|cos(pi * phi)| in Hz.
double coupler_frequency(double phi, const DeviceParams& params);

// H / hbar in rad/s on the (levels)^3 Fock space ordered |n_q1 n_q2 n_c>, coupler index fastest.
RMatrix build_hamiltonian(const DeviceParams& params, double phi);

int fock_index(const DeviceParams& params, int n1, int n2, int nc);

// Flux pulse Phi(t) = A(t - start) cos(2 pi f t + phase) + Phi_DC with a flat-top envelope whose
// rise and fall follow Gaussian flanks. The carrier phase is referenced to t = 0 of the schedule.
struct FluxDrive {
  double amplitude = 0.05;  // flux quanta
  double frequency_hz = 0.0;
  double phase = 0.0;
  double duration = 0.0;
  double rise = 10e-9;
  double fall = 10e-9;

  double envelope(double s) const;
  void validate(double phi_dc) const;
};

struct ScheduleEntry {
  double start = 0.0;
  std::variant<FluxDrive, GateOp> item;
};

struct PulseSchedule {
  std::vector<ScheduleEntry> entries;
  double dt = 1e-12;
  double end_time() const;
};

// Eigenbasis of the undriven Hamiltonian at the bias point, with each eigenvector labelled by the
// bare Fock state it overlaps most.
struct DressedBasis {
  RMatrix vectors;  // column k = dressed state adiabatically connected to Fock state k
  RVector energies;  // rad/s, indexed by Fock label
};

DressedBasis dressed_basis(const DeviceParams& params);

// Dressed |10>-|01> splitting in Hz.
double dressed_swap_frequency(const DeviceParams& params);

// Numerical propagation of the three-transmon model. Integration uses a symmetric fourth-order
// (triple-jump) composition of an exact split step: the flux-dependent diagonal is integrated in
// closed form over each substep and the constant coupling block is exponentiated once, so the
// propagator is unitary to rounding. States are column blocks in the Fock basis (lab frame).
class PulseEngine {
 public:
  PulseEngine(const DeviceParams& params, double dt_max = 1e-12);
  ~PulseEngine();
  PulseEngine(PulseEngine&&) noexcept;
  PulseEngine& operator=(PulseEngine&&) noexcept;

  const DeviceParams& params() const { return params_; }
  const DressedBasis& dressed() const { return dressed_; }
  int dim() const { return dim_; }
  double dt_max() const { return dt_max_; }

  // Exact propagation under the static Hamiltonian for `duration` seconds.
  void idle(CMatrix& states, double duration) const;

  // Propagates through a complete flux pulse starting at absolute time `start`.
  void drive(CMatrix& states, const FluxDrive& drive, double start) const;

  // Samples the flat part of a long pulse once per carrier period at instants where the flux
  // equals the bias point, so the dressed basis is the instantaneous eigenbasis. Returns the
  // sample times relative to the pulse start and the states (Fock basis) at those times.
  struct FlatSamples {
    std::vector<double> times;
    std::vector<CMatrix> states;
  };
  FlatSamples sample_flat(const CMatrix& initial, const FluxDrive& drive, double start, double max_time) const;

  // Lab-frame Fock state <-> rotating-frame dressed coefficients at absolute time t.
  CMatrix to_rotating(const CMatrix& lab, double t) const;
  CMatrix from_rotating(const CMatrix& rot, double t) const;

  // Ideal gate acting on the qubit sites in the rotating frame, applied at absolute time t.
  void apply_ideal(CMatrix& states, const GateOp& op, double t) const;

  // Instantaneous largest single-quantum transition frequency in Hz during a drive.
  double max_transition_frequency(const FluxDrive& drive) const;

 private:
  struct Impl;
  DeviceParams params_;
  double dt_max_;
  int dim_;
  DressedBasis dressed_;
  std::unique_ptr<Impl> impl_;
};

struct EvolveResult {
  CVector state;                   // lab frame, Fock basis
  std::optional<CMatrix> unitary;  // lab-frame propagator of the whole schedule
  double norm_drift = 0.0;
};

// Integrates the schedule from t = 0 to its end. Throws NumericalError if the norm drifts by more
// than 1e-6 and ValidationError if the step violates the sampling bound.
EvolveResult evolve(const CVector& state, const PulseSchedule& schedule, const DeviceParams& params,
                    bool accumulate_unitary = false);

// Rotating-frame propagator of one pulse restricted to the given Fock labels (dressed states),
// columns = initial label, rows = final label.
CMatrix pulse_subspace_unitary(const PulseEngine& engine, const FluxDrive& drive, double start,
                               const std::vector<int>& labels);

// Labels |q1 q2> with the coupler in its ground state: the 2-qubit computational subspace or the
// 3x3 qutrit subspace (ordered |00>,|01>,...).
std::vector<int> computational_labels(const DeviceParams& params);
std::vector<int> qutrit_labels(const DeviceParams& params);

// max over local Z phases of |Tr(target^+ D U)|^2 / d^2 with D = Z(a) x Z(b) applied after U.
struct LocalPhaseFit {
  double fidelity = 0.0;
  std::array<double, 2> phases{0.0, 0.0};  // per-qubit Z correction (applied after the gate)
};
LocalPhaseFit fit_local_phases(const CMatrix& u4, const CMatrix& target4);

// Per-gate drive amplitudes (flux quanta). The CZ value keeps the |11>-|20> round trip inside the
// 1.2 us window; at 0.05 the iSWAP transfer maximum is too narrow to reach 99%, so it runs lower.
inline constexpr double kDefaultCZAmplitude = 0.05;
inline constexpr double kDefaultISwapAmplitude = 0.04;

struct CalibrationOptions {
  double amplitude = 0.0;  // flux quanta; 0 selects the per-gate default
  double half_window_hz = 10e6;
  int frequency_points = 41;
  double min_duration = 100e-9;
  double max_duration = 1200e-9;
  int duration_points = 56;
  double dt = 1e-12;
  double phase = 0.0;
  int threads = 1;
};

// Coarse map of the calibration sweep: population[i][j] at frequencies[i], durations[j].
struct SweepMap {
  std::vector<double> frequencies;
  std::vector<double> durations;
  std::vector<std::vector<double>> population;
};

class CalibrationError : public NumericalError {
 public:
  CalibrationError(const std::string& what, SweepMap map) : NumericalError(what), map_(std::move(map)) {}
  const SweepMap& map() const { return map_; }

 private:
  SweepMap map_;
};

struct ISwapCalibration {
  double frequency_hz = 0.0;
  double duration = 0.0;
  double amplitude = 0.0;
  double coupler_phase = 0.0;            // phi_2 - phi_1
  std::array<double, 2> phi_comp{0, 0};  // rad
  double detuning_hz = 0.0;              // (f01_q1 - f01_q2) - f_iSWAP
  double transfer = 0.0;                 // |10> -> |01> population
  double fidelity = 0.0;                 // local-phase-optimised overlap with iSWAP
  CMatrix unitary;                       // 4x4 rotating-frame computational block
  SweepMap map;
};

struct CZCalibration {
  double frequency_hz = 0.0;
  double duration = 0.0;
  double amplitude = 0.0;
  std::array<double, 2> phi_comp{0, 0};
  double detuning_hz = 0.0;  // f12_q1 - f01_q2 - f_CZ
  double return_population = 0.0;
  double conditional_phase = 0.0;
  double leakage = 0.0;      // out of the computational subspace, starting from |11>
  double max_leakage = 0.0;  // worst computational input state
  double fidelity = 0.0;
  CMatrix unitary;
  SweepMap map;
};

ISwapCalibration calibrate_iswap(const DeviceParams& params, const CalibrationOptions& options = {});
CZCalibration calibrate_cz(const DeviceParams& params, const CalibrationOptions& options = {});

// Conditional phase theta11 - theta10 - theta01 + theta00 of a 4x4 block, wrapped to [0, 2 pi).
double conditional_phase(const CMatrix& u4);

struct TwoQubitFrame {
  double frequency_hz = 0.0;              // f_2qf
  std::vector<double> drive_frequencies;  // grid
  std::vector<double> fitted_frequencies; // |oscillation frequency| per column (Hz)
  std::vector<double> delays;
  std::vector<std::vector<double>> population;  // [f][tau], P(Q1 = 1)
};

// iSWAP - delay - iSWAP Ramsey on Q1 for every (drive frequency, delay) pair.
TwoQubitFrame measure_two_qubit_frame(const DeviceParams& params, const ISwapCalibration& iswap,
                                      const std::vector<double>& frequencies, const std::vector<double>& delays,
                                      double dt = 1e-12);

struct Commensurability {
  bool commensurate = false;
  double residual_phase = 0.0;  // rad
  double cycles = 0.0;
};
Commensurability check_commensurability(double repetition_period, double lo_frequency);

double residual_population(double repetition_period, double t1);

}  // namespace qswap
