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
#include <functional>
#include <string>
#include <vector>

#include "qswap/random.hpp"
#include "qswap/types.hpp"

namespace qswap {

using IQPoint = Eigen::Vector2d;

// Three-state dispersive readout of one qubit: isotropic Gaussian blobs around fixed centroids.
struct QubitReadout {
  std::array<IQPoint, 3> centroids{IQPoint(0.0, 0.0), IQPoint(1.0, 0.0), IQPoint(0.5, 0.8660254037844386)};
  double sigma = 0.3;
  double tau_ro = 2.3e-6;  // s
  double t1 = 77e-6;       // s
  bool decay = true;       // energy relaxation during the readout window
  // Extra probability that a shot prepared in |2> ends in |1> (joint readout only).
  double extra_21 = 0.0;

  void validate() const;
};

// Fixture models for the two qubits. sigma was calibrated once (Monte Carlo, 10^6 shots per state)
// so that the single-qubit assignment fidelities land near 0.8793 and 0.8873.
QubitReadout default_readout(int qubit);

// Distribution of the level reached after relaxation for tau from level n (bosonic cascade).
std::array<double, 3> relaxation_probabilities(int level, double tau, double t1);

// Nearest centroid; ties go to the lower index.
int assign_state(const QubitReadout& model, const IQPoint& p);

struct ReadoutShots {
  std::vector<IQPoint> iq;
  std::vector<int> labels;
};
ReadoutShots sample_shots(const QubitReadout& model, int true_state, long n, RandomStream& rng);

// Row-stochastic matrix P(measured j | prepared i). Rows are prepared states.
struct ConfusionMatrix {
  RMatrix probs;
  std::vector<long> shots;  // per prepared state

  int dim() const { return static_cast<int>(probs.rows()); }
  void validate() const;
  static ConfusionMatrix identity(int dim);
};

// 3 x 3 matrix from n shots per prepared state.
ConfusionMatrix build_confusion(const QubitReadout& model, long n_per_state, std::uint64_t seed);

// 9 x 9 matrix for joint preparation |i1 i2>, label index 3 i1 + i2. extra_21 of each model is
// applied only here, emulating measurement-induced transitions.
ConfusionMatrix build_joint_confusion(const QubitReadout& q1, const QubitReadout& q2, long n_per_state,
                                      std::uint64_t seed);

struct AssignmentFidelity {
  double fidelity = 0.0;
  double sem = 0.0;  // sample std of the diagonal / sqrt(3)
};
AssignmentFidelity assignment_fidelity(const ConfusionMatrix& c);

// Phenomenological amplitude dependence: centroid separation grows linearly with amplitude, and
// above `threshold` a readout-induced |1> -> |2> transition appears with probability
// penalty * (amplitude - threshold)^2.
struct AmplitudeFamily {
  QubitReadout base;           // geometry at amplitude 1
  double threshold = 1.0;
  double penalty = 0.0;
};

struct AmplitudeScan {
  std::vector<double> amplitudes;
  std::vector<double> fidelities;
  double best = 0.0;
};
// Uses the same seed for every amplitude (common random numbers). Ties go to the lower amplitude.
AmplitudeScan optimize_amplitude(const AmplitudeFamily& family, const std::vector<double>& amplitudes,
                                 long n_per_state, std::uint64_t seed);

// Triangle perimeter spanned by three centroids, and the candidate index maximizing it.
double centroid_perimeter(const std::array<IQPoint, 3>& c);
int best_readout_frequency(const std::vector<std::array<IQPoint, 3>>& candidates);

std::string two_qutrit_label(int index);  // 0 -> "00", 5 -> "12"

struct ConfusionDeviation {
  int prepared = 0;
  int measured = 0;
  double value = 0.0;
};
struct ConfusionDifference {
  RMatrix difference;                         // measured - (q1 x q2)
  std::vector<ConfusionDeviation> largest;    // positive entries, descending
};
ConfusionDifference confusion_difference(const ConfusionMatrix& measured, const ConfusionMatrix& q1,
                                         const ConfusionMatrix& q2, int top = 6);

// CSV: header "prepared,00,01,...,shots"; one row per prepared label.
std::string confusion_to_csv(const ConfusionMatrix& c);
ConfusionMatrix confusion_from_csv(const std::string& text);

}  // namespace qswap
