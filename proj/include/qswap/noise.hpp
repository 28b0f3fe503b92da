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

#include <vector>

#include "qswap/gateset.hpp"
#include "qswap/types.hpp"

namespace qswap {

// Throws ValidationError unless rho is Hermitian (1e-12), unit trace (1e-12) and PSD (-1e-10).
void validate_density(const CMatrix& rho);
CMatrix pure_density(const CVector& psi);

struct KrausChannel {
  std::vector<CMatrix> ops;
  double duration = 0.0;

  int dim() const { return ops.empty() ? 0 : static_cast<int>(ops.front().rows()); }
  CMatrix apply(const CMatrix& rho) const;
  // max |sum K^+ K - I|
  double completeness_error() const;
  // Lifts a single-site channel onto `site` of a register.
  KrausChannel embed(int site, const std::vector<int>& register_levels) const;
  // this after other.
  KrausChannel then(const KrausChannel& after) const;
};

// Bosonic energy relaxation on `levels` levels: |n> loses quanta at rate n / T1, so
// P(stay in |n>) = exp(-n tau / T1). Exact under composition.
KrausChannel amplitude_damping(double tau, double t1, int levels = 2);

// 1/T_phi = 1/T2 - 1/(2 T1). Coherence |m><n| is scaled by exp(-(m - n)^2 tau / T_phi).
double dephasing_time(double t1, double t2);
KrausChannel pure_dephasing(double tau, double t1, double t2, int levels = 2);

// 1 - (tau / 2) sum_k 1/T1_k.
double coherence_limited_fidelity(double tau, const std::vector<double>& t1s);

// Entanglement (process) fidelity of a channel with respect to the identity, from its Choi state.
double process_fidelity(const KrausChannel& channel);

// Density-matrix estimate of the same quantity: independent T1 damping on each qubit for tau,
// restricted to the qubit subspace.
double damping_process_fidelity(double tau, const std::vector<double>& t1s);

struct NoiseModel {
  std::vector<double> t1;   // per site; infinity disables damping
  std::vector<double> t2;   // per site; empty or infinity disables dephasing
};

// Gate-local noise: every op is applied as its ideal unitary followed by damping (and optional
// dephasing) on every site for the op's duration.
CMatrix run_density(const Circuit& circuit, const CMatrix& rho0, const NoiseModel& noise);

// Final basis-state populations starting from |0...0>.
RVector noisy_populations(const Circuit& circuit, const NoiseModel& noise);

}  // namespace qswap
