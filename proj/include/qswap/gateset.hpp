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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qswap/types.hpp"

namespace qswap {

enum class GateKind {
  CZ,
  iSWAP,
  SWAP,
  CNOT,  // targets = {control, target}
  H,
  SqrtX,
  X,
  SDagger,
  VirtualZ,
  Delay,
};

std::string_view gate_name(GateKind kind);
GateKind parse_gate(std::string_view name);
int gate_arity(GateKind kind);

// Default durations used when building circuits.
namespace durations {
inline constexpr double kSingleQubit = 20e-9;
inline constexpr double kCZ = 890e-9;
inline constexpr double kISWAP = 640e-9;
}  // namespace durations

// Sign convention of the virtual-Z rotation: Z(phi) = diag(1, exp(i * kZSign * phi)).
inline constexpr double kZSign = +1.0;

struct GateOp {
  GateKind kind = GateKind::Delay;
  std::vector<int> targets;
  double phase = 0.0;     // rad; VirtualZ angle
  double duration = 0.0;  // s

  static GateOp make(GateKind kind, std::vector<int> targets);
  static GateOp virtual_z(int site, double phase);
  static GateOp delay(int site, double duration);
};

struct Circuit {
  std::vector<int> register_levels;  // per-site level count
  std::vector<GateOp> ops;

  Circuit() = default;
  explicit Circuit(std::vector<int> levels) : register_levels(std::move(levels)) {}

  Circuit& add(GateOp op);
  Circuit& add(GateKind kind, std::vector<int> targets) { return add(GateOp::make(kind, std::move(targets))); }
  Circuit& append(const Circuit& other);

  int num_sites() const { return static_cast<int>(register_levels.size()); }
  int dimension() const;
  double total_duration() const;
};

// Exact matrix of a gate on its own qubits (2x2 or 4x4, basis |00>,|01>,|10>,|11>).
CMatrix standard_gate(GateKind kind, std::optional<double> phase = std::nullopt);

// Two-photon |00> <-> |11> exchange. Provided as a constant only; not used by any experiment.
CMatrix bswap_gate();

// Lifts a qubit gate onto levels {0,1} of the target sites of a multi-level register.
// Any basis state with a target site outside {0,1} is left untouched.
CMatrix embed_qutrit(const CMatrix& u, const std::vector<int>& sites, const std::vector<int>& register_levels);

// Ordered product of all ops (later ops multiply from the left).
CMatrix compose(const Circuit& circuit);
CMatrix op_matrix(const GateOp& op, const std::vector<int>& register_levels);

// Compiled SWAP: iSWAP then CZ then S-dagger on both sites. The Hadamard form wraps it in H on both sites.
enum class SwapForm { SDaggerShort, Hadamard };
Circuit compile_swap(int site_a, int site_b, const std::vector<int>& register_levels,
                     SwapForm form = SwapForm::SDaggerShort);

// Inserts VirtualZ(phase[s]) on every site s after each two-qubit gate.
Circuit local_phase_frame(const Circuit& circuit, const std::vector<double>& per_site_phases);

struct IdentityCheck {
  std::string name;
  double max_deviation = 0.0;
  bool passed = false;
};

struct DecompositionReport {
  std::vector<IdentityCheck> checks;
  double tolerance = 1e-12;
  bool all_passed() const;
};

// Checks the SWAP = (S+ x S+) CZ iSWAP identity and the supporting gate identities.
// `perturb` adds a constant to one entry of the composed SWAP (fault injection for tooling tests).
DecompositionReport verify_swap_decomposition(double perturb = 0.0);

bool is_unitary(const CMatrix& u, double tol = 1e-12);

// min over theta of max|u - exp(i theta) v|.
double global_phase_distance(const CMatrix& u, const CMatrix& v);

// Singular values of a two-site pure state reshaped as a (d_a x d_b) matrix.
RVector schmidt_coefficients(const CVector& state, int dim_a, int dim_b);

CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace qswap
