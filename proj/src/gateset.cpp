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

#include "qswap/gateset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace qswap {

namespace {

constexpr std::array<std::pair<GateKind, std::string_view>, 10> kGateNames{{
    {GateKind::CZ, "CZ"},
    {GateKind::iSWAP, "iSWAP"},
    {GateKind::SWAP, "SWAP"},
    {GateKind::CNOT, "CNOT"},
    {GateKind::H, "H"},
    {GateKind::SqrtX, "SqrtX"},
    {GateKind::X, "X"},
    {GateKind::SDagger, "SDagger"},
    {GateKind::VirtualZ, "VirtualZ"},
    {GateKind::Delay, "Delay"},
}};

double default_duration(GateKind kind) {
  switch (kind) {
    case GateKind::H:
    case GateKind::SqrtX:
    case GateKind::X:
      return durations::kSingleQubit;
    case GateKind::CZ:
      return durations::kCZ;
    case GateKind::iSWAP:
      return durations::kISWAP;
    case GateKind::SWAP:
      return durations::kISWAP + durations::kCZ;
    case GateKind::CNOT:
      return durations::kCZ + 2 * durations::kSingleQubit;
    case GateKind::SDagger:
    case GateKind::VirtualZ:
    case GateKind::Delay:
      return 0.0;
  }
  return 0.0;
}

CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

CMatrix diag4(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  m(3, 3) = d;
  return m;
}

}  // namespace

std::string_view gate_name(GateKind kind) {
  for (const auto& [k, name] : kGateNames) {
    if (k == kind) return name;
  }
  return "?";
}

GateKind parse_gate(std::string_view name) {
  for (const auto& [k, n] : kGateNames) {
    if (n == name) return k;
  }
  throw ValidationError("unknown gate kind: " + std::string(name));
}

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::CZ:
    case GateKind::iSWAP:
    case GateKind::SWAP:
    case GateKind::CNOT:
      return 2;
    default:
      return 1;
  }
}

GateOp GateOp::make(GateKind kind, std::vector<int> targets) {
  if (static_cast<int>(targets.size()) != gate_arity(kind)) {
    throw ValidationError("gate " + std::string(gate_name(kind)) + " expects " + std::to_string(gate_arity(kind)) +
                          " target(s)");
  }
  return GateOp{kind, std::move(targets), 0.0, default_duration(kind)};
}

GateOp GateOp::virtual_z(int site, double phase) { return GateOp{GateKind::VirtualZ, {site}, phase, 0.0}; }

GateOp GateOp::delay(int site, double duration) {
  if (duration < 0) throw ValidationError("delay duration must be non-negative");
  return GateOp{GateKind::Delay, {site}, 0.0, duration};
}

Circuit& Circuit::add(GateOp op) {
  if (static_cast<int>(op.targets.size()) != gate_arity(op.kind)) {
    throw ValidationError("wrong number of targets for " + std::string(gate_name(op.kind)));
  }
  for (std::size_t i = 0; i < op.targets.size(); ++i) {
    const int t = op.targets[i];
    if (t < 0 || t >= num_sites()) throw ValidationError("gate target out of register range");
    for (std::size_t j = 0; j < i; ++j) {
      if (op.targets[j] == t) throw ValidationError("gate targets must be distinct");
    }
  }
  if ((op.kind == GateKind::VirtualZ || op.kind == GateKind::SDagger) && op.duration != 0.0) {
    throw ValidationError("virtual-Z type gates have zero duration");
  }
  ops.push_back(std::move(op));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.register_levels != register_levels) throw ValidationError("append: register mismatch");
  for (const auto& op : other.ops) add(op);
  return *this;
}

int Circuit::dimension() const {
  return std::accumulate(register_levels.begin(), register_levels.end(), 1, std::multiplies<>());
}

double Circuit::total_duration() const {
  double t = 0.0;
  for (const auto& op : ops) t += op.duration;
  return t;
}

CMatrix standard_gate(GateKind kind, std::optional<double> phase) {
  if (phase.has_value() && kind != GateKind::VirtualZ) {
    throw ValidationError("phase given for non-parametric gate " + std::string(gate_name(kind)));
  }
  const double r = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case GateKind::CZ:
      return diag4(1, 1, 1, -1);
    case GateKind::iSWAP: {
      CMatrix m = CMatrix::Zero(4, 4);
      m(0, 0) = 1;
      m(1, 2) = kI;
      m(2, 1) = kI;
      m(3, 3) = 1;
      return m;
    }
    case GateKind::SWAP: {
      CMatrix m = CMatrix::Zero(4, 4);
      m(0, 0) = 1;
      m(1, 2) = 1;
      m(2, 1) = 1;
      m(3, 3) = 1;
      return m;
    }
    case GateKind::CNOT: {
      CMatrix m = CMatrix::Zero(4, 4);
      m(0, 0) = 1;
      m(1, 1) = 1;
      m(2, 3) = 1;
      m(3, 2) = 1;
      return m;
    }
    case GateKind::H:
      return mat2(r, r, r, -r);
    case GateKind::SqrtX:
      // Rx(pi/2): takes |0> to the -Y pole.
      return mat2(r, -kI * r, -kI * r, r);
    case GateKind::X:
      return mat2(0, 1, 1, 0);
    case GateKind::SDagger:
      return mat2(1, 0, 0, -kI);
    case GateKind::VirtualZ: {
      const double phi = phase.value_or(0.0);
      return mat2(1, 0, 0, std::polar(1.0, kZSign * phi));
    }
    case GateKind::Delay:
      return CMatrix::Identity(2, 2);
  }
  throw ValidationError("unknown gate kind");
}

CMatrix bswap_gate() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 3) = kI;
  m(3, 0) = kI;
  m(1, 1) = 1;
  m(2, 2) = 1;
  return m;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix embed_qutrit(const CMatrix& u, const std::vector<int>& sites, const std::vector<int>& register_levels) {
  const int k = static_cast<int>(sites.size());
  if (k == 0 || u.rows() != (1 << k) || u.cols() != u.rows()) {
    throw ValidationError("embed_qutrit: gate dimension does not match number of target sites");
  }
  const int n = static_cast<int>(register_levels.size());
  for (int s : sites) {
    if (s < 0 || s >= n) throw ValidationError("embed_qutrit: site out of range");
    if (register_levels[s] < 2) throw ValidationError("embed_qutrit: target site needs at least 2 levels");
  }
  int dim = 1;
  for (int l : register_levels) {
    if (l < 1) throw ValidationError("embed_qutrit: level counts must be positive");
    dim *= l;
  }
  std::vector<int> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * register_levels[s + 1];

  CMatrix out = CMatrix::Zero(dim, dim);
  std::vector<int> digits(n);
  for (int idx = 0; idx < dim; ++idx) {
    int rem = idx;
    for (int s = 0; s < n; ++s) {
      digits[s] = rem / stride[s];
      rem %= stride[s];
    }
    bool in_subspace = true;
    int sub = 0;
    for (int s : sites) {
      if (digits[s] > 1) {
        in_subspace = false;
        break;
      }
      sub = 2 * sub + digits[s];
    }
    if (!in_subspace) {
      out(idx, idx) = 1.0;
      continue;
    }
    // Column idx: spread u(:, sub) over the target digits.
    int base = idx;
    for (int s : sites) base -= digits[s] * stride[s];
    for (int row_sub = 0; row_sub < (1 << k); ++row_sub) {
      int row = base;
      for (int j = 0; j < k; ++j) {
        const int bit = (row_sub >> (k - 1 - j)) & 1;
        row += bit * stride[sites[j]];
      }
      out(row, idx) = u(row_sub, sub);
    }
  }
  return out;
}

CMatrix op_matrix(const GateOp& op, const std::vector<int>& register_levels) {
  std::optional<double> phase;
  if (op.kind == GateKind::VirtualZ) phase = op.phase;
  return embed_qutrit(standard_gate(op.kind, phase), op.targets, register_levels);
}

CMatrix compose(const Circuit& circuit) {
  const int dim = circuit.dimension();
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const auto& op : circuit.ops) {
    if (op.kind == GateKind::Delay) continue;
    u = op_matrix(op, circuit.register_levels) * u;
  }
  return u;
}

Circuit compile_swap(int site_a, int site_b, const std::vector<int>& register_levels, SwapForm form) {
  Circuit c(register_levels);
  if (form == SwapForm::Hadamard) {
    c.add(GateKind::H, {site_a});
    c.add(GateKind::H, {site_b});
  }
  c.add(GateKind::iSWAP, {site_a, site_b});
  c.add(GateKind::CZ, {site_a, site_b});
  c.add(GateKind::SDagger, {site_a});
  c.add(GateKind::SDagger, {site_b});
  if (form == SwapForm::Hadamard) {
    c.add(GateKind::H, {site_a});
    c.add(GateKind::H, {site_b});
  }
  return c;
}

Circuit local_phase_frame(const Circuit& circuit, const std::vector<double>& per_site_phases) {
  if (static_cast<int>(per_site_phases.size()) != circuit.num_sites()) {
    throw ValidationError("local_phase_frame: need one phase per site");
  }
  Circuit out(circuit.register_levels);
  for (const auto& op : circuit.ops) {
    out.add(op);
    if (op.kind == GateKind::CZ || op.kind == GateKind::iSWAP) {
      for (int s = 0; s < circuit.num_sites(); ++s) out.add(GateOp::virtual_z(s, per_site_phases[s]));
    }
  }
  return out;
}

bool DecompositionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
}

DecompositionReport verify_swap_decomposition(double perturb) {
  const CMatrix cz = standard_gate(GateKind::CZ);
  const CMatrix iswap = standard_gate(GateKind::iSWAP);
  const CMatrix swap = standard_gate(GateKind::SWAP);
  const CMatrix sdg = standard_gate(GateKind::SDagger);
  const CMatrix h = standard_gate(GateKind::H);
  const CMatrix id2 = CMatrix::Identity(2, 2);

  DecompositionReport report;
  auto record = [&](std::string name, double dev) {
    report.checks.push_back({std::move(name), dev, dev <= report.tolerance});
  };

  CMatrix composite = kron(sdg, sdg) * cz * iswap;
  if (perturb != 0.0) composite(0, 0) += perturb;
  record("SWAP = (Sdg x Sdg) CZ iSWAP", max_abs_diff(composite, swap));
  record("CZ iSWAP = iSWAP CZ", max_abs_diff(cz * iswap, iswap * cz));

  Circuit cnots(std::vector<int>{2, 2});
  cnots.add(GateKind::CNOT, {0, 1}).add(GateKind::CNOT, {1, 0}).add(GateKind::CNOT, {0, 1});
  record("CNOT01 CNOT10 CNOT01 = SWAP", max_abs_diff(compose(cnots), swap));
  record("H H = I", max_abs_diff(h * h, id2));
  const CMatrix ih = kron(id2, h);
  record("CNOT = (I x H) CZ (I x H)", max_abs_diff(ih * cz * ih, standard_gate(GateKind::CNOT)));
  return report;
}

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs_diff(u.adjoint() * u, CMatrix::Identity(u.rows(), u.cols())) <= tol;
}

double global_phase_distance(const CMatrix& u, const CMatrix& v) {
  auto dist = [&](double theta) { return max_abs_diff(u, std::polar(1.0, theta) * v); };
  const Complex overlap = (v.adjoint() * u).trace();
  const double theta0 = std::abs(overlap) > 0 ? std::arg(overlap) : 0.0;
  // The Frobenius-optimal phase is close to the max-norm optimum; refine locally.
  double lo = theta0 - kPi / 4, hi = theta0 + kPi / 4;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = dist(a), fb = dist(b);
  for (int it = 0; it < 100; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = dist(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = dist(b);
    }
  }
  return std::min({dist(theta0), fa, fb});
}

RVector schmidt_coefficients(const CVector& state, int dim_a, int dim_b) {
  if (state.size() != dim_a * dim_b) throw ValidationError("schmidt_coefficients: dimension mismatch");
  CMatrix m(dim_a, dim_b);
  for (int i = 0; i < dim_a; ++i) {
    for (int j = 0; j < dim_b; ++j) m(i, j) = state(i * dim_b + j);
  }
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues();
}

}  // namespace qswap
