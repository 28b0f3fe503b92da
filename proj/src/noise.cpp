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

#include "qswap/noise.hpp"

#include <cmath>
#include <limits>

namespace qswap {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

void validate_density(const CMatrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw ValidationError("density matrix must be square");
  if (max_abs_diff(rho, rho.adjoint()) > 1e-12) throw ValidationError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-12) throw ValidationError("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw ValidationError("density matrix is not positive");
}

CMatrix pure_density(const CVector& psi) { return psi * psi.adjoint(); }

CMatrix KrausChannel::apply(const CMatrix& rho) const {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : ops) out.noalias() += k * rho * k.adjoint();
  return out;
}

double KrausChannel::completeness_error() const {
  if (ops.empty()) return std::numeric_limits<double>::infinity();
  CMatrix s = CMatrix::Zero(dim(), dim());
  for (const auto& k : ops) s.noalias() += k.adjoint() * k;
  return max_abs_diff(s, CMatrix::Identity(dim(), dim()));
}

KrausChannel KrausChannel::embed(int site, const std::vector<int>& register_levels) const {
  if (site < 0 || site >= static_cast<int>(register_levels.size())) throw ValidationError("embed: bad site");
  if (register_levels[site] != dim()) throw ValidationError("embed: level mismatch");
  KrausChannel out;
  out.duration = duration;
  for (const auto& k : ops) {
    CMatrix full = CMatrix::Identity(1, 1);
    for (int s = 0; s < static_cast<int>(register_levels.size()); ++s) {
      full = kron(full, s == site ? k : CMatrix::Identity(register_levels[s], register_levels[s]));
    }
    out.ops.push_back(std::move(full));
  }
  return out;
}

KrausChannel KrausChannel::then(const KrausChannel& after) const {
  KrausChannel out;
  out.duration = duration + after.duration;
  for (const auto& b : after.ops)
    for (const auto& a : ops) out.ops.push_back(b * a);
  return out;
}

KrausChannel amplitude_damping(double tau, double t1, int levels) {
  if (tau < 0 || !(t1 > 0)) throw ValidationError("amplitude_damping: need tau >= 0 and T1 > 0");
  if (levels < 2) throw ValidationError("amplitude_damping: need at least two levels");
  const double eta = std::exp(-tau / t1);  // survival amplitude^2 per quantum
  KrausChannel ch;
  ch.duration = tau;
  for (int k = 0; k < levels; ++k) {
    CMatrix m = CMatrix::Zero(levels, levels);
    for (int n = k; n < levels; ++n) {
      m(n - k, n) = std::sqrt(binomial(n, k) * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
    }
    if (k == 0 || m.cwiseAbs().maxCoeff() > 0) ch.ops.push_back(m);
  }
  return ch;
}

double dephasing_time(double t1, double t2) {
  if (!(t1 > 0) || !(t2 > 0)) throw ValidationError("dephasing_time: times must be positive");
  if (t2 > 2.0 * t1 * (1.0 + 1e-12)) throw ValidationError("dephasing_time: T2 > 2 T1 is unphysical");
  const double rate = 1.0 / t2 - 1.0 / (2.0 * t1);
  return rate <= 0 ? std::numeric_limits<double>::infinity() : 1.0 / rate;
}

KrausChannel pure_dephasing(double tau, double t1, double t2, int levels) {
  if (tau < 0) throw ValidationError("pure_dephasing: negative duration");
  const double tphi = dephasing_time(t1, t2);
  KrausChannel ch;
  ch.duration = tau;
  if (std::isinf(tphi) || tau == 0) {
    ch.ops.push_back(CMatrix::Identity(levels, levels));
    return ch;
  }
  RMatrix d(levels, levels);
  for (int m = 0; m < levels; ++m)
    for (int n = 0; n < levels; ++n) d(m, n) = std::exp(-double((m - n) * (m - n)) * tau / tphi);
  // Hadamard-product channel: Kraus operators are diagonal, built from the kernel's eigenvectors.
  Eigen::SelfAdjointEigenSolver<RMatrix> es(d);
  for (int k = 0; k < levels; ++k) {
    const double lam = es.eigenvalues()(k);
    if (lam <= 1e-15) continue;
    ch.ops.push_back((std::sqrt(lam) * es.eigenvectors().col(k)).cast<Complex>().asDiagonal().toDenseMatrix());
  }
  return ch;
}

double coherence_limited_fidelity(double tau, const std::vector<double>& t1s) {
  if (tau < 0) throw ValidationError("coherence_limited_fidelity: negative duration");
  if (t1s.empty()) throw ValidationError("coherence_limited_fidelity: need at least one T1");
  double rate = 0.0;
  for (double t1 : t1s) {
    if (!(t1 > 0)) throw ValidationError("coherence_limited_fidelity: T1 must be positive");
    rate += 1.0 / t1;
  }
  return 1.0 - 0.5 * tau * rate;
}

double process_fidelity(const KrausChannel& channel) {
  const int d = channel.dim();
  if (d == 0) throw ValidationError("process_fidelity: empty channel");
  // Choi state (1 x E)(|phi+><phi+|) and its overlap with |phi+>.
  CVector phi = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(double(d));
  const CMatrix rho = pure_density(phi);
  CMatrix out = CMatrix::Zero(d * d, d * d);
  const CMatrix id = CMatrix::Identity(d, d);
  for (const auto& k : channel.ops) {
    const CMatrix kk = kron(id, k);
    out.noalias() += kk * rho * kk.adjoint();
  }
  return std::real(phi.dot(out * phi));
}

double damping_process_fidelity(double tau, const std::vector<double>& t1s) {
  if (t1s.empty()) throw ValidationError("damping_process_fidelity: need at least one T1");
  std::vector<int> levels(t1s.size(), 2);
  KrausChannel total;
  total.ops.push_back(CMatrix::Identity(1 << t1s.size(), 1 << t1s.size()));
  for (std::size_t q = 0; q < t1s.size(); ++q) {
    total = total.then(amplitude_damping(tau, t1s[q], 2).embed(static_cast<int>(q), levels));
  }
  return process_fidelity(total);
}

CMatrix run_density(const Circuit& circuit, const CMatrix& rho0, const NoiseModel& noise) {
  const int n = circuit.num_sites();
  const int dim = circuit.dimension();
  if (rho0.rows() != dim || rho0.cols() != dim) throw ValidationError("run_density: dimension mismatch");
  if (!noise.t1.empty() && static_cast<int>(noise.t1.size()) != n) throw ValidationError("run_density: T1 per site");
  if (!noise.t2.empty() && static_cast<int>(noise.t2.size()) != n) throw ValidationError("run_density: T2 per site");
  CMatrix rho = rho0;
  for (const auto& op : circuit.ops) {
    if (op.kind != GateKind::Delay) {
      const CMatrix u = op_matrix(op, circuit.register_levels);
      rho = u * rho * u.adjoint();
    }
    if (op.duration <= 0) continue;
    for (int s = 0; s < n; ++s) {
      const int l = circuit.register_levels[s];
      if (!noise.t1.empty() && std::isfinite(noise.t1[s])) {
        rho = amplitude_damping(op.duration, noise.t1[s], l).embed(s, circuit.register_levels).apply(rho);
      }
      if (!noise.t2.empty() && std::isfinite(noise.t2[s])) {
        const double t1 = noise.t1.empty() ? std::numeric_limits<double>::infinity() : noise.t1[s];
        rho = pure_dephasing(op.duration, t1, noise.t2[s], l).embed(s, circuit.register_levels).apply(rho);
      }
    }
  }
  return rho;
}

RVector noisy_populations(const Circuit& circuit, const NoiseModel& noise) {
  const int dim = circuit.dimension();
  CMatrix rho = CMatrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  return run_density(circuit, rho, noise).diagonal().real();
}

}  // namespace qswap
