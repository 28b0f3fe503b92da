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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qswap/dynamics.hpp"

namespace qswap {

std::vector<std::string> DeviceParams::validate() const {
  for (int q = 0; q < 2; ++q) {
    if (!(f01_hz[q] > 0)) throw ValidationError("f01 must be positive");
    if (!(eta_hz[q] < 0)) throw ValidationError("transmon anharmonicity must be negative");
    if (!(t1_s[q] > 0) || !(t2star_s[q] > 0) || !(t2echo_s[q] > 0)) {
      throw ValidationError("coherence times must be positive");
    }
    if (g_hz[q] < 0) throw ValidationError("coupling strengths must be non-negative");
  }
  if (!(f_c0_hz > 0)) throw ValidationError("coupler frequency must be positive");
  if (!(eta_c_hz < 0)) throw ValidationError("coupler anharmonicity must be negative");
  if (levels < 3) throw ValidationError("at least three levels per site are required");
  if (!(std::abs(phi_bias) < 0.5)) throw ValidationError("|phi_bias| must be below 0.5 flux quanta");

  std::vector<std::string> warnings;
  const double fc = coupler_frequency(phi_bias, *this);
  for (int q = 0; q < 2; ++q) {
    const double detuning = std::abs(fc - f01_hz[q]);
    if (g_hz[q] > 0.1 * detuning) {
      std::ostringstream os;
      os << "qubit " << q + 1 << " is not deep in the dispersive regime (g = " << g_hz[q] * 1e-6
         << " MHz, detuning = " << detuning * 1e-6 << " MHz)";
      warnings.push_back(os.str());
    }
  }
  return warnings;
}

double coupler_frequency(double phi, const DeviceParams& params) {
  return params.f_c0_hz * std::sqrt(std::abs(std::cos(kPi * phi)));
}

int fock_index(const DeviceParams& params, int n1, int n2, int nc) {
  const int l = params.levels;
  return (n1 * l + n2) * l + nc;
}

RMatrix build_hamiltonian(const DeviceParams& params, double phi) {
  for (double f : params.f01_hz) {
    if (!(f > 0)) throw ValidationError("build_hamiltonian: qubit frequencies must be positive");
  }
  if (!(params.f_c0_hz > 0)) throw ValidationError("build_hamiltonian: coupler frequency must be positive");
  if (params.levels < 3) throw ValidationError("build_hamiltonian: need at least three levels per site");

  const int l = params.levels;
  const int dim = l * l * l;
  const double w1 = kTwoPi * params.f01_hz[0];
  const double w2 = kTwoPi * params.f01_hz[1];
  const double wc = kTwoPi * coupler_frequency(phi, params);
  const double e1 = kTwoPi * params.eta_hz[0];
  const double e2 = kTwoPi * params.eta_hz[1];
  const double ec = kTwoPi * params.eta_c_hz;
  const double g1 = kTwoPi * params.g_hz[0];
  const double g2 = kTwoPi * params.g_hz[1];

  RMatrix h = RMatrix::Zero(dim, dim);
  for (int n1 = 0; n1 < l; ++n1) {
    for (int n2 = 0; n2 < l; ++n2) {
      for (int nc = 0; nc < l; ++nc) {
        const int k = fock_index(params, n1, n2, nc);
        h(k, k) = w1 * n1 + 0.5 * e1 * n1 * (n1 - 1) + w2 * n2 + 0.5 * e2 * n2 * (n2 - 1) + wc * nc +
                  0.5 * ec * nc * (nc - 1);
        // (a + a^dag)(b + b^dag): raise or lower each partner by one quantum.
        for (int d1 : {-1, 1}) {
          for (int dc : {-1, 1}) {
            const int m1 = n1 + d1, mc = nc + dc;
            if (m1 < 0 || m1 >= l || mc < 0 || mc >= l) continue;
            const double amp = std::sqrt(static_cast<double>(std::max(n1, m1))) *
                               std::sqrt(static_cast<double>(std::max(nc, mc)));
            h(fock_index(params, m1, n2, mc), k) += g1 * amp;
          }
        }
        for (int d2 : {-1, 1}) {
          for (int dc : {-1, 1}) {
            const int m2 = n2 + d2, mc = nc + dc;
            if (m2 < 0 || m2 >= l || mc < 0 || mc >= l) continue;
            const double amp = std::sqrt(static_cast<double>(std::max(n2, m2))) *
                               std::sqrt(static_cast<double>(std::max(nc, mc)));
            h(fock_index(params, n1, m2, mc), k) += g2 * amp;
          }
        }
      }
    }
  }
  return h;
}

DressedBasis dressed_basis(const DeviceParams& params) {
  const RMatrix h = build_hamiltonian(params, params.phi_bias);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
  const RMatrix& v = es.eigenvectors();
  const int dim = static_cast<int>(h.rows());

  // Greedy assignment by largest overlap.
  struct Candidate {
    double weight;
    int bare;
    int eig;
  };
  std::vector<Candidate> cands;
  cands.reserve(dim * dim);
  for (int b = 0; b < dim; ++b) {
    for (int e = 0; e < dim; ++e) cands.push_back({v(b, e) * v(b, e), b, e});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.weight > b.weight; });
  std::vector<int> eig_of(dim, -1);
  std::vector<bool> used(dim, false);
  for (const auto& c : cands) {
    if (eig_of[c.bare] >= 0 || used[c.eig]) continue;
    eig_of[c.bare] = c.eig;
    used[c.eig] = true;
  }
  DressedBasis out;
  out.vectors.resize(dim, dim);
  out.energies.resize(dim);
  for (int b = 0; b < dim; ++b) {
    RVector col = v.col(eig_of[b]);
    if (col(b) < 0) col = -col;
    out.vectors.col(b) = col;
    out.energies(b) = es.eigenvalues()(eig_of[b]);
  }
  return out;
}

double dressed_swap_frequency(const DeviceParams& params) {
  const DressedBasis d = dressed_basis(params);
  return (d.energies(fock_index(params, 1, 0, 0)) - d.energies(fock_index(params, 0, 1, 0))) / kTwoPi;
}

Commensurability check_commensurability(double repetition_period, double lo_frequency) {
  if (!(repetition_period > 0) || !(lo_frequency > 0)) {
    throw ValidationError("check_commensurability: inputs must be positive");
  }
  Commensurability c;
  c.cycles = repetition_period * lo_frequency;
  const double frac = c.cycles - std::floor(c.cycles);
  const double dist = std::min(frac, 1.0 - frac);
  c.commensurate = dist <= 1e-9;
  c.residual_phase = c.commensurate ? 0.0 : kTwoPi * frac;
  return c;
}

double residual_population(double repetition_period, double t1) {
  if (repetition_period < 0 || !(t1 > 0)) throw ValidationError("residual_population: invalid input");
  return std::exp(-repetition_period / t1);
}

}  // namespace qswap
