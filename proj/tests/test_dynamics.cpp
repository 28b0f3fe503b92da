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

#include "qswap/dynamics.hpp"

using namespace qswap;

namespace {

// Independent Hamiltonian built from ladder operators with Eigen products.
RMatrix ladder(int l) {
  RMatrix a = RMatrix::Zero(l, l);
  for (int n = 1; n < l; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

RMatrix kron3(const RMatrix& a, const RMatrix& b, const RMatrix& c) {
  auto k = [](const RMatrix& x, const RMatrix& y) {
    RMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
  };
  return k(k(a, b), c);
}

RMatrix oracle_hamiltonian(const DeviceParams& p, double phi) {
  const int l = p.levels;
  const RMatrix a = ladder(l), id = RMatrix::Identity(l, l);
  const RMatrix n = a.transpose() * a;
  const RMatrix a1 = kron3(a, id, id), a2 = kron3(id, a, id), b = kron3(id, id, a);
  const RMatrix n1 = kron3(n, id, id), n2 = kron3(id, n, id), nc = kron3(id, id, n);
  const RMatrix one = RMatrix::Identity(l * l * l, l * l * l);
  const double wc = kTwoPi * p.f_c0_hz * std::sqrt(std::abs(std::cos(kPi * phi)));
  RMatrix h = kTwoPi * p.f01_hz[0] * n1 + kTwoPi * p.eta_hz[0] / 2 * n1 * (n1 - one) +
              kTwoPi * p.f01_hz[1] * n2 + kTwoPi * p.eta_hz[1] / 2 * n2 * (n2 - one) + wc * nc +
              kTwoPi * p.eta_c_hz / 2 * nc * (nc - one);
  const RMatrix xb = b + b.transpose();
  h += kTwoPi * p.g_hz[0] * (a1 + a1.transpose()) * xb + kTwoPi * p.g_hz[1] * (a2 + a2.transpose()) * xb;
  return h;
}

// Classic RK4 on the lab-frame Schroedinger equation.
CVector rk4(const DeviceParams& p, const FluxDrive& d, CVector psi, double t_end, double h) {
  auto rhs = [&](double t, const CVector& x) -> CVector {
    const double phi = p.phi_bias + d.amplitude * d.envelope(t) * std::cos(kTwoPi * d.frequency_hz * t + d.phase);
    return -kI * (oracle_hamiltonian(p, phi).cast<Complex>() * x);
  };
  const long steps = std::lround(t_end / h);
  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    const CVector k1 = rhs(t, psi);
    const CVector k2 = rhs(t + h / 2, psi + h / 2 * k1);
    const CVector k3 = rhs(t + h / 2, psi + h / 2 * k2);
    const CVector k4 = rhs(t + h, psi + h * k3);
    psi += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return psi;
}

}  // namespace

TEST_CASE("coupler tuning curve at the bias point", "[dynamics]") {
  DeviceParams p;
  CHECK(coupler_frequency(-0.336, p) == Catch::Approx(4.863e9).epsilon(0.005));
  CHECK(coupler_frequency(0.0, p) == Catch::Approx(p.f_c0_hz));
  CHECK(coupler_frequency(0.2, p) == Catch::Approx(coupler_frequency(-0.2, p)));
}

TEST_CASE("Hamiltonian matches a ladder-operator construction", "[dynamics]") {
  DeviceParams p;
  for (double phi : {-0.336, -0.3, 0.0, 0.1}) {
    const RMatrix h = build_hamiltonian(p, phi);
    const RMatrix ref = oracle_hamiltonian(p, phi);
    CHECK((h - ref).cwiseAbs().maxCoeff() <= 1e-6 * ref.cwiseAbs().maxCoeff());
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(fock_index(p, 1, 2, 0) == 15);
}

TEST_CASE("dressed basis is orthonormal and labels follow bare states", "[dynamics]") {
  DeviceParams p;
  const DressedBasis d = dressed_basis(p);
  const int dim = p.dimension();
  CHECK((d.vectors.transpose() * d.vectors - RMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-10);
  for (int k = 0; k < dim; ++k) CHECK(d.vectors(k, k) * d.vectors(k, k) > 0.5);
  // The coupler pushes the qubits apart: the dressed splitting differs from the bare one by < 2 MHz.
  const double bare = p.f01_hz[0] - p.f01_hz[1];
  const double dressed = dressed_swap_frequency(p);
  CHECK(std::abs(dressed - bare) < 2e6);
  CHECK(std::abs(dressed - bare) > 1e3);
}

TEST_CASE("propagator agrees with a fine RK4 reference", "[dynamics]") {
  DeviceParams p;
  FluxDrive d;
  d.amplitude = 0.05;
  d.frequency_hz = 207e6;
  d.duration = 24e-9;
  d.rise = d.fall = 8e-9;
  CVector psi = CVector::Zero(p.dimension());
  psi(fock_index(p, 1, 1, 0)) = 1.0 / std::sqrt(2.0);
  psi(fock_index(p, 0, 1, 0)) = 1.0 / std::sqrt(2.0);

  PulseSchedule s;
  s.entries.push_back({0.0, d});
  s.dt = 1e-12;
  const EvolveResult r = evolve(psi, s, p);
  const CVector ref = rk4(p, d, psi, d.duration, 2e-13);
  CHECK((r.state - ref).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(r.norm_drift < 1e-10);
}

TEST_CASE("undriven evolution is a pure phase in the dressed basis", "[dynamics]") {
  DeviceParams p;
  PulseEngine e(p);
  CMatrix rot = CMatrix::Identity(p.dimension(), p.dimension());
  CMatrix lab = e.from_rotating(rot, 0.0);
  e.idle(lab, 123e-9);
  const CMatrix back = e.to_rotating(lab, 123e-9);
  CHECK(max_abs_diff(back, rot) < 1e-9);
}

TEST_CASE("time-shifted pulses are conjugated by the free phases", "[dynamics]") {
  DeviceParams p;
  PulseEngine e(p);
  FluxDrive d;
  d.amplitude = 0.04;
  d.frequency_hz = 461.6e6;
  d.duration = 60e-9;
  std::vector<int> all(p.dimension());
  for (int i = 0; i < p.dimension(); ++i) all[i] = i;
  const CMatrix u0 = pulse_subspace_unitary(e, d, 0.0, all);
  CHECK(is_unitary(u0, 1e-9));
  const double t0 = 37.3e-9;
  FluxDrive shifted = d;
  shifted.phase = d.phase - kTwoPi * d.frequency_hz * t0;
  const CMatrix ut = pulse_subspace_unitary(e, shifted, t0, all);
  const CVector ph = (kI * e.dressed().energies.cast<Complex>() * t0).array().exp();
  const CMatrix expected = ph.asDiagonal() * u0 * ph.conjugate().asDiagonal();
  CHECK(max_abs_diff(ut, expected) < 1e-6);
}

TEST_CASE("schedule validation", "[dynamics]") {
  DeviceParams p;
  FluxDrive d;
  d.frequency_hz = 200e6;
  d.duration = 30e-9;
  PulseSchedule s;
  s.entries.push_back({0.0, d});
  s.dt = 1e-10;  // far above 1 / (20 f_max)
  CVector psi = CVector::Zero(p.dimension());
  psi(0) = 1.0;
  CHECK_THROWS_AS(evolve(psi, s, p), ValidationError);
  s.dt = 1e-12;
  s.entries[0].start = -1e-9;
  CHECK_THROWS_AS(evolve(psi, s, p), ValidationError);
  FluxDrive big = d;
  big.amplitude = 0.2;  // |Phi_DC| + A reaches half a flux quantum
  CHECK_THROWS_AS(big.validate(p.phi_bias), ValidationError);
  FluxDrive short_pulse = d;
  short_pulse.duration = 5e-9;
  CHECK_THROWS_AS(short_pulse.validate(p.phi_bias), ValidationError);
}

TEST_CASE("device parameter validation", "[dynamics]") {
  DeviceParams p;
  CHECK_NOTHROW(p.validate());
  DeviceParams bad = p;
  bad.eta_hz[0] = 10e6;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.levels = 2;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.g_hz[1] = 900e6;
  CHECK_FALSE(bad.validate().empty());
}

TEST_CASE("conditional phase and local-phase fit on synthetic unitaries", "[dynamics]") {
  CMatrix cz = CMatrix::Identity(4, 4);
  cz(3, 3) = -1;
  CHECK(conditional_phase(cz) == Catch::Approx(kPi));
  // iSWAP followed by local Z errors: the fit must undo them.
  CMatrix iswap = CMatrix::Zero(4, 4);
  iswap(0, 0) = iswap(3, 3) = 1;
  iswap(1, 2) = iswap(2, 1) = kI;
  const double a = 0.7, b = -1.1;
  CVector dz(4);
  dz << 1, std::exp(kI * b), std::exp(kI * a), std::exp(kI * (a + b));
  const CMatrix err = dz.conjugate().asDiagonal() * iswap;
  const LocalPhaseFit f = fit_local_phases(err, iswap);
  CHECK(f.fidelity == Catch::Approx(1.0).margin(1e-10));
  CHECK(wrap_phase(f.phases[0] - a) == Catch::Approx(0.0).margin(1e-6));
  CHECK(wrap_phase(f.phases[1] - b) == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("commensurability and residual population", "[dynamics]") {
  const auto c = check_commensurability(400e-6, 3.6e9);
  CHECK(c.commensurate);
  CHECK(c.cycles == Catch::Approx(1.44e6));
  const auto off = check_commensurability(400e-6 + 0.1e-9, 3.6e9);
  CHECK_FALSE(off.commensurate);
  CHECK(off.residual_phase == Catch::Approx(kTwoPi * 0.36).margin(1e-6));
  CHECK(residual_population(400e-6, 77e-6) == Catch::Approx(0.006).margin(0.0005));
  CHECK(residual_population(400e-6, 79e-6) == Catch::Approx(0.006).margin(0.0005));
  CHECK_THROWS_AS(check_commensurability(0.0, 1.0), ValidationError);
}

TEST_CASE("calibration options are validated", "[dynamics]") {
  DeviceParams p;
  CalibrationOptions o;
  o.frequency_points = 1;
  CHECK_THROWS_AS(calibrate_iswap(p, o), ValidationError);
  o = {};
  o.max_duration = o.min_duration;
  CHECK_THROWS_AS(calibrate_cz(p, o), ValidationError);
}
