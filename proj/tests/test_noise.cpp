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

#include "qswap/noise.hpp"

using namespace qswap;

namespace {

// Choi-state process fidelity written out directly: F = <Phi+| (E x I)(|Phi+><Phi+|) |Phi+>.
double choi_fidelity(const KrausChannel& ch) {
  const int d = ch.dim();
  double f = 0.0;
  for (const auto& k : ch.ops) f += std::norm(k.trace());
  return f / (d * d);
}

}  // namespace

TEST_CASE("damping and dephasing channels are trace preserving", "[noise]") {
  for (int levels : {2, 3}) {
    CHECK(amplitude_damping(640e-9, 77e-6, levels).completeness_error() < 1e-12);
    CHECK(pure_dephasing(640e-9, 77e-6, 37e-6, levels).completeness_error() < 1e-12);
  }
}

TEST_CASE("damping populations follow exp(-n tau / T1)", "[noise]") {
  const double tau = 5e-6, t1 = 20e-6;
  const auto ch = amplitude_damping(tau, t1, 3);
  CMatrix rho = CMatrix::Zero(3, 3);
  rho(2, 2) = 1.0;
  const CMatrix out = ch.apply(rho);
  const double p = std::exp(-tau / t1);
  CHECK(out(2, 2).real() == Catch::Approx(p * p).margin(1e-12));
  CHECK(out(1, 1).real() == Catch::Approx(2 * p * (1 - p)).margin(1e-12));
  CHECK(out(0, 0).real() == Catch::Approx((1 - p) * (1 - p)).margin(1e-12));
  CHECK(out.trace().real() == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("damping composes exactly", "[noise]") {
  const auto a = amplitude_damping(1e-6, 30e-6, 3);
  const auto b = amplitude_damping(2e-6, 30e-6, 3);
  const auto ab = a.then(b);
  const auto direct = amplitude_damping(3e-6, 30e-6, 3);
  CMatrix rho = CMatrix::Constant(3, 3, Complex(1.0 / 3.0, 0.0));
  CHECK(max_abs_diff(ab.apply(rho), direct.apply(rho)) < 1e-13);
}

TEST_CASE("dephasing scales coherences by the pure dephasing time", "[noise]") {
  const double t1 = 77e-6, t2 = 37e-6, tau = 1e-6;
  const double tphi = dephasing_time(t1, t2);
  CHECK(1.0 / tphi == Catch::Approx(1.0 / t2 - 0.5 / t1));
  CMatrix rho = CMatrix::Constant(3, 3, Complex(1.0 / 3.0, 0.0));
  const CMatrix out = pure_dephasing(tau, t1, t2, 3).apply(rho);
  CHECK(std::abs(out(0, 1)) == Catch::Approx(std::exp(-tau / tphi) / 3.0).margin(1e-14));
  CHECK(std::abs(out(0, 2)) == Catch::Approx(std::exp(-4 * tau / tphi) / 3.0).margin(1e-14));
  CHECK(out(1, 1).real() == Catch::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(dephasing_time(10e-6, 30e-6), ValidationError);
}

TEST_CASE("coherence-limited fidelity matches the Choi computation", "[noise]") {
  const std::vector<double> t1s{77e-6, 79e-6};
  for (double tau : {20e-9, 640e-9, 890e-9, 1.96e-6}) {
    const auto ch = amplitude_damping(tau, t1s[0]).embed(0, {2, 2}).then(amplitude_damping(tau, t1s[1]).embed(1, {2, 2}));
    const double choi = choi_fidelity(ch);
    CHECK(process_fidelity(ch) == Catch::Approx(choi).margin(1e-12));
    CHECK(damping_process_fidelity(tau, t1s) == Catch::Approx(choi).margin(1e-12));
    // First-order formula agrees with the exact channel to O(tau^2 / T1^2).
    CHECK(std::abs(coherence_limited_fidelity(tau, t1s) - choi) < 0.003);
  }
  CHECK(coherence_limited_fidelity(890e-9, t1s) * 100 == Catch::Approx(98.8).margin(0.1));
  CHECK(coherence_limited_fidelity(640e-9, t1s) * 100 == Catch::Approx(99.2).margin(0.1));
  CHECK(coherence_limited_fidelity(1.96e-6, t1s) * 100 == Catch::Approx(97.4).margin(0.1));
}

TEST_CASE("density validation and circuit evolution", "[noise]") {
  CMatrix bad = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(validate_density(bad), ValidationError);
  CMatrix nonherm = CMatrix::Zero(2, 2);
  nonherm(0, 0) = 1.0;
  nonherm(0, 1) = 0.1;
  CHECK_THROWS_AS(validate_density(nonherm), ValidationError);

  Circuit c(std::vector<int>{2, 2});
  c.add(GateKind::X, {0});
  NoiseModel none{{1e300, 1e300}, {}};
  const RVector p = noisy_populations(c, none);
  CHECK(p(2) == Catch::Approx(1.0).margin(1e-12));
  NoiseModel t1{{1e-6, 1e-6}, {}};
  Circuit d(std::vector<int>{2, 2});
  d.add(GateKind::X, {0}).add(GateOp::delay(0, 1e-6));
  const RVector q = noisy_populations(d, t1);
  CHECK(q(2) == Catch::Approx(std::exp(-(1e-6 + 20e-9) / 1e-6)).margin(1e-9));
  CHECK_THROWS_AS(amplitude_damping(1e-6, -1.0), ValidationError);
}
