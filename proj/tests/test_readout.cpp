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

#include "qswap/readout.hpp"

using namespace qswap;

TEST_CASE("Philox4x32-10 known-answer vectors", "[readout][random]") {
  const auto zero = Philox::generate({0, 0, 0, 0}, {0, 0});
  CHECK(zero == Philox::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const auto ones = Philox::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(ones == Philox::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  const auto pi = Philox::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(pi == Philox::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("random streams are reproducible and independent", "[readout][random]") {
  RandomStream a(7, 3), b(7, 3), c(7, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    differs |= x != c.uniform();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
  CHECK(differs);
  RandomStream m(1, 0);
  const auto counts = multinomial(m, 100000, {0.2, 0.0, 0.8});
  CHECK(counts[1] == 0);
  CHECK(counts[0] + counts[2] == 100000);
  CHECK(std::abs(counts[0] - 20000) < 5 * std::sqrt(100000 * 0.16));
}

TEST_CASE("relaxation cascade", "[readout]") {
  const auto p = relaxation_probabilities(2, 2.3e-6, 77e-6);
  const double s = std::exp(-2.3e-6 / 77e-6);
  CHECK(p[2] == Catch::Approx(s * s));
  CHECK(p[1] == Catch::Approx(2 * s * (1 - s)));
  CHECK(p[0] + p[1] + p[2] == Catch::Approx(1.0));
  CHECK(relaxation_probabilities(0, 1e-6, 1e-6)[0] == 1.0);
}

TEST_CASE("nearest-centroid assignment", "[readout]") {
  const QubitReadout m = default_readout(0);
  CHECK(assign_state(m, m.centroids[0]) == 0);
  CHECK(assign_state(m, m.centroids[2]) == 2);
  // Equidistant from 0 and 1: tie goes to 0.
  CHECK(assign_state(m, (m.centroids[0] + m.centroids[1]) / 2 - IQPoint(0, 1.0)) == 0);
}

TEST_CASE("confusion matrices are row-stochastic and deterministic", "[readout]") {
  const auto c1 = build_confusion(default_readout(0), 20000, 11);
  const auto c2 = build_confusion(default_readout(0), 20000, 11);
  CHECK(c1.probs == c2.probs);
  CHECK_NOTHROW(c1.validate());
  for (int i = 0; i < 3; ++i) CHECK(c1.probs.row(i).sum() == Catch::Approx(1.0));
  CHECK(c1.probs(0, 0) > c1.probs(1, 1));  // decay lowers the |1> and |2> diagonals

  const auto j = build_joint_confusion(default_readout(0), default_readout(1), 5000, 3);
  REQUIRE(j.dim() == 9);
  CHECK_NOTHROW(j.validate());
  CHECK(two_qutrit_label(5) == "12");
}

TEST_CASE("assignment fidelities land near the device values", "[readout]") {
  const auto f1 = assignment_fidelity(build_confusion(default_readout(0), 200000, 5));
  const auto f2 = assignment_fidelity(build_confusion(default_readout(1), 200000, 5));
  CHECK(f1.fidelity == Catch::Approx(0.8793).margin(0.005));
  CHECK(f2.fidelity == Catch::Approx(0.8873).margin(0.005));
  CHECK(f1.sem > 0.0);
}

TEST_CASE("amplitude scan peaks below the penalty threshold region", "[readout]") {
  AmplitudeFamily fam;
  fam.base = default_readout(0);
  fam.base.decay = false;
  fam.threshold = 1.0;
  fam.penalty = 2.0;
  const auto scan = optimize_amplitude(fam, {0.6, 0.8, 1.0, 1.2, 1.4, 1.8}, 20000, 9);
  CHECK(scan.best >= 1.0);
  CHECK(scan.best <= 1.4);
  CHECK(scan.fidelities.front() < *std::max_element(scan.fidelities.begin(), scan.fidelities.end()));
}

TEST_CASE("readout frequency maximizes the centroid perimeter", "[readout]") {
  std::vector<std::array<IQPoint, 3>> cands{
      {IQPoint(0, 0), IQPoint(1, 0), IQPoint(0, 1)},
      {IQPoint(0, 0), IQPoint(2, 0), IQPoint(0, 2)},
      {IQPoint(0, 0), IQPoint(1, 0), IQPoint(0.5, 0.1)}};
  CHECK(centroid_perimeter(cands[0]) == Catch::Approx(2 + std::sqrt(2.0)));
  CHECK(best_readout_frequency(cands) == 1);
}

TEST_CASE("confusion CSV round-trip and difference ranking", "[readout]") {
  const auto q1 = build_confusion(default_readout(0), 4000, 1);
  const auto q2 = build_confusion(default_readout(1), 4000, 2);
  const auto back = confusion_from_csv(confusion_to_csv(q1));
  CHECK((back.probs - q1.probs).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(back.shots == q1.shots);

  QubitReadout r1 = default_readout(0);
  r1.extra_21 = 0.05;
  const auto joint = build_joint_confusion(r1, default_readout(1), 20000, 4);
  const auto diff = confusion_difference(joint, q1, q2);
  REQUIRE_FALSE(diff.largest.empty());
  for (std::size_t i = 1; i < diff.largest.size(); ++i) CHECK(diff.largest[i - 1].value >= diff.largest[i].value);
  // The injected 2 -> 1 transition on Q1 shows up as |2x> -> |1x>.
  CHECK(diff.largest.front().prepared / 3 == 2);
  CHECK(diff.largest.front().measured / 3 == 1);
  CHECK_THROWS_AS(confusion_from_csv("prepared,0,1\n0,0.5,0.4,10\n"), ValidationError);
}
