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

#include <random>

#include "qswap/mitigation.hpp"

using namespace qswap;

namespace {

RMatrix random_stochastic(std::mt19937_64& rng, int n, double diag) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RMatrix t(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) t(i, j) = u(rng);
    t(i, i) += diag * n;
    t.row(i) /= t.row(i).sum();
  }
  return t;
}

// Brute-force minimum of 0.5 |y - M x|^2 over a uniform grid on [0, 1]^3, refined around the best node.
double grid_minimum(const RVector& y, const RMatrix& m) {
  auto obj = [&](const RVector& x) { return 0.5 * (y - m * x).squaredNorm(); };
  RVector best = RVector::Zero(3);
  double fbest = obj(best);
  double lo[3] = {0, 0, 0}, width = 1.0;
  for (int level = 0; level < 6; ++level) {
    const int n = 40;
    RVector centre = best;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b)
        for (int c = 0; c <= n; ++c) {
          RVector x(3);
          x << lo[0] + width * a / n, lo[1] + width * b / n, lo[2] + width * c / n;
          x = x.cwiseMax(0.0).cwiseMin(1.0);
          const double f = obj(x);
          if (f < fbest) fbest = f, centre = x;
        }
    best = centre;
    width *= 0.1;
    for (int k = 0; k < 3; ++k) lo[k] = best(k) - width / 2;
  }
  return fbest;
}

}  // namespace

TEST_CASE("identity confusion returns y", "[mitigation]") {
  RVector y(9);
  y << 0.1, 0.2, 0.0, 0.3, 0.1, 0.0, 0.2, 0.05, 0.05;
  const auto r = reconstruct(y, RMatrix::Identity(9, 9));
  CHECK((r.x - y).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.converged);
}

TEST_CASE("round-trip on 100 random instances", "[mitigation]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int inst = 0; inst < 100; ++inst) {
    const RMatrix t = random_stochastic(rng, 9, 0.6);
    RVector x(9);
    for (int i = 0; i < 9; ++i) x(i) = u(rng);
    x /= x.sum();
    for (auto o : {Orientation::Transposed, Orientation::Literal}) {
      MitigationOptions opt;
      opt.orientation = o;
      const RVector y = forward_map(t, o) * x;
      const auto r = reconstruct(y, t, opt);
      CHECK((r.x - x).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
}

TEST_CASE("bounded solution matches a brute-force grid search", "[mitigation]") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int inst = 0; inst < 10; ++inst) {
    // Weakly diagonal matrices push the unconstrained inverse outside the box.
    const RMatrix t = random_stochastic(rng, 3, 0.1);
    RVector y(3);
    for (int i = 0; i < 3; ++i) y(i) = u(rng);
    const auto r = reconstruct(y, t);
    const double ref = grid_minimum(y, forward_map(t, Orientation::Transposed));
    CHECK(r.objective <= ref + 1e-6);
    CHECK(r.objective >= ref - 1e-6);
    CHECK(r.x.minCoeff() >= 0.0);
    CHECK(r.x.maxCoeff() <= 1.0);
  }
}

TEST_CASE("objective history is monotone", "[mitigation]") {
  std::mt19937_64 rng(3);
  const RMatrix t = random_stochastic(rng, 9, 0.05);
  RVector y = RVector::Constant(9, 0.0);
  y(0) = 0.7;
  y(4) = 0.3;
  const auto r = reconstruct(y, t);
  REQUIRE_FALSE(r.history.empty());
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] + 1e-15);
  CHECK(r.projected_gradient <= 1e-10);
}

TEST_CASE("orientations differ for asymmetric matrices", "[mitigation]") {
  RMatrix t(2, 2);
  t << 0.9, 0.1, 0.3, 0.7;
  CHECK((forward_map(t, Orientation::Transposed) - t.transpose()).norm() == 0.0);
  CHECK((forward_map(t, Orientation::Literal) - t).norm() == 0.0);
  RVector y(2);
  y << 0.6, 0.4;
  MitigationOptions lit;
  lit.orientation = Orientation::Literal;
  CHECK((reconstruct(y, t).x - reconstruct(y, t, lit).x).norm() > 1e-3);
}

TEST_CASE("normalization and warnings", "[mitigation]") {
  RMatrix t(2, 2);
  t << 0.5005, 0.4995, 0.4995, 0.5005;
  RVector y(2);
  y << 0.5, 0.5;
  MitigationOptions o;
  o.normalize = true;
  const auto r = reconstruct(y, t, o);
  CHECK(r.condition > 1e3);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.x.sum() == Catch::Approx(1.0));
}

TEST_CASE("invalid inputs are rejected", "[mitigation]") {
  RMatrix t = RMatrix::Identity(3, 3);
  t(0, 1) = 0.2;
  RVector y = RVector::Constant(3, 0.3);
  CHECK_THROWS_AS(reconstruct(y, t), ValidationError);
  RVector out = RVector::Constant(3, 0.3);
  out(1) = 1.2;
  CHECK_THROWS_AS(reconstruct(out, RMatrix::Identity(3, 3)), ValidationError);
  CHECK_THROWS_AS(reconstruct(RVector::Constant(2, 0.5), RMatrix::Identity(3, 3)), ValidationError);
}

TEST_CASE("mitigate_trace inverts a synthetic confusion", "[mitigation]") {
  std::mt19937_64 rng(17);
  const RMatrix t = random_stochastic(rng, 9, 0.8);
  RamseyTrace tr;
  tr.backend = "shots";
  tr.tracked = {1, 4};
  for (int k = 0; k < 8; ++k) {
    RVector x = RVector::Zero(9);
    x(1) = 0.5 + 0.5 * std::cos(k * kPi / 4);
    x(4) = 1.0 - x(1);
    tr.phi.push_back(k * kPi / 4);
    tr.populations.push_back(t.transpose() * x);
  }
  const auto m = mitigate_trace(tr, t);
  CHECK(m.trace.mitigated);
  CHECK(m.trace.backend == "shots+mitigated");
  for (int k = 0; k < 8; ++k) CHECK(m.trace.populations[k](1) == Catch::Approx(0.5 + 0.5 * std::cos(k * kPi / 4)).margin(1e-6));
  CHECK(m.max_residual < 1e-8);
}
