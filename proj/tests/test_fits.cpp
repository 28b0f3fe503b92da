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

#include "qswap/fits.hpp"

using namespace qswap;

namespace {

struct Synthetic {
  std::vector<double> t, y;
};

Synthetic make(DecoherenceModel model, double T, double noise, std::uint64_t seed, int n = 121) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  Synthetic s;
  const double span = model == DecoherenceModel::T2Star ? 3.0 * T : 5.0 * T;
  for (int i = 0; i < n; ++i) {
    const double t = span * i / (n - 1);
    double y = std::exp(-t / T);
    if (model == DecoherenceModel::T2Star) y *= std::cos(kTwoPi * 100e3 * t + 0.3);
    s.t.push_back(t);
    s.y.push_back(y + (noise > 0 ? g(rng) : 0.0));
  }
  return s;
}

double rss(const DecoherenceFit& f, const Synthetic& s) {
  double r = 0.0;
  for (std::size_t i = 0; i < s.t.size(); ++i) r += std::pow(f.evaluate(s.t[i]) - s.y[i], 2);
  return r;
}

}  // namespace

TEST_CASE("Levenberg-Marquardt solves a Rosenbrock-type problem", "[fits]") {
  ResidualFn fn = [](const RVector& p, RVector& r, RMatrix* j) {
    r.resize(2);
    r << 10 * (p(1) - p(0) * p(0)), 1 - p(0);
    if (j) {
      j->resize(2, 2);
      *j << -20 * p(0), 10, -1, 0;
    }
  };
  RVector p0(2);
  p0 << -1.2, 1.0;
  const auto res = levenberg_marquardt(fn, 2, p0);
  CHECK(res.converged);
  CHECK(res.params(0) == Catch::Approx(1.0).margin(1e-8));
  CHECK(res.params(1) == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("noiseless T1 is recovered within 0.1%", "[fits]") {
  const auto s = make(DecoherenceModel::T1, 77e-6, 0.0, 0);
  const auto f = fit_decoherence(s.t, s.y, DecoherenceModel::T1);
  CHECK(f.accepted);
  CHECK(f.T == Catch::Approx(77e-6).epsilon(1e-3));
}

TEST_CASE("decoherence times recovered within 2% at 1% noise", "[fits]") {
  const std::pair<DecoherenceModel, double> cases[] = {
      {DecoherenceModel::T1, 77e-6}, {DecoherenceModel::T2Star, 37e-6}, {DecoherenceModel::T2Echo, 93e-6}};
  for (const auto& [model, T] : cases) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto s = make(model, T, 0.01, seed);
      const auto f = fit_decoherence(s.t, s.y, model);
      INFO(model_name(model) << " seed " << seed);
      CHECK(f.accepted);
      CHECK(f.T == Catch::Approx(T).epsilon(0.02));
      if (model == DecoherenceModel::T2Star) CHECK(f.f == Catch::Approx(100e3).epsilon(0.01));
    }
  }
}

TEST_CASE("fitted parameters are a local minimum", "[fits]") {
  const auto s = make(DecoherenceModel::T2Star, 37e-6, 0.01, 42);
  const auto f = fit_decoherence(s.t, s.y, DecoherenceModel::T2Star);
  const double base = rss(f, s);
  for (int k = 0; k < 5; ++k) {
    for (double sign : {-1.0, 1.0}) {
      DecoherenceFit g = f;
      double* fields[] = {&g.A, &g.T, &g.f, &g.phi, &g.m};
      *fields[k] *= 1.0 + sign * 0.01;
      CHECK(rss(g, s) >= base);
    }
  }
}

TEST_CASE("pure noise is rejected", "[fits]") {
  int rejected = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.5, 0.1);
    std::vector<double> t, y;
    for (int i = 0; i < 100; ++i) {
      t.push_back(i * 3e-6);
      y.push_back(g(rng));
    }
    const auto f = fit_decoherence(t, y, DecoherenceModel::T1);
    rejected += f.accepted ? 0 : 1;
  }
  CHECK(rejected >= 95);
}

TEST_CASE("acceptance does not return once noise is large", "[fits]") {
  int monotone = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    bool seen_reject = false, ok = true;
    for (double noise : {0.01, 0.05, 0.1, 0.2, 0.4, 0.8}) {
      const auto s = make(DecoherenceModel::T1, 77e-6, noise, seed, 60);
      const bool acc = fit_decoherence(s.t, s.y, DecoherenceModel::T1).accepted;
      if (seen_reject && acc) ok = false;
      seen_reject |= !acc;
    }
    monotone += ok ? 1 : 0;
  }
  CHECK(monotone >= 95);
}

TEST_CASE("fit input validation", "[fits]") {
  std::vector<double> t{0, 1, 2}, y{1, 0.5, 0.2};
  CHECK_THROWS_AS(fit_decoherence(t, y, DecoherenceModel::T1), ValidationError);
  std::vector<double> t2(12), y2(12, 0.5);
  for (int i = 0; i < 12; ++i) t2[i] = 12 - i;
  CHECK_THROWS_AS(fit_decoherence(t2, y2, DecoherenceModel::T1), ValidationError);
  CHECK(parse_model("T2e") == DecoherenceModel::T2Echo);
  CHECK_THROWS_AS(parse_model("t3"), ValidationError);
}

TEST_CASE("Doane bin counts", "[fits]") {
  std::vector<double> sym;
  for (int i = 0; i < 128; ++i) {
    sym.push_back(i + 1.0);
    sym.push_back(-(i + 1.0));
  }
  CHECK(doane_bins(sym) == 9);
  CHECK(doane_bins({-4, -3, -1, 0, 0, 1, 3, 4}) == 4);
  CHECK(doane_bins({2, 2, 2, 2}) == 1);

  std::mt19937_64 rng(1);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> skew;
  for (int i = 0; i < 256; ++i) skew.push_back(e(rng));
  // Direct moment computation.
  double mean = 0, m2 = 0, m3 = 0;
  for (double x : skew) mean += x / 256;
  for (double x : skew) m2 += std::pow(x - mean, 2) / 256, m3 += std::pow(x - mean, 3) / 256;
  const double gamma = m3 / std::pow(m2, 1.5);
  const double sg = std::sqrt(6.0 * 254 / (257.0 * 259.0));
  CHECK(doane_bins(skew) == static_cast<int>(std::lround(1 + 8 + std::abs(gamma) / sg)));
  CHECK(doane_bins(skew) > 9);

  std::vector<double> scaled;
  for (double x : skew) scaled.push_back(-3.5 * x + 100.0);
  CHECK(doane_bins(scaled) == doane_bins(skew));
}

TEST_CASE("frequency error propagation", "[fits]") {
  CHECK(detuning_error_cz(190e3, 156e3, 10e3) == Catch::Approx(246e3).margin(1e3));
  CHECK(detuning_error_iswap(156e3, 156e3, 82e3) == Catch::Approx(235e3).margin(1e3));
  CHECK(propagate_frequency_error({1, -1, 1}, {0, 0, 0}) == 0.0);
  CHECK(propagate_frequency_error({-1, 1, -1}, {3, 4, 12}) == propagate_frequency_error({1, 1, 1}, {3, 4, 12}));
  CHECK_THROWS_AS(propagate_frequency_error({1}, {1, 2}), ValidationError);
}

TEST_CASE("detuning presets reproduce the device table", "[fits]") {
  const auto d = detuning_presets({});
  CHECK(d.cz == Catch::Approx(-0.61e6).margin(0.01e6));
  CHECK(d.iswap == Catch::Approx(1.19e6).margin(0.01e6));
  DetuningInputs at;
  at.f_iswap = at.f01_q1 - at.f01_q2;
  at.f_cz = at.f12_q1 - at.f01_q2;
  CHECK(detuning_presets(at).cz == 0.0);
  CHECK(detuning_presets(at).iswap == 0.0);
}
