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

#include <functional>
#include <string>
#include <vector>

#include "qswap/types.hpp"

namespace qswap {

// Residual r(p) and (optionally) its Jacobian dr/dp.
using ResidualFn = std::function<void(const RVector& p, RVector& r, RMatrix* jac)>;

struct LmOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;  // relative RSS change and relative step size
};

struct LmResult {
  RVector params;
  RMatrix covariance;  // s^2 (J^T J)^-1, s^2 = RSS / (n - p)
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt with Marquardt diagonal scaling.
LmResult levenberg_marquardt(const ResidualFn& fn, int n_residuals, RVector p0, const LmOptions& options = {});

enum class DecoherenceModel { T1, T2Star, T2Echo };

std::string model_name(DecoherenceModel model);
DecoherenceModel parse_model(const std::string& name);

// Y = A exp(-t/T) + m, or A exp(-t/T) cos(2 pi f t + phi) + m for T2*.
struct DecoherenceFit {
  DecoherenceModel model = DecoherenceModel::T1;
  double A = 0.0, T = 0.0, f = 0.0, phi = 0.0, m = 0.0;
  double err_A = 0.0, err_T = 0.0, err_f = 0.0, err_phi = 0.0, err_m = 0.0;
  double err_T_frac = 0.0;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
  bool accepted = false;  // converged and err_T / T <= kMaxRelativeError
  std::string diagnostics;

  static constexpr double kMaxRelativeError = 0.15;
  double evaluate(double t) const;
};

DecoherenceFit fit_decoherence(const std::vector<double>& t, const std::vector<double>& y, DecoherenceModel model);

// y = A cos(2 pi f x + phi) + m with A >= 0, f >= 0.
struct SinusoidFit {
  double amplitude = 0.0, frequency = 0.0, phase = 0.0, offset = 0.0;
  double rss = 0.0;
  bool converged = false;
};
SinusoidFit fit_sinusoid(const std::vector<double>& x, const std::vector<double>& y);

// Doane's bin count 1 + log2 N + |g| / sigma_g, rounded to the nearest integer (minimum 1).
int doane_bins(const std::vector<double>& samples);

// sqrt(sum c_i^2 err_i^2).
double propagate_frequency_error(const std::vector<double>& coeffs, const std::vector<double>& errors);

// Inputs for the two drive detunings, all in Hz.
struct DetuningInputs {
  double f01_q1 = 3860.11e6;
  double f01_q2 = 3397.41e6;
  double f12_q1 = 3604.04e6;
  double f_cz = 207.24e6;
  double f_iswap = 461.51e6;
};

struct Detunings {
  double cz = 0.0;     // f12_q1 - f01_q2 - f_cz
  double iswap = 0.0;  // (f01_q1 - f01_q2) - f_iswap
};
Detunings detuning_presets(const DetuningInputs& in);

// Error of each detuning from the errors on its three terms (same order as in the formulas).
double detuning_error_cz(double err_f12_q1, double err_f01_q2, double err_f_cz);
double detuning_error_iswap(double err_f01_q1, double err_f01_q2, double err_f_iswap);

}  // namespace qswap
