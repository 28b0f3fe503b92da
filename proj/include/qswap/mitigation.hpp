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

#include <string>
#include <vector>

#include "qswap/ramsey.hpp"
#include "qswap/types.hpp"

namespace qswap {

// A confusion matrix is stored with prepared states as rows. Transposed (the default) uses the
// forward map y = T^T x, so each prepared column spreads over measured outcomes; Literal uses
// y = T x as written.
enum class Orientation { Transposed, Literal };

struct MitigationOptions {
  Orientation orientation = Orientation::Transposed;
  bool normalize = false;  // rescale x to unit sum after solving
  double tolerance = 1e-10;  // projected-gradient infinity norm
  int max_iterations = 10000;
  double condition_warning = 1e3;
};

struct MitigationResult {
  RVector x;
  double objective = 0.0;  // 0.5 |y - M x|^2
  double residual = 0.0;   // |y - M x|
  double projected_gradient = 0.0;
  double condition = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // objective after every iteration
  std::vector<std::string> warnings;
};

// Forward map M for the chosen orientation.
RMatrix forward_map(const RMatrix& t, Orientation orientation);

// min 0.5 |y - M x|^2 subject to 0 <= x_i <= 1, by a projected Newton / active-set iteration with a
// projected-gradient fallback. Throws ValidationError for a non-stochastic T or y outside [0, 1],
// NumericalError (with the residual) if it does not converge.
MitigationResult reconstruct(const RVector& y, const RMatrix& t, const MitigationOptions& options = {});

// Applies reconstruct to every point. Warnings are collected once.
struct MitigatedTrace {
  RamseyTrace trace;
  double max_residual = 0.0;
  std::vector<std::string> warnings;
};
MitigatedTrace mitigate_trace(const RamseyTrace& trace, const RMatrix& t, const MitigationOptions& options = {},
                              int threads = 1);

}  // namespace qswap
