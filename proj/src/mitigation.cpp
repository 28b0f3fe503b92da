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

#include "qswap/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qswap/parallel.hpp"

namespace qswap {

namespace {

void check_stochastic(const RMatrix& t) {
  if (t.rows() != t.cols() || t.rows() == 0) throw ValidationError("mitigation: confusion matrix must be square");
  if (!t.allFinite() || t.minCoeff() < -1e-12) throw ValidationError("mitigation: confusion entries must be >= 0");
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (std::abs(t.row(i).sum() - 1.0) > 1e-6) throw ValidationError("mitigation: confusion rows must sum to 1");
  }
}

RVector project(RVector x) { return x.cwiseMax(0.0).cwiseMin(1.0); }

// Zeroes the components that point out of the box at an active bound.
RVector projected_gradient(const RVector& x, const RVector& g) {
  RVector pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x(i) <= 0.0 && g(i) > 0.0) || (x(i) >= 1.0 && g(i) < 0.0)) pg(i) = 0.0;
  }
  return pg;
}

}  // namespace

RMatrix forward_map(const RMatrix& t, Orientation orientation) {
  return orientation == Orientation::Transposed ? RMatrix(t.transpose()) : t;
}

MitigationResult reconstruct(const RVector& y, const RMatrix& t, const MitigationOptions& o) {
  check_stochastic(t);
  if (y.size() != t.rows()) throw ValidationError("mitigation: y and T differ in dimension");
  if (!y.allFinite() || y.minCoeff() < -1e-12 || y.maxCoeff() > 1.0 + 1e-12) {
    throw ValidationError("mitigation: y entries must lie in [0, 1]");
  }
  if (o.max_iterations < 1 || !(o.tolerance > 0)) throw ValidationError("mitigation: bad solver options");

  const RMatrix m = forward_map(t, o.orientation);
  const int n = static_cast<int>(y.size());
  const RMatrix q = m.transpose() * m;
  const RVector b = m.transpose() * y;
  auto objective = [&](const RVector& x) { return 0.5 * (y - m * x).squaredNorm(); };

  MitigationResult r;
  Eigen::JacobiSVD<RMatrix> svd(m);
  const RVector sv = svd.singularValues();
  r.condition = sv(n - 1) > 0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  if (r.condition > o.condition_warning) {
    std::ostringstream os;
    os << "confusion matrix is ill-conditioned (condition number " << r.condition << ")";
    r.warnings.push_back(os.str());
  }
  const double lipschitz = std::max(sv(0) * sv(0), 1e-300);

  RVector x = project(y);
  double f = objective(x);
  for (int it = 0; it < o.max_iterations; ++it) {
    const RVector g = q * x - b;
    const RVector pg = projected_gradient(x, g);
    r.projected_gradient = pg.cwiseAbs().maxCoeff();
    if (r.projected_gradient <= o.tolerance) {
      r.converged = true;
      break;
    }
    r.iterations = it + 1;

    // Newton step on the free variables.
    std::vector<int> free;
    for (int i = 0; i < n; ++i) {
      if (pg(i) != 0.0 || (x(i) > 0.0 && x(i) < 1.0)) free.push_back(i);
    }
    bool accepted = false;
    if (!free.empty()) {
      const int k = static_cast<int>(free.size());
      RMatrix qf(k, k);
      RVector gf(k);
      for (int a = 0; a < k; ++a) {
        gf(a) = g(free[a]);
        for (int c = 0; c < k; ++c) qf(a, c) = q(free[a], free[c]);
      }
      Eigen::LDLT<RMatrix> ldlt(qf);
      if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-14) {
        const RVector df = ldlt.solve(-gf);
        RVector d = RVector::Zero(n);
        for (int a = 0; a < k; ++a) d(free[a]) = df(a);
        double alpha = 1.0;
        for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
          const RVector xn = project(x + alpha * d);
          const double fn = objective(xn);
          if (fn < f || (fn <= f && (xn - x).cwiseAbs().maxCoeff() > 0)) {
            x = xn;
            f = fn;
            accepted = true;
            break;
          }
        }
      }
    }
    if (!accepted) {
      // 1/L gradient projection never increases the objective.
      const RVector xn = project(x - g / lipschitz);
      const double fn = objective(xn);
      if (fn <= f) {
        x = xn;
        f = fn;
      }
    }
    r.history.push_back(f);
  }

  r.x = x;
  r.objective = f;
  r.residual = (y - m * x).norm();
  if (!r.converged) {
    std::ostringstream os;
    os << "mitigation: no convergence after " << o.max_iterations << " iterations (residual " << r.residual << ")";
    throw NumericalError(os.str());
  }
  if (o.normalize && r.x.sum() > 0) r.x /= r.x.sum();
  return r;
}

MitigatedTrace mitigate_trace(const RamseyTrace& trace, const RMatrix& t, const MitigationOptions& o, int threads) {
  trace.validate();
  MitigatedTrace out;
  out.trace = trace;
  out.trace.mitigated = true;
  if (trace.backend.find("mitigated") == std::string::npos) out.trace.backend = trace.backend + "+mitigated";
  std::vector<MitigationResult> results(trace.populations.size());
  parallel_for(static_cast<int>(results.size()), threads,
               [&](int i) { results[i] = reconstruct(trace.populations[i], t, o); });
  for (std::size_t i = 0; i < results.size(); ++i) {
    out.trace.populations[i] = results[i].x;
    out.max_residual = std::max(out.max_residual, results[i].residual);
  }
  if (!results.empty()) out.warnings = results.front().warnings;
  return out;
}

}  // namespace qswap
