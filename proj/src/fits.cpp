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

#include "qswap/fits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qswap {

LmResult levenberg_marquardt(const ResidualFn& fn, int n_residuals, RVector p0, const LmOptions& options) {
  const int np = static_cast<int>(p0.size());
  LmResult res;
  RVector r(n_residuals), r_new(n_residuals);
  RMatrix jac(n_residuals, np);
  RVector p = std::move(p0);
  fn(p, r, &jac);
  double rss = r.squaredNorm();
  double lambda = -1.0;

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const RMatrix jtj = jac.transpose() * jac;
    const RVector g = jac.transpose() * r;
    if (lambda < 0) lambda = 1e-3 * std::max(jtj.diagonal().maxCoeff(), 1e-300);
    if (g.lpNorm<Eigen::Infinity>() <= options.tolerance * std::max(rss, 1e-300)) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    bool tiny_step = false;
    for (int inner = 0; inner < 40; ++inner) {
      RMatrix a = jtj;
      for (int i = 0; i < np; ++i) a(i, i) += lambda * std::max(jtj(i, i), 1e-30);
      const RVector delta = a.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 10;
        continue;
      }
      const RVector p_new = p + delta;
      fn(p_new, r_new, nullptr);
      const double rss_new = r_new.allFinite() ? r_new.squaredNorm() : std::numeric_limits<double>::infinity();
      if (rss_new < rss) {
        const double drel = (rss - rss_new) / std::max(rss, 1e-300);
        tiny_step = delta.norm() <= options.tolerance * (p.norm() + options.tolerance) || drel <= options.tolerance;
        p = p_new;
        rss = rss_new;
        fn(p, r, &jac);
        lambda = std::max(lambda / 3.0, 1e-20);
        accepted = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e20) break;
    }
    if (!accepted || tiny_step) {
      // No downhill step left: a stationary point (or a flat valley) has been reached.
      res.converged = accepted || rss <= 1e-300 || lambda > 1e20;
      ++it;
      break;
    }
  }
  res.params = p;
  res.rss = rss;
  res.iterations = it;
  const int dof = std::max(1, n_residuals - np);
  const RMatrix jtj = jac.transpose() * jac;
  Eigen::FullPivLU<RMatrix> lu(jtj);
  if (lu.isInvertible()) {
    res.covariance = lu.inverse() * (rss / dof);
  } else {
    res.covariance = RMatrix::Constant(np, np, std::numeric_limits<double>::infinity());
  }
  return res;
}

std::string model_name(DecoherenceModel model) {
  switch (model) {
    case DecoherenceModel::T1: return "T1";
    case DecoherenceModel::T2Star: return "T2star";
    case DecoherenceModel::T2Echo: return "T2echo";
  }
  return "?";
}

DecoherenceModel parse_model(const std::string& name) {
  if (name == "T1" || name == "t1") return DecoherenceModel::T1;
  if (name == "T2star" || name == "t2star" || name == "T2*") return DecoherenceModel::T2Star;
  if (name == "T2echo" || name == "t2echo" || name == "T2e") return DecoherenceModel::T2Echo;
  throw ValidationError("unknown decoherence model: " + name);
}

double DecoherenceFit::evaluate(double t) const {
  const double env = A * std::exp(-t / T);
  if (model == DecoherenceModel::T2Star) return env * std::cos(kTwoPi * f * t + phi) + m;
  return env + m;
}

namespace {

// Direct Fourier sum over a frequency grid; works for non-uniform sampling.
std::pair<double, Complex> spectral_peak(const std::vector<double>& x, const std::vector<double>& d, bool skip_dc) {
  const int n = static_cast<int>(x.size());
  const double span = x.back() - x.front();
  double min_dx = span;
  for (int i = 1; i < n; ++i) min_dx = std::min(min_dx, x[i] - x[i - 1]);
  const double fmax = 0.5 / std::max(min_dx, 1e-300);
  const double df = 1.0 / (8.0 * span);
  const int nf = std::min(200000, static_cast<int>(std::ceil(fmax / df)) + 1);
  double best_f = 0.0, best_p = -1.0;
  Complex best_s{};
  for (int k = skip_dc ? 1 : 0; k < nf; ++k) {
    const double f = k * df;
    Complex s{};
    for (int i = 0; i < n; ++i) s += d[i] * std::exp(-kI * (kTwoPi * f * x[i]));
    if (std::norm(s) > best_p) {
      best_p = std::norm(s);
      best_f = f;
      best_s = s;
    }
  }
  return {best_f, best_s};
}

void check_grid(const std::vector<double>& t, const std::vector<double>& y, std::size_t min_points) {
  if (t.size() != y.size()) throw ValidationError("fit: t and y lengths differ");
  if (t.size() < min_points) throw ValidationError("fit: too few points");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw ValidationError("fit: t must be strictly increasing");
  }
}

}  // namespace

DecoherenceFit fit_decoherence(const std::vector<double>& t, const std::vector<double>& y, DecoherenceModel model) {
  check_grid(t, y, 10);
  const int n = static_cast<int>(t.size());
  const double t0 = t.front(), span = t.back() - t.front();
  const int tail = std::max(1, n / 10);
  const double m0 = std::accumulate(y.end() - tail, y.end(), 0.0) / tail;

  DecoherenceFit fit;
  fit.model = model;
  const bool osc = model == DecoherenceModel::T2Star;
  // Parameters: [A, rate = 1/T, m] or [A, rate, f, phi, m]. Using the rate keeps the problem smooth as T grows.
  ResidualFn fn = [&](const RVector& p, RVector& r, RMatrix* jac) {
    for (int i = 0; i < n; ++i) {
      const double e = std::exp(-t[i] * p(1));
      if (!osc) {
        r(i) = p(0) * e + p(2) - y[i];
        if (jac) {
          (*jac)(i, 0) = e;
          (*jac)(i, 1) = -t[i] * p(0) * e;
          (*jac)(i, 2) = 1.0;
        }
      } else {
        const double arg = kTwoPi * p(2) * t[i] + p(3);
        const double c = std::cos(arg), s = std::sin(arg);
        r(i) = p(0) * e * c + p(4) - y[i];
        if (jac) {
          (*jac)(i, 0) = e * c;
          (*jac)(i, 1) = -t[i] * p(0) * e * c;
          (*jac)(i, 2) = -p(0) * e * s * kTwoPi * t[i];
          (*jac)(i, 3) = -p(0) * e * s;
          (*jac)(i, 4) = 1.0;
        }
      }
    }
  };

  std::vector<RVector> starts;
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = y[i] - m0;
  const double a0 = d[0];
  double tcross = span / 2.0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(d[i]) <= std::abs(a0) / std::exp(1.0)) {
      tcross = std::max(t[i] - t0, span / n);
      break;
    }
  }
  if (!osc) {
    for (double scale : {1.0, 0.5, 2.0}) {
      RVector p(3);
      p << a0 * std::exp(t0 / (tcross * scale)), 1.0 / (tcross * scale), m0;
      starts.push_back(p);
    }
  } else {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    std::vector<double> dm(n);
    for (int i = 0; i < n; ++i) dm[i] = y[i] - mean;
    auto [f0, s] = spectral_peak(t, dm, true);
    double amax = 0.0;
    for (int i = 0; i < std::max(2, n / 10); ++i) amax = std::max(amax, std::abs(dm[i]));
    for (double tau : {span / 3.0, span / 6.0, span}) {
      RVector p(5);
      p << amax * std::exp(t0 / tau), 1.0 / tau, f0, std::arg(s), mean;
      starts.push_back(p);
    }
  }

  LmResult best;
  best.rss = std::numeric_limits<double>::infinity();
  for (const auto& p0 : starts) {
    if (!p0.allFinite()) continue;
    LmResult r = levenberg_marquardt(fn, n, p0);
    if (r.rss < best.rss) best = r;
  }
  if (!std::isfinite(best.rss)) {
    fit.diagnostics = "no finite starting point";
    return fit;
  }
  const RVector& p = best.params;
  auto err = [&](int k) { return std::sqrt(std::max(0.0, best.covariance(k, k))); };
  fit.A = p(0);
  fit.rss = best.rss;
  fit.iterations = best.iterations;
  fit.converged = best.converged;
  const double rate = p(1);
  fit.T = 1.0 / rate;
  fit.err_A = err(0);
  fit.err_T = err(1) / (rate * rate);
  if (osc) {
    fit.f = p(2);
    fit.phi = p(3);
    fit.m = p(4);
    fit.err_f = err(2);
    fit.err_phi = err(3);
    fit.err_m = err(4);
    if (fit.f < 0) {
      fit.f = -fit.f;
      fit.phi = -fit.phi;
    }
    if (fit.A < 0) {
      fit.A = -fit.A;
      fit.phi += kPi;
    }
    fit.phi = wrap_phase(fit.phi);
  } else {
    fit.m = p(2);
    fit.err_m = err(2);
  }
  fit.err_T_frac = (rate > 0 && std::isfinite(fit.err_T)) ? fit.err_T / fit.T : std::numeric_limits<double>::infinity();
  if (!fit.converged) fit.diagnostics = "optimizer did not converge";
  else if (!(rate > 0)) fit.diagnostics = "non-decaying fit";
  else if (!(fit.err_T_frac <= DecoherenceFit::kMaxRelativeError)) fit.diagnostics = "relative error of T above limit";
  fit.accepted = fit.converged && rate > 0 && fit.err_T_frac <= DecoherenceFit::kMaxRelativeError;
  return fit;
}

SinusoidFit fit_sinusoid(const std::vector<double>& x, const std::vector<double>& y) {
  check_grid(x, y, 4);
  const int n = static_cast<int>(x.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  SinusoidFit out;
  out.offset = mean;
  if (*hi - *lo < 1e-9) {
    out.converged = true;
    return out;
  }
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = y[i] - mean;
  // The DC bin is kept: a slow oscillation with less than one period in the window peaks there.
  auto [f0, s] = spectral_peak(x, d, false);
  ResidualFn fn = [&](const RVector& p, RVector& r, RMatrix* jac) {
    for (int i = 0; i < n; ++i) {
      const double arg = kTwoPi * p(1) * x[i] + p(2);
      const double c = std::cos(arg), sn = std::sin(arg);
      r(i) = p(0) * c + p(3) - y[i];
      if (jac) {
        (*jac)(i, 0) = c;
        (*jac)(i, 1) = -p(0) * sn * kTwoPi * x[i];
        (*jac)(i, 2) = -p(0) * sn;
        (*jac)(i, 3) = 1.0;
      }
    }
  };
  const double span = x.back() - x.front();
  LmResult best;
  best.rss = std::numeric_limits<double>::infinity();
  for (double fs : {f0, f0 + 0.25 / span, std::max(0.0, f0 - 0.25 / span)}) {
    RVector p(4);
    p << 0.5 * (*hi - *lo), fs, std::arg(s), mean;
    LmResult r = levenberg_marquardt(fn, n, p);
    if (r.rss < best.rss) best = r;
  }
  double a = best.params(0), f = best.params(1), ph = best.params(2);
  if (f < 0) {
    f = -f;
    ph = -ph;
  }
  if (a < 0) {
    a = -a;
    ph += kPi;
  }
  out.amplitude = a;
  out.frequency = f;
  out.phase = wrap_phase(ph);
  out.offset = best.params(3);
  out.rss = best.rss;
  out.converged = best.converged;
  return out;
}

int doane_bins(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n < 3) throw ValidationError("doane_bins: need at least three samples");
  const double nd = static_cast<double>(n);
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / nd;
  double m2 = 0.0, m3 = 0.0;
  for (double s : samples) {
    const double d = s - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= nd;
  m3 /= nd;
  if (!(m2 > 1e-300 * (1.0 + mean * mean))) return 1;
  const double gamma = m3 / std::pow(m2, 1.5);
  const double sigma = std::sqrt(6.0 * (nd - 2.0) / ((nd + 1.0) * (nd + 3.0)));
  const double k = 1.0 + std::log2(nd) + std::abs(gamma) / sigma;
  return std::max(1, static_cast<int>(std::lround(k)));
}

double propagate_frequency_error(const std::vector<double>& coeffs, const std::vector<double>& errors) {
  if (coeffs.size() != errors.size()) throw ValidationError("propagate_frequency_error: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * coeffs[i] * errors[i] * errors[i];
  return std::sqrt(s);
}

Detunings detuning_presets(const DetuningInputs& in) {
  return {in.f12_q1 - in.f01_q2 - in.f_cz, (in.f01_q1 - in.f01_q2) - in.f_iswap};
}

double detuning_error_cz(double err_f12_q1, double err_f01_q2, double err_f_cz) {
  return propagate_frequency_error({-1.0, 1.0, -1.0}, {err_f12_q1, err_f01_q2, err_f_cz});
}

double detuning_error_iswap(double err_f01_q1, double err_f01_q2, double err_f_iswap) {
  return propagate_frequency_error({1.0, 1.0, -1.0}, {err_f01_q1, err_f01_q2, err_f_iswap});
}

}  // namespace qswap
