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
#include <limits>

#include "qswap/dynamics.hpp"
#include "qswap/fits.hpp"
#include "qswap/parallel.hpp"

namespace qswap {

namespace {

struct Trajectory {
  std::vector<double> times;  // relative to pulse start
  std::vector<double> pop;
};

FluxDrive make_drive(const CalibrationOptions& o, double f, double duration) {
  FluxDrive d;
  d.amplitude = o.amplitude;
  d.frequency_hz = f;
  d.phase = o.phase;
  d.duration = duration;
  return d;
}

CMatrix dressed_state(const PulseEngine& e, int label) {
  CMatrix c = CMatrix::Zero(e.dim(), 1);
  c(label, 0) = 1.0;
  return e.from_rotating(c, 0.0);
}

double dressed_population(const PulseEngine& e, const CMatrix& lab, int label) {
  return std::norm(e.dressed().vectors.col(label).cast<Complex>().dot(lab.col(0)));
}

Trajectory trajectory(const PulseEngine& e, const CalibrationOptions& o, double f, int from, int watch) {
  const FluxDrive d = make_drive(o, f, o.max_duration);
  const auto s = e.sample_flat(dressed_state(e, from), d, 0.0, o.max_duration);
  Trajectory t;
  t.times = s.times;
  for (const auto& st : s.states) t.pop.push_back(dressed_population(e, st, watch));
  return t;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return g;
}

// Population at the flat-time sample matching a full pulse of the given duration.
double at_duration(const Trajectory& t, double duration, double fall) {
  const double s = duration - 0.5 * fall;
  auto it = std::lower_bound(t.times.begin(), t.times.end(), s);
  if (it == t.times.end()) return t.pop.back();
  if (it == t.times.begin()) return t.pop.front();
  const auto k = it - t.times.begin();
  return (s - t.times[k - 1] < t.times[k] - s) ? t.pop[k - 1] : t.pop[k];
}

SweepMap coarse_sweep(const DeviceParams& params, const CalibrationOptions& o, double center, int from, int watch,
                      std::vector<Trajectory>* keep) {
  SweepMap map;
  map.frequencies = grid(center - o.half_window_hz, center + o.half_window_hz, o.frequency_points);
  map.durations = grid(o.min_duration, o.max_duration, o.duration_points);
  map.population.assign(map.frequencies.size(), std::vector<double>(map.durations.size()));
  std::vector<Trajectory> trajs(map.frequencies.size());
  const int nf = static_cast<int>(map.frequencies.size());
  const int chunks = std::max(1, std::min(o.threads, nf));
  parallel_for(chunks, chunks, [&](int c) {
    PulseEngine engine(params, o.dt);
    for (int i = c; i < nf; i += chunks) {
      trajs[i] = trajectory(engine, o, map.frequencies[i], from, watch);
      for (std::size_t j = 0; j < map.durations.size(); ++j) {
        map.population[i][j] = at_duration(trajs[i], map.durations[j], FluxDrive{}.fall);
      }
    }
  });
  if (keep) *keep = std::move(trajs);
  return map;
}

// Vertex of the parabola through (x - h, a), (x, b), (x + h, c), clamped to [x - h, x + h].
double parabola_vertex(double x, double h, double a, double b, double c) {
  const double den = a - 2 * b + c;
  if (std::abs(den) < 1e-300) return x;
  return std::clamp(x + 0.5 * h * (a - c) / den, x - h, x + h);
}

struct Refined {
  double duration = 0.0;
  double value = 0.0;
};

// Maximizes |<watch|U(tau)|from>|^2 over tau near `guess` using exact pulses.
Refined refine_duration(const PulseEngine& e, const CalibrationOptions& o, double f, double guess, int from,
                        int watch) {
  auto value = [&](double tau) {
    const CMatrix u = pulse_subspace_unitary(e, make_drive(o, f, tau), 0.0, {from, watch});
    return std::norm(from == watch ? u(0, 0) : u(1, 0));
  };
  const double h = 3e-9;
  double x = std::max(guess, 2 * FluxDrive{}.rise + h);
  double a = value(x - h), b = value(x), c = value(x + h);
  // One recentring pass if the maximum is at an end.
  for (int pass = 0; pass < 4 && (a > b || c > b); ++pass) {
    if (a > b) {
      x -= h;
      c = b;
      b = a;
      a = value(x - h);
    } else {
      x += h;
      a = b;
      b = c;
      c = value(x + h);
    }
  }
  const double t = parabola_vertex(x, h, a, b, c);
  return {t, value(t)};
}

// Shortest-time sample within 0.2% of the best population after `from_time`.
int best_sample(const Trajectory& t, double from_time) {
  const int n = static_cast<int>(t.pop.size());
  double best = -1.0;
  for (int k = 0; k < n; ++k) {
    if (t.times[k] >= from_time) best = std::max(best, t.pop[k]);
  }
  for (int k = 0; k < n; ++k) {
    if (t.times[k] >= from_time && t.pop[k] >= best - 0.002) return k;
  }
  return n - 1;
}

template <class F>
double golden_max(F&& fn, double lo, double hi, int iterations) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = fn(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = fn(x2);
    }
  }
  return f1 > f2 ? x1 : x2;
}

CalibrationOptions with_amplitude(CalibrationOptions o, double fallback) {
  if (o.amplitude == 0.0) o.amplitude = fallback;
  return o;
}

void check_options(const DeviceParams& params, const CalibrationOptions& o) {
  params.validate();
  if (params.g_hz[0] <= 0 || params.g_hz[1] <= 0) throw ValidationError("calibration needs nonzero couplings");
  if (o.frequency_points < 3 || o.duration_points < 2) throw ValidationError("calibration grid too small");
  if (!(o.max_duration > o.min_duration) || o.min_duration <= 0) throw ValidationError("bad duration window");
  if (!(o.half_window_hz > 0)) throw ValidationError("bad frequency window");
  if (!(o.amplitude > 0)) throw ValidationError("drive amplitude must be positive");
}

}  // namespace

ISwapCalibration calibrate_iswap(const DeviceParams& params, const CalibrationOptions& options) {
  const CalibrationOptions o = with_amplitude(options, kDefaultISwapAmplitude);
  check_options(params, o);
  const int l10 = fock_index(params, 1, 0, 0), l01 = fock_index(params, 0, 1, 0);
  const double center = params.f01_hz[0] - params.f01_hz[1];
  SweepMap map = coarse_sweep(params, o, center, l10, l01, nullptr);

  double pmax = 0.0;
  for (const auto& row : map.population) pmax = std::max(pmax, *std::max_element(row.begin(), row.end()));
  if (pmax < 0.95) throw CalibrationError("iSWAP: no transfer >= 95% in the sweep window", map);
  // Shortest duration among points within 0.2% of the best transfer.
  std::size_t bi = 0, bj = map.durations.size();
  for (std::size_t j = 0; j < map.durations.size() && bj == map.durations.size(); ++j) {
    double best = -1.0;
    for (std::size_t i = 0; i < map.frequencies.size(); ++i) {
      if (map.population[i][j] >= pmax - 0.002 && map.population[i][j] > best) {
        best = map.population[i][j];
        bi = i;
        bj = j;
      }
    }
  }
  const double df = map.frequencies[1] - map.frequencies[0];
  const double fall = FluxDrive{}.fall;
  PulseEngine engine(params, o.dt);
  // The transfer maximum is narrow in frequency, so scan finely before the local search.
  auto sampled = [&](double f) {
    const Trajectory t = trajectory(engine, o, f, l10, l01);
    const int k = best_sample(t, o.min_duration - 0.5 * fall);
    return std::make_pair(t.pop[k], t.times[k]);
  };
  const double fine = df / 10.0;
  double f_fine = map.frequencies[bi], v_fine = -1.0;
  for (int k = -10; k <= 10; ++k) {
    const double f = map.frequencies[bi] + k * fine;
    const double v = sampled(f).first;
    if (v > v_fine) {
      v_fine = v;
      f_fine = f;
    }
  }
  const double f_best = golden_max([&](double f) { return sampled(f).first; }, f_fine - fine, f_fine + fine, 10);
  const Refined r = refine_duration(engine, o, f_best, sampled(f_best).second + 0.5 * fall, l10, l01);
  if (r.value < 0.95) throw CalibrationError("iSWAP: refinement lost the transfer", map);

  ISwapCalibration cal;
  cal.frequency_hz = f_best;
  cal.duration = r.duration;
  cal.amplitude = o.amplitude;
  cal.transfer = r.value;
  cal.unitary = pulse_subspace_unitary(engine, make_drive(o, f_best, r.duration), 0.0, computational_labels(params));
  const LocalPhaseFit fit = fit_local_phases(cal.unitary, standard_gate(GateKind::iSWAP));
  cal.fidelity = fit.fidelity;
  cal.phi_comp = fit.phases;
  cal.coupler_phase = wrap_phase(fit.phases[1] - fit.phases[0]);
  cal.detuning_hz = center - f_best;
  cal.map = std::move(map);
  return cal;
}

CZCalibration calibrate_cz(const DeviceParams& params, const CalibrationOptions& options) {
  const CalibrationOptions o = with_amplitude(options, kDefaultCZAmplitude);
  check_options(params, o);
  const int l11 = fock_index(params, 1, 1, 0);
  const double center = params.f12_hz(0) - params.f01_hz[1];
  std::vector<Trajectory> trajs;
  SweepMap map = coarse_sweep(params, o, center, l11, l11, &trajs);

  // Resonance: deepest depletion of |11>.
  std::size_t bi = 0;
  double dip = 2.0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const double m = *std::min_element(trajs[i].pop.begin(), trajs[i].pop.end());
    if (m < dip) {
      dip = m;
      bi = i;
    }
  }
  if (dip > 0.05) throw CalibrationError("CZ: no |11> -> |20> transfer >= 95% in the sweep window", map);

  const double df = map.frequencies[1] - map.frequencies[0];
  const double fall = FluxDrive{}.fall;
  PulseEngine engine(params, o.dt);
  const auto labels = computational_labels(params);
  struct Eval {
    double f = 0.0;
    Refined r;
    CMatrix u;
    double g = 0.0;  // conditional phase - pi
  };
  auto evaluate = [&](double f) {
    const Trajectory t = trajectory(engine, o, f, l11, l11);
    // Return time: best return after the deepest depletion (the ripple from coupler micromotion
    // makes local extrema unreliable).
    const int n = static_cast<int>(t.pop.size());
    const int kmin = static_cast<int>(std::min_element(t.pop.begin(), t.pop.end()) - t.pop.begin());
    int kret = n - 1;
    double best_ret = -1.0;
    for (int k = kmin + 1; k < n; ++k) best_ret = std::max(best_ret, t.pop[k]);
    for (int k = kmin + 1; k < n; ++k) {
      if (t.pop[k] >= best_ret - 0.002) {
        kret = k;
        break;
      }
    }
    Eval ev;
    ev.f = f;
    ev.r = refine_duration(engine, o, f, t.times[kret] + 0.5 * fall, l11, l11);
    ev.u = pulse_subspace_unitary(engine, make_drive(o, f, ev.r.duration), 0.0, labels);
    ev.g = wrap_phase(conditional_phase(ev.u) - kPi);
    return ev;
  };

  // Bracket the root of (conditional phase - pi) around the resonance, then bisect.
  std::vector<Eval> evs;
  for (int k = -2; k <= 2; ++k) evs.push_back(evaluate(map.frequencies[bi] + 0.5 * k * df));
  Eval best = *std::min_element(evs.begin(), evs.end(),
                                [](const Eval& a, const Eval& b) { return std::abs(a.g) < std::abs(b.g); });
  for (std::size_t k = 0; k + 1 < evs.size(); ++k) {
    if ((evs[k].g <= 0) != (evs[k + 1].g <= 0) && evs[k].r.value > 0.5 && evs[k + 1].r.value > 0.5) {
      Eval a = evs[k], b = evs[k + 1];
      for (int it = 0; it < 30 && std::abs(best.g) > 1e-4; ++it) {
        // Illinois-free regula falsi safeguarded by bisection.
        double fm = a.f - a.g * (b.f - a.f) / (b.g - a.g);
        if (!(fm > std::min(a.f, b.f) && fm < std::max(a.f, b.f)) || it % 3 == 2) fm = 0.5 * (a.f + b.f);
        Eval m = evaluate(fm);
        if (std::abs(m.g) < std::abs(best.g)) best = m;
        if ((m.g <= 0) == (a.g <= 0)) a = m; else b = m;
      }
      break;
    }
  }

  CZCalibration cal;
  cal.frequency_hz = best.f;
  cal.duration = best.r.duration;
  cal.amplitude = o.amplitude;
  cal.unitary = best.u;
  cal.return_population = std::norm(best.u(3, 3));
  cal.conditional_phase = conditional_phase(best.u);
  cal.leakage = 1.0 - best.u.col(3).squaredNorm();
  for (int c = 0; c < 4; ++c) cal.max_leakage = std::max(cal.max_leakage, 1.0 - best.u.col(c).squaredNorm());
  const double a0 = std::arg(best.u(0, 0));
  cal.phi_comp = {wrap_phase(-(std::arg(best.u(2, 2)) - a0)), wrap_phase(-(std::arg(best.u(1, 1)) - a0))};
  cal.fidelity = fit_local_phases(best.u, standard_gate(GateKind::CZ)).fidelity;
  cal.detuning_hz = center - best.f;
  cal.map = std::move(map);
  if (cal.return_population < 0.95) throw CalibrationError("CZ: refinement lost the return population", cal.map);
  return cal;
}

TwoQubitFrame measure_two_qubit_frame(const DeviceParams& params, const ISwapCalibration& iswap,
                                      const std::vector<double>& frequencies, const std::vector<double>& delays,
                                      double dt) {
  if (frequencies.size() < 3) throw ValidationError("two-qubit frame: need at least three drive frequencies");
  if (delays.size() < 8) throw ValidationError("two-qubit frame: need at least eight delays");
  for (std::size_t i = 1; i < delays.size(); ++i) {
    if (!(delays[i] > delays[i - 1]) || delays[0] < 0) throw ValidationError("two-qubit frame: bad delay grid");
  }
  if (!(iswap.duration > 0)) throw ValidationError("two-qubit frame: iSWAP not calibrated");

  TwoQubitFrame out;
  out.drive_frequencies = frequencies;
  out.delays = delays;
  out.population.assign(frequencies.size(), std::vector<double>(delays.size()));
  out.fitted_frequencies.assign(frequencies.size(), 0.0);
  const int l = params.levels;

  PulseEngine engine(params, dt);
  const GateOp sx = GateOp::make(GateKind::SqrtX, {0});
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    FluxDrive d;
    d.amplitude = iswap.amplitude;
    d.frequency_hz = frequencies[i];
    d.duration = iswap.duration;
    CMatrix psi = dressed_state(engine, fock_index(params, 0, 0, 0));
    engine.apply_ideal(psi, sx, 0.0);
    engine.drive(psi, d, 0.0);
    for (std::size_t j = 0; j < delays.size(); ++j) {
      CMatrix x = psi;
      engine.idle(x, delays[j]);
      const double t2 = iswap.duration + delays[j];
      engine.drive(x, d, t2);
      const double tend = t2 + iswap.duration;
      engine.apply_ideal(x, sx, tend);
      const CMatrix c = engine.to_rotating(x, tend);
      double p = 0.0;
      for (int n2 = 0; n2 < l; ++n2)
        for (int nc = 0; nc < l; ++nc) p += std::norm(c(fock_index(params, 1, n2, nc), 0));
      out.population[i][j] = p;
    }
    out.fitted_frequencies[i] = fit_sinusoid(delays, out.population[i]).frequency;
  }

  const auto amin = std::min_element(out.fitted_frequencies.begin(), out.fitted_frequencies.end()) -
                    out.fitted_frequencies.begin();
  if (amin == 0 || amin + 1 == static_cast<long>(frequencies.size())) {
    throw NumericalError("two-qubit frame: no zero crossing inside the frequency grid");
  }
  // Each well-resolved column gives f_2qf = f -/+ nu depending on its side of the minimum.
  const double span = delays.back() - delays.front();
  std::vector<double> cands;
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    const double nu = out.fitted_frequencies[i];
    if (static_cast<long>(i) == amin || nu < 1.5 / span) continue;
    cands.push_back(static_cast<long>(i) < amin ? frequencies[i] + nu : frequencies[i] - nu);
  }
  if (cands.size() >= 2) {
    std::sort(cands.begin(), cands.end());
    const std::size_t m = cands.size() / 2;
    out.frequency_hz = cands.size() % 2 ? cands[m] : 0.5 * (cands[m - 1] + cands[m]);
  } else {
    out.frequency_hz = frequencies[amin];
  }
  return out;
}

}  // namespace qswap
