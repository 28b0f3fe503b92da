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
#include <memory>
#include <mutex>
#include <vector>

#include "qswap/dynamics.hpp"

namespace qswap {

namespace {

constexpr double kTableTheta0 = 0.5 * kPi;  // carrier phase where Phi = Phi_DC
constexpr int kMaxTableSteps = 60000;
constexpr std::size_t kTableCacheSize = 4;

// Triple-jump weights.
const double kW1 = 1.0 / (2.0 - std::cbrt(2.0));
const double kW0 = -std::cbrt(2.0) * kW1;

struct BlockState {
  CMatrix e, o;
};

struct Kernel {
  double h = 0.0;
  CMatrix b1e, b1o, b0e, b0o;
  CVector pa1e, pa1o, pa2e, pa2o;
};

CMatrix expm_sym(const RMatrix& v, const RVector& lambda, double tau) {
  CVector d(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) d(k) = std::exp(-kI * lambda(k) * tau);
  return v.cast<Complex>() * d.asDiagonal() * v.transpose().cast<Complex>();
}

}  // namespace

double FluxDrive::envelope(double s) const {
  if (s < 0.0 || s > duration) return 0.0;
  auto flank = [](double x, double width) {
    // Gaussian flank reaching 1 at x = width, shifted so it starts from exactly 0.
    const double sigma = width / 3.0;
    const double base = std::exp(-width * width / (2 * sigma * sigma));
    const double g = std::exp(-(x - width) * (x - width) / (2 * sigma * sigma));
    return (g - base) / (1.0 - base);
  };
  if (rise > 0 && s < rise) return flank(s, rise);
  if (fall > 0 && s > duration - fall) return flank(duration - s, fall);
  return 1.0;
}

void FluxDrive::validate(double phi_dc) const {
  if (!(amplitude >= 0)) throw ValidationError("flux drive amplitude must be non-negative");
  if (!(frequency_hz >= 0)) throw ValidationError("flux drive frequency must be non-negative");
  if (rise < 0 || fall < 0) throw ValidationError("flux drive rise/fall must be non-negative");
  if (!(duration >= rise + fall)) throw ValidationError("flux drive shorter than its rise and fall");
  if (std::abs(phi_dc) + amplitude >= 0.5) throw ValidationError("flux excursion reaches half a flux quantum");
}

double PulseSchedule::end_time() const {
  double end = 0.0;
  for (const auto& e : entries) {
    const double d = std::holds_alternative<FluxDrive>(e.item) ? std::get<FluxDrive>(e.item).duration
                                                               : std::get<GateOp>(e.item).duration;
    end = std::max(end, e.start + d);
  }
  return end;
}

struct PulseEngine::Impl {
  int levels = 3;
  int ne = 0, no = 0;
  std::vector<int> even_idx, odd_idx;
  RVector es_e, es_o;  // static diagonal without the coupler linear term
  std::vector<int> nc_e, nc_o;
  RMatrix ve, vo;
  RVector le, lo;
  double wc0 = 0.0;
  double phi_dc = 0.0;
  double dt_max = 1e-12;

  struct Table {
    double f = 0.0, amplitude = 0.0;
    int n = 0;
    double h = 0.0;
    std::vector<BlockState> t;  // t[j] = propagator over j grid steps from theta0
  };
  mutable std::mutex cache_mutex;
  mutable std::vector<std::shared_ptr<const Table>> cached;  // most recent last

  double omega_c(double phi) const { return wc0 * std::sqrt(std::abs(std::cos(kPi * phi))); }

  Kernel kernel(double h) const {
    Kernel k;
    k.h = h;
    k.b1e = expm_sym(ve, le, kW1 * h);
    k.b1o = expm_sym(vo, lo, kW1 * h);
    k.b0e = expm_sym(ve, le, kW0 * h);
    k.b0o = expm_sym(vo, lo, kW0 * h);
    const double c1 = 0.5 * kW1 * h, c2 = 0.5 * (kW1 + kW0) * h;
    auto phases = [](const RVector& e, double tau) {
      CVector p(e.size());
      for (Eigen::Index i = 0; i < e.size(); ++i) p(i) = std::exp(-kI * e(i) * tau);
      return p;
    };
    k.pa1e = phases(es_e, c1);
    k.pa1o = phases(es_o, c1);
    k.pa2e = phases(es_e, c2);
    k.pa2o = phases(es_o, c2);
    return k;
  }

  void a_flow(BlockState& x, const CVector& pe, const CVector& po, double integral) const {
    Complex zp[8];
    const Complex z = std::exp(-kI * integral);
    zp[0] = 1.0;
    for (int n = 1; n < levels; ++n) zp[n] = zp[n - 1] * z;
    for (int r = 0; r < ne; ++r) x.e.row(r) *= pe(r) * zp[nc_e[r]];
    for (int r = 0; r < no; ++r) x.o.row(r) *= po(r) * zp[nc_o[r]];
  }

  static void b_flow(BlockState& x, const CMatrix& be, const CMatrix& bo, BlockState& tmp) {
    tmp.e.noalias() = be * x.e;
    tmp.o.noalias() = bo * x.o;
    x.e.swap(tmp.e);
    x.o.swap(tmp.o);
  }

  template <class F>
  static double simpson(const F& w, double a, double b) {
    return (b - a) / 6.0 * (w(a) + 4.0 * w(0.5 * (a + b)) + w(b));
  }

  template <class F>
  void step(BlockState& x, double t, const Kernel& k, const F& w, BlockState& tmp) const {
    const double c1 = 0.5 * kW1 * k.h, c2 = 0.5 * (kW1 + kW0) * k.h;
    const double b1 = t + c1, b2 = b1 + c2, b3 = b2 + c2, b4 = t + k.h;
    a_flow(x, k.pa1e, k.pa1o, simpson(w, t, b1));
    b_flow(x, k.b1e, k.b1o, tmp);
    a_flow(x, k.pa2e, k.pa2o, simpson(w, b1, b2));
    b_flow(x, k.b0e, k.b0o, tmp);
    a_flow(x, k.pa2e, k.pa2o, simpson(w, b2, b3));
    b_flow(x, k.b1e, k.b1o, tmp);
    a_flow(x, k.pa1e, k.pa1o, simpson(w, b3, b4));
  }

  template <class F>
  void integrate(BlockState& x, double ta, double tb, const F& w) const {
    const double len = tb - ta;
    if (!(len > 0)) return;
    const int n = std::max(1, static_cast<int>(std::ceil(len / dt_max - 1e-9)));
    const double h = len / n;
    const Kernel k = kernel(h);
    BlockState tmp;
    for (int j = 0; j < n; ++j) step(x, ta + j * h, k, w, tmp);
  }

  BlockState to_blocks(const CMatrix& s) const {
    BlockState x;
    x.e.resize(ne, s.cols());
    x.o.resize(no, s.cols());
    for (int r = 0; r < ne; ++r) x.e.row(r) = s.row(even_idx[r]);
    for (int r = 0; r < no; ++r) x.o.row(r) = s.row(odd_idx[r]);
    return x;
  }

  void from_blocks(const BlockState& x, CMatrix& s) const {
    for (int r = 0; r < ne; ++r) s.row(even_idx[r]) = x.e.row(r);
    for (int r = 0; r < no; ++r) s.row(odd_idx[r]) = x.o.row(r);
  }

  std::shared_ptr<const Table> table(double f, double amplitude) const {
    if (!(f > 0)) return nullptr;
    const double period = 1.0 / f;
    const int n = static_cast<int>(std::ceil(period / dt_max - 1e-9));
    if (n > kMaxTableSteps) return nullptr;
    std::lock_guard<std::mutex> lock(cache_mutex);
    for (auto it = cached.begin(); it != cached.end(); ++it) {
      if ((*it)->f == f && (*it)->amplitude == amplitude) {
        auto hit = *it;
        cached.erase(it);
        cached.push_back(hit);
        return hit;
      }
    }
    auto tab = std::make_shared<Table>();
    tab->f = f;
    tab->amplitude = amplitude;
    tab->n = n;
    tab->h = period / n;
    const double pd = phi_dc;
    auto w = [this, f, amplitude, pd](double t) { return omega_c(pd + amplitude * std::cos(kTableTheta0 + kTwoPi * f * t)); };
    BlockState x{CMatrix::Identity(ne, ne), CMatrix::Identity(no, no)};
    tab->t.reserve(n + 1);
    tab->t.push_back(x);
    const Kernel k = kernel(tab->h);
    BlockState tmp;
    for (int j = 0; j < n; ++j) {
      step(x, j * tab->h, k, w, tmp);
      tab->t.push_back(x);
    }
    if (cached.size() >= kTableCacheSize) cached.erase(cached.begin());
    cached.push_back(tab);
    return tab;
  }

  static void apply(const BlockState& op, BlockState& x, bool adjoint = false) {
    if (adjoint) {
      x.e = (op.e.adjoint() * x.e).eval();
      x.o = (op.o.adjoint() * x.o).eval();
    } else {
      x.e = (op.e * x.e).eval();
      x.o = (op.o * x.o).eval();
    }
  }

  // Advances by K grid steps starting from grid index j.
  static void jump(const Table& tab, BlockState& x, int j, long long steps) {
    if (steps <= 0) return;
    if (j + steps <= tab.n) {
      apply(tab.t[j], x, true);
      apply(tab.t[j + steps], x);
      return;
    }
    apply(tab.t[j], x, true);
    apply(tab.t[tab.n], x);
    steps -= tab.n - j;
    while (steps >= tab.n) {
      apply(tab.t[tab.n], x);
      steps -= tab.n;
    }
    if (steps > 0) apply(tab.t[steps], x);
  }

  // Fractional position of absolute time t on the table grid.
  static double grid_coord(const Table& tab, const FluxDrive& d, double t) {
    const double x = tab.f * t + (d.phase - kTableTheta0) / kTwoPi;
    return (x - std::floor(x)) * tab.n;
  }

  template <class F>
  void flat(BlockState& x, double ta, double tb, const FluxDrive& d, const F& w) const {
    if (!(tb > ta)) return;
    auto tab = table(d.frequency_hz, d.amplitude);
    if (!tab || tb - ta < 2.0 / d.frequency_hz) {
      integrate(x, ta, tb, w);
      return;
    }
    const double ra = grid_coord(*tab, d, ta);
    double ja = std::ceil(ra - 1e-7);
    const double da = std::max(0.0, (ja - ra) * tab->h);
    const double rb = grid_coord(*tab, d, tb);
    const double jb = std::floor(rb + 1e-7);
    const double db = std::max(0.0, (rb - jb) * tab->h);
    const long long steps = std::llround((tb - db - (ta + da)) / tab->h);
    if (da > 0) integrate(x, ta, ta + da, w);
    int j = static_cast<int>(ja) % tab->n;
    if (j < 0) j += tab->n;
    jump(*tab, x, j, steps);
    if (db > 0) integrate(x, tb - db, tb, w);
  }
};

PulseEngine::PulseEngine(const DeviceParams& params, double dt_max)
    : params_(params), dt_max_(dt_max), dim_(params.dimension()), impl_(std::make_unique<Impl>()) {
  if (!(dt_max > 0)) throw ValidationError("PulseEngine: dt must be positive");
  dressed_ = dressed_basis(params_);
  Impl& m = *impl_;
  m.levels = params_.levels;
  m.dt_max = dt_max;
  m.phi_dc = params_.phi_bias;
  m.wc0 = kTwoPi * params_.f_c0_hz;

  const int l = params_.levels;
  const RMatrix h0 = build_hamiltonian(params_, params_.phi_bias);
  const double wc_bias = m.omega_c(params_.phi_bias);
  std::vector<int> parity(dim_), nc(dim_);
  for (int n1 = 0; n1 < l; ++n1)
    for (int n2 = 0; n2 < l; ++n2)
      for (int c = 0; c < l; ++c) {
        const int k = fock_index(params_, n1, n2, c);
        parity[k] = (n1 + n2 + c) % 2;
        nc[k] = c;
      }
  for (int k = 0; k < dim_; ++k) (parity[k] ? m.odd_idx : m.even_idx).push_back(k);
  m.ne = static_cast<int>(m.even_idx.size());
  m.no = static_cast<int>(m.odd_idx.size());
  auto block = [&](const std::vector<int>& idx, RVector& es, std::vector<int>& ncs, RMatrix& v, RVector& lam) {
    const int n = static_cast<int>(idx.size());
    RMatrix g(n, n);
    es.resize(n);
    ncs.resize(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = i == j ? 0.0 : h0(idx[i], idx[j]);
      es(i) = h0(idx[i], idx[i]) - wc_bias * nc[idx[i]];
      ncs[i] = nc[idx[i]];
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(g);
    v = solver.eigenvectors();
    lam = solver.eigenvalues();
  };
  block(m.even_idx, m.es_e, m.nc_e, m.ve, m.le);
  block(m.odd_idx, m.es_o, m.nc_o, m.vo, m.lo);
}

PulseEngine::~PulseEngine() = default;
PulseEngine::PulseEngine(PulseEngine&&) noexcept = default;
PulseEngine& PulseEngine::operator=(PulseEngine&&) noexcept = default;

void PulseEngine::idle(CMatrix& states, double duration) const {
  if (duration < 0) throw ValidationError("idle: negative duration");
  if (duration == 0) return;
  const RMatrix& w = dressed_.vectors;
  CVector ph(dim_);
  for (int k = 0; k < dim_; ++k) ph(k) = std::exp(-kI * dressed_.energies(k) * duration);
  CMatrix c = w.transpose().cast<Complex>() * states;
  c = ph.asDiagonal() * c;
  states = w.cast<Complex>() * c;
}

void PulseEngine::drive(CMatrix& states, const FluxDrive& d, double start) const {
  if (states.rows() != dim_) throw ValidationError("drive: state dimension mismatch");
  d.validate(params_.phi_bias);
  const Impl& m = *impl_;
  const double pd = params_.phi_bias;
  auto w = [&m, &d, start, pd](double t) {
    return m.omega_c(pd + d.amplitude * d.envelope(t - start) * std::cos(kTwoPi * d.frequency_hz * t + d.phase));
  };
  BlockState x = m.to_blocks(states);
  const double t1 = start + d.rise, t2 = start + d.duration - d.fall, t3 = start + d.duration;
  m.integrate(x, start, t1, w);
  m.flat(x, t1, t2, d, w);
  m.integrate(x, t2, t3, w);
  m.from_blocks(x, states);
}

PulseEngine::FlatSamples PulseEngine::sample_flat(const CMatrix& initial, const FluxDrive& d, double start,
                                                  double max_time) const {
  if (initial.rows() != dim_) throw ValidationError("sample_flat: state dimension mismatch");
  FluxDrive longd = d;
  longd.duration = std::max(d.duration, max_time + d.rise + d.fall + 2.0 / std::max(d.frequency_hz, 1.0));
  longd.validate(params_.phi_bias);
  const Impl& m = *impl_;
  auto tab = m.table(d.frequency_hz, d.amplitude);
  if (!tab) throw ValidationError("sample_flat: drive frequency too low for a one-period table");
  const double pd = params_.phi_bias;
  auto w = [&m, &longd, start, pd](double t) {
    return m.omega_c(pd + longd.amplitude * longd.envelope(t - start) *
                              std::cos(kTwoPi * longd.frequency_hz * t + longd.phase));
  };
  BlockState x = m.to_blocks(initial);
  double t = start + d.rise;
  m.integrate(x, start, t, w);
  const double r = Impl::grid_coord(*tab, longd, t);
  const double delta = r < 1e-9 ? 0.0 : (tab->n - r) * tab->h;
  m.integrate(x, t, t + delta, w);
  t += delta;
  const double period = 1.0 / d.frequency_hz;
  FlatSamples out;
  CMatrix s(dim_, initial.cols());
  for (long long k = 0;; ++k) {
    const double tk = t + k * period;
    if (tk - start > max_time) break;
    if (k > 0) Impl::apply(tab->t[tab->n], x);
    m.from_blocks(x, s);
    out.times.push_back(tk - start);
    out.states.push_back(s);
  }
  return out;
}

CMatrix PulseEngine::to_rotating(const CMatrix& lab, double t) const {
  CMatrix c = dressed_.vectors.transpose().cast<Complex>() * lab;
  for (int k = 0; k < dim_; ++k) c.row(k) *= std::exp(kI * dressed_.energies(k) * t);
  return c;
}

CMatrix PulseEngine::from_rotating(const CMatrix& rot, double t) const {
  CMatrix c = rot;
  for (int k = 0; k < dim_; ++k) c.row(k) *= std::exp(-kI * dressed_.energies(k) * t);
  return dressed_.vectors.cast<Complex>() * c;
}

void PulseEngine::apply_ideal(CMatrix& states, const GateOp& op, double t) const {
  if (op.kind == GateKind::Delay) return;
  for (int s : op.targets) {
    if (s < 0 || s > 1) throw ValidationError("apply_ideal: gates act on qubit sites 0 and 1 only");
  }
  const int l = params_.levels;
  const CMatrix u = op_matrix(op, {l, l, l});
  CMatrix c = to_rotating(states, t);
  c = (u * c).eval();
  states = from_rotating(c, t);
}

double PulseEngine::max_transition_frequency(const FluxDrive& d) const {
  const double lo = params_.phi_bias - d.amplitude, hi = params_.phi_bias + d.amplitude;
  const double phi_closest = (lo <= 0 && hi >= 0) ? 0.0 : (std::abs(lo) < std::abs(hi) ? lo : hi);
  return std::max({params_.f01_hz[0], params_.f01_hz[1], coupler_frequency(phi_closest, params_)});
}

EvolveResult evolve(const CVector& state, const PulseSchedule& schedule, const DeviceParams& params,
                    bool accumulate_unitary) {
  const int dim = params.dimension();
  if (state.size() != dim) throw ValidationError("evolve: state dimension mismatch");
  PulseEngine engine(params, schedule.dt);
  for (const auto& e : schedule.entries) {
    if (e.start < 0) throw ValidationError("evolve: negative start time");
    if (const auto* d = std::get_if<FluxDrive>(&e.item)) {
      d->validate(params.phi_bias);
      const double fmax = engine.max_transition_frequency(*d);
      if (schedule.dt > 1.0 / (20.0 * fmax)) {
        throw ValidationError("evolve: dt exceeds 1/(20 f_max) for this drive");
      }
    }
  }
  std::vector<ScheduleEntry> entries = schedule.entries;
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.start < b.start; });

  CMatrix x(dim, accumulate_unitary ? dim + 1 : 1);
  x.col(0) = state;
  if (accumulate_unitary) x.rightCols(dim) = CMatrix::Identity(dim, dim);

  double t = 0.0;
  for (const auto& e : entries) {
    if (e.start < t - 1e-15) {
      throw ValidationError("evolve: schedule entries overlap");
    }
    engine.idle(x, e.start - t);
    t = e.start;
    if (const auto* d = std::get_if<FluxDrive>(&e.item)) {
      engine.drive(x, *d, e.start);
      t = e.start + d->duration;
    } else {
      const auto& op = std::get<GateOp>(e.item);
      engine.apply_ideal(x, op, e.start);
      engine.idle(x, op.duration);
      t = e.start + op.duration;
    }
  }
  engine.idle(x, std::max(0.0, schedule.end_time() - t));

  EvolveResult res;
  res.state = x.col(0);
  res.norm_drift = std::abs(res.state.norm() - state.norm());
  if (accumulate_unitary) res.unitary = x.rightCols(dim);
  if (res.norm_drift > 1e-6) throw NumericalError("evolve: norm drift above 1e-6");
  return res;
}

CMatrix pulse_subspace_unitary(const PulseEngine& engine, const FluxDrive& drive, double start,
                               const std::vector<int>& labels) {
  const int dim = engine.dim();
  const int n = static_cast<int>(labels.size());
  CMatrix rot = CMatrix::Zero(dim, n);
  for (int j = 0; j < n; ++j) rot(labels[j], j) = 1.0;
  CMatrix lab = engine.from_rotating(rot, start);
  engine.drive(lab, drive, start);
  const CMatrix out = engine.to_rotating(lab, start + drive.duration);
  CMatrix u(n, n);
  for (int i = 0; i < n; ++i) u.row(i) = out.row(labels[i]);
  return u;
}

std::vector<int> computational_labels(const DeviceParams& params) {
  std::vector<int> out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out.push_back(fock_index(params, a, b, 0));
  return out;
}

std::vector<int> qutrit_labels(const DeviceParams& params) {
  std::vector<int> out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out.push_back(fock_index(params, a, b, 0));
  return out;
}

LocalPhaseFit fit_local_phases(const CMatrix& u4, const CMatrix& target4) {
  if (u4.rows() != 4 || u4.cols() != 4 || target4.rows() != 4 || target4.cols() != 4) {
    throw ValidationError("fit_local_phases: 4x4 matrices required");
  }
  Complex w[4];
  for (int k = 0; k < 4; ++k) w[k] = (target4.row(k).conjugate().cwiseProduct(u4.row(k))).sum();
  // For fixed b the best a aligns the two pairs, leaving a one-dimensional search in b.
  auto value = [&](double b) {
    const Complex eb = std::exp(kI * b);
    return std::abs(w[0] + eb * w[1]) + std::abs(w[2] + eb * w[3]);
  };
  const int grid = 720;
  double best_b = 0.0, best = -1.0;
  for (int i = 0; i < grid; ++i) {
    const double b = -kPi + kTwoPi * i / grid;
    const double v = value(b);
    if (v > best) {
      best = v;
      best_b = b;
    }
  }
  double lo = best_b - kTwoPi / grid, hi = best_b + kTwoPi / grid;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
    if (value(m1) > value(m2)) hi = m2; else lo = m1;
  }
  const double b = 0.5 * (lo + hi);
  const Complex eb = std::exp(kI * b);
  const Complex pa = w[0] + eb * w[1], pb = w[2] + eb * w[3];
  const double a = std::abs(pb) > 0 ? std::arg(pa) - std::arg(pb) : 0.0;
  LocalPhaseFit fit;
  fit.phases = {wrap_phase(a), wrap_phase(b)};
  const double v = std::abs(pa) + std::abs(pb);
  fit.fidelity = v * v / 16.0;
  return fit;
}

double conditional_phase(const CMatrix& u4) {
  if (u4.rows() != 4 || u4.cols() != 4) throw ValidationError("conditional_phase: 4x4 matrix required");
  double p = std::arg(u4(3, 3)) - std::arg(u4(2, 2)) - std::arg(u4(1, 1)) + std::arg(u4(0, 0));
  p = std::fmod(p, kTwoPi);
  if (p < 0) p += kTwoPi;
  return p;
}

}  // namespace qswap
