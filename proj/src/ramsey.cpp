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

#include "qswap/ramsey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qswap/parallel.hpp"
#include "qswap/random.hpp"

namespace qswap {

namespace {

void check_roles(Roles r) {
  if (r.control < 0 || r.control > 1 || r.target < 0 || r.target > 1 || r.control == r.target) {
    throw ValidationError("ramsey: roles must be two distinct sites in {0, 1}");
  }
}

void add_prep(Circuit& c, Prep prep, int site) {
  if (prep == Prep::One) {
    c.add(GateKind::X, {site});
  } else {
    c.add(GateOp::delay(site, durations::kSingleQubit));
  }
}

Circuit swap_block(int a, int b, const SwapSpec& spec) {
  Circuit c = compile_swap(a, b, kQutritPair, spec.form);
  if (!spec.post_cz_phases) return c;
  const auto& ph = *spec.post_cz_phases;
  Circuit out(kQutritPair);
  for (const auto& op : c.ops) {
    if (op.kind == GateKind::SDagger) {
      const int s = op.targets.front();
      out.add(GateOp::virtual_z(s, ph[s]));
    } else {
      out.add(op);
    }
  }
  return out;
}

int register_index(int site0, int site1) { return 3 * site0 + site1; }

}  // namespace

Circuit build_conditional_ramsey(GateKind gate, Prep prep, double phi, Roles roles) {
  check_roles(roles);
  if (gate != GateKind::CZ && gate != GateKind::Delay) {
    throw ValidationError("conditional Ramsey: gate must be CZ or Delay (no gate)");
  }
  Circuit c(kQutritPair);
  add_prep(c, prep, roles.control);
  c.add(GateKind::SqrtX, {roles.target});
  if (gate == GateKind::CZ) {
    c.add(GateKind::CZ, {roles.control, roles.target});
  } else {
    c.add(GateOp::delay(roles.target, durations::kCZ));
  }
  c.add(GateOp::virtual_z(roles.target, phi));
  c.add(GateKind::SqrtX, {roles.target});
  return c;
}

Circuit build_cross_ramsey(GateKind gate, Prep prep, double phi, Roles roles, const SwapSpec& swap) {
  check_roles(roles);
  Circuit c(kQutritPair);
  add_prep(c, prep, roles.control);
  c.add(GateKind::SqrtX, {roles.target});
  if (gate == GateKind::iSWAP) {
    c.add(GateKind::iSWAP, {roles.control, roles.target});
  } else if (gate == GateKind::SWAP) {
    c.append(swap_block(roles.control, roles.target, swap));
  } else {
    throw ValidationError("cross Ramsey: gate must be iSWAP or SWAP");
  }
  c.add(GateOp::virtual_z(roles.control, phi));
  c.add(GateKind::SqrtX, {roles.control});
  return c;
}

Circuit build_ramsey(Experiment e, GateKind gate, Prep prep, double phi, Roles roles, const SwapSpec& swap) {
  return e == Experiment::Conditional ? build_conditional_ramsey(gate, prep, phi, roles)
                                      : build_cross_ramsey(gate, prep, phi, roles, swap);
}

std::array<int, 2> tracked_states(GateKind gate, Roles roles) {
  check_roles(roles);
  auto idx = [&](int vc, int vt) {
    int v[2];
    v[roles.control] = vc;
    v[roles.target] = vt;
    return register_index(v[0], v[1]);
  };
  if (gate == GateKind::CZ || gate == GateKind::Delay) return {idx(0, 1), idx(1, 1)};
  return {idx(1, 0), idx(1, 1)};
}

RVector ExactBackend::populations(const Circuit& circuit, std::uint64_t) const {
  const CMatrix u = compose(circuit);
  return u.col(0).cwiseAbs2();
}

RVector NoisyBackend::populations(const Circuit& circuit, std::uint64_t) const {
  return noisy_populations(circuit, noise_);
}

PulseBackend::PulseBackend(const DeviceParams& params, PulseCalibration cal, double dt)
    : params_(params), cal_(cal), engine_(params, dt) {
  if (params.levels != 3) throw ValidationError("pulse backend: needs three levels per transmon");
  if (!(cal_.cz.duration > 0) || !(cal_.iswap.duration > 0)) {
    throw ValidationError("pulse backend: CZ and iSWAP must be calibrated");
  }
  if (!(cal_.f_2qf > 0)) cal_.f_2qf = dressed_swap_frequency(params);
}

// Shifting a pulse by t0 conjugates its rotating-frame propagator with the free phases; the
// |01>-|10> element picks up exp(-2 pi i f_2qf t0), which the drive phase removes.
double PulseBackend::tracked_iswap_phase(double t0) const {
  return wrap_phase(cal_.iswap.phase - kTwoPi * (cal_.iswap.frequency_hz - cal_.f_2qf) * t0);
}

const CMatrix& PulseBackend::pulse_unitary(GateKind kind, double t0) const {
  if (kind != GateKind::CZ && kind != GateKind::iSWAP) throw ValidationError("pulse backend: not a pulse gate");
  const std::pair<int, long long> key{static_cast<int>(kind), std::llround(t0 * 1e12)};
  std::lock_guard<std::mutex> lock(mutex_);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const PulseGate& g = kind == GateKind::CZ ? cal_.cz : cal_.iswap;
  FluxDrive d;
  d.amplitude = g.amplitude;
  d.frequency_hz = g.frequency_hz;
  d.duration = g.duration;
  d.phase = kind == GateKind::CZ ? g.phase : tracked_iswap_phase(t0);
  std::vector<int> all(engine_.dim());
  for (int i = 0; i < engine_.dim(); ++i) all[i] = i;
  return cache_.emplace(key, pulse_subspace_unitary(engine_, d, t0, all)).first->second;
}

RVector PulseBackend::populations(const Circuit& circuit, std::uint64_t) const {
  if (circuit.register_levels != kQutritPair) throw ValidationError("pulse backend: circuit must be two qutrits");
  const int l = params_.levels;
  const std::vector<int> full{l, l, l};
  CVector c = CVector::Zero(engine_.dim());
  c(fock_index(params_, 0, 0, 0)) = 1.0;
  double t = 0.0;
  for (const auto& op : circuit.ops) {
    switch (op.kind) {
      case GateKind::CZ:
      case GateKind::iSWAP: {
        const PulseGate& g = op.kind == GateKind::CZ ? cal_.cz : cal_.iswap;
        c = pulse_unitary(op.kind, t) * c;
        for (int s = 0; s < 2; ++s) c = op_matrix(GateOp::virtual_z(s, g.phi_comp[s]), full) * c;
        t += g.duration;
        break;
      }
      case GateKind::SWAP:
      case GateKind::CNOT:
        throw ValidationError("pulse backend: compile SWAP / CNOT into native gates first");
      case GateKind::Delay:
        t += op.duration;
        break;
      default:
        c = op_matrix(op, full) * c;
        t += op.duration;
    }
  }
  RVector p = RVector::Zero(9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int nc = 0; nc < l; ++nc) p(3 * a + b) += std::norm(c(fock_index(params_, a, b, nc)));
  return p;
}

ShotBackend::ShotBackend(std::shared_ptr<const Backend> inner, long shots, std::uint64_t seed,
                         std::optional<RMatrix> confusion)
    : inner_(std::move(inner)), shots_(shots), seed_(seed), confusion_(std::move(confusion)) {
  if (!inner_) throw ValidationError("shot backend: missing inner backend");
  if (shots_ < 1) throw ValidationError("shot backend: shots must be positive");
  if (confusion_) {
    const RMatrix& t = *confusion_;
    if (t.rows() != 9 || t.cols() != 9) throw ValidationError("shot backend: confusion matrix must be 9x9");
    for (int i = 0; i < 9; ++i) {
      if (std::abs(t.row(i).sum() - 1.0) > 1e-9) throw ValidationError("shot backend: confusion rows must sum to 1");
    }
    if (t.minCoeff() < 0) throw ValidationError("shot backend: negative confusion entry");
  }
}

RVector ShotBackend::populations(const Circuit& circuit, std::uint64_t point) const {
  RVector x = inner_->populations(circuit, point).cwiseMax(0.0);
  x /= x.sum();
  const RVector y = confusion_ ? RVector(confusion_->transpose() * x) : x;
  RandomStream rng(seed_, point);
  const auto counts = multinomial(rng, shots_, std::vector<double>(y.data(), y.data() + y.size()));
  RVector out(9);
  for (int i = 0; i < 9; ++i) out(i) = static_cast<double>(counts[i]) / static_cast<double>(shots_);
  return out;
}

std::vector<double> RamseyTrace::series(int state) const {
  if (state < 0 || state > 8) throw ValidationError("trace: state index must be 0..8");
  std::vector<double> out;
  out.reserve(populations.size());
  for (const auto& p : populations) out.push_back(p(state));
  return out;
}

void RamseyTrace::validate() const {
  if (phi.size() != populations.size()) throw ValidationError("trace: phi and populations differ in length");
  for (const auto& p : populations) {
    if (p.size() != 9) throw ValidationError("trace: need nine populations per point");
    if (p.minCoeff() < -1e-9 || (!mitigated && std::abs(p.sum() - 1.0) > 1e-6)) {
      throw ValidationError("trace: populations must be a probability vector");
    }
  }
}

RamseyTrace sweep(Experiment e, GateKind gate, Prep prep, const std::vector<double>& phis, const Backend& backend,
                  Roles roles, const SwapSpec& swap, int threads) {
  if (phis.empty()) throw ValidationError("sweep: empty phase grid");
  RamseyTrace tr;
  tr.experiment = e;
  tr.gate = gate;
  tr.prep = prep;
  tr.roles = roles;
  tr.phi = phis;
  tr.tracked = tracked_states(gate, roles);
  tr.backend = backend.name();
  tr.shots = backend.shots();
  tr.populations.assign(phis.size(), RVector());
  // Pulse gates land at the same times for every phi: warm the cache before fanning out.
  tr.populations[0] = backend.populations(build_ramsey(e, gate, prep, phis[0], roles, swap), 0);
  parallel_for(static_cast<int>(phis.size()) - 1, threads, [&](int k) {
    const int i = k + 1;
    tr.populations[i] = backend.populations(build_ramsey(e, gate, prep, phis[i], roles, swap), i);
  });
  return tr;
}

namespace {

struct LinearSine {
  double a = 0, b = 0, m = 0;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double amplitude() const { return std::hypot(a, b); }
  double delta() const { return std::atan2(-b, a); }
};

LinearSine linear_sine(const std::vector<double>& phi, const std::vector<double>& y) {
  const int n = static_cast<int>(phi.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = std::cos(phi[i]);
    x(i, 1) = std::sin(phi[i]);
    x(i, 2) = 1.0;
    v(i) = y[i];
  }
  const Eigen::Matrix3d xtx = x.transpose() * x;
  Eigen::LDLT<Eigen::Matrix3d> ldlt(xtx);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12) throw NumericalError("ramsey fit: singular design");
  const Eigen::Vector3d beta = ldlt.solve(x.transpose() * v);
  LinearSine s{beta(0), beta(1), beta(2)};
  const double rss = (v - x * beta).squaredNorm();
  s.cov = rss / (n - 3) * xtx.inverse();
  return s;
}

}  // namespace

RamseyFit fit_trace(const std::vector<double>& phi, const std::vector<double>& y, const std::vector<double>& ideal) {
  const std::size_t n = phi.size();
  if (n < 8) throw ValidationError("ramsey fit: need at least eight points");
  if (y.size() != n || ideal.size() != n) throw ValidationError("ramsey fit: length mismatch");
  // Coverage is judged on the circle, so adding whole periods to any point changes nothing.
  std::vector<double> w;
  for (double p : phi) w.push_back(std::fmod(std::fmod(p, kTwoPi) + kTwoPi, kTwoPi));
  std::sort(w.begin(), w.end());
  double gap = w.front() + kTwoPi - w.back();
  for (std::size_t i = 1; i < n; ++i) gap = std::max(gap, w[i] - w[i - 1]);
  if (gap > 0.5 * kPi + 1e-12) throw ValidationError("ramsey fit: phase grid must cover a full period");
  const LinearSine s = linear_sine(phi, y);
  const LinearSine ref = linear_sine(phi, ideal);

  RamseyFit f;
  f.amplitude = s.amplitude();
  f.delta = s.delta();
  f.offset = s.m;
  f.swing = 2.0 * f.amplitude;
  f.delta_offset = 0.5 - s.m;
  f.delta_phase = wrap_phase(f.delta - ref.delta());
  double mse = 0.0;
  for (std::size_t i = 0; i < n; ++i) mse += (y[i] - ideal[i]) * (y[i] - ideal[i]);
  f.mse = mse / static_cast<double>(n);

  const double a2 = f.amplitude * f.amplitude;
  f.err_offset = std::sqrt(std::max(0.0, s.cov(2, 2)));
  if (f.amplitude > 0) {
    const Eigen::Vector2d ga(s.a / f.amplitude, s.b / f.amplitude);
    const Eigen::Vector2d gd(s.b / a2, -s.a / a2);
    const Eigen::Matrix2d c = s.cov.topLeftCorner<2, 2>();
    f.err_swing = 2.0 * std::sqrt(std::max(0.0, ga.dot(c * ga)));
    f.err_phase = std::sqrt(std::max(0.0, gd.dot(c * gd)));
  } else {
    f.err_swing = 2.0 * std::sqrt(std::max(0.0, s.cov(0, 0)));
    f.err_phase = std::numeric_limits<double>::infinity();
  }
  return f;
}

std::string trace_to_csv(const RamseyTrace& trace) {
  trace.validate();
  std::ostringstream os;
  os.precision(17);
  os << "phi_rad";
  for (int i = 0; i < 9; ++i) os << ",p" << i / 3 << i % 3;
  os << ",backend,shots\n";
  for (std::size_t k = 0; k < trace.phi.size(); ++k) {
    os << trace.phi[k];
    for (int i = 0; i < 9; ++i) os << ',' << trace.populations[k](i);
    os << ',' << trace.backend << ',' << trace.shots << '\n';
  }
  return os.str();
}

RamseyTrace trace_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  RamseyTrace tr;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line.rfind("phi_rad,p00", 0) != 0) throw ValidationError("trace CSV: unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 12) throw ValidationError("trace CSV: expected 12 columns");
    try {
      tr.phi.push_back(std::stod(cells[0]));
      RVector p(9);
      for (int i = 0; i < 9; ++i) p(i) = std::stod(cells[i + 1]);
      tr.populations.push_back(p);
      tr.shots = std::stol(cells[11]);
    } catch (const std::exception&) {
      throw ValidationError("trace CSV: non-numeric entry");
    }
    tr.backend = cells[10];
  }
  if (!header || tr.phi.empty()) throw ValidationError("trace CSV: no data");
  tr.mitigated = tr.backend.find("mitigated") != std::string::npos;
  tr.validate();
  return tr;
}

SwapPhaseTuneup tune_swap_local_phase(const Backend& backend, int measured, const std::vector<double>& grid,
                                      SwapForm form) {
  if (measured != 0 && measured != 1) throw ValidationError("swap tune-up: measured site must be 0 or 1");
  if (grid.size() < 5) throw ValidationError("swap tune-up: need at least five grid points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ValidationError("swap tune-up: grid must increase");
  }
  const int other = 1 - measured;
  SwapPhaseTuneup out;
  out.grid = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SwapSpec spec;
    spec.form = form;
    std::array<double, 2> ph{};
    ph[measured] = grid[i];
    ph[other] = -0.5 * kPi;
    spec.post_cz_phases = ph;
    Circuit c(kQutritPair);
    c.add(GateKind::X, {measured});
    c.add(GateKind::SqrtX, {other});
    c.append(swap_block(measured, other, spec));
    c.add(GateKind::SqrtX, {measured});
    const RVector p = backend.populations(c, i);
    double p1 = 0.0;
    for (int k = 0; k < 9; ++k) {
      if ((measured == 0 ? k / 3 : k % 3) == 1) p1 += p(k);
    }
    out.population.push_back(p1);
  }
  const auto [lo, hi] = std::minmax_element(out.population.begin(), out.population.end());
  if (*hi - *lo < 0.05) throw NumericalError("swap tune-up: population does not depend on the phase");
  const std::size_t k = static_cast<std::size_t>(hi - out.population.begin());
  out.phase = grid[k];
  if (k > 0 && k + 1 < grid.size()) {
    // Vertex of the parabola through the three best points.
    const double x0 = grid[k - 1], x1 = grid[k], x2 = grid[k + 1];
    const double y0 = out.population[k - 1], y1 = out.population[k], y2 = out.population[k + 1];
    const double d1 = (y1 - y0) / (x1 - x0), d2 = (y2 - y1) / (x2 - x1);
    const double curv = (d2 - d1) / (x2 - x0);
    if (curv < 0) out.phase = 0.5 * (x0 + x1) - d1 / (2.0 * curv);
  }
  return out;
}

}  // namespace qswap
