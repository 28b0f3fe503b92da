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

#include "qswap/readout.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qswap {

void QubitReadout::validate() const {
  if (!(sigma > 0)) throw ValidationError("readout: sigma must be positive");
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      if ((centroids[i] - centroids[j]).norm() == 0.0) throw ValidationError("readout: centroids must be distinct");
    }
  if (tau_ro < 0 || !(t1 > 0)) throw ValidationError("readout: bad timing parameters");
  if (extra_21 < 0 || extra_21 > 1) throw ValidationError("readout: extra_21 must be a probability");
}

QubitReadout default_readout(int qubit) {
  QubitReadout m;
  switch (qubit) {
    case 0:
      m.sigma = 0.3122;
      m.t1 = 77e-6;
      break;
    case 1:
      m.sigma = 0.3040;
      m.t1 = 79e-6;
      break;
    default:
      throw ValidationError("default_readout: qubit index must be 0 or 1");
  }
  return m;
}

std::array<double, 3> relaxation_probabilities(int level, double tau, double t1) {
  if (level < 0 || level > 2) throw ValidationError("relaxation_probabilities: level must be 0..2");
  if (tau < 0 || !(t1 > 0)) throw ValidationError("relaxation_probabilities: bad timing");
  const double eta = std::exp(-tau / t1);
  std::array<double, 3> p{0, 0, 0};
  // Each quantum survives independently with probability eta.
  if (level == 0) p[0] = 1.0;
  if (level == 1) {
    p[1] = eta;
    p[0] = 1.0 - eta;
  }
  if (level == 2) {
    p[2] = eta * eta;
    p[1] = 2.0 * eta * (1.0 - eta);
    p[0] = (1.0 - eta) * (1.0 - eta);
  }
  return p;
}

int assign_state(const QubitReadout& model, const IQPoint& p) {
  int best = 0;
  double bd = (p - model.centroids[0]).squaredNorm();
  for (int k = 1; k < 3; ++k) {
    const double d = (p - model.centroids[k]).squaredNorm();
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  return best;
}

namespace {

int relocate(const QubitReadout& m, int state, RandomStream& rng, bool joint) {
  if (m.decay && state > 0) {
    const auto p = relaxation_probabilities(state, m.tau_ro, m.t1);
    state = rng.categorical({p[0], p[1], p[2]});
  }
  if (joint && state == 2 && m.extra_21 > 0 && rng.bernoulli(m.extra_21)) state = 1;
  return state;
}

IQPoint draw_point(const QubitReadout& m, int state, RandomStream& rng) {
  const double x = rng.normal(), y = rng.normal();
  return m.centroids[state] + m.sigma * IQPoint(x, y);
}

}  // namespace

ReadoutShots sample_shots(const QubitReadout& model, int true_state, long n, RandomStream& rng) {
  model.validate();
  if (n < 1) throw ValidationError("sample_shots: need at least one shot");
  if (true_state < 0 || true_state > 2) throw ValidationError("sample_shots: state must be 0..2");
  ReadoutShots out;
  out.iq.reserve(n);
  out.labels.reserve(n);
  for (long i = 0; i < n; ++i) {
    const int s = relocate(model, true_state, rng, false);
    const IQPoint p = draw_point(model, s, rng);
    out.iq.push_back(p);
    out.labels.push_back(assign_state(model, p));
  }
  return out;
}

void ConfusionMatrix::validate() const {
  if (probs.rows() != probs.cols() || (probs.rows() != 3 && probs.rows() != 9)) {
    throw ValidationError("confusion matrix must be 3x3 or 9x9");
  }
  for (int i = 0; i < probs.rows(); ++i) {
    if (std::abs(probs.row(i).sum() - 1.0) > 1e-9) throw ValidationError("confusion matrix rows must sum to 1");
  }
  if (probs.minCoeff() < 0 || probs.maxCoeff() > 1) throw ValidationError("confusion entries must be in [0,1]");
}

ConfusionMatrix ConfusionMatrix::identity(int dim) {
  ConfusionMatrix c;
  c.probs = RMatrix::Identity(dim, dim);
  c.shots.assign(dim, 0);
  return c;
}

ConfusionMatrix build_confusion(const QubitReadout& model, long n_per_state, std::uint64_t seed) {
  model.validate();
  if (n_per_state < 100) throw ValidationError("build_confusion: need at least 100 shots per state");
  ConfusionMatrix c;
  c.probs = RMatrix::Zero(3, 3);
  c.shots.assign(3, n_per_state);
  for (int s = 0; s < 3; ++s) {
    RandomStream rng(seed, static_cast<std::uint64_t>(s));
    for (long i = 0; i < n_per_state; ++i) {
      const int t = relocate(model, s, rng, false);
      c.probs(s, assign_state(model, draw_point(model, t, rng))) += 1.0;
    }
    c.probs.row(s) /= static_cast<double>(n_per_state);
  }
  return c;
}

ConfusionMatrix build_joint_confusion(const QubitReadout& q1, const QubitReadout& q2, long n_per_state,
                                      std::uint64_t seed) {
  q1.validate();
  q2.validate();
  if (n_per_state < 100) throw ValidationError("build_joint_confusion: need at least 100 shots per state");
  ConfusionMatrix c;
  c.probs = RMatrix::Zero(9, 9);
  c.shots.assign(9, n_per_state);
  for (int s = 0; s < 9; ++s) {
    RandomStream rng(seed, 100 + static_cast<std::uint64_t>(s));
    const int s1 = s / 3, s2 = s % 3;
    for (long i = 0; i < n_per_state; ++i) {
      const int a = assign_state(q1, draw_point(q1, relocate(q1, s1, rng, true), rng));
      const int b = assign_state(q2, draw_point(q2, relocate(q2, s2, rng, true), rng));
      c.probs(s, 3 * a + b) += 1.0;
    }
    c.probs.row(s) /= static_cast<double>(n_per_state);
  }
  return c;
}

AssignmentFidelity assignment_fidelity(const ConfusionMatrix& c) {
  if (c.dim() != 3) throw ValidationError("assignment_fidelity: needs a 3x3 matrix");
  const RVector d = c.probs.diagonal();
  AssignmentFidelity f;
  f.fidelity = d.mean();
  const double var = (d.array() - f.fidelity).square().sum() / 2.0;
  f.sem = std::sqrt(var) / std::sqrt(3.0);
  return f;
}

AmplitudeScan optimize_amplitude(const AmplitudeFamily& family, const std::vector<double>& amplitudes,
                                 long n_per_state, std::uint64_t seed) {
  if (amplitudes.empty()) throw ValidationError("optimize_amplitude: empty amplitude grid");
  AmplitudeScan scan;
  scan.amplitudes = amplitudes;
  double best_f = -1.0;
  for (double a : amplitudes) {
    if (!(a > 0)) throw ValidationError("optimize_amplitude: amplitudes must be positive");
    QubitReadout m = family.base;
    for (auto& c : m.centroids) c *= a;
    const double p_up = a > family.threshold ? std::min(1.0, family.penalty * (a - family.threshold) * (a - family.threshold)) : 0.0;
    ConfusionMatrix c = build_confusion(m, n_per_state, seed);
    if (p_up > 0) {
      // Readout-induced |1> -> |2> jump: the |1> row takes a fraction of the |2> row's outcomes.
      c.probs.row(1) = (1.0 - p_up) * c.probs.row(1) + p_up * c.probs.row(2);
    }
    const double f = assignment_fidelity(c).fidelity;
    scan.fidelities.push_back(f);
    if (f > best_f) {
      best_f = f;
      scan.best = a;
    }
  }
  return scan;
}

double centroid_perimeter(const std::array<IQPoint, 3>& c) {
  return (c[0] - c[1]).norm() + (c[1] - c[2]).norm() + (c[2] - c[0]).norm();
}

int best_readout_frequency(const std::vector<std::array<IQPoint, 3>>& candidates) {
  if (candidates.empty()) throw ValidationError("best_readout_frequency: no candidates");
  int best = 0;
  for (int i = 1; i < static_cast<int>(candidates.size()); ++i) {
    if (centroid_perimeter(candidates[i]) > centroid_perimeter(candidates[best])) best = i;
  }
  return best;
}

std::string two_qutrit_label(int index) {
  if (index < 0 || index > 8) throw ValidationError("two_qutrit_label: index must be 0..8");
  return std::to_string(index / 3) + std::to_string(index % 3);
}

ConfusionDifference confusion_difference(const ConfusionMatrix& measured, const ConfusionMatrix& q1,
                                         const ConfusionMatrix& q2, int top) {
  if (measured.dim() != 9 || q1.dim() != 3 || q2.dim() != 3) {
    throw ValidationError("confusion_difference: need a 9x9 and two 3x3 matrices");
  }
  RMatrix constructed(9, 9);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) constructed(i, j) = q1.probs(i / 3, j / 3) * q2.probs(i % 3, j % 3);
  ConfusionDifference out;
  out.difference = measured.probs - constructed;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      if (out.difference(i, j) > 0) out.largest.push_back({i, j, out.difference(i, j)});
    }
  std::sort(out.largest.begin(), out.largest.end(),
            [](const ConfusionDeviation& a, const ConfusionDeviation& b) { return a.value > b.value; });
  if (static_cast<int>(out.largest.size()) > top) out.largest.resize(top);
  return out;
}

namespace {

std::string state_label(int dim, int i) { return dim == 9 ? two_qutrit_label(i) : std::to_string(i); }

}  // namespace

std::string confusion_to_csv(const ConfusionMatrix& c) {
  std::ostringstream os;
  os.precision(17);
  os << "prepared";
  for (int j = 0; j < c.dim(); ++j) os << ',' << state_label(c.dim(), j);
  os << ",shots\n";
  for (int i = 0; i < c.dim(); ++i) {
    os << state_label(c.dim(), i);
    for (int j = 0; j < c.dim(); ++j) os << ',' << c.probs(i, j);
    os << ',' << (i < static_cast<int>(c.shots.size()) ? c.shots[i] : 0) << '\n';
  }
  return os.str();
}

ConfusionMatrix confusion_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw ValidationError("confusion CSV: empty input");
  const int dim = static_cast<int>(rows.front().size()) - 2;
  if ((dim != 3 && dim != 9) || static_cast<int>(rows.size()) != dim + 1) {
    throw ValidationError("confusion CSV: expected a 3x3 or 9x9 table with header");
  }
  ConfusionMatrix c;
  c.probs.resize(dim, dim);
  c.shots.assign(dim, 0);
  for (int i = 0; i < dim; ++i) {
    const auto& r = rows[i + 1];
    if (static_cast<int>(r.size()) != dim + 2) throw ValidationError("confusion CSV: ragged row");
    if (r[0] != state_label(dim, i)) throw ValidationError("confusion CSV: rows must be ordered by label");
    try {
      for (int j = 0; j < dim; ++j) c.probs(i, j) = std::stod(r[j + 1]);
      c.shots[i] = std::stol(r[dim + 1]);
    } catch (const std::exception&) {
      throw ValidationError("confusion CSV: non-numeric entry");
    }
  }
  c.validate();
  return c;
}

}  // namespace qswap
