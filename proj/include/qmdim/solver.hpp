#pragma once

// Alternating least-squares / projection fitting of d-dimensional models to a
// partial probability table, and the dimension sweep built on it.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qmdim/errors.hpp"
#include "qmdim/instance.hpp"
#include "qmdim/linalg.hpp"
#include "qmdim/quantum.hpp"

namespace qmdim {

struct SolverOptions {
  int max_iterations = 2000;
  double convergence_threshold = 1e-16;
  int restarts = 8;
  std::uint64_t seed = 1;
  double damping = 1.0;              // initial step of the backtracking line search
  double success_tolerance = 1e-6;   // residual below which a fit counts as a success

  void validate() const {
    if (max_iterations < 1) throw ContractViolation("SolverOptions: max_iterations must be >= 1");
    if (!(convergence_threshold > 0)) throw ContractViolation("SolverOptions: threshold must be > 0");
    if (restarts < 1) throw ContractViolation("SolverOptions: restarts must be >= 1");
    if (!(damping > 0 && damping <= 1)) throw ContractViolation("SolverOptions: damping must lie in (0, 1]");
    if (!(success_tolerance > 0)) throw ContractViolation("SolverOptions: success_tolerance must be > 0");
  }
};

template <class Model>
struct BasicSolveReport {
  std::optional<Model> best_model;
  double residual = INFINITY;
  int iterations = 0;
  /// Sum of squared errors after each full round, one vector per restart.
  std::vector<std::vector<double>> traces;
  std::uint64_t seed = 0;
  int d = 0;
  double wall_seconds = 0.0;

  bool success(double tol) const { return best_model.has_value() && residual < tol; }
};

using SolveReport = BasicSolveReport<QuantumModel>;
using BipartiteSolveReport = BasicSolveReport<BipartiteModel>;

namespace detail {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kProximalWeight = 1e-9;

/// Coordinates of a Hermitian matrix in the orthonormal basis
/// {E_kk} u {(E_kl + E_lk)/sqrt2} u {i(E_kl - E_lk)/sqrt2}, k < l, so that
/// tr(H K) equals the dot product of coordinates.
inline RealVector herm_coords(const CMatrix& h) {
  const auto d = h.rows();
  RealVector out(d * d);
  Eigen::Index idx = 0;
  for (Eigen::Index k = 0; k < d; ++k) out[idx++] = h(k, k).real();
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = k + 1; l < d; ++l) {
      out[idx++] = std::sqrt(2.0) * h(k, l).real();
      out[idx++] = std::sqrt(2.0) * h(k, l).imag();
    }
  return out;
}

inline CMatrix herm_from_coords(const RealVector& c, Eigen::Index d) {
  CMatrix h = CMatrix::Zero(d, d);
  Eigen::Index idx = 0;
  for (Eigen::Index k = 0; k < d; ++k) h(k, k) = c[idx++];
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = k + 1; l < d; ++l) {
      const double re = c[idx++] / std::sqrt(2.0);
      const double im = c[idx++] / std::sqrt(2.0);
      h(k, l) = Complex(re, im);
      h(l, k) = Complex(re, -im);
    }
  return h;
}

/// One linear constraint tr(X K) ~ p on the unknown X.
struct StateRow {
  CMatrix k;
  double p;
};

/// tr(E_z K) ~ p on outcome z (0-based) of one POVM.
struct PovmRow {
  int z;
  CMatrix k;
  double p;
};

/// argmin sum (tr(rho K) - p)^2 + mu |rho - old|^2 subject to tr rho = 1.
inline CMatrix state_least_squares(const std::vector<StateRow>& rows, const CMatrix& old) {
  const Eigen::Index d = old.rows();
  const Eigen::Index n = d * d;
  RealMatrix kkt = RealMatrix::Zero(n + 1, n + 1);
  RealVector rhs = RealVector::Zero(n + 1);
  const RealVector r0 = herm_coords(old);
  for (const auto& row : rows) {
    const RealVector a = herm_coords(row.k);
    kkt.topLeftCorner(n, n) += a * a.transpose();
    rhs.head(n) += row.p * a;
  }
  kkt.topLeftCorner(n, n) += kProximalWeight * RealMatrix::Identity(n, n);
  rhs.head(n) += kProximalWeight * r0;
  const RealVector t = herm_coords(CMatrix::Identity(d, d));
  kkt.block(0, n, n, 1) = t;
  kkt.block(n, 0, 1, n) = t.transpose();
  rhs[n] = 1.0;
  const RealVector sol = kkt.fullPivLu().solve(rhs);
  return herm_from_coords(sol.head(n), d);
}

/// Least squares over E_1..E_{Z-1} with E_Z = I - sum; returns all Z elements.
inline Povm povm_least_squares(const std::vector<PovmRow>& rows, const Povm& old) {
  const int zc = static_cast<int>(old.size());
  const Eigen::Index d = old.front().rows();
  if (zc == 1) return {CMatrix::Identity(d, d)};
  const Eigen::Index block = d * d;
  const Eigen::Index n = block * (zc - 1);
  RealMatrix normal = RealMatrix::Zero(n, n);
  RealVector rhs = RealVector::Zero(n);
  for (const auto& row : rows) {
    RealVector a = RealVector::Zero(n);
    const RealVector kc = herm_coords(row.k);
    double target = row.p;
    if (row.z < zc - 1) {
      a.segment(row.z * block, block) = kc;
    } else {
      for (int j = 0; j < zc - 1; ++j) a.segment(j * block, block) = -kc;
      target -= row.k.trace().real();
    }
    normal += a * a.transpose();
    rhs += target * a;
  }
  RealVector x0(n);
  for (int j = 0; j < zc - 1; ++j) x0.segment(j * block, block) = herm_coords(old[j]);
  normal += kProximalWeight * RealMatrix::Identity(n, n);
  rhs += kProximalWeight * x0;
  const RealVector sol = normal.ldlt().solve(rhs);
  Povm out;
  CMatrix rest = CMatrix::Identity(d, d);
  for (int j = 0; j < zc - 1; ++j) {
    out.push_back(herm_from_coords(sol.segment(j * block, block), d));
    rest -= out.back();
  }
  out.push_back(rest);
  return out;
}

/// Eigenvalue clipping followed by renormalization to unit trace.
inline CMatrix project_state(const CMatrix& h) {
  const Eigen::Index d = h.rows();
  CMatrix out = hermitian_function(h, [](double x) { return std::max(x, 0.0); });
  const double tr = out.trace().real();
  if (!(tr > 1e-14)) return CMatrix::Identity(d, d) / static_cast<double>(d);
  return out / tr;
}

/// Clip each element, subtract (sum - I)/Z from each, re-clip (two passes),
/// then the congruence S^{-1/2} E S^{-1/2} with S = sum E makes the set
/// complete exactly while keeping every element PSD.
inline Povm project_povm(const Povm& elements) {
  const auto zc = static_cast<double>(elements.size());
  const Eigen::Index d = elements.front().rows();
  auto clip = [](const CMatrix& m) { return hermitian_function(m, [](double x) { return std::max(x, 0.0); }); };
  Povm out;
  for (const auto& e : elements) out.push_back(clip(e));
  for (int pass = 0; pass < 2; ++pass) {
    CMatrix sum = CMatrix::Zero(d, d);
    for (const auto& e : out) sum += e;
    const CMatrix shift = (sum - CMatrix::Identity(d, d)) / zc;
    for (auto& e : out) e = clip(e - shift);
  }
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& e : out) sum += e;
  if (min_eigenvalue(sum) < 1e-10) {
    for (auto& e : out) e = (e + CMatrix::Identity(d, d) * 1e-9);
    sum = CMatrix::Zero(d, d);
    for (const auto& e : out) sum += e;
  }
  const CMatrix inv_sqrt = hermitian_function(sum, [](double x) { return 1.0 / std::sqrt(x); });
  for (auto& e : out) {
    e = inv_sqrt * e * inv_sqrt;
    e = (e + e.adjoint()) / 2.0;
  }
  return out;
}

inline CMatrix random_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  CMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(n01(rng), n01(rng));
  CMatrix w = g * g.adjoint();
  return w / w.trace().real();
}

inline CMatrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  CMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(n01(rng), n01(rng));
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// Rotated canonical projectors; basis vector k goes to outcome k mod Z.
inline Povm random_povm(int d, int outcomes, std::mt19937_64& rng) {
  const CMatrix u = random_unitary(d, rng);
  Povm out(static_cast<std::size_t>(outcomes), CMatrix::Zero(d, d));
  for (int k = 0; k < d; ++k) out[static_cast<std::size_t>(k % outcomes)] += projector(u.col(k));
  return out;
}

inline double sse(const QuantumModel& m, const DataInstance& inst) {
  double s = 0.0;
  for (const auto& [t, p] : inst.known()) {
    const double r = born(m.states[t.x - 1], m.measurements[t.y - 1][t.z - 1]) - p;
    s += r * r;
  }
  return s;
}

inline double sse(const BipartiteModel& m, const BipartiteInstance& inst) {
  double s = 0.0;
  for (const auto& [q, p] : inst.known()) {
    const double r = born_bipartite(m.state, m.povms_a[q.y - 1][q.z - 1], m.povms_b[q.yp - 1][q.zp - 1]) - p;
    s += r * r;
  }
  return s;
}

template <class T>
T mix(const T& old, const T& target, double alpha);

template <>
inline CMatrix mix(const CMatrix& old, const CMatrix& target, double alpha) {
  return (1.0 - alpha) * old + alpha * target;
}

template <>
inline Povm mix(const Povm& old, const Povm& target, double alpha) {
  Povm out;
  for (std::size_t z = 0; z < old.size(); ++z) out.push_back((1.0 - alpha) * old[z] + alpha * target[z]);
  return out;
}

/// Moves `slot` from its current value towards `target` by the largest
/// step in {damping, damping/2, ...} that does not increase `objective`;
/// keeps the old value when none of the trial steps helps.
template <class T, class Objective>
double line_step(T& slot, const T& target, double current, double damping, Objective&& objective) {
  const T old = slot;
  double alpha = damping;
  for (int attempt = 0; attempt < 12; ++attempt, alpha /= 2) {
    slot = mix(old, target, alpha);
    const double value = objective();
    if (value <= current) return value;
  }
  slot = old;
  return current;
}

/// One least-squares block update: the damped step towards project(raw),
/// then over-relaxed candidates project(old + a (raw - old)), a = 2, 4, ...,
/// of which the best is kept if it lowers `objective`. The over-relaxed
/// candidates reach boundary optima (pure states, projective POVMs) that the
/// damped step only approaches sublinearly.
template <class T, class Project, class Objective>
double ls_step(T& slot, const T& raw, Project&& project, double current, double damping, Objective&& objective) {
  const T old = slot;
  current = line_step(slot, project(raw), current, damping, objective);
  T best = slot;
  for (double alpha = 2.0; alpha <= 4096.0; alpha *= 2.0) {
    slot = project(mix(old, raw, alpha));
    const double value = objective();
    if (value < current) {
      current = value;
      best = slot;
    }
  }
  slot = std::move(best);
  return current;
}

template <class Model>
bool model_is_valid(const Model& m) {
  return !model_defect(m, 1e-8);
}

inline void require_options(const SolverOptions& opts, int d) {
  opts.validate();
  if (d < 1) throw ContractViolation("solver: dimension must be at least 1");
}

}  // namespace detail

/// Seeded alternating fitting of a d-dimensional model; best over restarts.
/// `warm` (if given and of dimension d) is used as the first restart's start.
inline SolveReport fit_model(const DataInstance& inst, int d, const SolverOptions& opts = {},
                             const std::optional<QuantumModel>& warm = std::nullopt) {
  using namespace detail;
  require_options(opts, d);
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.seed = opts.seed;
  report.d = d;

  // Constraint rows grouped by state and by measurement.
  std::vector<std::vector<const std::pair<const Triple, double>*>> by_state(static_cast<std::size_t>(inst.X));
  std::vector<std::vector<const std::pair<const Triple, double>*>> by_meas(static_cast<std::size_t>(inst.Y));
  for (const auto& entry : inst.known()) {
    by_state[entry.first.x - 1].push_back(&entry);
    by_meas[entry.first.y - 1].push_back(&entry);
  }

  for (int restart = 0; restart < opts.restarts; ++restart) {
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(restart));
    QuantumModel m;
    if (restart == 0 && warm && warm->d == d && static_cast<int>(warm->states.size()) == inst.X &&
        static_cast<int>(warm->measurements.size()) == inst.Y) {
      m = *warm;
    } else {
      m.d = d;
      for (int x = 0; x < inst.X; ++x) m.states.push_back(random_state(d, rng));
      for (int y = 0; y < inst.Y; ++y) m.measurements.push_back(random_povm(d, inst.Z, rng));
    }

    std::vector<double> trace;
    double obj = sse(m, inst);
    trace.push_back(obj);
    int it = 0;
    for (; it < opts.max_iterations && obj > 0.0; ++it) {
      const double before = obj;
      for (int x = 0; x < inst.X; ++x) {
        if (by_state[x].empty()) continue;
        std::vector<StateRow> rows;
        for (const auto* e : by_state[x])
          rows.push_back({m.measurements[e->first.y - 1][e->first.z - 1], e->second});
        obj = ls_step(m.states[x], state_least_squares(rows, m.states[x]), project_state, obj, opts.damping,
                      [&] { return sse(m, inst); });
      }
      for (int y = 0; y < inst.Y; ++y) {
        if (by_meas[y].empty()) continue;
        std::vector<PovmRow> rows;
        for (const auto* e : by_meas[y]) rows.push_back({e->first.z - 1, m.states[e->first.x - 1], e->second});
        obj = ls_step(m.measurements[y], povm_least_squares(rows, m.measurements[y]), project_povm, obj,
                      opts.damping, [&] { return sse(m, inst); });
      }
      trace.push_back(obj);
      if (before - obj < opts.convergence_threshold) {
        ++it;
        break;
      }
    }
    report.iterations += it;
    report.traces.push_back(std::move(trace));

    if (!model_is_valid(m)) continue;
    const double res = residual(m, inst);
    if (res < report.residual) {
      report.residual = res;
      report.best_model = std::move(m);
    }
    if (report.residual < opts.success_tolerance) break;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

struct MinDimResult {
  int d = 0;
  SolveReport report;
};

/// Smallest d in 1..d_max for which fit_model reaches opts.success_tolerance.
/// nullopt only means the heuristic failed; it is not an infeasibility proof.
inline std::optional<MinDimResult> min_dim(const DataInstance& inst, int d_max, const SolverOptions& opts = {},
                                           const std::optional<QuantumModel>& warm = std::nullopt) {
  if (d_max < 1) throw ContractViolation("min_dim: d_max must be at least 1");
  for (int d = 1; d <= d_max; ++d) {
    SolveReport r = fit_model(inst, d, opts, warm && warm->d == d ? warm : std::nullopt);
    if (r.success(opts.success_tolerance)) return MinDimResult{d, std::move(r)};
  }
  return std::nullopt;
}

/// Three-block variant for bipartite tables: the joint state, then Alice's
/// POVMs, then Bob's.
inline BipartiteSolveReport fit_bipartite(const BipartiteInstance& inst, int d, const SolverOptions& opts = {},
                                          const std::optional<BipartiteModel>& warm = std::nullopt) {
  using namespace detail;
  require_options(opts, d);
  const auto start = std::chrono::steady_clock::now();
  BipartiteSolveReport report;
  report.seed = opts.seed;
  report.d = d;

  for (int restart = 0; restart < opts.restarts; ++restart) {
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(restart));
    BipartiteModel m;
    if (restart == 0 && warm && warm->d == d && static_cast<int>(warm->povms_a.size()) == inst.Y &&
        static_cast<int>(warm->povms_b.size()) == inst.Yp) {
      m = *warm;
    } else {
      m.d = d;
      m.state = random_state(d * d, rng);
      for (int y = 0; y < inst.Y; ++y) m.povms_a.push_back(random_povm(d, inst.Z, rng));
      for (int y = 0; y < inst.Yp; ++y) m.povms_b.push_back(random_povm(d, inst.Zp, rng));
    }

    std::vector<double> trace;
    double obj = sse(m, inst);
    trace.push_back(obj);
    int it = 0;
    for (; it < opts.max_iterations && obj > 0.0; ++it) {
      const double before = obj;
      auto objective = [&] { return sse(m, inst); };

      std::vector<StateRow> srows;
      for (const auto& [q, p] : inst.known())
        srows.push_back({kron(m.povms_a[q.y - 1][q.z - 1], m.povms_b[q.yp - 1][q.zp - 1]), p});
      if (!srows.empty())
        obj = ls_step(m.state, state_least_squares(srows, m.state), project_state, obj, opts.damping, objective);

      for (int y = 1; y <= inst.Y; ++y) {
        std::vector<PovmRow> rows;
        for (const auto& [q, p] : inst.known())
          if (q.y == y) rows.push_back({q.z - 1, contract_second(m.state, m.povms_b[q.yp - 1][q.zp - 1]), p});
        if (rows.empty()) continue;
        obj = ls_step(m.povms_a[y - 1], povm_least_squares(rows, m.povms_a[y - 1]), project_povm, obj,
                      opts.damping, objective);
      }
      for (int y = 1; y <= inst.Yp; ++y) {
        std::vector<PovmRow> rows;
        for (const auto& [q, p] : inst.known())
          if (q.yp == y) rows.push_back({q.zp - 1, contract_first(m.state, m.povms_a[q.y - 1][q.z - 1]), p});
        if (rows.empty()) continue;
        obj = ls_step(m.povms_b[y - 1], povm_least_squares(rows, m.povms_b[y - 1]), project_povm, obj,
                      opts.damping, objective);
      }
      trace.push_back(obj);
      if (before - obj < opts.convergence_threshold) {
        ++it;
        break;
      }
    }
    report.iterations += it;
    report.traces.push_back(std::move(trace));

    if (!model_is_valid(m)) continue;
    const double res = residual(m, inst);
    if (res < report.residual) {
      report.residual = res;
      report.best_model = std::move(m);
    }
    if (report.residual < opts.success_tolerance) break;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace qmdim
