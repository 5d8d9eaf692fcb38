#pragma once

// Small dense complex linear algebra: storage comes from Eigen, the Hermitian
// eigensolver is a cyclic Jacobi sweep written here so that results are
// deterministic and accurate for the tiny matrices (d <= ~50) used throughout.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "qmdim/errors.hpp"

namespace qmdim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Eigenpairs of a Hermitian matrix. `vectors.col(k)` belongs to `values[k]`;
/// values are sorted in descending order.
struct EigenSystem {
  Eigen::VectorXd values;
  CMatrix vectors;
};

struct JacobiConfig {
  double off_diagonal_threshold = 1e-12;
  int max_sweeps = 100;
};

inline double max_abs_entry(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("max_abs_diff: shapes differ");
  return max_abs_entry(a - b);
}

inline bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs_diff(m, m.adjoint()) <= tol;
}

inline bool is_real(const CMatrix& m, double tol) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= tol;
}

inline double frobenius_norm(const CMatrix& m) { return m.norm(); }

/// |v><v|
inline CMatrix projector(const CVector& v) { return v * v.adjoint(); }

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Multiplies `v` by a unit phase so that its largest-magnitude component is
/// real and positive. Near-ties (within 1e-12) go to the lowest index.
inline CVector phase_fixed(CVector v) {
  if (v.size() == 0) return v;
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0) return v;
  Eigen::Index pick = 0;
  while (std::abs(v[pick]) < top - 1e-12) ++pick;
  const Complex phase = std::conj(v[pick]) / std::abs(v[pick]);
  v *= phase;
  v[pick] = Complex(v[pick].real(), 0.0);
  return v;
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot a_pq with a diagonal
/// unitary, then applies the classical real Jacobi rotation. Sweeps stop when
/// the off-diagonal Frobenius mass drops below the threshold (scaled by
/// max(1, ||m||_F)) or after `max_sweeps`.
inline EigenSystem eig_hermitian(const CMatrix& m, double hermitian_tol = 1e-9,
                                 JacobiConfig config = {}) {
  if (m.rows() != m.cols()) throw DimensionMismatch("eig_hermitian: matrix is not square");
  const Eigen::Index n = m.rows();
  const double scale = std::max(1.0, max_abs_entry(m));
  if (!is_hermitian(m, hermitian_tol * scale))
    throw ContractViolation("eig_hermitian: matrix is not Hermitian within tolerance");

  CMatrix a = (m + m.adjoint()) / 2.0;
  CMatrix v = CMatrix::Identity(n, n);
  const double threshold = config.off_diagonal_threshold * std::max(1.0, a.norm());

  auto off_mass = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q)
        if (p != q) s += std::norm(a(p, q));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < config.max_sweeps && off_mass() >= threshold; ++sweep) {
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r < 1e-300) continue;
        const Complex phase = a(p, q) / r;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // U = diag(1, e^{-i phi}) * [[c, s], [-s, c]] restricted to (p, q).
        const Complex upp = c;
        const Complex upq = s;
        const Complex uqp = -s * std::conj(phase);
        const Complex uqq = c * std::conj(phase);

        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * upp + vkq * uqp;
          v(k, q) = vkp * upq + vkq * uqq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() > a(y, y).real();
  });

  EigenSystem out{Eigen::VectorXd(n), CMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Largest eigenvalue; for a PSD matrix this is the operator norm.
inline double max_eigenvalue(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  return eig_hermitian(m).values[0];
}

inline double min_eigenvalue(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  const auto es = eig_hermitian(m);
  return es.values[es.values.size() - 1];
}

/// Singular values (descending) of an arbitrary complex matrix, read off the
/// spectrum of the Hermitian dilation [[0, M], [M^dagger, 0]].
inline Eigen::VectorXd singular_values(const CMatrix& m) {
  const Eigen::Index r = m.rows();
  const Eigen::Index c = m.cols();
  CMatrix h = CMatrix::Zero(r + c, r + c);
  h.topRightCorner(r, c) = m;
  h.bottomLeftCorner(c, r) = m.adjoint();
  const auto es = eig_hermitian(h);
  const Eigen::Index k = std::min(r, c);
  Eigen::VectorXd out(k);
  for (Eigen::Index i = 0; i < k; ++i) out[i] = std::max(0.0, es.values[i]);
  return out;
}

/// Number of singular values strictly above `threshold`.
inline int numerical_rank(const CMatrix& m, double threshold = 1e-8) {
  const auto sv = singular_values(m);
  return static_cast<int>((sv.array() > threshold).count());
}

/// Spectral map f applied to a Hermitian matrix.
template <class F>
CMatrix hermitian_function(const CMatrix& m, F&& f) {
  const auto es = eig_hermitian(m);
  Eigen::VectorXd mapped(es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) mapped[k] = f(es.values[k]);
  CMatrix out = es.vectors * mapped.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  return (out + out.adjoint()) / 2.0;
}

}  // namespace qmdim
