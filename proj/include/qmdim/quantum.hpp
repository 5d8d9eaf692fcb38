#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmdim/errors.hpp"
#include "qmdim/linalg.hpp"

namespace qmdim {

/// Validation tolerance for PSD / trace / completeness checks.
inline constexpr double kDefaultTol = 1e-9;

using Povm = std::vector<CMatrix>;

// ---------------------------------------------------------------------------
// Validation

/// Reason `rho` is not a density matrix, or nullopt if it is one.
inline std::optional<std::string> state_defect(const CMatrix& rho, double tol = kDefaultTol) {
  if (rho.rows() == 0 || rho.rows() != rho.cols()) return "state is not a non-empty square matrix";
  if (!is_hermitian(rho, tol)) return "state is not Hermitian";
  if (std::abs(rho.trace() - Complex(1.0)) > tol) return "state trace differs from 1";
  if (min_eigenvalue(rho) < -tol) return "state has a negative eigenvalue";
  return std::nullopt;
}

/// Reason `elements` is not a POVM on C^d, or nullopt if it is one.
inline std::optional<std::string> povm_defect(const Povm& elements, double tol = kDefaultTol) {
  if (elements.empty()) return "POVM has no elements";
  const auto d = elements.front().rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (std::size_t z = 0; z < elements.size(); ++z) {
    const auto& e = elements[z];
    const std::string tag = "POVM element " + std::to_string(z + 1);
    if (e.rows() != d || e.cols() != d) return tag + " has the wrong dimension";
    if (!is_hermitian(e, tol)) return tag + " is not Hermitian";
    if (min_eigenvalue(e) < -tol) return tag + " has a negative eigenvalue";
    sum += e;
  }
  if (max_abs_diff(sum, CMatrix::Identity(d, d)) > tol) return "POVM elements do not sum to identity";
  return std::nullopt;
}

inline bool is_state(const CMatrix& rho, double tol = kDefaultTol) { return !state_defect(rho, tol); }
inline bool is_povm(const Povm& p, double tol = kDefaultTol) { return !povm_defect(p, tol); }

// ---------------------------------------------------------------------------
// Born rule

/// tr(rho e).
inline double born(const CMatrix& rho, const CMatrix& e) {
  if (rho.rows() != rho.cols() || e.rows() != e.cols() || rho.rows() != e.rows())
    throw DimensionMismatch("born: state and effect dimensions differ");
  // tr(rho e) = sum_ij rho_ij e_ji
  return (rho.array() * e.transpose().array()).sum().real();
}

inline int perfect_square_root(Eigen::Index n) {
  const auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  return r * r == n ? static_cast<int>(r) : -1;
}

/// tr(rho (e (x) f)) with the first Kronecker factor on the slow index:
/// basis vector |i j> sits at position d*i + j.
inline double born_bipartite(const CMatrix& rho, const CMatrix& e, const CMatrix& f) {
  const int d = perfect_square_root(rho.rows());
  if (rho.rows() != rho.cols() || d < 0)
    throw DimensionMismatch("born_bipartite: state dimension is not a perfect square");
  if (e.rows() != d || e.cols() != d || f.rows() != d || f.cols() != d)
    throw DimensionMismatch("born_bipartite: local effects do not match the state");
  Complex acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) acc += rho(d * i + j, d * k + l) * e(k, i) * f(l, j);
  return acc.real();
}

/// K with tr(rho (e (x) f)) = tr(e K) for every e; K = tr_B(rho (I (x) f)).
inline CMatrix contract_second(const CMatrix& rho, const CMatrix& f) {
  const int d = static_cast<int>(f.rows());
  CMatrix k = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int kk = 0; kk < d; ++kk)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) k(i, kk) += rho(d * i + j, d * kk + l) * f(l, j);
  return k;
}

/// L with tr(rho (e (x) f)) = tr(f L) for every f; L = tr_A(rho (e (x) I)).
inline CMatrix contract_first(const CMatrix& rho, const CMatrix& e) {
  const int d = static_cast<int>(e.rows());
  CMatrix out = CMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) out(j, l) += rho(d * i + j, d * k + l) * e(k, i);
  return out;
}

/// |Omega><Omega| with |Omega> = d^{-1/2} sum_j |jj>.
inline CMatrix max_entangled(int d) {
  if (d < 1) throw ContractViolation("max_entangled: dimension must be at least 1");
  CMatrix rho = CMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rho(d * i + i, d * j + j) = 1.0 / d;
  return rho;
}

// ---------------------------------------------------------------------------
// Structural lemmas

/// p[z] / sum_j p[j]: a lower bound on the operator norm of the POVM element
/// whose outcome probabilities (against a fixed conditional state) form `row`.
/// `z` is 0-based.
inline double povm_norm_lower_bound(std::span<const double> row, std::size_t z) {
  if (z >= row.size()) throw ContractViolation("povm_norm_lower_bound: outcome index out of range");
  double sum = 0.0;
  for (double p : row) {
    if (p < -1e-12) throw ContractViolation("povm_norm_lower_bound: negative probability");
    sum += p;
  }
  if (!(sum > 0.0)) throw UndefinedBound("povm_norm_lower_bound: row sums to zero");
  return row[z] / sum;
}

/// Unit vector completion: returns an orthonormal basis of C^d whose leading
/// members are `seeds` (assumed orthonormal). Remaining members come from
/// Gram-Schmidt over e_1, ..., e_d in order, skipping candidates whose
/// residual norm is below 1e-8; each new member is phase fixed.
inline std::vector<CVector> complete_to_orthonormal(std::span<const CVector> seeds) {
  if (seeds.empty()) throw ContractViolation("complete_to_orthonormal: no seed vectors");
  const auto d = seeds.front().size();
  std::vector<CVector> basis(seeds.begin(), seeds.end());
  for (const auto& s : basis) {
    if (s.size() != d) throw DimensionMismatch("complete_to_orthonormal: seed dimensions differ");
    if (std::abs(s.norm() - 1.0) > 1e-6)
      throw ContractViolation("complete_to_orthonormal: seed is not a unit vector");
  }
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j)
      if (std::abs(basis[i].dot(basis[j])) > 1e-6)
        throw ContractViolation("complete_to_orthonormal: seeds are not orthogonal");
  for (Eigen::Index k = 0; k < d && static_cast<Eigen::Index>(basis.size()) < d; ++k) {
    CVector cand = CVector::Unit(d, k);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) cand -= b * b.dot(cand);
    const double norm = cand.norm();
    if (norm < 1e-8) continue;
    basis.push_back(phase_fixed(cand / norm));
  }
  if (static_cast<Eigen::Index>(basis.size()) != d)
    throw ContractViolation("complete_to_orthonormal: seeds are not linearly independent");
  return basis;
}

inline std::vector<CVector> complete_to_orthonormal(const CVector& v) {
  return complete_to_orthonormal(std::span<const CVector>(&v, 1));
}

/// POVM rigidity: a d-outcome POVM on C^d whose elements all have operator
/// norm >= 1 consists of rank-1 projectors onto an orthonormal basis.
/// Returns that basis (phase fixed). Throws PreconditionError when a norm is
/// below 1 - tol and RigidityViolation when the conclusion fails numerically.
inline std::vector<CVector> force_rank1_orthonormal(const Povm& p, double tol = kDefaultTol) {
  if (p.empty()) throw ContractViolation("force_rank1_orthonormal: empty POVM");
  const auto d = p.front().rows();
  if (static_cast<Eigen::Index>(p.size()) != d)
    throw ContractViolation("force_rank1_orthonormal: need exactly d elements in dimension d");

  std::vector<EigenSystem> spectra;
  spectra.reserve(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j].rows() != d || p[j].cols() != d)
      throw DimensionMismatch("force_rank1_orthonormal: element dimensions differ");
    spectra.push_back(eig_hermitian(p[j], std::max(tol, 1e-9)));
    if (spectra.back().values[0] < 1.0 - tol)
      throw PreconditionError("force_rank1_orthonormal: element " + std::to_string(j + 1) +
                              " has operator norm " + std::to_string(spectra.back().values[0]) +
                              " < 1");
  }

  std::vector<CVector> out;
  out.reserve(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    CVector psi = phase_fixed(spectra[j].vectors.col(0));
    if (max_abs_diff(p[j], projector(psi)) > tol)
      throw RigidityViolation("force_rank1_orthonormal: element " + std::to_string(j + 1) +
                              " is not a rank-1 projector");
    out.push_back(std::move(psi));
  }
  for (std::size_t j = 0; j < out.size(); ++j)
    for (std::size_t k = j + 1; k < out.size(); ++k)
      if (std::abs(out[j].dot(out[k])) > tol)
        throw RigidityViolation("force_rank1_orthonormal: elements " + std::to_string(j + 1) +
                                " and " + std::to_string(k + 1) + " are not orthogonal");
  return out;
}

}  // namespace qmdim
