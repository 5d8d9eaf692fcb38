#pragma once

#include <algorithm>
#include <complex>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "qmdim/qmdim.hpp"

namespace qmdim::testing {

/// Rank-3 fitting matrices of H_ij in the order (i, a, b, c, d, j).
/// Parallel scenario: i ~ j, a ~ c, b ~ d.
inline CMatrix lemma13_parallel(Complex a, Complex b, Complex c) {
  CMatrix m = CMatrix::Identity(6, 6);
  m(0, 5) = a;
  m(5, 0) = 1.0 / a;
  m(1, 3) = b;
  m(3, 1) = 1.0 / b;
  m(2, 4) = c;
  m(4, 2) = 1.0 / c;
  return m;
}

/// Perpendicular scenario: i ~ c, a ~ d, b ~ j.
inline CMatrix lemma13_perpendicular(Complex a, Complex b, Complex c) {
  CMatrix m = CMatrix::Identity(6, 6);
  m(0, 3) = a;
  m(3, 0) = 1.0 / a;
  m(1, 4) = b;
  m(4, 1) = 1.0 / b;
  m(2, 5) = c;
  m(5, 2) = 1.0 / c;
  return m;
}

inline Complex random_nonzero(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.2, 3.0), arg(0.0, 2 * 3.14159265358979323846);
  return std::polar(mag(rng), arg(rng));
}

inline CMatrix random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(n01(rng), n01(rng));
  return m;
}

inline CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  const CMatrix g = random_complex(d, d, rng);
  return (g + g.adjoint()) / 2.0;
}

inline CMatrix random_density(int d, std::mt19937_64& rng) {
  const CMatrix g = random_complex(d, d, rng);
  const CMatrix w = g * g.adjoint();
  return w / w.trace().real();
}

inline CMatrix random_unitary(int d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMatrix> qr(random_complex(d, d, rng));
  return qr.householderQ();
}

/// Orthonormal-projector POVM from the columns of a random unitary.
inline Povm random_projective_povm(int d, std::mt19937_64& rng) {
  const CMatrix u = random_unitary(d, rng);
  Povm p;
  for (int k = 0; k < d; ++k) p.push_back(projector(u.col(k)));
  return p;
}

/// Full-rank POVM: S^{-1/2} W_k S^{-1/2} for random Wishart W_k.
inline Povm random_mixed_povm(int d, int outcomes, std::mt19937_64& rng) {
  Povm w;
  CMatrix sum = CMatrix::Zero(d, d);
  for (int k = 0; k < outcomes; ++k) {
    const CMatrix g = random_complex(d, d, rng);
    w.push_back(g * g.adjoint());
    sum += w.back();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sum);
  const CMatrix inv_sqrt = es.operatorInverseSqrt();
  for (auto& e : w) {
    e = inv_sqrt * e * inv_sqrt;
    e = (e + e.adjoint()) / 2.0;
  }
  return w;
}

/// Dense trace of a product, independent of qmdim::born.
inline double trace_product(const CMatrix& a, const CMatrix& b) { return (a * b).trace().real(); }

inline Graph graph_from_mask(int n, unsigned mask) {
  Graph g(n);
  int bit = 0;
  for (int u = 1; u <= n; ++u)
    for (int v = u + 1; v <= n; ++v, ++bit)
      if (mask & (1u << bit)) g.add_edge(u, v);
  return g;
}

/// One representative per isomorphism class of graphs on n vertices.
inline std::vector<Graph> nonisomorphic_graphs(int n) {
  const int pairs = n * (n - 1) / 2;
  std::set<unsigned> seen;
  std::vector<Graph> out;
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (unsigned mask = 0; mask < (1u << pairs); ++mask) {
    const Graph g = graph_from_mask(n, mask);
    unsigned canon = ~0u;
    std::iota(perm.begin(), perm.end(), 1);
    do {
      Graph h(n);
      for (auto [u, v] : g.edges()) h.add_edge(perm[u - 1], perm[v - 1]);
      unsigned m = 0;
      int bit = 0;
      for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v, ++bit)
          if (h.has_edge(u, v)) m |= 1u << bit;
      canon = std::min(canon, m);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (seen.insert(canon).second) out.push_back(g);
  }
  return out;
}

inline Graph random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  Graph g(n);
  for (int u = 1; u <= n; ++u)
    for (int v = u + 1; v <= n; ++v)
      if (coin(rng)) g.add_edge(u, v);
  return g;
}

/// Exhaustive 3-colorability over all 3^n assignments.
inline bool colorable_by_enumeration(const Graph& g) {
  const int n = g.vertex_count();
  int total = 1;
  for (int k = 0; k < n; ++k) total *= 3;
  for (int code = 0; code < total; ++code) {
    std::vector<int> col(static_cast<std::size_t>(n) + 1);
    int rest = code;
    for (int v = 1; v <= n; ++v, rest /= 3) col[v] = rest % 3;
    bool ok = true;
    for (auto [u, v] : g.edges()) ok = ok && col[u] != col[v];
    if (ok) return true;
  }
  return false;
}

/// Exhaustive partition check over all 2^Z sign vectors.
inline bool partitionable_by_enumeration(const std::vector<std::int64_t>& c) {
  const int z = static_cast<int>(c.size());
  for (unsigned mask = 0; mask < (1u << z); ++mask) {
    std::int64_t s = 0;
    for (int j = 0; j < z; ++j) s += (mask & (1u << j)) ? c[j] : -c[j];
    if (s == 0) return true;
  }
  return false;
}

}  // namespace qmdim::testing
