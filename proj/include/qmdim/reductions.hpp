#pragma once

// Reductions from graph 3-coloring and number partitioning to quantum model
// fitting, and the witness transformations that run along them in both
// directions:
//
//   coloring of G  ->  coloring of G'  ->  Gram matrix A (rank <= 3, fits G')
//     ->  vector triples psi_yz (squared overlaps fit the decorated G')
//     ->  single-party model (rho_x, E_yz)  or  bipartite model (Omega, E, F)
//
// and back again via the rigidity checks.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qmdim/errors.hpp"
#include "qmdim/graph.hpp"
#include "qmdim/instance.hpp"
#include "qmdim/linalg.hpp"
#include "qmdim/quantum.hpp"

namespace qmdim {

/// Gram matrix A = P^dagger P of unit vectors, one row/column per vertex of G'.
struct GramWitness {
  CMatrix entries;
  int factor_rank = 3;

  Eigen::Index side() const { return entries.rows(); }
};

/// Orthonormal triples (psi_y1, psi_y2, psi_y3) in C^3, one per vertex y of G'.
/// `triples[y - 1][z - 1]` is psi_yz.
struct VectorWitness {
  std::vector<std::array<CVector, 3>> triples;

  int vertex_count() const { return static_cast<int>(triples.size()); }
  const CVector& at(int y, int z) const {
    return triples.at(static_cast<std::size_t>(y - 1))[static_cast<std::size_t>(z - 1)];
  }
};

class PartitionInstance {
 public:
  PartitionInstance() = default;
  explicit PartitionInstance(std::vector<std::int64_t> c) : c_(std::move(c)) {
    if (c_.empty()) throw ContractViolation("PartitionInstance: needs at least one number");
    for (auto v : c_)
      if (v < 1) throw ContractViolation("PartitionInstance: entries must be positive");
  }
  const std::vector<std::int64_t>& values() const noexcept { return c_; }
  int size() const noexcept { return static_cast<int>(c_.size()); }

 private:
  std::vector<std::int64_t> c_;
};

class SignAssignment {
 public:
  SignAssignment() = default;
  explicit SignAssignment(std::vector<int> s) : s_(std::move(s)) {
    for (int v : s_)
      if (v != 1 && v != -1) throw ContractViolation("SignAssignment: entries must be +1 or -1");
  }
  const std::vector<int>& values() const noexcept { return s_; }
  int size() const noexcept { return static_cast<int>(s_.size()); }
  friend bool operator==(const SignAssignment&, const SignAssignment&) = default;

 private:
  std::vector<int> s_;
};

inline std::int64_t signed_sum(const PartitionInstance& c, const SignAssignment& s) {
  if (c.size() != s.size()) throw DimensionMismatch("signed_sum: length mismatch");
  std::int64_t total = 0;
  for (int j = 0; j < c.size(); ++j) total += s.values()[j] * c.values()[j];
  return total;
}

inline constexpr double kDichotomyTau = 1e-6;
inline constexpr double kGramRankThreshold = 1e-8;

// ---------------------------------------------------------------------------
// Instance producers

/// Single-party instance: X = 3|V'|, Y = |V'|, Z = 3. Demands
/// p(3(y-1)+z, y, z) = 1 and, for each edge {(y,z), (y',z')} of the decorated
/// G', p(3(y-1)+z, y', z') = p(3(y'-1)+z', y, z) = 0.
inline DataInstance reduce_3col_to_dim3(const Graph& g) {
  const Graph gp = insert_gadgets(g).graph;
  const Graph decorated = triangle_decorate(gp);
  const int vp = gp.vertex_count();
  DataInstance inst(3 * vp, vp, 3);
  for (int y = 1; y <= vp; ++y)
    for (int z = 1; z <= 3; ++z) inst.add(slot_index(y, z), y, z, 1.0);
  for (auto [u, v] : decorated.edges()) {
    const int yu = (u - 1) / 3 + 1, zu = (u - 1) % 3 + 1;
    const int yv = (v - 1) / 3 + 1, zv = (v - 1) % 3 + 1;
    inst.add(u, yv, zv, 0.0);
    inst.add(v, yu, zu, 0.0);
  }
  return inst;
}

/// Bipartite instance: Y = Y' = |V'|, Z = Z' = 3, p(y,z,y,z) = 1/3 and both
/// orientations of every decorated edge set to 0. These are the fit
/// conditions on M = 3 tr(rho E (x) F) stored as probabilities.
inline BipartiteInstance reduce_3col_to_dim3_ab(const Graph& g) {
  const Graph gp = insert_gadgets(g).graph;
  const Graph decorated = triangle_decorate(gp);
  const int vp = gp.vertex_count();
  BipartiteInstance inst(vp, 3, vp, 3);
  for (int y = 1; y <= vp; ++y)
    for (int z = 1; z <= 3; ++z) inst.add(y, z, y, z, 1.0 / 3.0);
  for (auto [u, v] : decorated.edges()) {
    const int yu = (u - 1) / 3 + 1, zu = (u - 1) % 3 + 1;
    const int yv = (v - 1) / 3 + 1, zv = (v - 1) % 3 + 1;
    inst.add(yu, zu, yv, zv, 0.0);
    inst.add(yv, zv, yu, zu, 0.0);
  }
  return inst;
}

/// Real-case instance built from the partition numbers c with v_j = c_j^2:
///
///   rows 1..Z     : meas 1 = I_Z,            meas 2 = (v/|v|_1, 1/Z, *, ...)
///   row  Z+1      : meas 1 = v^T/|v|_1,      meas 2 = e_1^T
///   row  Z+2      : meas 1 = 1^T/Z,          meas 2 = e_2^T
///   rows Z+3..2Z  : meas 1 = *,              meas 2 = e_{x-Z}^T
inline DataInstance reduce_partition(const PartitionInstance& c) {
  const int Z = c.size();
  if (Z < 2) throw ContractViolation("reduce_partition: needs at least two numbers");
  std::vector<double> v(static_cast<std::size_t>(Z));
  double v1 = 0.0;
  for (int j = 0; j < Z; ++j) {
    v[j] = static_cast<double>(c.values()[j]) * static_cast<double>(c.values()[j]);
    v1 += v[j];
  }
  DataInstance inst(2 * Z, 2, Z);
  for (int x = 1; x <= Z; ++x) {
    for (int z = 1; z <= Z; ++z) inst.add(x, 1, z, x == z ? 1.0 : 0.0);
    inst.add(x, 2, 1, v[x - 1] / v1);
    inst.add(x, 2, 2, 1.0 / Z);
  }
  for (int j = 1; j <= Z; ++j) {
    inst.add(Z + 1, 1, j, v[j - 1] / v1);
    inst.add(Z + 2, 1, j, 1.0 / Z);
  }
  for (int x = Z + 1; x <= 2 * Z; ++x)
    for (int z = 1; z <= Z; ++z) inst.add(x, 2, z, x - Z == z ? 1.0 : 0.0);
  return inst;
}

// ---------------------------------------------------------------------------
// Forward witness transformations

/// A = P^T P where column v of P is the canonical basis vector of color c(v).
inline GramWitness coloring_to_gram(const Graph& gprime, const Coloring& c) {
  if (!check_coloring(gprime, c)) throw ContractViolation("coloring_to_gram: coloring is not proper");
  const int n = gprime.vertex_count();
  GramWitness out{CMatrix::Zero(n, n), 3};
  for (int v = 0; v < n; ++v)
    for (int w = 0; w < n; ++w) out.entries(v, w) = c.colors[v] == c.colors[w] ? 1.0 : 0.0;
  return out;
}

/// The subgraph of a triangle decoration spanned by the slot-1 vertices.
inline Graph undecorate(const Graph& decorated) {
  if (decorated.vertex_count() % 3 != 0) throw ContractViolation("undecorate: vertex count not divisible by 3");
  Graph g(decorated.vertex_count() / 3);
  for (auto [u, v] : decorated.edges())
    if ((u - 1) % 3 == 0 && (v - 1) % 3 == 0) g.add_edge((u - 1) / 3 + 1, (v - 1) / 3 + 1);
  return g;
}

/// |<psi_a|psi_b>|^2 over all (y, z) in the slot order 3(y-1)+z.
inline Eigen::MatrixXd squared_overlaps(const VectorWitness& w) {
  const int n = 3 * w.vertex_count();
  std::vector<const CVector*> flat;
  flat.reserve(static_cast<std::size_t>(n));
  for (const auto& t : w.triples)
    for (const auto& v : t) flat.push_back(&v);
  Eigen::MatrixXd out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a, b) = std::norm(flat[a]->dot(*flat[b]));
  return out;
}

/// Max deviation of any triple from orthonormality.
inline double triple_defect(const VectorWitness& w) {
  double worst = 0.0;
  for (const auto& t : w.triples)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (t[i].size() != 3) return INFINITY;
        worst = std::max(worst, std::abs(t[i].dot(t[j]) - Complex(i == j ? 1.0 : 0.0)));
      }
  return worst;
}

/// Factor A = P^dagger P with P in C^{3 x |V'|}, take the columns of P as
/// psi_y1 and complete each to an orthonormal triple.
inline VectorWitness gram_to_vectors(const GramWitness& a, const Graph& decorated) {
  const Eigen::Index n = a.side();
  if (decorated.vertex_count() != 3 * n)
    throw DimensionMismatch("gram_to_vectors: decoration size does not match the Gram matrix");
  if (!fits(a.entries, undecorate(decorated), 1e-9))
    throw WitnessInvalid("gram_to_vectors: Gram matrix does not fit G'");

  const EigenSystem es = eig_hermitian(a.entries);
  int rank = 0;
  for (Eigen::Index k = 0; k < es.values.size(); ++k)
    if (es.values[k] > kGramRankThreshold) ++rank;
  if (rank > 3) throw RankViolation("gram_to_vectors: Gram matrix has numerical rank " + std::to_string(rank) + " > 3");

  // A_vw = sum_k lambda_k U_vk conj(U_wk) = <P_v|P_w> with P_kw = sqrt(lambda_k) conj(U_wk).
  VectorWitness out;
  out.triples.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index w = 0; w < n; ++w) {
    CVector col = CVector::Zero(3);
    for (int k = 0; k < rank; ++k) col[k] = std::sqrt(es.values[k]) * std::conj(es.vectors(w, k));
    col /= col.norm();
    const auto basis = complete_to_orthonormal(col);
    out.triples.push_back({basis[0], basis[1], basis[2]});
  }
  if (!fits(squared_overlaps(out), decorated, 1e-8))
    throw WitnessInvalid("gram_to_vectors: squared overlaps do not fit the decorated graph");
  return out;
}

/// rho_{3(y-1)+z} = E_yz = |psi_yz><psi_yz|, d = 3.
inline QuantumModel vectors_to_model(const VectorWitness& w) {
  if (triple_defect(w) > 1e-9) throw WitnessInvalid("vectors_to_model: a triple is not orthonormal");
  QuantumModel m;
  m.d = 3;
  for (const auto& t : w.triples) {
    Povm povm;
    for (const auto& v : t) {
      m.states.push_back(projector(v));
      povm.push_back(projector(v));
    }
    m.measurements.push_back(std::move(povm));
  }
  return m;
}

/// Maximally entangled state on C^3 (x) C^3; Alice measures |psi_yz><psi_yz|,
/// Bob measures the projector onto the entrywise conjugate of psi_yz, so that
/// 3 tr(rho E_yz (x) F_y'z') = |<psi_yz|psi_y'z'>|^2.
inline BipartiteModel vectors_to_bipartite_model(const VectorWitness& w, int d = 3) {
  if (d != 3) throw ContractViolation("vectors_to_bipartite_model: witnesses live in dimension 3");
  if (triple_defect(w) > 1e-9) throw WitnessInvalid("vectors_to_bipartite_model: a triple is not orthonormal");
  BipartiteModel m;
  m.d = d;
  m.state = max_entangled(d);
  for (const auto& t : w.triples) {
    Povm a, b;
    for (const auto& v : t) {
      a.push_back(projector(v));
      b.push_back(projector(v.conjugate()));
    }
    m.povms_a.push_back(std::move(a));
    m.povms_b.push_back(std::move(b));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Backward extraction

namespace detail {

inline void require_dim3_instance(const DataInstance& inst) {
  if (inst.Z != 3 || inst.X != 3 * inst.Y)
    throw ContractViolation("instance does not have the shape of a 3-coloring reduction");
  for (int y = 1; y <= inst.Y; ++y)
    for (int z = 1; z <= 3; ++z)
      if (!inst.contains(slot_index(y, z), y, z) || inst.at(slot_index(y, z), y, z) != 1.0)
        throw ContractViolation("instance is missing the diagonal constraint for (" + std::to_string(y) +
                                "," + std::to_string(z) + ")");
}

inline void require_dim3_ab_instance(const BipartiteInstance& inst) {
  if (inst.Z != 3 || inst.Zp != 3 || inst.Y != inst.Yp)
    throw ContractViolation("instance does not have the shape of a bipartite 3-coloring reduction");
  for (int y = 1; y <= inst.Y; ++y)
    for (int z = 1; z <= 3; ++z)
      for (int j = 1; j <= 3; ++j) {
        const double want = j == z ? 1.0 / 3.0 : 0.0;
        if (!inst.contains(y, j, y, z) || !inst.contains(y, z, y, j) ||
            std::abs(inst.at(y, j, y, z) - want) > 1e-15 || std::abs(inst.at(y, z, y, j) - want) > 1e-15)
          throw ContractViolation("instance is missing the local constraints of vertex " + std::to_string(y));
      }
}

/// Pure-state rigidity for a diagonal pair (rho, E) with tr(rho E) = 1:
/// both have unit Frobenius norm and coincide. Returns the phase-fixed
/// eigenvector spanning E.
inline CVector rigid_pair_vector(const CMatrix& rho, const CMatrix& e, double tol, const std::string& tag) {
  if (e.rows() != rho.rows()) throw DimensionMismatch(tag + ": state and effect dimensions differ");
  const double ne = frobenius_norm(e);
  if (std::abs(ne - 1.0) > tol)
    throw RigidityViolation(tag + ": effect has Frobenius norm " + std::to_string(ne) + " != 1");
  const double nr = frobenius_norm(rho);
  if (std::abs(nr - 1.0) > tol)
    throw RigidityViolation(tag + ": state has Frobenius norm " + std::to_string(nr) + " != 1");
  if (max_abs_diff(rho, e) > tol) throw RigidityViolation(tag + ": state and effect differ");
  return phase_fixed(eig_hermitian(e, std::max(tol, 1e-9)).vectors.col(0));
}

inline std::string pair_tag(int y, int z) {
  return "(" + std::to_string(y) + "," + std::to_string(z) + ")";
}

}  // namespace detail

/// Rigidity extraction for a model of reduce_3col_to_dim3(g): every state on
/// the diagonal is pure and equals its effect, so the effects are rank-1
/// projectors whose vectors reproduce every known entry as a squared overlap.
inline VectorWitness model_to_vectors(const QuantumModel& m, const DataInstance& inst,
                                      double tol = kDefaultTol) {
  detail::require_dim3_instance(inst);
  require_shape(m, inst);
  if (m.d != 3) throw WitnessInvalid("model_to_vectors: model dimension is not 3");

  VectorWitness w;
  w.triples.resize(static_cast<std::size_t>(inst.Y));
  for (int y = 1; y <= inst.Y; ++y)
    for (int z = 1; z <= 3; ++z)
      w.triples[y - 1][z - 1] = detail::rigid_pair_vector(m.states[slot_index(y, z) - 1],
                                                          m.measurements[y - 1][z - 1], tol,
                                                          "pair " + detail::pair_tag(y, z));
  for (const auto& [t, p] : inst.known()) {
    const int y = (t.x - 1) / 3 + 1, z = (t.x - 1) % 3 + 1;
    const double overlap = std::norm(w.at(y, z).dot(w.at(t.y, t.z)));
    if (std::abs(overlap - p) > tol)
      throw WitnessInvalid("model_to_vectors: squared overlap " + detail::pair_tag(y, z) + " vs " +
                           detail::pair_tag(t.y, t.z) + " does not reproduce the instance");
  }
  return w;
}

/// Bipartite extraction: operator-norm bounds certify every local element has
/// norm >= 1, POVM rigidity turns each local measurement into an orthonormal
/// basis, and the returned Alice vectors reproduce 3 * (known values) as
/// squared overlaps.
inline VectorWitness bipartite_model_to_vectors(const BipartiteModel& m, const BipartiteInstance& inst,
                                                double tol = kDefaultTol) {
  detail::require_dim3_ab_instance(inst);
  require_shape(m, inst);
  if (m.d != 3 || m.state.rows() != 9) throw WitnessInvalid("bipartite_model_to_vectors: model dimension is not 3");

  // Lower bounds from the diagonal rows of the table (each equals 1).
  for (int y = 1; y <= inst.Y; ++y)
    for (int z = 1; z <= 3; ++z) {
      std::array<double, 3> row_b{}, row_a{};
      for (int j = 1; j <= 3; ++j) {
        row_b[j - 1] = inst.at(y, z, y, j);
        row_a[j - 1] = inst.at(y, j, y, z);
      }
      const double bound_f = povm_norm_lower_bound(row_b, static_cast<std::size_t>(z - 1));
      const double bound_e = povm_norm_lower_bound(row_a, static_cast<std::size_t>(z - 1));
      if (bound_f < 1.0 - tol || bound_e < 1.0 - tol)
        throw PreconditionError("bipartite_model_to_vectors: norm bound below 1 at " + detail::pair_tag(y, z));
    }

  VectorWitness eta;
  std::vector<std::vector<CVector>> mu;
  eta.triples.resize(static_cast<std::size_t>(inst.Y));
  for (int y = 1; y <= inst.Y; ++y) {
    const auto basis_a = force_rank1_orthonormal(m.povms_a[y - 1], tol);
    for (int z = 0; z < 3; ++z) eta.triples[y - 1][z] = basis_a[z];
    mu.push_back(force_rank1_orthonormal(m.povms_b[y - 1], tol));
  }

  const int d = m.d;
  for (const auto& [q, p] : inst.known()) {
    const double model_value =
        d * born_bipartite(m.state, projector(eta.at(q.y, q.z)), projector(mu[q.yp - 1][q.zp - 1]));
    if (std::abs(model_value - 3.0 * p) > tol)
      throw WitnessInvalid("bipartite_model_to_vectors: reproduction failure at " + detail::pair_tag(q.y, q.z) +
                           " x " + detail::pair_tag(q.yp, q.zp));
    const double overlap = std::norm(eta.at(q.y, q.z).dot(eta.at(q.yp, q.zp)));
    if (std::abs(overlap - 3.0 * p) > tol)
      throw WitnessInvalid("bipartite_model_to_vectors: Alice vectors do not reproduce " +
                           detail::pair_tag(q.y, q.z) + " x " + detail::pair_tag(q.yp, q.zp));
  }
  return eta;
}

/// Gram matrix of the slot-1 vectors <psi_v1|psi_w1>.
inline GramWitness gram_from_vectors(const VectorWitness& w) {
  const int n = w.vertex_count();
  GramWitness out{CMatrix(n, n), 3};
  for (int v = 1; v <= n; ++v)
    for (int u = 1; u <= n; ++u) out.entries(v - 1, u - 1) = w.at(v, 1).dot(w.at(u, 1));
  return out;
}

/// Reads a coloring of G off a rank <= 3 Gram matrix fitting G': original
/// vertices are either parallel (|a_ij| ~ 1) or perpendicular (|a_ij| ~ 0);
/// the parallel classes become the colors r, g, b in order of their smallest
/// member.
inline Coloring gram_to_coloring(const GramWitness& a, const Graph& g, const GadgetLabels& labels,
                                 double tau = kDichotomyTau) {
  const int n = g.vertex_count();
  const GadgetGraph gg = insert_gadgets(g);
  if (!(labels == gg.labels)) throw ContractViolation("gram_to_coloring: labels do not belong to this graph");
  if (a.side() != gg.graph.vertex_count())
    throw DimensionMismatch("gram_to_coloring: Gram matrix size does not match G'");
  if (!fits(a.entries, gg.graph, 1e-9)) throw WitnessInvalid("gram_to_coloring: Gram matrix does not fit G'");
  auto mag = [&](int u, int v) { return std::abs(a.entries(u - 1, v - 1)); };
  auto parallel = [&](int u, int v) { return mag(u, v) >= 1.0 - tau; };
  auto perpendicular = [&](int u, int v) { return mag(u, v) <= tau; };

  for (const auto& p : labels.pairs)
    if (!parallel(p.i, p.j) && !perpendicular(p.i, p.j))
      throw DichotomyViolation("gram_to_coloring: |a_" + std::to_string(p.i) + "," + std::to_string(p.j) +
                               "| = " + std::to_string(mag(p.i, p.j)) + " is neither 0 nor 1");
  const EigenSystem es = eig_hermitian(a.entries);
  const int rank = static_cast<int>((es.values.array() > kGramRankThreshold).count());
  if (rank > 3) throw RankViolation("gram_to_coloring: Gram matrix has numerical rank " + std::to_string(rank));

  for (const auto& p : labels.pairs) {
    const bool consistent = parallel(p.i, p.j)
                                ? parallel(p.a, p.c) && parallel(p.b, p.d)
                                : parallel(p.i, p.c) && parallel(p.a, p.d) && parallel(p.b, p.j);
    if (!consistent)
      throw DichotomyViolation("gram_to_coloring: gadget for {" + std::to_string(p.i) + "," +
                               std::to_string(p.j) + "} matches neither scenario");
  }

  std::vector<int> representatives;
  Coloring out;
  for (int k = 1; k <= n; ++k) {
    int match = -1;
    for (int c = 0; c < static_cast<int>(representatives.size()); ++c)
      if (parallel(k, representatives[c])) {
        if (match >= 0) throw DichotomyViolation("gram_to_coloring: parallel classes are not disjoint");
        match = c;
      }
    if (match < 0) {
      if (representatives.size() == 3)
        throw RankViolation("gram_to_coloring: more than three pairwise perpendicular classes");
      representatives.push_back(k);
      match = static_cast<int>(representatives.size()) - 1;
    }
    out.colors.push_back(kColors[match]);
  }
  if (!check_coloring(g, out)) throw WitnessInvalid("gram_to_coloring: extracted coloring is not proper");
  return out;
}

// ---------------------------------------------------------------------------
// Partition

inline constexpr int kPartitionLimit = 30;

/// First sign vector with s_1 = +1 (ordering + before -) such that
/// sum_j s_j c_j = 0, or nullopt.
inline std::optional<SignAssignment> brute_force_partition(const PartitionInstance& c,
                                                           int limit = kPartitionLimit) {
  const int Z = c.size();
  if (Z > limit)
    throw SizeLimitError("brute_force_partition: " + std::to_string(Z) + " numbers exceeds limit " +
                         std::to_string(limit));
  const auto& v = c.values();
  std::int64_t total = std::accumulate(v.begin(), v.end(), std::int64_t{0});
  if (total % 2 != 0) return std::nullopt;

  std::vector<std::int64_t> suffix(static_cast<std::size_t>(Z) + 1, 0);
  for (int j = Z - 1; j >= 0; --j) suffix[j] = suffix[j + 1] + v[j];

  std::vector<int> s(static_cast<std::size_t>(Z), 1);
  auto search = [&](auto&& self, int j, std::int64_t partial) -> bool {
    if (j == Z) return partial == 0;
    if (std::abs(partial) > suffix[j]) return false;
    for (int sign : {1, -1}) {
      if (j == 0 && sign == -1) break;
      s[j] = sign;
      if (self(self, j + 1, partial + sign * v[j])) return true;
    }
    return false;
  };
  if (!search(search, 0, 0)) return std::nullopt;
  return SignAssignment(std::move(s));
}

/// Real model satisfying reduce_partition(c) built from a valid partition s.
inline QuantumModel partition_witness_to_model(const PartitionInstance& c, const SignAssignment& s) {
  const int Z = c.size();
  if (Z < 2) throw ContractViolation("partition_witness_to_model: needs at least two numbers");
  if (signed_sum(c, s) != 0) throw NotAWitness("partition_witness_to_model: signs do not balance");

  double cnorm = 0.0;
  for (auto v : c.values()) cnorm += static_cast<double>(v) * static_cast<double>(v);
  cnorm = std::sqrt(cnorm);
  CVector phi1(Z), phi2(Z);
  for (int n = 0; n < Z; ++n) {
    phi1[n] = s.values()[n] * static_cast<double>(c.values()[n]) / cnorm;
    phi2[n] = 1.0 / std::sqrt(static_cast<double>(Z));
  }
  if (std::abs(phi1.dot(phi2)) > 1e-10)
    throw NotAWitness("partition_witness_to_model: seed vectors are not orthogonal");
  const std::array<CVector, 2> seeds{phi1, phi2};
  const auto phi = complete_to_orthonormal(std::span<const CVector>(seeds));

  QuantumModel m;
  m.d = Z;
  Povm canonical, rotated;
  for (int x = 0; x < Z; ++x) canonical.push_back(projector(CVector::Unit(Z, x)));
  for (int x = 0; x < Z; ++x) rotated.push_back(projector(phi[x]));
  for (const auto& e : canonical) m.states.push_back(e);
  for (const auto& e : rotated) m.states.push_back(e);
  m.measurements = {canonical, rotated};
  return m;
}

/// Recovers a balancing sign vector from a real model of reduce_partition(c):
/// rigidity yields unit vectors psi_{y,z}; s_j = sign(psi_{1,j} . psi_{2,1}) *
/// sign(psi_{1,j} . psi_{2,2}).
inline SignAssignment model_to_partition_signs(const QuantumModel& m, const PartitionInstance& c,
                                               double tol = kDefaultTol) {
  const int Z = c.size();
  if (Z < 2) throw ContractViolation("model_to_partition_signs: needs at least two numbers");
  if (m.d != Z || static_cast<int>(m.states.size()) != 2 * Z || m.measurements.size() != 2)
    throw DimensionMismatch("model_to_partition_signs: model shape does not match the instance");
  for (const auto& povm : m.measurements)
    if (static_cast<int>(povm.size()) != Z)
      throw DimensionMismatch("model_to_partition_signs: measurement has the wrong number of outcomes");
  for (const auto& rho : m.states)
    if (!is_real(rho, tol)) throw ContractViolation("model_to_partition_signs: model is not real");
  for (const auto& povm : m.measurements)
    for (const auto& e : povm)
      if (!is_real(e, tol)) throw ContractViolation("model_to_partition_signs: model is not real");

  std::array<std::vector<Eigen::VectorXd>, 2> psi;
  for (int y = 1; y <= 2; ++y)
    for (int z = 1; z <= Z; ++z) {
      const int x = y == 1 ? z : Z + z;
      const CVector v = detail::rigid_pair_vector(m.states[x - 1], m.measurements[y - 1][z - 1], tol,
                                                  "pair " + detail::pair_tag(y, z));
      psi[y - 1].push_back(v.real());
    }

  std::vector<int> s;
  for (int j = 0; j < Z; ++j) {
    const double xj = psi[0][j].dot(psi[1][0]);
    const double yj = psi[0][j].dot(psi[1][1]);
    if (std::abs(xj) < tol || std::abs(yj) < tol)
      throw ExtractionAmbiguity("model_to_partition_signs: vanishing overlap for index " + std::to_string(j + 1));
    s.push_back((xj > 0) == (yj > 0) ? 1 : -1);
  }
  SignAssignment out(std::move(s));
  if (signed_sum(c, out) != 0)
    throw WitnessInvalid("model_to_partition_signs: extracted signs do not balance");
  return out;
}

// ---------------------------------------------------------------------------
// Whole pipelines

/// Every intermediate object of the forward chain for one coloring.
struct ForwardWitness {
  GadgetGraph gadgets;
  Coloring extended;
  GramWitness gram;
  VectorWitness vectors;
};

inline ForwardWitness forward_witness(const Graph& g, const Coloring& c) {
  ForwardWitness fw;
  fw.gadgets = insert_gadgets(g);
  fw.extended = extend_coloring_to_gadgets(g, c, fw.gadgets.labels);
  fw.gram = coloring_to_gram(fw.gadgets.graph, fw.extended);
  fw.vectors = gram_to_vectors(fw.gram, triangle_decorate(fw.gadgets.graph));
  return fw;
}

/// model -> vectors -> Gram -> coloring of g.
inline Coloring extract_coloring(const QuantumModel& m, const DataInstance& inst, const Graph& g,
                                 double tol = kDefaultTol) {
  const VectorWitness w = model_to_vectors(m, inst, tol);
  return gram_to_coloring(gram_from_vectors(w), g, gadget_labels(g.vertex_count()));
}

inline Coloring extract_coloring(const BipartiteModel& m, const BipartiteInstance& inst, const Graph& g,
                                 double tol = kDefaultTol) {
  const VectorWitness w = bipartite_model_to_vectors(m, inst, tol);
  return gram_to_coloring(gram_from_vectors(w), g, gadget_labels(g.vertex_count()));
}

}  // namespace qmdim
