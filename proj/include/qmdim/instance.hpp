#pragma once

// Partial probability tables and explicit quantum models over them.

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qmdim/errors.hpp"
#include "qmdim/linalg.hpp"
#include "qmdim/quantum.hpp"

namespace qmdim {

/// (x, y, z): state x, measurement y, outcome z. All 1-based.
struct Triple {
  int x, y, z;
  auto operator<=>(const Triple&) const = default;
};

/// (y, z, y', z'): Alice's measurement/outcome then Bob's. All 1-based.
struct Quad {
  int y, z, yp, zp;
  auto operator<=>(const Quad&) const = default;
};

/// Known entries p_xyz of an X x Y x Z probability table.
class DataInstance {
 public:
  DataInstance() = default;
  DataInstance(int x_count, int y_count, int z_count) : X(x_count), Y(y_count), Z(z_count) {
    if (X < 0 || Y < 0 || Z < 0) throw ContractViolation("DataInstance: negative dimension");
  }

  int X = 0, Y = 0, Z = 0;

  /// Records p_xyz; rejects out-of-range indices, duplicates and values outside [0, 1].
  void add(int x, int y, int z, double p) {
    if (x < 1 || x > X || y < 1 || y > Y || z < 1 || z > Z)
      throw ContractViolation("DataInstance: index (" + std::to_string(x) + "," + std::to_string(y) +
                              "," + std::to_string(z) + ") out of range");
    if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("DataInstance: value outside [0, 1]");
    if (!known_.emplace(Triple{x, y, z}, p).second)
      throw ContractViolation("DataInstance: duplicate entry");
  }

  const std::map<Triple, double>& known() const noexcept { return known_; }
  bool contains(int x, int y, int z) const { return known_.count({x, y, z}) != 0; }
  double at(int x, int y, int z) const { return known_.at({x, y, z}); }

  friend bool operator==(const DataInstance&, const DataInstance&) = default;

 private:
  std::map<Triple, double> known_;
};

/// Known entries p_{y z y' z'} of a bipartite probability table.
class BipartiteInstance {
 public:
  BipartiteInstance() = default;
  BipartiteInstance(int y_count, int z_count, int yp_count, int zp_count)
      : Y(y_count), Z(z_count), Yp(yp_count), Zp(zp_count) {
    if (Y < 0 || Z < 0 || Yp < 0 || Zp < 0)
      throw ContractViolation("BipartiteInstance: negative dimension");
  }

  int Y = 0, Z = 0, Yp = 0, Zp = 0;

  void add(int y, int z, int yp, int zp, double p) {
    if (y < 1 || y > Y || z < 1 || z > Z || yp < 1 || yp > Yp || zp < 1 || zp > Zp)
      throw ContractViolation("BipartiteInstance: index out of range");
    if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("BipartiteInstance: value outside [0, 1]");
    if (!known_.emplace(Quad{y, z, yp, zp}, p).second)
      throw ContractViolation("BipartiteInstance: duplicate entry");
  }

  const std::map<Quad, double>& known() const noexcept { return known_; }
  bool contains(int y, int z, int yp, int zp) const { return known_.count({y, z, yp, zp}) != 0; }
  double at(int y, int z, int yp, int zp) const { return known_.at({y, z, yp, zp}); }

  friend bool operator==(const BipartiteInstance&, const BipartiteInstance&) = default;

 private:
  std::map<Quad, double> known_;
};

/// States rho_x and measurements (E_yz)_z on C^d. Indices are 0-based here.
struct QuantumModel {
  int d = 0;
  std::vector<CMatrix> states;
  std::vector<Povm> measurements;
};

/// A state on C^d (x) C^d and local measurements for both parties.
struct BipartiteModel {
  int d = 0;
  CMatrix state;
  std::vector<Povm> povms_a;
  std::vector<Povm> povms_b;
};

/// Reason the model is not made of valid states and POVMs, or nullopt.
inline std::optional<std::string> model_defect(const QuantumModel& m, double tol = kDefaultTol) {
  for (std::size_t x = 0; x < m.states.size(); ++x) {
    if (m.states[x].rows() != m.d) return "state " + std::to_string(x + 1) + " has the wrong dimension";
    if (auto why = state_defect(m.states[x], tol)) return "state " + std::to_string(x + 1) + ": " + *why;
  }
  for (std::size_t y = 0; y < m.measurements.size(); ++y) {
    if (!m.measurements[y].empty() && m.measurements[y].front().rows() != m.d)
      return "measurement " + std::to_string(y + 1) + " has the wrong dimension";
    if (auto why = povm_defect(m.measurements[y], tol))
      return "measurement " + std::to_string(y + 1) + ": " + *why;
  }
  return std::nullopt;
}

inline std::optional<std::string> model_defect(const BipartiteModel& m, double tol = kDefaultTol) {
  if (m.state.rows() != m.d * m.d) return "joint state has the wrong dimension";
  if (auto why = state_defect(m.state, tol)) return "joint state: " + *why;
  for (const auto* side : {&m.povms_a, &m.povms_b})
    for (std::size_t y = 0; y < side->size(); ++y) {
      const std::string tag = std::string(side == &m.povms_a ? "A" : "B") + " measurement " +
                              std::to_string(y + 1);
      if (!(*side)[y].empty() && (*side)[y].front().rows() != m.d) return tag + " has the wrong dimension";
      if (auto why = povm_defect((*side)[y], tol)) return tag + ": " + *why;
    }
  return std::nullopt;
}

inline void require_shape(const QuantumModel& m, const DataInstance& inst) {
  if (static_cast<int>(m.states.size()) < inst.X || static_cast<int>(m.measurements.size()) < inst.Y)
    throw DimensionMismatch("model has fewer states or measurements than the instance");
  for (int y = 0; y < inst.Y; ++y)
    if (static_cast<int>(m.measurements[y].size()) < inst.Z)
      throw DimensionMismatch("measurement " + std::to_string(y + 1) + " has too few outcomes");
}

inline void require_shape(const BipartiteModel& m, const BipartiteInstance& inst) {
  if (static_cast<int>(m.povms_a.size()) < inst.Y || static_cast<int>(m.povms_b.size()) < inst.Yp)
    throw DimensionMismatch("model has fewer measurements than the instance");
  for (int y = 0; y < inst.Y; ++y)
    if (static_cast<int>(m.povms_a[y].size()) < inst.Z)
      throw DimensionMismatch("A measurement has too few outcomes");
  for (int y = 0; y < inst.Yp; ++y)
    if (static_cast<int>(m.povms_b[y].size()) < inst.Zp)
      throw DimensionMismatch("B measurement has too few outcomes");
}

/// max over known entries of |tr(rho_x E_yz) - p_xyz|; 0 for an empty table.
inline double residual(const QuantumModel& m, const DataInstance& inst) {
  require_shape(m, inst);
  double worst = 0.0;
  for (const auto& [t, p] : inst.known())
    worst = std::max(worst, std::abs(born(m.states[t.x - 1], m.measurements[t.y - 1][t.z - 1]) - p));
  return worst;
}

inline double residual(const BipartiteModel& m, const BipartiteInstance& inst) {
  require_shape(m, inst);
  double worst = 0.0;
  for (const auto& [q, p] : inst.known())
    worst = std::max(worst, std::abs(born_bipartite(m.state, m.povms_a[q.y - 1][q.z - 1],
                                                    m.povms_b[q.yp - 1][q.zp - 1]) -
                                     p));
  return worst;
}

}  // namespace qmdim
