#pragma once

// JSON (de)serialization of instances, models, witnesses and reports, plus
// the CSV flattening of a single-party table.

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "qmdim/errors.hpp"
#include "qmdim/graph.hpp"
#include "qmdim/instance.hpp"
#include "qmdim/reductions.hpp"
#include "qmdim/solver.hpp"

namespace qmdim {

using Json = nlohmann::json;

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, end);
}

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw ParseError(std::string("field \"") + key + "\" is not an integer");
  return v.get<int>();
}

inline double number_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw ParseError(std::string("field \"") + key + "\" is not a number");
  return v.get<double>();
}

inline const Json& array_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array()) throw ParseError(std::string("field \"") + key + "\" is not an array");
  return v;
}

/// Runs `f`, turning library contract errors on malformed data into parse errors.
template <class F>
auto reparse(F&& f) {
  try {
    return f();
  } catch (const ContractViolation& e) {
    throw ParseError(e.what());
  } catch (const Json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrices

inline Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("matrix is not an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.front().size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ParseError("matrix rows are ragged");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& cell = row[static_cast<std::size_t>(k)];
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() || !cell[1].is_number())
        throw ParseError("matrix entry is not a [re, im] pair");
      m(i, k) = Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return m;
}

inline Json povm_to_json(const Povm& p) {
  Json out = Json::array();
  for (const auto& e : p) out.push_back(matrix_to_json(e));
  return out;
}

inline Povm povm_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("POVM is not an array");
  Povm out;
  for (const auto& e : j) out.push_back(matrix_from_json(e));
  return out;
}

// ---------------------------------------------------------------------------
// Instances

inline Json to_json(const DataInstance& inst) {
  Json known = Json::array();
  for (const auto& [t, p] : inst.known()) known.push_back({{"x", t.x}, {"y", t.y}, {"z", t.z}, {"p", p}});
  return {{"X", inst.X}, {"Y", inst.Y}, {"Z", inst.Z}, {"known", known}};
}

inline Json to_json(const BipartiteInstance& inst) {
  Json known = Json::array();
  for (const auto& [q, p] : inst.known())
    known.push_back({{"y", q.y}, {"z", q.z}, {"yp", q.yp}, {"zp", q.zp}, {"p", p}});
  return {{"Y", inst.Y}, {"Z", inst.Z}, {"Yp", inst.Yp}, {"Zp", inst.Zp}, {"known", known}};
}

inline bool is_bipartite_instance_json(const Json& j) { return j.is_object() && j.contains("Yp"); }

inline DataInstance data_instance_from_json(const Json& j) {
  return detail::reparse([&] {
    using namespace detail;
    DataInstance inst(int_field(j, "X"), int_field(j, "Y"), int_field(j, "Z"));
    for (const auto& e : array_field(j, "known"))
      inst.add(int_field(e, "x"), int_field(e, "y"), int_field(e, "z"), number_field(e, "p"));
    return inst;
  });
}

inline BipartiteInstance bipartite_instance_from_json(const Json& j) {
  return detail::reparse([&] {
    using namespace detail;
    BipartiteInstance inst(int_field(j, "Y"), int_field(j, "Z"), int_field(j, "Yp"), int_field(j, "Zp"));
    for (const auto& e : array_field(j, "known"))
      inst.add(int_field(e, "y"), int_field(e, "z"), int_field(e, "yp"), int_field(e, "zp"), number_field(e, "p"));
    return inst;
  });
}

/// One line per state x, columns ordered by measurement then outcome;
/// unknown cells are "*".
inline std::string to_csv(const DataInstance& inst) {
  std::string out;
  for (int x = 1; x <= inst.X; ++x) {
    for (int y = 1; y <= inst.Y; ++y)
      for (int z = 1; z <= inst.Z; ++z) {
        if (y > 1 || z > 1) out += ',';
        out += inst.contains(x, y, z) ? format_double(inst.at(x, y, z)) : "*";
      }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Models

inline Json to_json(const QuantumModel& m) {
  Json states = Json::array();
  for (const auto& s : m.states) states.push_back(matrix_to_json(s));
  Json meas = Json::array();
  for (const auto& p : m.measurements) meas.push_back(povm_to_json(p));
  return {{"kind", "single"}, {"d", m.d}, {"states", states}, {"measurements", meas}};
}

inline Json to_json(const BipartiteModel& m) {
  Json a = Json::array(), b = Json::array();
  for (const auto& p : m.povms_a) a.push_back(povm_to_json(p));
  for (const auto& p : m.povms_b) b.push_back(povm_to_json(p));
  return {{"kind", "bipartite"}, {"d", m.d}, {"state", matrix_to_json(m.state)}, {"povms_A", a}, {"povms_B", b}};
}

inline bool is_bipartite_model_json(const Json& j) { return j.is_object() && j.contains("povms_A"); }

inline QuantumModel quantum_model_from_json(const Json& j) {
  return detail::reparse([&] {
    using namespace detail;
    QuantumModel m;
    m.d = int_field(j, "d");
    for (const auto& s : array_field(j, "states")) m.states.push_back(matrix_from_json(s));
    for (const auto& p : array_field(j, "measurements")) m.measurements.push_back(povm_from_json(p));
    return m;
  });
}

inline BipartiteModel bipartite_model_from_json(const Json& j) {
  return detail::reparse([&] {
    using namespace detail;
    BipartiteModel m;
    m.d = int_field(j, "d");
    m.state = matrix_from_json(field(j, "state"));
    for (const auto& p : array_field(j, "povms_A")) m.povms_a.push_back(povm_from_json(p));
    for (const auto& p : array_field(j, "povms_B")) m.povms_b.push_back(povm_from_json(p));
    return m;
  });
}

// ---------------------------------------------------------------------------
// Witnesses and reports

inline Json to_json(const Coloring& c) { return {{"coloring", c.letters()}}; }

inline Coloring coloring_from_json(const Json& j) {
  return detail::reparse([&] {
    const Json& v = detail::field(j, "coloring");
    if (!v.is_string()) throw ParseError("field \"coloring\" is not a string");
    return Coloring::from_letters(v.get<std::string>());
  });
}

inline Json to_json(const GadgetLabels& labels) {
  Json pairs = Json::array();
  for (const auto& p : labels.pairs)
    pairs.push_back({{"i", p.i}, {"j", p.j}, {"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}});
  return {{"n", labels.n}, {"gadgets", pairs}};
}

inline GadgetLabels gadget_labels_from_json(const Json& j) {
  return detail::reparse([&] {
    using namespace detail;
    GadgetLabels labels;
    labels.n = int_field(j, "n");
    for (const auto& e : array_field(j, "gadgets"))
      labels.pairs.push_back({int_field(e, "i"), int_field(e, "j"), int_field(e, "a"), int_field(e, "b"),
                              int_field(e, "c"), int_field(e, "d")});
    return labels;
  });
}

inline Json to_json(const SignAssignment& s) { return {{"signs", s.values()}}; }

inline SignAssignment signs_from_json(const Json& j) {
  return detail::reparse([&] { return SignAssignment(detail::array_field(j, "signs").get<std::vector<int>>()); });
}

inline Json to_json(const PartitionInstance& c) { return {{"c", c.values()}}; }

inline PartitionInstance partition_from_json(const Json& j) {
  return detail::reparse(
      [&] { return PartitionInstance(detail::array_field(j, "c").get<std::vector<std::int64_t>>()); });
}

template <class Model>
Json to_json(const BasicSolveReport<Model>& r) {
  Json out = {{"d", r.d},
              {"residual", std::isfinite(r.residual) ? Json(r.residual) : Json(nullptr)},
              {"iterations", r.iterations},
              {"seed", r.seed},
              {"wall_seconds", r.wall_seconds},
              {"traces", r.traces}};
  out["model"] = r.best_model ? to_json(*r.best_model) : Json(nullptr);
  return out;
}

template <class Model>
BasicSolveReport<Model> solve_report_from_json(const Json& j) {
  return detail::reparse([&] {
    using namespace detail;
    BasicSolveReport<Model> r;
    r.d = int_field(j, "d");
    const Json& res = field(j, "residual");
    r.residual = res.is_null() ? INFINITY : res.get<double>();
    r.iterations = int_field(j, "iterations");
    r.seed = field(j, "seed").get<std::uint64_t>();
    r.wall_seconds = number_field(j, "wall_seconds");
    r.traces = field(j, "traces").get<std::vector<std::vector<double>>>();
    const Json& m = field(j, "model");
    if (!m.is_null()) {
      if constexpr (std::is_same_v<Model, QuantumModel>)
        r.best_model = quantum_model_from_json(m);
      else
        r.best_model = bipartite_model_from_json(m);
    }
    return r;
  });
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what());
  }
}

inline Json read_json_file(const std::string& path) { return parse_json(read_text_file(path)); }

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace qmdim
