#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmdim/errors.hpp"

namespace qmdim {

/// Undirected simple graph on vertices 1..n.
class Graph {
 public:
  using Edge = std::pair<int, int>;  // first < second

  Graph() = default;
  explicit Graph(int n) : n_(n) {
    if (n < 0) throw ContractViolation("Graph: negative vertex count");
  }
  Graph(int n, std::initializer_list<Edge> edges) : Graph(n) {
    for (auto [u, v] : edges) add_edge(u, v);
  }

  int vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::set<Edge>& edges() const noexcept { return edges_; }

  /// Adds {u, v}; returns false if the edge was already present.
  bool add_edge(int u, int v) {
    if (u < 1 || v < 1 || u > n_ || v > n_)
      throw ContractViolation("edge endpoint out of range: " + std::to_string(u) + " " +
                              std::to_string(v));
    if (u == v) throw ContractViolation("self-loop on vertex " + std::to_string(u));
    return edges_.insert(std::minmax(u, v)).second;
  }

  bool has_edge(int u, int v) const { return edges_.count(std::minmax(u, v)) != 0; }

  /// 1-based adjacency lists, index 0 unused.
  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_) + 1);
    for (auto [u, v] : edges_) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    return adj;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int n_ = 0;
  std::set<Edge> edges_;
};

enum class Color : unsigned char { Red = 0, Green = 1, Blue = 2 };

inline constexpr std::array<Color, 3> kColors{Color::Red, Color::Green, Color::Blue};

inline char color_letter(Color c) { return "rgb"[static_cast<int>(c)]; }

inline Color color_from_letter(char ch) {
  switch (ch) {
    case 'r': return Color::Red;
    case 'g': return Color::Green;
    case 'b': return Color::Blue;
    default: throw ParseError(std::string("unknown color '") + ch + "'");
  }
}

/// Vertex coloring; `colors[v - 1]` is the color of vertex v.
struct Coloring {
  std::vector<Color> colors;

  Color operator()(int v) const { return colors.at(static_cast<std::size_t>(v - 1)); }
  std::string letters() const {
    std::string s;
    for (Color c : colors) s.push_back(color_letter(c));
    return s;
  }
  static Coloring from_letters(std::string_view s) {
    Coloring c;
    for (char ch : s) c.colors.push_back(color_from_letter(ch));
    return c;
  }
  friend bool operator==(const Coloring&, const Coloring&) = default;
};

// ---------------------------------------------------------------------------
// Graph file format: `p edge <n> <m>` header, `e <u> <v>` edges, `c` comments.

inline Graph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::optional<Graph> g;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag == "c") continue;
    if (tag == "p") {
      std::string kind;
      long long n = -1, m = -1;
      if (g) throw ParseError("duplicate header", lineno);
      if (!(ls >> kind >> n >> m) || kind != "edge" || n < 0 || m < 0)
        throw ParseError("malformed header, expected 'p edge <n> <m>'", lineno);
      std::string extra;
      if (ls >> extra) throw ParseError("trailing tokens after header", lineno);
      g.emplace(static_cast<int>(n));
    } else if (tag == "e") {
      if (!g) throw ParseError("edge before header", lineno);
      long long u = 0, v = 0;
      if (!(ls >> u >> v)) throw ParseError("malformed edge line", lineno);
      std::string extra;
      if (ls >> extra) throw ParseError("trailing tokens after edge", lineno);
      if (u < 1 || v < 1 || u > g->vertex_count() || v > g->vertex_count())
        throw ParseError("endpoint out of range", lineno);
      if (u == v) throw ParseError("self-loop", lineno);
      g->add_edge(static_cast<int>(u), static_cast<int>(v));
    } else {
      throw ParseError("unknown line type '" + tag + "'", lineno);
    }
  }
  if (!g) throw ParseError("missing 'p edge' header");
  return *g;
}

inline std::string format_graph(const Graph& g) {
  std::ostringstream out;
  out << "p edge " << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) out << "e " << u << ' ' << v << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Gadgets

/// Vertex roles inside one gadget H_ij, in the order i, a, b, c, d, j.
enum class GadgetRole : int { I = 0, A, B, C, D, J };

/// The nine edges of H_ij.
inline constexpr std::array<std::pair<GadgetRole, GadgetRole>, 9> kGadgetEdges{{
    {GadgetRole::I, GadgetRole::A},
    {GadgetRole::I, GadgetRole::B},
    {GadgetRole::I, GadgetRole::D},
    {GadgetRole::A, GadgetRole::B},
    {GadgetRole::A, GadgetRole::J},
    {GadgetRole::B, GadgetRole::C},
    {GadgetRole::C, GadgetRole::D},
    {GadgetRole::C, GadgetRole::J},
    {GadgetRole::D, GadgetRole::J},
}};

/// Labels of the four fresh vertices attached to the original pair {i, j}.
struct GadgetPair {
  int i, j;
  int a, b, c, d;

  int vertex(GadgetRole r) const {
    switch (r) {
      case GadgetRole::I: return i;
      case GadgetRole::A: return a;
      case GadgetRole::B: return b;
      case GadgetRole::C: return c;
      case GadgetRole::D: return d;
      case GadgetRole::J: return j;
    }
    return 0;
  }
  friend bool operator==(const GadgetPair&, const GadgetPair&) = default;
};

/// One entry per unordered pair, lexicographic in (i, j); fresh labels are
/// handed out after n in blocks of four (a, b, c, d).
struct GadgetLabels {
  int n = 0;
  std::vector<GadgetPair> pairs;

  const GadgetPair& at(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i < 1 || j > n || i == j) throw ContractViolation("GadgetLabels: no pair {i, j}");
    // Pairs (i, *) start after sum_{k<i} (n - k) entries.
    const int offset = (i - 1) * n - (i - 1) * i / 2;
    return pairs.at(static_cast<std::size_t>(offset + (j - i - 1)));
  }
  friend bool operator==(const GadgetLabels&, const GadgetLabels&) = default;
};

struct GadgetGraph {
  Graph graph;
  GadgetLabels labels;
};

inline GadgetLabels gadget_labels(int n) {
  GadgetLabels labels{n, {}};
  int next = n + 1;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      labels.pairs.push_back({i, j, next, next + 1, next + 2, next + 3});
      next += 4;
    }
  return labels;
}

/// G': G plus a copy of H_ij for every unordered pair {i, j} of vertices.
inline GadgetGraph insert_gadgets(const Graph& g) {
  const int n = g.vertex_count();
  GadgetLabels labels = gadget_labels(n);
  Graph out(n + 2 * n * (n - 1));
  for (auto [u, v] : g.edges()) out.add_edge(u, v);
  for (const auto& pair : labels.pairs)
    for (auto [r1, r2] : kGadgetEdges) out.add_edge(pair.vertex(r1), pair.vertex(r2));
  return {std::move(out), std::move(labels)};
}

/// H_ij on its own, vertices numbered 1..6 in the order i, a, b, c, d, j.
inline Graph gadget_graph() {
  Graph h(6);
  for (auto [r1, r2] : kGadgetEdges) h.add_edge(static_cast<int>(r1) + 1, static_cast<int>(r2) + 1);
  return h;
}

/// 1-based index of slot z (1..3) of vertex y in a triangle decoration.
inline constexpr int slot_index(int y, int z) { return 3 * (y - 1) + z; }

/// Attach a fresh triangle to every vertex. Vertex y becomes slot 1, its two
/// new neighbours are slots 2 and 3.
inline Graph triangle_decorate(const Graph& g) {
  Graph out(3 * g.vertex_count());
  for (auto [u, v] : g.edges()) out.add_edge(slot_index(u, 1), slot_index(v, 1));
  for (int y = 1; y <= g.vertex_count(); ++y) {
    out.add_edge(slot_index(y, 1), slot_index(y, 2));
    out.add_edge(slot_index(y, 1), slot_index(y, 3));
    out.add_edge(slot_index(y, 2), slot_index(y, 3));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Colorings

inline bool check_coloring(const Graph& g, const Coloring& c) {
  if (c.colors.size() < static_cast<std::size_t>(g.vertex_count()))
    throw ContractViolation("check_coloring: coloring does not cover every vertex");
  return std::all_of(g.edges().begin(), g.edges().end(),
                     [&](const Graph::Edge& e) { return c(e.first) != c(e.second); });
}

inline constexpr int kBruteForceVertexLimit = 20;

/// Lexicographically first proper 3-coloring (colors r < g < b, vertices in
/// index order), or nullopt if none exists.
inline std::optional<Coloring> brute_force_3col(const Graph& g,
                                                int vertex_limit = kBruteForceVertexLimit) {
  const int n = g.vertex_count();
  if (n > vertex_limit)
    throw SizeLimitError("brute_force_3col: " + std::to_string(n) + " vertices exceeds limit " +
                         std::to_string(vertex_limit));
  const auto adj = g.adjacency();
  std::vector<int> color(static_cast<std::size_t>(n) + 1, -1);

  // Iterative depth-first search in vertex order keeps the lexicographic guarantee.
  int v = 1;
  while (v >= 1 && v <= n) {
    int next = color[v] + 1;
    for (; next < 3; ++next) {
      bool ok = true;
      for (int w : adj[v])
        if (w < v && color[w] == next) {
          ok = false;
          break;
        }
      if (ok) break;
    }
    if (next < 3) {
      color[v] = next;
      ++v;
    } else {
      color[v] = -1;
      --v;
    }
  }
  if (v < 1) return std::nullopt;
  Coloring out;
  for (int u = 1; u <= n; ++u) out.colors.push_back(static_cast<Color>(color[u]));
  return out;
}

/// Extends a proper coloring of G to G' using the two colorings H_ij admits.
inline Coloring extend_coloring_to_gadgets(const Graph& g, const Coloring& c,
                                           const GadgetLabels& labels) {
  if (!check_coloring(g, c))
    throw ContractViolation("extend_coloring_to_gadgets: input coloring is not proper");
  if (labels.n != g.vertex_count())
    throw ContractViolation("extend_coloring_to_gadgets: labels belong to another graph");
  const int n = g.vertex_count();
  Coloring out;
  out.colors.assign(static_cast<std::size_t>(n + 2 * n * (n - 1)), Color::Red);
  std::copy_n(c.colors.begin(), n, out.colors.begin());
  auto set = [&](int v, Color col) { out.colors[static_cast<std::size_t>(v - 1)] = col; };

  for (const auto& p : labels.pairs) {
    const Color ci = c(p.i);
    const Color cj = c(p.j);
    if (ci != cj) {
      Color rest = Color::Red;
      for (Color k : kColors)
        if (k != ci && k != cj) rest = k;
      set(p.c, ci);
      set(p.b, cj);
      set(p.a, rest);
      set(p.d, rest);
    } else {
      std::vector<Color> others;
      for (Color k : kColors)
        if (k != ci) others.push_back(k);
      set(p.a, others[0]);
      set(p.c, others[0]);
      set(p.b, others[1]);
      set(p.d, others[1]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fitting

/// A fits G when every diagonal entry is 1 and every edge entry is 0 (within tol).
template <class Derived>
bool fits(const Eigen::MatrixBase<Derived>& m, const Graph& g, double tol) {
  const int n = g.vertex_count();
  if (m.rows() != n || m.cols() != n)
    throw DimensionMismatch("fits: matrix side does not match vertex count");
  using std::abs;
  for (int v = 0; v < n; ++v)
    if (abs(m(v, v) - typename Derived::Scalar(1)) > tol) return false;
  for (auto [u, v] : g.edges())
    if (abs(m(u - 1, v - 1)) > tol || abs(m(v - 1, u - 1)) > tol) return false;
  return true;
}

}  // namespace qmdim
