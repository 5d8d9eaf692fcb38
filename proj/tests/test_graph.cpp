#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace qmdim;
using namespace qmdim::testing;

namespace {

Graph complete(int n) {
  Graph g(n);
  for (int u = 1; u <= n; ++u)
    for (int v = u + 1; v <= n; ++v) g.add_edge(u, v);
  return g;
}

}  // namespace

TEST(Parse, TriangleAndIsolatedVertices) {
  const Graph k3 = parse_graph("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n");
  EXPECT_EQ(k3, complete(3));
  const Graph two = parse_graph("c two isolated vertices\np edge 2 0\n");
  EXPECT_EQ(two.vertex_count(), 2);
  EXPECT_EQ(two.edge_count(), 0u);
}

TEST(Parse, DuplicateEdgesCollapse) {
  const Graph g = parse_graph("p edge 2 2\ne 1 2\ne 2 1\n");
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(Parse, ErrorsNameTheLine) {
  auto line_of = [](const char* text) {
    try {
      parse_graph(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("p edge 2 1\ne 1 3\n"), 2);
  EXPECT_EQ(line_of("p edge 2 1\ne 1 1\n"), 2);
  EXPECT_EQ(line_of("p edg 2 1\n"), 1);
  EXPECT_EQ(line_of("c x\np edge 2\n"), 2);
  EXPECT_EQ(line_of("e 1 2\n"), 1);
  EXPECT_EQ(line_of("p edge 2 1\nx 1 2\n"), 2);
  EXPECT_EQ(line_of(""), 0);
}

TEST(Parse, FormatRoundtrips) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_graph(1 + trial % 7, 0.4, rng);
    EXPECT_EQ(parse_graph(format_graph(g)), g);
  }
}

TEST(GraphType, RejectsSelfLoopsAndOutOfRange) {
  Graph g(3);
  EXPECT_THROW(g.add_edge(1, 1), ContractViolation);
  EXPECT_THROW(g.add_edge(0, 2), ContractViolation);
  EXPECT_THROW(g.add_edge(1, 4), ContractViolation);
}

TEST(Gadget, EdgeSetMatchesFigure) {
  // Roles 1..6 = i, a, b, c, d, j.
  const Graph h = gadget_graph();
  const Graph expected(6, {{1, 2}, {1, 3}, {1, 5}, {2, 3}, {2, 6}, {3, 4}, {4, 5}, {4, 6}, {5, 6}});
  EXPECT_EQ(h, expected);
  EXPECT_FALSE(h.has_edge(1, 6));
}

TEST(Gadget, OnlyTwoColoringsUpToPermutation) {
  // Enumerate all proper 3-colorings of H_ij and classify them by the
  // partition of {i, a, b, c, d, j} into color classes.
  const Graph h = gadget_graph();
  std::set<std::vector<int>> partitions;
  for (int code = 0; code < 729; ++code) {
    std::vector<int> col(7);
    int rest = code;
    for (int v = 1; v <= 6; ++v, rest /= 3) col[v] = rest % 3;
    bool ok = true;
    for (auto [u, v] : h.edges()) ok = ok && col[u] != col[v];
    if (!ok) continue;
    std::vector<int> canon(6);
    std::vector<int> relabel(3, -1);
    int next = 0;
    for (int v = 1; v <= 6; ++v) {
      if (relabel[col[v]] < 0) relabel[col[v]] = next++;
      canon[v - 1] = relabel[col[v]];
    }
    partitions.insert(canon);
  }
  // {i,c}{a,d}{b,j} and {i,j}{a,c}{b,d}.
  const std::set<std::vector<int>> expected{{0, 1, 2, 0, 1, 2}, {0, 1, 2, 1, 2, 0}};
  EXPECT_EQ(partitions, expected);
}

TEST(Gadget, CountsMatchClosedForms) {
  std::mt19937_64 rng(2);
  for (int n = 0; n <= 8; ++n) {
    const Graph g = random_graph(n, 0.5, rng);
    const GadgetGraph gg = insert_gadgets(g);
    EXPECT_EQ(gg.graph.vertex_count(), n + 2 * n * (n - 1));
    EXPECT_EQ(gg.graph.edge_count(), g.edge_count() + static_cast<std::size_t>(9 * n * (n - 1) / 2));
    EXPECT_EQ(static_cast<int>(gg.labels.pairs.size()), n * (n - 1) / 2);
    for (auto [u, v] : g.edges()) EXPECT_TRUE(gg.graph.has_edge(u, v));
  }
}

TEST(Gadget, SpecCounts) {
  const GadgetGraph k2 = insert_gadgets(complete(2));
  EXPECT_EQ(k2.graph.vertex_count(), 6);
  EXPECT_EQ(k2.graph.edge_count(), 10u);
  const GadgetGraph three = insert_gadgets(Graph(3));
  EXPECT_EQ(three.graph.vertex_count(), 15);
  EXPECT_EQ(three.graph.edge_count(), 27u);
  EXPECT_EQ(insert_gadgets(Graph(1)).graph, Graph(1));
}

TEST(Gadget, LabelsAreFreshAndLookupMatchesOrder) {
  const GadgetLabels labels = gadget_labels(5);
  std::set<int> used;
  for (const auto& p : labels.pairs)
    for (int v : {p.a, p.b, p.c, p.d}) {
      EXPECT_GT(v, 5);
      EXPECT_TRUE(used.insert(v).second);
    }
  EXPECT_EQ(*used.rbegin(), 5 + 2 * 5 * 4);
  for (int i = 1; i <= 5; ++i)
    for (int j = i + 1; j <= 5; ++j) {
      const auto& p = labels.at(i, j);
      EXPECT_EQ(p.i, i);
      EXPECT_EQ(p.j, j);
      EXPECT_EQ(&labels.at(j, i), &p);
    }
  EXPECT_EQ(labels.at(1, 2).a, 6);
  EXPECT_EQ(labels.at(1, 3).a, 10);
  EXPECT_THROW(labels.at(2, 2), ContractViolation);
}

TEST(Decorate, CountsAndSlots) {
  const Graph k2 = triangle_decorate(complete(2));
  EXPECT_EQ(k2.vertex_count(), 6);
  EXPECT_EQ(k2.edge_count(), 7u);
  EXPECT_TRUE(k2.has_edge(slot_index(1, 1), slot_index(2, 1)));
  EXPECT_EQ(triangle_decorate(Graph(1)), Graph(3, {{1, 2}, {1, 3}, {2, 3}}));
  const Graph empty = triangle_decorate(Graph(4));
  EXPECT_EQ(empty.edge_count(), 12u);
  EXPECT_EQ(slot_index(2, 3), 6);
}

TEST(Coloring, CheckExamples) {
  const Graph k3 = complete(3);
  EXPECT_TRUE(check_coloring(k3, Coloring::from_letters("rgb")));
  EXPECT_FALSE(check_coloring(k3, Coloring::from_letters("rrb")));
  EXPECT_TRUE(check_coloring(Graph(4), Coloring::from_letters("rrrr")));
  EXPECT_THROW(check_coloring(k3, Coloring::from_letters("rg")), ContractViolation);
  EXPECT_THROW(Coloring::from_letters("rx"), ParseError);
}

TEST(Oracle, Examples) {
  EXPECT_EQ(brute_force_3col(complete(3))->letters(), "rgb");
  EXPECT_FALSE(brute_force_3col(complete(4)).has_value());
  Graph c5(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}});
  const auto c = brute_force_3col(c5);
  ASSERT_TRUE(c.has_value());
  EXPECT_TRUE(check_coloring(c5, *c));
  EXPECT_EQ(c->letters(), "rgrgb");
  EXPECT_THROW(brute_force_3col(Graph(21)), SizeLimitError);
  EXPECT_EQ(brute_force_3col(Graph(0))->colors.size(), 0u);
}

TEST(Oracle, AgreesWithExhaustiveEnumeration) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = random_graph(1 + trial % 7, 0.55, rng);
    const auto c = brute_force_3col(g);
    EXPECT_EQ(c.has_value(), colorable_by_enumeration(g));
    if (c) EXPECT_TRUE(check_coloring(g, *c));
  }
}

TEST(Enumeration, NonIsomorphicCountsUpToFourVertices) {
  const std::size_t expected[] = {1, 2, 4, 11};
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(nonisomorphic_graphs(n).size(), expected[n - 1]) << "n = " << n;
}

TEST(Oracle, GadgetsAndDecorationPreserveColorability) {
  std::mt19937_64 rng(4);
  for (int n = 1; n <= 4; ++n)
    for (const Graph& g : nonisomorphic_graphs(n)) {
      const bool colorable = brute_force_3col(g).has_value();
      EXPECT_EQ(brute_force_3col(insert_gadgets(g).graph, 100).has_value(), colorable);
      EXPECT_EQ(brute_force_3col(triangle_decorate(g), 100).has_value(), colorable);
    }
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = random_graph(5, 0.6, rng);
    EXPECT_EQ(brute_force_3col(insert_gadgets(g).graph, 100).has_value(), brute_force_3col(g).has_value());
  }
}

TEST(Extend, SpecExamples) {
  const Graph k2 = complete(2);
  const GadgetGraph gk2 = insert_gadgets(k2);
  const Coloring e = extend_coloring_to_gadgets(k2, Coloring::from_letters("rg"), gk2.labels);
  // Vertices 3..6 are a, b, c, d.
  EXPECT_EQ(e.letters(), "rgbgrb");
  EXPECT_TRUE(check_coloring(gk2.graph, e));

  const Graph two(2);
  const GadgetGraph g2 = insert_gadgets(two);
  const Coloring f = extend_coloring_to_gadgets(two, Coloring::from_letters("rr"), g2.labels);
  EXPECT_EQ(f.letters(), "rrgbgb");
  EXPECT_TRUE(check_coloring(g2.graph, f));

  EXPECT_THROW(extend_coloring_to_gadgets(k2, Coloring::from_letters("rr"), gk2.labels), ContractViolation);
}

TEST(Extend, AlwaysProperOnRandomColorableGraphs) {
  std::mt19937_64 rng(5);
  int checked = 0;
  while (checked < 100) {
    const Graph g = random_graph(1 + checked % 5, 0.5, rng);
    const auto c = brute_force_3col(g);
    if (!c) continue;
    const GadgetGraph gg = insert_gadgets(g);
    const Coloring e = extend_coloring_to_gadgets(g, *c, gg.labels);
    EXPECT_TRUE(check_coloring(gg.graph, e));
    EXPECT_TRUE(std::equal(c->colors.begin(), c->colors.end(), e.colors.begin()));
    ++checked;
  }
}

TEST(Fits, Examples) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_TRUE(fits(id, Graph(3), 0.0));
  EXPECT_TRUE(fits(id, complete(3), 0.0));
  EXPECT_FALSE(fits(Eigen::MatrixXd::Ones(2, 2), complete(2), 0.0));
  EXPECT_THROW(fits(id, complete(2), 0.0), DimensionMismatch);
}

TEST(Fits, AgreesWithEntryScanOnZeroOneMatrices) {
  std::mt19937_64 rng(6);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    const Graph g = random_graph(n, 0.5, rng);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = coin(rng) || (i == j && coin(rng)) ? 1.0 : 0.0;
    bool expected = true;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        if (i == j && m(i - 1, j - 1) != 1.0) expected = false;
        if (i != j && g.has_edge(i, j) && m(i - 1, j - 1) != 0.0) expected = false;
      }
    EXPECT_EQ(fits(m, g, 0.0), expected);
  }
}

TEST(Fits, Lemma13FamiliesFitTheGadget) {
  std::mt19937_64 rng(7);
  const Graph h = gadget_graph();
  for (int trial = 0; trial < 20; ++trial) {
    const Complex a = random_nonzero(rng), b = random_nonzero(rng), c = random_nonzero(rng);
    EXPECT_TRUE(fits(lemma13_parallel(a, b, c), h, 0.0));
    EXPECT_TRUE(fits(lemma13_perpendicular(a, b, c), h, 0.0));
    EXPECT_EQ(numerical_rank(lemma13_parallel(a, b, c)), 3);
    EXPECT_EQ(numerical_rank(lemma13_perpendicular(a, b, c)), 3);
  }
}
