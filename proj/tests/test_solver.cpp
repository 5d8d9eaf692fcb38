#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace qmdim;
using namespace qmdim::testing;

namespace {

DataInstance identity_block() {
  DataInstance inst(2, 1, 2);
  inst.add(1, 1, 1, 1.0);
  inst.add(1, 1, 2, 0.0);
  inst.add(2, 1, 1, 0.0);
  inst.add(2, 1, 2, 1.0);
  return inst;
}

DataInstance single_constraint() {
  DataInstance inst(1, 1, 1);
  inst.add(1, 1, 1, 1.0);
  return inst;
}

QuantumModel random_model(int d, int x, int y, int z, std::mt19937_64& rng) {
  QuantumModel m;
  m.d = d;
  for (int k = 0; k < x; ++k) m.states.push_back(random_density(d, rng));
  for (int k = 0; k < y; ++k) m.measurements.push_back(random_mixed_povm(d, z, rng));
  return m;
}

DataInstance full_table(const QuantumModel& m) {
  const int x = static_cast<int>(m.states.size()), y = static_cast<int>(m.measurements.size());
  const int z = static_cast<int>(m.measurements.front().size());
  DataInstance inst(x, y, z);
  for (int i = 1; i <= x; ++i)
    for (int j = 1; j <= y; ++j)
      for (int k = 1; k <= z; ++k)
        inst.add(i, j, k, std::clamp(trace_product(m.states[i - 1], m.measurements[j - 1][k - 1]), 0.0, 1.0));
  return inst;
}

}  // namespace

TEST(Coords, HermitianCoordinatesRepresentTraceProducts) {
  std::mt19937_64 rng(1);
  for (int d = 1; d <= 4; ++d) {
    const CMatrix a = random_hermitian(d, rng), b = random_hermitian(d, rng);
    EXPECT_NEAR(detail::herm_coords(a).dot(detail::herm_coords(b)), trace_product(a, b), 1e-12);
    EXPECT_LT(max_abs_diff(detail::herm_from_coords(detail::herm_coords(a), d), a), 1e-14);
  }
}

TEST(Projections, LandInTheFeasibleSet) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 4;
    EXPECT_TRUE(is_state(detail::project_state(random_hermitian(d, rng)), 1e-10));
    Povm p;
    for (int k = 0; k < 3; ++k) p.push_back(random_hermitian(d, rng));
    EXPECT_TRUE(is_povm(detail::project_povm(p), 1e-10));
  }
}

TEST(Projections, FixFeasiblePoints) {
  std::mt19937_64 rng(3);
  const CMatrix rho = random_density(3, rng);
  EXPECT_LT(max_abs_diff(detail::project_state(rho), rho), 1e-12);
  const Povm p = random_mixed_povm(3, 4, rng);
  const Povm q = detail::project_povm(p);
  for (std::size_t k = 0; k < p.size(); ++k) EXPECT_LT(max_abs_diff(q[k], p[k]), 1e-10);
}

TEST(FitModel, TrivialInstanceInDimensionOne) {
  const SolveReport r = fit_model(single_constraint(), 1);
  ASSERT_TRUE(r.best_model.has_value());
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_EQ(r.d, 1);
}

TEST(FitModel, IdentityBlockInDimensionTwo) {
  const SolveReport r = fit_model(identity_block(), 2);
  EXPECT_LT(r.residual, 1e-6);
  EXPECT_FALSE(model_defect(*r.best_model, 1e-8).has_value());
}

TEST(FitModel, IdentityBlockCannotFitDimensionOne) {
  // Any 1-dim model has p(1,1,1) = p(2,1,1), so the error is at least 1/2.
  const SolveReport r = fit_model(identity_block(), 1);
  EXPECT_GE(r.residual, 0.5 - 1e-12);
}

TEST(FitModel, TraceIsNonIncreasing) {
  std::mt19937_64 rng(4);
  const DataInstance inst = full_table(random_model(3, 5, 3, 3, rng));
  SolverOptions opts;
  opts.restarts = 3;
  opts.max_iterations = 200;
  opts.success_tolerance = 1e-14;
  const SolveReport r = fit_model(inst, 2, opts);
  ASSERT_EQ(r.traces.size(), 3u);
  for (const auto& trace : r.traces)
    for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k], trace[k - 1]);
}

TEST(FitModel, ReturnedModelsAreValidAndResidualMatches) {
  std::mt19937_64 rng(5);
  const DataInstance inst = full_table(random_model(2, 4, 3, 2, rng));
  const SolveReport r = fit_model(inst, 3);
  ASSERT_TRUE(r.best_model.has_value());
  EXPECT_FALSE(model_defect(*r.best_model, 1e-8).has_value());
  EXPECT_EQ(r.residual, residual(*r.best_model, inst));
}

TEST(FitModel, DeterministicGivenSeed) {
  std::mt19937_64 rng(6);
  const DataInstance inst = full_table(random_model(2, 3, 2, 2, rng));
  SolverOptions opts;
  opts.seed = 42;
  const SolveReport a = fit_model(inst, 2, opts), b = fit_model(inst, 2, opts);
  EXPECT_EQ(a.residual, b.residual);
  EXPECT_EQ(a.traces, b.traces);
}

TEST(FitModel, PlantedQubitInstancesMostlySolve) {
  int solved = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(100 + seed);
    const DataInstance inst = full_table(random_model(2, 4, 3, 2, rng));
    SolverOptions opts;
    opts.seed = static_cast<std::uint64_t>(seed);
    solved += fit_model(inst, 2, opts).residual < 1e-6;
  }
  EXPECT_GE(solved, 14);
}

TEST(FitModel, WarmStartAtWitnessIsExactInOneRound) {
  const Graph k3(3, {{1, 2}, {1, 3}, {2, 3}});
  const ForwardWitness fw = forward_witness(k3, *brute_force_3col(k3));
  const QuantumModel witness = vectors_to_model(fw.vectors);
  SolverOptions opts;
  opts.max_iterations = 1;
  opts.restarts = 1;
  const SolveReport r = fit_model(reduce_3col_to_dim3(k3), 3, opts, witness);
  EXPECT_LE(r.residual, 1e-9);
}

TEST(FitModel, InvalidOptionsThrow) {
  SolverOptions bad;
  bad.restarts = 0;
  EXPECT_THROW(fit_model(single_constraint(), 1, bad), ContractViolation);
  EXPECT_THROW(fit_model(single_constraint(), 0), ContractViolation);
}

TEST(MinDim, Examples) {
  const auto two = min_dim(identity_block(), 3);
  ASSERT_TRUE(two.has_value());
  EXPECT_EQ(two->d, 2);
  const auto one = min_dim(single_constraint(), 3);
  ASSERT_TRUE(one.has_value());
  EXPECT_EQ(one->d, 1);
  EXPECT_FALSE(min_dim(identity_block(), 1).has_value());
  EXPECT_THROW(min_dim(identity_block(), 0), ContractViolation);
}

TEST(MinDim, MonotoneInDmax) {
  const auto small = min_dim(identity_block(), 2);
  const auto large = min_dim(identity_block(), 4);
  ASSERT_TRUE(small && large);
  EXPECT_LE(large->d, small->d);
}

TEST(MinDim, TriangleReductionWithWitnessSeed) {
  const Graph k3(3, {{1, 2}, {1, 3}, {2, 3}});
  const ForwardWitness fw = forward_witness(k3, *brute_force_3col(k3));
  SolverOptions opts;
  opts.restarts = 2;
  opts.max_iterations = 50;
  const auto r = min_dim(reduce_3col_to_dim3(k3), 3, opts, vectors_to_model(fw.vectors));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->d, 3);
}

TEST(FitBipartite, TrivialInstance) {
  BipartiteInstance inst(1, 1, 1, 1);
  inst.add(1, 1, 1, 1, 1.0);
  const BipartiteSolveReport r = fit_bipartite(inst, 1);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(FitBipartite, WarmStartAtWitness) {
  const Graph k2(2, {{1, 2}});
  const ForwardWitness fw = forward_witness(k2, *brute_force_3col(k2));
  SolverOptions opts;
  opts.restarts = 1;
  opts.max_iterations = 1;
  const BipartiteSolveReport r =
      fit_bipartite(reduce_3col_to_dim3_ab(k2), 3, opts, vectors_to_bipartite_model(fw.vectors));
  EXPECT_LT(r.residual, 1e-9);
}

TEST(FitBipartite, PlantedQubitInstancesOftenSolve) {
  int solved = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(500 + seed);
    BipartiteModel m;
    m.d = 2;
    m.state = random_density(4, rng);
    for (int y = 0; y < 2; ++y) {
      m.povms_a.push_back(random_mixed_povm(2, 2, rng));
      m.povms_b.push_back(random_mixed_povm(2, 2, rng));
    }
    BipartiteInstance inst(2, 2, 2, 2);
    for (int y = 1; y <= 2; ++y)
      for (int z = 1; z <= 2; ++z)
        for (int yp = 1; yp <= 2; ++yp)
          for (int zp = 1; zp <= 2; ++zp)
            inst.add(y, z, yp, zp,
                     std::clamp(trace_product(m.state, kron(m.povms_a[y - 1][z - 1], m.povms_b[yp - 1][zp - 1])),
                                0.0, 1.0));
    SolverOptions opts;
    opts.seed = static_cast<std::uint64_t>(seed);
    const BipartiteSolveReport r = fit_bipartite(inst, 2, opts);
    solved += r.residual < 1e-5;
    if (r.best_model) EXPECT_FALSE(model_defect(*r.best_model, 1e-8).has_value());
  }
  EXPECT_GE(solved, 10);
}
