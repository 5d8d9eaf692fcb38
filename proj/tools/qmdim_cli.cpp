// qmdim: reductions, witnesses, extraction and fitting from the command line.
//
// Exit codes: 0 success, 1 negative answer, 2 usage or input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qmdim/qmdim.hpp"

namespace {

using namespace qmdim;

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;

struct Args {
  std::string graph, model, instance, out, labels;
  std::vector<std::int64_t> numbers;
  bool bipartite = false;
  bool csv = false;
  int d = 0;
  int dmax = 0;
  std::uint64_t seed = 1;
  int restarts = 8;
  double tol = -1.0;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

double tol_or(const Args& a, double fallback) { return a.tol > 0 ? a.tol : fallback; }

Graph load_graph(const std::string& path) { return parse_graph(read_text_file(path)); }

int cmd_reduce_3col(const Args& a) {
  const Graph g = load_graph(a.graph);
  if (a.bipartite)
    emit(dump(to_json(reduce_3col_to_dim3_ab(g))), a.out);
  else
    emit(dump(to_json(reduce_3col_to_dim3(g))), a.out);
  if (!a.labels.empty()) emit(dump(to_json(gadget_labels(g.vertex_count()))), a.labels);
  return kOk;
}

int cmd_witness(const Args& a) {
  const Graph g = load_graph(a.graph);
  const auto coloring = brute_force_3col(g);
  if (!coloring) {
    std::cout << "not 3-colorable\n";
    return kNegative;
  }
  const ForwardWitness fw = forward_witness(g, *coloring);
  if (a.bipartite)
    emit(dump(to_json(vectors_to_bipartite_model(fw.vectors))), a.out);
  else
    emit(dump(to_json(vectors_to_model(fw.vectors))), a.out);
  return kOk;
}

int cmd_extract(const Args& a) {
  const Graph g = load_graph(a.graph);
  const Json model = read_json_file(a.model);
  const Json inst = read_json_file(a.instance);
  const double tol = tol_or(a, kDefaultTol);
  Coloring c;
  if (is_bipartite_model_json(model)) {
    const BipartiteInstance bi = bipartite_instance_from_json(inst);
    if (!(bi == reduce_3col_to_dim3_ab(g))) throw ParseError("instance was not produced from this graph");
    c = extract_coloring(bipartite_model_from_json(model), bi, g, tol);
  } else {
    const DataInstance di = data_instance_from_json(inst);
    if (!(di == reduce_3col_to_dim3(g))) throw ParseError("instance was not produced from this graph");
    c = extract_coloring(quantum_model_from_json(model), di, g, tol);
  }
  emit(dump(to_json(c)), a.out);
  return kOk;
}

int cmd_reduce_partition(const Args& a) {
  const DataInstance inst = reduce_partition(PartitionInstance(a.numbers));
  emit(a.csv ? to_csv(inst) : dump(to_json(inst)), a.out);
  return kOk;
}

int cmd_witness_partition(const Args& a) {
  const PartitionInstance c(a.numbers);
  const auto s = brute_force_partition(c);
  if (!s) {
    std::cout << "no partition\n";
    return kNegative;
  }
  emit(dump(to_json(partition_witness_to_model(c, *s))), a.out);
  return kOk;
}

int cmd_extract_partition(const Args& a) {
  const PartitionInstance c(a.numbers);
  const QuantumModel m = quantum_model_from_json(read_json_file(a.model));
  emit(dump(to_json(model_to_partition_signs(m, c, tol_or(a, kDefaultTol)))), a.out);
  return kOk;
}

int cmd_solve(const Args& a) {
  if ((a.d > 0) == (a.dmax > 0)) throw CLI::ValidationError("solve", "give exactly one of --d and --dmax");
  SolverOptions opts;
  opts.seed = a.seed;
  opts.restarts = a.restarts;
  opts.success_tolerance = tol_or(a, opts.success_tolerance);
  const Json j = read_json_file(a.instance);
  if (is_bipartite_instance_json(j)) {
    const BipartiteInstance inst = bipartite_instance_from_json(j);
    for (int d = a.d > 0 ? a.d : 1; d <= (a.d > 0 ? a.d : a.dmax); ++d) {
      const BipartiteSolveReport r = fit_bipartite(inst, d, opts);
      if (r.success(opts.success_tolerance) || d == (a.d > 0 ? a.d : a.dmax)) {
        emit(dump(to_json(r)), a.out);
        return r.success(opts.success_tolerance) ? kOk : kNegative;
      }
    }
    return kNegative;
  }
  const DataInstance inst = data_instance_from_json(j);
  if (a.d > 0) {
    const SolveReport r = fit_model(inst, a.d, opts);
    emit(dump(to_json(r)), a.out);
    return r.success(opts.success_tolerance) ? kOk : kNegative;
  }
  if (auto r = min_dim(inst, a.dmax, opts)) {
    emit(dump(to_json(r->report)), a.out);
    return kOk;
  }
  std::cout << "no model found with d <= " << a.dmax << "\n";
  return kNegative;
}

int cmd_verify(const Args& a) {
  const Json model = read_json_file(a.model);
  const Json inst = read_json_file(a.instance);
  const double tol = tol_or(a, kDefaultTol);
  double res = 0.0;
  std::optional<std::string> defect;
  if (is_bipartite_model_json(model)) {
    const BipartiteModel m = bipartite_model_from_json(model);
    defect = model_defect(m, tol);
    res = residual(m, bipartite_instance_from_json(inst));
  } else {
    const QuantumModel m = quantum_model_from_json(model);
    defect = model_defect(m, tol);
    res = residual(m, data_instance_from_json(inst));
  }
  if (defect) {
    std::cout << "invalid model: " << *defect << "\n";
    return kNegative;
  }
  std::cout << "residual " << format_double(res) << "\n";
  return res <= tol ? kOk : kNegative;
}

int cmd_oracle_3col(const Args& a) {
  const auto c = brute_force_3col(load_graph(a.graph));
  if (!c) {
    std::cout << "none\n";
    return kNegative;
  }
  std::cout << c->letters() << "\n";
  return kOk;
}

int cmd_oracle_partition(const Args& a) {
  const auto s = brute_force_partition(PartitionInstance(a.numbers));
  if (!s) {
    std::cout << "none\n";
    return kNegative;
  }
  std::string line;
  for (int v : s->values()) line += (line.empty() ? "" : " ") + std::string(v > 0 ? "+1" : "-1");
  std::cout << line << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reductions and witnesses for minimal-dimension quantum model fitting"};
  app.require_subcommand(1);
  Args a;

  auto out_opt = [&](CLI::App* sub) { sub->add_option("--out", a.out, "Output file (default: stdout)"); };
  auto tol_opt = [&](CLI::App* sub) { sub->add_option("--tol", a.tol, "Numerical tolerance"); };
  auto numbers = [&](CLI::App* sub) {
    sub->add_option("c", a.numbers, "Positive integers")->required()->check(CLI::PositiveNumber);
  };

  auto* reduce3 = app.add_subcommand("reduce-3col", "Graph -> instance JSON");
  reduce3->add_option("graph", a.graph)->required()->check(CLI::ExistingFile);
  reduce3->add_flag("--bipartite", a.bipartite, "Emit the bipartite instance");
  reduce3->add_option("--labels", a.labels, "Also write the gadget label map here");
  out_opt(reduce3);

  auto* witness = app.add_subcommand("witness", "Graph -> exact model JSON, if 3-colorable");
  witness->add_option("graph", a.graph)->required()->check(CLI::ExistingFile);
  witness->add_flag("--bipartite", a.bipartite, "Emit the bipartite model");
  out_opt(witness);

  auto* extract = app.add_subcommand("extract", "Model + instance + graph -> coloring JSON");
  extract->add_option("model", a.model)->required()->check(CLI::ExistingFile);
  extract->add_option("instance", a.instance)->required()->check(CLI::ExistingFile);
  extract->add_option("graph", a.graph)->required()->check(CLI::ExistingFile);
  tol_opt(extract);
  out_opt(extract);

  auto* reducep = app.add_subcommand("reduce-partition", "Numbers -> instance JSON (or CSV)");
  numbers(reducep);
  reducep->add_flag("--csv", a.csv, "Write the flattened table as CSV");
  out_opt(reducep);

  auto* witnessp = app.add_subcommand("witness-partition", "Numbers -> exact real model, if partitionable");
  numbers(witnessp);
  out_opt(witnessp);

  auto* extractp = app.add_subcommand("extract-partition", "Model + numbers -> signs JSON");
  extractp->add_option("model", a.model)->required()->check(CLI::ExistingFile);
  numbers(extractp);
  tol_opt(extractp);
  out_opt(extractp);

  auto* solve = app.add_subcommand("solve", "Fit a model to an instance");
  solve->add_option("instance", a.instance)->required()->check(CLI::ExistingFile);
  solve->add_option("--d", a.d, "Fixed dimension")->check(CLI::PositiveNumber);
  solve->add_option("--dmax", a.dmax, "Sweep dimensions 1..dmax")->check(CLI::PositiveNumber);
  solve->add_option("--seed", a.seed, "Random seed");
  solve->add_option("--restarts", a.restarts, "Random restarts")->check(CLI::PositiveNumber);
  tol_opt(solve);
  out_opt(solve);

  auto* verify = app.add_subcommand("verify", "Print the residual of a model on an instance");
  verify->add_option("model", a.model)->required()->check(CLI::ExistingFile);
  verify->add_option("instance", a.instance)->required()->check(CLI::ExistingFile);
  tol_opt(verify);

  auto* oracle3 = app.add_subcommand("oracle-3col", "Brute-force 3-coloring");
  oracle3->add_option("graph", a.graph)->required()->check(CLI::ExistingFile);

  auto* oraclep = app.add_subcommand("oracle-partition", "Brute-force partition");
  numbers(oraclep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (reduce3->parsed()) return cmd_reduce_3col(a);
    if (witness->parsed()) return cmd_witness(a);
    if (extract->parsed()) return cmd_extract(a);
    if (reducep->parsed()) return cmd_reduce_partition(a);
    if (witnessp->parsed()) return cmd_witness_partition(a);
    if (extractp->parsed()) return cmd_extract_partition(a);
    if (solve->parsed()) return cmd_solve(a);
    if (verify->parsed()) return cmd_verify(a);
    if (oracle3->parsed()) return cmd_oracle_3col(a);
    if (oraclep->parsed()) return cmd_oracle_partition(a);
  } catch (const WitnessInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNegative;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
