// Copyright 2026 The dppci Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include "dppci/dppci.hpp"
#include "matrix_io.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace dppci::cli {

using Json = nlohmann::ordered_json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Asymmetric:
    case ErrorKind::NonFinite:
    case ErrorKind::SpectrumOutOfRange:
    case ErrorKind::NumericalFailure:
    case ErrorKind::SingularConditioningBlock:
    case ErrorKind::GroundSetTooLarge:
    case ErrorKind::ConditioningEventNegligible:
      return kInvalidKernel;
    default:
      return kInputError;
  }
}

namespace {

struct KernelOptions {
  std::string path;
  std::string kind = "K";
  std::string format = "auto";
  double eps_spec = Tolerances{}.spectrum;
  double tol_sym = Tolerances{}.symmetry;
  double tol_zero = Tolerances{}.zero;
};

/// DPPCI_TOL replaces the built-in default; an explicit --tol wins over both.
double default_zero_tolerance() {
  const char* env = std::getenv("DPPCI_TOL");
  if (env == nullptr || *env == '\0') return Tolerances{}.zero;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v >= 0.0)) {
    throw Error(ErrorKind::ParseError, std::string("bad DPPCI_TOL value '") + env + "'");
  }
  return v;
}

void add_kernel_options(CLI::App* cmd, KernelOptions& o) {
  cmd->add_option("file", o.path, "matrix file (CSV rows or JSON {\"n\", \"rows\"})")
      ->required();
  cmd->add_option("--kind", o.kind, "kernel kind: K (marginal) or L (ensemble)")
      ->check(CLI::IsMember({"K", "L"}));
  cmd->add_option("--format", o.format, "auto, csv or json")
      ->check(CLI::IsMember({"auto", "csv", "json"}));
  cmd->add_option("--eps-spec", o.eps_spec, "margin for strict spectral bounds");
  cmd->add_option("--tol-sym", o.tol_sym, "relative symmetry tolerance");
  cmd->add_option("--tol", o.tol_zero, "relative zero tolerance (default: $DPPCI_TOL or 1e-9)");
}

Tolerances tolerances_of(const KernelOptions& o) {
  Tolerances t;
  t.spectrum = o.eps_spec;
  t.symmetry = o.tol_sym;
  t.zero = o.tol_zero;
  return t;
}

MatrixXd read_matrix(const KernelOptions& o) {
  const auto format = o.format == "csv"    ? io::MatrixFormat::Csv
                      : o.format == "json" ? io::MatrixFormat::Json
                                           : io::MatrixFormat::Auto;
  return io::read_matrix_file(o.path, format);
}

DppModeld load_model(const KernelOptions& o) {
  const Tolerances tol = tolerances_of(o);
  const SymMatrixd m = SymMatrixd::from(read_matrix(o), tol.symmetry);
  if (o.kind == "L") return DppModeld::from_ensemble(validate_ensemble(m, tol.spectrum), tol);
  return DppModeld::from_marginal(validate_marginal(m, tol.spectrum), tol);
}

Json to_json(const IndexSet& s) { return Json(s.one_based()); }

Json to_json(const CiVerdict& v) {
  Json j;
  j["independent"] = v.independent;
  j["criterion"] = v.criterion;
  j["criterion_value"] = v.criterion_value;
  j["tolerance_used"] = v.tolerance_used;
  return j;
}

Json to_json(const OracleVerdict& v) {
  Json j;
  j["independent"] = v.independent;
  j["residual"] = v.residual;
  j["tolerance"] = v.tolerance;
  return j;
}

Json error_json(const Error& e) {
  Json j;
  j["kind"] = std::string(to_string(e.kind()));
  j["message"] = e.what();
  return j;
}

Json matrix_json(const MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

void emit(std::ostream& out, const Json& j) { out << io::dump_json(j) << '\n'; }

// ---- validate --------------------------------------------------------------

int cmd_validate(const KernelOptions& o, std::ostream& out) {
  const Tolerances tol = tolerances_of(o);
  const MatrixXd raw = read_matrix(o);
  Json report;
  report["kind"] = o.kind;
  report["n"] = raw.rows();
  report["symmetry_residual"] = symmetry_residual(raw);
  report["eigenvalue_min"] = nullptr;
  report["eigenvalue_max"] = nullptr;
  int code = kOk;
  try {
    const SymMatrixd m = SymMatrixd::from(raw, tol.symmetry);
    const VectorXd ev = eigenvalues(m);
    report["eigenvalue_min"] = ev.minCoeff();
    report["eigenvalue_max"] = ev.maxCoeff();
    if (o.kind == "L") {
      validate_ensemble(m, tol.spectrum);
    } else {
      validate_marginal(m, tol.spectrum);
    }
    report["valid"] = true;
    report["error"] = nullptr;
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    if (code != kInvalidKernel) throw;
    report["valid"] = false;
    report["error"] = error_json(e);
  }
  emit(out, report);
  return code;
}

// ---- prob ------------------------------------------------------------------

struct ProbOptions {
  std::string include;
  std::string exclude;
  std::string exact;
  bool exact_given = false;
  bool oracle = false;
};

int cmd_prob(const KernelOptions& o, const ProbOptions& p, std::ostream& out) {
  const DppModeld model = load_model(o);
  Json report;
  double probability = 0.0;
  Event event;
  bool exact = p.exact_given;
  IndexSet exact_set;
  if (exact) {
    if (!p.include.empty() || !p.exclude.empty()) {
      throw Error(ErrorKind::InvalidQuery, "--exact cannot be combined with --include/--exclude");
    }
    exact_set = IndexSet::parse(p.exact);
    probability = exact_prob(model, exact_set);
    report["exact"] = to_json(exact_set);
    report["probability"] = probability;
    report["formula"] = "det(L_S) / det(L + I)";
  } else {
    event = Event(IndexSet::parse(p.include), IndexSet::parse(p.exclude));
    report["include"] = to_json(event.include());
    report["exclude"] = to_json(event.exclude());
    if (event.exclude().empty()) {
      probability = inclusion_prob(model, event.include());
      report["probability"] = probability;
      report["formula"] = "det(K_A)";
    } else {
      probability = mixed_prob(model, event);
      report["probability"] = probability;
      report["formula"] = "(-1)^|B| det([[K_A, K_AB], [K_BA, K_B - I]])";
    }
  }
  if (p.oracle) {
    const auto table = build_table(model);
    double oracle_value = 0.0;
    if (exact) {
      exact_set.check_within(model.n());
      oracle_value = table[exact_set.mask()];
    } else {
      oracle_value = event_prob(table, event);
    }
    report["oracle_probability"] = oracle_value;
    report["oracle_residual"] = std::abs(oracle_value - probability);
  }
  emit(out, report);
  return kOk;
}

// ---- ci ----------------------------------------------------------------------

struct CiOptions {
  std::string a;
  std::string b;
  std::string given_in;
  std::string given_out;
  bool oracle = false;
  bool assert_independent = false;
};

int cmd_ci(const KernelOptions& o, const CiOptions& c, std::ostream& out) {
  const DppModeld model = load_model(o);
  CiQuery q{IndexSet::parse(c.a), IndexSet::parse(c.b), IndexSet::parse(c.given_in),
            IndexSet::parse(c.given_out)};
  const CiVerdict v = test_ci(model, q);
  Json report;
  Json query;
  query["a"] = to_json(q.a);
  query["b"] = to_json(q.b);
  query["given_in"] = to_json(q.given_included);
  query["given_out"] = to_json(q.given_excluded);
  report["query"] = query;
  report.update(to_json(v));
  if (c.oracle) {
    const auto table = build_table(model);
    report["oracle"] =
        to_json(oracle_process_independence(table, q.a, q.b,
                                            Event(q.given_included, q.given_excluded)));
  }
  emit(out, report);
  if (c.assert_independent && !v.independent) return kAssertionFailed;
  return kOk;
}

// ---- graph -------------------------------------------------------------------

struct GraphOptions {
  std::string graph_of;
  std::string dot_path;
  std::vector<std::string> separates;
  std::string given_in;
};

int cmd_graph(const KernelOptions& o, const GraphOptions& g, std::ostream& out) {
  const DppModeld model = load_model(o);
  const std::string which = g.graph_of.empty() ? o.kind : g.graph_of;
  const MatrixXd& source =
      which == "L" ? model.ensemble().matrix() : model.marginal().matrix();
  const InducedGraph graph = induced_graph(source, o.tol_zero);

  Json report;
  report["n"] = graph.n();
  report["matrix"] = which;
  report["tolerance_used"] = graph.tolerance_used();
  Json edges = Json::array();
  for (const auto& [i, j] : graph.edges()) edges.push_back(Json::array({i + 1, j + 1}));
  report["edges"] = edges;

  if (!g.dot_path.empty()) {
    std::ofstream dot(g.dot_path, std::ios::binary);
    if (!dot) throw Error(ErrorKind::FileNotFound, "cannot write '" + g.dot_path + "'");
    dot << graph.to_dot();
    report["dot"] = g.dot_path;
  }

  if (!g.separates.empty()) {
    if (g.separates.size() != 3) {
      throw Error(ErrorKind::InvalidQuery, "--separates takes exactly three sets: A B C");
    }
    const IndexSet a = IndexSet::parse(g.separates[0]);
    const IndexSet b = IndexSet::parse(g.separates[1]);
    const IndexSet c = IndexSet::parse(g.separates[2]);
    const IndexSet d = IndexSet::parse(g.given_in);
    for (const IndexSet* s : {&a, &b, &c, &d}) s->check_within(graph.n());
    require_pairwise_disjoint({&a, &b, &c, &d});
    Json sep;
    sep["a"] = to_json(a);
    sep["b"] = to_json(b);
    sep["c"] = to_json(c);
    sep["separated"] = separates(graph, a, b, c);
    if (which == "L") {
      sep["given_in"] = to_json(d);
      const GraphCertificate cert = ci_from_l_graph_with_d(model, a, b, c, d);
      sep["verdict"] = std::string(to_string(cert.verdict));
      sep["statement"] =
          cert.certified()
              ? "Y_A and Y_B are independent given C disjoint from Y and D subset of Y"
              : "separation fails; independence is neither certified nor refuted";
    } else if (!d.empty()) {
      throw Error(ErrorKind::InvalidQuery, "--given-in applies to the graph of L only");
    }
    report["separation"] = sep;
  }
  emit(out, report);
  return kOk;
}

// ---- demo --------------------------------------------------------------------

int cmd_demo(bool json, std::ostream& out) {
  const CounterexampleReport r = counterexample_demo();
  if (json) {
    Json report;
    report["kernel"] = matrix_json(r.kernel);
    report["p_joint"] = r.p_joint;
    report["p_left"] = r.p_left;
    report["p_right"] = r.p_right;
    report["product"] = r.product;
    report["factorization_residual"] = r.factorization_residual;
    report["oracle_residual"] = r.oracle_residual;
    report["block"] = {{"rows", r.left_include.unite(r.left_exclude).one_based()},
                       {"cols", r.right_include.one_based()},
                       {"max_abs", r.block_max_abs}};
    report["block_verdict"] = to_json(r.block_verdict);
    report["checks_pass"] = r.checks_pass;
    emit(out, report);
  } else {
    std::ostringstream os;
    os << "Kernel K:\n";
    for (Eigen::Index i = 0; i < r.kernel.rows(); ++i) {
      os << "  ";
      for (Eigen::Index j = 0; j < r.kernel.cols(); ++j) {
        os << std::setw(6) << r.kernel(i, j) << (j + 1 < r.kernel.cols() ? " " : "\n");
      }
    }
    os << std::setprecision(17);
    os << "Pr(1 in Y, 2 not in Y, 3 in Y) = " << r.p_joint << '\n'
       << "Pr(1 in Y, 2 not in Y)         = " << r.p_left << '\n'
       << "Pr(3 in Y)                     = " << r.p_right << '\n'
       << "product                        = " << r.product << '\n'
       << "|joint - product|              = " << r.factorization_residual << '\n'
       << "oracle residual                = " << r.oracle_residual << '\n'
       << "max |K_{{1,2},{3}}|            = " << r.block_max_abs << '\n'
       << "The events factorize, yet the block K_{{1,2},{3}} is not zero:\n"
       << "mixed-event independence does not force a zero block.\n"
       << (r.checks_pass ? "all checks passed" : "CHECK FAILED") << '\n';
    out << os.str();
  }
  return r.checks_pass ? kOk : kAssertionFailed;
}

// ---- sample ------------------------------------------------------------------

int cmd_sample(const KernelOptions& o, std::uint64_t seed, std::size_t count,
               std::ostream& out) {
  const DppModeld model = load_model(o);
  const auto table = build_table(model);
  Json samples = Json::array();
  for (const auto& s : sample_many(table, seed, count)) samples.push_back(to_json(s));
  Json report;
  report["seed"] = seed;
  report["count"] = count;
  report["samples"] = samples;
  emit(out, report);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional-independence queries for determinantal point processes"};
  app.name("dppci");
  app.require_subcommand(1);

  KernelOptions kernel;
  ProbOptions prob;
  CiOptions ci;
  GraphOptions graph;
  bool demo_json = false;
  std::uint64_t seed = 0;
  std::size_t count = 1;

  auto* validate = app.add_subcommand("validate", "check a kernel file");
  add_kernel_options(validate, kernel);

  auto* prob_cmd = app.add_subcommand("prob", "event probabilities");
  add_kernel_options(prob_cmd, kernel);
  prob_cmd->add_option("--include", prob.include, "A: elements required in Y");
  prob_cmd->add_option("--exclude", prob.exclude, "B: elements required outside Y");
  auto* exact_opt = prob_cmd->add_option("--exact", prob.exact, "S: probability that Y = S");
  prob_cmd->add_flag("--oracle", prob.oracle, "recompute from the full joint table");

  auto* ci_cmd = app.add_subcommand("ci", "conditional-independence verdict");
  add_kernel_options(ci_cmd, kernel);
  ci_cmd->add_option("--a", ci.a, "A")->required();
  ci_cmd->add_option("--b", ci.b, "B")->required();
  ci_cmd->add_option("--given-in", ci.given_in, "C: conditioning on C subset of Y");
  ci_cmd->add_option("--given-out", ci.given_out, "C': conditioning on C' disjoint from Y");
  ci_cmd->add_flag("--oracle", ci.oracle, "append a brute-force confirmation");
  ci_cmd->add_flag("--assert-independent", ci.assert_independent,
                   "exit 3 when the verdict is dependent");

  auto* graph_cmd = app.add_subcommand("graph", "induced graph, DOT export, separation");
  add_kernel_options(graph_cmd, kernel);
  graph_cmd->add_option("--graph-of", graph.graph_of, "K or L (default: --kind)")
      ->check(CLI::IsMember({"K", "L"}));
  graph_cmd->add_option("--dot", graph.dot_path, "write the graph in DOT format");
  graph_cmd->add_option("--separates", graph.separates, "A B C")->expected(3);
  graph_cmd->add_option("--given-in", graph.given_in, "D: also condition on D subset of Y");

  auto* demo = app.add_subcommand("demo", "the mixed-event counterexample");
  demo->add_flag("--json", demo_json, "machine-readable output");

  auto* sample_cmd = app.add_subcommand("sample", "draw subsets from the exact distribution");
  add_kernel_options(sample_cmd, kernel);
  sample_cmd->add_option("--seed", seed, "random seed");
  sample_cmd->add_option("--count", count, "number of draws");

  try {
    kernel.tol_zero = default_zero_tolerance();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (validate->parsed()) return cmd_validate(kernel, out);
    if (prob_cmd->parsed()) {
      prob.exact_given = exact_opt->count() > 0;
      return cmd_prob(kernel, prob, out);
    }
    if (ci_cmd->parsed()) return cmd_ci(kernel, ci, out);
    if (graph_cmd->parsed()) return cmd_graph(kernel, graph, out);
    if (demo->parsed()) return cmd_demo(demo_json, out);
    if (sample_cmd->parsed()) return cmd_sample(kernel, seed, count, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace dppci::cli
