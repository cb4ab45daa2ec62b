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

#pragma once

#include "dppci/dpp.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dppci {

/// Undirected graph on {0, ..., n-1} with an edge wherever the source
/// matrix has an off-diagonal entry above `tolerance_used` in magnitude.
class InducedGraph {
 public:
  using Edge = std::pair<int, int>;

  /// Edges are normalized to (i < j), sorted and deduplicated.
  InducedGraph(int n, std::vector<Edge> edges, double tolerance_used);

  int n() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<int>& neighbors(int v) const {
    return adjacency_.at(static_cast<std::size_t>(v));
  }
  bool has_edge(int i, int j) const;
  double tolerance_used() const noexcept { return tolerance_used_; }

  /// Graphviz text with vertices labelled 1..n.
  std::string to_dot(std::string_view name = "G") const;

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  double tolerance_used_;
};

/// Edge {i, j} iff |M_ij| > relative_tol * max|M|, i != j.
template <typename Derived>
InducedGraph induced_graph(const Eigen::MatrixBase<Derived>& m,
                           double relative_tol = Tolerances{}.zero) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::NotSquare, "graph source must be square");
  const double threshold = relative_tol * static_cast<double>(max_abs(m));
  std::vector<InducedGraph::Edge> edges;
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double entry = std::max(std::abs(static_cast<double>(m(i, j))),
                                    std::abs(static_cast<double>(m(j, i))));
      if (entry > threshold) edges.emplace_back(i, j);
    }
  }
  return InducedGraph(n, std::move(edges), threshold);
}

template <typename Scalar>
InducedGraph induced_graph(const SymMatrix<Scalar>& m, double relative_tol = Tolerances{}.zero) {
  return induced_graph(m.matrix(), relative_tol);
}

/// Vertices reachable from `from` once `removed` is deleted from the graph.
IndexSet reachable(const InducedGraph& g, const IndexSet& from, const IndexSet& removed);

/// True iff every path from A to B meets C (breadth-first search in G
/// minus C). Vacuously true when A or B is empty.
bool separates(const InducedGraph& g, const IndexSet& a, const IndexSet& b, const IndexSet& c);

/// True iff C separates every pair of distinct parts.
bool separates_all(const InducedGraph& g, const std::vector<IndexSet>& parts, const IndexSet& c);

/// Separation in G_L is a sufficient condition only: NotCertified says
/// nothing about dependence.
enum class GraphVerdict { CertifiedIndependent, NotCertified };

std::string_view to_string(GraphVerdict v);

struct GraphCertificate {
  GraphVerdict verdict = GraphVerdict::NotCertified;
  double tolerance_used = 0.0;

  bool certified() const noexcept { return verdict == GraphVerdict::CertifiedIndependent; }
};

/// Certifies Y_{A_1}, ..., Y_{A_k} mutually independent given
/// (C disjoint from Y) and (D subset of Y) when C separates the parts in G_L.
template <typename Scalar>
GraphCertificate multiway_ci(const DppModel<Scalar>& model, const std::vector<IndexSet>& parts,
                             const IndexSet& c, const IndexSet& d) {
  if (parts.empty()) throw Error(ErrorKind::EmptyQuerySet, "no parts given");
  std::vector<IndexSet> all = parts;
  all.push_back(c);
  all.push_back(d);
  for (const auto& s : all) s.check_within(model.n());
  require_pairwise_disjoint(all);
  const InducedGraph g = induced_graph(model.ensemble().matrix(), model.tolerances().zero);
  GraphCertificate cert;
  cert.tolerance_used = g.tolerance_used();
  cert.verdict = separates_all(g, parts, c) ? GraphVerdict::CertifiedIndependent
                                            : GraphVerdict::NotCertified;
  return cert;
}

/// Y_A and Y_B given (C disjoint from Y) and (D subset of Y).
template <typename Scalar>
GraphCertificate ci_from_l_graph_with_d(const DppModel<Scalar>& model, const IndexSet& a,
                                        const IndexSet& b, const IndexSet& c,
                                        const IndexSet& d) {
  return multiway_ci(model, {a, b}, c, d);
}

/// Y_A and Y_B given (C disjoint from Y).
template <typename Scalar>
GraphCertificate ci_from_l_graph(const DppModel<Scalar>& model, const IndexSet& a,
                                 const IndexSet& b, const IndexSet& c) {
  return multiway_ci(model, {a, b}, c, IndexSet{});
}

struct SchurZeroReport {
  /// C separates A and B in the graph of M^{-1}; otherwise no claim is made.
  bool precondition_met = false;
  double residual = 0.0;  ///< max |M^C_AB|
  double tolerance = 0.0; ///< 1e-9 * max|M| * sqrt(cond(M_C))
  double condition_number = 1.0;
  bool passed = false;
};

/// For positive definite M, separation of A and B by C in G_{M^{-1}}
/// forces the block M^C_AB to vanish. Reports the observed residual.
template <typename Scalar>
SchurZeroReport separation_implies_schur_zero(const SymMatrix<Scalar>& m, const IndexSet& a,
                                              const IndexSet& b, const IndexSet& c,
                                              const Tolerances& tol = {}) {
  for (const IndexSet* s : {&a, &b, &c}) s->check_within(m.n());
  require_pairwise_disjoint({&a, &b, &c});
  const MatrixX<Scalar> inv = detail::spd_inverse(m.matrix(), "M");
  SchurZeroReport r;
  r.precondition_met = separates(induced_graph(inv, tol.zero), a, b, c);

  const IndexSet rest = c.complement(m.n());
  const SymMatrix<Scalar> schur = schur_complement(m, c, tol.spectrum);
  r.residual = static_cast<double>(
      max_abs(block(schur, detail::positions_in(rest, a), detail::positions_in(rest, b))));
  if (!c.empty()) {
    const VectorX<Scalar> ev = eigenvalues(submatrix(m, c));
    r.condition_number = static_cast<double>(ev.maxCoeff() / ev.minCoeff());
  }
  r.tolerance = 1e-9 * static_cast<double>(max_abs(m.matrix())) * std::sqrt(r.condition_number);
  r.passed = r.precondition_met && r.residual <= r.tolerance;
  return r;
}

}  // namespace dppci
