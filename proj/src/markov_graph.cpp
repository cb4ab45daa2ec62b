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

#include "dppci/markov_graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace dppci {

InducedGraph::InducedGraph(int n, std::vector<Edge> edges, double tolerance_used)
    : n_(n), adjacency_(static_cast<std::size_t>(n)), tolerance_used_(tolerance_used) {
  for (auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw Error(ErrorKind::IndexOutOfRange, "edge endpoint out of range");
    }
    if (i == j) throw Error(ErrorKind::InvalidQuery, "self-loops are not allowed");
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
  for (const auto& [i, j] : edges_) {
    adjacency_[static_cast<std::size_t>(i)].push_back(j);
    adjacency_[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

bool InducedGraph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

std::string InducedGraph::to_dot(std::string_view name) const {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (int v = 0; v < n_; ++v) os << "  " << v + 1 << ";\n";
  for (const auto& [i, j] : edges_) os << "  " << i + 1 << " -- " << j + 1 << ";\n";
  os << "}\n";
  return os.str();
}

IndexSet reachable(const InducedGraph& g, const IndexSet& from, const IndexSet& removed) {
  from.check_within(g.n());
  removed.check_within(g.n());
  std::vector<char> seen(static_cast<std::size_t>(g.n()), 0);
  for (int v : removed) seen[static_cast<std::size_t>(v)] = 1;
  std::deque<int> queue;
  std::vector<int> out;
  for (int v : from) {
    if (!seen[static_cast<std::size_t>(v)]) {
      seen[static_cast<std::size_t>(v)] = 1;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    out.push_back(v);
    for (int w : g.neighbors(v)) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        queue.push_back(w);
      }
    }
  }
  return IndexSet::from_zero_based(std::move(out));
}

bool separates(const InducedGraph& g, const IndexSet& a, const IndexSet& b, const IndexSet& c) {
  require_pairwise_disjoint({&a, &b, &c});
  b.check_within(g.n());
  if (a.empty() || b.empty()) return true;
  return reachable(g, a, c).disjoint(b);
}

bool separates_all(const InducedGraph& g, const std::vector<IndexSet>& parts,
                   const IndexSet& c) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      if (!separates(g, parts[i], parts[j], c)) return false;
    }
  }
  return true;
}

std::string_view to_string(GraphVerdict v) {
  return v == GraphVerdict::CertifiedIndependent ? "certified-independent" : "not-certified";
}

}  // namespace dppci
