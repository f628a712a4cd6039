// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/graph.hpp"

#include "dyknet/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <set>

namespace dyknet {

namespace {

std::vector<bool> reachable_from_zero(std::size_t n, std::span<const Edge> edges, bool reverse) {
  std::vector<std::vector<NodeId>> adj(n);
  for (const Edge& e : edges) {
    if (reverse) {
      adj[e.to].push_back(e.from);
    } else {
      adj[e.from].push_back(e.to);
    }
  }
  std::vector<bool> seen(n, false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

std::optional<NodeId> find_strong_connectivity_violation(std::size_t node_count,
                                                         std::span<const Edge> edges) {
  if (node_count <= 1) return std::nullopt;
  const auto forward = reachable_from_zero(node_count, edges, false);
  const auto backward = reachable_from_zero(node_count, edges, true);
  for (NodeId v = 0; v < node_count; ++v) {
    if (!forward[v] || !backward[v]) return v;
  }
  return std::nullopt;
}

GraphTopology GraphTopology::build(std::size_t node_count, std::vector<Edge> edges) {
  if (node_count == 0) {
    throw Error(Errc::InvalidEndpoint, "graph must have at least one node");
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const Edge& e : edges) {
    if (e.from >= node_count || e.to >= node_count) {
      throw Error(Errc::InvalidEndpoint,
                  fmt::format("edge ({}, {}) references a node outside 1..{}", e.from + 1, e.to + 1,
                              node_count));
    }
    if (e.from == e.to) {
      throw Error(Errc::SelfLoop, fmt::format("self-loop on node {}", e.from + 1));
    }
    if (!seen.emplace(e.from, e.to).second) {
      throw Error(Errc::DuplicateEdge, fmt::format("duplicate edge ({}, {})", e.from + 1, e.to + 1));
    }
  }
  if (auto bad = find_strong_connectivity_violation(node_count, edges)) {
    throw Error(Errc::NotStronglyConnected,
                fmt::format("graph is not strongly connected: node {} and node 1 are not mutually "
                            "reachable",
                            *bad + 1));
  }

  GraphTopology g;
  g.node_count_ = node_count;
  g.edges_ = std::move(edges);

  std::vector<EdgeId> order(g.edges_.size());
  std::iota(order.begin(), order.end(), EdgeId{0});
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    const Edge& ea = g.edges_[a];
    const Edge& eb = g.edges_[b];
    return ea.from != eb.from ? ea.from < eb.from : ea.to < eb.to;
  });

  g.offsets_.assign(node_count + 1, 0);
  for (const Edge& e : g.edges_) ++g.offsets_[e.from + 1];
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.neighbors_.reserve(order.size());
  g.neighbor_edges_.reserve(order.size());
  for (EdgeId id : order) {
    g.neighbors_.push_back(g.edges_[id].to);
    g.neighbor_edges_.push_back(id);
  }
  return g;
}

const Edge& GraphTopology::edge(EdgeId e) const {
  if (e >= edges_.size()) throw Error(Errc::InvalidEdge, fmt::format("edge index {} out of range", e));
  return edges_[e];
}

std::span<const NodeId> GraphTopology::out_neighbors(NodeId i) const {
  if (i >= node_count_) throw Error(Errc::InvalidNode, fmt::format("node {} does not exist", i + 1));
  return std::span<const NodeId>(neighbors_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::span<const EdgeId> GraphTopology::out_edges(NodeId i) const {
  if (i >= node_count_) throw Error(Errc::InvalidNode, fmt::format("node {} does not exist", i + 1));
  return std::span<const EdgeId>(neighbor_edges_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::optional<EdgeId> GraphTopology::find_edge(NodeId from, NodeId to) const noexcept {
  if (from >= node_count_) return std::nullopt;
  const auto begin = neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[from]);
  const auto end = neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[from + 1]);
  const auto it = std::lower_bound(begin, end, to);
  if (it == end || *it != to) return std::nullopt;
  return neighbor_edges_[static_cast<std::size_t>(it - neighbors_.begin())];
}

EdgeId GraphTopology::edge_id(NodeId from, NodeId to) const {
  if (auto e = find_edge(from, to)) return *e;
  throw Error(Errc::InvalidEdge, fmt::format("edge ({}, {}) is not in the graph", from + 1, to + 1));
}

}  // namespace dyknet
