// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dyknet {

/// Internal node index, 0-based. Configuration files and trace files use
/// 1-based ids; conversion happens at the parsing boundary.
using NodeId = std::size_t;
using EdgeId = std::size_t;

struct Edge {
  NodeId from = 0;
  NodeId to = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed communication graph. Immutable after construction, so it can be
/// shared read-only between simulations running on different threads.
///
/// Invariants: no self-loops, no duplicate edges, all endpoints valid, and
/// the graph is strongly connected.
class GraphTopology {
 public:
  /// Validates and builds the topology. Throws dyknet::Error with one of
  /// SelfLoop, DuplicateEdge, InvalidEndpoint or NotStronglyConnected.
  static GraphTopology build(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Edges in the order they were supplied.
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const;

  /// Out-neighbors of i in ascending id order. Throws InvalidNode.
  std::span<const NodeId> out_neighbors(NodeId i) const;

  /// Ids of the out-edges of i, ordered like out_neighbors(i).
  std::span<const EdgeId> out_edges(NodeId i) const;

  std::size_t out_degree(NodeId i) const { return out_neighbors(i).size(); }

  /// Edge id of (from, to), if present.
  std::optional<EdgeId> find_edge(NodeId from, NodeId to) const noexcept;

  /// Like find_edge but throws InvalidEdge.
  EdgeId edge_id(NodeId from, NodeId to) const;

 private:
  GraphTopology() = default;

  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  // CSR-style adjacency: neighbors of node i live in [offsets_[i], offsets_[i+1]).
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<EdgeId> neighbor_edges_;
};

/// Forward and reverse reachability from node 0. Returns the first node that
/// is either unreachable from node 0 or cannot reach it, or nullopt when the
/// graph is strongly connected. Endpoints must already be valid.
std::optional<NodeId> find_strong_connectivity_violation(std::size_t node_count,
                                                         std::span<const Edge> edges);

}  // namespace dyknet
