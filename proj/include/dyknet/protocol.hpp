// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

// Node and edge state of the directed dual block-minimization protocol and
// its three operations:
//
//   broadcast (A):   node i splits its mass y_i and weight s_i into
//                    deg_out(i) + 1 equal parts, keeps one, and adds one to
//                    its running sums sigma_i which all out-edges share.
//   deliver (B):     node j absorbs sigma_i - rho_ij from edge (i, j), the
//                    data i sent that j has not seen yet, then sets rho_ij.
//   local_min (C):   node j minimizes the dual over its own block z_j,
//                    through an exact prox step or, for subdifferentiable
//                    nodes, a bundle step on an affine minorant.
//
// Only one m-vector z per node is stored; edge and hyperplane duals are never
// materialized. Undelivered data sits in sigma - rho and is never lost.

#pragma once

#include "dyknet/functions.hpp"
#include "dyknet/graph.hpp"
#include "dyknet/real.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace dyknet {

/// The problem min_x sum_i [ f_i(x) + 1/2 |x - xbar_i|^2 ] on a graph.
template <Real R>
struct Problem {
  std::size_t dimension = 0;
  std::vector<ObjectiveSpec<R>> objectives;
  std::vector<Vec<R>> xbar;
  Vec<R> mbar;  // mean of xbar

  std::size_t node_count() const noexcept { return objectives.size(); }
};

/// Validates dimensions and computes mbar. Throws DimensionMismatch.
template <Real R>
Problem<R> make_problem(std::size_t dimension, std::vector<ObjectiveSpec<R>> objectives,
                        std::vector<Vec<R>> xbar);

template <Real R>
struct NodeState {
  Vec<R> y;        // mass
  R s = 1;         // weight, always > 0
  Vec<R> sigma_y;  // running broadcast sum of mass
  R sigma_s = 0;   // running broadcast sum of weight
  Vec<R> z;        // the node's own dual block
  Vec<R> x;        // tracked primal estimate y / s
  std::optional<AffineFunction<R>> minorant;  // present iff subdifferentiable
};

template <Real R>
struct EdgeChannelState {
  Vec<R> rho_y;  // last sigma_y received by the edge head
  R rho_s = 0;
};

/// Weight below which local_min refuses to divide.
inline constexpr double kMinNodeWeight = 1e-12;

/// Full protocol state. Single owner, mutated one event at a time; copies
/// are independent snapshots (topology and problem are shared immutable).
template <Real R>
class SimState {
 public:
  SimState(std::shared_ptr<const GraphTopology> topology, std::shared_ptr<const Problem<R>> problem);

  const GraphTopology& topology() const noexcept { return *topology_; }
  const Problem<R>& problem() const noexcept { return *problem_; }
  std::shared_ptr<const GraphTopology> topology_ptr() const noexcept { return topology_; }
  std::shared_ptr<const Problem<R>> problem_ptr() const noexcept { return problem_; }

  std::size_t dimension() const noexcept { return problem_->dimension; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const NodeState<R>& node(NodeId i) const;
  NodeState<R>& node(NodeId i);
  const EdgeChannelState<R>& channel(EdgeId e) const;
  EdgeChannelState<R>& channel(EdgeId e);

  /// Weight in flight on edge e: sigma_s(from) - rho_s(e).
  R edge_weight(EdgeId e) const;
  /// Mass in flight on edge e: sigma_y(from) - rho_y(e).
  Vec<R> edge_mass(EdgeId e) const;

  /// Number of operations applied so far.
  std::size_t event_count() const noexcept { return event_count_; }
  void count_event() noexcept { ++event_count_; }

 private:
  std::shared_ptr<const GraphTopology> topology_;
  std::shared_ptr<const Problem<R>> problem_;
  std::vector<NodeState<R>> nodes_;
  std::vector<EdgeChannelState<R>> edges_;
  std::size_t event_count_ = 0;
};

/// Initial state: y_i = xbar_i, s_i = 1, counters zero. Proximable nodes start
/// with z_i = 0 and x_i = xbar_i. Subdifferentiable nodes start from the
/// tangent of f_i at xbar_i as minorant, z_i = its gradient, y_i = xbar_i - z_i
/// and x_i = y_i / s_i.
template <Real R>
SimState<R> initialize(std::shared_ptr<const GraphTopology> topology,
                       std::shared_ptr<const Problem<R>> problem);

/// Operation A. Throws InvalidNode.
template <Real R>
void broadcast(SimState<R>& state, NodeId i);

/// Operation B on edge id e. Repeating it without an intervening broadcast
/// by the tail node is a no-op. Throws InvalidEdge.
template <Real R>
void deliver(SimState<R>& state, EdgeId e);

/// Operation B on (from, to). Throws InvalidEdge.
template <Real R>
void deliver(SimState<R>& state, NodeId from, NodeId to);

/// Operation C. Throws InvalidNode, or NumericalInstability when
/// s_j < kMinNodeWeight. Leaves y_j = s_j x_j.
template <Real R>
void local_min(SimState<R>& state, NodeId j);

/// x_i = y_i / s_i.
template <Real R>
Vec<R> primal_estimate_node(const SimState<R>& state, NodeId i);

/// In-flight mass over in-flight weight, or x_from when the edge carries no
/// weight (zero-weight edges take the tail node's estimate).
template <Real R>
Vec<R> primal_estimate_edge(const SimState<R>& state, EdgeId e);

// Explicit instantiations live in src/.
#define DYKNET_PROTOCOL_EXTERN(R)                                                                   \
  extern template Problem<R> make_problem<R>(std::size_t, std::vector<ObjectiveSpec<R>>,           \
                                             std::vector<Vec<R>>);                                  \
  extern template class SimState<R>;                                                                \
  extern template SimState<R> initialize<R>(std::shared_ptr<const GraphTopology>,                  \
                                            std::shared_ptr<const Problem<R>>);                     \
  extern template void broadcast<R>(SimState<R>&, NodeId);                                          \
  extern template void deliver<R>(SimState<R>&, EdgeId);                                            \
  extern template void deliver<R>(SimState<R>&, NodeId, NodeId);                                   \
  extern template void local_min<R>(SimState<R>&, NodeId);                                         \
  extern template Vec<R> primal_estimate_node<R>(const SimState<R>&, NodeId);                      \
  extern template Vec<R> primal_estimate_edge<R>(const SimState<R>&, EdgeId);

DYKNET_PROTOCOL_EXTERN(double)
DYKNET_PROTOCOL_EXTERN(extended)

}  // namespace dyknet
