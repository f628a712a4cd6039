// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/protocol.hpp"

#include "dyknet/error.hpp"
#include "dyknet/kernels.hpp"

#include <fmt/format.h>

namespace dyknet {

template <Real R>
Problem<R> make_problem(std::size_t dimension, std::vector<ObjectiveSpec<R>> objectives,
                        std::vector<Vec<R>> xbar) {
  if (objectives.empty()) throw Error(Errc::DimensionMismatch, "problem needs at least one node");
  if (objectives.size() != xbar.size()) {
    throw Error(Errc::DimensionMismatch,
                fmt::format("{} objectives but {} anchor vectors", objectives.size(), xbar.size()));
  }
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    if (objectives[i].dimension() != dimension) {
      throw Error(Errc::DimensionMismatch, fmt::format("node {}: function has dimension {}, expected {}",
                                                       i + 1, objectives[i].dimension(), dimension));
    }
    if (xbar[i].size() != dimension) {
      throw Error(Errc::DimensionMismatch,
                  fmt::format("node {}: xbar has dimension {}, expected {}", i + 1, xbar[i].size(), dimension));
    }
  }
  Problem<R> p;
  p.dimension = dimension;
  p.mbar.assign(dimension, R(0));
  for (const auto& v : xbar) kernels::axpy(R(1), v, p.mbar);
  kernels::scale(p.mbar, R(R(1) / R(xbar.size())));
  p.objectives = std::move(objectives);
  p.xbar = std::move(xbar);
  return p;
}

template <Real R>
SimState<R>::SimState(std::shared_ptr<const GraphTopology> topology, std::shared_ptr<const Problem<R>> problem)
    : topology_(std::move(topology)), problem_(std::move(problem)) {
  if (topology_->node_count() != problem_->node_count()) {
    throw Error(Errc::DimensionMismatch, fmt::format("graph has {} nodes but problem has {}",
                                                     topology_->node_count(), problem_->node_count()));
  }
  const std::size_t m = problem_->dimension;
  nodes_.resize(topology_->node_count());
  for (auto& n : nodes_) {
    n.y.assign(m, R(0));
    n.sigma_y.assign(m, R(0));
    n.z.assign(m, R(0));
    n.x.assign(m, R(0));
  }
  edges_.resize(topology_->edge_count());
  for (auto& e : edges_) e.rho_y.assign(m, R(0));
}

template <Real R>
const NodeState<R>& SimState<R>::node(NodeId i) const {
  if (i >= nodes_.size()) throw Error(Errc::InvalidNode, fmt::format("node {} does not exist", i + 1));
  return nodes_[i];
}

template <Real R>
NodeState<R>& SimState<R>::node(NodeId i) {
  if (i >= nodes_.size()) throw Error(Errc::InvalidNode, fmt::format("node {} does not exist", i + 1));
  return nodes_[i];
}

template <Real R>
const EdgeChannelState<R>& SimState<R>::channel(EdgeId e) const {
  if (e >= edges_.size()) throw Error(Errc::InvalidEdge, fmt::format("edge index {} out of range", e));
  return edges_[e];
}

template <Real R>
EdgeChannelState<R>& SimState<R>::channel(EdgeId e) {
  if (e >= edges_.size()) throw Error(Errc::InvalidEdge, fmt::format("edge index {} out of range", e));
  return edges_[e];
}

template <Real R>
R SimState<R>::edge_weight(EdgeId e) const {
  const auto& ch = channel(e);
  return nodes_[topology_->edge(e).from].sigma_s - ch.rho_s;
}

template <Real R>
Vec<R> SimState<R>::edge_mass(EdgeId e) const {
  const auto& ch = channel(e);
  return kernels::lincomb(R(1), nodes_[topology_->edge(e).from].sigma_y, R(-1), ch.rho_y);
}

template <Real R>
SimState<R> initialize(std::shared_ptr<const GraphTopology> topology, std::shared_ptr<const Problem<R>> problem) {
  SimState<R> state(std::move(topology), std::move(problem));
  const Problem<R>& p = state.problem();
  for (NodeId i = 0; i < state.node_count(); ++i) {
    NodeState<R>& n = state.node(i);
    n.y = p.xbar[i];
    n.s = 1;
    const ObjectiveSpec<R>& f = p.objectives[i];
    if (f.treatment == Treatment::Subdifferentiable) {
      AffineFunction<R> t = tangent(f, p.xbar[i]);
      n.z = t.gradient;
      kernels::axpy(R(-1), n.z, n.y);
      n.minorant = std::move(t);
    } else if (const auto* a = std::get_if<AffineFunction<R>>(&f.function)) {
      // The conjugate of an affine function is finite only at its gradient.
      n.z = a->gradient;
      kernels::axpy(R(-1), n.z, n.y);
    }
    n.x = n.y;
    kernels::scale(n.x, R(1 / n.s));
  }
  return state;
}

template <Real R>
void broadcast(SimState<R>& state, NodeId i) {
  NodeState<R>& n = state.node(i);
  const R share = R(1) / R(state.topology().out_degree(i) + 1);
  kernels::scale(n.y, share);
  n.s *= share;
  kernels::axpy(R(1), n.y, n.sigma_y);
  n.sigma_s += n.s;
  n.x = n.y;
  kernels::scale(n.x, R(1 / n.s));
  state.count_event();
}

template <Real R>
void deliver(SimState<R>& state, EdgeId e) {
  const Edge& edge = state.topology().edge(e);
  const NodeState<R>& tail = state.node(edge.from);
  NodeState<R>& head = state.node(edge.to);
  EdgeChannelState<R>& ch = state.channel(e);

  const Vec<R> in_flight = kernels::lincomb(R(1), tail.sigma_y, R(-1), ch.rho_y);
  kernels::axpy(R(1), in_flight, head.y);
  head.s += tail.sigma_s - ch.rho_s;
  ch.rho_y = tail.sigma_y;
  ch.rho_s = tail.sigma_s;
  head.x = head.y;
  kernels::scale(head.x, R(1 / head.s));
  state.count_event();
}

template <Real R>
void deliver(SimState<R>& state, NodeId from, NodeId to) {
  deliver(state, state.topology().edge_id(from, to));
}

template <Real R>
void local_min(SimState<R>& state, NodeId j) {
  NodeState<R>& n = state.node(j);
  if (!(n.s >= R(kMinNodeWeight))) {
    throw Error(Errc::NumericalInstability,
                fmt::format("node {} weight {} fell below {} before a local minimization", j + 1,
                            to_double(n.s), kMinNodeWeight));
  }
  const ObjectiveSpec<R>& f = state.problem().objectives[j];

  // Proximal center (y_j + z_j) / s_j.
  Vec<R> center = kernels::lincomb(R(1 / n.s), n.y, R(1 / n.s), n.z);

  if (f.treatment == Treatment::Proximable) {
    ProxResult<R> r = prox(f, n.s, center);
    n.x = std::move(r.x);
    n.z = std::move(r.z);
  } else {
    // Tangent at the current estimate, which is exactly the prox point of the
    // current minorant at this center because its gradient is z_j.
    const AffineFunction<R> cut = tangent(f, n.x);
    BundleResult<R> r = bundle_prox(*n.minorant, cut, n.s, center);
    n.x = std::move(r.x);
    n.z = std::move(r.z);
    n.minorant = std::move(r.model);
  }
  n.y = n.x;
  kernels::scale(n.y, n.s);
  state.count_event();
}

template <Real R>
Vec<R> primal_estimate_node(const SimState<R>& state, NodeId i) {
  const NodeState<R>& n = state.node(i);
  Vec<R> x = n.y;
  kernels::scale(x, R(1 / n.s));
  return x;
}

template <Real R>
Vec<R> primal_estimate_edge(const SimState<R>& state, EdgeId e) {
  const R w = state.edge_weight(e);
  if (!(w > 0)) return primal_estimate_node(state, state.topology().edge(e).from);
  Vec<R> x = state.edge_mass(e);
  kernels::scale(x, R(1 / w));
  return x;
}

#define DYKNET_PROTOCOL_INSTANTIATE(R)                                                              \
  template Problem<R> make_problem<R>(std::size_t, std::vector<ObjectiveSpec<R>>, std::vector<Vec<R>>); \
  template class SimState<R>;                                                                       \
  template SimState<R> initialize<R>(std::shared_ptr<const GraphTopology>,                         \
                                     std::shared_ptr<const Problem<R>>);                            \
  template void broadcast<R>(SimState<R>&, NodeId);                                                 \
  template void deliver<R>(SimState<R>&, EdgeId);                                                   \
  template void deliver<R>(SimState<R>&, NodeId, NodeId);                                          \
  template void local_min<R>(SimState<R>&, NodeId);                                                \
  template Vec<R> primal_estimate_node<R>(const SimState<R>&, NodeId);                             \
  template Vec<R> primal_estimate_edge<R>(const SimState<R>&, EdgeId);

DYKNET_PROTOCOL_INSTANTIATE(double)
DYKNET_PROTOCOL_INSTANTIATE(extended)

}  // namespace dyknet
