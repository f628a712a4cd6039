// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/metrics.hpp"

#include "dyknet/error.hpp"
#include "dyknet/kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>

#include <algorithm>
#include <numeric>

namespace dyknet {

namespace {

template <Real R>
R node_quadratic_term(const NodeState<R>& n) {
  return kernels::squared_norm(n.y) / (2 * n.s);
}

template <Real R>
R node_conjugate_term(const ObjectiveSpec<R>& f, const NodeState<R>& n) {
  if (f.treatment == Treatment::Subdifferentiable) return conjugate_value(*n.minorant, n.z);
  return conjugate_value(f, n.z);
}

template <Real R>
R edge_quadratic_term(const SimState<R>& state, EdgeId e) {
  const R w = state.edge_weight(e);
  if (!(w > 0)) return R(0);
  return kernels::squared_norm(state.edge_mass(e)) / (2 * w);
}

template <Real R>
R total_weight(const SimState<R>& state) {
  R total = 0;
  for (NodeId i = 0; i < state.node_count(); ++i) total += state.node(i).s;
  for (EdgeId e = 0; e < state.edge_count(); ++e) total += state.edge_weight(e);
  return total;
}

template <Real R>
R gap_from_dual(const SimState<R>& state, const ReferenceSolution<R>& ref, const R& dual_value) {
  const Problem<R>& p = state.problem();
  const R n = R(state.node_count());
  return total_weight(state) / 2 * kernels::squared_distance(ref.x_star, p.mbar) + ref.objective_sum -
         n / 2 * kernels::squared_norm(p.mbar) + dual_value;
}

}  // namespace

template <Real R>
ReferenceSolution<R> solve_centralized(const Problem<R>& problem) {
  using Matrix = Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<R, Eigen::Dynamic, 1>;
  const auto m = static_cast<Eigen::Index>(problem.dimension);
  const R n = R(problem.node_count());

  Matrix system = Matrix::Identity(m, m) * n;
  Vector rhs = Vector::Zero(m);
  for (std::size_t i = 0; i < problem.node_count(); ++i) {
    for (Eigen::Index k = 0; k < m; ++k) rhs(k) += problem.xbar[i][static_cast<std::size_t>(k)];
    std::visit(detail::overloaded{
                   [](const ZeroFunction&) {},
                   [&](const AffineFunction<R>& a) {
                     for (Eigen::Index k = 0; k < m; ++k) rhs(k) -= a.gradient[static_cast<std::size_t>(k)];
                   },
                   [&](const QuadraticFunction<R>& q) {
                     const auto v = Eigen::Map<const Vector>(q.direction.data(), m);
                     system.noalias() += v * v.transpose();
                     system.diagonal().array() += q.ridge;
                     for (Eigen::Index k = 0; k < m; ++k) rhs(k) -= q.linear[static_cast<std::size_t>(k)];
                   },
               },
               problem.objectives[i].function);
  }

  const Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::SingularSystem, "centralized system is not positive definite");
  }
  const Vector solution = llt.solve(rhs);

  ReferenceSolution<R> ref;
  ref.x_star.assign(solution.data(), solution.data() + m);
  Vec<R> residual(problem.dimension, R(0));
  for (std::size_t i = 0; i < problem.node_count(); ++i) {
    const auto& f = problem.objectives[i];
    ref.objective_sum += eval(f, ref.x_star);
    ref.primal_value += kernels::squared_distance(ref.x_star, problem.xbar[i]) / 2;
    kernels::axpy(R(1), subgradient(f, ref.x_star), residual);
    kernels::axpy(R(1), ref.x_star, residual);
    kernels::axpy(R(-1), problem.xbar[i], residual);
  }
  ref.primal_value += ref.objective_sum;
  ref.optimality_residual = sqrt_of(kernels::squared_norm(residual));
  return ref;
}

template <Real R>
R dual_surrogate(const SimState<R>& state) {
  const Problem<R>& p = state.problem();
  R total = 0;
  for (NodeId i = 0; i < state.node_count(); ++i) {
    const NodeState<R>& n = state.node(i);
    total += node_conjugate_term(p.objectives[i], n) + node_quadratic_term(n);
  }
  for (EdgeId e = 0; e < state.edge_count(); ++e) total += edge_quadratic_term(state, e);
  return total;
}

template <Real R>
R duality_gap(const SimState<R>& state, const ReferenceSolution<R>& ref) {
  return gap_from_dual(state, ref, dual_surrogate(state));
}

template <Real R>
R s_weighted_error(const SimState<R>& state, const ReferenceSolution<R>& ref) {
  R total = 0;
  for (NodeId i = 0; i < state.node_count(); ++i) {
    const NodeState<R>& n = state.node(i);
    total += n.s / 2 * kernels::squared_distance(ref.x_star, primal_estimate_node(state, i));
  }
  for (EdgeId e = 0; e < state.edge_count(); ++e) {
    const R w = state.edge_weight(e);
    if (w > 0) total += w / 2 * kernels::squared_distance(ref.x_star, primal_estimate_edge(state, e));
  }
  return total;
}

template <Real R>
R consensus_residual(const SimState<R>& state) {
  std::vector<Vec<R>> estimates;
  estimates.reserve(state.node_count());
  for (NodeId i = 0; i < state.node_count(); ++i) estimates.push_back(primal_estimate_node(state, i));
  R worst = 0;
  for (std::size_t a = 0; a < estimates.size(); ++a) {
    for (std::size_t b = a + 1; b < estimates.size(); ++b) {
      worst = std::max(worst, kernels::squared_distance(estimates[a], estimates[b]));
    }
  }
  return sqrt_of(worst);
}

template <Real R>
R weight_residual(const SimState<R>& state) {
  return abs_of(R(total_weight(state) - R(state.node_count())));
}

template <Real R>
R mass_residual(const SimState<R>& state) {
  Vec<R> total = state.problem().mbar;
  kernels::scale(total, R(-R(state.node_count())));
  for (NodeId i = 0; i < state.node_count(); ++i) {
    kernels::axpy(R(1), state.node(i).y, total);
    kernels::axpy(R(1), state.node(i).z, total);
  }
  for (EdgeId e = 0; e < state.edge_count(); ++e) kernels::axpy(R(1), state.edge_mass(e), total);
  return sqrt_of(kernels::squared_norm(total));
}

template <Real R>
DualSurrogateTracker<R>::DualSurrogateTracker(const SimState<R>& state) {
  refresh_all(state);
}

template <Real R>
void DualSurrogateTracker<R>::refresh_all(const SimState<R>& state) {
  conjugate_terms_.assign(state.node_count(), R(0));
  node_terms_.assign(state.node_count(), R(0));
  edge_terms_.assign(state.edge_count(), R(0));
  for (NodeId i = 0; i < state.node_count(); ++i) {
    refresh_node_conjugate(state, i);
    refresh_node_quadratic(state, i);
  }
  for (EdgeId e = 0; e < state.edge_count(); ++e) refresh_edge(state, e);
}

template <Real R>
void DualSurrogateTracker<R>::refresh(const SimState<R>& state, const ScheduleEvent& applied) {
  std::visit(detail::overloaded{
                 [&](const Broadcast& b) {
                   refresh_node_quadratic(state, b.node);
                   for (EdgeId e : state.topology().out_edges(b.node)) refresh_edge(state, e);
                 },
                 [&](const Deliver& d) {
                   refresh_node_quadratic(state, d.to);
                   refresh_edge(state, state.topology().edge_id(d.from, d.to));
                 },
                 [&](const LocalMin& c) {
                   refresh_node_conjugate(state, c.node);
                   refresh_node_quadratic(state, c.node);
                 },
             },
             applied);
}

template <Real R>
R DualSurrogateTracker<R>::value() const {
  R total = 0;
  for (std::size_t i = 0; i < node_terms_.size(); ++i) total += conjugate_terms_[i] + node_terms_[i];
  for (const R& t : edge_terms_) total += t;
  return total;
}

template <Real R>
void DualSurrogateTracker<R>::refresh_node_conjugate(const SimState<R>& state, NodeId i) {
  conjugate_terms_[i] = node_conjugate_term(state.problem().objectives[i], state.node(i));
}

template <Real R>
void DualSurrogateTracker<R>::refresh_node_quadratic(const SimState<R>& state, NodeId i) {
  node_terms_[i] = node_quadratic_term(state.node(i));
}

template <Real R>
void DualSurrogateTracker<R>::refresh_edge(const SimState<R>& state, EdgeId e) {
  edge_terms_[e] = edge_quadratic_term(state, e);
}

template <Real R>
MetricsRecord make_record(const SimState<R>& state, const ReferenceSolution<R>& ref, std::size_t round,
                          std::optional<ScheduleEvent> event, const R& dual_value) {
  MetricsRecord rec;
  rec.round = round;
  rec.event_count = state.event_count();
  rec.event = std::move(event);
  rec.dual_surrogate = to_double(dual_value);
  rec.duality_gap = to_double(gap_from_dual(state, ref, dual_value));
  rec.s_weighted_error = to_double(s_weighted_error(state, ref));
  rec.consensus_residual = to_double(consensus_residual(state));
  rec.weight_residual = to_double(weight_residual(state));
  rec.mass_residual = to_double(mass_residual(state));
  return rec;
}

#define DYKNET_METRICS_INSTANTIATE(R)                                                           \
  template ReferenceSolution<R> solve_centralized<R>(const Problem<R>&);                       \
  template R dual_surrogate<R>(const SimState<R>&);                                            \
  template R duality_gap<R>(const SimState<R>&, const ReferenceSolution<R>&);                  \
  template R s_weighted_error<R>(const SimState<R>&, const ReferenceSolution<R>&);             \
  template R consensus_residual<R>(const SimState<R>&);                                        \
  template R weight_residual<R>(const SimState<R>&);                                           \
  template R mass_residual<R>(const SimState<R>&);                                             \
  template class DualSurrogateTracker<R>;                                                      \
  template MetricsRecord make_record<R>(const SimState<R>&, const ReferenceSolution<R>&, std::size_t, \
                                        std::optional<ScheduleEvent>, const R&);

DYKNET_METRICS_INSTANTIATE(double)
DYKNET_METRICS_INSTANTIATE(extended)

}  // namespace dyknet
