// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

// Convergence measures for a protocol state:
//
//   dual surrogate   sum_{proximable} f_i*(z_i) + sum_{subdiff} [f_i^k]*(z_i)
//                    + sum_{alpha in V u E, s_alpha > 0} (s_alpha/2)|x_alpha|^2
//   duality gap      sum_alpha (s_alpha/2)|x* - mbar|^2 + sum_i f_i(x*)
//                    - (|V|/2)|mbar|^2 + dual surrogate
//   s-weighted error sum_alpha (s_alpha/2)|x* - x_alpha|^2
//
// The gap upper-bounds the s-weighted error for every state that conserves
// mass, since their difference is a sum of Fenchel-Young residuals
// f_i(x*) + f_i*(z_i) - <x*, z_i> >= 0. Subdifferentiable nodes use the
// conjugate of their affine model, so the reported gap bounds the true one.

#pragma once

#include "dyknet/event.hpp"
#include "dyknet/protocol.hpp"
#include "dyknet/real.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace dyknet {

template <Real R>
struct ReferenceSolution {
  Vec<R> x_star;
  /// sum_i f_i(x*) + 1/2 |x* - xbar_i|^2, constant offset included.
  R primal_value = 0;
  /// sum_i f_i(x*), cached for the gap.
  R objective_sum = 0;
  /// |sum_i grad f_i(x*) + sum_i (x* - xbar_i)|.
  R optimality_residual = 0;
};

/// Solves (sum_i A_i + |V| I) x = sum_i xbar_i - sum_i b_i by a dense
/// Cholesky factorization (affine pieces contribute only to the right-hand
/// side, zero functions not at all). Throws SingularSystem if the
/// factorization fails.
template <Real R>
ReferenceSolution<R> solve_centralized(const Problem<R>& problem);

template <Real R>
R dual_surrogate(const SimState<R>& state);

template <Real R>
R duality_gap(const SimState<R>& state, const ReferenceSolution<R>& ref);

template <Real R>
R s_weighted_error(const SimState<R>& state, const ReferenceSolution<R>& ref);

/// max_{i,j} |x_i - x_j| over node estimates.
template <Real R>
R consensus_residual(const SimState<R>& state);

/// |sum_i s_i + sum_e s_e - |V||.
template <Real R>
R weight_residual(const SimState<R>& state);

/// |sum_i y_i + sum_e y_e + sum_i z_i - |V| mbar|.
template <Real R>
R mass_residual(const SimState<R>& state);

/// Keeps the per-node and per-edge terms of the dual surrogate and refreshes
/// only those an event touches: a broadcast changes the node and its
/// out-edges, a delivery the edge and its head, a local minimization the node.
template <Real R>
class DualSurrogateTracker {
 public:
  explicit DualSurrogateTracker(const SimState<R>& state);

  void refresh(const SimState<R>& state, const ScheduleEvent& applied);
  void refresh_all(const SimState<R>& state);
  R value() const;

 private:
  void refresh_node_conjugate(const SimState<R>& state, NodeId i);
  void refresh_node_quadratic(const SimState<R>& state, NodeId i);
  void refresh_edge(const SimState<R>& state, EdgeId e);

  std::vector<R> conjugate_terms_;
  std::vector<R> node_terms_;
  std::vector<R> edge_terms_;
};

/// One logged row. Values are rounded to double for output regardless of
/// the precision the simulation runs in.
struct MetricsRecord {
  std::size_t round = 0;
  std::size_t event_count = 0;
  std::optional<ScheduleEvent> event;  // set for per-event records
  double dual_surrogate = 0;
  double duality_gap = 0;
  double s_weighted_error = 0;
  double consensus_residual = 0;
  double weight_residual = 0;
  double mass_residual = 0;
};

template <Real R>
MetricsRecord make_record(const SimState<R>& state, const ReferenceSolution<R>& ref, std::size_t round,
                          std::optional<ScheduleEvent> event, const R& dual_value);

#define DYKNET_METRICS_EXTERN(R)                                                                   \
  extern template ReferenceSolution<R> solve_centralized<R>(const Problem<R>&);                   \
  extern template R dual_surrogate<R>(const SimState<R>&);                                        \
  extern template R duality_gap<R>(const SimState<R>&, const ReferenceSolution<R>&);              \
  extern template R s_weighted_error<R>(const SimState<R>&, const ReferenceSolution<R>&);         \
  extern template R consensus_residual<R>(const SimState<R>&);                                    \
  extern template R weight_residual<R>(const SimState<R>&);                                       \
  extern template R mass_residual<R>(const SimState<R>&);                                         \
  extern template class DualSurrogateTracker<R>;                                                  \
  extern template MetricsRecord make_record<R>(const SimState<R>&, const ReferenceSolution<R>&,   \
                                               std::size_t, std::optional<ScheduleEvent>, const R&);

DYKNET_METRICS_EXTERN(double)
DYKNET_METRICS_EXTERN(extended)

}  // namespace dyknet
