// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/scheduler.hpp"

#include "dyknet/error.hpp"
#include "dyknet/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace dyknet {

namespace {

void require_probability(double p, std::string_view what) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(Errc::ValidationError, fmt::format("{} must lie in (0, 1], got {}", what, p));
  }
}

}  // namespace

std::string_view to_string(Cadence c) noexcept { return c == Cadence::PerRound ? "round" : "event"; }

void validate_policy(const SchedulePolicy& policy, const GraphTopology& g) {
  std::visit(detail::overloaded{
                 [](const RoundRobin& rr) { require_probability(rr.p_deliver, "p_deliver"); },
                 [&](const RandomEvent& re) {
                   require_probability(re.p_deliver, "p_deliver");
                   const double w[] = {re.weight_broadcast, re.weight_deliver, re.weight_local_min};
                   for (double v : w) {
                     if (!(v >= 0.0) || !std::isfinite(v)) {
                       throw Error(Errc::ValidationError, "event weights must be finite and nonnegative");
                     }
                   }
                   if (w[0] + w[1] + w[2] <= 0.0) {
                     throw Error(Errc::ValidationError, "at least one event weight must be positive");
                   }
                   if (g.edge_count() == 0 && re.weight_deliver > 0.0 && w[0] + w[2] <= 0.0) {
                     throw Error(Errc::ValidationError, "deliveries requested on a graph without edges");
                   }
                 },
                 [&](const TraceReplay& tr) {
                   for (const auto& e : tr.events) validate_event(e, g);
                 },
             },
             policy.variant);
}

Scheduler::Scheduler(SchedulePolicy policy, std::shared_ptr<const GraphTopology> topology)
    : policy_(std::move(policy)), topology_(std::move(topology)), rng_(policy_.seed) {
  validate_policy(policy_, *topology_);
}

std::vector<ScheduleEvent> Scheduler::next_round() {
  auto events = std::visit(detail::overloaded{
                               [&](const RoundRobin& rr) { return round_robin(rr); },
                               [&](const RandomEvent& re) { return random_event(re); },
                               [&](const TraceReplay& tr) { return trace_replay(tr); },
                           },
                           policy_.variant);
  ++round_;
  return events;
}

std::vector<ScheduleEvent> Scheduler::round_robin(const RoundRobin& rr) {
  const GraphTopology& g = *topology_;
  std::vector<ScheduleEvent> out;
  out.reserve(2 * g.node_count() + g.edge_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    out.emplace_back(Broadcast{i});
    const auto nbrs = g.out_neighbors(i);
    const auto ids = g.out_edges(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (stream_uniform01(policy_.seed, ids[k], round_) < rr.p_deliver) out.emplace_back(Deliver{i, nbrs[k]});
    }
  }
  if (rr.local_min_each_round) {
    for (NodeId j = 0; j < g.node_count(); ++j) out.emplace_back(LocalMin{j});
  }
  return out;
}

std::vector<ScheduleEvent> Scheduler::random_event(const RandomEvent& re) {
  const GraphTopology& g = *topology_;
  const double w_deliver = g.edge_count() == 0 ? 0.0 : re.weight_deliver;
  const double total = re.weight_broadcast + w_deliver + re.weight_local_min;
  const double pick = uniform_open01(rng_) * total;
  const auto uniform_index = [&](std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform_open01(rng_) * static_cast<double>(n)));
  };
  if (pick < re.weight_broadcast) return {Broadcast{uniform_index(g.node_count())}};
  if (pick < re.weight_broadcast + w_deliver) {
    const Edge& e = g.edge(uniform_index(g.edge_count()));
    if (uniform_open01(rng_) < re.p_deliver) return {Deliver{e.from, e.to}};
    return {};
  }
  return {LocalMin{uniform_index(g.node_count())}};
}

std::vector<ScheduleEvent> Scheduler::trace_replay(const TraceReplay& tr) {
  if (trace_pos_ >= tr.events.size()) {
    throw Error(Errc::TraceExhausted,
                fmt::format("trace exhausted after {} events ({} rounds)", tr.events.size(), round_));
  }
  std::vector<ScheduleEvent> out;
  bool seen_local_min = false;
  while (trace_pos_ < tr.events.size()) {
    const ScheduleEvent& e = tr.events[trace_pos_];
    const bool is_local_min = std::holds_alternative<LocalMin>(e);
    if (seen_local_min && !is_local_min) break;
    seen_local_min = seen_local_min || is_local_min;
    out.push_back(e);
    ++trace_pos_;
  }
  return out;
}

template <Real R>
void apply_event(SimState<R>& state, const ScheduleEvent& event) {
  std::visit(detail::overloaded{
                 [&](const Broadcast& b) { broadcast(state, b.node); },
                 [&](const Deliver& d) { deliver(state, d.from, d.to); },
                 [&](const LocalMin& c) { local_min(state, c.node); },
             },
             event);
}

namespace {

template <Real R>
void check_event_invariants(const SimState<R>& state, const InvariantTolerances& tol, const R& dual_before,
                            const R& dual_after, std::size_t event_index, const ScheduleEvent& event) {
  const auto fail = [&](const std::string& what) {
    throw InvariantError(event_index, fmt::format("event {} ({}): {}", event_index, format_event(event), what));
  };
  for (NodeId i = 0; i < state.node_count(); ++i) {
    if (!(state.node(i).s > 0)) fail(fmt::format("node {} weight is not positive", i + 1));
  }
  for (EdgeId e = 0; e < state.edge_count(); ++e) {
    if (state.edge_weight(e) < 0) fail(fmt::format("edge {} carries negative weight", e));
  }
  const double n = static_cast<double>(state.node_count());
  if (const double w = to_double(weight_residual(state)); !(w <= tol.weight_relative * n)) {
    fail(fmt::format("weight conservation off by {:.3e}", w));
  }
  if (const double r = to_double(mass_residual(state)); !(r <= tol.mass_absolute)) {
    fail(fmt::format("mass conservation off by {:.3e}", r));
  }
  const R allowed = R(tol.monotone_relative) * abs_of(dual_before);
  if (!(dual_after - dual_before <= allowed)) {
    fail(fmt::format("dual surrogate increased from {:.17g} to {:.17g}", to_double(dual_before),
                     to_double(dual_after)));
  }
}

void check_record(const MetricsRecord& rec, const InvariantTolerances& tol) {
  const double slack = tol.gap_relative * (1.0 + std::abs(rec.duality_gap));
  if (!(rec.duality_gap >= -tol.gap_relative) || !(rec.duality_gap >= rec.s_weighted_error - slack) ||
      !(rec.s_weighted_error >= 0.0)) {
    throw InvariantError(rec.event_count,
                         fmt::format("after event {}: gap {:.17g} does not bound the s-weighted error {:.17g}",
                                     rec.event_count, rec.duality_gap, rec.s_weighted_error));
  }
}

}  // namespace

template <Real R>
MetricsLog run(SimState<R>& state, Scheduler& scheduler, const ReferenceSolution<R>& ref,
               const RunOptions& options, const MetricsSink& sink) {
  if (options.rounds == 0) throw Error(Errc::ValidationError, "rounds must be at least 1");
  MetricsLog log;
  DualSurrogateTracker<R> tracker(state);
  R dual = tracker.value();
  log.initial = make_record(state, ref, 0, std::nullopt, dual);
  if (options.check_invariants) check_record(log.initial, options.tolerances);

  const auto emit = [&](MetricsRecord rec) {
    if (options.check_invariants) check_record(rec, options.tolerances);
    if (sink) sink(rec);
    log.records.push_back(std::move(rec));
  };

  for (std::size_t round = 1; round <= options.rounds; ++round) {
    for (const ScheduleEvent& event : scheduler.next_round()) {
      apply_event(state, event);
      tracker.refresh(state, event);
      const R next = tracker.value();
      if (options.check_invariants) {
        check_event_invariants(state, options.tolerances, dual, next, state.event_count(), event);
      }
      dual = next;
      if (options.record_events) log.events.push_back(event);
      if (options.cadence == Cadence::PerEvent) emit(make_record(state, ref, round, event, dual));
    }
    if (options.cadence == Cadence::PerRound) emit(make_record(state, ref, round, std::nullopt, dual));
  }
  return log;
}

DeliveryWindow check_delivery_window(std::span<const ScheduleEvent> events, const GraphTopology& g) {
  DeliveryWindow out;
  out.per_edge.assign(g.edge_count(), std::nullopt);
  // armed[e]: Broadcast(from) seen with only deliveries out of `from` since.
  std::vector<bool> armed(g.edge_count(), false);
  std::vector<std::optional<std::size_t>> last(g.edge_count());
  std::vector<std::size_t> widest(g.edge_count(), 0);

  for (std::size_t k = 0; k < events.size(); ++k) {
    std::visit(detail::overloaded{
                   [&](const Broadcast& b) {
                     for (EdgeId e = 0; e < g.edge_count(); ++e) armed[e] = g.edge(e).from == b.node;
                   },
                   [&](const Deliver& d) {
                     for (EdgeId e = 0; e < g.edge_count(); ++e) {
                       if (g.edge(e).from != d.from) armed[e] = false;
                     }
                     const EdgeId e = g.edge_id(d.from, d.to);
                     if (armed[e]) {
                       const std::size_t gap = last[e] ? k - *last[e] : k + 1;
                       widest[e] = std::max(widest[e], gap);
                       last[e] = k;
                     }
                   },
                   [&](const LocalMin&) { std::fill(armed.begin(), armed.end(), false); },
               },
               events[k]);
  }

  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!last[e]) continue;
    widest[e] = std::max(widest[e], events.size() - 1 - *last[e]);
    out.per_edge[e] = widest[e];
  }
  const bool bounded = std::all_of(out.per_edge.begin(), out.per_edge.end(), [](const auto& v) { return v.has_value(); });
  if (bounded) {
    std::size_t k = 0;
    for (const auto& v : out.per_edge) k = std::max(k, *v);
    out.max_window = k;
  }
  return out;
}

std::vector<ScheduleEvent> read_trace(std::istream& in) {
  std::vector<ScheduleEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      events.push_back(parse_event(line));
    } catch (const Error& e) {
      throw Error(Errc::ParseError, fmt::format("trace line {}: {}", line_no, e.what()));
    }
  }
  return events;
}

std::vector<ScheduleEvent> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, fmt::format("cannot open trace file '{}'", path));
  return read_trace(in);
}

void write_trace(std::ostream& out, std::span<const ScheduleEvent> events) {
  for (const auto& e : events) out << format_event(e) << '\n';
}

template void apply_event<double>(SimState<double>&, const ScheduleEvent&);
template void apply_event<extended>(SimState<extended>&, const ScheduleEvent&);
template MetricsLog run<double>(SimState<double>&, Scheduler&, const ReferenceSolution<double>&,
                                const RunOptions&, const MetricsSink&);
template MetricsLog run<extended>(SimState<extended>&, Scheduler&, const ReferenceSolution<extended>&,
                                  const RunOptions&, const MetricsSink&);

}  // namespace dyknet
