// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dyknet/event.hpp"
#include "dyknet/graph.hpp"
#include "dyknet/metrics.hpp"
#include "dyknet/protocol.hpp"
#include "dyknet/random.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace dyknet {

/// Each round: for every node i in ascending order, Broadcast(i) followed
/// immediately by Deliver(i, j) for each out-edge, each delivery succeeding
/// independently with probability p_deliver; then LocalMin for every node
/// in ascending order (when local_min_each_round is set).
struct RoundRobin {
  double p_deliver = 1.0;
  bool local_min_each_round = true;
};

/// One event per round: the kind is drawn by weight, the node or edge
/// uniformly. A drawn delivery is lost with probability 1 - p_deliver, in
/// which case the round is empty and the data stays in flight.
struct RandomEvent {
  double weight_broadcast = 1.0;
  double weight_deliver = 1.0;
  double weight_local_min = 1.0;
  double p_deliver = 1.0;
};

/// Replays a recorded event sequence. A round ends where a run of LocalMin
/// events ends, i.e. the first Broadcast or Deliver after a LocalMin starts
/// the next round, so a trace recorded from a RoundRobin run replays with the
/// same round boundaries.
struct TraceReplay {
  std::vector<ScheduleEvent> events;
};

struct SchedulePolicy {
  std::variant<RoundRobin, RandomEvent, TraceReplay> variant = RoundRobin{};
  std::uint64_t seed = 0;
};

/// Throws ValidationError for probabilities or weights out of range, or
/// InvalidNode/InvalidEdge for trace events that do not fit the graph.
void validate_policy(const SchedulePolicy& policy, const GraphTopology& g);

/// Deterministic event generator: identical (policy, topology) always yields
/// identical sequences. Per-edge delivery draws for RoundRobin come from a
/// counter-based stream keyed by (seed, edge id, round), so they do not
/// depend on generation order.
class Scheduler {
 public:
  Scheduler(SchedulePolicy policy, std::shared_ptr<const GraphTopology> topology);

  /// Events of the next round. Throws TraceExhausted when a trace has no
  /// events left.
  std::vector<ScheduleEvent> next_round();

  std::size_t rounds_generated() const noexcept { return round_; }
  const SchedulePolicy& policy() const noexcept { return policy_; }

 private:
  std::vector<ScheduleEvent> round_robin(const RoundRobin& rr);
  std::vector<ScheduleEvent> random_event(const RandomEvent& re);
  std::vector<ScheduleEvent> trace_replay(const TraceReplay& tr);

  SchedulePolicy policy_;
  std::shared_ptr<const GraphTopology> topology_;
  Rng rng_;
  std::size_t round_ = 0;
  std::size_t trace_pos_ = 0;
};

/// Applies one event to the state via the matching protocol operation.
template <Real R>
void apply_event(SimState<R>& state, const ScheduleEvent& event);

enum class Cadence { PerRound, PerEvent };

std::string_view to_string(Cadence c) noexcept;

struct InvariantTolerances {
  double weight_relative = 1e-12;  // times |V|
  double mass_absolute = 1e-9;
  double monotone_relative = 1e-9;
  double gap_relative = 1e-9;
};

struct RunOptions {
  std::size_t rounds = 1;
  Cadence cadence = Cadence::PerRound;
  /// Check conservation, positivity and dual monotonicity after every event
  /// and the gap sandwich at every record; throw InvariantError on failure.
  bool check_invariants = true;
  InvariantTolerances tolerances{};
  bool record_events = true;
};

struct MetricsLog {
  MetricsRecord initial;
  std::vector<MetricsRecord> records;
  std::vector<ScheduleEvent> events;  // filled when RunOptions::record_events
};

using MetricsSink = std::function<void(const MetricsRecord&)>;

/// Drives the state for `rounds` rounds, emitting one record per round or per
/// event. Protocol errors propagate; invariant failures raise InvariantError
/// carrying the 1-based index of the offending event.
template <Real R>
MetricsLog run(SimState<R>& state, Scheduler& scheduler, const ReferenceSolution<R>& ref,
               const RunOptions& options, const MetricsSink& sink = {});

/// Largest observed window K such that every edge (i, j) sees Broadcast(i)
/// followed by Deliver(i, j) (only other deliveries out of i in between) at
/// least once per K consecutive events. Gaps are measured between successive
/// completions of the pattern, plus the lead-in from the start and the tail
/// to the end of the sequence. nullopt per edge (and overall) means the
/// pattern never happens: unbounded.
struct DeliveryWindow {
  std::vector<std::optional<std::size_t>> per_edge;
  std::optional<std::size_t> max_window;
};

DeliveryWindow check_delivery_window(std::span<const ScheduleEvent> events, const GraphTopology& g);

/// Trace files: one event per line, "A <i>", "B <i> <j>" or "C <j>", 1-based.
std::vector<ScheduleEvent> read_trace(std::istream& in);
std::vector<ScheduleEvent> read_trace_file(const std::string& path);
void write_trace(std::ostream& out, std::span<const ScheduleEvent> events);

#define DYKNET_SCHEDULER_EXTERN(R)                                                            \
  extern template void apply_event<R>(SimState<R>&, const ScheduleEvent&);                   \
  extern template MetricsLog run<R>(SimState<R>&, Scheduler&, const ReferenceSolution<R>&,   \
                                    const RunOptions&, const MetricsSink&);

DYKNET_SCHEDULER_EXTERN(double)
DYKNET_SCHEDULER_EXTERN(extended)

}  // namespace dyknet
