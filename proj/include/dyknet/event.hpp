// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dyknet/graph.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace dyknet {

struct Broadcast {
  NodeId node = 0;
  friend bool operator==(const Broadcast&, const Broadcast&) = default;
};

struct Deliver {
  NodeId from = 0;
  NodeId to = 0;
  friend bool operator==(const Deliver&, const Deliver&) = default;
};

struct LocalMin {
  NodeId node = 0;
  friend bool operator==(const LocalMin&, const LocalMin&) = default;
};

/// One step of the simulation alphabet.
using ScheduleEvent = std::variant<Broadcast, Deliver, LocalMin>;

/// Trace-file spelling with 1-based ids: "A 3", "B 2 4", "C 5".
std::string format_event(const ScheduleEvent& e);

/// Parses one trace line. Throws ParseError.
ScheduleEvent parse_event(std::string_view line);

/// Throws InvalidNode / InvalidEdge when the event does not fit the topology.
void validate_event(const ScheduleEvent& e, const GraphTopology& g);

}  // namespace dyknet
