// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/event.hpp"

#include "dyknet/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <string>
#include <vector>

namespace dyknet {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

NodeId parse_id(std::string_view field, std::string_view line) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || value == 0) {
    throw Error(Errc::ParseError, fmt::format("bad node id '{}' in event '{}'", field, line));
  }
  return value - 1;
}

void check_node(NodeId i, const GraphTopology& g) {
  if (i >= g.node_count()) {
    throw Error(Errc::InvalidNode, fmt::format("node {} out of range 1..{}", i + 1, g.node_count()));
  }
}

}  // namespace

std::string format_event(const ScheduleEvent& e) {
  if (const auto* b = std::get_if<Broadcast>(&e)) return fmt::format("A {}", b->node + 1);
  if (const auto* d = std::get_if<Deliver>(&e)) return fmt::format("B {} {}", d->from + 1, d->to + 1);
  return fmt::format("C {}", std::get<LocalMin>(e).node + 1);
}

ScheduleEvent parse_event(std::string_view line) {
  const auto f = split_fields(line);
  if (f.size() == 2 && f[0] == "A") return Broadcast{parse_id(f[1], line)};
  if (f.size() == 3 && f[0] == "B") return Deliver{parse_id(f[1], line), parse_id(f[2], line)};
  if (f.size() == 2 && f[0] == "C") return LocalMin{parse_id(f[1], line)};
  throw Error(Errc::ParseError, fmt::format("unrecognized event '{}'", line));
}

void validate_event(const ScheduleEvent& e, const GraphTopology& g) {
  if (const auto* b = std::get_if<Broadcast>(&e)) {
    check_node(b->node, g);
  } else if (const auto* d = std::get_if<Deliver>(&e)) {
    check_node(d->from, g);
    check_node(d->to, g);
    if (!g.find_edge(d->from, d->to)) {
      throw Error(Errc::InvalidEdge, fmt::format("no edge ({}, {})", d->from + 1, d->to + 1));
    }
  } else {
    check_node(std::get<LocalMin>(e).node, g);
  }
}

}  // namespace dyknet
