// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dyknet/functions.hpp"
#include "dyknet/graph.hpp"
#include "dyknet/protocol.hpp"
#include "dyknet/real.hpp"
#include "dyknet/scheduler.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dyknet {

struct ZeroSpec {
  friend bool operator==(const ZeroSpec&, const ZeroSpec&) = default;
};

/// Quadratic regenerated from `seed` by make_paper_quadratic; only the seed
/// and the gradient at the all-ones vector are stored.
struct QuadraticSeededSpec {
  std::uint64_t seed = 0;
  std::vector<double> target_gradient;
  friend bool operator==(const QuadraticSeededSpec&, const QuadraticSeededSpec&) = default;
};

/// f(x) = <gradient, x> + offset.
struct AffineSpec {
  std::vector<double> gradient;
  double offset = 0;
  friend bool operator==(const AffineSpec&, const AffineSpec&) = default;
};

using FunctionSpec = std::variant<ZeroSpec, QuadraticSeededSpec, AffineSpec>;

struct NodeSpec {
  std::size_t id = 1;  // 1-based
  Treatment treatment = Treatment::Proximable;
  FunctionSpec function = ZeroSpec{};
  std::vector<double> xbar;
  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

enum class PolicyKind { RoundRobin, RandomEvent, Trace };

std::string_view to_string(PolicyKind k) noexcept;

struct ScheduleSpec {
  PolicyKind policy = PolicyKind::RoundRobin;
  double p_deliver = 1.0;
  std::uint64_t seed = 0;
  std::optional<std::string> trace;  // path, required for PolicyKind::Trace
  bool local_min_each_round = true;  // round_robin only
  std::array<double, 3> weights{1.0, 1.0, 1.0};  // random_event: broadcast, deliver, local_min
  friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

struct ExperimentConfig {
  std::size_t dimension = 1;
  std::vector<NodeSpec> nodes;                            // sorted by id
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // 1-based
  ScheduleSpec schedule;
  std::size_t rounds = 1;
  Cadence cadence = Cadence::PerRound;
  Precision precision = Precision::Double;
  std::optional<std::string> output;  // CSV path

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses and validates a JSON document. Throws ParseError (with line and
/// column) for malformed JSON, ValidationError naming the offending field,
/// or the graph error codes (InvalidEndpoint, SelfLoop, DuplicateEdge,
/// NotStronglyConnected) for a bad edge list.
ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a file; throws Io when it cannot be read.
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Canonical JSON, two-space indented. parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

/// Re-runs the semantic checks parse_config performs. Useful after editing a
/// config in code.
void validate_config(const ExperimentConfig& config);

enum class PresetMode { Prox, Subdiff };

PresetMode parse_preset_mode(std::string_view text);

/// Six nodes, m = 6, cycles 1->2->3->5->1 and 2->4->6->2. Each node gets a
/// seeded quadratic whose gradient at the all-ones vector is a random
/// v_i ~ U(0,1)^6, and every node shares xbar = 1 + sum_i v_i / 6, which
/// puts the optimum at the all-ones vector. Both modes draw the same
/// numbers. 1000 rounds of RoundRobin with p = 1.
ExperimentConfig preset_paper_sec4(std::uint64_t seed, PresetMode mode);

GraphTopology build_topology(const ExperimentConfig& config);

template <Real R>
Problem<R> build_problem(const ExperimentConfig& config);

/// Trace paths are resolved against `base_dir` when relative.
SchedulePolicy build_policy(const ExperimentConfig& config, const std::filesystem::path& base_dir = {});

extern template Problem<double> build_problem<double>(const ExperimentConfig&);
extern template Problem<extended> build_problem<extended>(const ExperimentConfig&);

}  // namespace dyknet
