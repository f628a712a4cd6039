// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/config.hpp"

#include "dyknet/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace dyknet {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(Errc::ValidationError, fmt::format("{}: {}", field, what));
}

void reject_unknown_keys(const json& obj, const std::string& field, std::initializer_list<std::string_view> known) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      invalid(field.empty() ? key : field + "." + key, "unknown field");
    }
  }
}

const json& require(const json& obj, const std::string& parent, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) invalid(parent.empty() ? key : parent + "." + key, "missing");
  return *it;
}

std::string join(const std::string& parent, std::string_view key) {
  return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

std::uint64_t as_u64(const json& v, const std::string& field) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    invalid(field, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

double as_double(const json& v, const std::string& field) {
  if (!v.is_number()) invalid(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) invalid(field, "expected a finite number");
  return d;
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) invalid(field, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_vector(const json& v, const std::string& field, std::size_t dimension) {
  if (!v.is_array()) invalid(field, "expected an array of numbers");
  if (v.size() != dimension) invalid(field, fmt::format("expected {} entries, got {}", dimension, v.size()));
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_double(v[k], fmt::format("{}[{}]", field, k)));
  return out;
}

Treatment parse_treatment(const json& v, const std::string& field) {
  const std::string s = as_string(v, field);
  if (s == "prox") return Treatment::Proximable;
  if (s == "subdiff") return Treatment::Subdifferentiable;
  invalid(field, fmt::format("expected \"prox\" or \"subdiff\", got \"{}\"", s));
}

FunctionSpec parse_function(const json& v, const std::string& field, std::size_t dimension) {
  if (!v.is_object()) invalid(field, "expected an object");
  const std::string type = as_string(require(v, field, "type"), join(field, "type"));
  if (type == "zero") {
    reject_unknown_keys(v, field, {"type"});
    return ZeroSpec{};
  }
  if (type == "quadratic_seeded") {
    reject_unknown_keys(v, field, {"type", "seed", "target_gradient"});
    QuadraticSeededSpec q;
    q.seed = as_u64(require(v, field, "seed"), join(field, "seed"));
    q.target_gradient =
        as_vector(require(v, field, "target_gradient"), join(field, "target_gradient"), dimension);
    return q;
  }
  if (type == "affine") {
    reject_unknown_keys(v, field, {"type", "gradient", "offset"});
    AffineSpec a;
    a.gradient = as_vector(require(v, field, "gradient"), join(field, "gradient"), dimension);
    if (v.contains("offset")) a.offset = as_double(v["offset"], join(field, "offset"));
    return a;
  }
  invalid(join(field, "type"), fmt::format("unknown function type \"{}\"", type));
}

ScheduleSpec parse_schedule(const json& v) {
  const std::string field = "schedule";
  if (!v.is_object()) invalid(field, "expected an object");
  reject_unknown_keys(v, field, {"policy", "p_deliver", "seed", "trace", "local_min_each_round", "weights"});
  ScheduleSpec s;
  const std::string policy = as_string(require(v, field, "policy"), "schedule.policy");
  if (policy == "round_robin") {
    s.policy = PolicyKind::RoundRobin;
  } else if (policy == "random_event") {
    s.policy = PolicyKind::RandomEvent;
  } else if (policy == "trace") {
    s.policy = PolicyKind::Trace;
  } else {
    invalid("schedule.policy", fmt::format("unknown policy \"{}\"", policy));
  }
  if (v.contains("p_deliver")) s.p_deliver = as_double(v["p_deliver"], "schedule.p_deliver");
  if (v.contains("seed")) s.seed = as_u64(v["seed"], "schedule.seed");
  if (v.contains("trace")) s.trace = as_string(v["trace"], "schedule.trace");
  if (v.contains("local_min_each_round")) {
    if (!v["local_min_each_round"].is_boolean()) invalid("schedule.local_min_each_round", "expected a boolean");
    s.local_min_each_round = v["local_min_each_round"].get<bool>();
  }
  if (v.contains("weights")) {
    const auto w = as_vector(v["weights"], "schedule.weights", 3);
    std::copy(w.begin(), w.end(), s.weights.begin());
  }
  return s;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k + 1 < byte; ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

ordered_json emit_function(const FunctionSpec& f) {
  return std::visit(detail::overloaded{
                        [](const ZeroSpec&) { return ordered_json{{"type", "zero"}}; },
                        [](const QuadraticSeededSpec& q) {
                          return ordered_json{{"type", "quadratic_seeded"},
                                              {"seed", q.seed},
                                              {"target_gradient", q.target_gradient}};
                        },
                        [](const AffineSpec& a) {
                          return ordered_json{{"type", "affine"}, {"gradient", a.gradient}, {"offset", a.offset}};
                        },
                    },
                    f);
}

}  // namespace

std::string_view to_string(PolicyKind k) noexcept {
  switch (k) {
    case PolicyKind::RoundRobin: return "round_robin";
    case PolicyKind::RandomEvent: return "random_event";
    case PolicyKind::Trace: return "trace";
  }
  return "round_robin";
}

void validate_config(const ExperimentConfig& c) {
  if (c.dimension == 0) invalid("dimension", "must be at least 1");
  if (c.nodes.empty()) invalid("nodes", "at least one node is required");
  for (std::size_t k = 0; k < c.nodes.size(); ++k) {
    const NodeSpec& n = c.nodes[k];
    const std::string field = fmt::format("nodes[{}]", k);
    if (n.id != k + 1) {
      invalid(field + ".id", fmt::format("ids must be 1..{} with each used once", c.nodes.size()));
    }
    if (n.xbar.size() != c.dimension) invalid(field + ".xbar", fmt::format("expected {} entries", c.dimension));
    std::visit(detail::overloaded{
                   [](const ZeroSpec&) {},
                   [&](const QuadraticSeededSpec& q) {
                     if (q.target_gradient.size() != c.dimension) {
                       invalid(field + ".function.target_gradient", fmt::format("expected {} entries", c.dimension));
                     }
                   },
                   [&](const AffineSpec& a) {
                     if (a.gradient.size() != c.dimension) {
                       invalid(field + ".function.gradient", fmt::format("expected {} entries", c.dimension));
                     }
                   },
               },
               n.function);
  }
  const ScheduleSpec& s = c.schedule;
  if (!(s.p_deliver > 0.0 && s.p_deliver <= 1.0)) invalid("schedule.p_deliver", "must lie in (0, 1]");
  if (s.policy == PolicyKind::Trace && !s.trace) invalid("schedule.trace", "required for the trace policy");
  if (s.policy != PolicyKind::Trace && s.trace) invalid("schedule.trace", "only allowed with the trace policy");
  for (double w : s.weights) {
    if (!(w >= 0.0)) invalid("schedule.weights", "must be nonnegative");
  }
  if (s.weights[0] + s.weights[1] + s.weights[2] <= 0.0) invalid("schedule.weights", "must not all be zero");
  if (c.rounds == 0) invalid("rounds", "must be at least 1");

  try {
    (void)build_topology(c);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("edges: {}", e.what()));
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte);
    throw Error(Errc::ParseError, fmt::format("line {}, column {}: {}", line, col, e.what()));
  }
  if (!doc.is_object()) invalid("(root)", "expected a JSON object");
  reject_unknown_keys(doc, "",
                      {"dimension", "nodes", "edges", "schedule", "rounds", "cadence", "precision", "output"});

  ExperimentConfig c;
  c.dimension = as_u64(require(doc, "", "dimension"), "dimension");

  const json& nodes = require(doc, "", "nodes");
  if (!nodes.is_array()) invalid("nodes", "expected an array");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::string field = fmt::format("nodes[{}]", k);
    const json& v = nodes[k];
    if (!v.is_object()) invalid(field, "expected an object");
    reject_unknown_keys(v, field, {"id", "treatment", "function", "xbar"});
    NodeSpec n;
    n.id = as_u64(require(v, field, "id"), field + ".id");
    n.treatment = v.contains("treatment") ? parse_treatment(v["treatment"], field + ".treatment")
                                          : Treatment::Proximable;
    if (v.contains("function")) n.function = parse_function(v["function"], field + ".function", c.dimension);
    n.xbar = as_vector(require(v, field, "xbar"), field + ".xbar", c.dimension);
    c.nodes.push_back(std::move(n));
  }
  std::sort(c.nodes.begin(), c.nodes.end(), [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });

  if (doc.contains("edges")) {
    const json& edges = doc["edges"];
    if (!edges.is_array()) invalid("edges", "expected an array of [from, to] pairs");
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::string field = fmt::format("edges[{}]", k);
      if (!edges[k].is_array() || edges[k].size() != 2) invalid(field, "expected a [from, to] pair");
      c.edges.emplace_back(as_u64(edges[k][0], field + "[0]"), as_u64(edges[k][1], field + "[1]"));
    }
  }

  if (doc.contains("schedule")) c.schedule = parse_schedule(doc["schedule"]);
  if (doc.contains("rounds")) c.rounds = as_u64(doc["rounds"], "rounds");
  if (doc.contains("cadence")) {
    const std::string cad = as_string(doc["cadence"], "cadence");
    if (cad == "round") {
      c.cadence = Cadence::PerRound;
    } else if (cad == "event") {
      c.cadence = Cadence::PerEvent;
    } else {
      invalid("cadence", fmt::format("expected \"round\" or \"event\", got \"{}\"", cad));
    }
  }
  if (doc.contains("precision")) {
    try {
      c.precision = parse_precision(as_string(doc["precision"], "precision"));
    } catch (const Error& e) {
      invalid("precision", e.what());
    }
  }
  if (doc.contains("output")) c.output = as_string(doc["output"], "output");

  validate_config(c);
  return c;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string emit_config(const ExperimentConfig& c) {
  ordered_json doc;
  doc["dimension"] = c.dimension;
  doc["nodes"] = ordered_json::array();
  for (const NodeSpec& n : c.nodes) {
    doc["nodes"].push_back(ordered_json{
        {"id", n.id},
        {"treatment", n.treatment == Treatment::Proximable ? "prox" : "subdiff"},
        {"function", emit_function(n.function)},
        {"xbar", n.xbar},
    });
  }
  doc["edges"] = ordered_json::array();
  for (const auto& [from, to] : c.edges) doc["edges"].push_back({from, to});

  ordered_json sched;
  sched["policy"] = to_string(c.schedule.policy);
  sched["p_deliver"] = c.schedule.p_deliver;
  sched["seed"] = c.schedule.seed;
  if (c.schedule.trace) sched["trace"] = *c.schedule.trace;
  if (!c.schedule.local_min_each_round) sched["local_min_each_round"] = false;
  if (c.schedule.weights != std::array<double, 3>{1.0, 1.0, 1.0}) sched["weights"] = c.schedule.weights;
  doc["schedule"] = std::move(sched);

  doc["rounds"] = c.rounds;
  doc["cadence"] = to_string(c.cadence);
  doc["precision"] = to_string(c.precision);
  if (c.output) doc["output"] = *c.output;
  return doc.dump(2) + "\n";
}

PresetMode parse_preset_mode(std::string_view text) {
  if (text == "prox") return PresetMode::Prox;
  if (text == "subdiff") return PresetMode::Subdiff;
  throw Error(Errc::ValidationError, fmt::format("mode must be \"prox\" or \"subdiff\", got \"{}\"", text));
}

ExperimentConfig preset_paper_sec4(std::uint64_t seed, PresetMode mode) {
  constexpr std::size_t kNodes = 6;
  constexpr std::size_t kDim = 6;
  Rng rng(seed);

  ExperimentConfig c;
  c.dimension = kDim;
  c.edges = {{1, 2}, {2, 3}, {3, 5}, {5, 1}, {2, 4}, {4, 6}, {6, 2}};
  c.rounds = 1000;
  c.schedule.policy = PolicyKind::RoundRobin;
  c.schedule.seed = seed;

  std::vector<double> v_sum(kDim, 0.0);
  for (std::size_t i = 0; i < kNodes; ++i) {
    NodeSpec n;
    n.id = i + 1;
    n.treatment = mode == PresetMode::Prox ? Treatment::Proximable : Treatment::Subdifferentiable;
    QuadraticSeededSpec q;
    q.target_gradient.resize(kDim);
    for (std::size_t k = 0; k < kDim; ++k) {
      q.target_gradient[k] = uniform_open01(rng);
      v_sum[k] += q.target_gradient[k];
    }
    q.seed = rng();
    n.function = std::move(q);
    c.nodes.push_back(std::move(n));
  }
  std::vector<double> xbar(kDim);
  for (std::size_t k = 0; k < kDim; ++k) xbar[k] = 1.0 + v_sum[k] / static_cast<double>(kNodes);
  for (NodeSpec& n : c.nodes) n.xbar = xbar;
  return c;
}

GraphTopology build_topology(const ExperimentConfig& c) {
  std::vector<Edge> edges;
  edges.reserve(c.edges.size());
  for (const auto& [from, to] : c.edges) {
    if (from == 0 || to == 0 || from > c.nodes.size() || to > c.nodes.size()) {
      throw Error(Errc::InvalidEndpoint,
                  fmt::format("edge ({}, {}) has an endpoint outside 1..{}", from, to, c.nodes.size()));
    }
    edges.push_back(Edge{from - 1, to - 1});
  }
  return GraphTopology::build(c.nodes.size(), std::move(edges));
}

template <Real R>
Problem<R> build_problem(const ExperimentConfig& c) {
  const auto to_vec = [](const std::vector<double>& v) {
    Vec<R> out;
    out.reserve(v.size());
    for (double d : v) out.push_back(R(d));
    return out;
  };
  std::vector<ObjectiveSpec<R>> objectives;
  std::vector<Vec<R>> xbar;
  for (const NodeSpec& n : c.nodes) {
    objectives.push_back(std::visit(
        detail::overloaded{
            [&](const ZeroSpec&) { return ObjectiveSpec<R>{ZeroFunction{c.dimension}, n.treatment}; },
            [&](const QuadraticSeededSpec& q) {
              Rng rng(q.seed);
              return make_paper_quadratic<R>(c.dimension, to_vec(q.target_gradient), rng, n.treatment);
            },
            [&](const AffineSpec& a) {
              return ObjectiveSpec<R>{AffineFunction<R>{to_vec(a.gradient), R(a.offset)}, n.treatment};
            },
        },
        n.function));
    xbar.push_back(to_vec(n.xbar));
  }
  return make_problem<R>(c.dimension, std::move(objectives), std::move(xbar));
}

SchedulePolicy build_policy(const ExperimentConfig& c, const std::filesystem::path& base_dir) {
  SchedulePolicy policy;
  policy.seed = c.schedule.seed;
  switch (c.schedule.policy) {
    case PolicyKind::RoundRobin:
      policy.variant = RoundRobin{c.schedule.p_deliver, c.schedule.local_min_each_round};
      break;
    case PolicyKind::RandomEvent:
      policy.variant = RandomEvent{c.schedule.weights[0], c.schedule.weights[1], c.schedule.weights[2],
                                   c.schedule.p_deliver};
      break;
    case PolicyKind::Trace: {
      std::filesystem::path path(*c.schedule.trace);
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      policy.variant = TraceReplay{read_trace_file(path.string())};
      break;
    }
  }
  return policy;
}

template Problem<double> build_problem<double>(const ExperimentConfig&);
template Problem<extended> build_problem<extended>(const ExperimentConfig&);

}  // namespace dyknet
