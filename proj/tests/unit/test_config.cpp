// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/config.hpp"
#include "dyknet/error.hpp"
#include "dyknet/experiment.hpp"
#include "fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dyknet;
using Catch::Approx;

namespace {

constexpr const char* kMinimal = R"({
  "dimension": 1,
  "nodes": [{"id": 1, "treatment": "prox", "function": {"type": "zero"}, "xbar": [0.5]}],
  "edges": [],
  "schedule": {"policy": "round_robin", "seed": 1},
  "rounds": 3
})";

Error parse_failure(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    return e;
  }
  FAIL("parse succeeded");
  return Error(Errc::Io, "");
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<double> column(const std::string& csv, std::size_t index) {
  std::vector<double> out;
  const auto lines = lines_of(csv);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    std::istringstream row(lines[k]);
    std::string cell;
    for (std::size_t c = 0; c <= index; ++c) std::getline(row, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "dyknet_test_config";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal config parses with defaults and runs", "[config]") {
  const auto cfg = parse_config(kMinimal);
  CHECK(cfg.dimension == 1);
  CHECK(cfg.nodes.size() == 1);
  CHECK(cfg.schedule.p_deliver == 1.0);
  CHECK(cfg.cadence == Cadence::PerRound);
  CHECK(cfg.precision == Precision::Double);
  std::ostringstream csv;
  const auto report = run_experiment(cfg, csv);
  CHECK(report.ok());
  CHECK(lines_of(csv.str()).size() == 4);
  CHECK(lines_of(csv.str()).front() == kCsvHeader);
}

TEST_CASE("preset has the documented shape", "[config][preset]") {
  const auto prox = preset_paper_sec4(42, PresetMode::Prox);
  const auto sub = preset_paper_sec4(42, PresetMode::Subdiff);
  const auto parsed = parse_config(emit_config(prox));
  CHECK(parsed.nodes.size() == 6);
  CHECK(parsed.edges.size() == 7);
  CHECK(parsed.dimension == 6);
  CHECK(parsed.rounds == 1000);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(prox.nodes[i].treatment == Treatment::Proximable);
    CHECK(sub.nodes[i].treatment == Treatment::Subdifferentiable);
    CHECK(prox.nodes[i].function == sub.nodes[i].function);
    CHECK(prox.nodes[i].xbar == sub.nodes[i].xbar);
  }
  // sum_i v_i + |V| (1 - xbar) = 0
  for (std::size_t k = 0; k < 6; ++k) {
    double total = 0;
    for (const auto& n : prox.nodes) total += std::get<QuadraticSeededSpec>(n.function).target_gradient[k];
    total += 6 * (1 - prox.nodes[0].xbar[k]);
    CHECK(total == Approx(0.0).margin(1e-13));
  }
  CHECK(preset_paper_sec4(42, PresetMode::Prox) == prox);
  CHECK_FALSE(preset_paper_sec4(43, PresetMode::Prox) == prox);
}

TEST_CASE("edge endpoint outside the node range", "[config]") {
  auto cfg = preset_paper_sec4(1, PresetMode::Prox);
  cfg.edges.emplace_back(1, 7);
  const auto e = parse_failure(emit_config(cfg));
  CHECK(e.code() == Errc::InvalidEndpoint);
  CHECK(std::string(e.what()).find("(1, 7)") != std::string::npos);
}

TEST_CASE("graph errors surface from the edge list", "[config]") {
  auto cfg = preset_paper_sec4(1, PresetMode::Prox);
  cfg.edges.pop_back();  // drops 6 -> 2
  CHECK(parse_failure(emit_config(cfg)).code() == Errc::NotStronglyConnected);
  cfg = preset_paper_sec4(1, PresetMode::Prox);
  cfg.edges.emplace_back(3, 3);
  CHECK(parse_failure(emit_config(cfg)).code() == Errc::SelfLoop);
}

TEST_CASE("malformed JSON reports the line", "[config]") {
  const auto e = parse_failure("{\n  \"dimension\": 1,\n  \"nodes\": [,]\n}");
  CHECK(e.code() == Errc::ParseError);
  CHECK(std::string(e.what()).find("line 3") != std::string::npos);
}

TEST_CASE("validation errors name the field", "[config]") {
  const auto check_field = [](std::string text, const std::string& field) {
    const auto e = parse_failure(text);
    INFO(e.what());
    CHECK(e.code() == Errc::ValidationError);
    CHECK(std::string(e.what()).rfind(field, 0) == 0);
  };
  const std::string base = kMinimal;
  const auto replace = [&](const std::string& from, const std::string& to) {
    std::string s = base;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  check_field(replace("\"xbar\": [0.5]", "\"xbar\": [0.5, 1]"), "nodes[0].xbar");
  check_field(replace("\"treatment\": \"prox\"", "\"treatment\": \"smooth\""), "nodes[0].treatment");
  check_field(replace("\"type\": \"zero\"", "\"type\": \"cubic\""), "nodes[0].function.type");
  check_field(replace("\"seed\": 1", "\"seed\": 1, \"p_deliver\": 0"), "schedule.p_deliver");
  check_field(replace("\"seed\": 1", "\"seed\": -4"), "schedule.seed");
  check_field(replace("\"policy\": \"round_robin\"", "\"policy\": \"trace\""), "schedule.trace");
  check_field(replace("\"rounds\": 3", "\"rounds\": 0"), "rounds");
  check_field(replace("\"rounds\": 3", "\"rounds\": 3, \"colour\": 1"), "colour");
  check_field(replace("\"id\": 1", "\"id\": 2"), "nodes[0].id");
  check_field(replace("\"dimension\": 1", "\"dimension\": 0"), "nodes[0].xbar");
  check_field(replace("\"rounds\": 3", "\"rounds\": 3, \"cadence\": \"hourly\""), "cadence");
}

TEST_CASE("emit and parse round-trip", "[config]") {
  Rng rng(8);
  std::vector<ExperimentConfig> configs{parse_config(kMinimal), preset_paper_sec4(9, PresetMode::Subdiff)};
  for (int k = 0; k < 20; ++k) {
    auto c = testing::random_config(1 + k % 8, 1 + k % 4, rng);
    c.schedule.policy = k % 2 ? PolicyKind::RoundRobin : PolicyKind::RandomEvent;
    c.schedule.p_deliver = uniform_open01(rng);
    c.schedule.seed = rng();
    c.schedule.weights = {uniform_open01(rng), 0.0, 2.5};
    c.schedule.local_min_each_round = k % 3 != 0;
    c.rounds = 1 + k;
    c.cadence = k % 2 ? Cadence::PerEvent : Cadence::PerRound;
    c.precision = k % 4 == 0 ? Precision::Extended : Precision::Double;
    if (k % 5 == 0) c.output = "out.csv";
    configs.push_back(std::move(c));
  }
  for (const auto& c : configs) {
    const std::string text = emit_config(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(emit_config(back) == text);
  }
}

TEST_CASE("preset run: 1000 rows, nonincreasing gap, reproducible bytes", "[config][run]") {
  const auto cfg = preset_paper_sec4(5, PresetMode::Prox);
  std::ostringstream a, b;
  const auto report = run_experiment(cfg, a);
  (void)run_experiment(cfg, b);
  CHECK(report.ok());
  CHECK(a.str() == b.str());
  const auto lines = lines_of(a.str());
  CHECK(lines.size() == 1001);
  CHECK(a.str().find('\r') == std::string::npos);
  const auto gap = column(a.str(), 3);
  for (std::size_t k = 1; k < gap.size(); ++k) REQUIRE(gap[k] <= gap[k - 1] + 1e-9 * (1 + std::abs(gap[k - 1])));
  CHECK(report.window.max_window == std::optional<std::size_t>{19});
  const auto summary = format_summary(report);
  CHECK(summary.find("empirical_K=19") != std::string::npos);
  CHECK(summary.find("invariants=ok") != std::string::npos);
}

TEST_CASE("replaying a recorded trace reproduces the CSV", "[config][run][trace]") {
  auto cfg = preset_paper_sec4(5, PresetMode::Subdiff);
  cfg.rounds = 60;
  cfg.schedule.p_deliver = 0.8;
  std::ostringstream csv, trace;
  ExperimentOptions opt;
  opt.trace_out = &trace;
  (void)run_experiment(cfg, csv, opt);

  const auto dir = scratch_dir();
  {
    std::ofstream f(dir / "recorded.trace", std::ios::binary);
    f << trace.str();
  }
  auto replay = cfg;
  replay.schedule = ScheduleSpec{};
  replay.schedule.policy = PolicyKind::Trace;
  replay.schedule.trace = "recorded.trace";
  std::ostringstream again;
  ExperimentOptions ropt;
  ropt.base_dir = dir;
  const auto report = run_experiment(replay, again, ropt);
  CHECK(report.ok());
  CHECK(again.str() == csv.str());

  // One round too many exhausts the trace.
  replay.rounds = 61;
  std::ostringstream longer;
  const auto exhausted = run_experiment(replay, longer, ropt);
  REQUIRE_FALSE(exhausted.ok());
  CHECK(exhausted.failure->code() == Errc::TraceExhausted);
  CHECK(exhausted.rounds_completed == 60);
}

TEST_CASE("consensus-only config reaches agreement", "[config][run]") {
  auto cfg = preset_paper_sec4(3, PresetMode::Prox);
  for (auto& n : cfg.nodes) {
    n.function = ZeroSpec{};
    for (double& v : n.xbar) v = static_cast<double>(n.id) * 0.5 - v;
  }
  cfg.rounds = 100;
  std::ostringstream csv;
  const auto report = run_experiment(cfg, csv);
  REQUIRE(report.ok());
  CHECK(column(csv.str(), 5).back() <= 1e-8);
}

TEST_CASE("starved node is reported as a numerical failure", "[config][run]") {
  auto cfg = parse_config(kMinimal);
  cfg.nodes.push_back(cfg.nodes.front());
  cfg.nodes.back().id = 2;
  cfg.edges = {{1, 2}, {2, 1}};
  cfg.schedule.policy = PolicyKind::RandomEvent;
  cfg.schedule.weights = {1.0, 0.0, 1.0};  // broadcasts never delivered
  cfg.rounds = 400;
  std::ostringstream csv;
  const auto report = run_experiment(cfg, csv);
  REQUIRE_FALSE(report.ok());
  CHECK(report.failure->code() == Errc::NumericalInstability);
  CHECK(format_summary(report).find("invariants=violated(NumericalInstability") != std::string::npos);
}
