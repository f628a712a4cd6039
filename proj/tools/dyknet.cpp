// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

// dyknet: run, generate, check and solve distributed Dykstra experiments.
//
// Exit codes: 0 success, 1 usage or unexpected error, 2 config error,
// 3 invariant violation or numerical failure, 4 I/O error.

#include "dyknet/config.hpp"
#include "dyknet/error.hpp"
#include "dyknet/experiment.hpp"
#include "dyknet/kernels.hpp"
#include "dyknet/metrics.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

namespace fs = std::filesystem;
using namespace dyknet;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitIo = 4;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::Io: return kExitIo;
    case Errc::InvariantViolation:
    case Errc::NumericalInstability:
    case Errc::OutsideConjugateDomain:
    case Errc::NonPositiveScale: return kExitInvariant;
    default: return kExitConfig;
  }
}

struct RunArgs {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> rounds;
  std::optional<double> p_deliver;
  std::optional<std::string> precision;
  std::optional<std::string> cadence;
  std::optional<std::string> trace_out;
  bool no_check = false;
};

int cmd_run(const RunArgs& a) {
  ExperimentConfig cfg = load_config_file(a.config);
  if (a.seed) cfg.schedule.seed = *a.seed;
  if (a.rounds) cfg.rounds = *a.rounds;
  if (a.p_deliver) cfg.schedule.p_deliver = *a.p_deliver;
  if (a.precision) cfg.precision = parse_precision(*a.precision);
  if (a.cadence) {
    if (*a.cadence == "round") {
      cfg.cadence = Cadence::PerRound;
    } else if (*a.cadence == "event") {
      cfg.cadence = Cadence::PerEvent;
    } else {
      throw Error(Errc::ValidationError, "cadence must be \"round\" or \"event\"");
    }
  }
  if (a.out) cfg.output = *a.out;
  validate_config(cfg);

  ExperimentOptions options;
  options.base_dir = fs::path(a.config).parent_path();
  options.check_invariants = !a.no_check;

  std::ofstream trace_file;
  if (a.trace_out) {
    trace_file.open(*a.trace_out, std::ios::binary);
    if (!trace_file) throw Error(Errc::Io, fmt::format("cannot write trace file '{}'", *a.trace_out));
    options.trace_out = &trace_file;
  }

  ExperimentReport report;
  if (cfg.output && *cfg.output != "-") {
    std::ofstream csv(*cfg.output, std::ios::binary);
    if (!csv) throw Error(Errc::Io, fmt::format("cannot write CSV file '{}'", *cfg.output));
    report = run_experiment(cfg, csv, options);
    csv.close();
    if (!csv) throw Error(Errc::Io, fmt::format("failed writing '{}'", *cfg.output));
    std::cout << format_summary(report) << '\n';
  } else {
    report = run_experiment(cfg, std::cout, options);
    std::cerr << format_summary(report) << '\n';
  }
  if (trace_file.is_open() && !trace_file.flush()) throw Error(Errc::Io, "failed writing trace");
  return report.ok() ? kExitOk : exit_code_for(report.failure->code());
}

int cmd_preset(const std::string& mode, std::uint64_t seed, const std::optional<std::string>& out) {
  const ExperimentConfig cfg = preset_paper_sec4(seed, parse_preset_mode(mode));
  const std::string text = emit_config(cfg);
  if (!out || *out == "-") {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream f(*out, std::ios::binary);
  if (!f || !(f << text) || !f.flush()) throw Error(Errc::Io, fmt::format("cannot write '{}'", *out));
  return kExitOk;
}

int cmd_check(const std::string& path) {
  const ExperimentConfig cfg = load_config_file(path);
  if (cfg.schedule.policy == PolicyKind::Trace) {
    const GraphTopology g = build_topology(cfg);
    validate_policy(build_policy(cfg, fs::path(path).parent_path()), g);
  }
  std::cout << fmt::format("ok: {} nodes, {} edges, dimension {}, strongly connected\n", cfg.nodes.size(),
                           cfg.edges.size(), cfg.dimension);
  return kExitOk;
}

template <Real R>
void print_solution(const ExperimentConfig& cfg) {
  const Problem<R> problem = build_problem<R>(cfg);
  const ReferenceSolution<R> ref = solve_centralized(problem);
  std::cout << "x_star";
  for (const R& v : ref.x_star) std::cout << fmt::format(" {:.17g}", to_double(v));
  std::cout << fmt::format("\nprimal_value {:.17g}\noptimality_residual {:.3e}\n", to_double(ref.primal_value),
                           to_double(ref.optimality_residual));
}

int cmd_solve(const std::string& path, const std::optional<std::string>& precision) {
  ExperimentConfig cfg = load_config_file(path);
  if (precision) cfg.precision = parse_precision(*precision);
  if (cfg.precision == Precision::Extended) {
    print_solution<extended>(cfg);
  } else {
    print_solution<double>(cfg);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual Dykstra simulator for directed networks with unreliable links"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dyknet 0.1.0");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment and write the metrics CSV");
  run->add_option("--config", run_args.config, "Config JSON")->required();
  run->add_option("--out", run_args.out, "CSV output path ('-' for stdout)");
  run->add_option("--seed", run_args.seed, "Override schedule.seed");
  run->add_option("--rounds", run_args.rounds, "Override rounds");
  run->add_option("--p-deliver", run_args.p_deliver, "Override schedule.p_deliver");
  run->add_option("--precision", run_args.precision, "double or extended")
      ->check(CLI::IsMember({"double", "extended"}));
  run->add_option("--cadence", run_args.cadence, "round or event")->check(CLI::IsMember({"round", "event"}));
  run->add_option("--trace-out", run_args.trace_out, "Record the executed events as a trace file");
  run->add_flag("--no-check", run_args.no_check, "Skip per-event invariant checks");

  std::string preset_mode = "prox";
  std::uint64_t preset_seed = 0;
  std::optional<std::string> preset_out;
  auto* preset = app.add_subcommand("preset", "Generate a preset config");
  preset->require_subcommand(1);
  auto* sec4 = preset->add_subcommand("paper-sec4", "Six-node, two-cycle quadratic experiment");
  sec4->add_option("--mode", preset_mode, "prox or subdiff")->check(CLI::IsMember({"prox", "subdiff"}));
  sec4->add_option("--seed", preset_seed, "Generator seed");
  sec4->add_option("--out", preset_out, "Output path ('-' for stdout)");

  std::string check_path;
  auto* check = app.add_subcommand("check", "Validate a config and its graph");
  check->add_option("--config", check_path, "Config JSON")->required();

  std::string solve_path;
  std::optional<std::string> solve_precision;
  auto* solve = app.add_subcommand("solve", "Print the centralized reference solution");
  solve->add_option("--config", solve_path, "Config JSON")->required();
  solve->add_option("--precision", solve_precision, "double or extended")
      ->check(CLI::IsMember({"double", "extended"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*sec4) return cmd_preset(preset_mode, preset_seed, preset_out);
    if (*check) return cmd_check(check_path);
    if (*solve) return cmd_solve(solve_path, solve_precision);
  } catch (const Error& e) {
    std::cerr << "dyknet: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "dyknet: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
