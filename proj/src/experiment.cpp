// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/experiment.hpp"

#include <fmt/format.h>

#include <memory>
#include <ostream>

namespace dyknet {

namespace {

template <Real R>
ExperimentReport run_typed(const ExperimentConfig& config, std::ostream& csv, const ExperimentOptions& options) {
  auto topology = std::make_shared<const GraphTopology>(build_topology(config));
  auto problem = std::make_shared<const Problem<R>>(build_problem<R>(config));
  const ReferenceSolution<R> ref = solve_centralized(*problem);
  Scheduler scheduler(build_policy(config, options.base_dir), topology);
  SimState<R> state = initialize<R>(topology, problem);

  RunOptions run_options;
  run_options.rounds = config.rounds;
  run_options.cadence = config.cadence;
  run_options.check_invariants = options.check_invariants;
  run_options.record_events = true;

  ExperimentReport report;
  csv << kCsvHeader << '\n';
  const MetricsSink sink = [&](const MetricsRecord& rec) {
    csv << format_csv_row(rec) << '\n';
    report.last = rec;
  };

  MetricsLog log;
  try {
    log = run(state, scheduler, ref, run_options, sink);
  } catch (const InvariantError& e) {
    report.failure = e;
    report.failed_event = e.event_index();
  } catch (const Error& e) {
    report.failure = e;
    report.failed_event = state.event_count() + 1;
  }
  // A failing round was generated but not completed; an exhausted trace fails before generating one.
  const bool partial_round = report.failure && report.failure->code() != Errc::TraceExhausted;
  report.rounds_completed = scheduler.rounds_generated() - (partial_round ? 1 : 0);
  report.events = state.event_count();
  if (!report.failure) report.window = check_delivery_window(log.events, *topology);
  if (options.trace_out != nullptr) write_trace(*options.trace_out, log.events);
  if (!csv) throw Error(Errc::Io, "failed writing metrics");
  return report;
}

}  // namespace

std::string format_csv_row(const MetricsRecord& r) {
  return fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", r.round, r.event_count,
                     r.dual_surrogate, r.duality_gap, r.s_weighted_error, r.consensus_residual, r.weight_residual,
                     r.mass_residual);
}

ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream& csv,
                                const ExperimentOptions& options) {
  validate_config(config);
  if (config.precision == Precision::Extended) return run_typed<extended>(config, csv, options);
  return run_typed<double>(config, csv, options);
}

std::string format_summary(const ExperimentReport& r) {
  const std::string gap = r.last ? fmt::format("{:.17g}", r.last->duality_gap) : std::string("nan");
  std::string k = "n/a";
  if (r.ok()) k = r.window.max_window ? fmt::format("{}", *r.window.max_window) : std::string("unbounded");
  std::string status = "ok";
  if (r.failure) {
    status = fmt::format("violated({} at event {}: {})", to_string(r.failure->code()), r.failed_event.value_or(0),
                         r.failure->what());
  }
  return fmt::format("rounds={} events={} final_gap={} empirical_K={} invariants={}", r.rounds_completed, r.events,
                     gap, k, status);
}

}  // namespace dyknet
