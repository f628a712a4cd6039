// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dyknet/config.hpp"
#include "dyknet/error.hpp"
#include "dyknet/metrics.hpp"
#include "dyknet/scheduler.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace dyknet {

inline constexpr std::string_view kCsvHeader =
    "round,event_count,dual_surrogate,duality_gap,s_weighted_error,consensus_residual,weight_residual,"
    "mass_residual";

/// One CSV data row, floats with 17 significant digits, no line terminator.
std::string format_csv_row(const MetricsRecord& rec);

struct ExperimentOptions {
  /// Base directory for relative trace paths.
  std::filesystem::path base_dir;
  bool check_invariants = true;
  /// Receives every executed event in order, for trace recording.
  std::ostream* trace_out = nullptr;
};

struct ExperimentReport {
  std::size_t rounds_completed = 0;
  std::size_t events = 0;
  std::optional<MetricsRecord> last;
  DeliveryWindow window;
  /// Set when the run stopped early on a simulation error.
  std::optional<Error> failure;
  std::optional<std::size_t> failed_event;

  bool ok() const noexcept { return !failure.has_value(); }
};

/// Builds the state from the config, runs the scheduler and streams the CSV
/// (header plus one row per record) to `csv`. Simulation errors, invariant
/// violations included, stop the run and land in the report; rows written
/// before the failure stay in the stream. Config and I/O problems throw.
ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream& csv,
                                const ExperimentOptions& options = {});

/// "final_gap=... empirical_K=... invariants=ok" style one-liner.
std::string format_summary(const ExperimentReport& report);

}  // namespace dyknet
