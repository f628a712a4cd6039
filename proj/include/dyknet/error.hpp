// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dyknet {

enum class Errc {
  // graph
  SelfLoop,
  DuplicateEdge,
  InvalidEndpoint,
  NotStronglyConnected,
  InvalidNode,
  InvalidEdge,
  // functions
  DimensionMismatch,
  NonPositiveScale,
  OutsideConjugateDomain,
  // protocol / simulation
  NumericalInstability,
  InvariantViolation,
  TraceExhausted,
  SingularSystem,
  // configuration and io
  ParseError,
  ValidationError,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// message names the offending element (node, edge, field, event index).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised by the simulation driver when a checked invariant fails.
class InvariantError : public Error {
 public:
  InvariantError(std::size_t event_index, const std::string& what)
      : Error(Errc::InvariantViolation, what), event_index_(event_index) {}

  std::size_t event_index() const noexcept { return event_index_; }

 private:
  std::size_t event_index_;
};

}  // namespace dyknet
