// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/error.hpp"
#include "dyknet/functions.hpp"
#include "dyknet/real.hpp"

#include <string>

namespace dyknet {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::InvalidEndpoint: return "InvalidEndpoint";
    case Errc::NotStronglyConnected: return "NotStronglyConnected";
    case Errc::InvalidNode: return "InvalidNode";
    case Errc::InvalidEdge: return "InvalidEdge";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonPositiveScale: return "NonPositiveScale";
    case Errc::OutsideConjugateDomain: return "OutsideConjugateDomain";
    case Errc::NumericalInstability: return "NumericalInstability";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::TraceExhausted: return "TraceExhausted";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(Precision p) noexcept {
  return p == Precision::Double ? "double" : "extended";
}

Precision parse_precision(std::string_view text) {
  if (text == "double") return Precision::Double;
  if (text == "extended") return Precision::Extended;
  throw Error(Errc::ValidationError,
              "precision must be \"double\" or \"extended\", got \"" + std::string(text) + "\"");
}

std::string_view to_string(Treatment t) noexcept {
  return t == Treatment::Proximable ? "proximable" : "subdifferentiable";
}

}  // namespace dyknet
