// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <concepts>
#include <string_view>
#include <type_traits>
#include <vector>

namespace dyknet {

/// 384-bit binary float (about 115 decimal digits). Used to observe the
/// asymptotic convergence rate well past the point where double runs into
/// its rounding floor.
using extended = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<384, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

template <class T>
concept Real = std::same_as<T, double> || std::same_as<T, extended>;

template <Real R>
using Vec = std::vector<R>;

enum class Precision { Double, Extended };

std::string_view to_string(Precision p) noexcept;
Precision parse_precision(std::string_view text);

template <Real R>
inline double to_double(const R& v) {
  if constexpr (std::is_same_v<R, double>) {
    return v;
  } else {
    return v.template convert_to<double>();
  }
}

template <Real R>
inline R abs_of(const R& v) {
  using std::abs;
  return abs(v);
}

template <Real R>
inline R sqrt_of(const R& v) {
  using std::sqrt;
  return sqrt(v);
}

template <Real R>
Vec<R> to_real(const std::vector<double>& v) {
  return Vec<R>(v.begin(), v.end());
}

}  // namespace dyknet
