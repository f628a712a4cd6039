// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

// Dense vector kernels used by every per-node update and metric.
//
// Each kernel has a scalar reference version, written once as a template so
// it also serves the extended-precision type, and for double a SIMD variant
// selected at runtime from the CPU feature set. The reference versions are
// the ground truth; the SIMD ones are equivalence-tested against them.

#pragma once

#include "dyknet/real.hpp"

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>
#include <type_traits>

namespace dyknet::kernels {

namespace reference {

template <Real R>
R dot(std::span<const R> a, std::span<const R> b) {
  assert(a.size() == b.size());
  R acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

template <Real R>
R squared_norm(std::span<const R> a) {
  R acc = 0;
  for (const R& v : a) acc += v * v;
  return acc;
}

template <Real R>
R squared_distance(std::span<const R> a, std::span<const R> b) {
  assert(a.size() == b.size());
  R acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const R d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

// y += alpha * x
template <Real R>
void axpy(R alpha, std::span<const R> x, std::span<R> y) {
  assert(x.size() == y.size());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

template <Real R>
void scale(std::span<R> x, R alpha) {
  for (R& v : x) v *= alpha;
}

// out = alpha * x + beta * y
template <Real R>
void lincomb(R alpha, std::span<const R> x, R beta, std::span<const R> y, std::span<R> out) {
  assert(x.size() == y.size() && x.size() == out.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = alpha * x[k] + beta * y[k];
}

}  // namespace reference

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b) noexcept;

/// True when the running CPU can execute the AVX2/FMA variants.
bool avx2_supported() noexcept;

/// Backend used for double kernels. Chosen once from the CPU features; the
/// environment variable DYKNET_SIMD=scalar forces the reference path.
Backend active_backend() noexcept;

/// Overrides the backend (tests and benchmarks). Requesting Avx2 on a CPU
/// without it falls back to Scalar. Returns the backend actually installed.
Backend set_backend(Backend b) noexcept;

class ScopedBackend {
 public:
  explicit ScopedBackend(Backend b) : previous_(active_backend()) { set_backend(b); }
  ~ScopedBackend() { set_backend(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

namespace detail {

struct DoubleTable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*squared_norm)(const double*, std::size_t);
  double (*squared_distance)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
  void (*lincomb)(double, const double*, double, const double*, double*, std::size_t);
};

const DoubleTable& table() noexcept;

}  // namespace detail

template <Real R>
R dot(std::span<const R> a, std::span<const R> b) {
  assert(a.size() == b.size());
  if constexpr (std::is_same_v<R, double>) {
    return detail::table().dot(a.data(), b.data(), a.size());
  } else {
    return reference::dot(a, b);
  }
}

template <Real R>
R squared_norm(std::span<const R> a) {
  if constexpr (std::is_same_v<R, double>) {
    return detail::table().squared_norm(a.data(), a.size());
  } else {
    return reference::squared_norm(a);
  }
}

template <Real R>
R squared_distance(std::span<const R> a, std::span<const R> b) {
  assert(a.size() == b.size());
  if constexpr (std::is_same_v<R, double>) {
    return detail::table().squared_distance(a.data(), b.data(), a.size());
  } else {
    return reference::squared_distance(a, b);
  }
}

template <Real R>
void axpy(R alpha, std::span<const R> x, std::span<R> y) {
  assert(x.size() == y.size());
  if constexpr (std::is_same_v<R, double>) {
    detail::table().axpy(alpha, x.data(), y.data(), x.size());
  } else {
    reference::axpy(alpha, x, y);
  }
}

template <Real R>
void scale(std::span<R> x, R alpha) {
  if constexpr (std::is_same_v<R, double>) {
    detail::table().scale(x.data(), alpha, x.size());
  } else {
    reference::scale(x, alpha);
  }
}

template <Real R>
void lincomb(R alpha, std::span<const R> x, R beta, std::span<const R> y, std::span<R> out) {
  assert(x.size() == y.size() && x.size() == out.size());
  if constexpr (std::is_same_v<R, double>) {
    detail::table().lincomb(alpha, x.data(), beta, y.data(), out.data(), x.size());
  } else {
    reference::lincomb(alpha, x, beta, y, out);
  }
}

// Convenience overloads so callers can pass Vec<R> directly.
template <Real R>
R dot(const Vec<R>& a, const Vec<R>& b) {
  return dot(std::span<const R>(a), std::span<const R>(b));
}
template <Real R>
R squared_norm(const Vec<R>& a) {
  return squared_norm(std::span<const R>(a));
}
template <Real R>
R squared_distance(const Vec<R>& a, const Vec<R>& b) {
  return squared_distance(std::span<const R>(a), std::span<const R>(b));
}
template <Real R>
void axpy(R alpha, const Vec<R>& x, Vec<R>& y) {
  axpy(alpha, std::span<const R>(x), std::span<R>(y));
}
template <Real R>
void scale(Vec<R>& x, R alpha) {
  scale(std::span<R>(x), alpha);
}
template <Real R>
Vec<R> lincomb(R alpha, const Vec<R>& x, R beta, const Vec<R>& y) {
  Vec<R> out(x.size());
  lincomb(alpha, std::span<const R>(x), beta, std::span<const R>(y), std::span<R>(out));
  return out;
}

}  // namespace dyknet::kernels
