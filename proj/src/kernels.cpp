// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/kernels.hpp"

#include "kernels_avx2.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace dyknet::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  return reference::dot<double>({a, n}, {b, n});
}
double squared_norm_scalar(const double* a, std::size_t n) {
  return reference::squared_norm<double>({a, n});
}
double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  return reference::squared_distance<double>({a, n}, {b, n});
}
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  reference::axpy<double>(alpha, {x, n}, {y, n});
}
void scale_scalar(double* x, double alpha, std::size_t n) {
  reference::scale<double>({x, n}, alpha);
}
void lincomb_scalar(double alpha, const double* x, double beta, const double* y, double* out,
                    std::size_t n) {
  reference::lincomb<double>(alpha, {x, n}, beta, {y, n}, {out, n});
}

constexpr detail::DoubleTable kScalarTable{dot_scalar,   squared_norm_scalar, squared_distance_scalar,
                                           axpy_scalar,  scale_scalar,        lincomb_scalar};

#if DYKNET_HAVE_AVX2
constexpr detail::DoubleTable kAvx2Table{avx2::dot,  avx2::squared_norm, avx2::squared_distance,
                                         avx2::axpy, avx2::scale,        avx2::lincomb};
#endif

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("DYKNET_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Backend::Scalar;
  }
  return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& backend_slot() noexcept {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

}  // namespace

std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool avx2_supported() noexcept {
#if DYKNET_HAVE_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported;
#else
  return false;
#endif
}

Backend active_backend() noexcept { return backend_slot().load(std::memory_order_relaxed); }

Backend set_backend(Backend b) noexcept {
  if (b == Backend::Avx2 && !avx2_supported()) b = Backend::Scalar;
  backend_slot().store(b, std::memory_order_relaxed);
  return b;
}

namespace detail {

const DoubleTable& table() noexcept {
#if DYKNET_HAVE_AVX2
  if (active_backend() == Backend::Avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

}  // namespace detail

}  // namespace dyknet::kernels
