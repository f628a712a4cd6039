// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#if DYKNET_HAVE_AVX2

// Built in a translation unit compiled with -mavx2 -mfma. Only call these
// after avx2_supported() returned true.
namespace dyknet::kernels::avx2 {

double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double* x, double alpha, std::size_t n);
void lincomb(double alpha, const double* x, double beta, const double* y, double* out, std::size_t n);

}  // namespace dyknet::kernels::avx2

#endif
