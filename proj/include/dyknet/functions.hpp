// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

// Per-node objective oracles: value, subgradient, proximal step, Fenchel
// conjugate, and the two-piece bundle step that maintains an affine minorant
// for nodes treated through subgradients only.
//
// Sign convention: every prox-type step returns z = s * (center - x), which
// is the subgradient certificate z in df(x) for x = argmin f + (s/2)|. - center|^2.

#pragma once

#include "dyknet/error.hpp"
#include "dyknet/kernels.hpp"
#include "dyknet/random.hpp"
#include "dyknet/real.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <variant>

namespace dyknet {

/// f(x) = gradient^T x + offset.
template <Real R>
struct AffineFunction {
  Vec<R> gradient;
  R offset = 0;

  std::size_t dimension() const noexcept { return gradient.size(); }
  R operator()(const Vec<R>& x) const { return kernels::dot(gradient, x) + offset; }
};

/// f(x) = 1/2 x^T (v v^T + r I) x + linear^T x + constant, with r > 0.
template <Real R>
struct QuadraticFunction {
  Vec<R> direction;  // v
  R ridge = 1;       // r
  Vec<R> linear;     // b
  R constant = 0;    // c

  std::size_t dimension() const noexcept { return direction.size(); }

  /// (v v^T + r I) x
  Vec<R> hessian_apply(const Vec<R>& x) const {
    Vec<R> out = x;
    kernels::scale(out, ridge);
    kernels::axpy(kernels::dot(direction, x), direction, out);
    return out;
  }

  /// Solves (v v^T + (r + shift) I) x = rhs in closed form (Sherman-Morrison).
  Vec<R> solve_shifted(const R& shift, const Vec<R>& rhs) const {
    const R diag = ridge + shift;
    const R coupling = kernels::dot(direction, rhs) / (diag + kernels::squared_norm(direction));
    Vec<R> out = rhs;
    kernels::axpy(R(-coupling), direction, out);
    kernels::scale(out, R(1 / diag));
    return out;
  }

  /// Largest Hessian eigenvalue |v|^2 + r, the gradient Lipschitz constant.
  R lipschitz() const { return kernels::squared_norm(direction) + ridge; }
};

struct ZeroFunction {
  std::size_t dimension = 0;
};

template <Real R>
using FunctionVariant = std::variant<ZeroFunction, AffineFunction<R>, QuadraticFunction<R>>;

/// Proximable nodes use the exact proximal step; subdifferentiable nodes only
/// query subgradients and keep an affine minorant.
enum class Treatment { Proximable, Subdifferentiable };

std::string_view to_string(Treatment t) noexcept;

template <Real R>
struct ObjectiveSpec {
  FunctionVariant<R> function = ZeroFunction{};
  Treatment treatment = Treatment::Proximable;

  std::size_t dimension() const {
    return std::visit(
        [](const auto& f) -> std::size_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(f)>, ZeroFunction>) {
            return f.dimension;
          } else {
            return f.dimension();
          }
        },
        function);
  }
};

template <Real R>
struct ProxResult {
  Vec<R> x;
  Vec<R> z;
};

template <Real R>
struct BundleResult {
  Vec<R> x;
  Vec<R> z;
  AffineFunction<R> model;
};

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline void check_dimension(std::size_t expected, std::size_t got, std::string_view what) {
  if (expected != got) {
    throw Error(Errc::DimensionMismatch,
                fmt::format("{}: expected dimension {}, got {}", what, expected, got));
  }
}

template <Real R>
void check_scale(const R& s) {
  if (!(s > 0)) throw Error(Errc::NonPositiveScale, fmt::format("prox scale must be positive, got {}", to_double(s)));
}

}  // namespace detail

template <Real R>
R eval(const ObjectiveSpec<R>& f, const Vec<R>& x) {
  detail::check_dimension(f.dimension(), x.size(), "eval");
  return std::visit(detail::overloaded{
                        [](const ZeroFunction&) { return R(0); },
                        [&](const AffineFunction<R>& a) { return a(x); },
                        [&](const QuadraticFunction<R>& q) {
                          return kernels::dot(q.hessian_apply(x), x) / 2 + kernels::dot(q.linear, x) +
                                 q.constant;
                        },
                    },
                    f.function);
}

template <Real R>
Vec<R> subgradient(const ObjectiveSpec<R>& f, const Vec<R>& x) {
  detail::check_dimension(f.dimension(), x.size(), "subgradient");
  return std::visit(detail::overloaded{
                        [&](const ZeroFunction&) { return Vec<R>(x.size(), R(0)); },
                        [](const AffineFunction<R>& a) { return a.gradient; },
                        [&](const QuadraticFunction<R>& q) {
                          Vec<R> g = q.hessian_apply(x);
                          kernels::axpy(R(1), q.linear, g);
                          return g;
                        },
                    },
                    f.function);
}

/// Tangent affine minorant of f at `at`: f(at) + g^T (x - at), g in df(at).
template <Real R>
AffineFunction<R> tangent(const ObjectiveSpec<R>& f, const Vec<R>& at) {
  AffineFunction<R> t{subgradient(f, at), R(0)};
  t.offset = eval(f, at) - kernels::dot(t.gradient, at);
  return t;
}

/// x = argmin f(.) + (s/2)|. - center|^2 and z = s (center - x).
template <Real R>
ProxResult<R> prox(const ObjectiveSpec<R>& f, const R& s, const Vec<R>& center) {
  detail::check_scale(s);
  detail::check_dimension(f.dimension(), center.size(), "prox");
  ProxResult<R> out;
  std::visit(detail::overloaded{
                 [&](const ZeroFunction&) { out.x = center; },
                 [&](const AffineFunction<R>& a) { out.x = kernels::lincomb(R(1), center, R(-1 / s), a.gradient); },
                 [&](const QuadraticFunction<R>& q) {
                   // (A + sI) x = s * center - b
                   out.x = q.solve_shifted(s, kernels::lincomb(s, center, R(-1), q.linear));
                 },
             },
             f.function);
  out.z = kernels::lincomb(s, center, R(-s), out.x);
  return out;
}

/// Conjugate tolerance for the affine and zero variants, whose conjugate is
/// finite at a single point only.
inline constexpr double kConjugateDomainTolerance = 1e-9;

/// f*(z) = sup_x z^T x - f(x). Throws OutsideConjugateDomain when z is not
/// the gradient of an affine (or zero) function.
template <Real R>
R conjugate_value(const ObjectiveSpec<R>& f, const Vec<R>& z) {
  detail::check_dimension(f.dimension(), z.size(), "conjugate_value");
  auto require_point = [&](const Vec<R>& a) {
    const R gap = sqrt_of(kernels::squared_distance(z, a));
    const R limit = R(kConjugateDomainTolerance) * (1 + sqrt_of(kernels::squared_norm(a)));
    if (gap > limit) {
      throw Error(Errc::OutsideConjugateDomain,
                  fmt::format("conjugate of an affine function evaluated {} away from its gradient",
                              to_double(gap)));
    }
  };
  return std::visit(detail::overloaded{
                        [&](const ZeroFunction&) {
                          require_point(Vec<R>(z.size(), R(0)));
                          return R(0);
                        },
                        [&](const AffineFunction<R>& a) {
                          require_point(a.gradient);
                          return R(-a.offset);
                        },
                        [&](const QuadraticFunction<R>& q) {
                          const Vec<R> shifted = kernels::lincomb(R(1), z, R(-1), q.linear);
                          return kernels::dot(shifted, q.solve_shifted(R(0), shifted)) / 2 - q.constant;
                        },
                    },
                    f.function);
}

/// Conjugate of an affine model at its own gradient point.
template <Real R>
R conjugate_value(const AffineFunction<R>& f, const Vec<R>& z) {
  return conjugate_value(ObjectiveSpec<R>{f, Treatment::Subdifferentiable}, z);
}

/// Exact minimizer of max{f_prev, f_tangent}(.) + (s/2)|. - center|^2.
///
/// Either one piece's unconstrained minimizer center - a_i/s is optimal (it
/// lies where that piece is the max), or the minimizer sits on the kink
/// f_prev = f_tangent, reached along the convex combination
/// a(theta) = theta a_1 + (1 - theta) a_2. The returned model is the affine
/// function z^T(. - x) + max{f_prev, f_tangent}(x), which has the same
/// minimizer and is again a minorant whenever both pieces are.
template <Real R>
BundleResult<R> bundle_prox(const AffineFunction<R>& f_prev, const AffineFunction<R>& f_tangent,
                            const R& s, const Vec<R>& center) {
  detail::check_scale(s);
  detail::check_dimension(f_prev.dimension(), center.size(), "bundle_prox (previous model)");
  detail::check_dimension(f_tangent.dimension(), center.size(), "bundle_prox (tangent)");

  const Vec<R> diff = kernels::lincomb(R(1), f_prev.gradient, R(-1), f_tangent.gradient);
  const R diff_sq = kernels::squared_norm(diff);

  BundleResult<R> out;
  if (diff_sq == 0) {
    // Parallel pieces: the max is the single affine function with the larger offset.
    out.x = kernels::lincomb(R(1), center, R(-1 / s), f_prev.gradient);
  } else {
    const auto piece_minimizer = [&](const AffineFunction<R>& piece) {
      return kernels::lincomb(R(1), center, R(-1 / s), piece.gradient);
    };
    Vec<R> candidate = piece_minimizer(f_prev);
    if (f_prev(candidate) >= f_tangent(candidate)) {
      out.x = std::move(candidate);
    } else if (candidate = piece_minimizer(f_tangent); f_tangent(candidate) >= f_prev(candidate)) {
      out.x = std::move(candidate);
    } else {
      const R numer = s * (kernels::dot(diff, center) + f_prev.offset - f_tangent.offset) -
                      kernels::dot(diff, f_tangent.gradient);
      const R theta = std::clamp(R(numer / diff_sq), R(0), R(1));
      Vec<R> g = f_tangent.gradient;
      kernels::axpy(theta, diff, g);
      out.x = kernels::lincomb(R(1), center, R(-1 / s), g);
    }
  }
  out.z = kernels::lincomb(s, center, R(-s), out.x);
  const R level = std::max(f_prev(out.x), f_tangent(out.x));
  out.model = AffineFunction<R>{out.z, level - kernels::dot(out.z, out.x)};
  return out;
}

/// Builds a quadratic with Hessian v v^T + r I, v ~ U(0,1)^m and r ~ U(0,1)
/// drawn from `rng` (v first, then r), and the linear term chosen so that the
/// gradient at the all-ones vector equals `target_gradient`; constant = 0.
template <Real R>
ObjectiveSpec<R> make_paper_quadratic(std::size_t m, const Vec<R>& target_gradient, Rng& rng,
                                      Treatment treatment = Treatment::Proximable) {
  detail::check_dimension(m, target_gradient.size(), "make_paper_quadratic");
  QuadraticFunction<R> q;
  q.direction.resize(m);
  for (auto& v : q.direction) v = R(uniform_open01(rng));
  q.ridge = R(uniform_open01(rng));
  q.linear = target_gradient;
  kernels::axpy(R(-1), q.hessian_apply(Vec<R>(m, R(1))), q.linear);
  q.constant = 0;
  return ObjectiveSpec<R>{std::move(q), treatment};
}

}  // namespace dyknet
