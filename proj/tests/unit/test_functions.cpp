// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyknet/error.hpp"
#include "dyknet/functions.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace dyknet;
using Catch::Approx;

namespace {

using Q = QuadraticFunction<double>;
using A = AffineFunction<double>;
using Spec = ObjectiveSpec<double>;

Spec quad(Vec<double> v, double r, Vec<double> b, double c = 0) {
  return Spec{Q{std::move(v), r, std::move(b), c}, Treatment::Proximable};
}

Vec<double> random_point(std::size_t m, Rng& rng, double lo = -2, double hi = 2) {
  Vec<double> x(m);
  for (double& v : x) v = uniform_open(rng, lo, hi);
  return x;
}

Spec random_quadratic(std::size_t m, Rng& rng) {
  Vec<double> v(m), b(m);
  for (double& x : v) x = uniform_open01(rng);
  for (double& x : b) x = uniform_open(rng, -1, 1);
  return quad(v, uniform_open(rng, 0.05, 1.0), b, uniform_open(rng, -1, 1));
}

double max_abs_diff(const Vec<double>& a, const Vec<double>& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace

TEST_CASE("eval hand examples", "[functions]") {
  CHECK(eval(Spec{ZeroFunction{3}}, Vec<double>{1, 2, 3}) == 0.0);
  CHECK(eval(quad({1}, 1, {0}), Vec<double>{1}) == Approx(1.0));
  CHECK(eval(Spec{A{{2, 0}, 3}}, Vec<double>{1, 5}) == Approx(5.0));
  CHECK_THROWS_AS(eval(Spec{ZeroFunction{2}}, Vec<double>{1}), Error);
}

TEST_CASE("subgradient hand examples", "[functions]") {
  CHECK(subgradient(Spec{ZeroFunction{2}}, Vec<double>{4, 5}) == Vec<double>{0, 0});
  CHECK(subgradient(quad({1}, 1, {1}), Vec<double>{2})[0] == Approx(5.0));
  CHECK(subgradient(Spec{A{{2, -1}, 3}}, Vec<double>{7, 7}) == Vec<double>{2, -1});
}

TEST_CASE("prox hand examples", "[functions]") {
  const auto zero = prox(Spec{ZeroFunction{1}}, 1.0, Vec<double>{2});
  CHECK(zero.x == Vec<double>{2});
  CHECK(zero.z == Vec<double>{0});

  const auto half_square = prox(quad({0}, 1, {0}), 1.0, Vec<double>{2});
  CHECK(half_square.x[0] == Approx(1.0));
  CHECK(half_square.z[0] == Approx(1.0));

  CHECK_THROWS_AS(prox(quad({0}, 1, {0}), 0.0, Vec<double>{2}), Error);
  try {
    (void)prox(quad({0}, 1, {0}), -1.0, Vec<double>{2});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonPositiveScale);
  }
}

TEST_CASE("conjugate hand examples", "[functions]") {
  CHECK(conjugate_value(Spec{ZeroFunction{1}}, Vec<double>{0}) == 0.0);
  CHECK(conjugate_value(quad({0}, 1, {0}), Vec<double>{3}) == Approx(4.5));
  CHECK(conjugate_value(Spec{A{{1}, 2}}, Vec<double>{1}) == Approx(-2.0));
  try {
    (void)conjugate_value(Spec{A{{1}, 2}}, Vec<double>{1.5});
    FAIL("expected OutsideConjugateDomain");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OutsideConjugateDomain);
  }
  CHECK_THROWS_AS(conjugate_value(Spec{ZeroFunction{1}}, Vec<double>{1e-3}), Error);
  // Within the domain tolerance.
  CHECK(conjugate_value(Spec{A{{1}, 2}}, Vec<double>{1 + 1e-12}) == Approx(-2.0));
}

TEST_CASE("conjugate matches a brute-force supremum", "[functions][oracle]") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + trial % 2;
    const Spec f = random_quadratic(m, rng);
    const Vec<double> z = random_point(m, rng);
    // f*(z) = -min_x f(x) - z^T x.
    const auto neg = [&](const testing::Point& x) { return eval(f, x) - kernels::dot(z, Vec<double>(x)); };
    const auto xs = testing::grid_minimize(neg, testing::Point(m, 0.0), 64.0);
    CHECK(conjugate_value(f, z) == Approx(-neg(xs)).margin(1e-9));
  }
}

TEST_CASE("bundle_prox hand examples", "[functions]") {
  const A up{{1}, 0};
  const auto same = bundle_prox(up, up, 1.0, Vec<double>{0});
  CHECK(same.x[0] == Approx(-1.0));
  CHECK(same.z[0] == Approx(1.0));
  CHECK(same.model.gradient[0] == Approx(1.0));

  const auto kink = bundle_prox(A{{1}, 0}, A{{-1}, 0}, 1.0, Vec<double>{0});
  CHECK(kink.x[0] == Approx(0.0).margin(1e-15));
  CHECK(kink.z[0] == Approx(0.0).margin(1e-15));
  CHECK(kink.model.gradient[0] == Approx(0.0).margin(1e-15));
  CHECK(kink.model.offset == Approx(0.0).margin(1e-15));

  const auto flat = bundle_prox(A{{0}, 0}, A{{1}, -10}, 1.0, Vec<double>{0});
  CHECK(flat.x[0] == Approx(0.0));
  CHECK(flat.z[0] == Approx(0.0));
}

TEST_CASE("bundle_prox with parallel pieces keeps the higher offset", "[functions]") {
  const auto r = bundle_prox(A{{2, 1}, -1}, A{{2, 1}, 3}, 2.0, Vec<double>{1, 1});
  CHECK(r.x[0] == Approx(0.0));
  CHECK(r.x[1] == Approx(0.5));
  CHECK(r.model.offset == Approx(3.0));
}

TEST_CASE("prox and bundle_prox match the grid oracle", "[functions][oracle]") {
  Rng rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 1 + trial % 2;
    INFO("trial " << trial << ", m = " << m);
    const Spec f = random_quadratic(m, rng);
    const double s = uniform_open(rng, 0.2, 5.0);
    const Vec<double> c = random_point(m, rng);

    const auto got = prox(f, s, c);
    const auto obj = [&](const testing::Point& x) {
      return eval(f, x) + s / 2 * kernels::squared_distance(Vec<double>(x), c);
    };
    CHECK(max_abs_diff(got.x, testing::grid_minimize(obj, c, 32.0)) <= 1e-6);

    const A f1 = tangent(f, random_point(m, rng));
    const A f2 = tangent(f, random_point(m, rng));
    const auto b = bundle_prox(f1, f2, s, c);
    const auto bobj = [&](const testing::Point& x) {
      const Vec<double> v(x);
      return std::max(f1(v), f2(v)) + s / 2 * kernels::squared_distance(v, c);
    };
    // Grid search stalls on the kink in 2D; use the dual line search there.
    const testing::Point want = m == 1 ? testing::grid_minimize(bobj, c, 32.0)
                                       : testing::two_piece_prox(f1.gradient, f1.offset, f2.gradient, f2.offset, s, c);
    CHECK(max_abs_diff(b.x, want) <= 1e-6);
  }
}

TEST_CASE("bundle model is a minorant and certifies the step", "[functions][property]") {
  Rng rng(808);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + trial % 4;
    const Spec f = random_quadratic(m, rng);
    const A f_prev = tangent(f, random_point(m, rng));
    const double s = uniform_open(rng, 0.1, 4.0);
    const Vec<double> c = random_point(m, rng);
    const auto first = prox(Spec{f_prev}, s, c);
    const A f_tan = tangent(f, first.x);
    const auto b = bundle_prox(f_prev, f_tan, s, c);

    // z = s (c - x)
    for (std::size_t k = 0; k < m; ++k) CHECK(b.z[k] == Approx(s * (c[k] - b.x[k])).margin(1e-12));
    // the model touches max{f_prev, f_tan} at x
    CHECK(b.model(b.x) == Approx(std::max(f_prev(b.x), f_tan(b.x))).margin(1e-12));
    for (int probe = 0; probe < 100; ++probe) {
      const Vec<double> y = random_point(m, rng, -5, 5);
      REQUIRE(b.model(y) <= eval(f, y) + 1e-9);
      // z in the subdifferential of max{f_prev, f_tan} at x
      REQUIRE(std::max(f_prev(y), f_tan(y)) >= b.model(b.x) + kernels::dot(b.z, kernels::lincomb(1.0, y, -1.0, b.x)) - 1e-9);
    }
  }
}

TEST_CASE("prox certificate: z is a subgradient at x", "[functions][property]") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + trial % 5;
    const Spec f = random_quadratic(m, rng);
    const double s = uniform_open(rng, 0.1, 4.0);
    const auto r = prox(f, s, random_point(m, rng));
    const double fx = eval(f, r.x);
    for (int probe = 0; probe < 100; ++probe) {
      const Vec<double> y = random_point(m, rng, -5, 5);
      REQUIRE(eval(f, y) >= fx + kernels::dot(r.z, kernels::lincomb(1.0, y, -1.0, r.x)) - 1e-9);
    }
  }
}

TEST_CASE("make_paper_quadratic hits the target gradient at ones", "[functions]") {
  Rng rng(11);
  const Vec<double> target{0.3, -0.2, 0.7, 0.1, 0.0, 0.9};
  const Spec f = make_paper_quadratic<double>(6, target, rng);
  const auto& q = std::get<Q>(f.function);
  CHECK(q.ridge > 0.0);
  CHECK(q.ridge < 1.0);
  for (double v : q.direction) CHECK((v > 0.0 && v < 1.0));
  CHECK(q.constant == 0.0);
  const auto g = subgradient(f, Vec<double>(6, 1.0));
  for (std::size_t k = 0; k < 6; ++k) CHECK(g[k] == Approx(target[k]).margin(1e-14));
  CHECK(q.lipschitz() == Approx(kernels::squared_norm(q.direction) + q.ridge));
}

TEST_CASE("make_paper_quadratic gives zero linear term when the target is A*ones", "[functions]") {
  Rng probe(12);
  Vec<double> v(3);
  for (double& x : v) x = uniform_open01(probe);
  const double r = uniform_open01(probe);
  const Q shape{v, r, Vec<double>(3, 0.0), 0};
  Rng rng(12);
  const Spec f = make_paper_quadratic<double>(3, shape.hessian_apply(Vec<double>(3, 1.0)), rng);
  for (double b : std::get<Q>(f.function).linear) CHECK(b == Approx(0.0).margin(1e-15));
}

TEST_CASE("the subproblem gap ratio obeys the linear-decrease bound", "[functions][property]") {
  Rng rng(2501);
  int informative = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + trial % 6;
    const Spec f = random_quadratic(m, rng);
    const double lip = std::get<Q>(f.function).lipschitz();
    const double s = uniform_open(rng, 0.1, 5.0);
    const Vec<double> c = random_point(m, rng);
    const auto dual = [&](double conj, const Vec<double>& z) {
      const Vec<double> w = kernels::lincomb(1.0 / s, z, -1.0, c);
      return -conj + s / 2 * kernels::squared_norm(c) - s / 2 * kernels::squared_norm(w);
    };
    const auto opt = prox(f, s, c);
    const double v_star = eval(f, opt.x) + s / 2 * kernels::squared_distance(opt.x, c);

    const A f1 = tangent(f, random_point(m, rng, -4, 4));
    const auto step1 = prox(Spec{f1}, s, c);
    const double alpha1 = v_star - dual(-f1.offset, step1.z);
    const auto step2 = bundle_prox(f1, tangent(f, step1.x), s, c);
    const double alpha2 = v_star - dual(-step2.model.offset, step2.z);

    CHECK(alpha1 >= -1e-12);
    CHECK(alpha2 >= -1e-12);
    if (alpha1 <= 1e-12) continue;
    ++informative;
    const double ratio = alpha2 / alpha1;
    CHECK(ratio * ratio / (4 * (lip / s + 1)) + ratio <= 1 + 1e-8);
  }
  CHECK(informative > 90);
}
