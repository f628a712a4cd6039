// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference computations for tests. Nothing here calls into the
// library's solvers; the point is to get the same numbers by a different road.

#pragma once

#include "dyknet/graph.hpp"
#include "dyknet/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace dyknet::testing {

using Point = std::vector<double>;
using Objective = std::function<double(const Point&)>;

/// Minimizes a convex function on R^1 or R^2 by repeated grid search: sample
/// a (2k+1)^m grid around the incumbent, move to the best node, shrink the
/// box. For convex objectives the minimizer stays inside the box as long as
/// the initial half-width covers it.
inline Point grid_minimize(const Objective& f, Point center, double half_width, int levels = 60,
                           int k = 10, double shrink = 0.35) {
  const std::size_t m = center.size();
  Point best = center;
  double best_value = f(best);
  for (int level = 0; level < levels; ++level) {
    const double h = half_width / k;
    const Point origin = best;
    if (m == 1) {
      for (int a = -k; a <= k; ++a) {
        const Point p{origin[0] + a * h};
        const double v = f(p);
        if (v < best_value) best_value = v, best = p;
      }
    } else {
      for (int a = -k; a <= k; ++a) {
        for (int b = -k; b <= k; ++b) {
          const Point p{origin[0] + a * h, origin[1] + b * h};
          const double v = f(p);
          if (v < best_value) best_value = v, best = p;
        }
      }
    }
    // Keep the box while the incumbent sits on its edge.
    const bool on_edge = std::any_of(best.begin(), best.end(), [&, i = std::size_t{0}](double x) mutable {
      return std::abs(std::abs(x - origin[i++]) - half_width) < 0.5 * h;
    });
    if (!on_edge) half_width *= shrink;
  }
  return best;
}

/// argmin_x max(<g1,x> + b1, <g2,x> + b2) + s/2 |x - c|^2, through the dual:
/// maximize over the mixing weight t in [0,1] the concave function
/// <g,c> + b - |g|^2 / (2s) with g, b the t-mixtures, by ternary search.
inline Point two_piece_prox(const Point& g1, double b1, const Point& g2, double b2, double s, const Point& c) {
  const auto mix = [&](double t) {
    Point g(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) g[k] = t * g1[k] + (1 - t) * g2[k];
    return g;
  };
  const auto phi = [&](double t) {
    const Point g = mix(t);
    double v = t * b1 + (1 - t) * b2;
    for (std::size_t k = 0; k < c.size(); ++k) v += g[k] * c[k] - g[k] * g[k] / (2 * s);
    return v;
  };
  double lo = 0, hi = 1;
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
    if (phi(a) < phi(b)) lo = a; else hi = b;
  }
  const Point g = mix(0.5 * (lo + hi));
  Point x(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) x[k] = c[k] - g[k] / s;
  return x;
}

/// Reachability closure by Floyd-Warshall; strongly connected iff every pair
/// reaches every other.
inline bool closure_strongly_connected(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = 1;
  for (const Edge& e : edges) reach[e.from][e.to] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) reach[i][j] = reach[i][j] || reach[k][j];
    }
  }
  for (const auto& row : reach) {
    if (std::find(row.begin(), row.end(), 0) != row.end()) return false;
  }
  return true;
}

/// Random strongly connected digraph: a Hamiltonian cycle through a random
/// permutation plus each remaining ordered pair with probability p_extra.
inline std::vector<Edge> random_strong_digraph(std::size_t n, double p_extra, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_open01(rng) * static_cast<double>(i));
    std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
  }
  std::vector<Edge> edges;
  std::vector<std::vector<char>> used(n, std::vector<char>(n, 0));
  if (n > 1) {
    for (std::size_t k = 0; k < n; ++k) {
      const Edge e{perm[k], perm[(k + 1) % n]};
      if (!used[e.from][e.to]) edges.push_back(e), used[e.from][e.to] = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && !used[i][j] && uniform_open01(rng) < p_extra) edges.push_back({i, j}), used[i][j] = 1;
    }
  }
  return edges;
}

/// Ordinary least-squares line fit; returns slope and R^2.
struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace dyknet::testing
