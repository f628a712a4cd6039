// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

// Small builders shared by the unit and acceptance tests.

#pragma once

#include "dyknet/config.hpp"
#include "dyknet/functions.hpp"
#include "dyknet/graph.hpp"
#include "dyknet/protocol.hpp"
#include "oracles.hpp"

#include <memory>
#include <vector>

namespace dyknet::testing {

inline std::vector<Edge> two_cycle_edges() {
  return {{0, 1}, {1, 2}, {2, 4}, {4, 0}, {1, 3}, {3, 5}, {5, 1}};
}

template <Real R = double>
SimState<R> make_state(std::size_t n, std::vector<Edge> edges, std::vector<ObjectiveSpec<R>> objectives,
                       std::vector<Vec<R>> xbar) {
  auto g = std::make_shared<const GraphTopology>(GraphTopology::build(n, std::move(edges)));
  const std::size_t m = xbar.front().size();
  auto p = std::make_shared<const Problem<R>>(make_problem<R>(m, std::move(objectives), std::move(xbar)));
  return initialize<R>(g, p);
}

template <Real R = double>
SimState<R> make_state_from_config(const ExperimentConfig& cfg) {
  auto g = std::make_shared<const GraphTopology>(build_topology(cfg));
  auto p = std::make_shared<const Problem<R>>(build_problem<R>(cfg));
  return initialize<R>(g, p);
}

/// Random problem on a random strongly connected graph: a mix of zero,
/// affine and seeded quadratic functions, each node proximable or not.
inline ExperimentConfig random_config(std::size_t n, std::size_t m, Rng& rng) {
  ExperimentConfig c;
  c.dimension = m;
  for (std::size_t i = 0; i < n; ++i) {
    NodeSpec node;
    node.id = i + 1;
    node.treatment = uniform_open01(rng) < 0.5 ? Treatment::Proximable : Treatment::Subdifferentiable;
    const double kind = uniform_open01(rng);
    std::vector<double> vec(m);
    for (double& v : vec) v = uniform_open(rng, -1, 1);
    if (kind < 0.2) {
      node.function = ZeroSpec{};
    } else if (kind < 0.35) {
      node.function = AffineSpec{vec, uniform_open(rng, -1, 1)};
    } else {
      node.function = QuadraticSeededSpec{rng(), vec};
    }
    node.xbar.resize(m);
    for (double& v : node.xbar) v = uniform_open(rng, -2, 2);
    c.nodes.push_back(std::move(node));
  }
  for (const Edge& e : random_strong_digraph(n, 0.3, rng)) c.edges.emplace_back(e.from + 1, e.to + 1);
  return c;
}

}  // namespace dyknet::testing
