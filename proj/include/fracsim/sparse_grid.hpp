// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "fracsim/quadrature.hpp"

namespace fracsim {

/// Isotropic Smolyak sparse grid over a nested 1D family: the union of
/// tensor grids with |i|_1 <= level, with the classical combination
/// coefficients. Nodes are deduplicated across tensor terms (the nesting
/// makes shared nodes bit-identical).
struct SparseGrid {
  QuadRule rule = QuadRule::gauss_patterson;
  int dim = 0;
  int level = 0;
  std::vector<std::vector<double>> nodes;  // M x dim
  std::vector<double> weights;             // combined Smolyak weights (sum 1)

  struct Term {
    std::vector<int> levels;   // per-dimension 1D level
    double coeff = 0.0;        // combination coefficient
    std::vector<int> node_ids; // tensor nodes in lexicographic order -> global ids
  };
  std::vector<Term> terms;  // only terms with nonzero coefficient

  int n_nodes() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

template <typename F>
inline void for_each_multi_index(int dim, int max_sum, F&& f) {
  std::vector<int> idx(static_cast<size_t>(dim), 0);
  while (true) {
    int sum = 0;
    for (int v : idx) sum += v;
    if (sum <= max_sum) f(idx);
    // advance with pruning: indices summing above max_sum are skipped wholesale
    int d = 0;
    while (d < dim) {
      ++idx[static_cast<size_t>(d)];
      sum = 0;
      for (int v : idx) sum += v;
      if (sum <= max_sum) break;
      idx[static_cast<size_t>(d)] = 0;
      ++d;
    }
    if (d == dim) return;
  }
}

}  // namespace detail

inline SparseGrid build_sparse_grid(int dim, QuadRule rule, int level) {
  if (dim < 1) throw std::invalid_argument("sparse grid needs at least one dimension");
  if (level < 0) throw std::invalid_argument("sparse grid level must be nonnegative");
  SparseGrid g;
  g.rule = rule;
  g.dim = dim;
  g.level = level;

  std::vector<Quad1D> rules_1d;
  for (int l = 0; l <= level; ++l) rules_1d.push_back(quad_rule_1d(rule, l));

  std::map<std::vector<double>, int> node_index;
  detail::for_each_multi_index(dim, level, [&](const std::vector<int>& lv) {
    int sum = 0;
    for (int v : lv) sum += v;
    int d = level - sum;
    if (d > dim - 1) return;  // zero combination coefficient
    SparseGrid::Term term;
    term.levels = lv;
    term.coeff = ((d % 2 == 0) ? 1.0 : -1.0) * detail::binomial(dim - 1, d);

    std::vector<int> counts(static_cast<size_t>(dim));
    int total = 1;
    for (int k = 0; k < dim; ++k) {
      counts[static_cast<size_t>(k)] = static_cast<int>(rules_1d[static_cast<size_t>(lv[static_cast<size_t>(k)])].nodes.size());
      total *= counts[static_cast<size_t>(k)];
    }
    term.node_ids.resize(static_cast<size_t>(total));
    std::vector<int> it(static_cast<size_t>(dim), 0);
    std::vector<double> pt(static_cast<size_t>(dim));
    for (int q = 0; q < total; ++q) {
      for (int k = 0; k < dim; ++k)
        pt[static_cast<size_t>(k)] =
            rules_1d[static_cast<size_t>(lv[static_cast<size_t>(k)])].nodes[static_cast<size_t>(it[static_cast<size_t>(k)])];
      auto ins = node_index.try_emplace(pt, static_cast<int>(node_index.size()));
      term.node_ids[static_cast<size_t>(q)] = ins.first->second;
      // lexicographic advance, last dimension fastest
      for (int k = dim - 1; k >= 0; --k) {
        if (++it[static_cast<size_t>(k)] < counts[static_cast<size_t>(k)]) break;
        it[static_cast<size_t>(k)] = 0;
      }
    }
    g.terms.push_back(std::move(term));
  });

  g.nodes.resize(node_index.size());
  for (const auto& [pt, id] : node_index) g.nodes[static_cast<size_t>(id)] = pt;
  g.weights.assign(node_index.size(), 0.0);
  for (const auto& term : g.terms) {
    std::vector<int> it(static_cast<size_t>(dim), 0);
    std::vector<int> counts(static_cast<size_t>(dim));
    for (int k = 0; k < dim; ++k)
      counts[static_cast<size_t>(k)] =
          static_cast<int>(rules_1d[static_cast<size_t>(term.levels[static_cast<size_t>(k)])].nodes.size());
    for (int q = 0; q < static_cast<int>(term.node_ids.size()); ++q) {
      double w = term.coeff;
      for (int k = 0; k < dim; ++k)
        w *= rules_1d[static_cast<size_t>(term.levels[static_cast<size_t>(k)])].weights[static_cast<size_t>(it[static_cast<size_t>(k)])];
      g.weights[static_cast<size_t>(term.node_ids[static_cast<size_t>(q)])] += w;
      for (int k = dim - 1; k >= 0; --k) {
        if (++it[static_cast<size_t>(k)] < counts[static_cast<size_t>(k)]) break;
        it[static_cast<size_t>(k)] = 0;
      }
    }
  }
  return g;
}

}  // namespace fracsim
