// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "fracsim/sparse_grid.hpp"

namespace fracsim {

using MultiIndex = std::vector<int>;

/// Orthonormal shifted Legendre polynomial on [0,1]:
/// psi_n(x) = sqrt(2n+1) P_n(2x-1), so that int_0^1 psi_m psi_n = delta_mn.
inline double legendre_orthonormal(int n, double x) {
  double t = 2.0 * x - 1.0;
  double p0 = 1.0;
  if (n == 0) return 1.0;
  double p1 = t;
  for (int k = 1; k < n; ++k) {
    double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return std::sqrt(2.0 * n + 1.0) * p1;
}

/// Product basis psi_k(xi) = prod_d psi_{k_d}(xi_d).
inline double basis_eval(const MultiIndex& k, const std::vector<double>& xi) {
  double v = 1.0;
  for (size_t d = 0; d < k.size(); ++d) v *= legendre_orthonormal(k[d], xi[d]);
  return v;
}

/// Pseudo-spectral projection operator of a sparse grid: the Smolyak
/// combination of tensor-product sub-projections, each truncated to the
/// degrees its tensor quadrature projects without internal aliasing. Since
/// the modes are linear in the samples, the operator is precomputed as a
/// |K| x M matrix and reused across output quantities.
class PspOperator {
 public:
  explicit PspOperator(const SparseGrid& grid) : dim_(grid.dim) {
    // union multi-index set K over the contributing tensor terms
    std::map<MultiIndex, int> lookup;
    for (const auto& term : grid.terms) {
      MultiIndex dmax(static_cast<size_t>(dim_));
      for (int d = 0; d < dim_; ++d)
        dmax[static_cast<size_t>(d)] = quad_projection_degree(grid.rule, term.levels[static_cast<size_t>(d)]);
      MultiIndex k(static_cast<size_t>(dim_), 0);
      while (true) {
        lookup.try_emplace(k, 0);
        int d = dim_ - 1;
        for (; d >= 0; --d) {
          if (++k[static_cast<size_t>(d)] <= dmax[static_cast<size_t>(d)]) break;
          k[static_cast<size_t>(d)] = 0;
        }
        if (d < 0) break;
      }
    }
    indices_.reserve(lookup.size());
    for (auto& [k, id] : lookup) {
      id = static_cast<int>(indices_.size());
      indices_.push_back(k);
    }

    proj_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(indices_.size()), grid.n_nodes());
    std::vector<Quad1D> rules_1d;
    for (int l = 0; l <= grid.level; ++l) rules_1d.push_back(quad_rule_1d(grid.rule, l));

    for (const auto& term : grid.terms) {
      std::vector<const Quad1D*> q(static_cast<size_t>(dim_));
      MultiIndex dmax(static_cast<size_t>(dim_));
      for (int d = 0; d < dim_; ++d) {
        q[static_cast<size_t>(d)] = &rules_1d[static_cast<size_t>(term.levels[static_cast<size_t>(d)])];
        dmax[static_cast<size_t>(d)] = quad_projection_degree(grid.rule, term.levels[static_cast<size_t>(d)]);
      }
      // per-dimension tables psi_n(node)
      std::vector<Eigen::MatrixXd> psi(static_cast<size_t>(dim_));
      for (int d = 0; d < dim_; ++d) {
        const auto& r = *q[static_cast<size_t>(d)];
        psi[static_cast<size_t>(d)].resize(dmax[static_cast<size_t>(d)] + 1, static_cast<Eigen::Index>(r.nodes.size()));
        for (int n = 0; n <= dmax[static_cast<size_t>(d)]; ++n)
          for (size_t j = 0; j < r.nodes.size(); ++j)
            psi[static_cast<size_t>(d)](n, static_cast<Eigen::Index>(j)) = legendre_orthonormal(n, r.nodes[j]);
      }
      // iterate tensor nodes (lexicographic, matching term.node_ids)
      std::vector<int> it(static_cast<size_t>(dim_), 0);
      for (size_t qi = 0; qi < term.node_ids.size(); ++qi) {
        double w = term.coeff;
        for (int d = 0; d < dim_; ++d) w *= q[static_cast<size_t>(d)]->weights[static_cast<size_t>(it[static_cast<size_t>(d)])];
        // accumulate w * psi_k(node) for every k in this term's box
        MultiIndex k(static_cast<size_t>(dim_), 0);
        while (true) {
          double pv = w;
          for (int d = 0; d < dim_; ++d)
            pv *= psi[static_cast<size_t>(d)](k[static_cast<size_t>(d)], it[static_cast<size_t>(d)]);
          proj_(lookup.at(k), term.node_ids[qi]) += pv;
          int d = dim_ - 1;
          for (; d >= 0; --d) {
            if (++k[static_cast<size_t>(d)] <= dmax[static_cast<size_t>(d)]) break;
            k[static_cast<size_t>(d)] = 0;
          }
          if (d < 0) break;
        }
        for (int d = dim_ - 1; d >= 0; --d) {
          if (++it[static_cast<size_t>(d)] < static_cast<int>(q[static_cast<size_t>(d)]->nodes.size())) break;
          it[static_cast<size_t>(d)] = 0;
        }
      }
    }
  }

  int dim() const { return dim_; }
  int n_modes() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  std::vector<double> project(const std::vector<double>& samples) const {
    if (static_cast<Eigen::Index>(samples.size()) != proj_.cols())
      throw std::invalid_argument("sample count does not match the sparse grid");
    for (double s : samples)
      if (!std::isfinite(s)) throw std::invalid_argument("non-finite sample in projection");
    Eigen::Map<const Eigen::VectorXd> f(samples.data(), static_cast<Eigen::Index>(samples.size()));
    Eigen::VectorXd m = proj_ * f;
    return {m.data(), m.data() + m.size()};
  }

 private:
  int dim_;
  std::vector<MultiIndex> indices_;
  Eigen::MatrixXd proj_;
};

/// Truncated PC expansion of one output quantity; the multi-index set and the
/// parameter dimension live in the shared operator.
struct PCExpansion {
  std::shared_ptr<const PspOperator> basis;
  std::vector<double> modes;

  double mean() const { return modes.empty() ? 0.0 : modes[0]; }
  double variance() const {
    double v = 0.0;
    for (size_t i = 1; i < modes.size(); ++i) v += modes[i] * modes[i];
    return v;
  }
};

inline PCExpansion psp_project(const std::shared_ptr<const PspOperator>& op, const std::vector<double>& samples) {
  return {op, op->project(samples)};
}

/// Convenience form building the operator on the fly (tests, one-off use).
inline PCExpansion psp_project(const SparseGrid& grid, const std::vector<double>& samples) {
  return psp_project(std::make_shared<PspOperator>(grid), samples);
}

inline double covariance(const PCExpansion& x, const PCExpansion& y) {
  if (x.basis != y.basis && (!x.basis || !y.basis || x.basis->indices() != y.basis->indices()))
    throw std::invalid_argument("covariance requires expansions over the same multi-index set");
  double c = 0.0;
  for (size_t i = 1; i < x.modes.size(); ++i) c += x.modes[i] * y.modes[i];
  return c;
}

/// Cov / sqrt(Var Var), guarded against (near-)degenerate variances.
inline double correlation(const PCExpansion& x, const PCExpansion& y, double var_floor = 1e-30) {
  double vx = x.variance(), vy = y.variance();
  if (vx < var_floor || vy < var_floor) return 0.0;
  return covariance(x, y) / std::sqrt(vx * vy);
}

struct SobolReport {
  bool defined = false;  // false when the total variance is degenerate
  double total_variance = 0.0;
  std::vector<double> first;                      // S_{1,i}
  std::vector<double> total;                      // S_{T_i}
  std::vector<std::vector<double>> second;        // S_{i,j}, upper triangle used
  std::vector<double> partial_first;              // unnormalized numerators
  std::vector<std::vector<double>> partial_second;
};

inline SobolReport sobol_indices(const PCExpansion& pc, double var_floor = 1e-300) {
  const int N = pc.basis->dim();
  SobolReport r;
  r.first.assign(static_cast<size_t>(N), 0.0);
  r.total.assign(static_cast<size_t>(N), 0.0);
  r.partial_first.assign(static_cast<size_t>(N), 0.0);
  r.second.assign(static_cast<size_t>(N), std::vector<double>(static_cast<size_t>(N), 0.0));
  r.partial_second.assign(static_cast<size_t>(N), std::vector<double>(static_cast<size_t>(N), 0.0));
  r.total_variance = pc.variance();

  const auto& K = pc.basis->indices();
  for (size_t m = 0; m < K.size(); ++m) {
    const auto& k = K[m];
    double x2 = pc.modes[m] * pc.modes[m];
    std::vector<int> active;
    for (int d = 0; d < N; ++d)
      if (k[static_cast<size_t>(d)] > 0) active.push_back(d);
    if (active.empty()) continue;
    for (int d : active) r.total[static_cast<size_t>(d)] += x2;
    if (active.size() == 1) r.partial_first[static_cast<size_t>(active[0])] += x2;
    if (active.size() == 2) r.partial_second[static_cast<size_t>(active[0])][static_cast<size_t>(active[1])] += x2;
  }
  if (r.total_variance <= var_floor) return r;  // indices stay zero, flagged undefined
  r.defined = true;
  for (int d = 0; d < N; ++d) {
    r.first[static_cast<size_t>(d)] = r.partial_first[static_cast<size_t>(d)] / r.total_variance;
    r.total[static_cast<size_t>(d)] /= r.total_variance;
  }
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      r.second[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          r.partial_second[static_cast<size_t>(i)][static_cast<size_t>(j)] / r.total_variance;
  return r;
}

inline double surrogate_eval(const PCExpansion& pc, const std::vector<double>& xi) {
  if (static_cast<int>(xi.size()) != pc.basis->dim()) throw std::invalid_argument("surrogate point dimension mismatch");
  for (double v : xi)
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("surrogate point outside [0,1]^N");
  const auto& K = pc.basis->indices();
  double acc = 0.0;
  for (size_t m = 0; m < K.size(); ++m) acc += pc.modes[m] * basis_eval(K[m], xi);
  return acc;
}

/// Portable deterministic uniform sampler (identical streams across
/// platforms): raw mt19937_64 draws scaled to [0,1).
class UniformSampler {
 public:
  explicit UniformSampler(uint64_t seed) : gen_(seed) {}
  double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

struct Histogram {
  std::vector<double> edges;    // n_bins + 1
  std::vector<double> density;  // integrates to 1
};

/// PDF estimate by seeded Monte Carlo over the surrogate, binned over the
/// observed sample range. Out-of-physical-bounds surrogate values are
/// reported as-is, never clamped.
inline Histogram pdf_estimate(const PCExpansion& pc, int n_samples, int n_bins, uint64_t seed = 20240601) {
  if (n_samples < 1000) throw std::invalid_argument("pdf_estimate needs at least 1000 samples");
  if (n_bins < 1) throw std::invalid_argument("pdf_estimate needs at least one bin");
  UniformSampler rng(seed);
  const int N = pc.basis->dim();
  std::vector<double> vals(static_cast<size_t>(n_samples));
  std::vector<double> xi(static_cast<size_t>(N));
  for (int s = 0; s < n_samples; ++s) {
    for (int d = 0; d < N; ++d) xi[static_cast<size_t>(d)] = rng.next();
    vals[static_cast<size_t>(s)] = surrogate_eval(pc, xi);
  }
  double lo = *std::min_element(vals.begin(), vals.end());
  double hi = *std::max_element(vals.begin(), vals.end());
  if (!(hi > lo)) {  // degenerate distribution: one occupied bin
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(static_cast<size_t>(n_bins) + 1);
  for (int b = 0; b <= n_bins; ++b) h.edges[static_cast<size_t>(b)] = lo + (hi - lo) * b / n_bins;
  h.density.assign(static_cast<size_t>(n_bins), 0.0);
  const double width = (hi - lo) / n_bins;
  for (double v : vals) {
    int b = std::min(n_bins - 1, static_cast<int>((v - lo) / width));
    h.density[static_cast<size_t>(std::max(0, b))] += 1.0;
  }
  for (double& d : h.density) d /= n_samples * width;
  return h;
}

}  // namespace fracsim
