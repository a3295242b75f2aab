// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fracsim/pce.hpp"
#include "fracsim/quadrature.hpp"
#include "fracsim/sparse_grid.hpp"

using namespace fracsim;

namespace {

double quad_apply(const Quad1D& q, double (*f)(double, int), int p) {
  double acc = 0.0;
  for (size_t i = 0; i < q.nodes.size(); ++i) acc += q.weights[i] * f(q.nodes[i], p);
  return acc;
}

double monomial(double x, int p) { return std::pow(x, p); }

}  // namespace

TEST_CASE("1D rule sanity: midpoint at level 0, CC level 1 endpoints") {
  auto cc0 = quad_rule_1d(QuadRule::clenshaw_curtis, 0);
  REQUIRE(cc0.nodes.size() == 1);
  REQUIRE(cc0.nodes[0] == Catch::Approx(0.5));
  REQUIRE(cc0.weights[0] == Catch::Approx(1.0));
  auto cc1 = quad_rule_1d(QuadRule::clenshaw_curtis, 1);
  REQUIRE(cc1.nodes.size() == 3);
  REQUIRE(cc1.nodes[0] == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(cc1.nodes[1] == Catch::Approx(0.5).margin(1e-15));
  REQUIRE(cc1.nodes[2] == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("quadrature exactness against monomial moments") {
  // oracle: int_0^1 x^p dx = 1/(p+1)
  for (int level = 0; level <= 5; ++level) {
    for (QuadRule rule : {QuadRule::clenshaw_curtis, QuadRule::gauss_patterson}) {
      auto q = quad_rule_1d(rule, level);
      REQUIRE(static_cast<int>(q.nodes.size()) == quad_point_count(rule, level));
      double wsum = 0.0;
      for (double w : q.weights) wsum += w;
      REQUIRE(wsum == Catch::Approx(1.0).margin(1e-13));
      for (int p = 0; p <= quad_exact_degree(rule, level); ++p)
        REQUIRE(quad_apply(q, monomial, p) == Catch::Approx(1.0 / (p + 1)).margin(1e-12));
    }
  }
}

TEST_CASE("GP level 2 has 7 nodes and integrates degree 10 exactly") {
  auto q = quad_rule_1d(QuadRule::gauss_patterson, 2);
  REQUIRE(q.nodes.size() == 7);
  for (int p = 0; p <= 10; ++p) REQUIRE(quad_apply(q, monomial, p) == Catch::Approx(1.0 / (p + 1)).margin(1e-12));
}

TEST_CASE("GP levels beyond the tabulated depth are rejected") {
  REQUIRE_THROWS_AS(quad_rule_1d(QuadRule::gauss_patterson, 6), std::invalid_argument);
}

TEST_CASE("nestedness of both 1D families") {
  for (QuadRule rule : {QuadRule::clenshaw_curtis, QuadRule::gauss_patterson}) {
    for (int level = 0; level < 5; ++level) {
      auto coarse = quad_rule_1d(rule, level);
      auto fine = quad_rule_1d(rule, level + 1);
      for (double x : coarse.nodes) {
        double best = 1.0;
        for (double y : fine.nodes) best = std::min(best, std::abs(x - y));
        REQUIRE(best < 1e-15);
      }
    }
  }
}

TEST_CASE("sparse grid counts match the reported run counts") {
  REQUIRE(build_sparse_grid(3, QuadRule::gauss_patterson, 2).n_nodes() == 31);
  REQUIRE(build_sparse_grid(3, QuadRule::gauss_patterson, 3).n_nodes() == 111);
  REQUIRE(build_sparse_grid(3, QuadRule::gauss_patterson, 4).n_nodes() == 351);
  REQUIRE(build_sparse_grid(3, QuadRule::gauss_patterson, 5).n_nodes() == 1023);
}

TEST_CASE("a one-dimensional sparse grid degenerates to the 1D rule") {
  auto g = build_sparse_grid(1, QuadRule::gauss_patterson, 3);
  auto q = quad_rule_1d(QuadRule::gauss_patterson, 3);
  REQUIRE(g.n_nodes() == static_cast<int>(q.nodes.size()));
  double wsum = 0.0;
  for (double w : g.weights) wsum += w;
  REQUIRE(wsum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("combined sparse weights are normalized and nodes stay in the cube") {
  for (int level : {1, 2, 3, 4}) {
    auto g = build_sparse_grid(3, QuadRule::gauss_patterson, level);
    double wsum = 0.0;
    for (double w : g.weights) wsum += w;
    REQUIRE(wsum == Catch::Approx(1.0).margin(1e-12));
    for (const auto& pt : g.nodes)
      for (double x : pt) {
        REQUIRE(x >= 0.0);
        REQUIRE(x <= 1.0);
      }
  }
}

TEST_CASE("sparse grid nestedness across levels") {
  auto g2 = build_sparse_grid(3, QuadRule::gauss_patterson, 2);
  auto g3 = build_sparse_grid(3, QuadRule::gauss_patterson, 3);
  for (const auto& pt : g2.nodes) {
    bool found = false;
    for (const auto& qt : g3.nodes)
      if (pt == qt) {
        found = true;
        break;
      }
    REQUIRE(found);
  }
}

TEST_CASE("orthonormal basis values") {
  REQUIRE(basis_eval({0, 0, 0}, {0.3, 0.7, 0.1}) == Catch::Approx(1.0));
  REQUIRE(basis_eval({1, 0, 0}, {1.0, 0.2, 0.2}) == Catch::Approx(std::sqrt(3.0)).margin(1e-14));
  // orthonormality via a reference rule exact far beyond degree i+j
  auto q = quad_rule_1d(QuadRule::gauss_patterson, 4);
  for (int i = 0; i <= 5; ++i)
    for (int j = 0; j <= 5; ++j) {
      double acc = 0.0;
      for (size_t m = 0; m < q.nodes.size(); ++m)
        acc += q.weights[m] * legendre_orthonormal(i, q.nodes[m]) * legendre_orthonormal(j, q.nodes[m]);
      REQUIRE(acc == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
    }
}

TEST_CASE("projection of constants and of basis functions") {
  auto grid = build_sparse_grid(3, QuadRule::gauss_patterson, 2);
  auto op = std::make_shared<PspOperator>(grid);

  SECTION("constant samples make the zero mode only") {
    std::vector<double> samples(static_cast<size_t>(grid.n_nodes()), 4.25);
    auto pc = psp_project(op, samples);
    REQUIRE(pc.mean() == Catch::Approx(4.25).margin(1e-12));
    REQUIRE(pc.variance() == Catch::Approx(0.0).margin(1e-12));
  }

  SECTION("sampling psi_k reproduces the unit coefficient vector") {
    const auto& K = op->indices();
    for (size_t pick = 0; pick < K.size(); pick += 7) {
      std::vector<double> samples(static_cast<size_t>(grid.n_nodes()));
      for (int q = 0; q < grid.n_nodes(); ++q)
        samples[static_cast<size_t>(q)] = basis_eval(K[pick], grid.nodes[static_cast<size_t>(q)]);
      auto pc = psp_project(op, samples);
      for (size_t m = 0; m < K.size(); ++m)
        REQUIRE(pc.modes[m] == Catch::Approx(m == pick ? 1.0 : 0.0).margin(1e-10));
    }
  }

  SECTION("sample count mismatch and non-finite samples are rejected") {
    REQUIRE_THROWS_AS(psp_project(op, std::vector<double>(5, 1.0)), std::invalid_argument);
    std::vector<double> bad(static_cast<size_t>(grid.n_nodes()), 1.0);
    bad[3] = std::nan("");
    REQUIRE_THROWS_AS(psp_project(op, bad), std::invalid_argument);
  }
}

TEST_CASE("psp reconstructs xi1*xi2 exactly at level 3") {
  auto grid = build_sparse_grid(3, QuadRule::gauss_patterson, 3);
  std::vector<double> samples(static_cast<size_t>(grid.n_nodes()));
  for (int q = 0; q < grid.n_nodes(); ++q)
    samples[static_cast<size_t>(q)] = grid.nodes[static_cast<size_t>(q)][0] * grid.nodes[static_cast<size_t>(q)][1];
  auto pc = psp_project(grid, samples);
  UniformSampler rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xi{rng.next(), rng.next(), rng.next()};
    REQUIRE(surrogate_eval(pc, xi) == Catch::Approx(xi[0] * xi[1]).margin(1e-10));
  }
}

TEST_CASE("moments of f = xi1 and self-correlation") {
  auto grid = build_sparse_grid(3, QuadRule::gauss_patterson, 2);
  std::vector<double> samples(static_cast<size_t>(grid.n_nodes()));
  for (int q = 0; q < grid.n_nodes(); ++q) samples[static_cast<size_t>(q)] = grid.nodes[static_cast<size_t>(q)][0];
  auto pc = psp_project(grid, samples);
  REQUIRE(pc.mean() == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(pc.variance() == Catch::Approx(1.0 / 12.0).margin(1e-12));
  REQUIRE(correlation(pc, pc) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("sobol indices of simple functions") {
  auto grid = build_sparse_grid(3, QuadRule::gauss_patterson, 3);
  auto op = std::make_shared<PspOperator>(grid);
  auto project_fn = [&](auto&& f) {
    std::vector<double> s(static_cast<size_t>(grid.n_nodes()));
    for (int q = 0; q < grid.n_nodes(); ++q) s[static_cast<size_t>(q)] = f(grid.nodes[static_cast<size_t>(q)]);
    return psp_project(op, s);
  };

  SECTION("single variable: all variance on S_{1,1}") {
    auto r = sobol_indices(project_fn([](const std::vector<double>& x) { return x[0]; }));
    REQUIRE(r.defined);
    REQUIRE(r.first[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(r.first[1] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(r.total[0] == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("additive function splits evenly with no interaction") {
    auto r = sobol_indices(project_fn([](const std::vector<double>& x) { return x[0] + x[1]; }));
    REQUIRE(r.first[0] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(r.first[1] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(r.second[0][1] == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("product function: 3/7, 3/7, 1/7 interaction") {
    auto r = sobol_indices(project_fn([](const std::vector<double>& x) { return x[0] * x[1]; }));
    REQUIRE(r.total_variance == Catch::Approx(7.0 / 144.0).margin(1e-12));
    REQUIRE(r.first[0] == Catch::Approx(3.0 / 7.0).margin(1e-10));
    REQUIRE(r.first[1] == Catch::Approx(3.0 / 7.0).margin(1e-10));
    REQUIRE(r.first[2] == Catch::Approx(0.0).margin(1e-10));
    REQUIRE(r.second[0][1] == Catch::Approx(1.0 / 7.0).margin(1e-10));
    REQUIRE(r.total[0] == Catch::Approx(3.0 / 7.0 + 1.0 / 7.0).margin(1e-10));
  }
  SECTION("degenerate variance is flagged, not thrown") {
    auto r = sobol_indices(project_fn([](const std::vector<double>&) { return 3.0; }));
    REQUIRE_FALSE(r.defined);
  }
  SECTION("sobol partition sums to one") {
    auto pc = project_fn([](const std::vector<double>& x) { return std::exp(x[0] + x[1] * x[2]); });
    double all = 0.0;
    const auto& K = pc.basis->indices();
    for (size_t m = 1; m < K.size(); ++m) all += pc.modes[m] * pc.modes[m];
    REQUIRE(all == Catch::Approx(pc.variance()).margin(1e-12));
  }
}

TEST_CASE("surrogate sampling and pdf estimation") {
  auto grid = build_sparse_grid(2, QuadRule::gauss_patterson, 2);
  auto op = std::make_shared<PspOperator>(grid);

  SECTION("constant expansion gives a single occupied bin integrating to 1") {
    std::vector<double> s(static_cast<size_t>(grid.n_nodes()), 2.5);
    auto pc = psp_project(op, s);
    auto h = pdf_estimate(pc, 2000, 40, 11);
    int occupied = 0;
    double integral = 0.0;
    for (size_t b = 0; b < h.density.size(); ++b) {
      if (h.density[b] > 0.0) ++occupied;
      integral += h.density[b] * (h.edges[b + 1] - h.edges[b]);
    }
    REQUIRE(occupied == 1);
    REQUIRE(integral == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("f = xi1 surrogate mean agrees with Monte Carlo within 3 SE") {
    std::vector<double> s(static_cast<size_t>(grid.n_nodes()));
    for (int q = 0; q < grid.n_nodes(); ++q) s[static_cast<size_t>(q)] = grid.nodes[static_cast<size_t>(q)][0];
    auto pc = psp_project(op, s);
    UniformSampler rng(101);
    int n = 20000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += surrogate_eval(pc, {rng.next(), rng.next()});
    double mc_mean = acc / n;
    double se = std::sqrt(1.0 / 12.0 / n);
    REQUIRE(std::abs(mc_mean - 0.5) < 3.0 * se);
  }

  SECTION("pdf reports values outside physical bounds instead of clamping") {
    std::vector<double> s(static_cast<size_t>(grid.n_nodes()));
    for (int q = 0; q < grid.n_nodes(); ++q) s[static_cast<size_t>(q)] = grid.nodes[static_cast<size_t>(q)][0] - 0.5;
    auto pc = psp_project(op, s);
    auto h = pdf_estimate(pc, 5000, 20, 3);
    REQUIRE(h.edges.front() < 0.0);  // negative values present in the histogram support
  }

  SECTION("points outside the cube are rejected") {
    std::vector<double> s(static_cast<size_t>(grid.n_nodes()), 1.0);
    auto pc = psp_project(op, s);
    REQUIRE_THROWS_AS(surrogate_eval(pc, {1.5, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("surrogate max error decreases with level for a smooth function") {
  auto f = [](const std::vector<double>& x) { return std::exp(x[0] + x[1] * x[2]); };
  std::vector<double> errs;
  for (int level : {2, 3, 4}) {
    auto grid = build_sparse_grid(3, QuadRule::gauss_patterson, level);
    std::vector<double> s(static_cast<size_t>(grid.n_nodes()));
    for (int q = 0; q < grid.n_nodes(); ++q) s[static_cast<size_t>(q)] = f(grid.nodes[static_cast<size_t>(q)]);
    auto pc = psp_project(grid, s);
    UniformSampler rng(42);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> xi{rng.next(), rng.next(), rng.next()};
      worst = std::max(worst, std::abs(surrogate_eval(pc, xi) - f(xi)));
    }
    errs.push_back(worst);
  }
  REQUIRE(errs[0] > errs[1]);
  REQUIRE(errs[1] > errs[2]);
}
