#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netmisfit/graph.hpp"
#include "netmisfit/numerics.hpp"

namespace oracle {

using netmisfit::BlockId;
using netmisfit::Graph;
using netmisfit::GraphBuilder;
using netmisfit::Vertex;

// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-12) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 50);
}

inline double chi2_density(double x, int k) {
  if (x <= 0.0) return 0.0;
  const double h = 0.5 * k;
  return std::exp((h - 1.0) * std::log(x) - 0.5 * x - h * std::log(2.0) - std::lgamma(h));
}

// CDF by integrating the density in t with x = t^2, which removes the
// singularity at 0 for df = 1.
inline double chi2_cdf_integrated(double x, int k) {
  if (x <= 0.0) return 0.0;
  return integrate([k](double t) { return chi2_density(t * t, k) * 2.0 * t; }, 0.0,
                   std::sqrt(x));
}

inline double chi2_quantile_integrated(double p, int k) {
  double lo = 0.0, hi = 1.0;
  while (chi2_cdf_integrated(hi, k) < p) hi *= 2.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf_integrated(mid, k) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Column-major lower triangle listed by two loops.
inline std::vector<std::pair<Vertex, Vertex>> enumerate_pairs(Vertex n) {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (Vertex j = 1; j <= n; ++j)
    for (Vertex i = j + 1; i <= n; ++i) out.emplace_back(i, j);
  return out;
}

inline Graph random_graph(std::mt19937_64& rng, Vertex n, double p) {
  std::bernoulli_distribution coin(p);
  GraphBuilder b(n);
  for (Vertex i = 2; i <= n; ++i)
    for (Vertex j = 1; j < i; ++j)
      if (coin(rng)) b.add_edge(i, j);
  return std::move(b).build();
}

inline std::vector<BlockId> random_labels(std::mt19937_64& rng, Vertex n, int m) {
  std::uniform_int_distribution<int> pick(1, m);
  std::vector<BlockId> labels(static_cast<std::size_t>(n));
  for (auto& l : labels) l = pick(rng);
  return labels;
}

struct BlockCounts {
  std::vector<std::int64_t> size;
  std::map<std::pair<int, int>, std::int64_t> edges;
  std::map<std::pair<int, int>, std::int64_t> pairs;
};

// Full double loop over ordered vertex pairs; each unordered pair is seen
// twice and kept once.
inline BlockCounts count_blocks(const Graph& g, int m) {
  BlockCounts c;
  c.size.assign(static_cast<std::size_t>(m), 0);
  for (Vertex i = 1; i <= g.n(); ++i) ++c.size[static_cast<std::size_t>(g.label(i) - 1)];
  for (Vertex i = 1; i <= g.n(); ++i) {
    for (Vertex j = 1; j <= g.n(); ++j) {
      if (i <= j) continue;
      int k = g.label(i), l = g.label(j);
      if (k > l) std::swap(k, l);
      ++c.pairs[{k, l}];
      if (g.has_edge(i, j)) ++c.edges[{k, l}];
    }
  }
  return c;
}

// Fraction of vertices on which est matches truth under the best relabeling.
inline double aligned_accuracy(const std::vector<BlockId>& truth, const std::vector<BlockId>& est,
                               int m) {
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 1);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t v = 0; v < truth.size(); ++v) {
      if (perm[static_cast<std::size_t>(est[v] - 1)] == truth[v]) ++hits;
    }
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

inline Eigen::MatrixXd to_eigen(const netmisfit::Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

inline double min_eigenvalue(const netmisfit::Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m));
  return solver.eigenvalues().minCoeff();
}

inline double inverse_residual(const netmisfit::Matrix& m, const netmisfit::Matrix& inv) {
  const Eigen::MatrixXd r =
      to_eigen(m) * to_eigen(inv) - Eigen::MatrixXd::Identity(m.rows(), m.cols());
  return r.cwiseAbs().maxCoeff();
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace oracle
