#include "netmisfit/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "netmisfit/error.hpp"

namespace netmisfit {

std::string to_string(FitMethod method) {
  return method == FitMethod::ObservedLabels ? "observed" : "vem";
}
std::string to_string(SbmMode mode) { return mode == SbmMode::Paper ? "paper" : "reduced"; }
std::string to_string(SbmSizeFactor factor) {
  return factor == SbmSizeFactor::PairCount ? "pairs" : "vertices";
}

// ---------------------------------------------------------------------------
// Observations

SbmObservationSet sbm_observations(const Graph& g, IsolatedPolicy policy) {
  const auto& labels = g.labels();
  const Vertex n = g.n();
  SbmObservationSet out;
  std::vector<char> isolated(static_cast<std::size_t>(n), 0);
  for (Vertex v = 1; v <= n; ++v) {
    if (g.degree(v) == 0) {
      isolated[static_cast<std::size_t>(v - 1)] = 1;
      ++out.isolated_vertices;
    }
  }
  if (out.isolated_vertices > 0 && policy == IsolatedPolicy::Reject) {
    Vertex first = 1;
    while (!isolated[static_cast<std::size_t>(first - 1)]) ++first;
    throw Error(ErrorCode::IsolatedVertex,
                std::to_string(out.isolated_vertices) + " isolated vertices (first: " +
                    std::to_string(first) + "); the exponent I/n_i is undefined");
  }
  out.items.reserve(static_cast<std::size_t>(pair_count(n)));
  for (Vertex j = 1; j < n; ++j) {
    for (Vertex i = j + 1; i <= n; ++i) {
      if (isolated[static_cast<std::size_t>(i - 1)] || isolated[static_cast<std::size_t>(j - 1)]) {
        ++out.dropped;
        continue;
      }
      out.items.push_back({labels[static_cast<std::size_t>(i - 1)],
                           labels[static_cast<std::size_t>(j - 1)], g.degree(i), g.degree(j),
                           g.has_edge(i, j) ? 1 : 0});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Observed-label estimator

namespace {

double apply_boundary(double value, bool at_boundary, BoundaryPolicy boundary, int& clamped,
                      BlockId k, BlockId l) {
  if (!at_boundary) return value;
  if (!boundary.clamp) {
    throw Error(ErrorCode::DegenerateEstimate,
                "eta_" + std::to_string(k) + std::to_string(l) + " = " + std::to_string(value) +
                    " lies on the boundary");
  }
  ++clamped;
  return std::clamp(value, boundary.epsilon, 1.0 - boundary.epsilon);
}

}  // namespace

FittedSbm sbm_mle_observed(const Graph& g, BoundaryPolicy boundary, int m) {
  const auto& labels = g.labels();
  if (m <= 0) m = g.block_count();
  for (BlockId b : labels) {
    if (b > m) throw Error(ErrorCode::InvalidLabel, "label exceeds block count");
  }
  const auto mm = static_cast<std::size_t>(m);
  std::vector<std::int64_t> block_size(mm, 0);
  for (BlockId b : labels) ++block_size[static_cast<std::size_t>(b - 1)];
  for (std::size_t k = 0; k < mm; ++k) {
    if (block_size[k] == 0) {
      throw Error(ErrorCode::EmptyBlock, "block " + std::to_string(k + 1) + " has no vertices");
    }
  }
  std::vector<std::int64_t> edges(mm * mm, 0);
  for (const auto& e : g.edges()) {
    auto k = static_cast<std::size_t>(g.label(e.i) - 1);
    auto l = static_cast<std::size_t>(g.label(e.j) - 1);
    if (k > l) std::swap(k, l);
    ++edges[k * mm + l];
  }

  FittedSbm fit;
  fit.m = m;
  fit.method = FitMethod::ObservedLabels;
  fit.labels_used = labels;
  fit.theta.resize(mm);
  for (std::size_t k = 0; k < mm; ++k) {
    fit.theta[k] = static_cast<double>(block_size[k]) / static_cast<double>(g.n());
  }
  fit.eta = Matrix(mm, mm, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < mm; ++k) {
    for (std::size_t l = k; l < mm; ++l) {
      const std::int64_t pairs = k == l ? pair_count(block_size[k]) : block_size[k] * block_size[l];
      if (pairs == 0) continue;
      const std::int64_t e = edges[k * mm + l];
      const double value = static_cast<double>(e) / static_cast<double>(pairs);
      const double eta = apply_boundary(value, e == 0 || e == pairs, boundary, fit.clamped_cells,
                                        static_cast<BlockId>(k + 1), static_cast<BlockId>(l + 1));
      fit.eta(k, l) = eta;
      fit.eta(l, k) = eta;
    }
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Variational EM

namespace {

constexpr double kEtaFloor = 1e-10;

struct VemRun {
  std::vector<double> tau;  // n x m, row-major
  std::vector<double> theta;
  Matrix eta;
  Matrix raw_eta;  // N / P before any clamping
  double elbo = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

class VemSolver {
 public:
  VemSolver(const Graph& g, int m, const VemOptions& options)
      : n_(static_cast<std::size_t>(g.n())), m_(static_cast<std::size_t>(m)), options_(options) {
    neighbors_.resize(n_);
    for (const auto& e : g.edges()) {
      neighbors_[static_cast<std::size_t>(e.i - 1)].push_back(static_cast<std::size_t>(e.j - 1));
      neighbors_[static_cast<std::size_t>(e.j - 1)].push_back(static_cast<std::size_t>(e.i - 1));
    }
  }

  VemRun run(Seed seed) const {
    VemRun r;
    StreamRng rng(seed);
    r.tau.assign(n_ * m_, 0.0);
    const std::vector<std::size_t> z = seed_labels(rng);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t q = 0; q < m_; ++q) {
        r.tau[i * m_ + q] = m_ == 1 ? 1.0 : (q == z[i] ? 0.9 : 0.1 / static_cast<double>(m_ - 1));
      }
    }
    std::vector<double> S(n_ * m_, 0.0), T(m_, 0.0);
    Matrix N(m_, m_), P(m_, m_);
    refresh(r.tau, S, T);
    m_step(r, S, T, N, P);
    for (int it = 1; it <= options_.max_iterations; ++it) {
      e_step(r, S, T);
      refresh(r.tau, S, T);
      m_step(r, S, T, N, P);
      const double elbo = evaluate_elbo(r, T, N, P);
      r.trace.push_back(elbo);
      r.iterations = it;
      const double previous = r.elbo;
      r.elbo = elbo;
      if (it > 1 && std::abs(elbo - previous) < options_.relative_tolerance * std::abs(previous)) {
        r.converged = true;
        break;
      }
    }
    return r;
  }

 private:
  // k-means++ seeding on adjacency rows under Hamming distance, then each
  // vertex takes the block of its nearest centre.
  std::vector<std::size_t> seed_labels(StreamRng& rng) const {
    std::vector<std::size_t> z(n_, 0);
    if (m_ == 1) return z;
    std::vector<char> row(n_, 0);
    auto distances_to = [&](std::size_t c) {
      std::fill(row.begin(), row.end(), 0);
      for (std::size_t v : neighbors_[c]) row[v] = 1;
      std::vector<double> d(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        std::size_t common = 0;
        for (std::size_t v : neighbors_[i]) common += row[v];
        d[i] = static_cast<double>(neighbors_[i].size() + neighbors_[c].size() - 2 * common);
      }
      d[c] = 0.0;
      return d;
    };
    std::vector<std::size_t> centres{static_cast<std::size_t>(rng.below(n_))};
    std::vector<double> best = distances_to(centres[0]);
    std::vector<char> taken(n_, 0);
    taken[centres[0]] = 1;
    while (centres.size() < m_) {
      double total = 0.0;
      for (std::size_t i = 0; i < n_; ++i) total += taken[i] ? 0.0 : best[i] * best[i];
      std::size_t pick = n_;
      if (total > 0.0) {
        double u = rng.uniform() * total;
        for (std::size_t i = 0; i < n_; ++i) {
          if (taken[i]) continue;
          u -= best[i] * best[i];
          pick = i;
          if (u < 0.0) break;
        }
      } else {
        do pick = static_cast<std::size_t>(rng.below(n_)); while (taken[pick]);
      }
      taken[pick] = 1;
      const std::vector<double> d = distances_to(pick);
      const std::size_t label = centres.size();
      centres.push_back(pick);
      for (std::size_t i = 0; i < n_; ++i) {
        if (d[i] < best[i]) {
          best[i] = d[i];
          z[i] = label;
        }
      }
    }
    for (std::size_t q = 0; q < m_; ++q) z[centres[q]] = q;
    return z;
  }

  void refresh(const std::vector<double>& tau, std::vector<double>& S,
               std::vector<double>& T) const {
    std::fill(S.begin(), S.end(), 0.0);
    std::fill(T.begin(), T.end(), 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t q = 0; q < m_; ++q) T[q] += tau[i * m_ + q];
      for (std::size_t j : neighbors_[i]) {
        for (std::size_t q = 0; q < m_; ++q) S[i * m_ + q] += tau[j * m_ + q];
      }
    }
  }

  void m_step(VemRun& r, const std::vector<double>& S, const std::vector<double>& T, Matrix& N,
              Matrix& P) const {
    r.theta.assign(m_, 0.0);
    for (std::size_t q = 0; q < m_; ++q) {
      if (T[q] < options_.empty_block_mass) {
        throw Error(ErrorCode::EmptyBlock, "block " + std::to_string(q + 1) +
                                               " lost all responsibility mass");
      }
      r.theta[q] = T[q] / static_cast<double>(n_);
    }
    for (std::size_t q = 0; q < m_; ++q) {
      for (std::size_t l = 0; l < m_; ++l) {
        double nql = 0.0, self = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
          nql += r.tau[i * m_ + q] * S[i * m_ + l];
          self += r.tau[i * m_ + q] * r.tau[i * m_ + l];
        }
        N(q, l) = nql;
        P(q, l) = T[q] * T[l] - self;
      }
    }
    r.eta = Matrix(m_, m_);
    r.raw_eta = Matrix(m_, m_);
    for (std::size_t q = 0; q < m_; ++q) {
      for (std::size_t l = q; l < m_; ++l) {
        // Symmetrize the accumulated sums so eta is exactly symmetric.
        const double nql = 0.5 * (N(q, l) + N(l, q));
        const double pql = 0.5 * (P(q, l) + P(l, q));
        N(q, l) = N(l, q) = nql;
        P(q, l) = P(l, q) = pql;
        const double raw = pql > 1e-12 ? nql / pql : 0.5;
        r.raw_eta(q, l) = r.raw_eta(l, q) = raw;
        r.eta(q, l) = r.eta(l, q) = std::clamp(raw, kEtaFloor, 1.0 - kEtaFloor);
      }
    }
  }

  void e_step(VemRun& r, std::vector<double>& S, std::vector<double>& T) const {
    if (m_ == 1) return;
    Matrix log_eta(m_, m_), log_comp(m_, m_);
    for (std::size_t q = 0; q < m_; ++q)
      for (std::size_t l = 0; l < m_; ++l) {
        log_eta(q, l) = std::log(r.eta(q, l));
        log_comp(q, l) = std::log1p(-r.eta(q, l));
      }
    std::vector<double> score(m_), delta(m_);
    for (std::size_t i = 0; i < n_; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t q = 0; q < m_; ++q) {
        double s = std::log(r.theta[q]);
        for (std::size_t l = 0; l < m_; ++l) {
          const double linked = S[i * m_ + l];
          const double unlinked = T[l] - r.tau[i * m_ + l] - linked;
          s += linked * log_eta(q, l) + unlinked * log_comp(q, l);
        }
        score[q] = s;
        best = std::max(best, s);
      }
      double total = 0.0;
      for (std::size_t q = 0; q < m_; ++q) {
        score[q] = std::exp(score[q] - best);
        total += score[q];
      }
      for (std::size_t q = 0; q < m_; ++q) {
        const double updated = score[q] / total;
        delta[q] = updated - r.tau[i * m_ + q];
        r.tau[i * m_ + q] = updated;
        T[q] += delta[q];
      }
      for (std::size_t j : neighbors_[i]) {
        for (std::size_t q = 0; q < m_; ++q) S[j * m_ + q] += delta[q];
      }
    }
  }

  double evaluate_elbo(const VemRun& r, const std::vector<double>& T, const Matrix& N,
                       const Matrix& P) const {
    double value = 0.0;
    for (std::size_t q = 0; q < m_; ++q) value += T[q] * std::log(r.theta[q]);
    for (std::size_t q = 0; q < m_; ++q)
      for (std::size_t l = 0; l < m_; ++l) {
        value += 0.5 * (N(q, l) * std::log(r.eta(q, l)) +
                        (P(q, l) - N(q, l)) * std::log1p(-r.eta(q, l)));
      }
    for (double t : r.tau) {
      if (t > 0.0) value -= t * std::log(t);
    }
    return value;
  }

  std::size_t n_;
  std::size_t m_;
  VemOptions options_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

}  // namespace

FittedSbm sbm_vem_fit(const Graph& g, int m, Seed seed, const VemOptions& options) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "block count must be >= 1");
  if (g.n() < m) throw Error(ErrorCode::InvalidArgument, "need n >= m");
  if (options.restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 1");
  const VemSolver solver(g, m, options);

  std::vector<std::optional<VemRun>> runs(static_cast<std::size_t>(options.restarts));
  std::vector<std::optional<Error>> failures(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    try {
      runs[r] = solver.run(seed.lane(0x76656d00ULL + r));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyBlock) throw;
      failures[r] = e;
    }
  }
  int best = -1;
  int failed = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (!runs[r]) {
      ++failed;
      continue;
    }
    if (best < 0 || runs[r]->elbo > runs[static_cast<std::size_t>(best)]->elbo) {
      best = static_cast<int>(r);
    }
  }
  if (best < 0) throw *failures.front();
  const VemRun& run = *runs[static_cast<std::size_t>(best)];
  const auto mm = static_cast<std::size_t>(m);

  FittedSbm fit;
  fit.m = m;
  fit.method = FitMethod::VariationalEM;
  fit.theta = run.theta;
  fit.eta = Matrix(mm, mm);
  for (std::size_t q = 0; q < mm; ++q) {
    for (std::size_t l = q; l < mm; ++l) {
      const double raw = run.raw_eta(q, l);
      const bool at_boundary = raw <= 1e-12 || raw >= 1.0 - 1e-12;
      const double value = apply_boundary(raw, at_boundary, options.boundary, fit.clamped_cells,
                                          static_cast<BlockId>(q + 1), static_cast<BlockId>(l + 1));
      fit.eta(q, l) = fit.eta(l, q) = value;
    }
  }
  fit.labels_used.resize(static_cast<std::size_t>(g.n()));
  for (std::size_t i = 0; i < fit.labels_used.size(); ++i) {
    std::size_t arg = 0;
    for (std::size_t q = 1; q < mm; ++q) {
      if (run.tau[i * mm + q] > run.tau[i * mm + arg]) arg = q;
    }
    fit.labels_used[i] = static_cast<BlockId>(arg + 1);
  }
  EmMeta meta;
  meta.iterations = run.iterations;
  meta.elbo = run.elbo;
  meta.restarts = options.restarts;
  meta.best_restart = best + 1;
  meta.failed_restarts = failed;
  meta.converged = run.converged;
  meta.elbo_trace = run.trace;
  fit.em = std::move(meta);
  return fit;
}

FittedSbm sbm_vem_fit(const Graph& g, int m, int restarts, Seed seed, BoundaryPolicy boundary) {
  VemOptions options;
  options.restarts = restarts;
  options.boundary = boundary;
  return sbm_vem_fit(g, m, seed, options);
}

// ---------------------------------------------------------------------------
// Per-observation derivatives
//
// With a = I/n_i, b = I/n_j (the indicators are 1 by construction),
// s = y/eta - (1-y)/(1-eta) and h = -y/eta^2 - (1-y)/(1-eta)^2.
// The reciprocals 1/eta and 1/(1-eta) are formed once and reused so that
// the Bernoulli identity s^2 + h = 0 holds bit-exactly for y in {0,1}.

namespace {

struct Terms {
  double a, b, tk, tl, s, h, cube_eta, cube_comp, y;
};

Terms terms(const SbmObservation& obs, const SbmSlots& p) {
  Terms t{};
  t.a = 1.0 / static_cast<double>(obs.n_i);
  t.b = 1.0 / static_cast<double>(obs.n_j);
  t.tk = p.theta_k;
  t.tl = p.theta_l;
  t.y = static_cast<double>(obs.y);
  const double inv_eta = 1.0 / p.eta;
  const double inv_comp = 1.0 / (1.0 - p.eta);
  const double sq_eta = inv_eta * inv_eta;
  const double sq_comp = inv_comp * inv_comp;
  t.s = t.y * inv_eta - (1.0 - t.y) * inv_comp;
  t.h = -(t.y * sq_eta) - ((1.0 - t.y) * sq_comp);
  t.cube_eta = inv_eta * sq_eta;
  t.cube_comp = inv_comp * sq_comp;
  return t;
}

}  // namespace

SbmSlots sbm_slots(const SbmObservation& obs, const FittedSbm& fit) {
  return {fit.theta_at(obs.k), fit.theta_at(obs.l), fit.eta_at(obs.k, obs.l)};
}

double sbm_log_f(const SbmObservation& obs, const SbmSlots& p) {
  const double y = obs.y;
  return std::log(p.theta_k) / static_cast<double>(obs.n_i) +
         std::log(p.theta_l) / static_cast<double>(obs.n_j) + y * std::log(p.eta) +
         (1.0 - y) * std::log1p(-p.eta);
}

Vec3 sbm_score(const SbmObservation& obs, const SbmSlots& p) {
  const Terms t = terms(obs, p);
  return {t.a / t.tk, t.b / t.tl, t.s};
}

Vec3 sbm_score(const SbmObservation& obs, const FittedSbm& fit) {
  return sbm_score(obs, sbm_slots(obs, fit));
}

Vec3 sbm_hessian_diagonal(const SbmObservation& obs, const SbmSlots& p) {
  const Terms t = terms(obs, p);
  return {-t.a / (t.tk * t.tk), -t.b / (t.tl * t.tl), t.h};
}

Vec6 sbm_d_vector(const SbmObservation& obs, const SbmSlots& p) {
  const Terms t = terms(obs, p);
  const double tk2 = t.tk * t.tk;
  const double tl2 = t.tl * t.tl;
  return {
      (t.a * t.a) / tk2 + (-t.a) / tk2,
      (t.a * t.b) / (t.tk * t.tl),
      (t.a / t.tk) * t.s,
      (t.b * t.b) / tl2 + (-t.b) / tl2,
      (t.b / t.tl) * t.s,
      t.s * t.s + t.h,
  };
}

Vec6 sbm_d_vector(const SbmObservation& obs, const FittedSbm& fit) {
  return sbm_d_vector(obs, sbm_slots(obs, fit));
}

Jac63 sbm_d_jacobian(const SbmObservation& obs, const SbmSlots& p) {
  const Terms t = terms(obs, p);
  const double tk2 = t.tk * t.tk, tk3 = tk2 * t.tk;
  const double tl2 = t.tl * t.tl, tl3 = tl2 * t.tl;
  Jac63 j{};
  j[0] = {-2.0 * t.a * t.a / tk3 + 2.0 * t.a / tk3, 0.0, 0.0};
  j[1] = {-(t.a * t.b) / (tk2 * t.tl), -(t.a * t.b) / (t.tk * tl2), 0.0};
  j[2] = {-(t.a / tk2) * t.s, 0.0, (t.a / t.tk) * t.h};
  j[3] = {0.0, -2.0 * t.b * t.b / tl3 + 2.0 * t.b / tl3, 0.0};
  j[4] = {0.0, -(t.b / tl2) * t.s, (t.b / t.tl) * t.h};
  j[5] = {0.0, 0.0,
          2.0 * (t.s * t.h) + 2.0 * (t.y * t.cube_eta) - 2.0 * ((1.0 - t.y) * t.cube_comp)};
  return j;
}

// ---------------------------------------------------------------------------
// Sample matrices

SbmMatrices sbm_matrices(std::span<const SbmObservation> obs, const FittedSbm& fit) {
  if (obs.empty()) throw Error(ErrorCode::InvalidArgument, "no observations");
  std::array<CompensatedSum, 3> a{};
  std::array<CompensatedSum, 6> d{};
  std::array<std::array<CompensatedSum, 3>, 6> jac{};
  for (const auto& o : obs) {
    const SbmSlots p = sbm_slots(o, fit);
    const Vec3 hess = sbm_hessian_diagonal(o, p);
    const Vec6 dv = sbm_d_vector(o, p);
    const Jac63 jv = sbm_d_jacobian(o, p);
    for (std::size_t c = 0; c < 3; ++c) a[c].add(hess[c]);
    for (std::size_t l = 0; l < 6; ++l) {
      d[l].add(dv[l]);
      for (std::size_t c = 0; c < 3; ++c) jac[l][c].add(jv[l][c]);
    }
  }
  const double count = static_cast<double>(obs.size());
  SbmMatrices m;
  m.A = Matrix(3, 3);
  for (std::size_t c = 0; c < 3; ++c) m.A(c, c) = a[c].value() / count;
  m.D.resize(6);
  m.gradD = Matrix(6, 3);
  for (std::size_t l = 0; l < 6; ++l) {
    m.D[l] = d[l].value() / count;
    for (std::size_t c = 0; c < 3; ++c) m.gradD(l, c) = jac[l][c].value() / count;
  }
  return m;
}

Matrix sbm_vn(std::span<const SbmObservation> obs, const FittedSbm& fit,
              const SbmMatrices& mats) {
  Vec3 inv_a{};
  for (std::size_t c = 0; c < 3; ++c) {
    if (std::abs(mats.A(c, c)) < kSingularAnThreshold) {
      throw Error(ErrorCode::SingularAn,
                  "A_n diagonal entry " + std::to_string(c + 1) + " is numerically zero");
    }
    inv_a[c] = 1.0 / mats.A(c, c);
  }
  std::array<CompensatedSum, 21> acc{};
  for (const auto& o : obs) {
    const SbmSlots p = sbm_slots(o, fit);
    const Vec3 score = sbm_score(o, p);
    const Vec6 dv = sbm_d_vector(o, p);
    Vec3 w{};
    for (std::size_t c = 0; c < 3; ++c) w[c] = score[c] * inv_a[c];
    Vec6 r{};
    for (std::size_t l = 0; l < 6; ++l) {
      double correction = 0.0;
      for (std::size_t c = 0; c < 3; ++c) correction += mats.gradD(l, c) * w[c];
      r[l] = dv[l] - correction;
    }
    std::size_t idx = 0;
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t b = a; b < 6; ++b) acc[idx++].add(r[a] * r[b]);
  }
  const double count = static_cast<double>(obs.size());
  Matrix v(6, 6);
  std::size_t idx = 0;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a; b < 6; ++b) {
      v(a, b) = v(b, a) = acc[idx++].value() / count;
    }
  return v;
}

Matrix sbm_vn(std::span<const SbmObservation> obs, const FittedSbm& fit) {
  return sbm_vn(obs, fit, sbm_matrices(obs, fit));
}

// ---------------------------------------------------------------------------
// Test statistic

SbmModeResult sbm_quadratic_test(std::span<const double> D, const Matrix& V, SbmMode mode,
                                 double factor, double alpha) {
  if (D.size() != 6 || V.rows() != 6 || V.cols() != 6) {
    throw Error(ErrorCode::InvalidArgument, "expected a 6-vector and a 6x6 matrix");
  }
  SbmModeResult result;
  result.mode = mode;
  std::vector<std::size_t> keep;
  if (mode == SbmMode::Paper) {
    for (std::size_t c = 0; c < 6; ++c) keep.push_back(c);
  } else {
    double max_diag = 0.0;
    for (std::size_t c = 0; c < 6; ++c) max_diag = std::max(max_diag, V(c, c));
    const double tolerance = kReducedDropRelative * max_diag + 1e-300;
    for (std::size_t c = 0; c < 6; ++c) {
      if (c == 5 || !(V(c, c) > tolerance)) {
        result.dropped.push_back(c + 1);
      } else {
        keep.push_back(c);
      }
    }
  }
  result.df = static_cast<int>(keep.size());
  if (keep.empty()) {
    result.decision = Decision::Degenerate;
    result.degenerate_reason = "AllCoordinatesDropped";
    return result;
  }
  const Matrix block = V.principal(keep);
  bool finite = true;
  for (double v : block.data()) finite = finite && std::isfinite(v);
  if (!finite) {
    result.decision = Decision::Degenerate;
    result.degenerate_reason = "NonFiniteVn";
    return result;
  }
  const InverseResult inverse = guarded_inverse(block, kSbmConditionLimit);
  if (const auto* report = std::get_if<SingularityReport>(&inverse)) {
    result.decision = Decision::Degenerate;
    result.condition_estimate = report->condition_estimate;
    for (std::size_t idx : report->near_null) result.near_null.push_back(keep[idx - 1] + 1);
    result.degenerate_reason = "SingularVn";
    return result;
  }
  const Matrix& inv = std::get<Matrix>(inverse);
  result.condition_estimate = condition_estimate(block);
  std::vector<double> dk(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) dk[a] = D[keep[a]];
  const std::vector<double> solved = inv * std::span<const double>(dk);
  double quad = 0.0;
  for (std::size_t a = 0; a < keep.size(); ++a) quad += dk[a] * solved[a];
  const double stat = std::max(0.0, factor * quad);
  result.statistic = stat;
  result.critical_value = chi2_quantile(1.0 - alpha, result.df);
  result.p_value = chi2_sf(stat, result.df);
  result.decision = stat <= *result.critical_value ? Decision::WellSpecified
                                                   : Decision::Misspecified;
  return result;
}

SbmTestReport sbm_test(const Graph& g, const SbmTestOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
  }
  SbmTestReport report;
  report.options = options;
  Graph labelled = g;
  if (options.fit_method == FitMethod::VariationalEM) {
    if (options.blocks < 1) {
      throw Error(ErrorCode::InvalidArgument, "variational EM needs a block count");
    }
    VemOptions vem;
    vem.restarts = options.vem_restarts;
    vem.boundary = options.boundary;
    FittedSbm latent = sbm_vem_fit(g, options.blocks, options.seed, vem);
    labelled = g.with_labels(latent.labels_used);
    report.fit = sbm_mle_observed(labelled, options.boundary, options.blocks);
    report.fit.method = FitMethod::VariationalEM;
    report.fit.em = std::move(latent.em);
  } else {
    report.fit = sbm_mle_observed(g, options.boundary, options.blocks > 0 ? options.blocks : 0);
  }
  const SbmObservationSet obs = sbm_observations(labelled, options.isolated);
  if (obs.items.empty()) throw Error(ErrorCode::InvalidArgument, "no observations remain");
  report.observations = static_cast<std::int64_t>(obs.items.size());
  report.dropped_observations = obs.dropped;
  report.factor = options.size_factor == SbmSizeFactor::PairCount
                      ? static_cast<double>(obs.items.size())
                      : static_cast<double>(g.n());
  report.matrices = sbm_matrices(obs.items, report.fit);
  report.V = sbm_vn(obs.items, report.fit, report.matrices);
  report.paper = sbm_quadratic_test(report.matrices.D, report.V, SbmMode::Paper, report.factor,
                                    options.alpha);
  report.reduced = sbm_quadratic_test(report.matrices.D, report.V, SbmMode::Reduced,
                                      report.factor, options.alpha);
  return report;
}

}  // namespace netmisfit
