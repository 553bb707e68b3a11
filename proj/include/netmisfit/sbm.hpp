#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netmisfit/decision.hpp"
#include "netmisfit/graph.hpp"
#include "netmisfit/numerics.hpp"
#include "netmisfit/rng.hpp"

namespace netmisfit {

/// Sample unit U_t = (k, l, n_i, n_j, y) for pair (i, j), i > j: the blocks
/// and degrees of both endpoints and the edge indicator.
struct SbmObservation {
  BlockId k = 1;
  BlockId l = 1;
  std::int64_t n_i = 1;
  std::int64_t n_j = 1;
  int y = 0;
  friend bool operator==(const SbmObservation&, const SbmObservation&) = default;
};

enum class IsolatedPolicy {
  Reject,        // IsolatedVertex error
  DropIncident,  // skip every pair touching a degree-0 vertex
};

struct SbmObservationSet {
  std::vector<SbmObservation> items;
  std::int64_t dropped = 0;            // pairs skipped under DropIncident
  std::int64_t isolated_vertices = 0;
};

SbmObservationSet sbm_observations(const Graph& g,
                                   IsolatedPolicy policy = IsolatedPolicy::Reject);

/// What to do with an edge-probability estimate on the boundary {0, 1}.
struct BoundaryPolicy {
  bool clamp = false;
  double epsilon = 1e-6;

  static BoundaryPolicy strict() { return {}; }
  static BoundaryPolicy clamped(double eps) { return {true, eps}; }
};

enum class FitMethod { ObservedLabels, VariationalEM };
std::string to_string(FitMethod method);

struct EmMeta {
  int iterations = 0;
  double elbo = 0.0;
  int restarts = 0;
  int best_restart = 0;
  int failed_restarts = 0;
  bool converged = false;
  std::vector<double> elbo_trace;  // best restart, one value per iteration
};

struct FittedSbm {
  int m = 0;
  std::vector<double> theta;
  /// Symmetric; a cell with no vertex pairs (a singleton block's diagonal)
  /// is NaN and never referenced by an observation.
  Matrix eta;
  FitMethod method = FitMethod::ObservedLabels;
  std::optional<EmMeta> em;
  std::vector<BlockId> labels_used;
  int clamped_cells = 0;

  double theta_at(BlockId k) const { return theta[static_cast<std::size_t>(k - 1)]; }
  double eta_at(BlockId k, BlockId l) const {
    return eta(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(l - 1));
  }
};

/// Closed-form MLE given the graph's labels: theta_k = n_k / n,
/// eta_kl = e_kl / n_kl. `m` defaults to the largest label present.
FittedSbm sbm_mle_observed(const Graph& g, BoundaryPolicy boundary = BoundaryPolicy::strict(),
                           int m = 0);

struct VemOptions {
  int restarts = 5;
  int max_iterations = 200;
  double relative_tolerance = 1e-6;
  /// Responsibility mass below this marks a block as empty.
  double empty_block_mass = 1e-8;
  BoundaryPolicy boundary = BoundaryPolicy::strict();
};

/// Mean-field variational EM over latent labels; keeps the restart with the
/// highest evidence lower bound.
FittedSbm sbm_vem_fit(const Graph& g, int m, Seed seed, const VemOptions& options = {});
FittedSbm sbm_vem_fit(const Graph& g, int m, int restarts, Seed seed,
                      BoundaryPolicy boundary = BoundaryPolicy::strict());

/// The per-observation parameter triple (theta_k, theta_l, eta_kl). When
/// k == l the two theta slots are still treated as separate coordinates.
struct SbmSlots {
  double theta_k = 0.5;
  double theta_l = 0.5;
  double eta = 0.5;
};

SbmSlots sbm_slots(const SbmObservation& obs, const FittedSbm& fit);

using Vec3 = std::array<double, 3>;
using Vec6 = std::array<double, 6>;
using Jac63 = std::array<Vec3, 6>;

double sbm_log_f(const SbmObservation& obs, const SbmSlots& p);
Vec3 sbm_score(const SbmObservation& obs, const SbmSlots& p);
Vec3 sbm_score(const SbmObservation& obs, const FittedSbm& fit);
/// Diagonal of the Hessian of log f; every mixed partial is 0.
Vec3 sbm_hessian_diagonal(const SbmObservation& obs, const SbmSlots& p);
/// d_1..d_6 in the order (tk tk, tk tl, tk eta, tl tl, tl eta, eta eta).
Vec6 sbm_d_vector(const SbmObservation& obs, const SbmSlots& p);
Vec6 sbm_d_vector(const SbmObservation& obs, const FittedSbm& fit);
/// Row l, column c: d d_l / d slot_c, zero exactly where the display has 0.
Jac63 sbm_d_jacobian(const SbmObservation& obs, const SbmSlots& p);

struct SbmMatrices {
  Matrix A;               // 3x3 diagonal mean Hessian
  std::vector<double> D;  // 6 means of d_l
  Matrix gradD;           // 6x3 mean Jacobian
};

SbmMatrices sbm_matrices(std::span<const SbmObservation> obs, const FittedSbm& fit);

/// Threshold under which |A_n(c,c)| raises SingularAn.
inline constexpr double kSingularAnThreshold = 1e-12;

/// Mean of r_t r_t' with r_t = d_t - gradD A^-1 score_t.
Matrix sbm_vn(std::span<const SbmObservation> obs, const FittedSbm& fit,
              const SbmMatrices& mats);
Matrix sbm_vn(std::span<const SbmObservation> obs, const FittedSbm& fit);

enum class SbmMode {
  Paper,    // full 6x6 inverse, df = 6
  Reduced,  // drop null coordinates, df = retained rank
};
enum class SbmSizeFactor { PairCount, VertexCount };

std::string to_string(SbmMode mode);
std::string to_string(SbmSizeFactor factor);

inline constexpr double kSbmConditionLimit = 1e12;
inline constexpr double kReducedDropRelative = 1e-10;

struct SbmModeResult {
  SbmMode mode = SbmMode::Reduced;
  std::optional<double> statistic;
  int df = 0;
  std::optional<double> p_value;
  std::optional<double> critical_value;
  Decision decision = Decision::Degenerate;
  double condition_estimate = 0.0;
  std::vector<std::size_t> dropped;  // 1-based coordinates removed (Reduced)
  std::vector<std::size_t> near_null;
  std::string degenerate_reason;    // empty unless Degenerate
};

/// Quadratic-form decision F * D' V^-1 D for one mode (the stubbable core of
/// sbm_test).
SbmModeResult sbm_quadratic_test(std::span<const double> D, const Matrix& V, SbmMode mode,
                                 double factor, double alpha);

struct SbmTestOptions {
  FitMethod fit_method = FitMethod::ObservedLabels;
  SbmMode mode = SbmMode::Reduced;
  SbmSizeFactor size_factor = SbmSizeFactor::PairCount;
  double alpha = 0.05;
  BoundaryPolicy boundary = BoundaryPolicy::strict();
  IsolatedPolicy isolated = IsolatedPolicy::Reject;
  int blocks = 0;  // required for VariationalEM
  int vem_restarts = 5;
  Seed seed;
};

struct SbmTestReport {
  FittedSbm fit;
  SbmTestOptions options;
  double factor = 1.0;
  std::int64_t observations = 0;
  std::int64_t dropped_observations = 0;
  SbmMatrices matrices;
  Matrix V;
  SbmModeResult paper;
  SbmModeResult reduced;

  const SbmModeResult& selected() const {
    return options.mode == SbmMode::Paper ? paper : reduced;
  }
  Decision decision() const { return selected().decision; }
};

SbmTestReport sbm_test(const Graph& g, const SbmTestOptions& options = {});

}  // namespace netmisfit
