#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netmisfit/decision.hpp"
#include "netmisfit/graph.hpp"

namespace netmisfit {

/// Edge indicators U_t of the one-parameter exponential random graph, in
/// canonical pair order.
struct ErgObservations {
  Vertex n = 0;
  std::vector<std::uint8_t> u;
};

struct FittedErg {
  double theta_hat = 0.0;
  double density = 0.5;
};

enum class ErgMode {
  General,       // V_n residual uses gradD_n (general information-matrix form)
  PaperLiteral,  // V_n residual uses D_n in place of gradD_n
};

enum class ErgSizeFactor {
  PairCount,         // multiply by C(n,2)
  PaperLiteralNone,  // no multiplier
};

std::string to_string(ErgMode mode);
std::string to_string(ErgSizeFactor factor);

inline double logistic(double theta) { return 1.0 / (1.0 + std::exp(-theta)); }

ErgObservations erg_observations(const Graph& g);

/// Maximum likelihood fit; throws DegenerateEstimate when the density is 0 or 1.
FittedErg erg_mle(const ErgObservations& obs);

// Per-observation derivatives of log f(U; theta) = U theta - log(1 + e^theta).
double erg_log_f(int u, double theta);
double erg_score(int u, double theta);
double erg_hessian(double theta);
/// score^2 + second derivative.
double erg_d1(int u, double theta);
/// d/dtheta of erg_d1.
double erg_d1_derivative(int u, double theta);

struct ErgMatrices {
  double A = 0.0;  // mean Hessian
  double B = 0.0;  // mean squared score
  double C = 0.0;  // A^-1 B A^-1
  double D = 0.0;  // mean d_1
  double gradD = 0.0;
};

ErgMatrices erg_matrices(const ErgObservations& obs, const FittedErg& fit);

struct ErgResidualSummary {
  double V = 0.0;
  double mean_d1_sq = 0.0;
  double max_abs_residual = 0.0;
};

ErgResidualSummary erg_residuals(const ErgObservations& obs, const FittedErg& fit,
                                 const ErgMatrices& mats, ErgMode mode);
double erg_vn(const ErgObservations& obs, const FittedErg& fit, ErgMode mode);

struct ErgTestReport {
  FittedErg fit;
  std::optional<double> statistic;  // absent when Degenerate
  int df = 1;
  std::optional<double> p_value;
  double critical_value = 0.0;
  double alpha = 0.05;
  Decision decision = Decision::Degenerate;
  ErgMode mode = ErgMode::General;
  ErgSizeFactor size_factor = ErgSizeFactor::PairCount;
  double factor = 1.0;
  ErgMatrices matrices;
  ErgResidualSummary residuals;
  double singularity_tolerance = 0.0;
  std::int64_t observations = 0;
};

/// V_n below this (relative to mean d_1^2, with an absolute floor) is treated
/// as singular.
double erg_singularity_tolerance(double mean_d1_sq);

ErgTestReport erg_test(const Graph& g, double alpha, ErgMode mode = ErgMode::General,
                       ErgSizeFactor size_factor = ErgSizeFactor::PairCount);

}  // namespace netmisfit
