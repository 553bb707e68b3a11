#include "netmisfit/ergm.hpp"

#include <algorithm>
#include <cmath>

#include "netmisfit/error.hpp"
#include "netmisfit/numerics.hpp"

namespace netmisfit {

std::string to_string(ErgMode mode) {
  return mode == ErgMode::General ? "general" : "paper";
}

std::string to_string(ErgSizeFactor factor) {
  return factor == ErgSizeFactor::PairCount ? "pairs" : "paper";
}

ErgObservations erg_observations(const Graph& g) {
  if (g.n() < 2) throw Error(ErrorCode::InvalidArgument, "ERG observations need n >= 2");
  ErgObservations obs;
  obs.n = g.n();
  obs.u.reserve(static_cast<std::size_t>(pair_count(g.n())));
  for (Vertex j = 1; j < g.n(); ++j) {
    for (Vertex i = j + 1; i <= g.n(); ++i) obs.u.push_back(g.has_edge(i, j) ? 1 : 0);
  }
  return obs;
}

FittedErg erg_mle(const ErgObservations& obs) {
  if (obs.u.empty()) throw Error(ErrorCode::InvalidArgument, "no observations");
  std::int64_t ones = 0;
  for (auto v : obs.u) ones += v;
  const auto total = static_cast<std::int64_t>(obs.u.size());
  if (ones == 0 || ones == total) {
    throw Error(ErrorCode::DegenerateEstimate,
                ones == 0 ? "edge density 0 gives theta_hat = -inf"
                          : "edge density 1 gives theta_hat = +inf");
  }
  FittedErg fit;
  fit.density = static_cast<double>(ones) / static_cast<double>(total);
  fit.theta_hat = std::log(fit.density / (1.0 - fit.density));
  return fit;
}

double erg_log_f(int u, double theta) {
  // log(1 + e^theta) evaluated stably for large |theta|.
  const double softplus = theta > 0 ? theta + std::log1p(std::exp(-theta))
                                    : std::log1p(std::exp(theta));
  return u * theta - softplus;
}

double erg_score(int u, double theta) { return u - logistic(theta); }

double erg_hessian(double theta) {
  const double p = logistic(theta);
  return -p * (1.0 - p);
}

double erg_d1(int u, double theta) {
  const double p = logistic(theta);
  return u * u - 2.0 * u * p + p * (2.0 * p - 1.0);
}

double erg_d1_derivative(int u, double theta) {
  const double p = logistic(theta);
  const double q = p * (1.0 - p);
  return -2.0 * u * q + q * (4.0 * p - 1.0);
}

ErgMatrices erg_matrices(const ErgObservations& obs, const FittedErg& fit) {
  const double theta = fit.theta_hat;
  const double p = logistic(theta);
  CompensatedSum b, d, gd;
  for (auto v : obs.u) {
    const int u = v;
    const double s = u - p;
    b.add(s * s);
    d.add(erg_d1(u, theta));
    gd.add(erg_d1_derivative(u, theta));
  }
  const double count = static_cast<double>(obs.u.size());
  ErgMatrices m;
  m.A = erg_hessian(theta);
  m.B = b.value() / count;
  m.C = m.B / (m.A * m.A);
  m.D = d.value() / count;
  m.gradD = gd.value() / count;
  return m;
}

ErgResidualSummary erg_residuals(const ErgObservations& obs, const FittedErg& fit,
                                 const ErgMatrices& mats, ErgMode mode) {
  const double theta = fit.theta_hat;
  const double p = logistic(theta);
  const double jacobian = mode == ErgMode::General ? mats.gradD : mats.D;
  const double coefficient = jacobian / mats.A;
  CompensatedSum v, d1sq;
  double max_abs = 0.0;
  for (auto value : obs.u) {
    const int u = value;
    const double d1 = erg_d1(u, theta);
    const double r = d1 - coefficient * (u - p);
    v.add(r * r);
    d1sq.add(d1 * d1);
    max_abs = std::max(max_abs, std::abs(r));
  }
  const double count = static_cast<double>(obs.u.size());
  return {v.value() / count, d1sq.value() / count, max_abs};
}

double erg_vn(const ErgObservations& obs, const FittedErg& fit, ErgMode mode) {
  return erg_residuals(obs, fit, erg_matrices(obs, fit), mode).V;
}

double erg_singularity_tolerance(double mean_d1_sq) { return 1e-10 * mean_d1_sq + 1e-300; }

ErgTestReport erg_test(const Graph& g, double alpha, ErgMode mode, ErgSizeFactor size_factor) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
  }
  const auto obs = erg_observations(g);
  ErgTestReport report;
  report.fit = erg_mle(obs);
  report.alpha = alpha;
  report.mode = mode;
  report.size_factor = size_factor;
  report.observations = static_cast<std::int64_t>(obs.u.size());
  report.factor = size_factor == ErgSizeFactor::PairCount
                      ? static_cast<double>(report.observations)
                      : 1.0;
  report.matrices = erg_matrices(obs, report.fit);
  report.residuals = erg_residuals(obs, report.fit, report.matrices, mode);
  report.singularity_tolerance = erg_singularity_tolerance(report.residuals.mean_d1_sq);
  report.critical_value = chi2_quantile(1.0 - alpha, 1);

  if (report.residuals.V < report.singularity_tolerance) {
    report.decision = Decision::Degenerate;
    return report;
  }
  const double stat = report.factor * report.matrices.D * report.matrices.D / report.residuals.V;
  report.statistic = stat;
  report.p_value = chi2_sf(stat, 1);
  report.decision = stat <= report.critical_value ? Decision::WellSpecified
                                                  : Decision::Misspecified;
  return report;
}

}  // namespace netmisfit
