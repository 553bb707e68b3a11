#include "netmisfit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "netmisfit/error.hpp"

namespace netmisfit {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::principal(std::span<const std::size_t> keep) const {
  Matrix out(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b) out(a, b) = (*this)(keep[a], keep[b]);
  return out;
}

double Matrix::max_abs() const {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorCode::InvalidArgument, "matrix shape mismatch");
  Matrix out(a.rows_, b.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double v = a(r, k);
      for (std::size_t c = 0; c < b.cols_; ++c) out(r, c) += v * b(k, c);
    }
  return out;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols_ != x.size()) throw Error(ErrorCode::InvalidArgument, "matrix-vector shape mismatch");
  std::vector<double> out(a.rows_, 0.0);
  for (std::size_t r = 0; r < a.rows_; ++r)
    for (std::size_t c = 0; c < a.cols_; ++c) out[r] += a(r, c) * x[c];
  return out;
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    carry_ += (sum_ - t) + x;
  } else {
    carry_ += (x - t) + sum_;
  }
  sum_ = t;
}

namespace {

constexpr int kGammaMaxIter = 1000;
constexpr double kGammaEps = 1e-16;

double gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kGammaMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x)) {
    throw Error(ErrorCode::InvalidArgument, "incomplete gamma needs a > 0, x >= 0");
  }
}

void check_df(int df) {
  if (df < 1) throw Error(ErrorCode::InvalidArgument, "chi-square df must be >= 1");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double chi2_cdf(double x, int df) {
  check_df(df);
  if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "chi2_cdf needs x >= 0");
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi2_sf(double x, int df) {
  check_df(df);
  if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "chi2_sf needs x >= 0");
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double chi2_pdf(double x, int df) {
  check_df(df);
  if (x < 0.0) return 0.0;
  const double k = 0.5 * df;
  if (x == 0.0) return df == 2 ? 0.5 : (df == 1 ? std::numeric_limits<double>::infinity() : 0.0);
  return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 - std::lgamma(k));
}

double chi2_quantile(double p, int df) {
  check_df(df);
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "chi2_quantile needs p in (0,1)");
  }
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(df));
  while (chi2_cdf(hi, df) < p) {
    lo = hi;
    hi *= 2.0;
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double err = chi2_cdf(x, df) - p;
    if (std::abs(err) <= 1e-15) break;
    if (err > 0.0) hi = x; else lo = x;
    const double dens = chi2_pdf(x, df);
    double next = (dens > 0.0 && std::isfinite(dens)) ? x - err / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    x = next;
  }
  return x;
}

InverseResult guarded_inverse(const Matrix& m, double cond_limit) {
  if (!m.square() || m.rows() == 0 || m.rows() > kMaxSmallDim) {
    throw Error(ErrorCode::InvalidArgument,
                "guarded_inverse needs a square matrix of dimension 1.." +
                    std::to_string(kMaxSmallDim));
  }
  for (double v : m.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entry");
  }
  const std::size_t n = m.rows();
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  std::vector<double> pivots(n, 0.0);
  const double scale = m.max_abs();
  bool singular = false;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a(r, k)) > std::abs(a(best, k))) best = r;
    }
    const double pivot = a(best, k);
    pivots[k] = std::abs(pivot);
    // An exactly-null column (relative to the matrix scale) cannot be
    // eliminated; keep going so the report names every null column.
    if (pivots[k] <= scale * std::numeric_limits<double>::epsilon() * 0.5 || pivot == 0.0) {
      pivots[k] = 0.0;
      singular = true;
      continue;
    }
    if (best != k) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a(k, c), a(best, c));
        std::swap(inv(k, c), inv(best, c));
      }
    }
    const double inv_pivot = 1.0 / a(k, k);
    for (std::size_t c = 0; c < n; ++c) {
      a(k, c) *= inv_pivot;
      inv(k, c) *= inv_pivot;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k) continue;
      const double factor = a(r, k);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= factor * a(k, c);
        inv(r, c) -= factor * inv(k, c);
      }
    }
  }

  const double max_pivot = *std::max_element(pivots.begin(), pivots.end());
  const double min_pivot = *std::min_element(pivots.begin(), pivots.end());
  const double cond = (min_pivot > 0.0) ? max_pivot / min_pivot
                                        : std::numeric_limits<double>::infinity();
  if (singular || !(cond <= cond_limit)) {
    SingularityReport report;
    report.condition_estimate = cond;
    for (std::size_t k = 0; k < n; ++k) {
      if (pivots[k] == 0.0 || pivots[k] * cond_limit < max_pivot) report.near_null.push_back(k + 1);
    }
    return report;
  }
  return inv;
}

double condition_estimate(const Matrix& m) {
  return std::get<SingularityReport>(guarded_inverse(m, 0.0)).condition_estimate;
}

std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = f(point);
    point[i] = saved - h;
    const double down = f(point);
    point[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw Error(ErrorCode::NonFiniteEvaluation,
                  "non-finite evaluation near coordinate " + std::to_string(i + 1));
    }
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace netmisfit
