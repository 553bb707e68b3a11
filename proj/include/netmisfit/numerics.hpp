#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace netmisfit {

/// Small dense row-major matrix. The statistic pipeline never goes beyond
/// 6x6, so no expression templates or BLAS.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Matrix transpose() const;
  /// Square sub-matrix on the given (0-based) indices.
  Matrix principal(std::span<const std::size_t> keep) const;
  double max_abs() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend std::vector<double> operator*(const Matrix& a, std::span<const double> x);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline constexpr std::size_t kMaxSmallDim = 8;

/// Neumaier-compensated running sum. Order of add() calls fixes the result.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

double chi2_cdf(double x, int df);
/// Upper tail 1 - cdf, computed without cancellation.
double chi2_sf(double x, int df);
double chi2_pdf(double x, int df);
double chi2_quantile(double p, int df);

struct SingularityReport {
  double condition_estimate = 0.0;
  /// 1-based column indices whose pivot fell below max_pivot / cond_limit.
  std::vector<std::size_t> near_null;
};

using InverseResult = std::variant<Matrix, SingularityReport>;

/// Gauss-Jordan inverse with partial pivoting. Condition is estimated as the
/// ratio of largest to smallest absolute pivot; above cond_limit a
/// SingularityReport is returned instead of an inverse.
InverseResult guarded_inverse(const Matrix& m, double cond_limit);

/// The pivot-ratio condition estimate used by guarded_inverse.
double condition_estimate(const Matrix& m);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h per coordinate.
std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h);

}  // namespace netmisfit
