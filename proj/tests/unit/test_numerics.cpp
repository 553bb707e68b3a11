#include <doctest.h>

#include <cmath>
#include <random>

#include "netmisfit/error.hpp"
#include "netmisfit/ergm.hpp"
#include "netmisfit/numerics.hpp"
#include "netmisfit/sbm.hpp"
#include "support/oracles.hpp"

using namespace netmisfit;

TEST_SUITE("numerics") {
  TEST_CASE("chi2_cdf against the integration oracle") {
    for (int q = 1; q <= 6; ++q) CHECK(chi2_cdf(0.0, q) == 0.0);
    CHECK(chi2_cdf(3.8415, 1) == doctest::Approx(0.95).epsilon(1e-3));
    CHECK(chi2_cdf(12.5916, 6) == doctest::Approx(0.95).epsilon(1e-3));
    for (int q = 1; q <= 6; ++q) {
      for (double x : {0.05, 0.5, 1.0, 2.5, 5.0, 9.0, 15.0, 30.0}) {
        CHECK(std::abs(chi2_cdf(x, q) - oracle::chi2_cdf_integrated(x, q)) < 1e-9);
      }
    }
  }

  TEST_CASE("chi2_cdf is monotone and bounded") {
    for (int q = 1; q <= 8; ++q) {
      double prev = 0.0;
      for (double x = 0.0; x < 80.0; x += 0.25) {
        const double c = chi2_cdf(x, q);
        CHECK(c >= prev);
        CHECK(c <= 1.0);
        CHECK(std::abs(c + chi2_sf(x, q) - 1.0) < 1e-14);
        prev = c;
      }
    }
  }

  TEST_CASE("chi2_quantile") {
    CHECK(std::abs(chi2_quantile(0.95, 1) - 3.8415) < 1e-3);
    CHECK(std::abs(chi2_quantile(0.95, 6) - 12.5916) < 1e-3);
    CHECK(std::abs(chi2_quantile(0.95, 1) - oracle::chi2_quantile_integrated(0.95, 1)) < 1e-6);
    CHECK(std::abs(chi2_quantile(0.95, 6) - oracle::chi2_quantile_integrated(0.95, 6)) < 1e-6);
    for (int q = 1; q <= 6; ++q) {
      for (int k = 1; k <= 99; ++k) {
        const double p = k / 100.0;
        CHECK(std::abs(chi2_cdf(chi2_quantile(p, q), q) - p) < 1e-8);
      }
    }
  }

  TEST_CASE("chi2 argument errors") {
    CHECK_THROWS_AS(chi2_cdf(-1.0, 1), Error);
    CHECK_THROWS_AS(chi2_cdf(1.0, 0), Error);
    CHECK_THROWS_AS(chi2_quantile(0.0, 1), Error);
    CHECK_THROWS_AS(chi2_quantile(1.0, 1), Error);
  }

  TEST_CASE("guarded_inverse examples") {
    const Matrix id = Matrix::identity(6);
    const InverseResult r = guarded_inverse(id, 1e12);
    REQUIRE(std::holds_alternative<Matrix>(r));
    CHECK(std::get<Matrix>(r) == id);

    const std::vector<double> diag{1, 1, 1, 1, 1, 0};
    const InverseResult s = guarded_inverse(Matrix::diagonal(diag), 1e12);
    REQUIRE(std::holds_alternative<SingularityReport>(s));
    CHECK(std::get<SingularityReport>(s).near_null == std::vector<std::size_t>{6});

    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    Matrix b(3, 3);
    for (double& v : b.data()) v = z(rng);
    Matrix spd = b * b.transpose();
    for (std::size_t i = 0; i < 3; ++i) spd(i, i) += 1.0;
    const InverseResult inv = guarded_inverse(spd, 1e12);
    REQUIRE(std::holds_alternative<Matrix>(inv));
    CHECK(oracle::inverse_residual(spd, std::get<Matrix>(inv)) <= 1e-10);
  }

  TEST_CASE("guarded_inverse flags ill conditioning") {
    const std::vector<double> diag{1.0, 1e-13};
    const InverseResult r = guarded_inverse(Matrix::diagonal(diag), 1e12);
    REQUIRE(std::holds_alternative<SingularityReport>(r));
    const auto& rep = std::get<SingularityReport>(r);
    CHECK(rep.condition_estimate == doctest::Approx(1e13));
    CHECK(rep.near_null == std::vector<std::size_t>{2});
    CHECK(condition_estimate(Matrix::diagonal(std::vector<double>{4.0, 2.0})) == 2.0);
  }

  TEST_CASE("compensated sum") {
    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    s.add(-1.0);
    CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-9));
  }

  TEST_CASE("finite_diff_gradient examples") {
    const auto sq = [](std::span<const double> x) { return x[0] * x[0]; };
    const std::vector<double> x{3.0};
    CHECK(std::abs(finite_diff_gradient(sq, x, 1e-5)[0] - 6.0) < 1e-8);

    const auto erg = [](std::span<const double> t) { return erg_log_f(1, t[0]); };
    const std::vector<double> t{std::log(2.0)};
    CHECK(std::abs(finite_diff_gradient(erg, t, 1e-5)[0] - 1.0 / 3.0) < 1e-6);

    const SbmObservation obs{1, 2, 2, 1, 1};
    const auto sbm = [&](std::span<const double> e) {
      return sbm_log_f(obs, SbmSlots{0.5, 0.5, e[0]});
    };
    const std::vector<double> eta{1.0 / 3.0};
    CHECK(std::abs(finite_diff_gradient(sbm, eta, 1e-5)[0] - 3.0) < 1e-5);

    const auto bad = [](std::span<const double> v) { return std::log(v[0]); };
    const std::vector<double> zero{0.0};
    try {
      finite_diff_gradient(bad, zero, 1e-5);
      FAIL("expected NonFiniteEvaluation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFiniteEvaluation);
    }
  }
}
