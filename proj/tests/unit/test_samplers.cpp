#include <doctest.h>

#include <array>
#include <cmath>

#include "netmisfit/error.hpp"
#include "netmisfit/numerics.hpp"
#include "netmisfit/samplers.hpp"

using namespace netmisfit;

namespace {

Matrix constant(std::size_t m, double v) { return Matrix(m, m, v); }

double mean_density(int seeds, const std::function<Graph(std::uint64_t)>& draw) {
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) total += draw(static_cast<std::uint64_t>(s)).density();
  return total / seeds;
}

}  // namespace

TEST_SUITE("samplers") {
  TEST_CASE("rng streams are reproducible and distinct") {
    StreamRng a(Seed{1, 2}), b(Seed{1, 2}), c(Seed{1, 3});
    int same = 0;
    for (int i = 0; i < 100; ++i) {
      const auto x = a(), y = b(), z = c();
      CHECK(x == y);
      same += x == z;
    }
    CHECK(same == 0);
    StreamRng u(Seed{9, 0});
    for (int i = 0; i < 1000; ++i) {
      const double v = u.uniform_open();
      CHECK(v > 0.0);
      CHECK(v < 1.0);
      CHECK(u.below(7) < 7);
    }
    CHECK_FALSE(Seed{1, 2}.lane(1) == Seed{1, 2});
  }

  TEST_CASE("sample_er examples") {
    CHECK(sample_er(5, 0.0, Seed{3, 0}).graph.edge_count() == 0);
    CHECK(sample_er(5, 1.0, Seed{3, 0}).graph.edge_count() == 10);
    const double d = mean_density(200, [](std::uint64_t s) { return sample_er(200, 0.3, Seed{s, 0}).graph; });
    CHECK(std::abs(d - 0.3) < 0.01);
    CHECK_THROWS_AS(sample_er(5, 1.5, Seed{}), Error);
    CHECK_THROWS_AS(sample_er(1, 0.5, Seed{}), Error);
    CHECK(sample_er(60, 0.4, Seed{8, 1}).graph == sample_er(60, 0.4, Seed{8, 1}).graph);
  }

  TEST_CASE("sample_sbm examples") {
    const SampledGraph k4 = sample_sbm(4, SbmParams::with_uniform_theta(constant(1, 1.0)), Seed{1, 0});
    CHECK(k4.graph.edge_count() == 6);
    for (BlockId l : k4.graph.labels()) CHECK(l == 1);
    CHECK(sample_sbm(4, SbmParams::with_uniform_theta(constant(2, 0.0)), Seed{1, 0}).graph.edge_count() == 0);

    Matrix eta(2, 2);
    eta(0, 0) = eta(1, 1) = 0.5;
    eta(0, 1) = eta(1, 0) = 0.1;
    const SbmParams params = SbmParams::with_uniform_theta(eta);
    double total = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const Graph g = sample_sbm(300, params, Seed{s, 0}).graph;
      std::int64_t edges = 0, pairs = 0;
      for (Vertex i = 2; i <= g.n(); ++i)
        for (Vertex j = 1; j < i; ++j)
          if (g.label(i) == 1 && g.label(j) == 1) {
            ++pairs;
            edges += g.has_edge(i, j);
          }
      total += static_cast<double>(edges) / static_cast<double>(pairs);
    }
    CHECK(std::abs(total / 100.0 - 0.5) < 0.03);
  }

  TEST_CASE("sample_sbm parameter validation") {
    SbmParams bad = SbmParams::with_uniform_theta(constant(2, 0.5));
    bad.eta(0, 1) = 0.2;
    CHECK_THROWS_AS(sample_sbm(10, bad, Seed{}), Error);
    SbmParams theta = SbmParams::with_uniform_theta(constant(2, 0.5));
    theta.theta = {0.7, 0.7};
    CHECK_THROWS_AS(sample_sbm(10, theta, Seed{}), Error);
    const SbmParams ok = SbmParams::with_uniform_theta(constant(2, 0.5));
    try {
      sample_sbm(3, ok, Seed{}, std::vector<BlockId>{1, 3, 1});
      FAIL("expected InvalidLabel");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidLabel);
    }
  }

  TEST_CASE("fixed labels give Bernoulli(eta_kl) pair indicators") {
    Matrix eta(2, 2);
    eta(0, 0) = 0.7;
    eta(1, 1) = 0.2;
    eta(0, 1) = eta(1, 0) = 0.4;
    const SbmParams params = SbmParams::with_uniform_theta(eta);
    std::vector<BlockId> labels(50);
    for (std::size_t v = 0; v < labels.size(); ++v) labels[v] = v < 25 ? 1 : 2;
    std::array<double, 3> hits{}, trials{};
    for (std::uint64_t s = 0; s < 90; ++s) {
      const Graph g = sample_sbm(50, params, Seed{s, 7}, labels).graph;
      for (Vertex i = 2; i <= 50; ++i)
        for (Vertex j = 1; j < i; ++j) {
          const int cell = g.label(i) == g.label(j) ? g.label(i) - 1 : 2;
          trials[static_cast<std::size_t>(cell)] += 1;
          hits[static_cast<std::size_t>(cell)] += g.has_edge(i, j);
        }
    }
    const std::array<double, 3> p{0.7, 0.2, 0.4};
    double stat = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      const double e1 = trials[c] * p[c], e0 = trials[c] * (1 - p[c]);
      stat += (hits[c] - e1) * (hits[c] - e1) / e1 +
              (trials[c] - hits[c] - e0) * (trials[c] - hits[c] - e0) / e0;
    }
    CHECK(trials[0] + trials[1] + trials[2] >= 1e5);
    CHECK(chi2_sf(stat, 3) > 0.001);
  }

  TEST_CASE("scenario 2 ERG") {
    CHECK(sample_erg_scenario2(50, 1e-300, Seed{4, 0}).graph.edge_count() == 0);
    Scenario2Options ones;
    ones.multipliers = std::array<double, kScenarioGroups>{};
    ones.multipliers->fill(1.0);
    for (std::uint64_t s = 0; s < 5; ++s) {
      CHECK(sample_erg_scenario2(50, 1.0, Seed{s, 0}, ones).graph == sample_er(50, 1.0, Seed{s, 0}).graph);
      CHECK(sample_erg_scenario2(50, 0.4, Seed{s, 0}, ones).graph == sample_er(50, 0.4, Seed{s, 0}).graph);
    }
    const double d = mean_density(500, [](std::uint64_t s) {
      return sample_erg_scenario2(100, 0.6, Seed{s, 0}).graph;
    });
    CHECK(std::abs(d - 0.3) < 0.02);
    const SampledGraph sg = sample_erg_scenario2(50, 0.5, Seed{2, 2});
    CHECK(sg.meta.multipliers.size() == kScenarioGroups);
    try {
      sample_erg_scenario2(55, 0.5, Seed{});
      FAIL("expected IndivisibleN");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IndivisibleN);
    }
  }

  TEST_CASE("scenario 2 SBM") {
    const SbmParams zero = SbmParams::with_uniform_theta(constant(2, 0.0));
    CHECK(sample_sbm_scenario2(50, zero, Seed{1, 0}).graph.edge_count() == 0);
    Scenario2Options ones;
    ones.multipliers = std::array<double, kScenarioGroups>{};
    ones.multipliers->fill(1.0);
    const SbmParams p = SbmParams::with_uniform_theta(constant(3, 0.3));
    for (std::uint64_t s = 0; s < 5; ++s) {
      CHECK(sample_sbm_scenario2(60, p, Seed{s, 1}, ones).graph == sample_sbm(60, p, Seed{s, 1}).graph);
    }
    const SbmParams flat = SbmParams::with_uniform_theta(constant(2, 0.4));
    const double d = mean_density(500, [&](std::uint64_t s) {
      return sample_sbm_scenario2(100, flat, Seed{s, 0}).graph;
    });
    CHECK(std::abs(d - 0.2) < 0.02);
  }

  TEST_CASE("pair multiplier variants") {
    std::array<double, 10> mult{};
    for (std::size_t k = 0; k < mult.size(); ++k) mult[k] = 0.1 * static_cast<double>(k + 1);
    // n = 20: vertex 3 is in group 2, vertex 15 in group 8.
    CHECK(pair_multiplier(mult, 15, 3, 20, MultiplierVariant::LowerEndpoint) == doctest::Approx(0.2));
    CHECK(pair_multiplier(mult, 15, 3, 20, MultiplierVariant::Product) == doctest::Approx(0.16));
    CHECK(pair_multiplier(mult, 15, 3, 20, MultiplierVariant::Max) == doctest::Approx(0.8));
    CHECK(pair_multiplier(mult, 15, 3, 20, MultiplierVariant::Mean) == doctest::Approx(0.5));
    CHECK(parse_multiplier_variant("product") == MultiplierVariant::Product);
    CHECK(to_string(MultiplierVariant::LowerEndpoint) == "lower");
  }
}
