#include "netmisfit/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "netmisfit/error.hpp"

namespace netmisfit {
namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidProbability,
                std::string(what) + " must lie in [0,1], got " + std::to_string(p));
  }
}

void check_n(Vertex n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "samplers need n >= 2");
}

void check_divisible(Vertex n) {
  if (n % kScenarioGroups != 0) {
    throw Error(ErrorCode::IndivisibleN,
                "n = " + std::to_string(n) + " is not divisible by " +
                    std::to_string(kScenarioGroups));
  }
}

std::vector<double> draw_multipliers(StreamRng& rng, const Scenario2Options& options) {
  if (options.multipliers) {
    for (double p : *options.multipliers) check_probability(p, "multiplier");
    return {options.multipliers->begin(), options.multipliers->end()};
  }
  std::vector<double> out(kScenarioGroups);
  for (double& p : out) p = rng.uniform_open();
  return out;
}

std::vector<BlockId> draw_labels(StreamRng& rng, Vertex n, const SbmParams& params,
                                 const std::optional<std::vector<BlockId>>& fixed) {
  if (fixed) {
    detail::validate_labels(*fixed, n);
    for (BlockId b : *fixed) {
      if (b > params.m) {
        throw Error(ErrorCode::InvalidLabel, "label " + std::to_string(b) + " exceeds m");
      }
    }
    return *fixed;
  }
  std::vector<double> cumulative(params.theta.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < params.theta.size(); ++k) {
    acc += params.theta[k];
    cumulative[k] = acc;
  }
  std::vector<BlockId> labels(static_cast<std::size_t>(n));
  for (auto& label : labels) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    label = static_cast<BlockId>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                          params.m - 1)) + 1;
  }
  return labels;
}

template <typename PairProb>
Graph sample_pairs(Vertex n, StreamRng& rng, PairProb&& prob) {
  GraphBuilder builder(n);
  for (Vertex j = 1; j < n; ++j) {
    for (Vertex i = j + 1; i <= n; ++i) {
      if (rng.uniform() < prob(i, j)) builder.add_edge(i, j);
    }
  }
  return std::move(builder).build();
}

}  // namespace

void SbmParams::validate() const {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "block count must be >= 1");
  if (theta.size() != static_cast<std::size_t>(m) || eta.rows() != static_cast<std::size_t>(m) ||
      eta.cols() != static_cast<std::size_t>(m)) {
    throw Error(ErrorCode::InvalidArgument, "theta/eta dimensions do not match m");
  }
  double total = 0.0;
  for (double t : theta) {
    // m = 1 forces theta = (1); otherwise each entry is strictly interior.
    if (!(t > 0.0 && (t < 1.0 || m == 1))) {
      throw Error(ErrorCode::InvalidProbability, "block probabilities must lie in (0,1)");
    }
    total += t;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidProbability, "block probabilities must sum to 1");
  }
  for (std::size_t k = 0; k < eta.rows(); ++k) {
    for (std::size_t l = 0; l < eta.cols(); ++l) {
      check_probability(eta(k, l), "eta");
      if (eta(k, l) != eta(l, k)) throw Error(ErrorCode::InvalidProbability, "eta must be symmetric");
    }
  }
}

SbmParams SbmParams::with_uniform_theta(Matrix eta) {
  SbmParams p;
  p.m = static_cast<int>(eta.rows());
  p.theta.assign(eta.rows(), 1.0 / static_cast<double>(eta.rows()));
  p.eta = std::move(eta);
  return p;
}

std::string to_string(MultiplierVariant v) {
  switch (v) {
    case MultiplierVariant::LowerEndpoint: return "lower";
    case MultiplierVariant::Product: return "product";
    case MultiplierVariant::Max: return "max";
    case MultiplierVariant::Mean: return "mean";
  }
  return "lower";
}

MultiplierVariant parse_multiplier_variant(const std::string& s) {
  if (s == "lower") return MultiplierVariant::LowerEndpoint;
  if (s == "product") return MultiplierVariant::Product;
  if (s == "max") return MultiplierVariant::Max;
  if (s == "mean") return MultiplierVariant::Mean;
  throw Error(ErrorCode::InvalidArgument, "unknown multiplier variant '" + s + "'");
}

double pair_multiplier(std::span<const double> multipliers, Vertex i, Vertex j, Vertex n,
                       MultiplierVariant variant) {
  const Vertex group_size = n / kScenarioGroups;
  const double pi = multipliers[static_cast<std::size_t>((i - 1) / group_size)];
  const double pj = multipliers[static_cast<std::size_t>((j - 1) / group_size)];
  switch (variant) {
    case MultiplierVariant::LowerEndpoint: return i < j ? pi : pj;
    case MultiplierVariant::Product: return pi * pj;
    case MultiplierVariant::Max: return std::max(pi, pj);
    case MultiplierVariant::Mean: return 0.5 * (pi + pj);
  }
  return pj;
}

SampledGraph sample_er(Vertex n, double p, Seed seed) {
  check_n(n);
  check_probability(p, "p");
  StreamRng rng(seed);
  Graph g = sample_pairs(n, rng, [p](Vertex, Vertex) { return p; });
  return {std::move(g), SamplerMeta{"er", "null", seed, p, std::nullopt, {}, std::nullopt}};
}

SampledGraph sample_sbm(Vertex n, const SbmParams& params, Seed seed,
                        const std::optional<std::vector<BlockId>>& fixed_labels) {
  check_n(n);
  params.validate();
  StreamRng rng(seed);
  auto labels = draw_labels(rng, n, params, fixed_labels);
  Graph g = sample_pairs(n, rng, [&](Vertex i, Vertex j) {
    return params.eta_at(labels[static_cast<std::size_t>(i - 1)],
                         labels[static_cast<std::size_t>(j - 1)]);
  });
  return {g.with_labels(std::move(labels)),
          SamplerMeta{"sbm", "null", seed, std::nullopt, params, {}, std::nullopt}};
}

SampledGraph sample_erg_scenario2(Vertex n, double alpha, Seed seed,
                                  const Scenario2Options& options) {
  check_n(n);
  check_probability(alpha, "alpha");
  check_divisible(n);
  StreamRng rng(seed);
  auto multipliers = draw_multipliers(rng, options);
  Graph g = sample_pairs(n, rng, [&](Vertex i, Vertex j) {
    return alpha * pair_multiplier(multipliers, i, j, n, options.variant);
  });
  return {std::move(g), SamplerMeta{"er", "perturbed", seed, alpha, std::nullopt,
                                    std::move(multipliers), options.variant}};
}

SampledGraph sample_sbm_scenario2(Vertex n, const SbmParams& params, Seed seed,
                                  const Scenario2Options& options,
                                  const std::optional<std::vector<BlockId>>& fixed_labels) {
  check_n(n);
  params.validate();
  check_divisible(n);
  StreamRng rng(seed);
  auto multipliers = draw_multipliers(rng, options);
  auto labels = draw_labels(rng, n, params, fixed_labels);
  Graph g = sample_pairs(n, rng, [&](Vertex i, Vertex j) {
    return params.eta_at(labels[static_cast<std::size_t>(i - 1)],
                         labels[static_cast<std::size_t>(j - 1)]) *
           pair_multiplier(multipliers, i, j, n, options.variant);
  });
  return {g.with_labels(std::move(labels)),
          SamplerMeta{"sbm", "perturbed", seed, std::nullopt, params, std::move(multipliers),
                      options.variant}};
}

}  // namespace netmisfit
