#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "netmisfit/graph.hpp"
#include "netmisfit/numerics.hpp"
#include "netmisfit/rng.hpp"

namespace netmisfit {

struct SbmParams {
  int m = 0;
  std::vector<double> theta;  // block probabilities, sums to 1
  Matrix eta;                 // symmetric m x m edge probabilities

  /// Throws InvalidProbability when any invariant fails.
  void validate() const;
  double eta_at(BlockId k, BlockId l) const {
    return eta(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(l - 1));
  }

  static SbmParams with_uniform_theta(Matrix eta);
};

/// How a pair's probability picks up the group multipliers in the perturbed
/// scenarios. LowerEndpoint uses the group of the lower-indexed vertex.
enum class MultiplierVariant { LowerEndpoint, Product, Max, Mean };

std::string to_string(MultiplierVariant v);
MultiplierVariant parse_multiplier_variant(const std::string& s);

inline constexpr int kScenarioGroups = 10;

struct Scenario2Options {
  MultiplierVariant variant = MultiplierVariant::LowerEndpoint;
  /// Replaces the ten uniform multipliers (test hook). When set, no
  /// multiplier draws are consumed from the stream.
  std::optional<std::array<double, kScenarioGroups>> multipliers;
};

/// Everything the sampler drew or was given, for the audit block of reports.
struct SamplerMeta {
  std::string model;     // "er" | "sbm"
  std::string scenario;  // "null" | "perturbed"
  Seed seed;
  std::optional<double> alpha;
  std::optional<SbmParams> params;
  std::vector<double> multipliers;
  std::optional<MultiplierVariant> variant;
};

struct SampledGraph {
  Graph graph;
  SamplerMeta meta;
};

// Draw order within a stream: group multipliers (perturbed scenarios only),
// then vertex labels (SBM, unless fixed), then one uniform per pair in
// canonical edge order.

SampledGraph sample_er(Vertex n, double p, Seed seed);

SampledGraph sample_sbm(Vertex n, const SbmParams& params, Seed seed,
                        const std::optional<std::vector<BlockId>>& fixed_labels = std::nullopt);

SampledGraph sample_erg_scenario2(Vertex n, double alpha, Seed seed,
                                  const Scenario2Options& options = {});

SampledGraph sample_sbm_scenario2(Vertex n, const SbmParams& params, Seed seed,
                                  const Scenario2Options& options = {},
                                  const std::optional<std::vector<BlockId>>& fixed_labels =
                                      std::nullopt);

/// Multiplier applied to pair (i, j), i > j, under the given variant.
double pair_multiplier(std::span<const double> multipliers, Vertex i, Vertex j, Vertex n,
                       MultiplierVariant variant);

}  // namespace netmisfit
