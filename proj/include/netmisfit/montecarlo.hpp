#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netmisfit/ergm.hpp"
#include "netmisfit/samplers.hpp"
#include "netmisfit/sbm.hpp"

namespace netmisfit {

enum class Model { ERG, SBM };
enum class Scenario { Null, Perturbed };

std::string to_string(Model model);
std::string to_string(Scenario scenario);
Model parse_model(const std::string& s);
Scenario parse_scenario(const std::string& s);

struct ScenarioSpec {
  Model model = Model::ERG;
  Scenario scenario = Scenario::Null;
  Vertex n = 50;
  int m = 0;  // SBM only
  int replications = 100;
  double alpha = 0.05;
  ErgMode erg_mode = ErgMode::PaperLiteral;
  ErgSizeFactor erg_size_factor = ErgSizeFactor::PairCount;
  /// fit_method, mode, size_factor, boundary and isolated policy are used;
  /// alpha, blocks and seed are filled per replication.
  SbmTestOptions sbm;
  MultiplierVariant variant = MultiplierVariant::LowerEndpoint;
  std::uint64_t master_seed = 0;
  int workers = 1;
  bool keep_records = false;

  /// Throws InvalidArgument / IndivisibleN.
  void validate() const;
};

enum class Outcome { WellSpecified, Misspecified, Degenerate, EstimationFailed };
std::string to_string(Outcome outcome);

struct ReplicationRecord {
  int index = 0;
  Outcome outcome = Outcome::EstimationFailed;
  std::optional<double> statistic;
  std::optional<double> p_value;
  int df = 0;
  std::string failure;  // error code name when EstimationFailed
};

struct McSummary {
  ScenarioSpec spec;
  std::array<int, 4> counts{};  // indexed by Outcome
  /// WellSpecified / (replications - EstimationFailed); NaN when every
  /// replication failed.
  double proportion_well_specified = 0.0;
  std::string denominator = "replications - estimation_failed";
  double wall_seconds = 0.0;
  std::vector<ReplicationRecord> records;  // empty unless keep_records
  std::map<std::string, int> failure_reasons;

  int count(Outcome o) const { return counts[static_cast<std::size_t>(o)]; }
  /// Misspecified / (replications - EstimationFailed).
  double rejection_rate() const;
};

/// The randomness of replication r: drawn parameters and the sampled graph.
SampledGraph draw_replication(const ScenarioSpec& spec, int r);
ReplicationRecord run_replication(const ScenarioSpec& spec, int r);
McSummary run_scenario(const ScenarioSpec& spec);

struct DirectionalReport {
  double null_rejection_rate = 0.0;
  double perturbed_rejection_rate = 0.0;
  double difference = 0.0;  // perturbed - null
  double z = 0.0;           // pooled two-proportion statistic
  bool flagged = false;     // perturbed rate strictly exceeds null rate
};

DirectionalReport compare_scenarios(const McSummary& null_summary,
                                    const McSummary& perturbed_summary);

std::string csv_header();
std::string csv_row(const McSummary& summary);

}  // namespace netmisfit
