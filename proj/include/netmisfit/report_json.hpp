#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "netmisfit/ergm.hpp"
#include "netmisfit/montecarlo.hpp"
#include "netmisfit/samplers.hpp"
#include "netmisfit/sbm.hpp"

namespace netmisfit {

inline constexpr int kSchemaVersion = 1;

struct ReportContext {
  std::string command;
  std::vector<std::string> args;
  std::optional<Seed> seed;
  bool timestamp = true;
};

/// Stores a finite value, or null plus an entry under "null_reasons".
void put_number(nlohmann::json& obj, const std::string& key, std::optional<double> value,
                const std::string& reason);

nlohmann::json matrix_json(const Matrix& m);
nlohmann::json seed_json(const Seed& seed);
nlohmann::json provenance_json(const ReportContext& ctx);

nlohmann::json erg_report_json(const ErgTestReport& report, const ReportContext& ctx);
nlohmann::json sbm_report_json(const SbmTestReport& report, const ReportContext& ctx);
nlohmann::json sbm_mode_json(const SbmModeResult& result);
nlohmann::json sampler_meta_json(const SamplerMeta& meta, const ReportContext& ctx);
nlohmann::json summary_json(const McSummary& summary, const ReportContext& ctx);
nlohmann::json error_json(const std::string& code, const std::string& message,
                          const ReportContext& ctx);

}  // namespace netmisfit
