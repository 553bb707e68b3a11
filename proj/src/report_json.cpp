#include "netmisfit/report_json.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

namespace netmisfit {

using nlohmann::json;

void put_number(json& obj, const std::string& key, std::optional<double> value,
                const std::string& reason) {
  if (value && std::isfinite(*value)) {
    obj[key] = *value;
    return;
  }
  obj[key] = nullptr;
  obj["null_reasons"][key] = value ? "NonFinite" : reason;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json seed_json(const Seed& seed) { return {{"master", seed.master}, {"stream", seed.stream}}; }

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json envelope(const std::string& model, const ReportContext& ctx) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = {{"name", ctx.command}, {"args", ctx.args}};
  j["model"] = model;
  return j;
}

}  // namespace

json provenance_json(const ReportContext& ctx) {
  json p;
  p["library_version"] = kVersion;
  p["seed"] = ctx.seed ? seed_json(*ctx.seed) : json(nullptr);
  p["timestamp"] = ctx.timestamp ? json(utc_now()) : json(nullptr);
  return p;
}

json erg_report_json(const ErgTestReport& r, const ReportContext& ctx) {
  json j = envelope("erg", ctx);
  json fit;
  fit["method"] = "mle";
  fit["parameters"] = {{"theta_hat", r.fit.theta_hat}, {"density", r.fit.density}};
  fit["metadata"] = {{"observations", r.observations}};
  j["fit"] = fit;

  json test;
  put_number(test, "statistic", r.statistic, "Degenerate");
  test["df"] = r.df;
  put_number(test, "p_value", r.p_value, "Degenerate");
  test["critical_value"] = r.critical_value;
  test["alpha"] = r.alpha;
  test["decision"] = to_string(r.decision);
  test["mode"] = to_string(r.mode);
  test["size_factor"] = to_string(r.size_factor);
  test["factor"] = r.factor;
  j["test"] = test;

  json diag;
  diag["A_n"] = r.matrices.A;
  diag["B_n"] = r.matrices.B;
  put_number(diag, "C_n", r.matrices.C, "SingularA");
  diag["D_n"] = r.matrices.D;
  diag["grad_D_n"] = r.matrices.gradD;
  diag["V_n"] = r.residuals.V;
  diag["mean_d1_sq"] = r.residuals.mean_d1_sq;
  diag["max_abs_residual"] = r.residuals.max_abs_residual;
  diag["singularity_tolerance"] = r.singularity_tolerance;
  if (r.decision == Decision::Degenerate) diag["degenerate_reason"] = "SingularVn";
  j["diagnostics"] = diag;
  j["provenance"] = provenance_json(ctx);
  return j;
}

json sbm_mode_json(const SbmModeResult& m) {
  json j;
  j["mode"] = to_string(m.mode);
  put_number(j, "statistic", m.statistic, m.degenerate_reason);
  j["df"] = m.df;
  put_number(j, "p_value", m.p_value, m.degenerate_reason);
  put_number(j, "critical_value", m.critical_value, m.degenerate_reason);
  j["decision"] = to_string(m.decision);
  put_number(j, "condition_estimate", m.condition_estimate, "NotComputed");
  j["dropped_coordinates"] = m.dropped;
  j["near_null"] = m.near_null;
  if (!m.degenerate_reason.empty()) j["degenerate_reason"] = m.degenerate_reason;
  return j;
}

json sbm_report_json(const SbmTestReport& r, const ReportContext& ctx) {
  json j = envelope("sbm", ctx);
  json fit;
  fit["method"] = to_string(r.fit.method);
  fit["parameters"] = {{"m", r.fit.m}, {"theta", r.fit.theta}, {"eta", matrix_json(r.fit.eta)}};
  json meta;
  meta["clamped_cells"] = r.fit.clamped_cells;
  meta["boundary"] = r.options.boundary.clamp ? "clamp" : "strict";
  if (r.options.boundary.clamp) meta["epsilon"] = r.options.boundary.epsilon;
  if (r.fit.em) {
    const EmMeta& em = *r.fit.em;
    meta["em"] = {{"iterations", em.iterations},   {"elbo", em.elbo},
                  {"restarts", em.restarts},       {"best_restart", em.best_restart},
                  {"failed_restarts", em.failed_restarts}, {"converged", em.converged}};
    meta["labels"] = r.fit.labels_used;
  }
  fit["metadata"] = meta;
  j["fit"] = fit;

  const SbmModeResult& sel = r.selected();
  json test = sbm_mode_json(sel);
  test["alpha"] = r.options.alpha;
  test["size_factor"] = to_string(r.options.size_factor);
  test["factor"] = r.factor;
  j["test"] = test;

  json diag;
  diag["observations"] = r.observations;
  diag["dropped_observations"] = r.dropped_observations;
  diag["A_n_diagonal"] = {r.matrices.A(0, 0), r.matrices.A(1, 1), r.matrices.A(2, 2)};
  diag["D_n"] = r.matrices.D;
  diag["grad_D_n"] = matrix_json(r.matrices.gradD);
  diag["V_n"] = matrix_json(r.V);
  diag["modes"] = {{"paper", sbm_mode_json(r.paper)}, {"reduced", sbm_mode_json(r.reduced)}};
  j["diagnostics"] = diag;
  j["provenance"] = provenance_json(ctx);
  return j;
}

json sampler_meta_json(const SamplerMeta& m, const ReportContext& ctx) {
  json j = envelope(m.model, ctx);
  j["scenario"] = m.scenario;
  j["seed"] = seed_json(m.seed);
  if (m.alpha) j["alpha"] = *m.alpha;
  if (m.params) {
    j["params"] = {{"m", m.params->m},
                   {"theta", m.params->theta},
                   {"eta", matrix_json(m.params->eta)}};
  }
  if (!m.multipliers.empty()) j["multipliers"] = m.multipliers;
  if (m.variant) j["variant"] = to_string(*m.variant);
  j["provenance"] = provenance_json(ctx);
  return j;
}

json summary_json(const McSummary& s, const ReportContext& ctx) {
  const ScenarioSpec& spec = s.spec;
  json j = envelope(to_string(spec.model), ctx);
  json echo;
  echo["scenario"] = to_string(spec.scenario);
  echo["n"] = spec.n;
  echo["m"] = spec.model == Model::SBM ? json(spec.m) : json(nullptr);
  echo["replications"] = spec.replications;
  echo["alpha"] = spec.alpha;
  if (spec.model == Model::ERG) {
    echo["mode"] = to_string(spec.erg_mode);
    echo["size_factor"] = to_string(spec.erg_size_factor);
  } else {
    echo["mode"] = to_string(spec.sbm.mode);
    echo["size_factor"] = to_string(spec.sbm.size_factor);
    echo["fit_method"] = to_string(spec.sbm.fit_method);
    echo["boundary"] = spec.sbm.boundary.clamp ? "clamp" : "strict";
    if (spec.sbm.boundary.clamp) echo["epsilon"] = spec.sbm.boundary.epsilon;
  }
  if (spec.scenario == Scenario::Perturbed) echo["variant"] = to_string(spec.variant);
  echo["master_seed"] = spec.master_seed;
  echo["workers"] = spec.workers;
  j["spec"] = echo;

  json counts;
  for (Outcome o : {Outcome::WellSpecified, Outcome::Misspecified, Outcome::Degenerate,
                    Outcome::EstimationFailed}) {
    counts[to_string(o)] = s.count(o);
  }
  json test;
  test["counts"] = counts;
  put_number(test, "proportion_well_specified", s.proportion_well_specified,
             "AllReplicationsFailed");
  test["denominator"] = s.denominator;
  test["failure_reasons"] = s.failure_reasons;
  j["test"] = test;

  if (!s.records.empty()) {
    json recs = json::array();
    for (const auto& r : s.records) {
      json rec;
      rec["index"] = r.index;
      rec["outcome"] = to_string(r.outcome);
      put_number(rec, "statistic", r.statistic, "NoStatistic");
      put_number(rec, "p_value", r.p_value, "NoStatistic");
      rec["df"] = r.df;
      if (!r.failure.empty()) rec["failure"] = r.failure;
      recs.push_back(std::move(rec));
    }
    j["records"] = std::move(recs);
  }
  json prov = provenance_json(ctx);
  prov["wall_seconds"] = s.wall_seconds;
  j["provenance"] = prov;
  return j;
}

json error_json(const std::string& code, const std::string& message, const ReportContext& ctx) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = {{"name", ctx.command}, {"args", ctx.args}};
  j["error"] = {{"code", code}, {"message", message}};
  j["provenance"] = provenance_json(ctx);
  return j;
}

}  // namespace netmisfit
