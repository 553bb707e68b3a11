#include "netmisfit/montecarlo.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "netmisfit/error.hpp"

namespace netmisfit {

std::string to_string(Model model) { return model == Model::ERG ? "erg" : "sbm"; }
std::string to_string(Scenario scenario) {
  return scenario == Scenario::Null ? "null" : "perturbed";
}

Model parse_model(const std::string& s) {
  if (s == "erg") return Model::ERG;
  if (s == "sbm") return Model::SBM;
  throw Error(ErrorCode::InvalidArgument, "unknown model '" + s + "'");
}

Scenario parse_scenario(const std::string& s) {
  if (s == "null") return Scenario::Null;
  if (s == "perturbed") return Scenario::Perturbed;
  throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + s + "'");
}

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::WellSpecified: return "WellSpecified";
    case Outcome::Misspecified: return "Misspecified";
    case Outcome::Degenerate: return "Degenerate";
    case Outcome::EstimationFailed: return "EstimationFailed";
  }
  return "?";
}

void ScenarioSpec::validate() const {
  if (replications < 1) throw Error(ErrorCode::InvalidArgument, "replications must be >= 1");
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "n must be >= 2");
  if (n > kMaxVertices) throw Error(ErrorCode::CapacityExceeded, "n exceeds vertex capacity");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha in (0,1)");
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
  if (model == Model::SBM && (m < 1 || m > n)) {
    throw Error(ErrorCode::InvalidArgument, "SBM needs 1 <= m <= n");
  }
  if (scenario == Scenario::Perturbed && n % kScenarioGroups != 0) {
    throw Error(ErrorCode::IndivisibleN,
                "n = " + std::to_string(n) + " is not divisible by " +
                    std::to_string(kScenarioGroups));
  }
}

double McSummary::rejection_rate() const {
  const int denom = spec.replications - count(Outcome::EstimationFailed);
  if (denom <= 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(count(Outcome::Misspecified)) / denom;
}

SampledGraph draw_replication(const ScenarioSpec& spec, int r) {
  const Seed seed{spec.master_seed, static_cast<std::uint64_t>(r)};
  StreamRng params_rng(seed.lane(1));
  Scenario2Options opts;
  opts.variant = spec.variant;
  if (spec.model == Model::ERG) {
    const double alpha = params_rng.uniform_open();
    return spec.scenario == Scenario::Null ? sample_er(spec.n, alpha, seed)
                                           : sample_erg_scenario2(spec.n, alpha, seed, opts);
  }
  const auto m = static_cast<std::size_t>(spec.m);
  Matrix eta(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = k; l < m; ++l) eta(k, l) = eta(l, k) = params_rng.uniform_open();
  }
  const SbmParams params = SbmParams::with_uniform_theta(std::move(eta));
  return spec.scenario == Scenario::Null ? sample_sbm(spec.n, params, seed)
                                         : sample_sbm_scenario2(spec.n, params, seed, opts);
}

ReplicationRecord run_replication(const ScenarioSpec& spec, int r) {
  ReplicationRecord rec;
  rec.index = r;
  try {
    const SampledGraph draw = draw_replication(spec, r);
    Decision decision{};
    if (spec.model == Model::ERG) {
      const ErgTestReport report =
          erg_test(draw.graph, spec.alpha, spec.erg_mode, spec.erg_size_factor);
      decision = report.decision;
      rec.statistic = report.statistic;
      rec.p_value = report.p_value;
      rec.df = report.df;
    } else {
      SbmTestOptions options = spec.sbm;
      options.alpha = spec.alpha;
      options.blocks = spec.m;
      options.seed = Seed{spec.master_seed, static_cast<std::uint64_t>(r)}.lane(2);
      const SbmTestReport report = sbm_test(draw.graph, options);
      const SbmModeResult& sel = report.selected();
      decision = sel.decision;
      rec.statistic = sel.statistic;
      rec.p_value = sel.p_value;
      rec.df = sel.df;
    }
    switch (decision) {
      case Decision::WellSpecified: rec.outcome = Outcome::WellSpecified; break;
      case Decision::Misspecified: rec.outcome = Outcome::Misspecified; break;
      case Decision::Degenerate: rec.outcome = Outcome::Degenerate; break;
    }
  } catch (const Error& e) {
    rec.outcome = Outcome::EstimationFailed;
    rec.failure = to_string(e.code());
  }
  return rec;
}

McSummary run_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<ReplicationRecord> records(static_cast<std::size_t>(spec.replications));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int r = next.fetch_add(1); r < spec.replications; r = next.fetch_add(1)) {
      records[static_cast<std::size_t>(r)] = run_replication(spec, r);
    }
  };
  const int workers = std::min(spec.workers, spec.replications);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  McSummary summary;
  summary.spec = spec;
  for (const auto& rec : records) {
    ++summary.counts[static_cast<std::size_t>(rec.outcome)];
    if (rec.outcome == Outcome::EstimationFailed) ++summary.failure_reasons[rec.failure];
  }
  const int denom = spec.replications - summary.count(Outcome::EstimationFailed);
  summary.proportion_well_specified =
      denom > 0 ? static_cast<double>(summary.count(Outcome::WellSpecified)) / denom
                : std::numeric_limits<double>::quiet_NaN();
  if (spec.keep_records) summary.records = std::move(records);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

DirectionalReport compare_scenarios(const McSummary& a, const McSummary& b) {
  const ScenarioSpec& x = a.spec;
  const ScenarioSpec& y = b.spec;
  const bool same = x.model == y.model && x.n == y.n && x.m == y.m &&
                    x.replications == y.replications && x.alpha == y.alpha &&
                    x.erg_mode == y.erg_mode && x.erg_size_factor == y.erg_size_factor &&
                    x.sbm.mode == y.sbm.mode && x.sbm.size_factor == y.sbm.size_factor &&
                    x.sbm.fit_method == y.sbm.fit_method &&
                    x.sbm.boundary.clamp == y.sbm.boundary.clamp &&
                    x.sbm.boundary.epsilon == y.sbm.boundary.epsilon;
  if (!same) throw Error(ErrorCode::MismatchedSpecs, "summaries differ in model or test options");

  DirectionalReport out;
  out.null_rejection_rate = a.rejection_rate();
  out.perturbed_rejection_rate = b.rejection_rate();
  out.difference = out.perturbed_rejection_rate - out.null_rejection_rate;
  const double n1 = x.replications - a.count(Outcome::EstimationFailed);
  const double n2 = y.replications - b.count(Outcome::EstimationFailed);
  const double pooled = (a.count(Outcome::Misspecified) + b.count(Outcome::Misspecified)) /
                        (n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  out.z = se > 0.0 ? out.difference / se : 0.0;
  out.flagged = out.perturbed_rejection_rate > out.null_rejection_rate;
  return out;
}

std::string csv_header() {
  return "model,scenario,reps,n,m,proportion_well_specified,n_degenerate,n_failed";
}

std::string csv_row(const McSummary& s) {
  std::ostringstream os;
  os << to_string(s.spec.model) << ',' << to_string(s.spec.scenario) << ','
     << s.spec.replications << ',' << s.spec.n << ',';
  if (s.spec.model == Model::SBM) os << s.spec.m;
  os << ',';
  if (std::isnan(s.proportion_well_specified)) {
    os << "NA";
  } else {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", s.proportion_well_specified);
    os << buf;
  }
  os << ',' << s.count(Outcome::Degenerate) << ',' << s.count(Outcome::EstimationFailed);
  return os.str();
}

}  // namespace netmisfit
