#include "netmisfit/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "netmisfit/error.hpp"
#include "netmisfit/montecarlo.hpp"
#include "netmisfit/report_json.hpp"

namespace netmisfit {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidProbability:
    case ErrorCode::IndivisibleN:
    case ErrorCode::MismatchedSpecs:
      return kExitUsage;
    default:
      return kExitData;
  }
}

int exit_code_for(Decision d) {
  switch (d) {
    case Decision::WellSpecified: return kExitWellSpecified;
    case Decision::Misspecified: return kExitMisspecified;
    case Decision::Degenerate: return kExitDegenerate;
  }
  return kExitInternal;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("NETMISFIT_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("NETMISFIT_SEED is not an unsigned integer: ") + env);
  }
}

Matrix read_eta_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, path + ": bad number '" + tok + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const std::size_t m = rows.size();
  if (m == 0) throw Error(ErrorCode::ParseError, path + ": empty eta matrix");
  Matrix eta(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    if (rows[k].size() != m) throw Error(ErrorCode::ParseError, path + ": eta must be square");
    for (std::size_t l = 0; l < m; ++l) eta(k, l) = rows[k][l];
  }
  return eta;
}

struct TestFlags {
  std::string mode;
  std::string size_factor;
  std::optional<double> clamp;
  bool drop_isolated = false;
  std::string fit = "observed";
  int restarts = 5;
  double alpha = 0.05;
};

void add_test_flags(CLI::App* cmd, TestFlags& f) {
  cmd->add_option("--alpha", f.alpha, "Test level")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--mode", f.mode, "general|paper (erg), paper|reduced (sbm)")
      ->check(CLI::IsMember({"general", "paper", "reduced"}));
  cmd->add_option("--size-factor", f.size_factor, "pairs|paper (erg), pairs|vertices (sbm)")
      ->check(CLI::IsMember({"pairs", "paper", "vertices"}));
  cmd->add_option("--clamp", f.clamp, "Clamp boundary eta estimates to [eps, 1-eps]");
  cmd->add_flag("--drop-isolated", f.drop_isolated, "Skip pairs touching isolated vertices");
  cmd->add_option("--restarts", f.restarts, "Variational EM restarts")->check(CLI::PositiveNumber);
}

ErgMode erg_mode_from(const TestFlags& f) {
  if (f.mode.empty() || f.mode == "general") return ErgMode::General;
  if (f.mode == "paper") return ErgMode::PaperLiteral;
  throw UsageError("--mode " + f.mode + " does not apply to the erg model");
}

ErgSizeFactor erg_size_from(const TestFlags& f) {
  if (f.size_factor.empty() || f.size_factor == "pairs") return ErgSizeFactor::PairCount;
  if (f.size_factor == "paper") return ErgSizeFactor::PaperLiteralNone;
  throw UsageError("--size-factor " + f.size_factor + " does not apply to the erg model");
}

SbmTestOptions sbm_options_from(const TestFlags& f) {
  SbmTestOptions o;
  if (f.mode.empty() || f.mode == "reduced") {
    o.mode = SbmMode::Reduced;
  } else if (f.mode == "paper") {
    o.mode = SbmMode::Paper;
  } else {
    throw UsageError("--mode " + f.mode + " does not apply to the sbm model");
  }
  if (f.size_factor.empty() || f.size_factor == "pairs") {
    o.size_factor = SbmSizeFactor::PairCount;
  } else if (f.size_factor == "vertices") {
    o.size_factor = SbmSizeFactor::VertexCount;
  } else {
    throw UsageError("--size-factor " + f.size_factor + " does not apply to the sbm model");
  }
  if (f.clamp) {
    if (!(*f.clamp > 0.0 && *f.clamp < 0.5)) throw UsageError("--clamp must lie in (0, 0.5)");
    o.boundary = BoundaryPolicy::clamped(*f.clamp);
  }
  o.isolated = f.drop_isolated ? IsolatedPolicy::DropIncident : IsolatedPolicy::Reject;
  o.alpha = f.alpha;
  o.vem_restarts = f.restarts;
  return o;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::ParseError, "cannot write " + path);
  os << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Information-matrix misspecification tests for random graph models", "netmisfit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  ReportContext ctx;
  ctx.args = args;

  std::uint64_t seed = 0;
  std::string model;

  // test
  auto* test = app.add_subcommand("test", "Test one graph for misspecification");
  std::string graph_path, labels_path;
  int blocks = 0;
  TestFlags test_flags;
  test->add_option("--model", model, "erg|sbm")->required()->check(CLI::IsMember({"erg", "sbm"}));
  test->add_option("--graph", graph_path, "Edge-list file")->required();
  test->add_option("--labels", labels_path, "Block label file (sbm)");
  test->add_option("--blocks", blocks, "Block count; fits labels by variational EM if no labels")
      ->check(CLI::PositiveNumber);
  test->add_option("--seed", seed, "Seed for variational EM restarts");
  add_test_flags(test, test_flags);

  // sample
  auto* sample = app.add_subcommand("sample", "Sample a graph from a scenario");
  std::string scenario = "null", out_path, eta_file, variant = "lower";
  Vertex n = 0;
  int m = 0;
  std::uint64_t stream = 0;
  std::optional<double> edge_alpha;
  sample->add_option("--model", model, "erg|sbm")->required()->check(CLI::IsMember({"erg", "sbm"}));
  sample->add_option("--scenario", scenario, "null|perturbed")
      ->check(CLI::IsMember({"null", "perturbed"}));
  sample->add_option("--n", n, "Vertex count")->required();
  sample->add_option("--m", m, "Block count (sbm)");
  auto* alpha_opt = sample->add_option("--alpha", edge_alpha, "Edge probability (erg)");
  sample->add_option("--eta-file", eta_file, "m x m edge probability matrix (sbm)")
      ->excludes(alpha_opt);
  sample->add_option("--seed", seed, "Master seed");
  sample->add_option("--stream", stream, "Stream index within the master seed");
  sample->add_option("--variant", variant, "lower|product|max|mean")
      ->check(CLI::IsMember({"lower", "product", "max", "mean"}));
  sample->add_option("--out", out_path, "Output edge-list path")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo scenario");
  int reps = 100, workers = 1;
  std::string out_csv, out_json;
  bool keep_records = false;
  TestFlags sim_flags;
  simulate->add_option("--model", model, "erg|sbm")->required()->check(CLI::IsMember({"erg", "sbm"}));
  simulate->add_option("--scenario", scenario, "null|perturbed")
      ->check(CLI::IsMember({"null", "perturbed"}));
  simulate->add_option("--n", n, "Vertex count")->required();
  simulate->add_option("--m", m, "Block count (sbm)");
  simulate->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Master seed");
  simulate->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--fit", sim_flags.fit, "observed|vem (sbm)")
      ->check(CLI::IsMember({"observed", "vem"}));
  simulate->add_option("--variant", variant, "lower|product|max|mean")
      ->check(CLI::IsMember({"lower", "product", "max", "mean"}));
  simulate->add_option("--out-csv", out_csv, "CSV summary path (default: stderr)");
  simulate->add_option("--out-json", out_json, "JSON summary path (default: stdout)");
  simulate->add_flag("--records", keep_records, "Keep per-replication records in the JSON");
  add_test_flags(simulate, sim_flags);

  try {
    seed = default_seed();
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  }

  ctx.seed = Seed{seed, stream};
  try {
    if (test->parsed()) {
      ctx.command = "test";
      if (model == "erg") {
        const Graph g = read_graph(graph_path);
        const ErgTestReport report =
            erg_test(g, test_flags.alpha, erg_mode_from(test_flags), erg_size_from(test_flags));
        out << erg_report_json(report, ctx).dump(2) << '\n';
        err << "decision: " << to_string(report.decision) << '\n';
        return exit_code_for(report.decision);
      }
      if (labels_path.empty() && blocks == 0) {
        throw UsageError("--model sbm needs --labels or --blocks");
      }
      SbmTestOptions options = sbm_options_from(test_flags);
      options.seed = Seed{seed, 0};
      options.blocks = blocks;
      Graph g = labels_path.empty() ? read_graph(graph_path) : read_graph(graph_path, labels_path);
      options.fit_method =
          labels_path.empty() ? FitMethod::VariationalEM : FitMethod::ObservedLabels;
      const SbmTestReport report = sbm_test(g, options);
      out << sbm_report_json(report, ctx).dump(2) << '\n';
      err << "decision: " << to_string(report.decision()) << '\n';
      return exit_code_for(report.decision());
    }

    if (sample->parsed()) {
      ctx.command = "sample";
      ScenarioSpec spec;
      spec.model = parse_model(model);
      spec.scenario = parse_scenario(scenario);
      spec.n = n;
      spec.m = m;
      spec.replications = 1;
      spec.variant = parse_multiplier_variant(variant);
      spec.master_seed = seed;
      if (spec.model == Model::SBM && eta_file.empty() && m < 1) {
        throw UsageError("--model sbm needs --m or --eta-file");
      }
      if (spec.model == Model::ERG && !eta_file.empty()) {
        throw UsageError("--eta-file applies to the sbm model");
      }
      if (spec.model == Model::SBM && edge_alpha) {
        throw UsageError("--alpha applies to the erg model");
      }
      Matrix eta;
      if (!eta_file.empty()) {
        eta = read_eta_file(eta_file);
        spec.m = static_cast<int>(eta.rows());
      }
      spec.validate();
      const Seed graph_seed{seed, stream};
      Scenario2Options opts;
      opts.variant = spec.variant;
      const SampledGraph sg = [&] {
        if (spec.model == Model::ERG && edge_alpha) {
          return spec.scenario == Scenario::Null
                     ? sample_er(n, *edge_alpha, graph_seed)
                     : sample_erg_scenario2(n, *edge_alpha, graph_seed, opts);
        }
        if (spec.model == Model::SBM && !eta_file.empty()) {
          const SbmParams params = SbmParams::with_uniform_theta(eta);
          return spec.scenario == Scenario::Null
                     ? sample_sbm(n, params, graph_seed)
                     : sample_sbm_scenario2(n, params, graph_seed, opts);
        }
        return draw_replication(spec, static_cast<int>(stream));
      }();
      write_graph(sg.graph, out_path);
      if (sg.graph.has_labels()) write_labels(sg.graph, out_path + ".labels");
      ReportContext meta_ctx = ctx;
      meta_ctx.timestamp = false;
      write_file(out_path + ".meta.json", sampler_meta_json(sg.meta, meta_ctx).dump(2) + "\n");
      err << "wrote " << out_path << " (" << sg.graph.edge_count() << " edges)\n";
      return 0;
    }

    ctx.command = "simulate";
    ScenarioSpec spec;
    spec.model = parse_model(model);
    spec.scenario = parse_scenario(scenario);
    spec.n = n;
    spec.m = m;
    spec.replications = reps;
    spec.alpha = sim_flags.alpha;
    spec.master_seed = seed;
    spec.workers = workers;
    spec.keep_records = keep_records;
    spec.variant = parse_multiplier_variant(variant);
    if (spec.model == Model::ERG) {
      spec.erg_mode = erg_mode_from(sim_flags);
      spec.erg_size_factor = erg_size_from(sim_flags);
    } else {
      if (m < 1) throw UsageError("--model sbm needs --m");
      spec.sbm = sbm_options_from(sim_flags);
      spec.sbm.fit_method =
          sim_flags.fit == "vem" ? FitMethod::VariationalEM : FitMethod::ObservedLabels;
    }
    const McSummary summary = run_scenario(spec);
    const std::string csv = csv_header() + "\n" + csv_row(summary) + "\n";
    if (out_csv.empty()) {
      err << csv;
    } else {
      write_file(out_csv, csv);
    }
    const std::string json_text = summary_json(summary, ctx).dump(2) + "\n";
    if (out_json.empty()) {
      out << json_text;
    } else {
      write_file(out_json, json_text);
    }
    return 0;
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    if (code != kExitUsage) {
      out << error_json(std::string(to_string(e.code())), e.what(), ctx).dump(2) << '\n';
    }
    return code;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace netmisfit
