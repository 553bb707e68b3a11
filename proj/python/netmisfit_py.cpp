#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netmisfit/error.hpp"
#include "netmisfit/montecarlo.hpp"
#include "netmisfit/report_json.hpp"

namespace py = pybind11;
using namespace netmisfit;
using nlohmann::json;

namespace {

py::object to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_py(v));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return out;
    }
    default: return py::none();
  }
}

ReportContext context(const char* name, std::uint64_t seed = 0) {
  ReportContext ctx;
  ctx.command = name;
  ctx.seed = Seed{seed, 0};
  ctx.timestamp = false;
  return ctx;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size()) throw Error(ErrorCode::InvalidArgument, "eta must be square");
    for (std::size_t c = 0; c < rows.size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

SbmParams params_of(const std::vector<std::vector<double>>& eta,
                    const std::optional<std::vector<double>>& theta) {
  SbmParams p = SbmParams::with_uniform_theta(to_matrix(eta));
  if (theta) p.theta = *theta;
  return p;
}

py::tuple sampled(const SampledGraph& sg, const char* name) {
  return py::make_tuple(sg.graph, to_py(sampler_meta_json(sg.meta, context(name, sg.meta.seed.master))));
}

Scenario2Options variant_of(const std::string& v) {
  Scenario2Options o;
  o.variant = parse_multiplier_variant(v);
  return o;
}

ErgMode erg_mode_of(const std::string& s) {
  if (s == "general") return ErgMode::General;
  if (s == "paper") return ErgMode::PaperLiteral;
  throw Error(ErrorCode::InvalidArgument, "erg mode must be general or paper");
}

ErgSizeFactor erg_size_of(const std::string& s) {
  if (s == "pairs") return ErgSizeFactor::PairCount;
  if (s == "paper") return ErgSizeFactor::PaperLiteralNone;
  throw Error(ErrorCode::InvalidArgument, "erg size factor must be pairs or paper");
}

SbmTestOptions sbm_options(double alpha, const std::string& mode, const std::string& size_factor,
                           int blocks, std::optional<double> clamp, bool drop_isolated,
                           std::uint64_t seed) {
  SbmTestOptions o;
  o.alpha = alpha;
  if (mode == "reduced") {
    o.mode = SbmMode::Reduced;
  } else if (mode == "paper") {
    o.mode = SbmMode::Paper;
  } else {
    throw Error(ErrorCode::InvalidArgument, "sbm mode must be paper or reduced");
  }
  if (size_factor == "pairs") {
    o.size_factor = SbmSizeFactor::PairCount;
  } else if (size_factor == "vertices") {
    o.size_factor = SbmSizeFactor::VertexCount;
  } else {
    throw Error(ErrorCode::InvalidArgument, "sbm size factor must be pairs or vertices");
  }
  if (clamp) o.boundary = BoundaryPolicy::clamped(*clamp);
  o.isolated = drop_isolated ? IsolatedPolicy::DropIncident : IsolatedPolicy::Reject;
  o.blocks = blocks;
  o.seed = Seed{seed, 0};
  return o;
}

py::dict fit_dict(const FittedSbm& fit) {
  py::dict d;
  d["m"] = fit.m;
  d["theta"] = fit.theta;
  d["eta"] = to_py(matrix_json(fit.eta));
  d["method"] = to_string(fit.method);
  d["labels"] = fit.labels_used;
  d["clamped_cells"] = fit.clamped_cells;
  if (fit.em) {
    d["iterations"] = fit.em->iterations;
    d["elbo"] = fit.em->elbo;
    d["elbo_trace"] = fit.em->elbo_trace;
    d["converged"] = fit.em->converged;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Information-matrix misspecification tests for random graph models";
  m.attr("__version__") = kVersion;

  static PyObject* error_type =
      PyErr_NewException("netmisfit._core.NetmisfitError", PyExc_ValueError, nullptr);
  m.attr("NetmisfitError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<Graph>(m, "Graph")
      .def(py::init([](Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges,
                       std::optional<std::vector<BlockId>> labels) {
             GraphBuilder b(n);
             for (const auto& [i, j] : edges) b.add_edge(i, j);
             if (labels) b.set_labels(*labels);
             return std::move(b).build();
           }),
           py::arg("n"), py::arg("edges") = std::vector<std::pair<Vertex, Vertex>>{},
           py::arg("labels") = py::none())
      .def_property_readonly("n", &Graph::n)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def_property_readonly("density", &Graph::density)
      .def_property_readonly("labels",
                             [](const Graph& g) -> std::optional<std::vector<BlockId>> {
                               if (!g.has_labels()) return std::nullopt;
                               return g.labels();
                             })
      .def("has_edge", &Graph::has_edge)
      .def("degree", &Graph::degree)
      .def("edges",
           [](const Graph& g) {
             std::vector<std::pair<Vertex, Vertex>> out;
             for (const auto& e : g.edges()) out.emplace_back(e.i, e.j);
             return out;
           })
      .def("with_labels", &Graph::with_labels)
      .def("without_labels", &Graph::without_labels)
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "Graph(n=" + std::to_string(g.n()) + ", edges=" + std::to_string(g.edge_count()) + ")";
      });

  m.def("edge_index", &edge_index, py::arg("i"), py::arg("j"), py::arg("n"));
  m.def("edge_pair", [](std::int64_t t, Vertex n) {
    const EdgePair p = edge_pair(t, n);
    return py::make_tuple(p.i, p.j);
  }, py::arg("t"), py::arg("n"));
  m.def("parse_graph", &parse_graph, py::arg("edges"), py::arg("labels") = py::none());
  m.def("read_graph",
        [](const std::string& path, std::optional<std::string> labels) {
          return labels ? read_graph(path, std::filesystem::path(*labels)) : read_graph(path);
        },
        py::arg("path"), py::arg("labels") = py::none());
  m.def("format_graph", &format_graph);
  m.def("write_graph", [](const Graph& g, const std::string& path) { write_graph(g, path); });

  m.def("sample_er",
        [](Vertex n, double p, std::uint64_t seed, std::uint64_t stream) {
          return sampled(sample_er(n, p, Seed{seed, stream}), "sample_er");
        },
        py::arg("n"), py::arg("p"), py::arg("seed") = 0, py::arg("stream") = 0);
  m.def("sample_sbm",
        [](Vertex n, const std::vector<std::vector<double>>& eta,
           std::optional<std::vector<double>> theta, std::uint64_t seed, std::uint64_t stream,
           std::optional<std::vector<BlockId>> labels) {
          return sampled(sample_sbm(n, params_of(eta, theta), Seed{seed, stream}, labels), "sample_sbm");
        },
        py::arg("n"), py::arg("eta"), py::arg("theta") = py::none(), py::arg("seed") = 0,
        py::arg("stream") = 0, py::arg("labels") = py::none());
  m.def("sample_erg_scenario2",
        [](Vertex n, double alpha, std::uint64_t seed, std::uint64_t stream, const std::string& variant) {
          return sampled(sample_erg_scenario2(n, alpha, Seed{seed, stream}, variant_of(variant)),
                         "sample_erg_scenario2");
        },
        py::arg("n"), py::arg("alpha"), py::arg("seed") = 0, py::arg("stream") = 0,
        py::arg("variant") = "lower");
  m.def("sample_sbm_scenario2",
        [](Vertex n, const std::vector<std::vector<double>>& eta,
           std::optional<std::vector<double>> theta, std::uint64_t seed, std::uint64_t stream,
           const std::string& variant) {
          return sampled(sample_sbm_scenario2(n, params_of(eta, theta), Seed{seed, stream},
                                              variant_of(variant)),
                         "sample_sbm_scenario2");
        },
        py::arg("n"), py::arg("eta"), py::arg("theta") = py::none(), py::arg("seed") = 0,
        py::arg("stream") = 0, py::arg("variant") = "lower");

  m.def("erg_test",
        [](const Graph& g, double alpha, const std::string& mode, const std::string& size_factor) {
          return to_py(erg_report_json(erg_test(g, alpha, erg_mode_of(mode), erg_size_of(size_factor)),
                                       context("erg_test")));
        },
        py::arg("graph"), py::arg("alpha") = 0.05, py::arg("mode") = "general",
        py::arg("size_factor") = "pairs");
  m.def("sbm_test",
        [](const Graph& g, double alpha, const std::string& mode, const std::string& size_factor,
           int blocks, std::optional<double> clamp, bool drop_isolated, std::uint64_t seed) {
          SbmTestOptions o = sbm_options(alpha, mode, size_factor, blocks, clamp, drop_isolated, seed);
          o.fit_method = g.has_labels() ? FitMethod::ObservedLabels : FitMethod::VariationalEM;
          SbmTestReport r;
          {
            py::gil_scoped_release release;
            r = sbm_test(g, o);
          }
          return to_py(sbm_report_json(r, context("sbm_test", seed)));
        },
        py::arg("graph"), py::arg("alpha") = 0.05, py::arg("mode") = "reduced",
        py::arg("size_factor") = "pairs", py::arg("blocks") = 0, py::arg("clamp") = py::none(),
        py::arg("drop_isolated") = false, py::arg("seed") = 0);
  m.def("sbm_mle_observed",
        [](const Graph& g, std::optional<double> clamp) {
          return fit_dict(sbm_mle_observed(g, clamp ? BoundaryPolicy::clamped(*clamp) : BoundaryPolicy::strict()));
        },
        py::arg("graph"), py::arg("clamp") = py::none());
  m.def("sbm_vem_fit",
        [](const Graph& g, int blocks, int restarts, std::uint64_t seed, std::optional<double> clamp) {
          FittedSbm fit = [&] {
            py::gil_scoped_release release;
            return sbm_vem_fit(g, blocks, restarts, Seed{seed, 0},
                               clamp ? BoundaryPolicy::clamped(*clamp) : BoundaryPolicy::strict());
          }();
          return fit_dict(fit);
        },
        py::arg("graph"), py::arg("blocks"), py::arg("restarts") = 5, py::arg("seed") = 0,
        py::arg("clamp") = py::none());

  m.def("chi2_cdf", &chi2_cdf, py::arg("x"), py::arg("df"));
  m.def("chi2_quantile", &chi2_quantile, py::arg("p"), py::arg("df"));

  m.def("run_scenario",
        [](const std::string& model, const std::string& scenario, Vertex n, int blocks, int reps,
           double alpha, std::optional<std::string> mode, std::optional<std::string> size_factor,
           std::optional<double> clamp, const std::string& fit, const std::string& variant,
           std::uint64_t seed, int workers, bool records) {
          ScenarioSpec spec;
          spec.model = parse_model(model);
          spec.scenario = parse_scenario(scenario);
          spec.n = n;
          spec.m = blocks;
          spec.replications = reps;
          spec.alpha = alpha;
          spec.variant = parse_multiplier_variant(variant);
          spec.master_seed = seed;
          spec.workers = workers;
          spec.keep_records = records;
          if (spec.model == Model::ERG) {
            spec.erg_mode = erg_mode_of(mode.value_or("paper"));
            spec.erg_size_factor = erg_size_of(size_factor.value_or("pairs"));
          } else {
            spec.sbm = sbm_options(alpha, mode.value_or("reduced"), size_factor.value_or("pairs"),
                                   blocks, clamp, false, seed);
            spec.sbm.fit_method = fit == "vem" ? FitMethod::VariationalEM : FitMethod::ObservedLabels;
          }
          McSummary summary;
          {
            py::gil_scoped_release release;
            summary = run_scenario(spec);
          }
          py::dict out = to_py(summary_json(summary, context("run_scenario", seed)));
          out["csv"] = csv_header() + "\n" + csv_row(summary) + "\n";
          return out;
        },
        py::arg("model"), py::arg("scenario") = "null", py::arg("n") = 50, py::arg("m") = 0,
        py::arg("reps") = 100, py::arg("alpha") = 0.05, py::arg("mode") = py::none(),
        py::arg("size_factor") = py::none(), py::arg("clamp") = py::none(),
        py::arg("fit") = "observed", py::arg("variant") = "lower", py::arg("seed") = 0,
        py::arg("workers") = 1, py::arg("records") = false);
}
