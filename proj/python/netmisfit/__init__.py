from ._core import (
    Graph,
    NetmisfitError,
    __version__,
    chi2_cdf,
    chi2_quantile,
    edge_index,
    edge_pair,
    erg_test,
    format_graph,
    parse_graph,
    read_graph,
    run_scenario,
    sample_er,
    sample_erg_scenario2,
    sample_sbm,
    sample_sbm_scenario2,
    sbm_mle_observed,
    sbm_test,
    sbm_vem_fit,
    write_graph,
)

__all__ = [
    "Graph",
    "NetmisfitError",
    "chi2_cdf",
    "chi2_quantile",
    "edge_index",
    "edge_pair",
    "erg_test",
    "format_graph",
    "parse_graph",
    "read_graph",
    "run_scenario",
    "sample_er",
    "sample_erg_scenario2",
    "sample_sbm",
    "sample_sbm_scenario2",
    "sbm_mle_observed",
    "sbm_test",
    "sbm_vem_fit",
    "write_graph",
]
