import math

import pytest

import netmisfit as nm


def test_edge_index_roundtrip():
    n = 7
    seen = set()
    for t in range(1, n * (n - 1) // 2 + 1):
        i, j = nm.edge_pair(t, n)
        assert i > j
        assert nm.edge_index(i, j, n) == t
        seen.add((i, j))
    assert len(seen) == 21


def test_graph_construction():
    g = nm.Graph(4, [(1, 2), (3, 2), (2, 1)], labels=[1, 1, 2, 2])
    assert g.n == 4
    assert g.edge_count == 2
    assert g.has_edge(2, 1) and g.has_edge(2, 3)
    assert g.degree(2) == 2
    assert g.edges() == [(2, 1), (3, 2)]
    assert g.labels == [1, 1, 2, 2]
    assert nm.parse_graph(nm.format_graph(g)) == g.without_labels()


def test_error_carries_code():
    with pytest.raises(nm.NetmisfitError) as info:
        nm.Graph(3, [(1, 1)])
    assert info.value.code == "SelfLoop"


def test_sampler_is_deterministic():
    g1, meta = nm.sample_er(40, 0.3, seed=5)
    g2, _ = nm.sample_er(40, 0.3, seed=5)
    assert g1 == g2
    assert meta["model"] == "er"


def test_erg_test_report():
    g, _ = nm.sample_er(60, 0.2, seed=11)
    r = nm.erg_test(g, alpha=0.05, mode="paper")
    assert r["test"]["decision"] in ("WellSpecified", "Misspecified")
    general = nm.erg_test(g)
    assert general["test"]["decision"] == "Degenerate"
    assert general["test"]["statistic"] is None


def test_sbm_observed_fit():
    g, _ = nm.sample_sbm(80, [[0.6, 0.1], [0.1, 0.5]], seed=3)
    fit = nm.sbm_mle_observed(g)
    assert fit["m"] == 2
    assert math.isclose(sum(fit["theta"]), 1.0)
    r = nm.sbm_test(g)
    modes = r["diagnostics"]["modes"]
    assert set(modes) == {"paper", "reduced"}
    assert modes["reduced"]["df"] <= 5


def test_sbm_vem_fit():
    g, _ = nm.sample_sbm(90, [[0.7, 0.05], [0.05, 0.6]], seed=8)
    fit = nm.sbm_vem_fit(g.without_labels(), 2, seed=1)
    assert fit["method"] == "vem"
    assert len(fit["labels"]) == 90


def test_chi2():
    assert math.isclose(nm.chi2_quantile(0.95, 1), 3.841458820694124, rel_tol=1e-9)
    assert math.isclose(nm.chi2_cdf(nm.chi2_quantile(0.5, 6), 6), 0.5, rel_tol=1e-9)


def test_run_scenario():
    s = nm.run_scenario("erg", "null", n=30, reps=20, seed=4, workers=2)
    assert s["csv"].count("\n") == 2
    again = nm.run_scenario("erg", "null", n=30, reps=20, seed=4, workers=1)
    assert s["csv"] == again["csv"]
