"""Smoke tests for the python bindings. The exact mathematics is covered by
the C++ unit and acceptance suites; here we only check the module surface."""

import math

import pytest

import conewalk


def test_free_group_normal_forms():
    g = conewalk.Group("free", 2)
    assert g.normal_form("a1A1") == ""
    assert g.normal_form("a1b1B1a1") == "a1a1"
    assert g.distance("a1b1A1") == 3
    assert g.state_count == 5  # start plus one per signed generator
    assert g.assumption_recurrent_scc


def test_surface_group_relator_is_trivial():
    g = conewalk.Group("surface", 2)
    relator = "a1b1A1B1a2b2A2B2"
    assert g.normal_form(relator) == ""
    assert g.distance("a1b1A1B1a2") == 3
    assert g.mul("a1", "A1") == ""
    assert g.assumption_recurrent_scc


def test_sphere_sizes_match_path_counts():
    g = conewalk.Group("surface", 2)
    spheres = g.sphere_sizes(4)
    assert spheres[:3] == [1, 8, 56]
    for n, size in enumerate(spheres):
        assert g.count_paths(n) == size


def test_free_sphere_closed_form():
    g = conewalk.Group("free", 2)
    spheres = g.sphere_sizes(8)
    for n in range(1, 9):
        assert spheres[n] == 4 * 3 ** (n - 1)


def test_genus_below_two_rejected():
    with pytest.raises(ValueError):
        conewalk.Group("surface", 1)


def test_estimate_pipeline_f2():
    cfg = conewalk.preset("f2-srw")
    cfg["walk"]["n"] = 50_000
    cfg["walk"]["replicas"] = 8
    report = conewalk.estimate(cfg, with_clt=False)
    v = report["v_renewal"]["value"]
    se = report["v_renewal"]["se"]
    assert math.isclose(v, 0.5, abs_tol=max(5 * se, 5e-3))
    assert report["v_direct"]["value"] == pytest.approx(v, abs=6 * se + 6 * report["v_direct"]["se"])
    assert report["sigma2"]["value"] == pytest.approx(0.75, abs=0.05)


def test_oracle_check_free():
    cfg = conewalk.preset("f2-srw")
    cfg["oracle"]["radius"] = 6
    cfg["oracle"]["renewal_trajectories"] = 3
    cfg["oracle"]["renewal_n"] = 1000
    report = conewalk.oracle_check(cfg)
    assert report["all_ok"]
