import math
import random

import numpy as np
import pytest

from qeflat.chart import metric_from_strings
from qeflat.curvature import (
    CurvatureJets,
    check_weyl_divergence,
    christoffel,
    cotton,
    curvature_pack,
    invariant_defects,
    ricci_scalar,
    riemann,
    weyl,
    weyl_divergence_defect,
)
from qeflat.errors import PreconditionError, SingularMetricError
from qeflat.jets import jvalue
from qeflat.warp import WarpSpec, build_warped_chart, catalog

from helpers import fd_curvature, random_metric, random_point


def _polar_flat():
    return metric_from_strings(2, ["r", "th"], {"00": "1", "11": "r^2"}, [(0.5, 3.0), (0.0, 3.0)])


def _unit_sphere2():
    return metric_from_strings(2, ["th", "ph"], {"00": "1", "11": "sin(th)^2"}, [(0.2, 2.9)] * 2)


def test_flat_cartesian_christoffel_vanishes():
    chart = catalog("flat:3").chart
    gamma = christoffel(chart, (0.3, -0.2, 0.5))
    assert gamma.max_abs() == 0.0


def test_polar_christoffel_values():
    gamma = christoffel(_polar_flat(), (2.0, 0.5))
    assert gamma.components[0, 1, 1] == pytest.approx(-2.0, abs=1e-12)
    assert gamma.components[1, 0, 1] == pytest.approx(0.5, abs=1e-12)
    # cross-check against the finite-difference oracle
    oracle = fd_curvature(_polar_flat(), (2.0, 0.5))
    assert np.allclose(gamma.components, oracle["christoffel"], atol=1e-8)


def test_sphere_christoffel_value():
    gamma = christoffel(_unit_sphere2(), (1.0, 0.7))
    assert gamma.components[0, 1, 1] == pytest.approx(-math.sin(1.0) * math.cos(1.0), abs=1e-12)


def test_flat_riemann_vanishes_in_curvilinear_chart():
    rm = riemann(_polar_flat(), (1.7, 1.1))
    assert rm.max_abs() < 1e-12


def test_sphere_riemann_positive_sectional_convention():
    rm = riemann(_unit_sphere2(), (1.0, 0.7))
    assert rm.components[0, 1, 0, 1] == pytest.approx(math.sin(1.0) ** 2, abs=1e-12)
    oracle = fd_curvature(_unit_sphere2(), (1.0, 0.7))
    assert np.allclose(rm.components, oracle["riemann"], atol=1e-7)


def test_hyperbolic_sectional_curvature_is_minus_one():
    chart = catalog("hyperbolic:3").chart
    rnd = random.Random(1)
    for _ in range(10):
        pt = chart.sample_point_rng if False else tuple(
            rnd.uniform(lo, hi) for lo, hi in chart.domain
        )
        geo = CurvatureJets(chart, pt)
        g0 = geo.metric.g.components
        expected = -1.0 * (
            np.einsum("ac,bd->abcd", g0, g0) - np.einsum("ad,bc->abcd", g0, g0)
        )
        assert np.max(np.abs(jvalue(geo.riemann) - expected)) < 1e-8


def test_sphere3_ricci_and_scalar():
    chart = catalog("sphere:3:1").chart
    ric, scalar = ricci_scalar(chart, (1.1, 0.9, 0.5))
    g = CurvatureJets(chart, (1.1, 0.9, 0.5)).metric.g.components
    assert np.allclose(ric.components, 2.0 * g, atol=1e-8)
    assert scalar == pytest.approx(6.0, abs=1e-8)


def test_hyperbolic3_ricci_and_scalar():
    chart = catalog("hyperbolic:3").chart
    pt = (0.3, 0.1, -0.4)
    ric, scalar = ricci_scalar(chart, pt)
    g = CurvatureJets(chart, pt).metric.g.components
    assert np.allclose(ric.components, -2.0 * g, atol=1e-8)
    assert scalar == pytest.approx(-6.0, abs=1e-8)


def test_weyl_vanishes_on_round_sphere4():
    chart = catalog("sphere:4:1").chart
    w = weyl(chart, (1.2, 1.0, 0.8, 0.5))
    assert w.max_abs() < 1e-9


def test_weyl_vanishes_on_conformally_flat_4metric():
    entries = {f"{i}{i}": "exp(2*(0.3*x0 + x1^2))" for i in range(4)}
    chart = metric_from_strings(4, [f"x{i}" for i in range(4)], entries, [(-1, 1)] * 4)
    rnd = random.Random(2)
    for _ in range(5):
        w = weyl(chart, random_point(4, rnd))
        assert w.max_abs() < 1e-8


def test_product_of_spheres_has_substantial_weyl():
    chart = catalog("s2xs2").chart
    rnd = random.Random(3)
    for _ in range(3):
        pt = tuple(rnd.uniform(lo, hi) for lo, hi in chart.domain)
        assert weyl(chart, pt).max_abs() > 0.1
    # regression constant, pinned by the finite-difference oracle
    assert weyl(chart, (1.2, 0.9, 0.7, 1.5)).max_abs() == pytest.approx(
        0.5791312385137486, abs=1e-6
    )


def test_weyl_rejected_in_dimension_three():
    with pytest.raises(PreconditionError, match="dimension 3"):
        weyl(catalog("flat:3").chart, (0.0, 0.0, 0.0))


def test_cotton_vanishes_on_space_forms():
    for name, pt in [
        ("sphere:3:1", (1.1, 0.9, 0.5)),
        ("hyperbolic:3", (0.2, 0.3, -0.1)),
        ("flat:3", (0.1, 0.2, 0.3)),
    ]:
        assert cotton(catalog(name).chart, pt).max_abs() < 1e-8


def test_cotton_vanishes_on_conformally_flat_3metric():
    entries = {f"{i}{i}": "exp(2*(x0 + x1^2 - 0.5*x2))" for i in range(3)}
    chart = metric_from_strings(3, ["x0", "x1", "x2"], entries, [(-1, 1)] * 3)
    rnd = random.Random(4)
    for _ in range(5):
        assert cotton(chart, random_point(3, rnd)).max_abs() < 1e-7


def test_generic_3metric_has_nonzero_cotton_matching_oracle():
    chart = metric_from_strings(
        3,
        ["t", "x", "y"],
        {"00": "1", "01": "0.1*sin(x)", "11": "exp(2*t)", "22": "exp(4*t)"},
        [(-0.3, 0.3), (-1, 1), (-1, 1)],
    )
    pt = (0.1, 0.4, -0.2)
    value = cotton(chart, pt).max_abs()
    oracle = float(np.max(np.abs(fd_curvature(chart, pt)["cotton"])))
    # value read from the oracle at first computation: 2.7587
    assert value > 1e-3
    assert value == pytest.approx(oracle, rel=1e-3)


def test_weyl_divergence_identity_random_n4():
    rnd = random.Random(5)
    for _ in range(3):
        chart = random_metric(4, rnd)
        report = check_weyl_divergence(chart, random_point(4, rnd))
        assert report.passed
        assert max(report.max_defects().values()) < 1e-6


def test_weyl_divergence_identity_sphere4_both_sides_zero():
    chart = catalog("sphere:4:1").chart
    geo = CurvatureJets(chart, (1.2, 1.0, 0.8, 0.5))
    assert np.max(np.abs(geo.weyl_divergence)) < 1e-9
    assert np.max(np.abs(geo.cotton)) < 1e-9


def test_weyl_divergence_identity_warped_n5():
    chart = build_warped_chart(WarpSpec(5, "cosh(t)", 1))
    geo = CurvatureJets(chart, (0.3, 1.0, 1.2, 0.9, 1.4))
    assert weyl_divergence_defect(geo) < 1e-6


def test_weyl_divergence_rejected_for_n3():
    geo = CurvatureJets(catalog("flat:3").chart, (0.0, 0.0, 0.0))
    with pytest.raises(PreconditionError):
        weyl_divergence_defect(geo)


def test_singular_metric_rejected():
    chart = metric_from_strings(2, ["x", "y"], {"00": "x", "11": "1"}, [(-1, 1), (-1, 1)])
    with pytest.raises(SingularMetricError):
        CurvatureJets(chart, (-0.5, 0.0))


def test_curvature_pack_fields_and_weyl_presence():
    pack3 = curvature_pack(catalog("flat:3").chart, (0.0, 0.1, 0.2))
    assert pack3.weyl is None
    assert pack3.scalar == pytest.approx(0.0, abs=1e-12)
    pack4 = curvature_pack(catalog("sphere:4:1").chart, (1.2, 1.0, 0.8, 0.5))
    assert pack4.weyl is not None
    assert pack4.scalar == pytest.approx(12.0, abs=1e-8)


def test_structural_invariants_on_random_samples():
    rnd = random.Random(6)
    for _ in range(50):
        n = rnd.choice([3, 3, 3, 4, 4, 5])
        chart = random_metric(n, rnd)
        geo = CurvatureJets(chart, random_point(n, rnd))
        defects = invariant_defects(geo)
        scale = geo.riemann_scale()
        for key, value in defects.items():
            tol = 1e-6 if key == "schur_divergence" else 1e-9
            assert value < tol * scale, f"{key} = {value} on {chart.name}"


def test_pipeline_matches_fd_oracle_on_random_samples():
    rnd = random.Random(7)
    for _ in range(8):
        n = rnd.choice([3, 4, 5])
        chart = random_metric(n, rnd)
        pt = random_point(n, rnd)
        geo = CurvatureJets(chart, pt)
        oracle = fd_curvature(chart, pt)
        checks = {
            "christoffel": jvalue(geo.gamma),
            "riemann": jvalue(geo.riemann),
            "ricci": jvalue(geo.ricci),
            "cotton": geo.cotton,
        }
        if n >= 4:
            checks["weyl"] = jvalue(geo.weyl)
        for key, got in checks.items():
            want = np.asarray(oracle[key])
            err = np.max(np.abs(got - want) / (1.0 + np.maximum(np.abs(got), np.abs(want))))
            assert err < 1e-4, f"{key}: {err}"
        assert abs(float(geo.scalar[0]) - oracle["scalar"]) < 1e-4 * (
            1.0 + abs(oracle["scalar"])
        )
