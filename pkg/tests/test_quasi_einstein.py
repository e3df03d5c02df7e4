import random

import numpy as np
import pytest

from qeflat.chart import PotentialSpec
from qeflat.curvature import CurvatureJets, PotentialJets
from qeflat.expr import parse
from qeflat.quasi_einstein import (
    check_commutator_identity,
    check_gradient_scalar_identity,
    check_trace_identity,
    identity_defects,
    qe_residual,
    residual_components,
)
from qeflat.rng import SplitMix64
from qeflat.warp import catalog


def test_gaussian_soliton_residual_vanishes():
    fx = catalog("gaussian_soliton:3")
    res = qe_residual(fx.chart, fx.potential, (1.0, 0.7, 1.4))
    assert res.max_abs() < 1e-10


def test_trivial_einstein_sphere_residual():
    # round 3-sphere with constant potential: any mu, lambda = 2
    chart = catalog("sphere:3:1").chart
    pot = PotentialSpec(parse("0", chart.coordinates), mu=0.7, lam=2.0)
    res = qe_residual(chart, pot, (1.1, 0.9, 0.5))
    assert res.max_abs() < 1e-8


def test_hyperbolic_qe_family_closed_form():
    # g = dt^2 + e^{2t} delta, f = -t, mu = 1, lambda = -3 (derived by hand:
    # the fiber block forces lambda = a - (n-1) and the base block -mu a^2 = a)
    fx = catalog("hyperbolic_qe:3:1")
    env_val = [fx.potential.mu, fx.potential.lam]
    assert env_val == [1.0, -3.0]
    res = qe_residual(fx.chart, fx.potential, (0.3, 0.2, -0.4))
    assert res.max_abs() < 1e-9


def test_trace_identity_gaussian():
    fx = catalog("gaussian_soliton:3")
    rep = check_trace_identity(fx.chart, fx.potential, (1.0, 2.0, 0.6))
    assert rep.passed
    assert rep.max_defects()["trace_identity"] < 1e-10


def test_trace_identity_hyperbolic_and_trivial():
    fx = catalog("hyperbolic_qe:3:1")
    rep = check_trace_identity(fx.chart, fx.potential, (0.4, 0.1, 0.2))
    assert rep.passed and rep.max_defects()["trace_identity"] < 1e-9
    chart = catalog("sphere:3:1").chart
    pot = PotentialSpec(parse("0", chart.coordinates), mu=0.3, lam=2.0)
    rep = check_trace_identity(chart, pot, (1.2, 0.8, 0.6))
    assert rep.passed and rep.max_defects()["trace_identity"] < 1e-9


def test_gradient_scalar_identity_on_fixtures():
    rng = SplitMix64(1)
    for name in ("gaussian_soliton:3", "hyperbolic_qe:3:1", "hyperbolic_qe:4:1"):
        fx = catalog(name)
        for _ in range(10):
            rep = check_gradient_scalar_identity(
                fx.chart, fx.potential, fx.chart.sample_point(rng)
            )
            assert rep.passed
            assert rep.max_defects()["scalar_gradient_identity"] < 1e-8


def test_commutator_identity_on_fixtures():
    rng = SplitMix64(2)
    for name in ("gaussian_soliton:3", "hyperbolic_qe:3:1", "special_mu:3"):
        fx = catalog(name)
        for _ in range(5):
            rep = check_commutator_identity(
                fx.chart, fx.potential, fx.chart.sample_point(rng)
            )
            assert rep.passed
            assert rep.max_defects()["ricci_exchange_identity"] < 1e-8


def test_identity_checks_report_but_do_not_assert_without_gate():
    # wrong lambda: not quasi-Einstein, so the reports flag the gate and
    # keep the defect numbers for diagnostics
    fx = catalog("hyperbolic_qe:3:1")
    broken = PotentialSpec(fx.potential.f, mu=1.0, lam=-2.0)
    rep = check_trace_identity(fx.chart, broken, (0.3, 0.2, -0.4))
    assert rep.verdict == "NOT-APPLICABLE"
    assert rep.failing_gates and rep.failing_gates[0].name == "quasi_einstein_residual"
    assert rep.max_defects()["trace_identity"] > 1e-3
    assert any("not quasi-Einstein" in note for note in rep.notes)


def test_residual_gate_implies_identities_on_catalog():
    rng = SplitMix64(3)
    names = (
        "gaussian_soliton:3",
        "gaussian_soliton:4",
        "hyperbolic_qe:3:1",
        "hyperbolic_qe:3:2",
        "hyperbolic_qe:4:1",
        "special_mu:3",
        "adapted_hyperbolic_qe:3:1",
        "adapted_gaussian_soliton:3",
        "s2xs2",
    )
    for name in names:
        fx = catalog(name)
        for _ in range(20):
            pt = fx.chart.sample_point(rng)
            geo = CurvatureJets(fx.chart, pt)
            pj = PotentialJets(geo, fx.potential)
            residual = float(np.max(np.abs(residual_components(geo, pj))))
            assert residual < 1e-8, name
            defects = identity_defects(geo, pj)
            assert max(defects.values()) < 1e-8, (name, defects)


def test_special_mu_flagged():
    fx = catalog("special_mu:3")
    assert fx.potential.is_special_mu(3)
    assert not catalog("hyperbolic_qe:3:1").potential.is_special_mu(3)
