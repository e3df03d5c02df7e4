import random

import numpy as np
import pytest

from qeflat.chart import metric_from_strings
from qeflat.curvature import CurvatureJets, PotentialJets
from qeflat.chart import PotentialSpec
from qeflat.errors import InsufficientJetOrderError, SingularMetricError
from qeflat.expr import parse
from qeflat.jets import JetContext, jvalue
from qeflat.tensors import (
    JetTensor,
    MetricAtPoint,
    TensorValue,
    contract,
    covariant_derivative,
    is_symmetric,
    raise_lower,
)

from helpers import random_metric, random_point


def _random_metric_at_point(n, rng):
    a = rng.standard_normal((n, n)) * 0.2
    return MetricAtPoint.from_matrix(np.eye(n) + a @ a.T)


def test_lower_inverse_metric_gives_kronecker_delta():
    rng = np.random.default_rng(0)
    m = _random_metric_at_point(4, rng)
    lowered = raise_lower(m.g_inv, 0, m)
    assert lowered.variance == ("d", "u")
    assert np.allclose(lowered.components, np.eye(4), atol=1e-12)


def test_raise_then_lower_is_identity():
    rng = np.random.default_rng(1)
    m = _random_metric_at_point(3, rng)
    t = TensorValue(3, ("d", "d", "d"), rng.standard_normal((3, 3, 3)))
    for slot in range(3):
        back = raise_lower(raise_lower(t, slot, m), slot, m)
        assert back.variance == t.variance
        assert np.allclose(back.components, t.components, atol=1e-12)


def test_raise_ricci_of_unit_sphere_gives_delta():
    s2 = metric_from_strings(
        2, ["th", "ph"], {"00": "1", "11": "sin(th)^2"}, [(0.2, 2.9), (0.2, 2.9)]
    )
    geo = CurvatureJets(s2, (1.0, 0.7))
    ric = TensorValue(2, ("d", "d"), jvalue(geo.ricci))
    mixed = raise_lower(ric, 0, geo.metric)
    assert np.allclose(mixed.components, np.eye(2), atol=1e-12)


def test_contract_delta_gives_dimension():
    n = 5
    delta = TensorValue(n, ("u", "d"), np.eye(n))
    out = contract(delta, 0, 1)
    assert out.rank == 0
    assert float(out.components) == n


def test_contract_requires_opposite_variance():
    t = TensorValue(3, ("d", "d"), np.zeros((3, 3)))
    with pytest.raises(ValueError, match="opposite variance"):
        contract(t, 0, 1)


def test_contract_matches_hand_rolled_loops():
    rng = np.random.default_rng(2)
    n = 3
    t = TensorValue(n, ("u", "d", "d"), rng.standard_normal((n, n, n)))
    out = contract(t, 0, 2)
    by_hand = np.zeros(n)
    for b in range(n):
        by_hand[b] = sum(t.components[a, b, a] for a in range(n))
    assert np.allclose(out.components, by_hand, atol=1e-14)
    assert out.variance == ("d",)


def test_metric_must_be_positive_definite():
    with pytest.raises(SingularMetricError, match="positive definite"):
        MetricAtPoint.from_matrix(np.diag([-1.0, 1.0, 1.0]))
    with pytest.raises(SingularMetricError, match="symmetric"):
        MetricAtPoint.from_matrix(np.array([[1.0, 0.5], [0.2, 1.0]]))


def test_symmetry_predicate():
    rng = np.random.default_rng(3)
    sym = rng.standard_normal((4, 4))
    sym = sym + sym.T
    assert is_symmetric(TensorValue(4, ("d", "d"), sym), 0, 1, 1e-12)
    assert not is_symmetric(TensorValue(4, ("d", "d"), rng.standard_normal((4, 4))), 0, 1, 1e-12)


# --- covariant derivative -------------------------------------------------------


def test_metric_compatibility_on_random_charts():
    rnd = random.Random(99)
    for _ in range(6):
        n = rnd.choice([3, 4])
        chart = random_metric(n, rnd)
        for _ in range(3):
            geo = CurvatureJets(chart, random_point(n, rnd))
            g_field = JetTensor(geo.ctx, ("d", "d"), geo.g, 3)
            nabla_g = covariant_derivative(g_field, geo.gamma_tensor)
            assert float(np.max(np.abs(nabla_g.value_array()))) < 1e-9


def test_metric_compatibility_on_every_catalog_chart():
    from qeflat.rng import SplitMix64
    from qeflat.warp import catalog, catalog_names

    rng = SplitMix64(17)
    for name, _, _ in catalog_names():
        chart = catalog(name).chart
        for _ in range(20):
            geo = CurvatureJets(chart, chart.sample_point(rng))
            g_field = JetTensor(geo.ctx, ("d", "d"), geo.g, 3)
            nabla_g = covariant_derivative(g_field, geo.gamma_tensor)
            assert float(np.max(np.abs(nabla_g.value_array()))) < 1e-9, name


def test_covariant_derivative_of_scalar_is_plain_gradient():
    rnd = random.Random(5)
    chart = random_metric(3, rnd)
    pt = random_point(3, rnd)
    geo = CurvatureJets(chart, pt)
    expr = parse("sin(x0)*x1 + x2^2", chart.coordinates)
    from qeflat.expr import evaluate
    from qeflat.jets import seed

    jet = evaluate(expr, dict(zip(chart.coordinates, seed(pt, 3))))
    field = JetTensor(geo.ctx, (), jet.c, 3)
    grad = covariant_derivative(field, geo.gamma_tensor)
    expected = [jet.partial(tuple(1 if i == k else 0 for i in range(3))) for k in range(3)]
    assert np.allclose(grad.value_array(), expected, rtol=0, atol=1e-14)


def test_hessian_of_quadratic_on_flat_space():
    chart = metric_from_strings(
        3, ["x0", "x1", "x2"], {"00": "1", "11": "1", "22": "1"}, [(-2, 2)] * 3
    )
    pot = PotentialSpec(parse("(x0^2 + x1^2 + x2^2)/4", chart.coordinates), 0.0, 0.5)
    geo = CurvatureJets(chart, (1.0, -0.5, 0.3))
    pj = PotentialJets(geo, pot)
    assert np.allclose(pj.hessian.value_array(), 0.5 * np.eye(3), atol=1e-14)


def test_covariant_derivative_order_exhaustion():
    rnd = random.Random(6)
    chart = random_metric(3, rnd)
    geo = CurvatureJets(chart, random_point(3, rnd))
    ric = JetTensor(geo.ctx, ("d", "d"), geo.ricci, 1)
    once = covariant_derivative(ric, geo.gamma_tensor)
    assert once.order == 0
    with pytest.raises(InsufficientJetOrderError):
        covariant_derivative(once, geo.gamma_tensor)


def test_derivative_slot_is_appended_last():
    # pinned by the Cotton antisymmetry C_abc = -C_acb, which only holds
    # when (∇Ric)_{abc} means ∇_c R_ab
    rnd = random.Random(7)
    chart = random_metric(3, rnd)
    geo = CurvatureJets(chart, random_point(3, rnd))
    c = geo.cotton
    assert np.max(np.abs(c + np.einsum("acb->abc", c))) < 1e-12
