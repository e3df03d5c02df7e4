"""Conformal rescaling by the potential and its structural consequences.

The rescaled metric is e^{−2f/(n−2)} g, kept at the AST level so the jet
engine differentiates the factor exactly; the identity checks here then
exercise the full curvature pipeline on the transformed chart.  The
Ricci comparison formula holds for every metric and every smooth f, which
makes it the strongest ungated cross-check of the derivative plumbing.
"""

from __future__ import annotations

import math

import numpy as np

from .chart import MetricSpec, PotentialSpec
from .curvature import CurvatureJets, PotentialJets
from .errors import PreconditionError
from .expr import BinOp, Call, Expression, Neg, Num, pretty
from .jets import jvalue
from .quasi_einstein import RESIDUAL_GATE_TOL, residual_components, residual_scale
from .report import CheckReport

LCF_GATE_TOL = 1e-6


def conformal_metric(chart: MetricSpec, f: Expression) -> MetricSpec:
    """Chart for e^{−2f/(n−2)} g; pure AST multiplication, no simplification."""
    if chart.dim < 3:
        raise PreconditionError("conformal rescaling by the potential needs n >= 3")
    factor = Call("exp", Neg(BinOp("*", Num(2.0 / (chart.dim - 2)), f.root)))
    components = {}
    for key, comp in chart.components.items():
        root = BinOp("*", factor, comp.root)
        components[key] = Expression(root, chart.coordinates, pretty(root))
    return MetricSpec(
        dim=chart.dim,
        coordinates=chart.coordinates,
        components=components,
        domain=chart.domain,
        name=(chart.name + "~conformal") if chart.name else "conformal",
        adapted=False,
    )


def _conformal_rhs(geo: CurvatureJets, pj: PotentialJets) -> np.ndarray:
    """Ric_g + ∇²f + df⊗df/(n−2) + (Δf − |∇f|²) g/(n−2), all from g."""
    n = geo.n
    ric = jvalue(geo.ricci)
    hess = pj.hessian.value_array()
    df = pj.df.value_array()
    g0 = geo.metric.g.components
    gradnorm2 = float(pj.gradnorm2[0])
    return (
        ric
        + hess
        + np.outer(df, df) / (n - 2)
        + (pj.laplacian - gradnorm2) * g0 / (n - 2)
    )


def check_conformal_ricci_formula(
    chart: MetricSpec, f: Expression, point, tol: float = 1e-6
) -> CheckReport:
    """Ricci of the rescaled chart against the comparison formula (ungated)."""
    geo = CurvatureJets(chart, point)
    pj = PotentialJets(geo, PotentialSpec(f, mu=0.0, lam=0.0))
    rescaled = conformal_metric(chart, f)
    ric_t = jvalue(CurvatureJets(rescaled, point).ricci)
    rhs = _conformal_rhs(geo, pj)
    defect = float(np.max(np.abs(ric_t - rhs)))
    report = CheckReport(check="conformal_ricci_formula", source=chart.name)
    scale = max(1.0, float(np.max(np.abs(ric_t))), float(np.max(np.abs(rhs))))
    report.tolerances["conformal_ricci_formula"] = tol * scale
    report.add_point(geo.point, {"conformal_ricci_formula": defect})
    return report


def check_special_mu(
    chart: MetricSpec, pot: PotentialSpec, points, tol: float = 1e-8
) -> CheckReport:
    """Einstein and constant-curvature defects of the rescaled metric.

    Only meaningful at μ = 1/(2−n), where quasi-Einstein plus conformal
    flatness force the rescaled metric to be a space form.
    """
    n = chart.dim
    if not pot.is_special_mu(n):
        raise PreconditionError(
            f"mu = {pot.mu!r} is not the conformally-Einstein value 1/(2-n) = {1.0/(2-n)!r}"
        )
    rescaled = conformal_metric(chart, pot.f)
    report = CheckReport(check="special_mu", source=chart.name)
    worst_residual, worst_lcf = 0.0, 0.0
    scale, riemann_scale = 1.0, 1.0
    scalars = []
    for p in points:
        geo = CurvatureJets(chart, p)
        pj = PotentialJets(geo, pot)
        worst_residual = max(worst_residual, float(np.max(np.abs(residual_components(geo, pj)))))
        scale = max(scale, residual_scale(geo, pj))
        riemann_scale = max(riemann_scale, geo.riemann_scale())
        worst_lcf = max(worst_lcf, max(geo.lcf_defects().values()))
        geo_t = CurvatureJets(rescaled, p)
        ric_t = jvalue(geo_t.ricci)
        g_t = geo_t.metric.g.components
        scalar_t = float(geo_t.scalar[0])
        rm_t = jvalue(geo_t.riemann)
        gg = np.einsum("ac,bd->abcd", g_t, g_t) - np.einsum("ad,bc->abcd", g_t, g_t)
        defects = {
            "einstein_defect": float(np.max(np.abs(ric_t - scalar_t / n * g_t))),
            "constant_curvature_defect": float(
                np.max(np.abs(rm_t - scalar_t / (n * (n - 1)) * gg))
            ),
        }
        report.add_point(p, defects)
        scalars.append(scalar_t)
    report.add_gate("quasi_einstein_residual", worst_residual, RESIDUAL_GATE_TOL * scale)
    report.add_gate("conformal_flatness", worst_lcf, LCF_GATE_TOL * riemann_scale)
    report.add_spread("rescaled_scalar_curvature", scalars)
    for key in ("einstein_defect", "constant_curvature_defect", "rescaled_scalar_curvature"):
        report.tolerances[key] = tol * max(scale, riemann_scale)
    return report


def check_two_eigenvalue_structure(
    chart: MetricSpec, pot: PotentialSpec, point, tol: float = 1e-7
) -> CheckReport:
    """Rescaled Ricci splits into a df⊗df part and a pure-trace part.

    Checks the displayed equality
        Ric~ = (1/(n−2) + μ) df⊗df + (Δf − |∇f|² + (n−2)λ)/(n−2) · g
    (the last factor uses e^{2f/(n−2)} g~ = g) and then the eigenstructure:
    the gradient is an eigendirection and the tangential block is a
    multiple of the tangential projector.
    """
    n = chart.dim
    geo = CurvatureJets(chart, point)
    pj = PotentialJets(geo, pot)
    gradnorm2 = float(pj.gradnorm2[0])
    if gradnorm2 <= 1e-16:
        raise PreconditionError("regular point of the potential required")
    rescaled = conformal_metric(chart, pot.f)
    geo_t = CurvatureJets(rescaled, point)
    ric_t = jvalue(geo_t.ricci)
    df = pj.df.value_array()
    g0 = geo.metric.g.components
    rhs = (1.0 / (n - 2) + pot.mu) * np.outer(df, df) + (
        pj.laplacian - gradnorm2 + (n - 2) * pot.lam
    ) / (n - 2) * g0
    display_defect = float(np.max(np.abs(ric_t - rhs)))

    # eigenstructure with respect to the rescaled metric
    grad = jvalue(pj.grad)
    norm = math.sqrt(gradnorm2)
    conf = math.exp(float(pj.f.value) / (n - 2))
    n_up_t = conf * grad / norm
    n_down_t = df / (conf * norm)
    p_mixed = np.eye(n) - np.outer(n_up_t, n_down_t)
    g_t = geo_t.metric.g.components
    p_down_t = g_t - np.outer(n_down_t, n_down_t)
    tangential = p_mixed.T @ ric_t @ p_mixed
    coeff = float(np.einsum("ab,ab->", geo_t.metric.g_inv.components, tangential)) / (n - 1)
    eigen_tangential = float(np.max(np.abs(tangential - coeff * p_down_t)))
    eigen_direction = float(np.max(np.abs(p_mixed.T @ (ric_t @ n_up_t))))

    report = CheckReport(check="two_eigenvalue_structure", source=chart.name)
    scale = residual_scale(geo, pj)
    report.add_gate(
        "quasi_einstein_residual",
        float(np.max(np.abs(residual_components(geo, pj)))),
        RESIDUAL_GATE_TOL * scale,
    )
    report.add_gate(
        "conformal_flatness", max(geo.lcf_defects().values()), LCF_GATE_TOL * geo.riemann_scale()
    )
    defects = {
        "two_eigenvalue_display": display_defect,
        "tangential_eigenvalue": eigen_tangential,
        "gradient_eigendirection": eigen_direction,
    }
    report.add_point(geo.point, defects)
    ric_scale = max(1.0, float(np.max(np.abs(ric_t))))
    for key in defects:
        report.tolerances[key] = tol * max(scale, ric_scale)
    return report
