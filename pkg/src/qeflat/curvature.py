"""Curvature pipeline: metric → Christoffel → Riemann → Ricci → Weyl → Cotton.

Sign conventions are pinned by the round sphere: the (3,1) curvature is

    R^d_{abc} = ∂_b Γ^d_{ac} − ∂_a Γ^d_{bc} + Γ^e_{ac} Γ^d_{be} − Γ^e_{bc} Γ^d_{ae},

lowered on the upper slot, R_{abcd} = g_{de} R^e_{abc}, which makes
R_{abab} > 0 on the unit sphere for orthonormal a ≠ b.  Ricci is the
contraction R_{ac} = g^{bd} R_{abcd} (positive on spheres).  All later
formulas (Weyl decomposition, Cotton, Gauss equation) are written in
these conventions and their signs are enforced by tests.

Everything is computed over jets so the same pass yields the derivatives
needed downstream: the metric is exact to order 3, Christoffel to 2,
Riemann/Ricci/Weyl to 1, which leaves exactly one covariant derivative
for Cotton and for the divergence of Weyl.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .chart import MetricSpec, PotentialSpec
from .errors import PreconditionError
from .jets import JetContext, invert_symmetric_jet_matrix, jdiff, jet_einsum, jvalue
from .report import CheckReport
from .tensors import JetTensor, MetricAtPoint, TensorValue, covariant_derivative

# default tolerances: jet-exact identities vs finite-difference comparisons
TOL_EXACT = 1e-8
TOL_FD = 1e-4


class CurvatureJets:
    """All jet-valued curvature data of one chart at one point."""

    def __init__(self, chart: MetricSpec, point) -> None:
        self.chart = chart
        self.point = tuple(float(x) for x in point)
        self.n = chart.dim
        self.ctx: JetContext = chart.context()
        self.g = chart.metric_jets(self.point)  # exact to order 3
        self.metric = MetricAtPoint.from_matrix(np.ascontiguousarray(self.g[..., 0]))

    # -- metric level ---------------------------------------------------

    @cached_property
    def ginv(self) -> np.ndarray:  # order 3
        return invert_symmetric_jet_matrix(self.g, self.ctx)

    @cached_property
    def dg(self) -> np.ndarray:  # (k, a, b) = ∂_k g_ab, order 2
        return np.stack([jdiff(self.g, k, self.ctx) for k in range(self.n)], axis=0)

    @cached_property
    def gamma(self) -> np.ndarray:
        """Γ^a_{bc} = ½ g^{ad}(∂_b g_{dc} + ∂_c g_{bd} − ∂_d g_{bc}); order 2."""
        dg = self.dg
        t = np.einsum("bdcZ->dbcZ", dg) + np.einsum("cbdZ->dbcZ", dg) - dg
        return 0.5 * jet_einsum("ad,dbc->abc", self.ginv, t, self.ctx)

    @cached_property
    def gamma_tensor(self) -> JetTensor:
        return JetTensor(self.ctx, ("u", "d", "d"), self.gamma, 2)

    # -- curvature level --------------------------------------------------

    @cached_property
    def riemann_up(self) -> np.ndarray:  # (d, a, b, c) = R^d_{abc}, order 1
        dgamma = np.stack([jdiff(self.gamma, e, self.ctx) for e in range(self.n)], axis=0)
        term_b = np.einsum("bdacZ->dabcZ", dgamma)  # ∂_b Γ^d_{ac}
        term_a = np.einsum("adbcZ->dabcZ", dgamma)  # ∂_a Γ^d_{bc}
        prod1 = jet_einsum("eac,dbe->dabc", self.gamma, self.gamma, self.ctx)
        prod2 = jet_einsum("ebc,dae->dabc", self.gamma, self.gamma, self.ctx)
        return term_b - term_a + prod1 - prod2

    @cached_property
    def riemann(self) -> np.ndarray:  # R_{abcd}, order 1
        return jet_einsum("de,eabc->abcd", self.g, self.riemann_up, self.ctx)

    @cached_property
    def ricci(self) -> np.ndarray:  # R_{ac} = g^{bd} R_{abcd}, order 1
        return jet_einsum("bd,abcd->ac", self.ginv, self.riemann, self.ctx)

    @cached_property
    def scalar(self) -> np.ndarray:  # shape (size,), order 1
        return jet_einsum("ac,ac->", self.ginv, self.ricci, self.ctx)

    @cached_property
    def weyl(self) -> np.ndarray:
        """Trace-free part of Riemann; defined for n ≥ 4 only (order 1)."""
        n = self.n
        if n < 4:
            raise PreconditionError(
                "the Weyl tensor vanishes identically in dimension 3; "
                "use the Cotton tensor to probe conformal flatness"
            )
        g, ric = self.g, self.ricci
        gg = (
            jet_einsum("ac,bd->abcd", g, g, self.ctx)
            - jet_einsum("ad,bc->abcd", g, g, self.ctx)
        )
        ric_g = (
            jet_einsum("ac,bd->abcd", ric, g, self.ctx)
            - jet_einsum("ad,bc->abcd", ric, g, self.ctx)
            + jet_einsum("bd,ac->abcd", ric, g, self.ctx)
            - jet_einsum("bc,ad->abcd", ric, g, self.ctx)
        )
        r_term = jet_einsum(",abcd->abcd", self.scalar, gg, self.ctx)
        return self.riemann + r_term / ((n - 1) * (n - 2)) - ric_g / (n - 2)

    # -- first covariant derivatives (exact at the point) ----------------

    @cached_property
    def nabla_ricci(self) -> JetTensor:  # (∇Ric)_{abc} = ∇_c R_{ab}, order 0
        ric = JetTensor(self.ctx, ("d", "d"), self.ricci, 1)
        return covariant_derivative(ric, self.gamma_tensor)

    @cached_property
    def dscalar(self) -> np.ndarray:  # (c, size), ∇_c R, order 0
        return np.stack([jdiff(self.scalar, c, self.ctx) for c in range(self.n)], axis=0)

    @cached_property
    def cotton(self) -> np.ndarray:
        """C_{abc} = ∇_c R_{ab} − ∇_b R_{ac} − (∇_c R g_{ab} − ∇_b R g_{ac})/(2(n−1))."""
        nr = self.nabla_ricci.value_array()
        d_r = jvalue(self.dscalar)
        g0 = self.metric.g.components
        first = nr - np.einsum("acb->abc", nr)
        second = np.einsum("c,ab->abc", d_r, g0) - np.einsum("b,ac->abc", d_r, g0)
        return first - second / (2.0 * (self.n - 1))

    @cached_property
    def weyl_divergence(self) -> np.ndarray:
        """Divergence of Weyl with the free indices left in order.

        The contraction slot is fixed by antisymmetry matching: the result
        must share the Cotton tensor's antisymmetry in its last index pair,
        which (using the pair symmetry of W) singles out g^{ae} ∇_e W_{abcd}.
        """
        w = JetTensor(self.ctx, ("d",) * 4, self.weyl, 1)
        nw = covariant_derivative(w, self.gamma_tensor).value_array()
        return np.einsum("ae,abcde->bcd", self.metric.g_inv.components, nw)

    # -- convenience ------------------------------------------------------

    def riemann_scale(self) -> float:
        return max(1.0, float(np.max(np.abs(jvalue(self.riemann)))))

    def lcf_defects(self) -> dict[str, float]:
        """Conformal-flatness obstructions: Cotton always, Weyl for n ≥ 4."""
        out = {"cotton_norm": float(np.max(np.abs(self.cotton)))}
        if self.n >= 4:
            out["weyl_norm"] = float(np.max(np.abs(jvalue(self.weyl))))
        return out


@dataclass(frozen=True)
class CurvaturePack:
    point: tuple[float, ...]
    christoffel: TensorValue
    riemann: TensorValue
    ricci: TensorValue
    scalar: float
    weyl: TensorValue | None
    cotton: TensorValue


def christoffel(chart: MetricSpec, point) -> TensorValue:
    geo = CurvatureJets(chart, point)
    return TensorValue(geo.n, ("u", "d", "d"), jvalue(geo.gamma))


def riemann(chart: MetricSpec, point) -> TensorValue:
    geo = CurvatureJets(chart, point)
    return TensorValue(geo.n, ("d", "d", "d", "d"), jvalue(geo.riemann))


def ricci_scalar(chart: MetricSpec, point) -> tuple[TensorValue, float]:
    geo = CurvatureJets(chart, point)
    return TensorValue(geo.n, ("d", "d"), jvalue(geo.ricci)), float(geo.scalar[0])


def weyl(chart: MetricSpec, point) -> TensorValue:
    geo = CurvatureJets(chart, point)
    return TensorValue(geo.n, ("d", "d", "d", "d"), jvalue(geo.weyl))


def cotton(chart: MetricSpec, point) -> TensorValue:
    geo = CurvatureJets(chart, point)
    return TensorValue(geo.n, ("d", "d", "d"), geo.cotton)


def curvature_pack(chart: MetricSpec, point) -> CurvaturePack:
    geo = CurvatureJets(chart, point)
    n = geo.n
    return CurvaturePack(
        point=geo.point,
        christoffel=TensorValue(n, ("u", "d", "d"), jvalue(geo.gamma)),
        riemann=TensorValue(n, ("d", "d", "d", "d"), jvalue(geo.riemann)),
        ricci=TensorValue(n, ("d", "d"), jvalue(geo.ricci)),
        scalar=float(geo.scalar[0]),
        weyl=TensorValue(n, ("d", "d", "d", "d"), jvalue(geo.weyl)) if n >= 4 else None,
        cotton=TensorValue(n, ("d", "d", "d"), geo.cotton),
    )


def invariant_defects(geo: CurvatureJets) -> dict[str, float]:
    """Unconditional structure checks: symmetries, Bianchi, trace-freeness."""
    out: dict[str, float] = {}
    gamma = jvalue(geo.gamma)
    out["christoffel_symmetry"] = float(np.max(np.abs(gamma - np.einsum("acb->abc", gamma))))
    rm = jvalue(geo.riemann)
    out["riemann_antisym_first_pair"] = float(np.max(np.abs(rm + np.einsum("bacd->abcd", rm))))
    out["riemann_antisym_second_pair"] = float(np.max(np.abs(rm + np.einsum("abdc->abcd", rm))))
    out["riemann_pair_symmetry"] = float(np.max(np.abs(rm - np.einsum("cdab->abcd", rm))))
    out["bianchi_first"] = float(
        np.max(np.abs(rm + np.einsum("bcad->abcd", rm) + np.einsum("cabd->abcd", rm)))
    )
    ric = jvalue(geo.ricci)
    out["ricci_symmetry"] = float(np.max(np.abs(ric - ric.T)))
    # contracted second Bianchi (Schur): ∇_b R = 2 g^{ac} ∇_c R_{ab}
    d_r = jvalue(geo.dscalar)
    div_ric = np.einsum("ac,abc->b", geo.metric.g_inv.components, geo.nabla_ricci.value_array())
    out["schur_divergence"] = float(np.max(np.abs(d_r - 2.0 * div_ric)))
    ct = geo.cotton
    out["cotton_antisymmetry"] = float(np.max(np.abs(ct + np.einsum("acb->abc", ct))))
    out["cotton_trace_free"] = float(
        np.max(np.abs(np.einsum("ab,abc->c", geo.metric.g_inv.components, ct)))
    )
    if geo.n >= 4:
        w = jvalue(geo.weyl)
        ginv = geo.metric.g_inv.components
        traces = [
            np.einsum("ac,abcd->bd", ginv, w),
            np.einsum("ab,abcd->cd", ginv, w),
            np.einsum("ad,abcd->bc", ginv, w),
            np.einsum("bc,abcd->ad", ginv, w),
            np.einsum("bd,abcd->ac", ginv, w),
            np.einsum("cd,abcd->ab", ginv, w),
        ]
        out["weyl_trace_free"] = float(max(np.max(np.abs(t)) for t in traces))
    return out


def weyl_divergence_defect(geo: CurvatureJets) -> float:
    """|div W + ((n−3)/(n−2)) C|∞ — zero for every metric, n ≥ 4."""
    if geo.n < 4:
        raise PreconditionError("the divergence identity for Weyl needs dimension n >= 4")
    factor = (geo.n - 3) / (geo.n - 2)
    return float(np.max(np.abs(geo.weyl_divergence + factor * geo.cotton)))


def check_weyl_divergence(chart: MetricSpec, point, tol: float = 1e-6) -> CheckReport:
    """Divergence of Weyl against the Cotton tensor, two independent paths."""
    geo = CurvatureJets(chart, point)
    report = CheckReport(check="weyl_divergence", source=chart.name)
    scale = geo.riemann_scale()
    report.tolerances["weyl_divergence_vs_cotton"] = tol * scale
    report.add_point(geo.point, {"weyl_divergence_vs_cotton": weyl_divergence_defect(geo)})
    return report


# -- potential-dependent jets -------------------------------------------------


class PotentialJets:
    """Jets of f and its derived objects over an existing curvature pass."""

    def __init__(self, geo: CurvatureJets, pot: PotentialSpec) -> None:
        self.geo = geo
        self.pot = pot
        self.f = pot.f_jet(geo.chart, geo.point)  # order 3

    @cached_property
    def df(self) -> JetTensor:  # ∂_a f, order 2
        ctx = self.geo.ctx
        coeffs = np.stack([jdiff(self.f.c, a, ctx) for a in range(self.geo.n)], axis=0)
        return JetTensor(ctx, ("d",), coeffs, 2)

    @cached_property
    def hessian(self) -> JetTensor:  # ∇²f_{ab}, order 1
        return covariant_derivative(self.df, self.geo.gamma_tensor)

    @cached_property
    def grad(self) -> np.ndarray:  # ∇^a f = g^{ab} ∂_b f, order 2
        return jet_einsum("ab,b->a", self.geo.ginv, self.df.coeffs, self.geo.ctx)

    @cached_property
    def gradnorm2(self) -> np.ndarray:  # |∇f|² jets, order 2
        return jet_einsum("a,a->", self.grad, self.df.coeffs, self.geo.ctx)

    @cached_property
    def laplacian(self) -> float:  # Δf = g^{ab} ∇²f_{ab} at the point
        return float(
            np.einsum(
                "ab,ab->", self.geo.metric.g_inv.components, self.hessian.value_array()
            )
        )
