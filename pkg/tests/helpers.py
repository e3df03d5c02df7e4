"""Shared test machinery: random charts and the finite-difference oracle.

The oracle recomputes the whole curvature pipeline from central finite
differences of the metric component expressions (single FD layer on g;
everything above is exact product/chain-rule assembly in numpy).  It
never touches the jet engine, which is what makes it an independent
check of that engine.
"""

from __future__ import annotations

import random
from itertools import combinations_with_replacement

import numpy as np

from qeflat.chart import MetricSpec, metric_from_strings
from qeflat.expr import Expression, parse
from qeflat.findiff import fd_partials

# --- random chart generation ---------------------------------------------------

_BOUNDED = ("sin", "cos", "tanh")
_SMOOTH_POS = ("exp",)


def _term(rnd: random.Random, coords: list[str]) -> str:
    kind = rnd.randrange(5)
    c = rnd.choice(coords)
    d = rnd.choice(coords)
    if kind == 0:
        return c
    if kind == 1:
        return f"{c}*{d}"
    if kind == 2:
        return f"{rnd.choice(_BOUNDED)}({c})"
    if kind == 3:
        return f"{rnd.choice(_BOUNDED)}({c} + {d})"
    return f"{c}^2"


def random_metric(n: int, rnd: random.Random, amplitude: float = 0.12, name: str = "") -> MetricSpec:
    """Positive-definite perturbation of the flat metric on [-1, 1]^n."""
    coords = [f"x{i}" for i in range(n)]
    entries: dict[str, str] = {}
    for i in range(n):
        a1 = rnd.uniform(0.3, 1.0) * amplitude
        a2 = rnd.uniform(0.3, 1.0) * amplitude
        entries[f"{i}{i}"] = f"1 + {a1:.6f}*{_term(rnd, coords)} + {a2:.6f}*{_term(rnd, coords)}"
    # keep the off-diagonal mass small so Cholesky succeeds on the whole box
    budget = 0.35 / max(1, n - 1)
    for i in range(n):
        for j in range(i + 1, n):
            if rnd.random() < 0.7:
                a = rnd.uniform(0.2, 1.0) * amplitude * budget / 0.35 * 0.35
                entries[f"{i}{j}"] = f"{a:.6f}*{_term(rnd, coords)}"
    return metric_from_strings(n, coords, entries, [(-1.0, 1.0)] * n, name=name or f"random:{n}")


def random_potential(n: int, rnd: random.Random) -> Expression:
    coords = [f"x{i}" for i in range(n)]
    parts = []
    for _ in range(rnd.randrange(2, 4)):
        a = rnd.uniform(-0.4, 0.4)
        parts.append(f"{a:.6f}*{_term(rnd, coords)}")
    return parse(" + ".join(parts), coords)


def random_point(n: int, rnd: random.Random, radius: float = 0.8) -> tuple[float, ...]:
    return tuple(rnd.uniform(-radius, radius) for _ in range(n))


def random_expression(n: int, rnd: random.Random, depth: int = 3) -> Expression:
    """Small smooth AST over n coordinates, safe on [-1, 1]^n."""
    coords = [f"x{i}" for i in range(n)]

    def gen(level: int) -> str:
        if level <= 0 or rnd.random() < 0.3:
            if rnd.random() < 0.6:
                return rnd.choice(coords)
            return f"{rnd.uniform(0.1, 2.0):.4f}"
        kind = rnd.randrange(6)
        if kind == 0:
            return f"({gen(level - 1)} + {gen(level - 1)})"
        if kind == 1:
            return f"({gen(level - 1)} - {gen(level - 1)})"
        if kind == 2:
            return f"({gen(level - 1)} * {gen(level - 1)})"
        if kind == 3:
            # bounded denominator keeps the quotient smooth on the box
            return f"({gen(level - 1)} / (2 + {rnd.choice(_BOUNDED)}({gen(level - 1)})))"
        if kind == 4:
            fn = rnd.choice(_BOUNDED + _SMOOTH_POS)
            return f"{fn}({gen(level - 1)})"
        return f"({gen(level - 1)})^{rnd.choice((2, 3))}"

    return parse(gen(depth), coords)


# --- finite-difference curvature oracle -----------------------------------------


def _metric_partials(chart: MetricSpec, point, order: int) -> np.ndarray:
    """Array of raw partials of g: shape (n,)*order + (n, n), symmetric fill."""
    n = chart.dim
    out = np.zeros((n,) * order + (n, n))
    cache: dict[tuple, np.ndarray] = {}
    for combo in combinations_with_replacement(range(n), order):
        alpha = [0] * n
        for i in combo:
            alpha[i] += 1
        block = np.zeros((n, n))
        for (a, b), comp in chart.components.items():
            value = fd_partials(comp, point, alpha)
            block[a, b] = value
            block[b, a] = value
        cache[combo] = block
    from itertools import permutations

    for combo, block in cache.items():
        for perm in set(permutations(combo)):
            out[perm] = block
    return out


def fd_curvature(chart: MetricSpec, point) -> dict[str, np.ndarray | float]:
    """Christoffel through Cotton from finite differences of g only."""
    n = chart.dim
    g = chart.metric_values(point)
    dg = _metric_partials(chart, point, 1)  # (e, a, b)
    ddg = _metric_partials(chart, point, 2)  # (e, f, a, b)
    dddg = _metric_partials(chart, point, 3)  # (e, f, h, a, b)

    ginv = np.linalg.inv(g)
    dginv = -np.einsum("ac,ecd,db->eab", ginv, dg, ginv)
    ddginv = -(
        np.einsum("fac,ecd,db->efab", dginv, dg, ginv)
        + np.einsum("ac,efcd,db->efab", ginv, ddg, ginv)
        + np.einsum("ac,ecd,fdb->efab", ginv, dg, dginv)
    )

    t = np.einsum("bdc->dbc", dg) + np.einsum("cbd->dbc", dg) - dg
    dt = np.einsum("ebdc->edbc", ddg) + np.einsum("ecbd->edbc", ddg) - ddg
    ddt = (
        np.einsum("efbdc->efdbc", dddg)
        + np.einsum("efcbd->efdbc", dddg)
        - dddg
    )
    gamma = 0.5 * np.einsum("ad,dbc->abc", ginv, t)
    dgamma = 0.5 * (
        np.einsum("ead,dbc->eabc", dginv, t) + np.einsum("ad,edbc->eabc", ginv, dt)
    )
    ddgamma = 0.5 * (
        np.einsum("efad,dbc->efabc", ddginv, t)
        + np.einsum("ead,fdbc->efabc", dginv, dt)
        + np.einsum("fad,edbc->efabc", dginv, dt)
        + np.einsum("ad,efdbc->efabc", ginv, ddt)
    )

    r_up = (
        np.einsum("bdac->dabc", dgamma)
        - np.einsum("adbc->dabc", dgamma)
        + np.einsum("eac,dbe->dabc", gamma, gamma)
        - np.einsum("ebc,dae->dabc", gamma, gamma)
    )
    dr_up = (
        np.einsum("fbdac->fdabc", ddgamma)
        - np.einsum("fadbc->fdabc", ddgamma)
        + np.einsum("feac,dbe->fdabc", dgamma, gamma)
        + np.einsum("eac,fdbe->fdabc", gamma, dgamma)
        - np.einsum("febc,dae->fdabc", dgamma, gamma)
        - np.einsum("ebc,fdae->fdabc", gamma, dgamma)
    )
    riemann = np.einsum("de,eabc->abcd", g, r_up)
    driemann = np.einsum("fde,eabc->fabcd", dg, r_up) + np.einsum(
        "de,feabc->fabcd", g, dr_up
    )
    ricci = np.einsum("bd,abcd->ac", ginv, riemann)
    dricci = np.einsum("fbd,abcd->fac", dginv, riemann) + np.einsum(
        "bd,fabcd->fac", ginv, driemann
    )
    scalar = float(np.einsum("ac,ac->", ginv, ricci))
    dscalar = np.einsum("fac,ac->f", dginv, ricci) + np.einsum("ac,fac->f", ginv, dricci)

    nabla_ricci = (
        np.einsum("cab->abc", dricci)
        - np.einsum("eca,eb->abc", gamma, ricci)
        - np.einsum("ecb,ae->abc", gamma, ricci)
    )
    cotton = (
        nabla_ricci
        - np.einsum("acb->abc", nabla_ricci)
        - (np.einsum("c,ab->abc", dscalar, g) - np.einsum("b,ac->abc", dscalar, g))
        / (2.0 * (n - 1))
    )

    weyl = None
    if n >= 4:
        gg = np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)
        ric_g = (
            np.einsum("ac,bd->abcd", ricci, g)
            - np.einsum("ad,bc->abcd", ricci, g)
            + np.einsum("bd,ac->abcd", ricci, g)
            - np.einsum("bc,ad->abcd", ricci, g)
        )
        weyl = riemann + scalar / ((n - 1) * (n - 2)) * gg - ric_g / (n - 2)

    return {
        "christoffel": gamma,
        "riemann": riemann,
        "ricci": ricci,
        "scalar": scalar,
        "weyl": weyl,
        "cotton": cotton,
    }


def agree(a, b, tol: float) -> bool:
    """Absolute-plus-relative agreement |a − b| <= tol·(1 + max(|a|, |b|))."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(np.all(np.abs(a - b) <= tol * (1.0 + np.maximum(np.abs(a), np.abs(b)))))
