"""Warped-product charts and the fixture catalog used across all checks.

Warped metrics have the form dt² + φ(t)²·g_k with a constant-curvature
fiber (k ∈ {−1, 0, +1}).  The hyperbolic fiber uses the exponential
upper-half-space chart (clean under jets); the spherical fiber uses the
polar chart with domain boxes that stay away from the poles.

The catalog returns exact fixtures: each quasi-Einstein entry was derived
in closed form (for g = dt² + e^{2t}δ and f = a·t the defining equation
forces a = −1/μ and λ = −1/μ − (n−1)), and the test suite re-verifies
every fixture numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chart import MetricSpec, PotentialSpec, metric_from_strings
from .errors import InputError
from .expr import parse
from .rng import SplitMix64


@dataclass(frozen=True)
class WarpSpec:
    n: int
    phi_source: str  # warping function of the base coordinate t
    fiber_curvature: int  # -1, 0, +1
    t_domain: tuple[float, float] = (-0.8, 0.8)
    name: str = ""

    def __post_init__(self) -> None:
        if self.n < 3:
            raise InputError("warped-product fixtures need total dimension n >= 3")
        if self.fiber_curvature not in (-1, 0, 1):
            raise InputError("fiber curvature must be -1, 0 or +1")


def _fiber_entries(k: int, m: int, coords: list[str], scale: str) -> dict[str, str]:
    """Component strings of scale·g_k on an m-dimensional fiber."""
    entries: dict[str, str] = {}
    if k == 0:
        for j in range(m):
            entries[f"{j + 1}{j + 1}"] = scale
    elif k == 1:
        prefix = ""
        for j in range(m):
            entries[f"{j + 1}{j + 1}"] = scale + prefix
            prefix += f" * sin({coords[j + 1]})^2"
    else:
        entries["11"] = scale
        for j in range(1, m):
            entries[f"{j + 1}{j + 1}"] = f"{scale} * exp(2*{coords[1]})"
    return entries


def _fiber_domain(k: int, m: int) -> list[tuple[float, float]]:
    if k == 0:
        return [(-1.0, 1.0)] * m
    if k == 1:
        return [(0.2, np.pi - 0.2)] * m
    return [(-0.8, 0.8)] + [(-1.0, 1.0)] * (m - 1)


def build_warped_chart(spec: WarpSpec) -> MetricSpec:
    """MetricSpec for dt² + φ(t)²·g_k; rejects φ ≤ 0 on the domain."""
    m = spec.n - 1
    coords = ["t"] + [f"y{j}" for j in range(1, m + 1)]
    phi = parse(spec.phi_source, ("t",))
    rng = SplitMix64(2)
    from .expr import evaluate

    for _ in range(32):
        t = rng.uniform(*spec.t_domain)
        if float(evaluate(phi, {"t": t})) <= 0.0:
            raise InputError(f"warping function {spec.phi_source!r} is not positive at t={t:.4g}")
    entries = {"00": "1"}
    entries.update(_fiber_entries(spec.fiber_curvature, m, coords, f"({spec.phi_source})^2"))
    domain = [spec.t_domain] + _fiber_domain(spec.fiber_curvature, m)
    return metric_from_strings(
        spec.n, coords, entries, domain, name=spec.name or f"warp(phi={spec.phi_source}, k={spec.fiber_curvature})"
    )


def check_warped_lcf(spec: WarpSpec, points, tol: float = 1e-6):
    """Conformal-flatness defect of a warped chart at the given points."""
    from .curvature import CurvatureJets
    from .report import CheckReport

    chart = build_warped_chart(spec)
    report = CheckReport(check="warped_lcf", source=chart.name)
    scale = 1.0
    for point in points:
        geo = CurvatureJets(chart, point)
        report.add_point(point, geo.lcf_defects())
        scale = max(scale, geo.riemann_scale())
    report.tolerances["cotton_norm"] = tol * scale
    if chart.dim >= 4:
        report.tolerances["weyl_norm"] = tol * scale
    return report


# --- catalog ------------------------------------------------------------------


@dataclass(frozen=True)
class Fixture:
    name: str
    chart: MetricSpec
    potential: PotentialSpec | None
    default_levels: tuple[float, ...] = ()
    level_sampler: Callable[[float, int, SplitMix64], list[tuple[float, ...]]] | None = None
    description: str = ""


def _flat(n: int) -> Fixture:
    coords = [f"x{i}" for i in range(n)]
    entries = {f"{i}{i}": "1" for i in range(n)}
    chart = metric_from_strings(n, coords, entries, [(-1.0, 1.0)] * n, name=f"flat:{n}")
    return Fixture("flat", chart, None, description="Euclidean metric in Cartesian coordinates")


def _sphere(n: int, radius: float) -> Fixture:
    coords = [f"a{i + 1}" for i in range(n)]
    r2 = repr(float(radius) ** 2)
    entries = {}
    prefix = ""
    for j in range(n):
        entries[f"{j}{j}"] = r2 + prefix
        prefix += f" * sin({coords[j]})^2"
    chart = metric_from_strings(
        n, coords, entries, [(0.2, np.pi - 0.2)] * n, name=f"sphere:{n}:{radius:g}"
    )
    return Fixture(
        "sphere", chart, None, description=f"round sphere of radius {radius:g}, polar chart"
    )


def _hyperbolic_chart(n: int, name: str) -> MetricSpec:
    coords = ["t"] + [f"x{i}" for i in range(1, n)]
    entries = {"00": "1"}
    for i in range(1, n):
        entries[f"{i}{i}"] = "exp(2*t)"
    domain = [(-0.8, 0.8)] + [(-1.0, 1.0)] * (n - 1)
    return metric_from_strings(n, coords, entries, domain, name=name)


def _hyperbolic(n: int) -> Fixture:
    chart = _hyperbolic_chart(n, f"hyperbolic:{n}")
    return Fixture(
        "hyperbolic", chart, None, description="hyperbolic space, exponential horospherical chart"
    )


def _gaussian_soliton(n: int) -> Fixture:
    coords = [f"x{i}" for i in range(n)]
    entries = {f"{i}{i}": "1" for i in range(n)}
    chart = metric_from_strings(
        n, coords, entries, [(0.4, 2.2)] * n, name=f"gaussian_soliton:{n}"
    )
    f_src = "(" + " + ".join(f"{c}^2" for c in coords) + ")/4"
    pot = PotentialSpec(parse(f_src, coords), mu=0.0, lam=0.5)

    def sampler(level: float, count: int, rng: SplitMix64) -> list[tuple[float, ...]]:
        if level <= 0.0:
            raise InputError("gaussian soliton level values must be positive")
        radius = 2.0 * np.sqrt(level)
        points = []
        for _ in range(count):
            direction = rng.unit_vector(n)
            points.append(tuple(radius * abs(d) for d in direction))
        return points

    return Fixture(
        "gaussian_soliton",
        chart,
        pot,
        default_levels=(0.36, 0.64, 1.0),
        level_sampler=sampler,
        description="flat space with quadratic potential (shrinking gradient soliton)",
    )


def _hyperbolic_qe(n: int, mu: float, name: str) -> Fixture:
    if mu == 0.0:
        raise InputError("mu = 0 degenerates this family; use gaussian_soliton instead")
    a = -1.0 / mu
    lam = -1.0 / mu - (n - 1)
    chart = _hyperbolic_chart(n, name)
    pot = PotentialSpec(parse(f"{a!r}*t", chart.coordinates), mu=mu, lam=lam)
    fiber_box = list(chart.domain[1:])
    levels = tuple(sorted(a * t + 0.0 for t in (-0.4, 0.0, 0.4)))

    def sampler(level: float, count: int, rng: SplitMix64) -> list[tuple[float, ...]]:
        t = level / a
        return [(t, *rng.point_in_box(fiber_box)) for _ in range(count)]

    return Fixture(
        name.split(":")[0],
        chart,
        pot,
        default_levels=levels,
        level_sampler=sampler,
        description=f"hyperbolic space with linear potential (mu={mu:g}, lambda={lam:g})",
    )


def _adapted_hyperbolic_qe(n: int, mu: float) -> Fixture:
    if mu == 0.0:
        raise InputError("mu = 0 degenerates this family; use adapted_gaussian_soliton instead")
    a = -1.0 / mu
    lam = -1.0 / mu - (n - 1)
    coords = ["f0"] + [f"x{i}" for i in range(1, n)]
    entries = {"00": repr(1.0 / a**2)}
    for i in range(1, n):
        entries[f"{i}{i}"] = f"exp({repr(2.0 / a)}*f0)"
    w = 0.8 * abs(a)
    domain = [(-w, w)] + [(-1.0, 1.0)] * (n - 1)
    chart = metric_from_strings(
        n, coords, entries, domain, name=f"adapted_hyperbolic_qe:{n}:{mu:g}", adapted=True
    )
    pot = PotentialSpec(parse("f0", coords), mu=mu, lam=lam)
    fiber_box = list(domain[1:])
    levels = (-0.5 * w, 0.0, 0.5 * w)

    def sampler(level: float, count: int, rng: SplitMix64) -> list[tuple[float, ...]]:
        return [(level, *rng.point_in_box(fiber_box)) for _ in range(count)]

    return Fixture(
        "adapted_hyperbolic_qe",
        chart,
        pot,
        default_levels=levels,
        level_sampler=sampler,
        description="hyperbolic quasi-Einstein fixture in the chart whose first coordinate is f",
    )


def _adapted_gaussian_soliton(n: int) -> Fixture:
    # flat space in spherical coordinates, reparameterized so x0 = |x|²/4
    coords = ["f0"] + [f"a{i}" for i in range(1, n)]
    entries = {"00": "1/f0"}
    prefix = ""
    for j in range(1, n):
        entries[f"{j}{j}"] = "4*f0" + prefix
        prefix += f" * sin({coords[j]})^2"
    domain = [(0.3, 1.2)] + [(0.2, np.pi - 0.2)] * (n - 1)
    chart = metric_from_strings(
        n, coords, entries, domain, name=f"adapted_gaussian_soliton:{n}", adapted=True
    )
    pot = PotentialSpec(parse("f0", coords), mu=0.0, lam=0.5)
    fiber_box = list(domain[1:])

    def sampler(level: float, count: int, rng: SplitMix64) -> list[tuple[float, ...]]:
        if not 0.0 < level:
            raise InputError("levels must be positive for this fixture")
        return [(level, *rng.point_in_box(fiber_box)) for _ in range(count)]

    return Fixture(
        "adapted_gaussian_soliton",
        chart,
        pot,
        default_levels=(0.4, 0.7, 1.0),
        level_sampler=sampler,
        description="gaussian soliton in the adapted chart (first coordinate is f)",
    )


def _s2xs2() -> Fixture:
    coords = ["a1", "p1", "a2", "p2"]
    entries = {"00": "1", "11": "sin(a1)^2", "22": "1", "33": "sin(a2)^2"}
    chart = metric_from_strings(
        4, coords, entries, [(0.3, np.pi - 0.3)] * 4, name="s2xs2"
    )
    # Einstein (Ric = g) with trivial potential, so the quasi-Einstein gate
    # passes and conformal flatness is the gate that fails.
    pot = PotentialSpec(parse("0", coords), mu=1.0, lam=1.0)
    return Fixture(
        "s2xs2",
        chart,
        pot,
        description="product of two round 2-spheres: Einstein but not conformally flat",
    )


_CATALOG: dict[str, tuple[Callable, str, str]] = {
    "flat": (lambda p: _flat(int(p[0]) if p else 3), "flat[:n]", "Euclidean space"),
    "sphere": (
        lambda p: _sphere(int(p[0]) if p else 3, float(p[1]) if len(p) > 1 else 1.0),
        "sphere[:n[:radius]]",
        "round sphere",
    ),
    "hyperbolic": (lambda p: _hyperbolic(int(p[0]) if p else 3), "hyperbolic[:n]", "hyperbolic space"),
    "gaussian_soliton": (
        lambda p: _gaussian_soliton(int(p[0]) if p else 3),
        "gaussian_soliton[:n]",
        "flat gradient soliton, f = |x|^2/4",
    ),
    "hyperbolic_qe": (
        lambda p: _hyperbolic_qe(
            int(p[0]) if p else 3,
            float(p[1]) if len(p) > 1 else 1.0,
            f"hyperbolic_qe:{int(p[0]) if p else 3}:{float(p[1]) if len(p) > 1 else 1.0:g}",
        ),
        "hyperbolic_qe[:n[:mu]]",
        "hyperbolic quasi-Einstein family, f = (-1/mu) t",
    ),
    "special_mu": (
        lambda p: _special_mu(int(p[0]) if p else 3),
        "special_mu[:n]",
        "the mu = 1/(2-n) member of the hyperbolic family",
    ),
    "adapted_hyperbolic_qe": (
        lambda p: _adapted_hyperbolic_qe(
            int(p[0]) if p else 3, float(p[1]) if len(p) > 1 else 1.0
        ),
        "adapted_hyperbolic_qe[:n[:mu]]",
        "hyperbolic quasi-Einstein fixture, adapted chart (x0 = f)",
    ),
    "adapted_gaussian_soliton": (
        lambda p: _adapted_gaussian_soliton(int(p[0]) if p else 3),
        "adapted_gaussian_soliton[:n]",
        "gaussian soliton, adapted chart (x0 = f)",
    ),
    "s2xs2": (lambda p: _s2xs2(), "s2xs2", "S^2 x S^2 negative control (Weyl != 0)"),
}


def _special_mu(n: int) -> Fixture:
    mu = 1.0 / (2.0 - n)
    fx = _hyperbolic_qe(n, mu, f"special_mu:{n}")
    return Fixture(
        "special_mu",
        fx.chart,
        fx.potential,
        default_levels=fx.default_levels,
        level_sampler=fx.level_sampler,
        description=f"quasi-Einstein fixture at the conformally-Einstein value mu = {mu:g}",
    )


def catalog(name: str) -> Fixture:
    """Look up a fixture by name, with colon-separated parameters.

    Examples: ``hyperbolic_qe:3:1``, ``sphere:4:2.0``, ``s2xs2``.
    """
    parts = name.split(":")
    base, params = parts[0], parts[1:]
    entry = _CATALOG.get(base)
    if entry is None:
        raise InputError(
            f"unknown catalog fixture {base!r}; available: {', '.join(sorted(_CATALOG))}"
        )
    builder = entry[0]
    try:
        return builder(params)
    except (ValueError, IndexError) as exc:
        raise InputError(f"bad parameters for catalog fixture {name!r}: {exc}") from None


def catalog_names() -> list[tuple[str, str, str]]:
    """(name, signature, description) for every fixture family."""
    return [(name, sig, desc) for name, (_, sig, desc) in sorted(_CATALOG.items())]
