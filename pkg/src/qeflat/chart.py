"""Chart data: metric component expressions and the potential.

A MetricSpec is one coordinate chart: dimension, ordered coordinate names,
lower-triangular component expressions (missing entries are zero) and a
box from which sample points are drawn.  A PotentialSpec carries the
scalar potential together with its two constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets
from .errors import InputError
from .expr import Expression, evaluate, parse
from .rng import SplitMix64


@dataclass(frozen=True)
class MetricSpec:
    dim: int
    coordinates: tuple[str, ...]
    components: dict[tuple[int, int], Expression]  # keys (a, b) with a <= b
    domain: tuple[tuple[float, float], ...]
    name: str = ""
    adapted: bool = False  # asserts coordinate 0 is the potential value

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise InputError("metric dimension must be at least 2")
        if len(self.coordinates) != self.dim:
            raise InputError("coordinate count must equal the dimension")
        if len(set(self.coordinates)) != self.dim:
            raise InputError("coordinate names must be distinct")
        if len(self.domain) != self.dim:
            raise InputError("domain must give one [lo, hi] interval per coordinate")
        for lo, hi in self.domain:
            if not lo < hi:
                raise InputError(f"empty domain interval [{lo}, {hi}]")
        for (a, b), comp in self.components.items():
            if not (0 <= a <= b < self.dim):
                raise InputError(f"metric key ({a}, {b}) out of range for dimension {self.dim}")
            unknown = comp.variables() - set(self.coordinates)
            if unknown:
                raise InputError(f"metric component ({a}, {b}) uses unknown names {sorted(unknown)}")

    def component(self, a: int, b: int) -> Expression | None:
        if a > b:
            a, b = b, a
        return self.components.get((a, b))

    def context(self) -> jets.JetContext:
        return jets.JetContext.get(self.dim)

    def seed_jets(self, point) -> list[jets.Jet]:
        return jets.seed(point, self.dim)

    def metric_jets(self, point) -> np.ndarray:
        """(n, n, size) coefficient array of g_ab, exact to order 3."""
        ctx = self.context()
        env = dict(zip(self.coordinates, self.seed_jets(point)))
        out = np.zeros((self.dim, self.dim, ctx.size))
        for (a, b), comp in self.components.items():
            value = evaluate(comp, env)
            coeffs = value.c if isinstance(value, jets.Jet) else _const(value, ctx)
            out[a, b] = coeffs
            if a != b:
                out[b, a] = coeffs
        return out

    def metric_values(self, point) -> np.ndarray:
        env = dict(zip(self.coordinates, (float(x) for x in point)))
        out = np.zeros((self.dim, self.dim))
        for (a, b), comp in self.components.items():
            v = float(evaluate(comp, env))
            out[a, b] = v
            out[b, a] = v
        return out

    def sample_point(self, rng: SplitMix64) -> tuple[float, ...]:
        return rng.point_in_box(list(self.domain))

    def sample_points(self, rng: SplitMix64, count: int) -> list[tuple[float, ...]]:
        return [self.sample_point(rng) for _ in range(count)]


def _const(value: float, ctx: jets.JetContext) -> np.ndarray:
    c = np.zeros(ctx.size)
    c[0] = float(value)
    return c


@dataclass(frozen=True)
class PotentialSpec:
    f: Expression
    mu: float
    lam: float

    def f_jet(self, chart: MetricSpec, point) -> jets.Jet:
        env = dict(zip(chart.coordinates, chart.seed_jets(point)))
        value = evaluate(self.f, env)
        if isinstance(value, jets.Jet):
            return value
        return jets.constant_jet(float(value), chart.context())

    def is_special_mu(self, dim: int, tol: float = 1e-12) -> bool:
        """True when mu sits at the conformally-Einstein value 1/(2-n)."""
        return abs(self.mu - 1.0 / (2.0 - dim)) <= tol


def metric_from_strings(
    dim: int,
    coordinates: list[str] | tuple[str, ...],
    entries: dict[str, str],
    domain: list[tuple[float, float]],
    name: str = "",
    adapted: bool = False,
) -> MetricSpec:
    """Build a MetricSpec from component source strings keyed like "01"."""
    coords = tuple(coordinates)
    comps: dict[tuple[int, int], Expression] = {}
    for key, source in entries.items():
        if len(key) != 2 or not key.isdigit():
            raise InputError(f"metric key {key!r} must be two digits 'ab'")
        a, b = int(key[0]), int(key[1])
        if a > b:
            raise InputError(f"metric key {key!r} must have a <= b (lower-triangular keys)")
        comps[(a, b)] = parse(source, coords)
    return MetricSpec(dim, coords, comps, tuple((float(lo), float(hi)) for lo, hi in domain),
                      name=name, adapted=adapted)
