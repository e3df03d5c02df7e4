"""Truncated multivariate Taylor arithmetic, fixed at total order 3.

A jet stores the Taylor-normalized coefficients ``∂^α u / α!`` of a scalar
``u`` for every multi-index ``α`` with ``|α| ≤ 3``, indexed in graded
order.  Order 3 is exactly what the deepest consumer (the Cotton tensor,
which needs third metric derivatives) requires, so the order is global
and not a parameter.

Two layers live here:

* a scalar :class:`Jet` with operator overloading, used when evaluating
  expression ASTs (floats mix in freely and stay exact in the value slot);
* array helpers (:func:`jmul`, :func:`jdiff`, :func:`jet_einsum`,
  :func:`invert_symmetric_jet_matrix`) operating on ndarrays whose last
  axis is the coefficient axis, used by the curvature pipeline.

Multiplication is a sparse convolution over precomputed index-pair
tables; the kernel implementation (compiled or numpy) is chosen by
:mod:`qeflat._backend`.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement

import numpy as np

from . import _backend

MAX_ORDER = 3


class JetDomainError(ValueError):
    """Function applied outside its smooth domain (log(x<=0), sqrt(x<0), ...)."""


def _monomials(n: int) -> list[tuple[int, ...]]:
    out = []
    for degree in range(MAX_ORDER + 1):
        for combo in combinations_with_replacement(range(n), degree):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            out.append(tuple(alpha))
    return out


class JetContext:
    """Per-dimension index tables and the bound multiplication kernel."""

    _cache: dict[int, "JetContext"] = {}

    def __init__(self, n: int) -> None:
        if n < 1:
            raise ValueError("jet dimension must be at least 1")
        self.n = n
        self.monomials = _monomials(n)
        self.size = len(self.monomials)  # C(n+3, 3)
        self.index = {alpha: k for k, alpha in enumerate(self.monomials)}
        self.degrees = np.array([sum(a) for a in self.monomials], dtype=np.intc)
        self.factorials = np.array(
            [math.prod(math.factorial(a) for a in alpha) for alpha in self.monomials]
        )
        ii, jj, kk = [], [], []
        for p, ap in enumerate(self.monomials):
            dp = sum(ap)
            for q, aq in enumerate(self.monomials):
                if dp + sum(aq) <= MAX_ORDER:
                    ii.append(p)
                    jj.append(q)
                    kk.append(self.index[tuple(x + y for x, y in zip(ap, aq))])
        self.ii = np.array(ii, dtype=np.intc)
        self.jj = np.array(jj, dtype=np.intc)
        self.kk = np.array(kk, dtype=np.intc)
        self.mul_batch = _backend.make_mul(self.ii, self.jj, self.kk, self.size)
        # derivative extraction: coefficient of β in ∂_i u is (β_i+1)·coeff(β+e_i)
        self.diff_tables = []
        for i in range(n):
            dst, src, fac = [], [], []
            for beta, k in self.index.items():
                if sum(beta) <= MAX_ORDER - 1:
                    shifted = list(beta)
                    shifted[i] += 1
                    dst.append(k)
                    src.append(self.index[tuple(shifted)])
                    fac.append(beta[i] + 1)
            self.diff_tables.append(
                (np.array(dst), np.array(src), np.array(fac, dtype=np.float64))
            )

    @classmethod
    def get(cls, n: int) -> "JetContext":
        ctx = cls._cache.get(n)
        if ctx is None:
            ctx = cls._cache[n] = cls(n)
        return ctx

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.empty((1, self.size))
        self.mul_batch(a.reshape(1, -1), b.reshape(1, -1), out)
        return out[0]


class Jet:
    """Scalar order-3 jet; arithmetic mixes transparently with floats."""

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: JetContext, coefficients: np.ndarray) -> None:
        self.ctx = ctx
        self.c = coefficients

    @property
    def value(self) -> float:
        return float(self.c[0])

    def partial(self, alpha: tuple[int, ...]) -> float:
        """Raw partial derivative ∂^α (coefficient times α!)."""
        k = self.ctx.index[tuple(alpha)]
        return float(self.c[k] * self.ctx.factorials[k])

    def __repr__(self) -> str:
        return f"Jet(n={self.ctx.n}, value={self.value!r})"

    # -- ring operations ------------------------------------------------

    def _coerce(self, other) -> np.ndarray | None:
        if isinstance(other, Jet):
            if other.ctx is not self.ctx:
                raise ValueError("jet dimension mismatch")
            return other.c
        if isinstance(other, (int, float)):
            return None  # handled as a pure scalar
        return NotImplemented

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        if c is None:
            out = self.c.copy()
            out[0] += other
            return Jet(self.ctx, out)
        return Jet(self.ctx, self.c + c)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        if c is None:
            out = self.c.copy()
            out[0] -= other
            return Jet(self.ctx, out)
        return Jet(self.ctx, self.c - c)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet(self.ctx, -self.c)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        if c is None:
            return Jet(self.ctx, self.c * other)
        return Jet(self.ctx, self.ctx.mul_vec(self.c, c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        if c is None:
            if other == 0.0:
                raise ZeroDivisionError("jet divided by zero")
            out = self.c / other
            return Jet(self.ctx, out)
        if c[0] == 0.0:
            raise ZeroDivisionError("division by a jet with zero value")
        out = self.ctx.mul_vec(self.c, _recip_coeffs(self.ctx, c))
        out[0] = self.c[0] / c[0]  # keep the value slot exactly the float quotient
        return Jet(self.ctx, out)

    def __rtruediv__(self, other):
        if not isinstance(other, (int, float)):
            return NotImplemented
        if self.c[0] == 0.0:
            raise ZeroDivisionError("division by a jet with zero value")
        out = other * _recip_coeffs(self.ctx, self.c)
        out[0] = other / self.c[0]
        return Jet(self.ctx, out)


def constant_jet(value: float, ctx: JetContext) -> Jet:
    c = np.zeros(ctx.size)
    c[0] = value
    return Jet(ctx, c)


def is_constant(jet: Jet) -> bool:
    return not np.any(jet.c[1:])


def seed(point, n: int | None = None) -> list[Jet]:
    """Coordinate jets at ``point``: value x_i, unit first-order slot i."""
    point = tuple(float(x) for x in point)
    if n is None:
        n = len(point)
    if n < 2:
        raise ValueError("jet seeding requires dimension n >= 2")
    if len(point) != n:
        raise ValueError(f"point has {len(point)} coordinates, expected {n}")
    ctx = JetContext.get(n)
    out = []
    for i in range(n):
        c = np.zeros(ctx.size)
        c[0] = point[i]
        unit = [0] * n
        unit[i] = 1
        c[ctx.index[tuple(unit)]] = 1.0
        out.append(Jet(ctx, c))
    return out


# -- composition with elementary functions -----------------------------------


def _recip_coeffs(ctx: JetContext, c: np.ndarray) -> np.ndarray:
    v = c[0]
    return _compose(ctx, c, (1.0 / v, -1.0 / v**2, 1.0 / v**3, -1.0 / v**4))


def _compose(ctx: JetContext, c: np.ndarray, taylor: tuple[float, float, float, float]) -> np.ndarray:
    """c0 + c1·h + c2·h² + c3·h³ with h the zero-value part of ``c``."""
    c0, c1, c2, c3 = taylor
    h = c.copy()
    h[0] = 0.0
    h2 = ctx.mul_vec(h, h)
    h3 = ctx.mul_vec(h2, h)
    out = c1 * h + c2 * h2 + c3 * h3
    out[0] = c0
    return out


def _function_taylor(name: str, v: float) -> tuple[float, float, float, float]:
    """(f(v), f'(v), f''(v)/2, f'''(v)/6) for each supported primitive."""
    if name == "exp":
        ev = math.exp(v)
        return (ev, ev, ev / 2.0, ev / 6.0)
    if name == "log":
        if v <= 0.0:
            raise JetDomainError(f"log of non-positive value {v!r}")
        return (math.log(v), 1.0 / v, -0.5 / v**2, 1.0 / (3.0 * v**3))
    if name == "sqrt":
        if v < 0.0:
            raise JetDomainError(f"sqrt of negative value {v!r}")
        if v == 0.0:
            raise JetDomainError("sqrt at zero has no finite derivative")
        s = math.sqrt(v)
        return (s, 0.5 / s, -1.0 / (8.0 * s**3), 1.0 / (16.0 * s**5))
    if name == "sin":
        sv, cv = math.sin(v), math.cos(v)
        return (sv, cv, -sv / 2.0, -cv / 6.0)
    if name == "cos":
        sv, cv = math.sin(v), math.cos(v)
        return (cv, -sv, -cv / 2.0, sv / 6.0)
    if name == "tan":
        w = math.tan(v)
        d = 1.0 + w * w
        return (w, d, w * d, d * (1.0 + 3.0 * w * w) / 3.0)
    if name == "sinh":
        sv, cv = math.sinh(v), math.cosh(v)
        return (sv, cv, sv / 2.0, cv / 6.0)
    if name == "cosh":
        sv, cv = math.sinh(v), math.cosh(v)
        return (cv, sv, cv / 2.0, sv / 6.0)
    if name == "tanh":
        w = math.tanh(v)
        d = 1.0 - w * w
        return (w, d, -w * d, d * (3.0 * w * w - 1.0) / 3.0)
    raise ValueError(f"unknown function {name!r}")


def apply_function(name: str, jet: Jet) -> Jet:
    return Jet(jet.ctx, _compose(jet.ctx, jet.c, _function_taylor(name, jet.c[0])))


# -- array layer --------------------------------------------------------------
#
# Arrays carry jet coefficients in the LAST axis (length ctx.size).  The
# helpers below do not track how many coefficient grades are still exact;
# callers that extract derivatives are responsible for that bookkeeping
# (see qeflat.tensors.JetTensor for the checked wrapper).


def jconst(values: np.ndarray, ctx: JetContext) -> np.ndarray:
    out = np.zeros(np.shape(values) + (ctx.size,))
    out[..., 0] = values
    return out


def jvalue(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a[..., 0])


def jmul(a: np.ndarray, b: np.ndarray, ctx: JetContext) -> np.ndarray:
    """Elementwise jet product with numpy-style broadcasting of lead axes."""
    a, b = np.broadcast_arrays(a, b)
    out = np.empty(a.shape)
    ctx.mul_batch(
        np.ascontiguousarray(a).reshape(-1, ctx.size),
        np.ascontiguousarray(b).reshape(-1, ctx.size),
        out.reshape(-1, ctx.size),
    )
    return out


def jdiff(a: np.ndarray, direction: int, ctx: JetContext) -> np.ndarray:
    """Partial derivative in ``direction``; top-grade coefficients become 0.

    The result is exact one grade below the input's exact grade.
    """
    dst, src, fac = ctx.diff_tables[direction]
    out = np.zeros_like(a)
    out[..., dst] = a[..., src] * fac
    return out


def _align(x: np.ndarray, letters: str, target: str) -> np.ndarray:
    """View of jet array ``x`` broadcastable over the ``target`` axis order."""
    perm = sorted(range(len(letters)), key=lambda ax: target.index(letters[ax]))
    x = np.transpose(x, (*perm, len(letters)))
    shape = []
    xi = 0
    for letter in target:
        if letter in letters:
            shape.append(x.shape[xi])
            xi += 1
        else:
            shape.append(1)
    shape.append(x.shape[-1])
    return x.reshape(shape)


def jet_einsum(spec: str, a: np.ndarray, b: np.ndarray, ctx: JetContext) -> np.ndarray:
    """Two-operand einsum where same-letter pairs contract by summation.

    Operands may be jet arrays (one trailing coefficient axis) or plain
    float arrays; float-by-jet products act coefficient-wise.  Repeated
    letters within a single operand are not supported.
    """
    inputs, out_letters = spec.replace(" ", "").split("->")
    a_letters, b_letters = inputs.split(",")
    if len(set(a_letters)) != len(a_letters) or len(set(b_letters)) != len(b_letters):
        raise ValueError("repeated letters within one operand are not supported")
    a_jet = a.ndim == len(a_letters) + 1
    b_jet = b.ndim == len(b_letters) + 1
    if not a_jet and not b_jet:
        return np.einsum(f"{a_letters},{b_letters}->{out_letters}", a, b)
    if a_jet != b_jet:
        sa = a_letters + ("Z" if a_jet else "")
        sb = b_letters + ("Z" if b_jet else "")
        return np.einsum(f"{sa},{sb}->{out_letters}Z", a, b)
    contracted = "".join(l for l in a_letters if l in b_letters and l not in out_letters)
    target = out_letters + contracted
    prod = jmul(_align(a, a_letters, target), _align(b, b_letters, target), ctx)
    if contracted:
        axes = tuple(range(len(out_letters), len(target)))
        prod = prod.sum(axis=axes)
    return prod


def invert_symmetric_jet_matrix(g: np.ndarray, ctx: JetContext) -> np.ndarray:
    """Inverse of an (n, n, size) jet matrix, exact to order 3.

    Splits g = g0 + H with H carrying no value part; H is nilpotent in the
    truncated ring, so (g0 + H)^{-1} = (I - K + K² - K³) g0^{-1} with
    K = g0^{-1}H terminates exactly.
    """
    g0 = g[..., 0]
    g0inv = np.linalg.inv(g0)
    h = g.copy()
    h[..., 0] = 0.0
    k1 = np.einsum("ac,cbZ->abZ", g0inv, h)
    k2 = jet_einsum("ab,bc->ac", k1, k1, ctx)
    k3 = jet_einsum("ab,bc->ac", k2, k1, ctx)
    series = -k1 + k2 - k3
    series[..., 0] += np.eye(g.shape[0])
    return np.einsum("abZ,bc->acZ", series, g0inv)
