"""Dense pointwise tensors with variance bookkeeping.

TensorValue holds plain float components at one point; JetTensor holds
jet-valued components plus the number of coefficient grades that are
still exact, which is what limits how many covariant derivatives can be
taken.  The derivative index of a covariant derivative is always the
LAST slot: (∇T)_{ab...c} means ∇_c T_{ab...}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientJetOrderError, SingularMetricError
from .jets import JetContext, jdiff, jet_einsum, jvalue


@dataclass(frozen=True)
class TensorValue:
    n: int
    variance: tuple[str, ...]  # "u" or "d" per slot
    components: np.ndarray

    def __post_init__(self) -> None:
        if any(v not in ("u", "d") for v in self.variance):
            raise ValueError("variance markers must be 'u' or 'd'")
        if self.components.shape != (self.n,) * len(self.variance):
            raise ValueError(
                f"components shape {self.components.shape} does not match "
                f"rank {len(self.variance)} in dimension {self.n}"
            )

    @property
    def rank(self) -> int:
        return len(self.variance)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0


def scalar_value(x: float) -> float:
    return float(x)


@dataclass(frozen=True)
class MetricAtPoint:
    g: TensorValue
    g_inv: TensorValue
    det: float

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "MetricAtPoint":
        n = matrix.shape[0]
        scale = max(1.0, float(np.max(np.abs(matrix))))
        if float(np.max(np.abs(matrix - matrix.T))) > 1e-12 * scale:
            raise SingularMetricError("metric matrix is not symmetric")
        try:
            np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError:
            raise SingularMetricError(
                "metric is not positive definite at this point (only Riemannian "
                "signatures are supported)"
            ) from None
        det = float(np.linalg.det(matrix))
        inv = np.linalg.inv(matrix)
        return cls(
            g=TensorValue(n, ("d", "d"), matrix),
            g_inv=TensorValue(n, ("u", "u"), inv),
            det=det,
        )

    @property
    def n(self) -> int:
        return self.g.n


def raise_lower(t: TensorValue, slot: int, metric: MetricAtPoint) -> TensorValue:
    """Flip the variance of one slot by contracting with g or its inverse."""
    if not 0 <= slot < t.rank:
        raise ValueError(f"slot {slot} out of range for rank {t.rank}")
    if t.variance[slot] == "d":
        mat, flipped = metric.g_inv.components, "u"
    else:
        mat, flipped = metric.g.components, "d"
    comps = np.tensordot(t.components, mat, axes=([slot], [0]))
    comps = np.moveaxis(comps, -1, slot)
    variance = t.variance[:slot] + (flipped,) + t.variance[slot + 1 :]
    return TensorValue(t.n, variance, np.ascontiguousarray(comps))


def contract(t: TensorValue, slot_a: int, slot_b: int) -> TensorValue:
    """Einstein-sum one up slot against one down slot."""
    if slot_a == slot_b or not (0 <= slot_a < t.rank and 0 <= slot_b < t.rank):
        raise ValueError("contraction needs two distinct valid slots")
    if t.variance[slot_a] == t.variance[slot_b]:
        raise ValueError(
            "contraction requires opposite variances; raise or lower one slot first"
        )
    comps = np.trace(t.components, axis1=slot_a, axis2=slot_b)
    variance = tuple(v for k, v in enumerate(t.variance) if k not in (slot_a, slot_b))
    if not variance:
        return TensorValue(t.n, (), np.asarray(comps))
    return TensorValue(t.n, variance, np.ascontiguousarray(comps))


def is_symmetric(t: TensorValue, slot_a: int, slot_b: int, tol: float) -> bool:
    swapped = np.swapaxes(t.components, slot_a, slot_b)
    scale = max(1.0, t.max_abs())
    return float(np.max(np.abs(t.components - swapped))) <= tol * scale


@dataclass(frozen=True)
class JetTensor:
    ctx: JetContext
    variance: tuple[str, ...]
    coeffs: np.ndarray  # shape (n,)*rank + (size,)
    order: int  # number of exact coefficient grades beyond the value

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def rank(self) -> int:
        return len(self.variance)

    def values(self) -> TensorValue:
        return TensorValue(self.n, self.variance, jvalue(self.coeffs))

    def value_array(self) -> np.ndarray:
        return jvalue(self.coeffs)


_LETTERS = "abcdefgh"


def covariant_derivative(field: JetTensor, gamma: JetTensor) -> JetTensor:
    """∇T with the new covariant index appended last.

    ``gamma`` is the Christoffel jet tensor Γ^a_{bc}.  Requires at least
    one exact derivative grade on ``field``.
    """
    if field.order < 1:
        raise InsufficientJetOrderError(
            "field jets carry no exact derivative grade; deepen the pipeline order"
        )
    ctx = field.ctx
    if gamma.ctx is not ctx:
        raise ValueError("field and Christoffel jets use different contexts")
    rank = field.rank
    letters = _LETTERS[:rank]
    out = np.stack([jdiff(field.coeffs, c, ctx) for c in range(ctx.n)], axis=rank)
    for s, var in enumerate(field.variance):
        x = letters[s]
        replaced = letters.replace(x, "y")
        if var == "d":
            out -= jet_einsum(f"yz{x},{replaced}->{letters}z", gamma.coeffs, field.coeffs, ctx)
        else:
            out += jet_einsum(f"{x}zy,{replaced}->{letters}z", gamma.coeffs, field.coeffs, ctx)
    return JetTensor(
        ctx, field.variance + ("d",), out, min(field.order - 1, gamma.order)
    )
