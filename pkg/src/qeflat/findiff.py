"""Central finite differences: the independent check on jet derivatives.

Everything here evaluates expressions on plain floats only, so results are
usable as an oracle against the jet engine.  Steps follow the project
convention: h = 1e-4·max(1, |point|∞) for derivative order ≤ 2 and
h = 1e-3·max(1, |point|∞) for order 3.
"""

from __future__ import annotations

from itertools import product

from .expr import Expression, evaluate

# offsets and weights of the 1-d central stencil for each derivative order;
# weights get divided by h^order.
_STENCIL = {
    0: ((0, 1.0),),
    1: ((1, 0.5), (-1, -0.5)),
    2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
    3: ((2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)),
}


def fd_step(point, order: int) -> float:
    scale = max(1.0, max((abs(float(x)) for x in point), default=1.0))
    return (1e-4 if order <= 2 else 1e-3) * scale


def fd_partials(expression: Expression, point, alpha) -> float:
    """Central-difference estimate of the raw partial ∂^α at ``point``."""
    alpha = tuple(int(a) for a in alpha)
    order = sum(alpha)
    if order > 3:
        raise ValueError("finite-difference stencils stop at total order 3")
    if len(alpha) != len(expression.coordinates):
        raise ValueError("multi-index length must match the coordinate count")
    h = fd_step(point, order)
    active = [i for i, a in enumerate(alpha) if a > 0]
    stencils = [_STENCIL[alpha[i]] for i in active]
    point = tuple(float(x) for x in point)
    total = 0.0
    for combo in product(*stencils):
        shifted = list(point)
        weight = 1.0
        for i, (offset, w) in zip(active, combo):
            shifted[i] += offset * h
            weight *= w
        value = evaluate(expression, dict(zip(expression.coordinates, shifted)))
        total += weight * value
    return total / h**order
