"""Pure-numpy fallback for the jet convolution kernel.

Same contract as the compiled ``_jetkernel.mul_batch``.  The pair table is
applied as gather-multiply followed by a dense scatter matmul, which keeps
the inner loop in BLAS.  Summation order differs from the compiled kernel,
so cross-backend agreement is up to rounding, not bitwise.
"""

from __future__ import annotations

import numpy as np


def make_mul(ii: np.ndarray, jj: np.ndarray, kk: np.ndarray, size: int):
    scatter = np.zeros((len(kk), size), dtype=np.float64)
    scatter[np.arange(len(kk)), kk] = 1.0

    def mul_batch(a: np.ndarray, b: np.ndarray, out: np.ndarray) -> None:
        np.matmul(a[:, ii] * b[:, jj], scatter, out=out)

    return mul_batch
