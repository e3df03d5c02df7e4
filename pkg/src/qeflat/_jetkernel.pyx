# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the order-3 truncated Taylor convolution.

``mul_batch`` is the hot loop of the whole package: every arithmetic
operation on jets and every jet-valued tensor contraction reduces to it.
The (ii, jj, kk) table enumerates monomial index pairs whose total degree
stays within 3; it is precomputed once per dimension.
"""


def mul_batch(const double[:, ::1] a, const double[:, ::1] b, double[:, ::1] out,
              const int[::1] ii, const int[::1] jj, const int[::1] kk):
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t width = out.shape[1]
    cdef Py_ssize_t npairs = ii.shape[0]
    cdef Py_ssize_t r, t, m
    for r in range(rows):
        for m in range(width):
            out[r, m] = 0.0
        for t in range(npairs):
            out[r, kk[t]] += a[r, ii[t]] * b[r, jj[t]]
