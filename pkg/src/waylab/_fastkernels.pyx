# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled dense numeric kernels.

Same contracts and algorithms as ``waylab._kernels_py``: cyclic complex
Jacobi eigensolver for Hermitian batches, Gram-route operator norms, and a
one-sided Jacobi SVD for real rectangular nullspace problems.  The batch
loops run without the GIL.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, hypot, sqrt

cnp.import_array()

cdef double OFF_DIAGONAL_RATIO = 1e-14
cdef int MAX_SWEEPS = 60


cdef void _jacobi_one(double complex[:, ::1] a, double complex[:, ::1] v,
                      bint vectors) noexcept nogil:
    cdef Py_ssize_t d = a.shape[0]
    cdef Py_ssize_t p, q, i, sweep
    cdef double norm = 0.0, off, target, r, tau, sgn, t, c, s
    cdef double complex apq, phase, phm, tmp_p, tmp_q

    for p in range(d):
        for q in range(d):
            norm += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    target = OFF_DIAGONAL_RATIO * sqrt(norm)

    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(d):
            for q in range(d):
                if p != q:
                    off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
        if sqrt(off) <= target:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if r <= 1e-300:
                    continue
                phase = apq / r
                phm = phase.conjugate()
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (fabs(tau) + hypot(1.0, tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for i in range(d):
                    tmp_p = a[i, p]
                    tmp_q = a[i, q]
                    a[i, p] = c * tmp_p - s * phm * tmp_q
                    a[i, q] = s * tmp_p + c * phm * tmp_q
                for i in range(d):
                    tmp_p = a[p, i]
                    tmp_q = a[q, i]
                    a[p, i] = c * tmp_p - s * phase * tmp_q
                    a[q, i] = s * tmp_p + c * phase * tmp_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                if vectors:
                    for i in range(d):
                        tmp_p = v[i, p]
                        tmp_q = v[i, q]
                        v[i, p] = c * tmp_p - s * phm * tmp_q
                        v[i, q] = s * tmp_p + c * phm * tmp_q


def eigh_batch(mats, bint compute_vectors=True):
    """Cyclic Jacobi eigendecomposition of a (B, d, d) Hermitian batch."""
    a = np.array(mats, dtype=np.complex128, copy=True, order="C")
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError("eigh_batch expects a (B, d, d) array")
    cdef Py_ssize_t b = a.shape[0], d = a.shape[1], k
    if d == 1:
        w1 = np.ascontiguousarray(a[:, 0, 0].real).reshape(b, 1).copy()
        v1 = np.ones((b, 1, 1), dtype=np.complex128) if compute_vectors else None
        return w1, v1
    a = 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))
    a = np.ascontiguousarray(a)
    v = np.tile(np.eye(d, dtype=np.complex128), (b, 1, 1))
    cdef double complex[:, :, ::1] am = a
    cdef double complex[:, :, ::1] vm = v
    cdef bint vec = compute_vectors
    with nogil:
        for k in range(b):
            _jacobi_one(am[k], vm[k], vec)
    idx = np.arange(d)
    w = a[:, idx, idx].real
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    if not compute_vectors:
        return w, None
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v


def opnorm_batch(mats):
    """Largest singular values of a (B, r, c) batch via the Gram route."""
    a = np.asarray(mats, dtype=np.complex128)
    if a.ndim != 3:
        raise ValueError("opnorm_batch expects a (B, r, c) array")
    cdef Py_ssize_t b = a.shape[0], k
    if a.shape[1] == 0 or a.shape[2] == 0:
        return np.zeros(b)
    ah = np.conj(np.swapaxes(a, 1, 2))
    gram = np.matmul(ah, a) if a.shape[2] <= a.shape[1] else np.matmul(a, ah)
    gram = np.ascontiguousarray(0.5 * (gram + np.conj(np.swapaxes(gram, 1, 2))))
    cdef Py_ssize_t d = gram.shape[1]
    out = np.empty(b)
    cdef double complex[:, :, ::1] gm = gram
    cdef double[::1] om = out
    cdef double best
    cdef Py_ssize_t i
    with nogil:
        for k in range(b):
            _jacobi_one(gm[k], gm[k], 0)
            best = 0.0
            for i in range(d):
                if gm[k, i, i].real > best:
                    best = gm[k, i, i].real
            om[k] = sqrt(best)
    return out


def jacobi_svd(mat):
    """One-sided Jacobi SVD of a real matrix; returns (s desc, right V)."""
    m = np.array(mat, dtype=np.float64, copy=True, order="C")
    if m.ndim != 2:
        raise ValueError("jacobi_svd expects a 2-D array")
    cdef Py_ssize_t rows = m.shape[0], cols = m.shape[1]
    v = np.eye(cols)
    if rows == 0 or cols == 0:
        return np.zeros(cols), v
    cdef double[:, ::1] mm = m
    cdef double[:, ::1] vm = v
    cdef Py_ssize_t i, j, k, sweep
    cdef double aii, ajj, aij, tau, sgn, t, c, s, mi, mj
    cdef bint converged
    with nogil:
        for sweep in range(MAX_SWEEPS):
            converged = 1
            for i in range(cols - 1):
                for j in range(i + 1, cols):
                    aii = 0.0
                    ajj = 0.0
                    aij = 0.0
                    for k in range(rows):
                        aii += mm[k, i] * mm[k, i]
                        ajj += mm[k, j] * mm[k, j]
                        aij += mm[k, i] * mm[k, j]
                    if fabs(aij) <= 1e-15 * sqrt(aii * ajj) + 1e-300:
                        continue
                    converged = 0
                    tau = (ajj - aii) / (2.0 * aij)
                    sgn = 1.0 if tau >= 0.0 else -1.0
                    t = sgn / (fabs(tau) + hypot(1.0, tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    for k in range(rows):
                        mi = mm[k, i]
                        mj = mm[k, j]
                        mm[k, i] = c * mi - s * mj
                        mm[k, j] = s * mi + c * mj
                    for k in range(cols):
                        mi = vm[k, i]
                        mj = vm[k, j]
                        vm[k, i] = c * mi - s * mj
                        vm[k, j] = s * mi + c * mj
            if converged:
                break
    sv = np.sqrt(np.sum(m * m, axis=0))
    order = np.argsort(-sv, kind="stable")
    return sv[order], v[:, order]
