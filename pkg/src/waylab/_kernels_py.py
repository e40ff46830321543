"""NumPy implementations of the dense numeric kernels.

This is the fallback backend used when the compiled extension
(``waylab._fastkernels``) is unavailable.  Both backends implement the same
three primitives with the same algorithms:

* ``eigh_batch``  -- cyclic complex Jacobi eigendecomposition of a batch of
  Hermitian matrices.  Sweeps run until the off-diagonal Frobenius mass
  drops below ``1e-14 * |A|_F``.
* ``opnorm_batch`` -- largest singular value of each matrix in a batch,
  computed as the square root of the top eigenvalue of ``A* A``.
* ``jacobi_svd``  -- one-sided Jacobi SVD of a single real rectangular
  matrix, used for rank-revealing nullspace extraction.  (Rank decisions at
  the 1e-9 cutoff cannot go through the Gram matrix: squaring would push
  exact zeros to ~1e-8 relative.)

The batch loops here are vectorised over the batch index: every rotation in
a sweep is applied to all matrices at once with per-matrix angles, so large
direction grids stay cheap even without the extension.
"""

from __future__ import annotations

import math

import numpy as np

OFF_DIAGONAL_RATIO = 1e-14
MAX_SWEEPS = 60

# below this batch size the per-operation numpy overhead of the vectorised
# sweep dominates, and plain scalar arithmetic is several times faster
_SCALAR_BATCH_LIMIT = 8


def _offdiagonal_mass(a: np.ndarray) -> np.ndarray:
    """Frobenius norm of the off-diagonal part, per batch element."""
    off = a.copy()
    d = a.shape[-1]
    idx = np.arange(d)
    off[:, idx, idx] = 0.0
    return np.sqrt(np.sum(np.abs(off) ** 2, axis=(1, 2)))


def _eigh_scalar(mat: np.ndarray, compute_vectors: bool):
    """Cyclic Jacobi on one matrix with plain Python scalars."""
    d = mat.shape[0]
    a = mat.tolist()  # nested lists of Python complex
    for i in range(d):
        a[i][i] = complex(a[i][i].real, 0.0)
        for j in range(i + 1, d):
            m = 0.5 * (a[i][j] + a[j][i].conjugate())
            a[i][j] = m
            a[j][i] = m.conjugate()
    v = [[1.0 + 0.0j if i == j else 0.0j for j in range(d)] for i in range(d)] \
        if compute_vectors else None
    norm = 0.0
    for i in range(d):
        for j in range(d):
            x = a[i][j]
            norm += x.real * x.real + x.imag * x.imag
    target = OFF_DIAGONAL_RATIO * math.sqrt(norm)

    for _ in range(MAX_SWEEPS):
        off = 0.0
        for i in range(d):
            for j in range(d):
                if i != j:
                    x = a[i][j]
                    off += x.real * x.real + x.imag * x.imag
        if math.sqrt(off) <= target:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p][q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                phm = phase.conjugate()
                tau = (a[q][q].real - a[p][p].real) / (2.0 * r)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                sphm = s * phm
                cphm = c * phm
                sph = s * phase
                cph = c * phase
                for i in range(d):
                    row = a[i]
                    cp, cq = row[p], row[q]
                    row[p] = c * cp - sphm * cq
                    row[q] = s * cp + cphm * cq
                rowp = a[p]
                rowq = a[q]
                for i in range(d):
                    rp, rq = rowp[i], rowq[i]
                    rowp[i] = c * rp - sph * rq
                    rowq[i] = s * rp + cph * rq
                rowp[q] = 0.0j
                rowq[p] = 0.0j
                if v is not None:
                    for i in range(d):
                        row = v[i]
                        vp, vq = row[p], row[q]
                        row[p] = c * vp - sphm * vq
                        row[q] = s * vp + cphm * vq

    w = np.array([a[i][i].real for i in range(d)])
    order = np.argsort(w, kind="stable")
    w = w[order]
    if v is None:
        return w, None
    return w, np.array(v, dtype=np.complex128)[:, order]


def eigh_batch(mats, compute_vectors: bool = True):
    """Eigendecompose a batch of Hermitian matrices.

    Parameters
    ----------
    mats : (B, d, d) complex array-like, each Hermitian.
    compute_vectors : accumulate eigenvectors as well.

    Returns
    -------
    w : (B, d) real, eigenvalues in ascending order.
    v : (B, d, d) complex with orthonormal eigenvector columns matching
        ``w``, or None when ``compute_vectors`` is false.
    """
    a = np.array(mats, dtype=np.complex128, copy=True)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError("eigh_batch expects a (B, d, d) array")
    b, d = a.shape[0], a.shape[1]
    if d > 1 and b <= _SCALAR_BATCH_LIMIT:
        ws = np.empty((b, d))
        vs = np.empty((b, d, d), dtype=np.complex128) if compute_vectors else None
        for k in range(b):
            wk, vk = _eigh_scalar(a[k], compute_vectors)
            ws[k] = wk
            if vs is not None:
                vs[k] = vk
        return ws, vs
    v = np.tile(np.eye(d, dtype=np.complex128), (b, 1, 1)) if compute_vectors else None
    if d == 1:
        w = a[:, 0, 0].real.reshape(b, 1).copy()
        return w, v
    # The rotation algebra assumes exact Hermiticity.
    a = 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))
    target = OFF_DIAGONAL_RATIO * np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))

    for _ in range(MAX_SWEEPS):
        if np.all(_offdiagonal_mass(a) <= target):
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[:, p, q]
                r = np.abs(apq)
                active = r > 1e-300
                safe_r = np.where(active, r, 1.0)
                phase = np.where(active, apq / safe_r, 1.0 + 0.0j)
                tau = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe_r)
                sgn = np.where(tau >= 0.0, 1.0, -1.0)
                t = sgn / (np.abs(tau) + np.hypot(1.0, tau))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                phm = np.conj(phase)

                colp = a[:, :, p].copy()
                colq = a[:, :, q].copy()
                a[:, :, p] = c[:, None] * colp - (s * phm)[:, None] * colq
                a[:, :, q] = s[:, None] * colp + (c * phm)[:, None] * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rowp - (s * phase)[:, None] * rowq
                a[:, q, :] = s[:, None] * rowp + (c * phase)[:, None] * rowq
                a[:, p, q] = np.where(active, 0.0, a[:, p, q])
                a[:, q, p] = np.conj(a[:, p, q])

                if v is not None:
                    vp = v[:, :, p].copy()
                    vq = v[:, :, q].copy()
                    v[:, :, p] = c[:, None] * vp - (s * phm)[:, None] * vq
                    v[:, :, q] = s[:, None] * vp + (c * phm)[:, None] * vq

    idx = np.arange(d)
    w = a[:, idx, idx].real
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    if v is not None:
        v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v


def opnorm_batch(mats) -> np.ndarray:
    """Largest singular value of each matrix in a (B, r, c) batch."""
    a = np.asarray(mats, dtype=np.complex128)
    if a.ndim != 3:
        raise ValueError("opnorm_batch expects a (B, r, c) array")
    b, r, c = a.shape
    if r == 0 or c == 0:
        return np.zeros(b)
    ah = np.conj(np.swapaxes(a, 1, 2))
    gram = ah @ a if c <= r else a @ ah
    w, _ = eigh_batch(gram, compute_vectors=False)
    return np.sqrt(np.clip(w[:, -1], 0.0, None))


def jacobi_svd(mat):
    """One-sided Jacobi SVD of a real matrix.

    Returns ``(s, v)`` with singular values ``s`` in descending order and
    the matching right singular vectors as columns of the orthogonal ``v``.
    Columns of ``mat @ v`` are mutually orthogonal with norms ``s``.
    """
    m = np.array(mat, dtype=np.float64, copy=True)
    if m.ndim != 2:
        raise ValueError("jacobi_svd expects a 2-D array")
    rows, cols = m.shape
    v = np.eye(cols)
    if rows == 0 or cols == 0:
        return np.zeros(cols), v
    for _ in range(MAX_SWEEPS):
        converged = True
        for i in range(cols - 1):
            for j in range(i + 1, cols):
                mi = m[:, i].copy()
                mj = m[:, j].copy()
                aii = float(mi @ mi)
                ajj = float(mj @ mj)
                aij = float(mi @ mj)
                if abs(aij) <= 1e-15 * np.sqrt(aii * ajj) + 1e-300:
                    continue
                converged = False
                tau = (ajj - aii) / (2.0 * aij)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                m[:, i] = c * mi - s * mj
                m[:, j] = s * mi + c * mj
                vi = v[:, i].copy()
                vj = v[:, j].copy()
                v[:, i] = c * vi - s * vj
                v[:, j] = s * vi + c * vj
        if converged:
            break
    s = np.sqrt(np.sum(m * m, axis=0))
    order = np.argsort(-s, kind="stable")
    return s[order], v[:, order]
