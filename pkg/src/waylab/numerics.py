"""Dense complex linear algebra on small operators.

Everything operates on plain ``numpy`` complex arrays: tensor products,
commutators, Hermitian eigendecomposition, operator norms, the tolerance
predicates (Hermitian / unitary / projection / positive), and the
rank-revealing solver for structured commutation problems
(:func:`solve_commutant`).

Conventions
-----------
* Tensor ordering is system-first: in ``tensor(a, b)`` the left factor
  indexes the coarse (slow) blocks, exactly ``numpy.kron``.
* Predicates compare defects against ``tol * max(1, |A|)`` where ``|A|`` is
  the operator norm and ``tol`` defaults to the ambient tolerance
  (``config.default_tolerance()``); they are pure and idempotent.
* Hermitian matrices are coordinatized over the reals: ``d`` diagonal unit
  matrices plus ``(sym, antisym)`` pairs for each strictly-upper entry,
  orthonormal under the Hilbert-Schmidt inner product.  Commutation
  constraints become a real matrix whose nullspace is read off a one-sided
  Jacobi SVD with relative cutoff ``config.RANK_TOLERANCE``.

All functions are pure and every returned array is freshly allocated, so
values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import config, kernels
from .errors import DimensionMismatch, NotHermitian

Matrix = np.ndarray


def as_square(a, name: str = "matrix") -> Matrix:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m


def dagger(a: Matrix) -> Matrix:
    return np.conj(np.asarray(a)).T


def tensor(a, b) -> Matrix:
    """Kronecker product with the left factor on the coarse blocks."""
    am = np.asarray(a, dtype=np.complex128)
    bm = np.asarray(b, dtype=np.complex128)
    if am.ndim != 2 or bm.ndim != 2:
        raise DimensionMismatch("tensor expects 2-D operands")
    return np.kron(am, bm)


def commutator(a, b) -> Matrix:
    am = as_square(a, "a")
    bm = as_square(b, "b")
    if am.shape != bm.shape:
        raise DimensionMismatch(
            f"commutator needs equal dims, got {am.shape[0]} and {bm.shape[0]}"
        )
    return am @ bm - bm @ am


def operator_norm(a) -> float:
    """Largest singular value (sqrt of the top eigenvalue of ``a* a``)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        return float(np.sqrt(np.sum(np.abs(m) ** 2)))
    if m.ndim != 2:
        raise DimensionMismatch("operator_norm expects a vector or a matrix")
    return float(kernels.opnorm_batch(m[None])[0])


def frobenius_norm(a) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(a)) ** 2)))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product tr(a* b)."""
    return complex(np.sum(np.conj(np.asarray(a)) * np.asarray(b)))


def _scale(a: Matrix) -> float:
    return max(1.0, operator_norm(a))


def hermitian_defect(a) -> float:
    m = as_square(a)
    return operator_norm(m - dagger(m))


def is_hermitian(a, tol: float | None = None) -> bool:
    m = as_square(a)
    return hermitian_defect(m) <= config.resolve(tol) * _scale(m)


def is_unitary(a, tol: float | None = None) -> bool:
    m = as_square(a)
    eye = np.eye(m.shape[0])
    defect = max(
        operator_norm(dagger(m) @ m - eye), operator_norm(m @ dagger(m) - eye)
    )
    return defect <= config.resolve(tol) * _scale(m)


def is_projection(a, tol: float | None = None) -> bool:
    m = as_square(a)
    t = config.resolve(tol)
    return is_hermitian(m, t) and operator_norm(m @ m - m) <= t * _scale(m)


def is_positive(a, tol: float | None = None) -> bool:
    m = as_square(a)
    t = config.resolve(tol)
    if not is_hermitian(m, t):
        return False
    w, _ = kernels.eigh_batch(0.5 * (m + dagger(m))[None], compute_vectors=False)
    return float(w[0, 0]) >= -t * _scale(m)


def hermitian_eigen(a, tol: float | None = None) -> tuple[np.ndarray, Matrix]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns.

    Raises :class:`NotHermitian` when the symmetry defect of ``a`` exceeds
    the tolerance.  Cyclic Jacobi, so the reconstruction residual stays at
    machine level for every dimension this toolkit touches.
    """
    m = as_square(a)
    t = config.resolve(tol)
    if hermitian_defect(m) > t * _scale(m):
        raise NotHermitian(
            f"matrix is not selfadjoint within {t:g} (defect {hermitian_defect(m):.3e})"
        )
    w, v = kernels.eigh_batch(m[None], compute_vectors=True)
    return w[0], v[0]


# ---------------------------------------------------------------------------
# Hermitian parametrization and commutant solving
# ---------------------------------------------------------------------------


def hermitian_basis(dim: int) -> list[Matrix]:
    """Orthonormal (Hilbert-Schmidt) basis of the d x d Hermitian matrices.

    Ordering: the ``d`` diagonal units first, then for each strictly-upper
    entry (i < j, row-major) the symmetric and the antisymmetric element.
    """
    basis: list[Matrix] = []
    for i in range(dim):
        e = np.zeros((dim, dim), dtype=np.complex128)
        e[i, i] = 1.0
        basis.append(e)
    inv = 1.0 / np.sqrt(2.0)
    for i in range(dim):
        for j in range(i + 1, dim):
            sym = np.zeros((dim, dim), dtype=np.complex128)
            sym[i, j] = inv
            sym[j, i] = inv
            basis.append(sym)
            asym = np.zeros((dim, dim), dtype=np.complex128)
            asym[i, j] = -1j * inv
            asym[j, i] = 1j * inv
            basis.append(asym)
    return basis


def _tuple_inner(a: Sequence[Matrix], b: Sequence[Matrix]) -> float:
    return float(sum(np.real(hs_inner(x, y)) for x, y in zip(a, b)))


def _tuple_norm(a: Sequence[Matrix]) -> float:
    return float(np.sqrt(max(0.0, _tuple_inner(a, a))))


@dataclass(frozen=True)
class RealLinearBasis:
    """Orthonormal real-linear basis of a space of Hermitian tuples.

    ``elements`` holds tuples of matrices (arity 1 for plain operator
    spaces); they are pairwise orthonormal under the summed Hilbert-Schmidt
    inner product.
    """

    ambient_description: str
    elements: tuple[tuple[Matrix, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.elements)

    @property
    def matrices(self) -> tuple[Matrix, ...]:
        """The basis as bare matrices; only valid for arity-1 spaces."""
        if self.elements and len(self.elements[0]) != 1:
            raise ValueError("basis elements are tuples, not single matrices")
        return tuple(e[0] for e in self.elements)

    def coefficients(self, candidate: Sequence[Matrix]) -> np.ndarray:
        return np.array([_tuple_inner(e, candidate) for e in self.elements])

    def residual(self, candidate: Sequence[Matrix]) -> float:
        """Distance (summed HS norm) from ``candidate`` to the span."""
        cand = tuple(np.asarray(c, dtype=np.complex128) for c in candidate)
        coeff = self.coefficients(cand)
        rest = [c.copy() for c in cand]
        for w, element in zip(coeff, self.elements):
            for r, e in zip(rest, element):
                r -= w * e
        return _tuple_norm(rest)

    def contains(self, candidate: Sequence[Matrix], tol: float | None = None) -> bool:
        scale = max(1.0, _tuple_norm(tuple(np.asarray(c) for c in candidate)))
        return self.residual(candidate) <= config.resolve(tol) * scale


def solve_commutant(
    dims: Sequence[int],
    constraint_maps: Sequence[Callable[..., Matrix]],
    rank_tol: float | None = None,
    description: str = "commutant",
) -> RealLinearBasis:
    """Joint kernel of real-linear constraint maps on Hermitian tuples.

    ``dims`` fixes the parameter space: one Hermitian matrix per entry.
    Each constraint map receives the component matrices as positional
    arguments and returns a complex matrix that must vanish.  The maps are
    assembled column-by-column over the Hermitian coordinate basis, the
    joint kernel is read off a one-sided Jacobi SVD, and singular values
    below ``rank_tol * sigma_max`` count as zero.

    An empty basis is a valid result; with no effective constraints the
    whole parameter space comes back.
    """
    dims = tuple(int(d) for d in dims)
    cutoff = config.RANK_TOLERANCE if rank_tol is None else float(rank_tol)
    arity = len(dims)
    param_tuples: list[tuple[Matrix, ...]] = []
    for comp in range(arity):
        for b in hermitian_basis(dims[comp]):
            param_tuples.append(
                tuple(
                    b if k == comp else np.zeros((dims[k], dims[k]), dtype=np.complex128)
                    for k in range(arity)
                )
            )

    columns = []
    for t in param_tuples:
        rows = []
        for f in constraint_maps:
            out = np.asarray(f(*t), dtype=np.complex128)
            rows.append(out.real.ravel())
            rows.append(out.imag.ravel())
        columns.append(np.concatenate(rows) if rows else np.zeros(0))
    m = np.column_stack(columns)

    n_params = len(param_tuples)
    if m.shape[0] == 0:
        kernel_vectors = np.eye(n_params)
    else:
        s, v = kernels.jacobi_svd(m)
        smax = float(s[0]) if s.size else 0.0
        if smax <= cutoff:
            # the whole map is numerical noise: every parameter vector
            # already satisfies the constraints within the rank tolerance
            kernel_vectors = np.eye(n_params)
        else:
            keep = s <= cutoff * smax
            kernel_vectors = v[:, keep]

    elements = []
    for k in range(kernel_vectors.shape[1]):
        coeff = kernel_vectors[:, k]
        mats = [np.zeros((d, d), dtype=np.complex128) for d in dims]
        for w, t in zip(coeff, param_tuples):
            for target, source in zip(mats, t):
                target += w * source
        elements.append(tuple(mats))
    return RealLinearBasis(description, tuple(elements))


def orthonormalize_tuples(
    tuples: Sequence[Sequence[Matrix]], drop_tol: float = 1e-12
) -> list[tuple[Matrix, ...]]:
    """Modified Gram-Schmidt on Hermitian tuples, dropping near-zero rests."""
    result: list[tuple[Matrix, ...]] = []
    for cand in tuples:
        work = [np.array(c, dtype=np.complex128) for c in cand]
        for _ in range(2):  # one re-orthogonalization pass for stability
            for e in result:
                w = _tuple_inner(e, work)
                for r, b in zip(work, e):
                    r -= w * b
        norm = _tuple_norm(work)
        if norm > drop_tol:
            result.append(tuple(r / norm for r in work))
    return result


def complete_to_unitary(columns: Matrix, rng: np.random.Generator | None = None) -> Matrix:
    """Extend orthonormal columns to a full unitary.

    The complement is drawn from ``rng`` (or a fixed seed for determinism)
    and orthonormalized against the given columns.
    """
    cols = np.asarray(columns, dtype=np.complex128)
    dim = cols.shape[0]
    have = cols.shape[1]
    if have > dim:
        raise DimensionMismatch("more columns than the space dimension")
    gen = np.random.default_rng(0) if rng is None else rng
    out = [cols[:, k] for k in range(have)]
    attempts = 0
    while len(out) < dim:
        w = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
        for _ in range(2):
            for c in out:
                w -= (np.conj(c) @ w) * c
        norm = float(np.sqrt(np.real(np.conj(w) @ w)))
        attempts += 1
        if norm > 1e-6:
            out.append(w / norm)
        elif attempts > 50 * dim:
            raise ArithmeticError("failed to complete an orthonormal frame")
    return np.column_stack(out)
