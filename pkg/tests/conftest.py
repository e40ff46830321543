"""Shared helpers: random model generators and independent oracles."""

from __future__ import annotations

import numpy as np
import pytest

from waylab.measurement import NormalMeasurement
from waylab.numerics import complete_to_unitary, dagger
from waylab.observables import DiscreteObservable


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_unitary(rng, dim: int) -> np.ndarray:
    return complete_to_unitary(np.zeros((dim, 0), dtype=np.complex128), rng)


def random_hermitian(rng, dim: int, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (a + dagger(a))


def random_state(rng, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.sqrt(np.real(np.conj(v) @ v))


def random_sharp_pointer(rng, dim: int, n_outcomes: int | None = None) -> DiscreteObservable:
    """Random PVM: an orthonormal basis grouped into outcomes."""
    n = dim if n_outcomes is None else n_outcomes
    frame = random_unitary(rng, dim)
    groups = list(range(n)) + [int(rng.integers(0, n)) for _ in range(dim - n)]
    rng.shuffle(groups)
    effects = []
    for j in range(n):
        p = np.zeros((dim, dim), dtype=np.complex128)
        for i, g in enumerate(groups):
            if g == j:
                p += np.outer(frame[:, i], np.conj(frame[:, i]))
        effects.append(p)
    return DiscreteObservable(dim, tuple(f"x{j}" for j in range(n)), effects)


def random_normal_measurement(rng, system_dim: int, apparatus_dim: int) -> NormalMeasurement:
    pointer = random_sharp_pointer(rng, apparatus_dim)
    coupling = random_unitary(rng, system_dim * apparatus_dim)
    probe = random_state(rng, apparatus_dim)
    return NormalMeasurement(system_dim, apparatus_dim, pointer, coupling, probe)


def random_density(rng, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ dagger(a)
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def kron_oracle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Index-formula Kronecker product: out[i*db+k, j*db+l] = a[i,j] b[k,l]."""
    da, db = a.shape[0], b.shape[0]
    out = np.zeros((da * db, da * db), dtype=np.complex128)
    for i in range(da):
        for j in range(da):
            for k in range(db):
                for l in range(db):
                    out[i * db + k, j * db + l] = a[i, j] * b[k, l]
    return out


def charpoly_eigenvalues_oracle(a: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """Hermitian eigenvalues as bisection roots of the characteristic polynomial.

    Coefficients come from cofactor expansion of det(a - x I); roots are
    isolated by sign changes on a fine grid and polished by bisection.
    Independent of any Jacobi code.
    """
    d = a.shape[0]

    def det(m) -> complex:
        m = np.array(m, dtype=np.complex128)
        n = m.shape[0]
        if n == 1:
            return m[0, 0]
        total = 0.0 + 0.0j
        for j in range(n):
            minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
            total += ((-1) ** j) * m[0, j] * det(minor)
        return total

    def p(x: float) -> float:
        return det(a - x * np.eye(d)).real

    bound = 1.0 + float(np.sum(np.abs(a)))
    grid = np.linspace(-bound, bound, 4001)
    vals = np.array([p(x) for x in grid])
    roots = []
    for k in range(len(grid) - 1):
        lo, hi = grid[k], grid[k + 1]
        flo, fhi = vals[k], vals[k + 1]
        if flo == 0.0:
            roots.append(lo)
            continue
        if flo * fhi < 0.0:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                fmid = p(mid)
                if fmid == 0.0 or hi - lo < tol:
                    break
                if flo * fmid < 0.0:
                    hi, fhi = mid, fmid
                else:
                    lo, flo = mid, fmid
            roots.append(0.5 * (lo + hi))
    return np.array(sorted(roots))


def gaussian_rank_oracle(m: np.ndarray, tol: float = 1e-9) -> int:
    """Row-echelon rank by Gaussian elimination with partial pivoting."""
    a = np.array(m, dtype=np.float64)
    rows, cols = a.shape
    scale = max(np.abs(a).max(), 1e-300)
    rank = 0
    row = 0
    for col in range(cols):
        pivot = row + int(np.argmax(np.abs(a[row:, col]))) if row < rows else row
        if row >= rows or abs(a[pivot, col]) <= tol * scale:
            continue
        a[[row, pivot]] = a[[pivot, row]]
        a[row] = a[row] / a[row, col]
        for r in range(rows):
            if r != row:
                a[r] = a[r] - a[r, col] * a[row]
        rank += 1
        row += 1
        if row == rows:
            break
    return rank
