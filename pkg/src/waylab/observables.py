"""Discrete POVMs/PVMs and the qubit spin-observable family.

An observable here is a finite, outcome-labelled family of effects that sum
to the identity.  Outcome labels are arbitrary strings; two-valued spin
observables use ``("+", "-")``.  Sharpness is decided the PVM way:
selfadjoint, idempotent and pairwise orthogonal effects, each within the
ambient tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config, kernels
from .numerics import (
    as_square,
    commutator,
    dagger,
    hermitian_defect,
    operator_norm,
)
from .errors import BlochNormExceeded, DimensionMismatch, InvalidModel, UnknownOutcome

pauli_x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
pauli_y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
pauli_z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (pauli_x, pauli_y, pauli_z)


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DiscreteObservable:
    """Finite outcome-labelled POVM on a ``space_dim``-dimensional space."""

    space_dim: int
    outcomes: tuple[str, ...]
    effects: tuple[np.ndarray, ...]

    def __init__(self, space_dim, outcomes, effects, tol: float | None = None):
        t = config.resolve(tol)
        d = int(space_dim)
        labels = tuple(str(x) for x in outcomes)
        mats = tuple(_readonly(as_square(e, "effect")) for e in effects)
        if len(labels) != len(mats):
            raise InvalidModel(
                f"{len(labels)} outcomes but {len(mats)} effects"
            )
        if len(set(labels)) != len(labels):
            raise InvalidModel("outcome labels must be unique")
        if not mats:
            raise InvalidModel("an observable needs at least one outcome")
        total = np.zeros((d, d), dtype=np.complex128)
        for label, e in zip(labels, mats):
            if e.shape[0] != d:
                raise DimensionMismatch(
                    f"effect {label!r} has dim {e.shape[0]}, expected {d}"
                )
            if hermitian_defect(e) > t * max(1.0, operator_norm(e)):
                raise InvalidModel(f"effect {label!r} is not selfadjoint")
            w, _ = kernels.eigh_batch(0.5 * (e + dagger(e))[None], compute_vectors=False)
            if float(w[0, 0]) < -t:
                raise InvalidModel(
                    f"effect {label!r} is not positive (min eigenvalue {w[0, 0]:.3e})"
                )
            total = total + e
        if operator_norm(total - np.eye(d)) > t:
            raise InvalidModel("effects do not sum to the identity")
        object.__setattr__(self, "space_dim", d)
        object.__setattr__(self, "outcomes", labels)
        object.__setattr__(self, "effects", mats)

    def effect(self, outcome: str) -> np.ndarray:
        try:
            return self.effects[self.outcomes.index(str(outcome))]
        except ValueError:
            raise UnknownOutcome(
                f"outcome {outcome!r} not in {self.outcomes}"
            ) from None

    def items(self):
        return tuple(zip(self.outcomes, self.effects))


def as_bloch(m, tol: float | None = None) -> np.ndarray:
    """Validate and return a Bloch vector (norm at most 1 + tolerance)."""
    v = np.asarray(m, dtype=np.float64).reshape(-1)
    if v.shape != (3,):
        raise DimensionMismatch("a Bloch vector has exactly three components")
    norm = float(np.sqrt(v @ v))
    if norm > 1.0 + config.resolve(tol):
        raise BlochNormExceeded(f"|m| = {norm:.12g} exceeds 1")
    return v


def spin_observable(m, tol: float | None = None) -> DiscreteObservable:
    """Two-valued qubit observable with effects ``(I +/- m.sigma)/2``.

    Sharp exactly when ``|m| = 1``; ``m = 0`` gives the trivial coin.
    """
    v = np.asarray(m, dtype=np.float64).reshape(-1)
    if v.shape != (3,):
        raise DimensionMismatch("a Bloch vector has exactly three components")
    norm = float(np.sqrt(v @ v))
    if norm > 1.0 + config.resolve(tol):
        raise BlochNormExceeded(f"|m| = {norm:.12g} exceeds 1")
    ms = v[0] * pauli_x + v[1] * pauli_y + v[2] * pauli_z
    eye = np.eye(2, dtype=np.complex128)
    return DiscreteObservable(
        2, ("+", "-"), (0.5 * (eye + ms), 0.5 * (eye - ms)), tol=tol
    )


def is_sharp(obs: DiscreteObservable, tol: float | None = None) -> bool:
    """True when every effect is a projection and distinct effects are
    mutually orthogonal (the PVM criteria, each within tolerance)."""
    t = config.resolve(tol)
    effects = obs.effects
    for e in effects:
        if operator_norm(e @ e - e) > t * max(1.0, operator_norm(e)):
            return False
        if hermitian_defect(e) > t * max(1.0, operator_norm(e)):
            return False
    for i in range(len(effects)):
        for j in range(i + 1, len(effects)):
            if operator_norm(effects[i] @ effects[j]) > t:
                return False
    return True


def is_trivial(obs: DiscreteObservable, tol: float | None = None) -> bool:
    """True when each effect is a scalar multiple of the identity."""
    t = config.resolve(tol)
    eye = np.eye(obs.space_dim)
    for e in obs.effects:
        p = np.trace(e).real / obs.space_dim
        if operator_norm(e - p * eye) > t:
            return False
    return True


def nontriviality(obs: DiscreteObservable) -> float:
    """Largest operator-norm distance of an effect from multiples of I."""
    eye = np.eye(obs.space_dim)
    best = 0.0
    for e in obs.effects:
        p = np.trace(e).real / obs.space_dim
        best = max(best, operator_norm(e - p * eye))
    return best


def mutual_commutation_defect(
    a: DiscreteObservable, b: DiscreteObservable
) -> float:
    """max over outcome pairs of the commutator norm between effects.

    Zero exactly when the two observables commute effect-by-effect; for
    sharp qubit pairs ``2 * defect`` equals ``|m x n|``.
    """
    if a.space_dim != b.space_dim:
        raise DimensionMismatch(
            f"observables live on dims {a.space_dim} and {b.space_dim}"
        )
    pairs = [commutator(ea, eb) for ea in a.effects for eb in b.effects]
    norms = kernels.opnorm_batch(np.stack(pairs))
    return float(np.max(norms))
