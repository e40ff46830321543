"""Programmable multimeters: one coupling, many observables.

A multimeter is the probe-less triple (apparatus, sharp pointer, unitary
coupling); feeding it a programming state yields the normal measurement
with that probe.  Distinct sharp programs force orthogonal programming
states, and the programming bound relates the commutator of two programmed
observables to the commutator of the two evolved pointers, where the
second pointer is evolved through ``U (I tensor G)`` for any unitary G
mapping the first programming state to the second.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import InvalidModel, InvalidState, NotSharpProgram, UnknownOutcome
from .measurement import (
    NormalMeasurement,
    evolved_pointer_effect,
    measured_observable,
)
from .numerics import as_square, commutator, dagger, is_unitary, operator_norm, tensor
from .observables import DiscreteObservable, is_sharp


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Multimeter:
    system_dim: int
    apparatus_dim: int
    pointer: DiscreteObservable
    coupling: np.ndarray

    def __init__(self, system_dim, apparatus_dim, pointer, coupling,
                 tol: float | None = None):
        probe = np.zeros(int(apparatus_dim), dtype=np.complex128)
        probe[0] = 1.0
        checked = NormalMeasurement(system_dim, apparatus_dim, pointer, coupling,
                                    probe, tol=tol)
        object.__setattr__(self, "system_dim", checked.system_dim)
        object.__setattr__(self, "apparatus_dim", checked.apparatus_dim)
        object.__setattr__(self, "pointer", checked.pointer)
        object.__setattr__(self, "coupling", checked.coupling)

    def with_probe(self, phi, tol: float | None = None) -> NormalMeasurement:
        return NormalMeasurement(
            self.system_dim, self.apparatus_dim, self.pointer, self.coupling, phi,
            tol=tol,
        )


def _check_state(mm: Multimeter, phi, tol: float | None = None) -> np.ndarray:
    v = np.asarray(phi, dtype=np.complex128).reshape(-1)
    if v.shape != (mm.apparatus_dim,):
        raise InvalidState(
            f"programming state has dim {v.shape[0]}, apparatus is {mm.apparatus_dim}"
        )
    if abs(float(np.sqrt(np.real(np.conj(v) @ v))) - 1.0) > config.resolve(tol):
        raise InvalidState("programming state is not a unit vector")
    return v


def program(mm: Multimeter, phi) -> DiscreteObservable:
    """The observable measured when the probe is prepared in ``phi``."""
    v = _check_state(mm, phi)
    try:
        return measured_observable(mm.with_probe(v))
    except InvalidModel as exc:  # pragma: no cover - state already validated
        raise InvalidState(str(exc)) from exc


@dataclass(frozen=True)
class OrthogonalityAudit:
    distinct_sharp: bool
    overlap: float
    sharp_first: bool
    sharp_second: bool
    max_effect_distance: float


def orthogonality_audit(mm: Multimeter, phi1, phi2,
                        tol: float | None = None) -> OrthogonalityAudit:
    """Check the orthogonal-programs law on a pair of states.

    ``distinct_sharp`` is true when both programmed observables are sharp
    and differ as observables; in that case ``overlap = |<phi1|phi2>|``
    must vanish.
    """
    t = config.resolve(tol)
    v1 = _check_state(mm, phi1, t)
    v2 = _check_state(mm, phi2, t)
    obs1 = program(mm, v1)
    obs2 = program(mm, v2)
    sharp1 = is_sharp(obs1, t)
    sharp2 = is_sharp(obs2, t)
    distance = max(
        operator_norm(e1 - obs2.effect(x)) for x, e1 in obs1.items()
    )
    overlap = float(abs(np.conj(v1) @ v2))
    return OrthogonalityAudit(
        distinct_sharp=sharp1 and sharp2 and distance > t,
        overlap=overlap,
        sharp_first=sharp1,
        sharp_second=sharp2,
        max_effect_distance=distance,
    )


def construct_g(phi1, phi2) -> np.ndarray:
    """A unitary with G phi1 = phi2: minimal rotation in span{phi1, phi2}.

    Fixes the orthocomplement of the span pointwise.  When phi2 is a phase
    multiple of phi1 the returned G applies exactly that phase on the
    one-dimensional span (so G phi1 = phi2 holds exactly, not just up to
    phase).
    """
    v1 = np.asarray(phi1, dtype=np.complex128).reshape(-1)
    v2 = np.asarray(phi2, dtype=np.complex128).reshape(-1)
    if v1.shape != v2.shape:
        raise InvalidState("programming states live on different spaces")
    n1 = float(np.sqrt(np.real(np.conj(v1) @ v1)))
    n2 = float(np.sqrt(np.real(np.conj(v2) @ v2)))
    if abs(n1 - 1.0) > 1e-8 or abs(n2 - 1.0) > 1e-8:
        raise InvalidState("programming states must be unit vectors")
    dim = v1.shape[0]
    c = complex(np.conj(v1) @ v2)
    rest = v2 - c * v1
    s = float(np.sqrt(np.real(np.conj(rest) @ rest)))
    eye = np.eye(dim, dtype=np.complex128)
    if s <= 1e-14:
        phase = c / abs(c)
        return eye + (phase - 1.0) * np.outer(v1, np.conj(v1))
    u2 = rest / s
    block = np.array([[c, -s], [s, np.conj(c)]], dtype=np.complex128)
    frame = np.column_stack([v1, u2])
    return eye - frame @ dagger(frame) + frame @ block @ dagger(frame)


@dataclass(frozen=True)
class ProgramPair:
    """Two programming states together with a unitary mapping one to the other."""

    phi1: np.ndarray
    phi2: np.ndarray
    g: np.ndarray

    def __init__(self, phi1, phi2, g=None, tol: float | None = None):
        t = config.resolve(tol)
        v1 = np.asarray(phi1, dtype=np.complex128).reshape(-1)
        v2 = np.asarray(phi2, dtype=np.complex128).reshape(-1)
        gm = construct_g(v1, v2) if g is None else as_square(g, "g")
        if not is_unitary(gm, t):
            raise InvalidState("g is not unitary within tolerance")
        if float(np.linalg.norm(gm @ v1 - v2)) > 1e-8:
            raise InvalidState("g does not map phi1 to phi2")
        object.__setattr__(self, "phi1", _readonly(v1))
        object.__setattr__(self, "phi2", _readonly(v2))
        object.__setattr__(self, "g", _readonly(gm))


def prop5_bound(mm: Multimeter, phi1, phi2, x: str, y: str,
                g=None) -> "way.WayBoundReport":
    """|[A1(X), E2(Y)]| <= |[U*(I tensor Z(X))U, U_G*(I tensor Z(Y))U_G]|.

    ``A1`` (the first program) must be sharp; ``U_G = U (I tensor G)`` with
    any unitary ``G phi1 = phi2`` (the deterministic minimal rotation when
    ``g`` is not supplied).
    """
    from . import way

    v1 = _check_state(mm, phi1)
    v2 = _check_state(mm, phi2)
    obs1 = program(mm, v1)
    if not is_sharp(obs1):
        raise NotSharpProgram("the first programmed observable is not sharp")
    obs2 = program(mm, v2)
    if x not in mm.pointer.outcomes or y not in mm.pointer.outcomes:
        raise UnknownOutcome(f"outcomes {(x, y)} must be pointer labels")
    pair = ProgramPair(v1, v2, g)
    lhs = operator_norm(commutator(obs1.effect(x), obs2.effect(y)))
    u_g = mm.coupling @ tensor(np.eye(mm.system_dim), pair.g)
    nm1 = mm.with_probe(v1)
    evolved_x = evolved_pointer_effect(nm1, x)
    z_y = tensor(np.eye(mm.system_dim), mm.pointer.effect(y))
    evolved_y = dagger(u_g) @ z_y @ u_g
    rhs = operator_norm(commutator(evolved_x, evolved_y))
    return way._make_report(lhs, [("evolved_pointers", rhs)], rhs)
