"""Normal measurements: apparatus, sharp pointer, unitary coupling, probe.

A normal measurement is the 4-tuple (apparatus space K, sharp pointer Z on
K, unitary coupling U on H tensor K, unit probe vector phi in K).  The
module extracts the measured system observable

    E(X) = V* U* (I tensor Z(X)) U V,      V: psi -> psi tensor phi,

and evaluates the associated predicates: sharpness of E via the commutator
criterion with the probe projection, repeatability, the Yanase and weak
Yanase defects, the Heisenberg channel, and the eigenvalue-1 audit for
repeatable measurements.

Defect functions return the max over outcomes; ``*_breakdown`` variants
give the per-outcome values for reporting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config, kernels
from .errors import (
    DimensionMismatch,
    InvalidModel,
    NotHermitian,
    PreconditionViolated,
)
from .numerics import (
    as_square,
    commutator,
    complete_to_unitary,
    dagger,
    hermitian_defect,
    is_unitary,
    operator_norm,
    tensor,
)
from .observables import DiscreteObservable, is_sharp, pauli_x, pauli_y, pauli_z


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class NormalMeasurement:
    system_dim: int
    apparatus_dim: int
    pointer: DiscreteObservable
    coupling: np.ndarray
    probe: np.ndarray

    def __init__(self, system_dim, apparatus_dim, pointer, coupling, probe,
                 tol: float | None = None):
        t = config.resolve(tol)
        dh = int(system_dim)
        dk = int(apparatus_dim)
        if dh < 1 or dk < 1:
            raise InvalidModel("dimensions must be positive")
        if not isinstance(pointer, DiscreteObservable):
            raise InvalidModel("pointer must be a DiscreteObservable")
        if pointer.space_dim != dk:
            raise InvalidModel(
                f"pointer lives on dim {pointer.space_dim}, apparatus is {dk}"
            )
        if not is_sharp(pointer, t):
            raise InvalidModel("pointer must be sharp (a PVM)")
        u = as_square(coupling, "coupling")
        if u.shape[0] != dh * dk:
            raise InvalidModel(
                f"coupling dim {u.shape[0]} != system*apparatus = {dh * dk}"
            )
        if not is_unitary(u, t):
            raise InvalidModel("coupling is not unitary within tolerance")
        phi = np.asarray(probe, dtype=np.complex128).reshape(-1)
        if phi.shape != (dk,):
            raise InvalidModel(f"probe has dim {phi.shape[0]}, apparatus is {dk}")
        if abs(float(np.sqrt(np.real(np.conj(phi) @ phi))) - 1.0) > t:
            raise InvalidModel("probe is not a unit vector")
        object.__setattr__(self, "system_dim", dh)
        object.__setattr__(self, "apparatus_dim", dk)
        object.__setattr__(self, "pointer", pointer)
        object.__setattr__(self, "coupling", _readonly(u))
        object.__setattr__(self, "probe", _readonly(phi))

    # -- derived pieces ----------------------------------------------------

    def probe_isometry(self) -> np.ndarray:
        """V: H -> H tensor K, columns e_i tensor phi (system-first order)."""
        return np.kron(np.eye(self.system_dim), self.probe.reshape(-1, 1))

    def probe_projection(self) -> np.ndarray:
        """V V* = I tensor |phi><phi| on H tensor K."""
        v = self.probe_isometry()
        return v @ dagger(v)


def evolved_pointer_effect(nm: NormalMeasurement, outcome: str) -> np.ndarray:
    """Heisenberg-evolved pointer effect U* (I tensor Z(X)) U."""
    z = nm.pointer.effect(outcome)
    u = nm.coupling
    return dagger(u) @ tensor(np.eye(nm.system_dim), z) @ u


def evolved_pointer(nm: NormalMeasurement) -> tuple[tuple[str, np.ndarray], ...]:
    return tuple((x, evolved_pointer_effect(nm, x)) for x in nm.pointer.outcomes)


def measured_observable(nm: NormalMeasurement) -> DiscreteObservable:
    """The system observable E(X) = V* U* (I tensor Z(X)) U V."""
    v = nm.probe_isometry()
    effects = [dagger(v) @ eff @ v for _, eff in evolved_pointer(nm)]
    return DiscreteObservable(nm.system_dim, nm.pointer.outcomes, effects)


def sharpness_defect_breakdown(nm: NormalMeasurement) -> dict[str, float]:
    """Per-outcome norms of [U*(I tensor Z(X))U, V V*].

    All vanish exactly when the measured observable is sharp.
    """
    proj = nm.probe_projection()
    comms = [commutator(eff, proj) for _, eff in evolved_pointer(nm)]
    norms = kernels.opnorm_batch(np.stack(comms))
    return dict(zip(nm.pointer.outcomes, (float(x) for x in norms)))


def sharpness_defect(nm: NormalMeasurement) -> float:
    return max(sharpness_defect_breakdown(nm).values())


def is_repeatable(nm: NormalMeasurement, tol: float | None = None) -> bool:
    """E(X) = V* U* (E(X) tensor Z(X)) U V for every outcome X."""
    t = config.resolve(tol)
    v = nm.probe_isometry()
    u = nm.coupling
    obs = measured_observable(nm)
    for x, ex in obs.items():
        repeated = dagger(v) @ dagger(u) @ tensor(ex, nm.pointer.effect(x)) @ u @ v
        if operator_norm(repeated - ex) > t:
            return False
    return True


def yanase_defect_breakdown(nm: NormalMeasurement, l2) -> dict[str, float]:
    """Per-outcome norms of [Z(X), l2] (the Yanase condition)."""
    m = as_square(l2, "l2")
    if m.shape[0] != nm.apparatus_dim:
        raise DimensionMismatch(
            f"l2 has dim {m.shape[0]}, apparatus is {nm.apparatus_dim}"
        )
    if hermitian_defect(m) > config.default_tolerance() * max(1.0, operator_norm(m)):
        raise NotHermitian("l2 must be selfadjoint")
    comms = [commutator(nm.pointer.effect(x), m) for x in nm.pointer.outcomes]
    norms = kernels.opnorm_batch(np.stack(comms))
    return dict(zip(nm.pointer.outcomes, (float(x) for x in norms)))


def yanase_defect(nm: NormalMeasurement, l2) -> float:
    return max(yanase_defect_breakdown(nm, l2).values())


def weak_yanase_defect_breakdown(nm: NormalMeasurement, l) -> dict[str, float]:
    """Per-outcome norms of [U*(I tensor Z(X))U, l]."""
    m = as_square(l, "l")
    full = nm.system_dim * nm.apparatus_dim
    if m.shape[0] != full:
        raise DimensionMismatch(f"l has dim {m.shape[0]}, expected {full}")
    if hermitian_defect(m) > config.default_tolerance() * max(1.0, operator_norm(m)):
        raise NotHermitian("l must be selfadjoint")
    comms = [commutator(eff, m) for _, eff in evolved_pointer(nm)]
    norms = kernels.opnorm_batch(np.stack(comms))
    return dict(zip(nm.pointer.outcomes, (float(x) for x in norms)))


def weak_yanase_defect(nm: NormalMeasurement, l) -> float:
    return max(weak_yanase_defect_breakdown(nm, l).values())


def heisenberg_channel(nm: NormalMeasurement, b) -> np.ndarray:
    """E*(B) = V* U* (B tensor I) U V, the unital Heisenberg channel."""
    m = as_square(b, "b")
    if m.shape[0] != nm.system_dim:
        raise DimensionMismatch(
            f"b has dim {m.shape[0]}, system is {nm.system_dim}"
        )
    v = nm.probe_isometry()
    u = nm.coupling
    return dagger(v) @ dagger(u) @ tensor(m, np.eye(nm.apparatus_dim)) @ u @ v


def repeatability_spectrum_check(nm: NormalMeasurement, tol: float | None = None) -> bool:
    """Audit of the eigenvalue-1 necessary condition for repeatability.

    Requires ``is_repeatable(nm)``; returns True when every nonzero effect
    of the measured observable has largest eigenvalue >= 1 - tol.
    """
    t = config.resolve(tol)
    if not is_repeatable(nm, t):
        raise PreconditionViolated("measurement is not repeatable")
    for _, ex in measured_observable(nm).items():
        if operator_norm(ex) <= t:
            continue
        w, _ = kernels.eigh_batch(ex[None], compute_vectors=False)
        if float(w[0, -1]) < 1.0 - t:
            return False
    return True


def random_repeatable_measurement(
    rng: np.random.Generator,
    system_dim: int = 2,
    apparatus_dim: int | None = None,
    n_outcomes: int | None = None,
) -> NormalMeasurement:
    """Draw a repeatable-by-construction normal measurement.

    A random rank-1 sharp observable on H (orthonormal basis ``a_i``) is
    transcribed onto random pointer atoms: the coupling is any unitary
    completion of ``a_i tensor phi -> a_i tensor z_{g(i)}`` where ``g``
    groups basis vectors into outcomes.  Extra pointer dimensions are
    lumped into the last outcome, which keeps the pointer sharp.
    """
    dh = int(system_dim)
    dk = dh if apparatus_dim is None else int(apparatus_dim)
    n = min(dh, dk) if n_outcomes is None else int(n_outcomes)
    if not (1 <= n <= min(dh, dk)):
        raise PreconditionViolated("need 1 <= n_outcomes <= min(dims)")

    def haar_frame(d):
        return complete_to_unitary(np.zeros((d, 0), dtype=np.complex128), rng)

    a_basis = haar_frame(dh)
    z_basis = haar_frame(dk)
    phi = rng.standard_normal(dk) + 1j * rng.standard_normal(dk)
    phi /= np.sqrt(np.real(np.conj(phi) @ phi))

    # group system basis vectors (outcome i gets at least one vector)
    groups = list(range(n)) + [int(rng.integers(0, n)) for _ in range(dh - n)]
    rng.shuffle(groups)

    pointer_effects = []
    for j in range(n):
        p = np.zeros((dk, dk), dtype=np.complex128)
        p += np.outer(z_basis[:, j], np.conj(z_basis[:, j]))
        if j == n - 1:
            for extra in range(n, dk):
                p += np.outer(z_basis[:, extra], np.conj(z_basis[:, extra]))
        pointer_effects.append(p)
    pointer = DiscreteObservable(dk, tuple(f"x{j}" for j in range(n)), pointer_effects)

    domain = np.column_stack([np.kron(a_basis[:, i], phi) for i in range(dh)])
    images = np.column_stack(
        [np.kron(a_basis[:, i], z_basis[:, groups[i]]) for i in range(dh)]
    )
    domain_full = complete_to_unitary(domain, rng)
    images_full = complete_to_unitary(images, rng)
    u = images_full @ dagger(domain_full)
    return NormalMeasurement(dh, dk, pointer, u, phi)


# ---------------------------------------------------------------------------
# Vectorised qubit-pointer scans
# ---------------------------------------------------------------------------


def pointer_axis_operators(coupling, system_dim: int, apparatus_dim: int):
    """U*(I tensor sigma_i)U for i = x, y, z (qubit apparatus only).

    Every spin pointer satisfies Z_n(+/-) = (I +/- n.sigma)/2, so the whole
    family of evolved pointer effects is affine in these three operators;
    direction scans then reduce to batched norms of linear combinations.
    """
    if apparatus_dim != 2:
        raise DimensionMismatch("spin-pointer scans need a qubit apparatus")
    u = as_square(coupling, "coupling")
    eye = np.eye(system_dim)
    return np.stack(
        [dagger(u) @ tensor(eye, s) @ u for s in (pauli_x, pauli_y, pauli_z)]
    )


def sharpness_defect_direction_scan(coupling, probe, directions) -> np.ndarray:
    """Sharpness defects of <C^2, S_n, U, phi> for a batch of directions n.

    Returns ``max_X |[U*(I tensor S_n(X))U, V V*]|`` per direction; for the
    two-valued spin pointer both outcomes give the same commutator norm.
    """
    dirs = np.asarray(directions, dtype=np.float64)
    if dirs.ndim != 2 or dirs.shape[1] != 3:
        raise DimensionMismatch("directions must be an (N, 3) array")
    phi = np.asarray(probe, dtype=np.complex128).reshape(-1)
    dh = 0
    u = as_square(coupling, "coupling")
    if u.shape[0] % 2:
        raise DimensionMismatch("coupling dim must be even for a qubit apparatus")
    dh = u.shape[0] // 2
    axes = pointer_axis_operators(u, dh, 2)
    v = np.kron(np.eye(dh), phi.reshape(-1, 1))
    proj = v @ dagger(v)
    k = np.stack([a @ proj - proj @ a for a in axes])
    combos = np.einsum("ni,ijk->njk", dirs, k)
    return 0.5 * kernels.opnorm_batch(combos)
