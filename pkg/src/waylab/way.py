"""Measurability limitations from conserved and commuting quantities.

The quantitative core of the toolkit:

* structured commutant spaces -- additive pairs ``(L1, L2)`` representing
  ``L1 tensor I + I tensor L2`` that commute with a coupling (conserved
  quantities) or with every evolved pointer effect (the weak Yanase
  condition), and multiplicative families ``L1 tensor L2`` with fixed
  second factor;
* the compatibility-inheritance check: when the evolved pointer commutes
  with L and the measured observable is sharp, the measured observable
  commutes with the compression ``V* L V``;
* two commutator-norm bounds relating, outcome by outcome, the
  measured-observable commutator to the sharpness defect and the weak
  Yanase defect (first bound), or to the evolved-pointer and coupling
  commutators (second bound);
* the direction-sphere scan minimizing ``4 |[U_a, S_n(+) tensor I]|`` and
  the induced cross-sections of realisable qubit effects.

Additive pairs carry the gauge freedom ``(L1, L2) ~ (L1 + cI, L2 - cI)``;
spaces are reported with trace-free second factors plus the explicit gauge
generator ``(I, -I)``, so "physical dimension" counts solutions modulo the
gauge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config, kernels
from .errors import DimensionMismatch, NotHermitian, NotUnitary
from .measurement import (
    NormalMeasurement,
    evolved_pointer,
    evolved_pointer_effect,
    measured_observable,
    sharpness_defect,
    weak_yanase_defect,
)
from .numerics import (
    RealLinearBasis,
    as_square,
    commutator,
    dagger,
    hermitian_defect,
    is_unitary,
    operator_norm,
    orthonormalize_tuples,
    solve_commutant,
    tensor,
)
from .observables import pauli_x, pauli_y, pauli_z
from .optimize import nelder_mead


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128)
    out.setflags(write=False)
    return out


def _check_hermitian(a, name: str) -> np.ndarray:
    m = as_square(a, name)
    if hermitian_defect(m) > config.default_tolerance() * max(1.0, operator_norm(m)):
        raise NotHermitian(f"{name} must be selfadjoint")
    return m


@dataclass(frozen=True)
class AdditivePair:
    """Candidate (L1, L2) for the additive quantity L1 tensor I + I tensor L2."""

    l1: np.ndarray
    l2: np.ndarray

    def __init__(self, l1, l2):
        object.__setattr__(self, "l1", _readonly(_check_hermitian(l1, "l1")))
        object.__setattr__(self, "l2", _readonly(_check_hermitian(l2, "l2")))

    def operator(self) -> np.ndarray:
        return tensor(self.l1, np.eye(self.l2.shape[0])) + tensor(
            np.eye(self.l1.shape[0]), self.l2
        )


@dataclass(frozen=True)
class AdditiveCommutantSpace:
    """Solution space of an additive commutation problem, gauge-fixed.

    ``physical`` is an orthonormal basis of representatives with traceless
    second factor; ``gauge`` is the generator (I, -I) that always solves the
    constraints because it maps to the zero operator.  ``kernel_dimension``
    counts the unreduced pair-space kernel (physical dimension + 1).
    """

    description: str
    physical: tuple[AdditivePair, ...]
    gauge: AdditivePair
    kernel_dimension: int

    @property
    def physical_dimension(self) -> int:
        return len(self.physical)

    def _span(self) -> RealLinearBasis:
        elements = [(p.l1, p.l2) for p in self.physical]
        elements.append((self.gauge.l1, self.gauge.l2))
        ortho = orthonormalize_tuples(elements)
        return RealLinearBasis(self.description, tuple(ortho))

    def contains(self, l1, l2, tol: float | None = None) -> bool:
        """Membership of the pair in the full (gauge-inclusive) kernel."""
        return self._span().contains(
            (np.asarray(l1, complex), np.asarray(l2, complex)), tol
        )

    def system_trivial(self, tol: float | None = None) -> bool:
        """True when every solution has L1 proportional to the identity."""
        t = config.resolve(tol)
        for p in self.physical:
            d = p.l1.shape[0]
            c = np.trace(p.l1) / d
            if operator_norm(p.l1 - c * np.eye(d)) > t:
                return False
        return True


def _gauge_fix(space: RealLinearBasis, dims: tuple[int, int], description: str,
               ) -> AdditiveCommutantSpace:
    dh, dk = dims
    reps = []
    for l1, l2 in space.elements:
        c = np.trace(l2).real / dk
        reps.append((l1 + c * np.eye(dh), l2 - c * np.eye(dk)))
    physical = tuple(
        AdditivePair(l1, l2) for l1, l2 in orthonormalize_tuples(reps)
    )
    gauge = AdditivePair(np.eye(dh), -np.eye(dk))
    return AdditiveCommutantSpace(description, physical, gauge, space.dimension)


def additive_conserved_space(u, dims: tuple[int, int]) -> AdditiveCommutantSpace:
    """All additive pairs with [L1 tensor I + I tensor L2, U] = 0."""
    dh, dk = int(dims[0]), int(dims[1])
    um = as_square(u, "u")
    if um.shape[0] != dh * dk:
        raise DimensionMismatch(f"u has dim {um.shape[0]}, expected {dh * dk}")
    if not is_unitary(um):
        raise NotUnitary("u is not unitary within tolerance")
    eh = np.eye(dh)
    ek = np.eye(dk)

    def constraint(l1, l2):
        return commutator(tensor(l1, ek) + tensor(eh, l2), um)

    space = solve_commutant((dh, dk), [constraint], description="[L, U] = 0")
    return _gauge_fix(space, (dh, dk), "additive conserved quantities")


def additive_weak_yanase_space(nm: NormalMeasurement) -> AdditiveCommutantSpace:
    """Additive pairs commuting with every evolved pointer effect."""
    dh, dk = nm.system_dim, nm.apparatus_dim
    eh = np.eye(dh)
    ek = np.eye(dk)
    maps = []
    for _, eff in evolved_pointer(nm):
        maps.append(
            lambda l1, l2, eff=eff: commutator(tensor(l1, ek) + tensor(eh, l2), eff)
        )
    space = solve_commutant((dh, dk), maps, description="[evolved pointer, L] = 0")
    return _gauge_fix(space, (dh, dk), "additive weak-Yanase quantities")


def multiplicative_weak_yanase_space(nm: NormalMeasurement, l2) -> RealLinearBasis:
    """Hermitian L1 with [evolved pointer, L1 tensor l2] = 0 for fixed l2."""
    m2 = _check_hermitian(l2, "l2")
    if m2.shape[0] != nm.apparatus_dim:
        raise DimensionMismatch(
            f"l2 has dim {m2.shape[0]}, apparatus is {nm.apparatus_dim}"
        )
    maps = []
    for _, eff in evolved_pointer(nm):
        maps.append(lambda l1, eff=eff: commutator(tensor(l1, m2), eff))
    space = solve_commutant(
        (nm.system_dim,), maps, description="multiplicative weak-Yanase factors"
    )
    return space


def restricted_quantity(nm: NormalMeasurement, l) -> np.ndarray:
    """The compression V* L V on the system space.

    For additive L this equals ``L1 + <phi|L2 phi> I``; conjugating
    ``B tensor I`` by the coupling first gives the Heisenberg channel.
    """
    m = as_square(l, "l")
    full = nm.system_dim * nm.apparatus_dim
    if m.shape[0] != full:
        raise DimensionMismatch(f"l has dim {m.shape[0]}, expected {full}")
    v = nm.probe_isometry()
    return dagger(v) @ m @ v


@dataclass(frozen=True)
class Prop1Report:
    """Compatibility-inheritance check for a sharp measurement.

    When both defects vanish the conclusion must too: a quantity commuting
    with every evolved pointer effect forces the measured observable to
    commute with its compression.
    """

    weak_yanase: float
    sharpness: float
    conclusion: float


def prop1_check(nm: NormalMeasurement, l) -> Prop1Report:
    m = _check_hermitian(l, "l")
    restricted = restricted_quantity(nm, m)
    obs = measured_observable(nm)
    comms = [commutator(e, restricted) for e in obs.effects]
    conclusion = float(np.max(kernels.opnorm_batch(np.stack(comms))))
    return Prop1Report(
        weak_yanase=weak_yanase_defect(nm, m),
        sharpness=sharpness_defect(nm),
        conclusion=conclusion,
    )


@dataclass(frozen=True)
class MultiplicativeReport:
    """Restriction of a multiplicative quantity L1 tensor L2.

    The compression is ``<phi|L2 phi> L1``, so a commutation conclusion for
    L1 itself only follows when the probe expectation of L2 is away from
    zero; ``degenerate`` flags the inconclusive case.
    """

    probe_expectation: float
    degenerate: bool
    conclusion: float


def multiplicative_restriction_report(
    nm: NormalMeasurement, l1, l2, tol: float | None = None
) -> MultiplicativeReport:
    m1 = _check_hermitian(l1, "l1")
    m2 = _check_hermitian(l2, "l2")
    expect = float(np.real(np.conj(nm.probe) @ (m2 @ nm.probe)))
    obs = measured_observable(nm)
    comms = [commutator(e, m1) for e in obs.effects]
    conclusion = float(np.max(kernels.opnorm_batch(np.stack(comms))))
    return MultiplicativeReport(
        probe_expectation=expect,
        degenerate=abs(expect) <= config.resolve(tol),
        conclusion=conclusion,
    )


@dataclass(frozen=True)
class WayBoundReport:
    """One evaluated commutator-norm inequality.

    ``rhs_terms`` names the individual right-hand-side contributions;
    ``rhs_total`` is the bound itself and ``slack = rhs_total - lhs`` must
    be >= -tolerance (the inequalities are theorems; a violation would be a
    numerical bug, so construction fails loudly on one).
    """

    lhs: float
    rhs_terms: tuple[tuple[str, float], ...]
    rhs_total: float
    slack: float

    def term(self, name: str) -> float:
        for key, value in self.rhs_terms:
            if key == name:
                return value
        raise KeyError(name)


def _make_report(lhs: float, terms: list[tuple[str, float]], rhs_total: float,
                 tol: float | None = None) -> WayBoundReport:
    slack = rhs_total - lhs
    if slack < -config.resolve(tol):
        raise ArithmeticError(
            f"bound violated: lhs {lhs:.3e} > rhs {rhs_total:.3e}"
        )
    return WayBoundReport(lhs, tuple(terms), rhs_total, slack)


def prop2_bound(nm: NormalMeasurement, l, outcome: str) -> WayBoundReport:
    """|[E(X), V* L V]| <= 2 |[U*(I tensor Z(X))U, V V*]| |L| + |[U*(I tensor Z(X))U, L]|.

    The first term carries the sharpness defect of the measured observable,
    the second the weak Yanase defect; the sharp-and-commuting case makes
    both vanish and restores the exact commutation conclusion.  No
    normalisation is applied to L (the bound is 1-homogeneous in it).
    """
    m = _check_hermitian(l, "l")
    obs = measured_observable(nm)
    ex = obs.effect(outcome)
    restricted = restricted_quantity(nm, m)
    lhs = operator_norm(commutator(ex, restricted))
    eff = evolved_pointer_effect(nm, outcome)
    sharp_term = 2.0 * operator_norm(commutator(eff, nm.probe_projection())) * operator_norm(m)
    wy_term = operator_norm(commutator(eff, m))
    return _make_report(
        lhs, [("sharpness", sharp_term), ("weak_yanase", wy_term)],
        sharp_term + wy_term,
    )


def prop3_bound(nm: NormalMeasurement, l_sys, outcome: str) -> WayBoundReport:
    """|[E(X), L]| <= |[U*(I tensor Z(X))U, L tensor I]| <= 2 |[U, L tensor I]|.

    Both levels are reported: ``evolved_pointer`` is the middle quantity
    and ``coupling`` the final bound (also ``rhs_total``).
    """
    m = _check_hermitian(l_sys, "l_sys")
    if m.shape[0] != nm.system_dim:
        raise DimensionMismatch(
            f"l_sys has dim {m.shape[0]}, system is {nm.system_dim}"
        )
    obs = measured_observable(nm)
    ex = obs.effect(outcome)
    lhs = operator_norm(commutator(ex, m))
    lifted = tensor(m, np.eye(nm.apparatus_dim))
    eff = evolved_pointer_effect(nm, outcome)
    mid = operator_norm(commutator(eff, lifted))
    top = 2.0 * operator_norm(commutator(nm.coupling, lifted))
    report = _make_report(
        lhs, [("evolved_pointer", mid), ("coupling", top)], top
    )
    # the chain is two inequalities; verify the inner one as well
    if mid - lhs < -config.default_tolerance():
        raise ArithmeticError("inner bound violated")
    if top - mid < -config.default_tolerance():
        raise ArithmeticError("outer bound violated")
    return report


# ---------------------------------------------------------------------------
# Direction-sphere scan and realisable-effect cross-sections
# ---------------------------------------------------------------------------


def direction_from_angles(theta: float, azimuth: float) -> np.ndarray:
    return np.array(
        [
            np.sin(theta) * np.cos(azimuth),
            np.sin(theta) * np.sin(azimuth),
            np.cos(theta),
        ]
    )


def coupling_commutator_bound(u, direction) -> float:
    """4 |[U, S_n(+) tensor I]| for a two-qubit coupling U."""
    um = as_square(u, "u")
    if um.shape != (4, 4):
        raise DimensionMismatch("the direction bound is defined for 4x4 couplings")
    n = np.asarray(direction, dtype=np.float64).reshape(3)
    eye = np.eye(2)
    s_plus = 0.5 * (eye + n[0] * pauli_x + n[1] * pauli_y + n[2] * pauli_z)
    return 4.0 * operator_norm(commutator(um, tensor(s_plus, eye)))


def _direction_kernel(u) -> np.ndarray:
    """[U, sigma_i tensor I]/2 stacked over i; the scan objective is
    2 |sum_i n_i K_i| * 2 = 4 |[U, S_n(+) tensor I]|."""
    um = as_square(u, "u")
    eye = np.eye(2)
    return np.stack(
        [0.5 * commutator(um, tensor(s, eye)) for s in (pauli_x, pauli_y, pauli_z)]
    )


def bound_over_directions(u, directions) -> np.ndarray:
    """Vectorised ``coupling_commutator_bound`` over an (N, 3) batch."""
    k = _direction_kernel(u)
    dirs = np.asarray(directions, dtype=np.float64)
    combos = np.einsum("ni,ijk->njk", dirs, k)
    return 4.0 * kernels.opnorm_batch(combos)


@dataclass(frozen=True)
class ScanPoint:
    alpha: float
    min_bound: float
    direction: np.ndarray


def minimize_direction_bound(
    u,
    coarse_grid: tuple[int, int] = (64, 128),
    refine_starts: int = 5,
    diameter_tol: float = 1e-7,
) -> tuple[float, np.ndarray]:
    """Minimum over unit directions of ``4 |[U, S_n(+) tensor I]|``.

    Because ``S_{-n}(+) = I - S_n(+)``, antipodal directions give the same
    commutator; the coarse grid therefore covers the closed upper
    half-sphere and Nelder-Mead refines the best cells.
    """
    thetas = np.linspace(0.0, np.pi / 2.0, coarse_grid[0])
    azimuths = np.linspace(0.0, 2.0 * np.pi, coarse_grid[1], endpoint=False)
    tt, aa = np.meshgrid(thetas, azimuths, indexing="ij")
    tt = tt.ravel()
    aa = aa.ravel()
    dirs = np.column_stack(
        [np.sin(tt) * np.cos(aa), np.sin(tt) * np.sin(aa), np.cos(tt)]
    )
    values = bound_over_directions(u, dirs)
    order = np.argsort(values, kind="stable")

    k = _direction_kernel(u)

    def objective(angles):
        n = direction_from_angles(angles[0], angles[1])
        combo = np.tensordot(n, k, axes=(0, 0))
        return 4.0 * float(kernels.opnorm_batch(combo[None])[0])

    best_val = float(values[order[0]])
    best_angles = np.array([tt[order[0]], aa[order[0]]])
    step = max(thetas[1] - thetas[0], azimuths[1] - azimuths[0])
    for idx in order[:refine_starts]:
        x, fx = nelder_mead(
            objective,
            np.array([tt[idx], aa[idx]]),
            step=step,
            diameter_tol=diameter_tol,
        )
        if fx < best_val:
            best_val = fx
            best_angles = x
    direction = direction_from_angles(best_angles[0], best_angles[1])
    if direction[2] < 0.0:  # report the upper-hemisphere representative
        direction = -direction
    return best_val, direction


def figure2_scan(
    alphas,
    coarse_grid: tuple[int, int] = (64, 128),
    refine_starts: int = 5,
) -> list[ScanPoint]:
    """Minimised direction bound for each coupling strength ``alpha``."""
    from .catalog import build

    points = []
    for alpha in alphas:
        u = build("u-alpha", alpha=float(alpha))
        val, direction = minimize_direction_bound(
            u, coarse_grid=coarse_grid, refine_starts=refine_starts
        )
        points.append(ScanPoint(float(alpha), val, direction))
    return points


@dataclass(frozen=True)
class RegionResult:
    """Cross-section in the xz-plane of the realisable qubit effects."""

    alpha: float
    min_bound: float
    direction: np.ndarray
    points: np.ndarray  # (k, 2) columns x, z


def realisable_effect_region(
    alpha: float,
    grid: int = 401,
    coarse_grid: tuple[int, int] = (64, 128),
) -> RegionResult:
    """Sample {m in unit ball, |m x n*| <= min bound} on an xz-plane grid."""
    from .catalog import build

    u = build("u-alpha", alpha=float(alpha))
    bound, direction = minimize_direction_bound(u, coarse_grid=coarse_grid)
    xs = np.linspace(-1.0, 1.0, int(grid))
    zs = np.linspace(-1.0, 1.0, int(grid))
    xx, zz = np.meshgrid(xs, zs, indexing="ij")
    mx = xx.ravel()
    mz = zz.ravel()
    inside = mx * mx + mz * mz <= 1.0
    m = np.column_stack([mx, np.zeros_like(mx), mz])
    cross = np.cross(m, direction[None, :])
    norms = np.sqrt(np.sum(cross * cross, axis=1))
    keep = inside & (norms <= bound + 1e-12)
    pts = np.column_stack([mx[keep], mz[keep]])
    return RegionResult(float(alpha), bound, direction, pts)
