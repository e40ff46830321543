"""waylab: finite-dimensional quantum measurement toolkit.

Measured-observable extraction for normal measurements, sharpness /
repeatability / Yanase diagnostics, structured commutant solving for
conserved quantities, the quantitative commutator-norm measurability
bounds, programmable-multimeter audits, and the direction-bound scan with
its realisable-effect cross-sections.
"""

from .config import default_tolerance, set_default_tolerance
from .kernels import backend
from .numerics import (
    RealLinearBasis,
    commutator,
    hermitian_eigen,
    operator_norm,
    solve_commutant,
    tensor,
)
from .observables import (
    DiscreteObservable,
    is_sharp,
    is_trivial,
    mutual_commutation_defect,
    spin_observable,
)
from .measurement import (
    NormalMeasurement,
    heisenberg_channel,
    is_repeatable,
    measured_observable,
    repeatability_spectrum_check,
    sharpness_defect,
    weak_yanase_defect,
    yanase_defect,
)
from .way import (
    AdditivePair,
    WayBoundReport,
    additive_conserved_space,
    additive_weak_yanase_space,
    figure2_scan,
    multiplicative_weak_yanase_space,
    prop1_check,
    prop2_bound,
    prop3_bound,
    realisable_effect_region,
    restricted_quantity,
)
from .multimeter import (
    Multimeter,
    construct_g,
    orthogonality_audit,
    program,
    prop5_bound,
)
from .catalog import build, classify_sides

__version__ = "0.1.0"

__all__ = [
    "AdditivePair",
    "DiscreteObservable",
    "Multimeter",
    "NormalMeasurement",
    "RealLinearBasis",
    "WayBoundReport",
    "additive_conserved_space",
    "additive_weak_yanase_space",
    "backend",
    "build",
    "classify_sides",
    "commutator",
    "construct_g",
    "default_tolerance",
    "figure2_scan",
    "heisenberg_channel",
    "hermitian_eigen",
    "is_repeatable",
    "is_sharp",
    "is_trivial",
    "measured_observable",
    "multiplicative_weak_yanase_space",
    "mutual_commutation_defect",
    "operator_norm",
    "orthogonality_audit",
    "program",
    "prop1_check",
    "prop2_bound",
    "prop3_bound",
    "prop5_bound",
    "realisable_effect_region",
    "repeatability_spectrum_check",
    "restricted_quantity",
    "set_default_tolerance",
    "sharpness_defect",
    "solve_commutant",
    "spin_observable",
    "tensor",
    "weak_yanase_defect",
    "yanase_defect",
]
