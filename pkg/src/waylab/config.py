"""Numeric tolerances used throughout the toolkit.

Two tolerances govern everything:

* the predicate tolerance ``tau`` (default ``1e-10``), measured relative to
  ``max(1, |A|)``, against which every is_hermitian/is_unitary/... decision
  and every defect comparison is made;
* the rank cutoff ``RANK_TOLERANCE = 1e-9``: singular values below
  ``1e-9 * (largest singular value)`` count as zero when extracting
  commutant nullspaces.

Dimensions never exceed a few dozen, so double precision leaves several
orders of magnitude of headroom over both cutoffs.

The environment variable ``WAYLAB_TOLERANCE`` overrides the predicate
tolerance; :func:`set_default_tolerance` overrides both the default and the
environment (the CLI uses it).
"""

from __future__ import annotations

import os

DEFAULT_TOLERANCE = 1e-10
RANK_TOLERANCE = 1e-9

_override: float | None = None


def set_default_tolerance(value: float | None) -> None:
    """Set (or with ``None`` clear) the process-wide predicate tolerance."""
    global _override
    _override = None if value is None else float(value)


def default_tolerance() -> float:
    if _override is not None:
        return _override
    env = os.environ.get("WAYLAB_TOLERANCE")
    if env:
        return float(env)
    return DEFAULT_TOLERANCE


def resolve(tol: float | None) -> float:
    """Return ``tol`` itself, or the ambient default when ``tol`` is None."""
    return default_tolerance() if tol is None else float(tol)
