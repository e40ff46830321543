"""Kernel backend selection.

The hot numeric primitives (batched Jacobi eigensolver, batched operator
norms, one-sided Jacobi SVD) exist twice: a Cython extension
(``waylab._fastkernels``) and a vectorised NumPy fallback
(``waylab._kernels_py``).  The compiled backend is picked at import when it
is available; otherwise the fallback is used transparently.

``WAYLAB_BACKEND=python`` forces the fallback, ``WAYLAB_BACKEND=compiled``
demands the extension (and fails loudly when it is missing).  The selected
name is reported by :func:`backend`; ``benchmarks/bench_kernels.py``
compares the two.
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("WAYLAB_BACKEND", "").strip().lower()
if _requested not in ("", "python", "compiled"):
    raise ImportError(
        f"WAYLAB_BACKEND={_requested!r} not understood (use 'python' or 'compiled')"
    )

_impl = _kernels_py
_name = "python"
if _requested != "python":
    try:
        from . import _fastkernels as _impl_compiled

        _impl = _impl_compiled
        _name = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "WAYLAB_BACKEND=compiled but waylab._fastkernels is not built; "
                "run `python setup.py build_ext --inplace`"
            )


def backend() -> str:
    """Name of the active backend: 'compiled' or 'python'."""
    return _name


def eigh_batch(mats, compute_vectors: bool = True):
    return _impl.eigh_batch(mats, compute_vectors)


def opnorm_batch(mats):
    return _impl.opnorm_batch(mats)


def jacobi_svd(mat):
    return _impl.jacobi_svd(mat)
