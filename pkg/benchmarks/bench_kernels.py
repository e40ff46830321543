"""Benchmark the compiled kernels against the NumPy fallback.

Times the three primitives on representative workloads (direction-scan
sized batches of small Hermitian matrices, constraint-matrix SVDs) plus an
end-to-end direction-bound minimisation under each backend.

Run from the repository root after building the extension:

    python setup.py build_ext --inplace
    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import os
import subprocess
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from waylab import _kernels_py as python_backend  # noqa: E402

try:
    from waylab import _fastkernels as compiled_backend
except ImportError:
    compiled_backend = None


def _time(fn, repeats: int = 5) -> float:
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_primitives() -> None:
    rng = np.random.default_rng(0)
    batch = rng.standard_normal((20000, 4, 4)) + 1j * rng.standard_normal((20000, 4, 4))
    herm = batch + np.conj(np.swapaxes(batch, 1, 2))
    rect = rng.standard_normal((144, 16))

    cases = [
        ("eigh_batch (20000, 4, 4) vectors", lambda mod: mod.eigh_batch(herm, True)),
        ("eigh_batch (20000, 4, 4) values", lambda mod: mod.eigh_batch(herm, False)),
        ("opnorm_batch (20000, 4, 4)", lambda mod: mod.opnorm_batch(batch)),
        ("jacobi_svd (144, 16) x100",
         lambda mod: [mod.jacobi_svd(rect) for _ in range(100)]),
    ]
    header = f"{'kernel':40s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, call in cases:
        t_py = _time(lambda: call(python_backend))
        if compiled_backend is None:
            print(f"{name:40s} {t_py:9.4f}s {'n/a':>10s} {'n/a':>8s}")
            continue
        t_cy = _time(lambda: call(compiled_backend))
        print(f"{name:40s} {t_py:9.4f}s {t_cy:9.4f}s {t_py / t_cy:7.1f}x")


def bench_scan() -> None:
    """End-to-end: one direction-bound minimisation per backend."""
    snippet = (
        "import time, numpy as np; import waylab.way as way; import waylab.catalog as cat;"
        "u = cat.u_alpha_unitary(0.85);"
        "start = time.perf_counter();"
        "[way.minimize_direction_bound(u) for _ in range(3)];"
        "print(f'{(time.perf_counter() - start) / 3:.4f}')"
    )
    print()
    print("minimize_direction_bound (coarse 64x128 + refinement), per call:")
    for backend in ("python", "compiled"):
        if backend == "compiled" and compiled_backend is None:
            print("  compiled: n/a (extension not built)")
            continue
        env = dict(os.environ, WAYLAB_BACKEND=backend)
        env["PYTHONPATH"] = os.pathsep.join(
            [os.path.join(os.path.dirname(__file__), "..", "src"),
             env.get("PYTHONPATH", "")]
        )
        out = subprocess.run(
            [sys.executable, "-c", snippet], env=env, capture_output=True, text=True
        )
        print(f"  {backend}: {out.stdout.strip()}s")


if __name__ == "__main__":
    bench_primitives()
    bench_scan()
