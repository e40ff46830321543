"""Derivative-free minimization: a small deterministic Nelder-Mead.

Used to refine grid minima on the direction sphere.  Standard reflection /
expansion / contraction / shrink moves; terminates when the simplex
diameter falls below ``diameter_tol`` (or after ``max_iter`` moves).  No
randomness anywhere, so repeated runs are bit-identical.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    step: float = 0.05,
    diameter_tol: float = 1e-7,
    max_iter: int = 600,
) -> tuple[np.ndarray, float]:
    """Minimize ``f`` starting from a right-angle simplex around ``x0``.

    Returns the best vertex and its value.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    n = x0.size
    verts = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        v[i] += step
        verts.append(v)
    vals = [float(f(v)) for v in verts]

    for _ in range(max_iter):
        order = np.argsort(vals, kind="stable")
        verts = [verts[i] for i in order]
        vals = [vals[i] for i in order]
        spread = max(
            float(np.max(np.abs(v - verts[0]))) for v in verts[1:]
        ) if n else 0.0
        if spread < diameter_tol:
            break

        centroid = np.mean(verts[:-1], axis=0)
        worst = verts[-1]
        reflected = centroid + (centroid - worst)
        fr = float(f(reflected))
        if fr < vals[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            fe = float(f(expanded))
            if fe < fr:
                verts[-1], vals[-1] = expanded, fe
            else:
                verts[-1], vals[-1] = reflected, fr
        elif fr < vals[-2]:
            verts[-1], vals[-1] = reflected, fr
        else:
            contracted = centroid + 0.5 * (worst - centroid)
            fc = float(f(contracted))
            if fc < vals[-1]:
                verts[-1], vals[-1] = contracted, fc
            else:
                best = verts[0]
                verts = [best] + [best + 0.5 * (v - best) for v in verts[1:]]
                vals = [vals[0]] + [float(f(v)) for v in verts[1:]]

    order = np.argsort(vals, kind="stable")
    return verts[order[0]].copy(), vals[order[0]]
