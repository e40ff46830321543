"""Byte-stable SVG rendering for scan curves and region cross-sections.

No plotting dependency: documents are assembled from fixed-precision
coordinate strings, so identical input data always yields identical bytes.
``render_svg`` accepts the CSV text produced by the scan and region
commands and dispatches on the header.
"""

from __future__ import annotations

import numpy as np

from .errors import MalformedCsv

_W = 640
_H = 480
_MARGIN = 56


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def parse_scan_csv(text: str) -> list[tuple[float, float, np.ndarray]]:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "alpha,min_bound,nx,ny,nz":
        raise MalformedCsv("expected header 'alpha,min_bound,nx,ny,nz'")
    rows = []
    for k, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 5:
            raise MalformedCsv(f"line {k}: expected 5 columns, got {len(parts)}")
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise MalformedCsv(f"line {k}: non-numeric field") from None
        rows.append((vals[0], vals[1], np.array(vals[2:])))
    if not rows:
        raise MalformedCsv("scan CSV has no data rows")
    return rows


def parse_region_csv(text: str) -> np.ndarray:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "x,z":
        raise MalformedCsv("expected header 'x,z'")
    pts = []
    for k, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 2:
            raise MalformedCsv(f"line {k}: expected 2 columns, got {len(parts)}")
        try:
            pts.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise MalformedCsv(f"line {k}: non-numeric field") from None
    return np.array(pts) if pts else np.zeros((0, 2))


def _document(body: list[str], title: str) -> str:
    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<title>{title}</title>',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def render_scan_svg(rows) -> str:
    """Line plot of the minimised direction bound against alpha."""
    alphas = [r[0] for r in rows]
    bounds = [r[1] for r in rows]
    a_lo, a_hi = min(alphas), max(alphas)
    a_span = (a_hi - a_lo) or 1.0
    b_hi = max(max(bounds), 1e-12) * 1.05
    inner_w = _W - 2 * _MARGIN
    inner_h = _H - 2 * _MARGIN

    def sx(a):
        return _MARGIN + inner_w * (a - a_lo) / a_span

    def sy(b):
        return _H - _MARGIN - inner_h * (b / b_hi)

    body = [
        f'<line x1="{_fmt(_MARGIN)}" y1="{_fmt(_H - _MARGIN)}" x2="{_fmt(_W - _MARGIN)}" '
        f'y2="{_fmt(_H - _MARGIN)}" stroke="black" stroke-width="1"/>',
        f'<line x1="{_fmt(_MARGIN)}" y1="{_fmt(_MARGIN)}" x2="{_fmt(_MARGIN)}" '
        f'y2="{_fmt(_H - _MARGIN)}" stroke="black" stroke-width="1"/>',
    ]
    for i in range(5):
        a = a_lo + a_span * i / 4.0
        x = sx(a)
        body.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(_H - _MARGIN)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(_H - _MARGIN + 5)}" stroke="black" stroke-width="1"/>'
        )
        body.append(
            f'<text x="{_fmt(x)}" y="{_fmt(_H - _MARGIN + 20)}" font-size="12" '
            f'text-anchor="middle">{a:.3g}</text>'
        )
        b = b_hi * i / 4.0
        y = sy(b)
        body.append(
            f'<line x1="{_fmt(_MARGIN - 5)}" y1="{_fmt(y)}" x2="{_fmt(_MARGIN)}" '
            f'y2="{_fmt(y)}" stroke="black" stroke-width="1"/>'
        )
        body.append(
            f'<text x="{_fmt(_MARGIN - 8)}" y="{_fmt(y + 4)}" font-size="12" '
            f'text-anchor="end">{b:.3g}</text>'
        )
    body.append(
        f'<text x="{_fmt(_W / 2)}" y="{_fmt(_H - 12)}" font-size="13" '
        f'text-anchor="middle">alpha</text>'
    )
    body.append(
        f'<text x="16" y="{_fmt(_H / 2)}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {_fmt(_H / 2)})">minimised commutator bound</text>'
    )
    points = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(alphas, bounds))
    body.append(
        f'<polyline fill="none" stroke="#1f4e8c" stroke-width="2" points="{points}"/>'
    )
    return _document(body, "minimised direction bound")


def render_region_svg(points: np.ndarray, axis=None, alpha: float | None = None) -> str:
    """Filled cross-section of realisable effects, with the symmetry axis."""
    size = min(_W, _H) - 2 * _MARGIN
    cx = _W / 2.0
    cy = _H / 2.0
    scale = size / 2.0

    def sx(x):
        return cx + scale * x

    def sy(z):
        return cy - scale * z

    body = [
        f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(scale)}" fill="none" '
        f'stroke="black" stroke-width="1"/>',
        f'<line x1="{_fmt(cx - scale - 10)}" y1="{_fmt(cy)}" x2="{_fmt(cx + scale + 10)}" '
        f'y2="{_fmt(cy)}" stroke="#bbbbbb" stroke-width="1"/>',
        f'<line x1="{_fmt(cx)}" y1="{_fmt(cy - scale - 10)}" x2="{_fmt(cx)}" '
        f'y2="{_fmt(cy + scale + 10)}" stroke="#bbbbbb" stroke-width="1"/>',
        f'<text x="{_fmt(cx + scale + 14)}" y="{_fmt(cy + 4)}" font-size="13">x</text>',
        f'<text x="{_fmt(cx - 4)}" y="{_fmt(cy - scale - 14)}" font-size="13">z</text>',
    ]
    if alpha is not None:
        body.append(
            f'<text x="{_fmt(_MARGIN)}" y="{_fmt(_MARGIN - 16)}" font-size="13">'
            f"alpha = {alpha:g}</text>"
        )
    for x, z in points:
        body.append(
            f'<rect x="{_fmt(sx(float(x)) - 1.2)}" y="{_fmt(sy(float(z)) - 1.2)}" '
            f'width="2.4" height="2.4" fill="#7aa6d866"/>'
        )
    if axis is not None:
        ax = np.asarray(axis, dtype=np.float64)
        planar = np.array([ax[0], ax[2]])
        norm = float(np.sqrt(planar @ planar))
        if norm > 1e-12:
            planar = planar / norm
            body.append(
                f'<line x1="{_fmt(sx(-planar[0]))}" y1="{_fmt(sy(-planar[1]))}" '
                f'x2="{_fmt(sx(planar[0]))}" y2="{_fmt(sy(planar[1]))}" '
                f'stroke="black" stroke-width="2"/>'
            )
    return _document(body, "realisable effect cross-section")


def render_svg(csv_text: str, axis=None, alpha: float | None = None) -> str:
    """Render scan or region CSV text, dispatching on the header line."""
    lines = [ln for ln in csv_text.strip().splitlines() if ln.strip()]
    if not lines:
        raise MalformedCsv("empty CSV document")
    header = lines[0].strip()
    if header == "alpha,min_bound,nx,ny,nz":
        return render_scan_svg(parse_scan_csv(csv_text))
    if header == "x,z":
        return render_region_svg(parse_region_csv(csv_text), axis=axis, alpha=alpha)
    raise MalformedCsv(f"unrecognised header {header!r}")
