"""Static heatmaps of K x K matrices (SVG or fixed-width text).

Origin categories run down the vertical axis (category 1 on top), destination
categories across; cells shade from white (0) to red (the matrix maximum).
"""

from __future__ import annotations

import os
import tempfile
from html import escape

import numpy as np

from .errors import OutOfRange

CELL = 64
LEFT = 90
TOP = 60
BAR_GAP = 30
BAR_W = 14


def _shade(v: float, vmax: float) -> str:
    t = 0.0 if vmax <= 0 else min(max(v / vmax, 0.0), 1.0)
    gb = int(round(255 * (1.0 - t)))
    return f"#ff{gb:02x}{gb:02x}"


def _check(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise OutOfRange(f"heatmap needs a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)) or m.min(initial=0) < -1e-9 or m.max(initial=0) > 1 + 1e-9:
        raise OutOfRange("heatmap entries must be finite and within [0, 1]")
    return np.clip(m, 0.0, 1.0)


def render_svg(matrix, title: str = "") -> str:
    m = _check(matrix)
    K = m.shape[0]
    vmax = float(m.max())
    grid = K * CELL
    bar_x = LEFT + grid + BAR_GAP
    width = bar_x + BAR_W + 60
    height = TOP + grid + 60
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<title>{escape(title)}</title>',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{LEFT + grid / 2}" y="{TOP - 30}" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    for i in range(K):
        for j in range(K):
            x, y = LEFT + j * CELL, TOP + i * CELL
            v = m[i, j]
            out.append(
                f'<rect class="cell" data-row="{i + 1}" data-col="{j + 1}" data-value="{v:.6f}" '
                f'x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{_shade(v, vmax)}" '
                f'stroke="#000000" stroke-width="1"/>')
            out.append(f'<text x="{x + CELL / 2}" y="{y + CELL / 2 + 4}" text-anchor="middle" '
                       f'font-size="12">{v:.3f}</text>')
    for k in range(K):
        out.append(f'<text x="{LEFT + k * CELL + CELL / 2}" y="{TOP + grid + 18}" '
                   f'text-anchor="middle" font-size="12">{k + 1}</text>')
        out.append(f'<text x="{LEFT - 10}" y="{TOP + k * CELL + CELL / 2 + 4}" '
                   f'text-anchor="end" font-size="12">{k + 1}</text>')
    out.append(f'<text x="{LEFT + grid / 2}" y="{TOP + grid + 42}" text-anchor="middle" '
               f'font-size="13">Destination category j</text>')
    out.append(f'<text x="{LEFT - 45}" y="{TOP + grid / 2}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 {LEFT - 45} {TOP + grid / 2})">Origin category i</text>')

    # colour bar, white at the bottom
    out.append('<defs><linearGradient id="bar" x1="0" y1="1" x2="0" y2="0">'
               f'<stop offset="0" stop-color="#ffffff"/>'
               f'<stop offset="1" stop-color="{_shade(vmax, vmax)}"/></linearGradient></defs>')
    out.append(f'<rect class="colorbar" x="{bar_x}" y="{TOP}" width="{BAR_W}" height="{grid}" '
               f'fill="url(#bar)" stroke="#000000" stroke-width="1"/>')
    for frac in (0.0, 0.5, 1.0):
        ty = TOP + grid * (1.0 - frac)
        out.append(f'<text x="{bar_x + BAR_W + 5}" y="{ty + 4}" font-size="11">{frac * vmax:.3f}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_ascii(matrix, title: str = "") -> str:
    m = _check(matrix)
    K = m.shape[0]
    lines = [title] if title else []
    lines.append("origin\\dest " + "".join(f"{j + 1:>8d}" for j in range(K)))
    for i in range(K):
        lines.append(f"{i + 1:>11d} " + "".join(f"{m[i, j]:8.3f}" for j in range(K)))
    return "\n".join(lines) + "\n"


def atomic_write(path, text: str) -> None:
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_heatmap(matrix, title: str, path, mode: str = "svg") -> str:
    """Write a heatmap file and return its path."""
    if mode == "svg":
        text = render_svg(matrix, title)
    elif mode == "ascii":
        text = render_ascii(matrix, title)
    else:
        raise OutOfRange(f"unknown heatmap mode {mode!r}")
    atomic_write(path, text)
    return os.fspath(path)
