"""Deterministic SVG rendering of persistence diagrams with uncertainty glyphs.

Pairs are drawn as a vertical bar from the diagonal up to ``(birth, death)``.
When the diagram carries a positive epsilon, a translucent red band marks the
region ``death - birth <= 2 * epsilon`` where pairs may be absent from the
exact diagram, and each certain pair gets a ``2 * epsilon`` square bounding
the location of its exact counterpart. Coordinates use a fixed precision and
elements are emitted in a stable order so that outputs can be compared
byte for byte.
"""

from __future__ import annotations

from pathlib import Path

from .pairing import PairType, PersistenceDiagram

SIZE = 480
MARGIN = 48
PRECISION = 2
COLORS = {
    PairType.MIN_SADDLE: "#1f77b4",
    PairType.SADDLE_MAX: "#2ca02c",
    PairType.GLOBAL: "#444444",
}
_CLASS = {
    PairType.MIN_SADDLE: "min-saddle",
    PairType.SADDLE_MAX: "saddle-max",
    PairType.GLOBAL: "global",
}


def _num(x: float) -> str:
    s = f"{x:.{PRECISION}f}"
    return "0.00" if s == "-0.00" else s


def _domain(d: PersistenceDiagram) -> tuple[float, float]:
    lo, hi = (float(v) for v in d.field_range)
    pts = d.points()
    if pts.size:
        lo, hi = min(lo, float(pts.min())), max(hi, float(pts.max()))
    if hi <= lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def render_svg(d: PersistenceDiagram, path=None) -> str:
    """Render ``d`` as SVG text; also write it to ``path`` when given."""
    lo, hi = _domain(d)
    side = SIZE - 2 * MARGIN
    scale = side / (hi - lo)

    def px(x):
        return MARGIN + (x - lo) * scale

    def py(y):
        return MARGIN + side - (y - lo) * scale

    eps = float(d.epsilon_abs)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect class="background" x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>',
        '<defs><clipPath id="plot-area">'
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{side}" height="{side}"/>'
        "</clipPath></defs>",
    ]
    if eps > 0:
        w = 2.0 * eps
        band = [(lo, lo), (hi, hi), (hi, hi + w), (lo, lo + w)]
        pts = " ".join(f"{_num(px(x))},{_num(py(y))}" for x, y in band)
        out.append(
            f'<polygon class="uncertainty-band" points="{pts}" fill="#d62728" '
            'fill-opacity="0.25" stroke="none" clip-path="url(#plot-area)"/>'
        )
    out.append(
        f'<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{side}" height="{side}" '
        'fill="none" stroke="#000000" stroke-width="1"/>'
    )
    out.append(
        f'<line class="diagonal" x1="{_num(px(lo))}" y1="{_num(py(lo))}" '
        f'x2="{_num(px(hi))}" y2="{_num(py(hi))}" stroke="#000000" stroke-width="1"/>'
    )
    if eps > 0:
        half = eps * scale
        for p in d.pairs:
            if not p.certain:
                continue
            cx, cy = px(float(p.birth)), py(float(p.death))
            out.append(
                f'<rect class="certainty-square" x="{_num(cx - half)}" y="{_num(cy - half)}" '
                f'width="{_num(2 * half)}" height="{_num(2 * half)}" fill="none" '
                f'stroke="{COLORS[p.pair_type]}" stroke-width="1" clip-path="url(#plot-area)"/>'
            )
    for p in d.pairs:
        b, dd = float(p.birth), float(p.death)
        status = "pair-certain" if p.certain else "pair-uncertain"
        color = COLORS[p.pair_type]
        out.append(
            f'<g class="pair {status} {_CLASS[p.pair_type]}" '
            f'data-birth-vertex="{p.birth_vertex}" data-death-vertex="{p.death_vertex}">'
            f'<line x1="{_num(px(b))}" y1="{_num(py(b))}" x2="{_num(px(b))}" y2="{_num(py(dd))}" '
            f'stroke="{color}" stroke-width="1.5"/>'
            f'<circle cx="{_num(px(b))}" cy="{_num(py(dd))}" r="3" fill="{color}"/>'
            "</g>"
        )
    base = SIZE - MARGIN / 2
    out.append(
        f'<text class="axis-label" x="{_num(SIZE / 2)}" y="{_num(base)}" '
        'text-anchor="middle" font-family="sans-serif" font-size="12">Birth</text>'
    )
    out.append(
        f'<text class="axis-label" x="{_num(MARGIN / 2)}" y="{_num(SIZE / 2)}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 {_num(MARGIN / 2)} {_num(SIZE / 2)})">Death</text>'
    )
    out.append(
        f'<text class="caption" x="{MARGIN}" y="{_num(MARGIN / 2)}" font-family="sans-serif" '
        f'font-size="11">pairs={len(d)} epsilon={eps:.6g}</text>'
    )
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
