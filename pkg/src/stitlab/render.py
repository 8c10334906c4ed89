"""Deterministic SVG 1.1 drawings of tessellations."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .tessellation import Tessellation

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _fmt(x: float) -> str:
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_svg(T: Tessellation, *, size: int = 512, margin: int = 16, origin: bool = True,
               labels: bool = False, stroke: float = 1.0) -> str:
    """SVG text for ``T``; the same input and options give identical bytes.

    Planar tessellations get one ``<polygon class="cell">`` per cell plus
    the window outline.  A 1-d tessellation is drawn as a strip: the window
    segment with one tick per cell endpoint.
    """
    if T.dim == 1:
        return _render_strip(T, size=size, margin=margin, origin=origin, labels=labels, stroke=stroke)
    x0, y0, x1, y1 = (float(v) for v in T.window.bbox)
    span = max(x1 - x0, y1 - y0) or 1.0
    scale = (size - 2 * margin) / span
    width = round((x1 - x0) * scale) + 2 * margin
    height = round((y1 - y0) * scale) + 2 * margin

    def pt(v):
        # SVG y grows downward
        return f"{_fmt(margin + (float(v[0]) - x0) * scale)},{_fmt(margin + (y1 - float(v[1])) * scale)}"

    out = [_HEADER,
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">\n',
           f'<g fill="none" stroke="black" stroke-width="{_fmt(stroke)}">\n']
    for k, C in enumerate(T.cells, start=1):
        out.append(f'<polygon class="cell" data-index="{k}" points="{" ".join(pt(v) for v in C.vertices)}"/>\n')
    out.append(f'<polygon class="window" stroke-width="{_fmt(2 * stroke)}" '
               f'points="{" ".join(pt(v) for v in T.window.vertices)}"/>\n')
    out.append("</g>\n")
    if origin:
        cx, cy = pt((0, 0)).split(",")
        out.append(f'<circle class="origin" cx="{cx}" cy="{cy}" r="3" fill="red"/>\n')
    if labels:
        out.append('<g font-family="monospace" font-size="8" text-anchor="middle">\n')
        for k, C in enumerate(T.cells, start=1):
            n = len(C.vertices)
            cx = sum(float(v[0]) for v in C.vertices) / n
            cy = sum(float(v[1]) for v in C.vertices) / n
            px, py = pt((cx, cy)).split(",")
            out.append(f'<text x="{px}" y="{py}"><title>{escape(C.key.decode("ascii"))}</title>{k}</text>\n')
        out.append("</g>\n")
    out.append("</svg>\n")
    return "".join(out)


def _render_strip(T, *, size, margin, origin, labels, stroke) -> str:
    lo, hi = (float(v) for v in T.window.bbox)
    scale = (size - 2 * margin) / ((hi - lo) or 1.0)
    height = 2 * margin + 24
    mid = margin + 12

    def x(v):
        return _fmt(margin + (float(v) - lo) * scale)

    out = [_HEADER,
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{height}" '
           f'viewBox="0 0 {size} {height}">\n',
           f'<g stroke="black" stroke-width="{_fmt(stroke)}">\n',
           f'<line class="window" x1="{x(lo)}" y1="{mid}" x2="{x(hi)}" y2="{mid}"/>\n']
    ends = sorted({C.vertices[0][0] for C in T.cells} | {C.vertices[1][0] for C in T.cells})
    for e in ends:
        out.append(f'<line class="tick" x1="{x(e)}" y1="{mid - 8}" x2="{x(e)}" y2="{mid + 8}"/>\n')
    out.append("</g>\n")
    for k, C in enumerate(T.cells, start=1):
        a, b = C.vertices[0][0], C.vertices[1][0]
        out.append(f'<line class="cell" data-index="{k}" x1="{x(a)}" y1="{mid}" x2="{x(b)}" y2="{mid}" '
                   f'stroke="none"/>\n')
    if origin:
        out.append(f'<circle class="origin" cx="{x(0)}" cy="{mid}" r="3" fill="red"/>\n')
    if labels:
        out.append('<g font-family="monospace" font-size="8" text-anchor="middle">\n')
        for k, C in enumerate(T.cells, start=1):
            c = (float(C.vertices[0][0]) + float(C.vertices[1][0])) / 2
            out.append(f'<text x="{x(c)}" y="{mid - 10}">{k}</text>\n')
        out.append("</g>\n")
    out.append("</svg>\n")
    return "".join(out)
