"""Minimal SVG emitters for chamber pictures, scattering diagrams and broken lines.

Exact coordinates are rendered as decimals with 6 significant digits; this
is the only place the package turns rationals into floats.  The y axis is
flipped so pictures read like the usual plane.
"""
from __future__ import annotations

import datetime
from math import hypot
from xml.sax.saxutils import escape

PALETTE = ("#f3f3f3", "#dbe9f6", "#f6e3d4", "#e2f0d9", "#efe0f5", "#fbf3cf")


def _n(x) -> str:
    return f"{float(x):.6g}"


class Canvas:
    def __init__(self, pad: float = 0.4):
        self.items = []
        self.points = []
        self.pad = pad

    def _track(self, pts):
        self.points.extend((float(x), float(y)) for x, y in pts)

    def polygon(self, pts, fill="#eeeeee", stroke="#333333", width=0.01, cls="chamber", title=None):
        self._track(pts)
        body = " ".join(f"{_n(x)},{_n(-y)}" for x, y in pts)
        tip = f"<title>{escape(title)}</title>" if title else ""
        self.items.append(
            f'<polygon class="{cls}" points="{body}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{_n(width)}">{tip}</polygon>'
        )

    def path(self, pts, stroke="#b22222", width=0.012, cls="ray", dash=None, title=None):
        self._track(pts)
        d = "M " + " L ".join(f"{_n(x)} {_n(-y)}" for x, y in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        tip = f"<title>{escape(title)}</title>" if title else ""
        self.items.append(
            f'<path class="{cls}" d="{d}" fill="none" stroke="{stroke}" stroke-width="{_n(width)}"{extra}>{tip}</path>'
        )

    def cross(self, p, size=0.06, stroke="#000000"):
        x, y = float(p[0]), float(p[1])
        self._track([p])
        self.items.append(
            f'<path class="singular" d="M {_n(x - size)} {_n(-y - size)} L {_n(x + size)} {_n(-y + size)} '
            f'M {_n(x - size)} {_n(-y + size)} L {_n(x + size)} {_n(-y - size)}" stroke="{stroke}" stroke-width="0.015"/>'
        )

    def dot(self, p, r=0.03, fill="#000000"):
        self._track([p])
        self.items.append(f'<circle class="point" cx="{_n(p[0])}" cy="{_n(-p[1])}" r="{_n(r)}" fill="{fill}"/>')

    def text(self, p, s, size=0.12):
        self._track([p])
        self.items.append(
            f'<text x="{_n(p[0])}" y="{_n(-p[1])}" font-size="{_n(size)}" font-family="sans-serif">{escape(s)}</text>'
        )

    def render(self, reproducible: bool = True) -> str:
        if self.points:
            xs = [p[0] for p in self.points]
            ys = [-p[1] for p in self.points]
            x0, y0 = min(xs) - self.pad, min(ys) - self.pad
            w, h = max(xs) - min(xs) + 2 * self.pad, max(ys) - min(ys) + 2 * self.pad
        else:
            x0 = y0 = -1.0
            w = h = 2.0
        head = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_n(x0)} {_n(y0)} {_n(w)} {_n(h)}" '
            f'width="{int(400 * w / max(w, h))}" height="{int(400 * h / max(w, h))}">',
        ]
        if not reproducible:
            head.append(f"<!-- generated {datetime.datetime.now(datetime.timezone.utc).isoformat()} -->")
        return "\n".join(head + self.items + ["</svg>", ""])


def _far(base, direction, length):
    n = hypot(float(direction[0]), float(direction[1]))
    return (float(base[0]) + length * float(direction[0]) / n, float(base[1]) + length * float(direction[1]) / n)


def chambers_svg(chambers, rays=(), singular=(), cones=(), reproducible: bool = True, cone_length: float = 0.6) -> str:
    """One polygon per chamber and one path per ray; singular points drawn as crosses."""
    c = Canvas()
    for C in cones:
        dm, dp = C.frame.boundary_directions()
        a = C.apex
        c.polygon(
            [a, _far(a, (float(dm[0]), float(dm[1])), cone_length), _far(a, (float(dp[0]), float(dp[1])), cone_length)],
            fill="#d9d9d9", stroke="none", width=0, cls="cone",
        )
    for fu in chambers:
        c.polygon(fu.triangle, fill=PALETTE[fu.depth % len(PALETTE)], title=f"path {list(fu.path)} triple {list(fu.model.triple())}")
    for r in rays:
        c.path([r.base, r.end], title=f"direction {list(r.direction)}")
    for p in singular:
        c.cross(p)
    return c.render(reproducible)


def scattering_svg(D, reproducible: bool = True) -> str:
    """Rays of a scattering diagram drawn from the origin, longer for lower order."""
    c = Canvas()
    for w in D.walls:
        k = w.function.min_positive_degree() or 1
        length = 2.0 / k
        for d in w.halves():
            c.path([(0, 0), _far((0, 0), d, length)], width=0.02 if w.line else 0.012,
                   title=f"dir {list(d)} order {k}")
    c.dot((0, 0))
    return c.render(reproducible)


def broken_lines_svg(fu, chambers, lines, p, reproducible: bool = True, length: float = 1.5) -> str:
    """The chambers, the walls crossed on the way to ``fu`` and the final segments into ``p``.

    Bends are combinatorial in this model, so each line is drawn as its last
    segment arriving at ``p`` along its travel direction, labelled by its
    end monomial.
    """
    c = Canvas()
    for g in chambers:
        c.polygon(g.triangle, fill="#f7f7f7" if g.path != fu.path else "#dbe9f6")
    seen = set()
    for line in lines:
        for b in line.bends:
            if b.wall not in seen:
                seen.add(b.wall)
                c.path(list(b.edge), stroke="#1f4e9c", width=0.02, cls="wall")
    ends = {}
    for line in lines:
        ends[line.exponent] = ends.get(line.exponent, 0) + line.coefficient
    for m, coef in sorted(ends.items()):
        if not coef:
            continue
        start = _far(p, (-m[0], -m[1]), length)
        c.path([start, p], stroke="#b22222", cls="broken-line", title=f"{coef} z^{list(m)}")
        c.text(start, f"{coef}·z^({m[0]},{m[1]})", size=0.08)
    c.dot(p)
    return c.render(reproducible)
