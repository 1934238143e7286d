"""Convex lattice polygons: hulls, edges, exact point-in-polygon tests."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lattice import primitive, wedge, sub


def convex_hull(points) -> tuple:
    """Counterclockwise hull vertices (no collinear points), starting at the lexicographic minimum."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) <= 2:
        return tuple(pts)

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and wedge(sub(out[-1], out[-2]), sub(p, out[-2])) <= 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = half(pts), half(reversed(pts))
    return tuple(lower[:-1] + upper[:-1])


def rotate_canonical(vertices) -> tuple:
    k = min(range(len(vertices)), key=lambda i: vertices[i])
    return tuple(vertices[k:]) + tuple(vertices[:k])


def signed_area2(vertices):
    n = len(vertices)
    return sum(wedge(vertices[i], vertices[(i + 1) % n]) for i in range(n))


@dataclass(frozen=True)
class Polygon:
    """Convex polygon given by its counterclockwise vertex cycle (integer or rational)."""

    vertices: tuple

    def __post_init__(self):
        vs = tuple(tuple(v) for v in self.vertices)
        if len(vs) >= 3 and signed_area2(vs) < 0:
            vs = tuple(reversed(vs))
        object.__setattr__(self, "vertices", vs)

    @classmethod
    def hull(cls, points) -> "Polygon":
        return cls(convex_hull(points))

    def canonical(self) -> "Polygon":
        return Polygon(rotate_canonical(self.vertices))

    def __len__(self):
        return len(self.vertices)

    def edges(self):
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def same_as(self, other: "Polygon") -> bool:
        return self.vertex_set() == other.vertex_set()

    def contains(self, p, strict=False) -> bool:
        for a, b in self.edges():
            side = wedge(sub(b, a), sub(p, a))
            if side < 0 or (strict and side == 0):
                return False
        return True

    def is_convex(self) -> bool:
        vs, n = self.vertices, len(self.vertices)
        return n >= 3 and all(
            wedge(sub(vs[(i + 1) % n], vs[i]), sub(vs[(i + 2) % n], vs[(i + 1) % n])) > 0
            for i in range(n)
        )

    def is_fano(self) -> bool:
        """Primitive integer vertices and the origin strictly inside."""
        if not self.is_convex():
            return False
        for v in self.vertices:
            if any(not isinstance(c, int) for c in v) or primitive(v)[0] != 1:
                return False
        return self.contains((0, 0), strict=True)

    def to_json(self):
        return [[_num(c) for c in v] for v in self.vertices]


def _num(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else [c.numerator, c.denominator]
    return c
