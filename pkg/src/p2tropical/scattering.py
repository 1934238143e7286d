"""Rank-2 scattering diagrams D(s) and their order-by-order completion.

Crossing convention.  A counterclockwise loop crosses a ray of direction
``d`` with tangent ``gamma'`` and uses the primitive normal ``n`` of ``d``
with ``<n, gamma'> > 0``; the wall-crossing is ``z^m -> z^m f^<n, m>``.
With this choice the rays produced by completion point along their
exponents, so the diagram lives in the first quadrant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from .lattice import dot, primitive
from .series import TruncatedSeries


class UnsupportedS(ValueError):
    pass


class LoopThroughBase(ValueError):
    pass


@dataclass(frozen=True)
class Wall:
    direction: tuple
    function: TruncatedSeries = field(compare=False)
    line: bool = False
    base: tuple = (0, 0)

    def halves(self):
        """The rays making up the wall: itself, plus its opposite for a line."""
        yield self.direction
        if self.line:
            yield (-self.direction[0], -self.direction[1])

    def exponent(self):
        """Primitive exponent direction of the wall function."""
        for (k, m), _ in sorted(self.function.terms.items()):
            if k > 0:
                return primitive(m)[1]
        return self.direction

    def to_json(self):
        return {
            "dir": list(self.direction),
            "line": self.line,
            "coeffs": [
                [k, list(m), c.numerator, c.denominator]
                for (k, m), c in sorted(self.function.terms.items())
                if k > 0
            ],
        }


@dataclass(frozen=True)
class ScatteringDiagram:
    s: int
    walls: tuple
    order: int
    consistent: bool = False

    def ray_directions(self):
        return sorted({w.direction for w in self.walls if not w.line}, key=_angle)

    def wall(self, direction):
        for w in self.walls:
            if w.direction == tuple(direction) and not w.line:
                return w
        return None

    def to_json(self):
        return {
            "s": self.s,
            "order": self.order,
            "walls": [w.to_json() for w in sorted(self.walls, key=lambda w: _angle(w.direction))],
        }


def _angle(d):
    return math.atan2(d[1], d[0]) % (2 * math.pi)


def _angle_key(d):
    """Exact angular order key on nonzero integer vectors: (half, cross-ratio)."""
    x, y = d
    if y > 0 or (y == 0 and x > 0):
        return (0, Fraction(-x, abs(x) + abs(y)))
    return (1, Fraction(x, abs(x) + abs(y)))


def initial_diagram(s: int, order: int = 1) -> ScatteringDiagram:
    """The two lines with functions ``1 + t x^s`` and ``1 + t y^s``."""
    if s < 1:
        raise UnsupportedS("s must be positive")
    fx = TruncatedSeries({(0, (0, 0)): 1, (1, (s, 0)): 1}, order)
    fy = TruncatedSeries({(0, (0, 0)): 1, (1, (0, s)): 1}, order)
    return ScatteringDiagram(s, (Wall((1, 0), fx, True), Wall((0, 1), fy, True)), order)


def crossing_normal(direction, ccw: bool = True):
    """Primitive normal to ``direction`` positive on the tangent of a counterclockwise loop."""
    _, d = primitive(direction)
    n = (-d[1], d[0])
    return n if ccw else (-n[0], -n[1])


class _PowerCache:
    def __init__(self, f: TruncatedSeries):
        self.f = f
        self.cache = {0: TruncatedSeries.one(f.order), 1: f}

    def __call__(self, e: int) -> TruncatedSeries:
        if e not in self.cache:
            self.cache[e] = self.f ** e
        return self.cache[e]


def cross_wall(wall_function: TruncatedSeries, n, g: TruncatedSeries, powers=None) -> TruncatedSeries:
    """Apply ``z^m -> z^m f^<n, m>`` termwise to ``g``."""
    powers = powers or _PowerCache(wall_function)
    out = TruncatedSeries(order=min(g.order, wall_function.order))
    for (k, m), c in g.terms.items():
        e = dot(n, m)
        if e == 0:
            out = out + TruncatedSeries({(k, m): c}, out.order)
        else:
            out = out + powers(e).shift(m, k) * c
    return out


def crossing_sequence(D: ScatteringDiagram):
    """``(direction, wall)`` pairs met by a counterclockwise loop starting just below angle 0."""
    halves = [(d, w) for w in D.walls for d in w.halves()]
    for w in D.walls:
        if w.base != (0, 0):
            raise LoopThroughBase("walls must pass through the loop centre")
    return sorted(halves, key=lambda dw: _angle_key(dw[0]))


def path_ordered_product(D: ScatteringDiagram, order: int | None = None):
    """Images of ``x`` and ``y`` under the composite of all crossings of a loop around 0."""
    K = D.order if order is None else order
    X = TruncatedSeries.monomial((1, 0), order=K)
    Y = TruncatedSeries.monomial((0, 1), order=K)
    cache = {}
    for d, w in crossing_sequence(D):
        f = w.function.truncate(K)
        pc = cache.setdefault(id(w), _PowerCache(f))
        n = crossing_normal(d)
        X = cross_wall(f, n, X, pc)
        Y = cross_wall(f, n, Y, pc)
    return X, Y


def defect(D: ScatteringDiagram, order: int | None = None):
    """``theta(x)/x - 1`` and ``theta(y)/y - 1`` for the loop product."""
    X, Y = path_ordered_product(D, order)
    one = TruncatedSeries.one(X.order)
    return X.shift((-1, 0)) - one, Y.shift((0, -1)) - one


def is_consistent(D: ScatteringDiagram, order: int | None = None) -> bool:
    a, b = defect(D, order)
    return not a.terms and not b.terms


def complete_to_order(D: ScatteringDiagram, K: int) -> ScatteringDiagram:
    """Add rays through the origin until the loop product is the identity mod ``t^(K+1)``.

    At order ``k`` the defect is central modulo ``t^(k+1)``: each of its
    monomials ``z^m`` must come with a log-derivation vector proportional to
    the normal of ``m``.  A ray along ``m`` carrying ``1 + c t^k z^m``
    contributes ``c * n`` there, so ``c`` is read off directly.
    """
    walls = {}
    lines = []
    for w in D.walls:
        f = TruncatedSeries(w.function.terms, K)
        if w.line:
            lines.append(Wall(w.direction, f, True, w.base))
        else:
            walls[w.direction] = f
    for k in range(1, K + 1):
        cur = ScatteringDiagram(D.s, tuple(lines) + tuple(Wall(d, f) for d, f in walls.items()), k)
        a, b = defect(cur, k)
        da, db = a.degree_part(k), b.degree_part(k)
        if any(kk < k for kk, _ in list(a.terms) + list(b.terms)):
            raise ArithmeticError(f"diagram inconsistent below order {k}")
        for m in sorted(set(da) | set(db), key=_angle_key):
            va, vb = da.get(m, 0), db.get(m, 0)
            if va * m[0] + vb * m[1] != 0:
                raise ArithmeticError(f"defect at {m} is not a log-derivation")
            d = primitive(m)[1]
            n = crossing_normal(d)
            c = -(va / n[0]) if n[0] else -(vb / n[1])
            f = walls.get(d, TruncatedSeries.one(K))
            walls[d] = f + TruncatedSeries({(k, m): c}, K)
    rays = tuple(Wall(d, walls[d]) for d in sorted(walls, key=_angle_key))
    out = ScatteringDiagram(D.s, tuple(lines) + rays, K, consistent=True)
    return out


def discrete_rays(s: int, jmax: int) -> dict:
    """``{1: [v^1_1..v^1_jmax], 2: [v^2_1..]}`` from ``v_{j+1} = s v_j - v_{j-1}``."""
    if s < 3:
        raise UnsupportedS("the discrete ray recursion needs s >= 3")
    out = {}
    for i, (v0, v1) in ((1, ((-1, 0), (0, 1))), (2, ((0, -1), (1, 0)))):
        seq = []
        for _ in range(jmax):
            seq.append(v1)
            v0, v1 = v1, (s * v1[0] - v0[0], s * v1[1] - v0[1])
        out[i] = seq
    return out


BELOW, INSIDE, ABOVE = "below", "inside", "above"


def badlands_test(s: int, direction) -> str:
    """Place the slope of a first-quadrant direction against the roots of ``m^2 - s m + 1``."""
    x, y = direction
    if x < 0 or y < 0 or (x, y) == (0, 0):
        raise ValueError("direction must be a nonzero vector in the closed first quadrant")
    if y * y - s * x * y + x * x <= 0:
        return INSIDE
    return BELOW if 2 * y < s * x else ABOVE


def normalized_function(w: Wall, s: int) -> TruncatedSeries:
    """The wall function for normals primitive in the exponent lattice ``s Z^2``.

    Crossing with ``f`` and a ``Z^2``-primitive normal ``n`` equals crossing
    with ``f**s`` and the normal ``n / s``, which is primitive in the dual of
    ``s Z^2``; in that normalisation the initial lines read ``(1 + t x^s)^s``.
    """
    return w.function ** s


def ray_order(w: Wall) -> int | None:
    return w.function.min_positive_degree()


def compare_with_recursion(D: ScatteringDiagram) -> dict:
    """Outside-cone rays of ``D`` against the discrete rays visible at order ``D.order``."""
    if D.s < 3:
        raise UnsupportedS("no badlands cone for s < 3")
    dirs = {w.direction for w in D.walls if w.line} | {w.direction for w in D.walls}
    outside = {d for d in dirs if d[0] >= 0 and d[1] >= 0 and badlands_test(D.s, d) != INSIDE}
    expected = set()
    for seq in discrete_rays(D.s, D.order + 2).values():
        for v in seq:
            # a ray along v carries t-degree |v|_1 on its first monomial z^(s v)
            if v[0] + v[1] <= D.order:
                expected.add(v)
    inside = sorted(d for d in dirs if d[0] > 0 and d[1] > 0 and badlands_test(D.s, d) == INSIDE)
    return {
        "outside": sorted(outside),
        "expected": sorted(expected),
        "match": outside == expected,
        "inside": inside,
    }
