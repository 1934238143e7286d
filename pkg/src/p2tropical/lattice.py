"""Exact 2-d lattice helpers: vectors, wedges, affine maps, cone normal forms.

Lattice vectors are plain ``(int, int)`` tuples and rational points are
``(Fraction, Fraction)`` tuples.  Everything here is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Tuple

Vec = Tuple[int, int]
Point = Tuple[Fraction, Fraction]


class ZeroVector(ValueError):
    pass


class SingularLinearPart(ValueError):
    pass


class DegenerateCone(ValueError):
    pass


def frac(q) -> Fraction:
    return q if isinstance(q, Fraction) else Fraction(q)


def point(x, y) -> Point:
    return (frac(x), frac(y))


def primitive(v: Vec) -> tuple[int, Vec]:
    """Split ``v`` as ``g * p`` with ``g > 0`` and ``p`` primitive."""
    a, b = v
    g = gcd(a, b)
    if g == 0:
        raise ZeroVector("the zero vector has no primitive part")
    return g, (a // g, b // g)


def wedge(u, v):
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def add(u, v):
    return (u[0] + v[0], u[1] + v[1])


def sub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def scale(c, v):
    return (c * v[0], c * v[1])


def neg(v):
    return (-v[0], -v[1])


def lattice_length(p: Vec, q: Vec) -> int:
    """Number of lattice points on the segment [p, q] minus one."""
    return gcd(q[0] - p[0], q[1] - p[1])


@dataclass(frozen=True)
class AffineMap:
    """``x -> A x + b`` with ``A`` a rational 2x2 matrix of nonzero determinant."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    tx: Fraction = Fraction(0)
    ty: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "tx", "ty"):
            object.__setattr__(self, name, frac(getattr(self, name)))
        if self.det == 0:
            raise SingularLinearPart("affine map with singular linear part")

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def scale_translate(cls, lam, u) -> "AffineMap":
        """The map ``x -> lam * x + u``."""
        return cls(lam, 0, 0, lam, u[0], u[1])

    @classmethod
    def linear(cls, rows) -> "AffineMap":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> Fraction:
        return self.a + self.d

    @property
    def matrix(self):
        return ((self.a, self.b), (self.c, self.d))

    @property
    def translation(self) -> Point:
        return (self.tx, self.ty)

    def is_scale_translate(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d and self.a > 0

    def __call__(self, p) -> Point:
        x, y = p
        return (self.a * x + self.b * y + self.tx, self.c * x + self.d * y + self.ty)

    apply = __call__

    def apply_linear(self, v) -> Point:
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def __matmul__(self, other: "AffineMap") -> "AffineMap":
        """``(self @ other)(p) == self(other(p))``."""
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        tx, ty = self(other.translation)
        return AffineMap(a, b, c, d, tx, ty)

    def inverse(self) -> "AffineMap":
        det = self.det
        a, b, c, d = self.d / det, -self.b / det, -self.c / det, self.a / det
        tx = -(a * self.tx + b * self.ty)
        ty = -(c * self.tx + d * self.ty)
        return AffineMap(a, b, c, d, tx, ty)


def compose(a: AffineMap, b: AffineMap) -> AffineMap:
    return a @ b


def apply(a: AffineMap, p) -> Point:
    return a(p)


@dataclass(frozen=True, order=True)
class ConeNormalForm:
    """Cyclic quotient type ``1/r(1, c)`` of a 2-d cone, plus the width of its top edge."""

    r: int
    c: int
    width: int


def _bezout(a: int, b: int) -> tuple[int, int, int]:
    # returns (g, s, t) with s*a + t*b == g >= 0
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def cone_normal_form(r1: Vec, r2: Vec) -> ConeNormalForm:
    """Normal form of the cone spanned by primitive ``r1`` and ``r2``.

    An integral unimodular change of basis sends ``r1`` to ``(1, 0)`` and
    ``r2`` to ``(c, r)`` with ``r > 0``; the residue of ``c`` modulo ``r``
    is only defined up to swapping the two rays, which replaces ``c`` by its
    inverse mod ``r``, so the smaller of the two is kept.
    """
    if wedge(r1, r2) == 0:
        raise DegenerateCone("cone rays are parallel")
    _, p = primitive(r1)
    _, q = primitive(r2)
    g, s, t = _bezout(p[0], p[1])
    # rows (s, t) and (-p1, p0) form a unimodular matrix sending p to (1, 0)
    a = s * q[0] + t * q[1]
    b = -p[1] * q[0] + p[0] * q[1]
    r = abs(b)
    width = gcd(r2[0] - r1[0], r2[1] - r1[1])
    if r == 1:
        return ConeNormalForm(1, 0, width)
    c = a % r
    cinv = pow(c, -1, r)
    return ConeNormalForm(r, min(c, cinv), width)
