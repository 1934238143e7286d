"""Laurent polynomials, algebraic mutation, chamber superpotentials and periods.

A Laurent polynomial is a map from exponents ``(a, b)`` to nonzero
coefficients.  Algebraic mutation with weight ``w`` and factor ``1 + z^u``
substitutes ``z^n -> (1 + z^u)^<w, n> z^n``; when the exponent is negative
the result is divided out exactly, and a remainder means the data did not
define a mutation of this polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .lattice import dot, primitive, wedge, sub
from .polygon import Polygon, convex_hull


class NotLaurent(ArithmeticError):
    pass


class NonGenericBasepoint(ValueError):
    pass


def _clean(c):
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


class LaurentPolynomial:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for m, c in (terms or {}).items():
            if c:
                self.terms[tuple(m)] = _clean(c)

    @classmethod
    def monomial(cls, m, c=1) -> "LaurentPolynomial":
        return cls({tuple(m): c})

    @classmethod
    def one(cls) -> "LaurentPolynomial":
        return cls({(0, 0): 1})

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return LaurentPolynomial(out)

    def __neg__(self):
        return LaurentPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return LaurentPolynomial({m: c * other for m, c in self.terms.items()})
        acc = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                acc[key] = acc.get(key, 0) + c1 * c2
        return LaurentPolynomial(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise NotLaurent("negative powers of a Laurent polynomial")
        out, base = LaurentPolynomial.one(), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, m):
        return LaurentPolynomial({(a + m[0], b + m[1]): c for (a, b), c in self.terms.items()})

    def constant_term(self):
        return self.terms.get((0, 0), 0)

    def support(self):
        return set(self.terms)

    def newton_polygon(self) -> Polygon:
        return Polygon(convex_hull(self.terms))

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.terms.values())

    def __repr__(self):
        return f"LaurentPolynomial({self.pretty()})"

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self.terms.items()):
            mono = "".join(
                f"{v}^{e}" if e != 1 else v for v, e in (("x", a), ("y", b)) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)

    def to_json(self):
        return [
            [list(m), c] if isinstance(c, int) else [list(m), [c.numerator, c.denominator]]
            for m, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, data) -> "LaurentPolynomial":
        terms = {}
        for m, c in data:
            terms[tuple(m)] = Fraction(*c) if isinstance(c, list) else c
        return cls(terms)


W0 = LaurentPolynomial({(1, 0): 1, (0, 1): 1, (-1, -1): 1})


def newton_polygon(f: LaurentPolynomial) -> Polygon:
    return f.newton_polygon()


def binomial_power(u, e: int) -> LaurentPolynomial:
    """``(1 + z^u)^e`` for ``e >= 0``."""
    return LaurentPolynomial({(k * u[0], k * u[1]): comb(e, k) for k in range(e + 1)})


def divide_binomial(g: LaurentPolynomial, u, times: int = 1) -> LaurentPolynomial:
    """Exact division by ``(1 + z^u)^times``; raises ``NotLaurent`` on a remainder."""
    for _ in range(times):
        lines = {}
        for m, c in g.terms.items():
            lines.setdefault(wedge(u, m), {})[m] = c
        out = {}
        for rest in lines.values():
            # synthetic division along the line, from its low end
            m = min(rest, key=lambda k: dot(k, u))
            top = max(dot(k, u) for k in rest)
            carry = 0
            while dot(m, u) < top:
                c = rest.get(m, 0) - carry
                if c:
                    out[m] = c
                carry = c
                m = (m[0] + u[0], m[1] + u[1])
            if rest.get(m, 0) != carry:
                raise NotLaurent(f"division by 1 + z^{tuple(u)} leaves a remainder")
        g = LaurentPolynomial(out)
    return g


def algebraic_mutate(f: LaurentPolynomial, w, u) -> LaurentPolynomial:
    """``z^n -> (1 + z^u)^<w, n> z^n``, divided out exactly."""
    if dot(w, u) != 0:
        raise ValueError("the weight must vanish on the factor direction")
    if primitive(u)[0] != 1:
        raise ValueError("the factor direction must be primitive")
    low = min(0, min((dot(w, n) for n in f.terms), default=0))
    acc = LaurentPolynomial()
    for n, c in f.terms.items():
        acc = acc + binomial_power(u, dot(w, n) - low).shift(n) * c
    if low:
        acc = divide_binomial(acc, u, -low)
    return acc


def transport(f: LaurentPolynomial, walls) -> LaurentPolynomial:
    """Cross a sequence of binomial walls ``(w, u, side)``; ``side = -1`` crosses backwards."""
    for wall in walls:
        w, u = wall[0], wall[1]
        side = wall[2] if len(wall) > 2 else 1
        f = algebraic_mutate(f, (side * w[0], side * w[1]), u)
    return f


# -- chamber potentials -------------------------------------------------------------


def path_walls(fu) -> list:
    """Mutation data ``(w, u)`` of the walls crossed from P0 to the chamber ``fu``."""
    from .chambers import root_chamber, child
    from .fano import mutate

    node = root_chamber(fu.region)
    out = []
    for i in fu.path:
        M = mutate(node.model, i, 3 - i)
        out.append((M.w, M.u, 1, node.edge(i)))
        node = child(node, i)
    return out


def chamber_potential(fu) -> LaurentPolynomial:
    """Transport of ``x + y + 1/(xy)`` from P0 along the tree path of ``fu``."""
    return transport(W0, [(w, u) for w, u, _, _ in path_walls(fu)])


def edge_coefficients_binomial(f: LaurentPolynomial) -> bool:
    """Coefficients along each Newton edge of lattice length ``l`` are ``binom(l, k)`` times a unit pattern.

    Checks the rigid maximally mutable signature: vertex coefficients 1 and
    the coefficients on an edge of lattice length ``r * h`` (``r`` the local
    index, here read as the full length) follow ``binom(l, k)``.
    """
    P = f.newton_polygon()
    for p, q in P.edges():
        g, d = primitive(sub(q, p))
        coeffs = [f.terms.get((p[0] + k * d[0], p[1] + k * d[1]), 0) for k in range(g + 1)]
        if coeffs != [comb(g, k) for k in range(g + 1)]:
            return False
    return True


# -- periods ------------------------------------------------------------------------


def period(f: LaurentPolynomial, M: int) -> list:
    """``[c_0, ..., c_M]`` with ``c_m`` the constant term of ``f^m``.

    Powers are pruned to exponents that the remaining factors can still
    cancel: after ``k`` factors only ``e`` with ``-e`` in ``(M - k) Newton(f)``
    matter, and dropping the rest changes no constant term up to ``M``.
    """
    if M < 0:
        raise ValueError("M must be nonnegative")
    P = f.newton_polygon()
    verts = P.vertices
    ineqs = []
    if len(verts) >= 3:
        for p, q in P.edges():
            d = sub(q, p)
            n = (-d[1], d[0])  # inner normal for a counterclockwise polygon
            ineqs.append((n, dot(n, p)))

    def keep(e, r):
        return all(dot(n, (-e[0], -e[1])) >= r * h for n, h in ineqs)

    out = [1]
    cur = {(0, 0): 1}
    items = list(f.terms.items())
    for k in range(1, M + 1):
        nxt = {}
        for (a, b), c in cur.items():
            for (x, y), d in items:
                key = (a + x, b + y)
                nxt[key] = nxt.get(key, 0) + c * d
        r = M - k
        cur = {e: c for e, c in nxt.items() if c and keep(e, r)}
        out.append(_clean(cur.get((0, 0), 0)))
    return out


def quantum_period_P2(M: int) -> list:
    return [
        factorial(m) // (factorial(m // 3) ** 3) if m % 3 == 0 else 0
        for m in range(M + 1)
    ]


def is_mirror_dual(f: LaurentPolynomial, M: int) -> bool:
    return period(f, M) == quantum_period_P2(M)


# -- broken lines -------------------------------------------------------------------
#
# Lines start as the three unbent central lines x, y, 1/(xy) and follow the
# chamber path of fu, crossing each wall E with function 1 + z^u.  A line
# carrying c z^m crosses with factor (1 + z^u)^<w, m> and may bend there by
# choosing one term c_k z^{k u}; a negative exponent gives a geometric series.
#
# Orders.  The t-order of z^m at the endpoint is a normalized height
# (<g, m> - min over the central monomials) / delta, where g is a grading
# with <g, u> > 0 on every crossed wall and delta = min <g, u>.  A bend of
# multiplicity k therefore raises the order by at least k, so K bounds the
# bend count as well.  Heights only grow along a line, so pruning a partial
# line once its order exceeds K drops exactly the terms of order > K in the
# final sum; in particular the geometric tails cancel between lines below K
# and the sum agrees with the transported potential on every term of order
# at most K.  The grading is chosen from the wall directions and the model
# polygon alone: it minimizes the largest vertex order.


@dataclass(frozen=True)
class Segment:
    chamber: tuple          # tree path of the chamber the segment ends in
    direction: tuple        # travel direction, equal to the exponent
    coefficient: object
    exponent: tuple


@dataclass(frozen=True)
class Bend:
    wall: int               # index of the crossed wall along the path
    edge: tuple             # endpoints of that wall in chart coordinates
    power: int              # exponent <w, m> of the wall function
    k: int                  # chosen term c_k z^{k u}
    term: object            # c_k


@dataclass(frozen=True)
class BrokenLine:
    segments: tuple
    bends: tuple
    order: Fraction

    @property
    def coefficient(self):
        return self.segments[-1].coefficient

    @property
    def exponent(self):
        return self.segments[-1].exponent

    def to_json(self):
        def q(c):
            c = Fraction(c)
            return [c.numerator, c.denominator]

        return {
            "segments": [
                {"chamber": list(s.chamber), "direction": list(s.direction),
                 "coefficient": q(s.coefficient), "exponent": list(s.exponent)}
                for s in self.segments
            ],
            "bends": [
                {"wall": b.wall, "edge": [[q(x) for x in p] for p in b.edge],
                 "power": b.power, "k": b.k, "term": q(b.term)}
                for b in self.bends
            ],
            "order": q(self.order),
        }


def _gen_binom(e: int, k: int) -> int:
    """Coefficient of ``z^k`` in ``(1 + z)^e`` for any integer ``e``."""
    if e >= 0:
        return comb(e, k) if k <= e else 0
    return (-1) ** k * comb(k - e - 1, k)


def grading(us, polygon_vertices, box: int = 12):
    """Integer grading ``g`` with ``<g, u> > 0`` on all walls, minimizing the largest vertex order."""
    if not us:
        return (0, 0), Fraction(1)
    best = None
    for a in range(-box, box + 1):
        for b in range(-box, box + 1):
            g = (a, b)
            pair = [dot(g, u) for u in us]
            if min(pair) <= 0 or primitive(g)[0] != 1:
                continue
            delta = min(pair)
            base = min(dot(g, m) for m in W0.terms)
            top = max(Fraction(dot(g, v)) for v in polygon_vertices)
            key = ((top - base) / delta, abs(a) + abs(b), g)
            if best is None or key < best[0]:
                best = (key, g, Fraction(delta))
    if best is None:
        raise ValueError("wall directions admit no positive grading")
    return best[1], best[2]


def broken_lines(fu, p, K: int):
    """Broken lines ending at ``p`` in the chamber ``fu`` up to order ``K``.

    Returns ``(lines, W)`` where ``W`` sums the end monomials.
    """
    from .chambers import in_triangle

    if not in_triangle(fu.triangle, p, strict=True):
        raise NonGenericBasepoint(f"{p} is not an interior point of chamber {fu.path}")
    walls = path_walls(fu)
    g, delta = grading([u for _, u, _, _ in walls], fu.model.v)
    base = min(dot(g, m) for m in W0.terms)

    def order(m):
        return Fraction(dot(g, m) - base) / delta

    lines = []
    for m in sorted(W0.terms):
        if order(m) <= K:
            lines.append(BrokenLine((Segment((), m, 1, m),), (), order(m)))
    for j, (w, u, _, edge) in enumerate(walls):
        here = fu.path[: j + 1]
        nxt = []
        for line in lines:
            c, m = line.coefficient, line.exponent
            e = dot(w, m)
            k = 0
            while True:
                coef = _gen_binom(e, k)
                if e >= 0 and k > e:
                    break
                m2 = (m[0] + k * u[0], m[1] + k * u[1])
                o = order(m2)
                if o > K:
                    break
                seg = Segment(here, m2, c * coef, m2)
                bends = line.bends + ((Bend(j, edge, e, k, coef),) if k else ())
                nxt.append(BrokenLine(line.segments + (seg,), bends, o))
                k += 1
        lines = nxt
    acc = {}
    for line in lines:
        acc[line.exponent] = acc.get(line.exponent, 0) + line.coefficient
    return lines, LaurentPolynomial(acc)


def stabilization_order(fu) -> Fraction:
    """Largest order of a term of the chamber potential under the broken-line grading."""
    walls = path_walls(fu)
    g, delta = grading([u for _, u, _, _ in walls], fu.model.v)
    base = min(dot(g, m) for m in W0.terms)
    return max(Fraction(dot(g, m) - base) / delta for m in chamber_potential(fu).terms)
