"""Fano polygons, edge data, singularity content and combinatorial mutation.

Labelled triangles follow the Markov convention: vertex ``v_i`` carries
weight ``a_i**2`` and the edge ``E_i`` is the edge *not* containing ``v_i``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import NamedTuple

from . import markov
from .lattice import (cone_normal_form, dot, lattice_length,
                      primitive, sub, wedge)
from .polygon import Polygon

MAX_DEPTH = 24


class NotATriangle(ValueError):
    pass


class NotMutable(ValueError):
    pass


class SharedEdge(ValueError):
    pass


class DepthExceeded(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    pass


class EdgeData(NamedTuple):
    inner_normal: tuple
    local_index: int
    lattice_length: int


class SingularityContent(NamedTuple):
    n: int
    basket: tuple

    def __str__(self):
        return f"({self.n}, {{{', '.join(map(str, self.basket))}}})" if self.basket else f"({self.n},∅)"


def edge_normal(p, q) -> tuple:
    """Primitive inner normal of the edge ``p -> q`` of a counterclockwise polygon."""
    _, d = primitive(sub(q, p))
    return (-d[1], d[0])


def edge_data_of(p, q) -> EdgeData:
    w = edge_normal(p, q)
    return EdgeData(w, -dot(w, p), lattice_length(p, q))


def edge_data(P: Polygon, k: int) -> EdgeData:
    """Edge data of ``conv{P[k], P[k+1]}``."""
    p, q = P.edges()[k]
    return edge_data_of(p, q)


def find_edge(P: Polygon, a, b) -> int:
    for k, (p, q) in enumerate(P.edges()):
        if {p, q} == {tuple(a), tuple(b)}:
            return k
    raise ValueError(f"{a}, {b} is not an edge")


def triangle_weights(vs) -> tuple:
    """Coprime positive ``b`` with ``sum b_i v_i = 0`` for a triangle around the origin."""
    if len(vs) != 3:
        raise NotATriangle("weights are defined for triangles only")
    v1, v2, v3 = vs
    b = (wedge(v2, v3), wedge(v3, v1), wedge(v1, v2))
    if b[0] < 0:
        b = tuple(-x for x in b)
    if min(b) <= 0:
        raise NotATriangle("origin is not interior")
    g = gcd(*b)
    return tuple(x // g for x in b)


def weights(P) -> tuple:
    """Weights in vertex order (``v1, v2, v3`` for a labelled triangle)."""
    vs = P.v if isinstance(P, LabeledTriangle) else P.vertices
    return triangle_weights(vs)


def singularity_content(P: Polygon) -> SingularityContent:
    n, basket = 0, []
    for p, q in P.edges():
        w, r, ell = edge_data_of(p, q)
        m, rest = divmod(ell, r)
        n += m
        if rest:
            _, d = primitive(sub(q, p))
            end = (p[0] + rest * d[0], p[1] + rest * d[1])
            basket.append(cone_normal_form(primitive(p)[1], primitive(end)[1]))
    return SingularityContent(n, tuple(sorted(basket)))


# -- mutation -------------------------------------------------------------


def mutate_polygon(P: Polygon, w, u) -> Polygon:
    """Combinatorial mutation with weight ``w`` and factor ``conv{0, u}``.

    Each height slice ``{<w, x> = h}`` is a segment ``{p_h + t u : t in [lo, hi]}``
    and becomes ``[lo, hi + h]``; for ``h < 0`` this is Minkowski subtraction of
    ``|h|`` copies of the factor.  The slice endpoints are piecewise linear in
    ``h`` with breaks only at vertex heights, so those heights suffice.
    """
    if dot(w, u) != 0 or primitive(u)[0] != 1:
        raise NotMutable("factor must be a primitive vector orthogonal to w")
    # parametrise a slice by t with x = t*u + h*e where <w, e> = 1 (rational e)
    ww = dot(w, w)
    e = (Fraction(w[0], ww), Fraction(w[1], ww))
    uu = dot(u, u)

    def coords(x):
        return dot(w, x), Fraction(dot(u, x), uu)

    def point(h, t):
        x = t * u[0] + h * (e[0] - Fraction(dot(u, e)) / uu * u[0])
        y = t * u[1] + h * (e[1] - Fraction(dot(u, e)) / uu * u[1])
        return (x, y)

    heights = sorted({dot(w, v) for v in P.vertices})
    out = []
    for h in heights:
        ts = _slice(P, w, u, h, coords)
        lo, hi = ts
        hi = hi + h
        if hi < lo:
            raise NotMutable("factor does not fit in the negative slices")
        out.append(point(h, lo))
        out.append(point(h, hi))
    pts = [tuple(int(c) if c.denominator == 1 else c for c in p) for p in out]
    if any(not isinstance(c, int) for p in pts for c in p):
        raise NotMutable("mutation produced non-lattice vertices")
    return Polygon.hull(pts)


def _slice(P: Polygon, w, u, h, coords):
    ts = []
    for a, b in P.edges():
        ha, ta = coords(a)
        hb, tb = coords(b)
        if ha == h:
            ts.append(ta)
        if (ha - h) * (hb - h) < 0:
            ts.append(ta + (tb - ta) * Fraction(h - ha, hb - ha))
    return min(ts), max(ts)


@dataclass(frozen=True)
class LabeledTriangle:
    """A Fano triangle with vertices ``v = (v1, v2, v3)`` in label order."""

    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(tuple(p) for p in self.v))
        if len(self.v) != 3:
            raise NotATriangle("expected three vertices")

    @property
    def polygon(self) -> Polygon:
        return Polygon(self.v)

    def edge(self, i: int) -> tuple:
        """Endpoints of ``E_i`` (1-based), the edge opposite ``v_i``."""
        j, k = [m for m in (1, 2, 3) if m != i]
        return self.v[j - 1], self.v[k - 1]

    def edge_data(self, i: int) -> EdgeData:
        p, q = self.edge(i)
        P = self.polygon
        k = find_edge(P, p, q)
        return edge_data(P, k)

    def normals(self) -> tuple:
        return tuple(self.edge_data(i).inner_normal for i in (1, 2, 3))

    def weights(self) -> tuple:
        return triangle_weights(self.v)

    def triple(self) -> tuple:
        """Labelled triple ``(a1, a2, a3)`` with ``a_i**2`` the weight of ``v_i``."""
        out = []
        for b in self.weights():
            a = isqrt(b)
            if a * a != b:
                raise ValueError("weights are not squares: not a Markov triangle")
            out.append(a)
        return tuple(out)

    def to_json(self):
        return {
            "vertices": [list(p) for p in self.v],
            "labels": {"v1": 0, "v2": 1, "v3": 2},
            "weights": list(self.weights()),
        }


P0 = LabeledTriangle(((1, 0), (0, 1), (-1, -1)))


def p0_labeled(v3_index: int = 2) -> LabeledTriangle:
    """P0 labelled with ``v3`` at the given counterclockwise vertex of ``(1,0),(0,1),(-1,-1)``."""
    cyc = ((1, 0), (0, 1), (-1, -1))
    k = v3_index % 3
    return LabeledTriangle((cyc[(k + 1) % 3], cyc[(k + 2) % 3], cyc[k]))


class Mutation(NamedTuple):
    """Outcome of mutating a labelled triangle at ``E_i`` fixing ``E_j``."""

    triangle: LabeledTriangle
    v: tuple          # E_i ∩ E_j, kept
    v_prime: tuple    # other endpoint of E_j, kept
    y: tuple          # new vertex replacing the far endpoint of E_i
    w: tuple          # inner normal of E_i
    u: tuple          # factor direction


def mutate(T: LabeledTriangle, i: int, j: int) -> Mutation:
    """Mutate ``T`` at ``E_i`` keeping ``E_j``.

    With ``v = E_i ∩ E_j`` and ``v'`` the other end of ``E_j`` the result is
    ``conv{v, v', v' + <w, v'> u}`` where ``u`` is the primitive direction of
    ``E_i`` pointing away from ``v``.  Labels stay with positions: ``v_k = v``
    and ``v_i = v'`` keep their labels and the new vertex takes label ``j``.
    """
    if i == j:
        raise SharedEdge("mutating and fixed edge coincide")
    k = 6 - i - j
    w, r, ell = T.edge_data(i)
    if ell < r:
        raise NotMutable("edge shorter than its local index")
    v, vp, far = T.v[k - 1], T.v[i - 1], T.v[j - 1]
    _, u = primitive(sub(far, v))
    P = mutate_polygon(T.polygon, w, u)
    h = dot(w, vp)
    y = (vp[0] + h * u[0], vp[1] + h * u[1])
    if ell != r or P.vertex_set() != {v, vp, y}:
        raise NotMutable("mutation does not yield a triangle")
    new = [None, None, None]
    new[k - 1], new[i - 1], new[j - 1] = v, vp, y
    return Mutation(LabeledTriangle(tuple(new)), v, vp, y, w, u)


def mutate_edges(P: Polygon, e, e_fixed) -> Polygon:
    """Polygon-level mutation at edge index ``e`` keeping the adjacent edge ``e_fixed``."""
    edges = P.edges()
    if e == e_fixed:
        raise SharedEdge("mutating and fixed edge coincide")
    a, b = edges[e]
    shared = {a, b} & set(edges[e_fixed])
    if not shared:
        raise ValueError("edges are not adjacent")
    v = shared.pop()
    far = b if v == a else a
    w, r, ell = edge_data(P, e)
    if ell < r:
        raise NotMutable("edge shorter than its local index")
    return mutate_polygon(P, w, primitive(sub(far, v))[1])


def transform_normals(ws, i: int, fixed: int | None = None, eps: int | None = None, skew: int = 1):
    """Piecewise-linear transport of inner normals under mutation at index ``i``.

    ``w_i -> -w_i`` and ``w_k -> w_k + max(0, eps * skew * (w_i ^ w_k)) w_i``.
    The sign ``eps`` is chosen so that ``ws[fixed]`` is unchanged unless given.
    Indices are 0-based; output entries correspond to input entries.
    ``skew`` scales the wedge, e.g. ``s`` in normal-form coordinates.
    """
    wi = ws[i]
    if eps is None:
        eps = -1 if wedge(wi, ws[fixed]) > 0 else 1
    out = []
    for k, wk in enumerate(ws):
        if k == i:
            out.append((-wi[0], -wi[1]))
        else:
            c = max(0, eps * skew * wedge(wi, wk))
            out.append((wk[0] + c * wi[0], wk[1] + c * wi[1]))
    return tuple(out)


def normal_sequence(s: int, n: int):
    """Inner normals ``u_{j,1}`` of the first diagonal chain in normal-form coordinates."""
    pair = ((0, 1), (-1, 0))
    seq = []
    for _ in range(n):
        seq.append(pair[0])
        a, b = transform_normals(pair, 1, eps=-1, skew=s)
        pair = (b, a)
    return seq


# -- normal form ------------------------------------------------------------


class NormalForm(NamedTuple):
    vertices: tuple     # images of v1, v2, v3
    rho: tuple          # rows w1, w2, so rho*(n) = (<w1, n>, <w2, n>)
    s: int

    def apply(self, n):
        w1, w2 = self.rho
        return (dot(w1, n), dot(w2, n))


def normal_form(T: LabeledTriangle) -> NormalForm:
    w1, w2, _ = T.normals()
    nf = NormalForm(None, (w1, w2), abs(wedge(w1, w2)))
    return nf._replace(vertices=tuple(nf.apply(p) for p in T.v))


class Factors(NamedTuple):
    f1: tuple   # factor endpoint for the mutation at rho*(E1)
    f2: tuple
    r: tuple    # (r1, r2)
    r_new: tuple  # (r1', r2')

    @property
    def R(self):
        return (self.r[0] + self.r_new[0], self.r[1] + self.r_new[1])


def sublattice_mutation_factors(T: LabeledTriangle) -> Factors:
    """Factors and local indices of the two mutations of ``rho*(T)`` at ``rho*(E1), rho*(E2)``.

    ``f_i`` is the image of the primitive direction of ``E_i`` leaving ``v3``.
    ``r_i'`` is the local index in ``Z^2`` of the edge created by the mutation.
    """
    nf = normal_form(T)
    fs, r, r_new = [], [], []
    for i in (1, 2):
        w, ri, _ = T.edge_data(i)
        far = T.v[2 - i]  # the endpoint of E_i other than v3
        _, u = primitive(sub(far, T.v[2]))
        fs.append(nf.apply(u))
        m = mutate(T, i, 3 - i)
        img = Polygon([nf.apply(p) for p in m.triangle.v])
        a, b = nf.apply(m.v_prime), nf.apply(m.y)
        r.append(_local_index_z2(Polygon([nf.apply(p) for p in T.v]), *[nf.apply(p) for p in T.edge(i)]))
        r_new.append(_local_index_z2(img, a, b))
    return Factors(fs[0], fs[1], tuple(r), tuple(r_new))


def _local_index_z2(P: Polygon, a, b) -> int:
    return edge_data(P, find_edge(P, a, b)).local_index


# -- Markov triangles ---------------------------------------------------------


def triangle_from_triple(t, max_depth: int = MAX_DEPTH) -> LabeledTriangle:
    """The labelled triangle reached from P0 along the TreePath of ``t``.

    A Markov step "replace the smaller of a1, a2" becomes the mutation at the
    edge with that label, keeping the other of ``E1, E2``; afterwards the
    labels are re-read from the weights so that ``a3`` stays maximal.
    """
    t = markov.MarkovTriple.of(*t)
    path = markov.path_to(t)
    if len(path) > max_depth:
        raise DepthExceeded(f"depth {len(path)} exceeds {max_depth}")
    T = P0
    for sel in path:
        a = T.triple()
        small, big = (1, 2) if a[0] <= a[1] else (2, 1)
        i = small if sel == markov.LEFT else big
        T = relabel(mutate(T, i, 3 - i).triangle)
    return T


def relabel(T: LabeledTriangle) -> LabeledTriangle:
    """Rotate labels (keeping orientation) so that ``v3`` has the largest weight."""
    b = T.weights()
    k = max(range(3), key=lambda m: (b[m], m))
    order = [(k + 1) % 3, (k + 2) % 3, k]
    return LabeledTriangle(tuple(T.v[m] for m in order))


def unimodular_map(P: Polygon, Q: Polygon):
    """An integer matrix of determinant ±1 taking ``P`` onto ``Q``, or ``None``."""
    if len(P) != len(Q):
        return None
    n = len(P)
    ps = P.vertices
    for qs in (Q.vertices, tuple(reversed(Q.vertices))):
        for k in range(n):
            cyc = qs[k:] + qs[:k]
            A = _solve_map(ps[0], ps[1], cyc[0], cyc[1])
            if A is None:
                continue
            if all(_mat_apply(A, ps[m]) == cyc[m] for m in range(n)):
                return A
    return None


def _solve_map(p1, p2, q1, q2):
    det = wedge(p1, p2)
    if det == 0:
        return None
    # A [p1 p2] = [q1 q2]  =>  A = [q1 q2] [p1 p2]^{-1}
    inv = ((p2[1], -p2[0]), (-p1[1], p1[0]))
    a = Fraction(q1[0] * inv[0][0] + q2[0] * inv[1][0], det)
    b = Fraction(q1[0] * inv[0][1] + q2[0] * inv[1][1], det)
    c = Fraction(q1[1] * inv[0][0] + q2[1] * inv[1][0], det)
    d = Fraction(q1[1] * inv[0][1] + q2[1] * inv[1][1], det)
    if any(x.denominator != 1 for x in (a, b, c, d)) or abs(a * d - b * c) != 1:
        return None
    return ((int(a), int(b)), (int(c), int(d)))


def _mat_apply(A, p):
    return (A[0][0] * p[0] + A[0][1] * p[1], A[1][0] * p[0] + A[1][1] * p[1])


def mutation_equivalent_to_P0(P: Polygon, budget: int = 10_000):
    """Search for a mutation sequence from ``P`` to a unimodular copy of P0.

    Returns ``(True, path)`` where ``path`` lists ``(mutated edge, kept edge)``
    index pairs, or ``(False, reason)`` when an invariant rules it out.
    Raises ``BudgetExhausted`` when the search is inconclusive.
    """
    target = Polygon(P0.v)
    if not P.is_fano():
        return False, "not a Fano polygon"
    if singularity_content(P) != singularity_content(target):
        return False, f"singularity content {singularity_content(P)} differs from (3,∅)"
    if len(P) != 3:
        return False, "not a triangle"
    seen = {P.canonical().vertices}
    queue = deque([(P, ())])
    explored = 0
    while queue:
        Q, path = queue.popleft()
        if unimodular_map(Q, target) is not None:
            return True, path
        explored += 1
        if explored > budget:
            raise BudgetExhausted(f"no witness within {budget} polygons")
        top = max(triangle_weights(Q.vertices))
        for e in range(3):
            for f in ((e + 1) % 3, (e + 2) % 3):
                try:
                    R = mutate_edges(Q, e, f)
                except NotMutable:
                    continue
                key = R.canonical().vertices
                # descend in weight first; weights strictly drop along a Markov descent
                if key in seen or len(R) != 3 or max(triangle_weights(R.vertices)) > top:
                    continue
                seen.add(key)
                queue.append((R, path + ((e, f),)))
    return False, "search space exhausted without reaching P0"
