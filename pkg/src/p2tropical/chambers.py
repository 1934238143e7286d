"""Glued triangle complexes: diagrams, regions, the chart atlas and the chamber set.

Chart coordinates are exact rationals.  A chamber is a triangle ``S(P_fu)``
where ``P_fu`` is a labelled Markov triangle and ``S`` a positive
scale-and-translate map.  Children of a chamber are obtained by mutating its
model at ``E_1`` or ``E_2`` (the edges through ``v_3``) and gluing the new
edge onto the mutated one, so a chamber's apex ``v_fu = S(v_3)`` is the vertex
not shared with its parent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, lcm

from . import markov
from .fano import LabeledTriangle, mutate, p0_labeled, MAX_DEPTH, DepthExceeded
from .lattice import AffineMap, add, dot, frac, primitive, scale, sub, wedge

P0_CYCLE = ((1, 0), (0, 1), (-1, -1))
DEFAULT_V3 = 2  # (-1, -1)


class NonParallelEdges(ArithmeticError):
    pass


class PointInsideV(ValueError):
    pass


class NotInRegion(ValueError):
    pass


# -- chambers -----------------------------------------------------------------


@dataclass(frozen=True)
class Chamber:
    """``S(model)`` in the chart of ``Region(P0, v)`` with ``v = P0_CYCLE[region]``."""

    model: LabeledTriangle
    S: AffineMap
    path: tuple = ()
    region: int = DEFAULT_V3
    owners: tuple = field(default=(), compare=False)

    @property
    def depth(self) -> int:
        return len(self.path)

    @property
    def triangle(self) -> tuple:
        return tuple(self.S(p) for p in self.model.v)

    @property
    def apex(self):
        return self.S(self.model.v[2])

    @property
    def scale(self) -> Fraction:
        return self.S.a

    def triple(self) -> markov.MarkovTriple:
        return markov.MarkovTriple.of(*self.model.triple())

    def tree_path(self) -> tuple:
        """Markov selectors along the path, read off the labelled triples."""
        out = []
        node = self.model
        # replay from the root so each selector sees its parent's triple
        T = _root_model(self.region)
        for i in self.path:
            a = T.triple()
            out.append(markov.LEFT if a[i - 1] <= a[2 - i] else markov.RIGHT)
            T = mutate(T, i, 3 - i).triangle
        assert T == node
        return tuple(out)

    def edges(self):
        t = self.triangle
        return [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]

    def edge(self, i: int) -> tuple:
        """Chart image of the model edge ``E_i``."""
        p, q = self.model.edge(i)
        return self.S(p), self.S(q)

    def to_json(self):
        return {
            "path": list(self.path),
            "tree_path": list(self.tree_path()),
            "depth": self.depth,
            "region": list(P0_CYCLE[self.region]),
            "triple": list(self.model.triple()),
            "model": [list(p) for p in self.model.v],
            "transform": {"scale": _q(self.S.a), "translation": [_q(c) for c in self.S.translation]},
            "triangle": [[_q(c) for c in p] for p in self.triangle],
        }


def _q(c):
    c = frac(c)
    return [c.numerator, c.denominator]


def _root_model(region: int) -> LabeledTriangle:
    return p0_labeled(region)


def root_chamber(region: int = DEFAULT_V3) -> Chamber:
    T = _root_model(region)
    owners = tuple(("p0", (region + 1 + m) % 3) for m in range(3))
    return Chamber(T, AffineMap.identity(), (), region % 3, owners)


# -- gluing -------------------------------------------------------------------


def glue_map(Q: LabeledTriangle, i: int, j: int | None = None) -> AffineMap:
    """``x -> lam x + u`` taking the new edge of ``mutate(Q, i, j)`` onto ``E_i`` of ``Q``.

    With ``v = E_i ∩ E_j``, ``v'`` the kept vertex and ``y`` the new one,
    ``v' -> v`` and ``y ->`` the far end of ``E_i``.
    """
    j = 3 - i if j is None else j
    k = 6 - i - j
    M = mutate(Q, i, j)
    target_v, target_far = Q.v[k - 1], Q.v[j - 1]
    src = sub(M.y, M.v_prime)
    dst = sub(target_far, target_v)
    if wedge(src, dst) != 0 or dot(src, dst) <= 0:
        raise NonParallelEdges(f"{src} and {dst} are not positively parallel")
    lam = Fraction(dst[0], src[0]) if src[0] else Fraction(dst[1], src[1])
    u = sub(target_v, scale(lam, M.v_prime))
    return AffineMap.scale_translate(lam, u)


def child(fu: Chamber, i: int, limit: int = MAX_DEPTH) -> Chamber:
    """The successor of ``fu`` across its edge ``E_i`` (``i`` in 1, 2)."""
    if i not in (1, 2):
        raise ValueError("children are indexed by 1 and 2")
    if fu.depth >= limit:
        raise DepthExceeded(f"depth {fu.depth + 1} exceeds {MAX_DEPTH}")
    M = mutate(fu.model, i, 3 - i)
    S = fu.S @ glue_map(fu.model, i)
    # labels of the child: v3 = new apex, v_i = S(v') = v_fu, v_j = S(y) = far end of E_i
    owners = [None, None, None]
    owners[2] = ("chamber", fu.path + (i,))
    owners[i - 1] = fu.owners[2]
    owners[2 - i] = fu.owners[2 - i]
    return Chamber(M.triangle, S, fu.path + (i,), fu.region, tuple(owners))


def build_region(depth: int, region: int = DEFAULT_V3, root: Chamber | None = None) -> list:
    """``Region(P0, v)`` (or the subtree below ``root``) down to ``depth``, breadth first."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth > MAX_DEPTH:
        raise DepthExceeded(f"depth {depth} exceeds {MAX_DEPTH}")
    level = [root or root_chamber(region)]
    base = level[0].depth
    out = []
    while level:
        out.extend(level)
        if level[0].depth - base >= depth:
            break
        level = [child(fu, i) for fu in level for i in (1, 2)]
    return out


def build_diag(k: int, region: int = DEFAULT_V3, root: Chamber | None = None) -> list:
    """``Diag_k``: the root and the two chains ``u^i_1..u^i_k`` around its apex."""
    if k > MAX_DEPTH:
        raise DepthExceeded(f"k = {k} exceeds {MAX_DEPTH}")
    root = root or root_chamber(region)
    return [root] + diag_chain(root, 1, k) + diag_chain(root, 2, k)


def diag_chain(root: Chamber, i: int, k: int) -> list:
    """``u^i_1, ..., u^i_k``: the chambers around ``v_root`` on the side of ``E_i``.

    After the first step ``v_root`` carries the label ``i`` in every model
    of the chain, so each later step crosses the edge ``E_(3-i)``.
    """
    out, fu, sel = [], root, i
    for _ in range(k):
        fu = child(fu, sel)
        out.append(fu)
        sel = 3 - i
    return out


# -- exact quadratic numbers --------------------------------------------------


class QuadraticNumber:
    """``a + b sqrt(D)`` with rational ``a, b`` and a fixed non-square ``D > 0``."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b=0, D: int = 0):
        self.a, self.b, self.D = frac(a), frac(b), D
        if self.b and (D <= 0 or isqrt(D) ** 2 == D):
            raise ValueError("D must be a positive non-square")

    def _lift(self, other):
        if isinstance(other, QuadraticNumber):
            if other.b and self.b and other.D != self.D:
                raise ValueError("mixing different quadratic fields")
            return other
        return QuadraticNumber(other, 0, self.D)

    def _field(self, other):
        return self.D if self.b else other.D

    def __add__(self, other):
        o = self._lift(other)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.D)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        D = self._field(o)
        return QuadraticNumber(self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QuadraticNumber) and other.b:
            conj = QuadraticNumber(other.a, -other.b, other.D)
            return (self * conj) / (other.a ** 2 - other.b ** 2 * other.D)
        if isinstance(other, QuadraticNumber):
            other = other.a
        return QuadraticNumber(self.a / frac(other), self.b / frac(other), self.D)

    def sign(self) -> int:
        a, b = self.a, self.b
        sa, sb = (a > 0) - (a < 0), (b > 0) - (b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        return sa if a * a > b * b * self.D else sb

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __eq__(self, other):
        return (self - other).sign() == 0

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def __float__(self):
        return float(self.a) + float(self.b) * self.D ** 0.5

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.D}))"


def cone_roots(s: int) -> tuple:
    """The roots ``r- < r+`` of ``m^2 - s m + 1`` as quadratic numbers."""
    D = s * s - 4
    if D <= 0:
        raise ValueError("no real cone for s < 3")
    half = Fraction(1, 2)
    return QuadraticNumber(s * half, -half, D), QuadraticNumber(s * half, half, D)


def _sign(x) -> int:
    if isinstance(x, QuadraticNumber):
        return x.sign()
    return (x > 0) - (x < 0)


# -- exact polygon predicates -------------------------------------------------


def _ccw(tri):
    a, b, c = tri
    return tri if wedge(sub(b, a), sub(c, a)) > 0 else (a, c, b)


def _bbox(tri):
    xs = [p[0] for p in tri]
    ys = [p[1] for p in tri]
    return min(xs), max(xs), min(ys), max(ys)


def in_triangle(tri, p, strict: bool = False) -> bool:
    a, b, c = _ccw(tri)
    for u, v in ((a, b), (b, c), (c, a)):
        side = _sign(wedge(sub(v, u), sub(p, u)))
        if side < 0 or (strict and side == 0):
            return False
    return True


def interiors_disjoint(A, B) -> bool:
    """Separating-axis test on the six edge lines of two triangles."""
    for X, Y in ((A, B), (B, A)):
        X = _ccw(X)
        for k in range(3):
            u, v = X[k], X[(k + 1) % 3]
            if all(wedge(sub(v, u), sub(p, u)) <= 0 for p in Y):
                return True
    return False


def face_intersection(A, B) -> str:
    """Classify ``A ∩ B`` as ``empty``, ``vertex``, ``edge`` or ``bad``.

    Interiors are disjoint when an edge line separates the triangles; the
    closed intersection is then a common face exactly when every vertex of
    one triangle lying on the other is a vertex of both.
    """
    ax0, ax1, ay0, ay1 = _bbox(A)
    bx0, bx1, by0, by1 = _bbox(B)
    if ax1 < bx0 or bx1 < ax0 or ay1 < by0 or by1 < ay0:
        return "empty"
    if not interiors_disjoint(A, B):
        return "bad"
    sa, sb = set(A), set(B)
    for X, Y, sy in ((A, B, sb), (B, A, sa)):
        for p in X:
            if in_triangle(Y, p) and p not in sy:
                return "bad"
    common = len(sa & sb)
    return ("empty", "vertex", "edge", "bad")[common]


def check_faces(chambers) -> list:
    """Pairs of chambers whose intersection is not a common face."""
    tris = [fu.triangle if isinstance(fu, Chamber) else tuple(fu) for fu in chambers]
    boxes = [_bbox(t) for t in tris]
    order = sorted(range(len(tris)), key=lambda k: boxes[k][0])
    bad = []
    for n, k in enumerate(order):
        x1 = boxes[k][1]
        for m in order[n + 1:]:
            if boxes[m][0] > x1:
                break
            if face_intersection(tris[k], tris[m]) == "bad":
                bad.append((k, m))
    return bad


# -- the affine manifold: singular points, transitions, charts -----------------


def inner_normal(p, q) -> tuple:
    """Primitive inner normal of the P0 edge from ``p`` to ``q`` (counterclockwise)."""
    _, d = primitive(sub(q, p))
    return (-d[1], d[0])


def transition(src: int, dst: int) -> AffineMap:
    """Chart change beyond the P0 edge ``conv{v_src, v_dst}``: Region(P0, v_src) -> Region(P0, v_dst).

    ``x -> x + <n, x - v_dst> (v_src - v_dst)`` with ``n`` the inner normal of
    the edge; it is the identity on the edge line and unipotent.
    """
    if src == dst or {src % 3, dst % 3} == {src % 3}:
        raise ValueError("a transition needs two distinct vertices")
    v, vp = P0_CYCLE[dst % 3], P0_CYCLE[src % 3]
    p, q = (v, vp) if (dst - src) % 3 == 2 else (vp, v)
    n = inner_normal(p, q)
    d = sub(vp, v)
    a, b = 1 + n[0] * d[0], n[1] * d[0]
    c, e = n[0] * d[1], 1 + n[1] * d[1]
    lin = AffineMap(a, b, c, e)
    t = sub(v, lin(v))
    return AffineMap(a, b, c, e, t[0], t[1])


@dataclass(frozen=True)
class Chart:
    """``Phi_{v, v'}``: edges at ``v`` glued as in Region(P0, v), the opposite edge as in Region(P0, v')."""

    v: int
    v_prime: int
    cut_points: tuple      # singular point on each edge the cut emanates from
    cut_directions: tuple  # direction of each cut ray


@dataclass(frozen=True)
class ChartAtlas:
    central: tuple
    singular_points: tuple
    charts: tuple
    transitions: dict
    legs: tuple
    slab_exponents: dict

    def to_json(self):
        return {
            "central": [list(p) for p in self.central],
            "singular_points": [[_q(c) for c in p] for p in self.singular_points],
            "charts": [[c.v, c.v_prime] for c in self.charts],
            "legs": [{"base": list(b), "direction": list(d)} for b, d in self.legs],
        }


def singular_points() -> tuple:
    """Edge midpoints of P0, one per edge ``conv{v_k, v_(k+1)}``."""
    out = []
    for k in range(3):
        p, q = P0_CYCLE[k], P0_CYCLE[(k + 1) % 3]
        out.append((Fraction(p[0] + q[0], 2), Fraction(p[1] + q[1], 2)))
    return tuple(out)


def build_atlas() -> ChartAtlas:
    mids = singular_points()
    charts = []
    for v in range(3):
        for vp in range(3):
            if vp == v:
                continue
            # cuts avoid v; exactly one of them contains v'
            pts, dirs = [], []
            for k in range(3):
                ends = {k, (k + 1) % 3}
                toward = (ends - {v}).pop() if v in ends else (ends - {vp}).pop()
                pts.append(mids[k])
                dirs.append(sub(P0_CYCLE[toward], mids[k]))
            charts.append(Chart(v, vp, tuple(pts), tuple(dirs)))
    transitions = {(a, b): transition(a, b) for a in range(3) for b in range(3) if a != b}
    legs = tuple((P0_CYCLE[k], P0_CYCLE[k]) for k in range(3))
    slabs = {}
    for k in range(3):
        for end in (k, (k + 1) % 3):
            d = sub(scale(2, mids[k]), scale(2, P0_CYCLE[end]))
            slabs[(k, end)] = primitive((int(d[0]), int(d[1])))[1]
    return ChartAtlas(P0_CYCLE, mids, tuple(charts), transitions, legs, slabs)


def chart_chambers(v: int, v_prime: int, depth: int) -> list:
    """Chambers of depth <= ``depth`` drawn in the chart ``Phi_{v, v'}``."""
    out = build_region(depth, v)
    opposite = [k for k in range(3) if k != v]
    side = 2 if (v_prime - v) % 3 == 1 else 1
    assert v_prime in opposite
    root = root_chamber(v_prime)
    # the edge of P0 at v' not containing v is E_side in the labelling with v3 = v'
    if depth:
        out.extend(build_region(depth - 1, v_prime, root=child(root, side)))
    return out


# -- the chamber set T ----------------------------------------------------------


@dataclass(frozen=True)
class ChamberComplex:
    """``T``: P0 plus one subtree per edge ``conv{v_k, v_(k+1)}``, stored in the chart of ``v_k``."""

    depth: int
    chambers: tuple
    identification: tuple  # (home chamber index, partner chamber, verified)

    def count(self, depth: int | None = None) -> int:
        d = self.depth if depth is None else depth
        return sum(1 for fu in self.chambers if fu.depth <= d)

    def to_json(self):
        return {"depth": self.depth, "chambers": [fu.to_json() for fu in self.chambers]}


def build_T(depth: int) -> ChamberComplex:
    """Build ``T`` and check ``T_{v,i} = T_{v',3-i}`` chamber by chamber through the transitions."""
    if depth > MAX_DEPTH:
        raise DepthExceeded(f"depth {depth} exceeds {MAX_DEPTH}")
    chambers = [root_chamber(DEFAULT_V3)]
    ident = []
    if depth == 0:
        return ChamberComplex(0, tuple(chambers), ())
    for k in range(3):
        kp = (k + 1) % 3
        home = build_region(depth - 1, k, root=child(root_chamber(k), 2))
        partner = build_region(depth - 1, kp, root=child(root_chamber(kp), 1))
        tau = transition(kp, k)
        by_set = {frozenset(fu.triangle): fu for fu in home}
        for fu in partner:
            image = frozenset(tau(p) for p in fu.triangle)
            match = by_set.get(image)
            ident.append((fu.region, fu.path, match.path if match else None, match is not None))
        chambers.extend(home)
    return ChamberComplex(depth, tuple(chambers), tuple(ident))


# -- vertex frames and cones --------------------------------------------------


@dataclass(frozen=True)
class VertexFrame:
    """Coordinates ``L (x - apex)`` in which the cone at ``apex`` is ``X > 0, Y^2 - s X Y + X^2 < 0``.

    ``L`` is minus the normal-form map of the owning model, so the owning
    chamber sits in the third quadrant and its edges ``E_1, E_2`` point
    down and left.
    """

    apex: tuple
    L: AffineMap
    s: int

    def coords(self, x):
        d = (x[0] - self.apex[0], x[1] - self.apex[1])
        return (self.L.a * d[0] + self.L.b * d[1], self.L.c * d[0] + self.L.d * d[1])

    def quadratic(self, X, Y):
        return Y * Y - self.s * X * Y + X * X

    def classify(self, x) -> str:
        """``inside`` the open cone, on its ``boundary``, ``below`` or ``above`` it."""
        X, Y = self.coords(x)
        if _sign(X) > 0 and _sign(Y) > 0:
            q = _sign(self.quadratic(X, Y))
            if q < 0:
                return "inside"
            if q == 0:
                return "boundary"
        return "below" if _sign(2 * Y - self.s * X) < 0 else "above"

    def line_class(self, d) -> int:
        """Sign of ``Y^2 - s X Y + X^2`` on a direction: negative iff its line meets the open cone."""
        X, Y = self.L.apply_linear(d)
        return _sign(self.quadratic(X, Y))

    def boundary_directions(self) -> tuple:
        """Chart directions of the two boundary rays (quadratic coordinates), ``r-`` then ``r+``."""
        inv = self.L.inverse()
        out = []
        for r in cone_roots(self.s):
            out.append((inv.a + inv.b * r, inv.c + inv.d * r))
        return tuple(out)


def _rho_star(T: LabeledTriangle) -> AffineMap:
    w1, w2, _ = T.normals()
    return AffineMap(w1[0], w1[1], w2[0], w2[1])


def chamber_frame(fu: Chamber) -> VertexFrame:
    rho = _rho_star(fu.model)
    L = AffineMap(-rho.a, -rho.b, -rho.c, -rho.d)
    return VertexFrame(fu.apex, L, 3 * fu.model.triple()[2])


def p0_frame(m: int, chart: int) -> VertexFrame:
    """Frame at the P0 vertex ``v_m`` seen in the chart of Region(P0, v_chart)."""
    base = chamber_frame(root_chamber(m))
    if m % 3 == chart % 3:
        return base
    t = transition(chart, m)
    lin = base.L @ AffineMap(t.a, t.b, t.c, t.d)
    return VertexFrame(base.apex, lin, base.s)


class RegionIndex:
    """Chambers of one region keyed by path, with owner-frame lookup."""

    def __init__(self, chambers):
        self.by_path = {fu.path: fu for fu in chambers}
        self.region = chambers[0].region

    def frame_of(self, owner) -> VertexFrame:
        kind, key = owner
        if kind == "p0":
            return p0_frame(key, self.region)
        if key not in self.by_path:
            fu = root_chamber(self.region)
            for i in key:
                fu = child(fu, i)
            self.by_path[key] = fu
        return chamber_frame(self.by_path[key])


def sandwich(fu: Chamber) -> dict:
    """Slope checks at ``v_fu`` in its frame.

    The new edges of both children through ``v_fu`` lie on lines missing the
    open cone, while each child's edge not through ``v_fu`` (the edge fixed by
    the mutation) has a direction strictly inside the cone.
    """
    F = chamber_frame(fu)
    out = {"outside": [], "inside": []}
    for i in (1, 2):
        c = child(fu, i)
        a = fu.apex
        through = [e for e in c.edges() if a in e]
        other = [e for e in c.edges() if a not in e][0]
        for p, q in through:
            out["outside"].append(F.line_class(sub(q, p)) > 0)
        out["inside"].append(F.line_class(sub(other[1], other[0])) < 0)
    out["ok"] = all(out["outside"]) and all(out["inside"])
    return out


@dataclass(frozen=True)
class ConeRegion:
    """The open cone ``C_p`` at a joint, stored by its apex and frame."""

    frame: VertexFrame
    owner: tuple
    region: int

    @property
    def apex(self):
        return self.frame.apex

    @property
    def s(self) -> int:
        return self.frame.s

    def contains(self, x, strict: bool = True) -> bool:
        c = self.frame.classify(x)
        return c == "inside" or (not strict and (c == "boundary" or x == self.apex))

    def meets_interior(self, tri) -> bool:
        """Exact test whether the open cone meets the interior of a triangle."""
        apex = self.apex
        dm, dp = self.frame.boundary_directions()
        tri = _ccw(tri)
        # triangle edge lines as separating axes
        for k in range(3):
            u, v = tri[k], tri[(k + 1) % 3]
            e = sub(v, u)
            if _sign(wedge(e, sub(apex, u))) <= 0 and _sign(wedge(e, dm)) <= 0 and _sign(wedge(e, dp)) <= 0:
                return False
        # cone boundary lines as separating axes
        for d, other in ((dm, dp), (dp, dm)):
            side = _sign(wedge(d, other))
            if all(_sign(wedge(d, sub(p, apex))) * side <= 0 for p in tri):
                return False
        return True

    def to_json(self):
        return {
            "apex": [_q(c) for c in self.apex],
            "s": self.s,
            "frame": [[_q(c) for c in row] for row in self.frame.L.matrix],
            "owner": [self.owner[0], list(self.owner[1]) if isinstance(self.owner[1], tuple) else self.owner[1]],
            "region": self.region,
        }


def cones_and_W(depth: int, region: int = DEFAULT_V3) -> list:
    """One cone per joint of Region(P0, v) up to ``depth``, P0 vertices included."""
    chambers = build_region(depth, region)
    out = [ConeRegion(p0_frame(m, region), ("p0", m), region) for m in range(3)]
    for fu in chambers[1:]:
        out.append(ConeRegion(chamber_frame(fu), ("chamber", fu.path), region))
    return out


def check_cones(depth: int, region: int = DEFAULT_V3, cone_depth: int | None = None) -> list:
    """Pairs (cone owner, chamber path) where an open cone meets a chamber interior."""
    chambers = build_region(depth, region)
    cd = depth if cone_depth is None else cone_depth
    bad = []
    for C in cones_and_W(cd, region):
        for fu in chambers:
            if C.meets_interior(fu.triangle):
                bad.append((C.owner, fu.path))
    return bad


# -- structure rays ------------------------------------------------------------


@dataclass(frozen=True)
class StructureRay:
    """A maximal union of collinear chamber edges, oriented away from where it is born."""

    base: tuple
    end: tuple
    direction: tuple
    chart: int
    provenance: tuple

    def contains(self, p, interior: bool = False) -> bool:
        d = sub(self.end, self.base)
        w = sub(p, self.base)
        if wedge(d, w) != 0:
            return False
        t = dot(w, d)
        lo, hi = (0, dot(d, d))
        return lo < t < hi if interior else lo <= t <= hi

    def to_json(self):
        return {
            "base": [_q(c) for c in self.base],
            "end": [_q(c) for c in self.end],
            "direction": list(self.direction),
            "chart": self.chart,
            "provenance": [self.provenance[0], list(self.provenance[1])],
        }


def _line_key(p, q):
    a, b = q[1] - p[1], p[0] - q[0]
    c = a * p[0] + b * p[1]
    # normalise so the first nonzero of (a, b) is 1
    k = a if a else b
    return (a / k, b / k, c / k)


def _direction(p, q):
    d = sub(q, p)
    den = 1
    for c in d:
        den = lcm(den, frac(c).denominator)
    return primitive((int(d[0] * den), int(d[1] * den)))[1]


def structure_rays(depth: int, region: int = DEFAULT_V3) -> list:
    """Structure rays of Region(P0, v) in its chart, truncated at ``depth``.

    Collinear chamber edges are merged into maximal segments.  Segments on a
    P0 edge line are split at the singular point, which is where those rays
    are born; every other segment starts at its endpoint owned by the
    shallowest chamber.
    """
    chambers = build_region(depth, region)
    first_seen = {}
    lines = {}
    for fu in chambers:
        for p in fu.triangle:
            first_seen.setdefault(p, fu.depth)
        for p, q in fu.edges():
            lines.setdefault(_line_key(p, q), []).append((p, q, fu))
    mids = {}
    for k, m in enumerate(singular_points()):
        a, b = P0_CYCLE[k], P0_CYCLE[(k + 1) % 3]
        mids[_line_key(a, b)] = (k, m)
    rays = []
    for key, segs in lines.items():
        d0 = _direction(segs[0][0], segs[0][1])
        ivs = []
        for p, q, fu in segs:
            tp, tq = dot(p, d0), dot(q, d0)
            if tq < tp:
                p, q, tp, tq = q, p, tq, tp
            ivs.append((tp, tq, p, q, fu))
        ivs.sort(key=lambda t: (t[0], t[1]))
        merged = []
        for lo, hi, a, b, fu in ivs:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1][1], merged[-1][3] = hi, b
                merged[-1][4] = min(merged[-1][4], fu, key=lambda c: c.depth)
            else:
                merged.append([lo, hi, a, b, fu])
        for lo, hi, a, b, fu in merged:
            if key in mids:
                k, m = mids[key]
                for tip in (a, b):
                    rays.append(StructureRay(m, tip, _direction(m, tip), region, ("slab", (k,))))
                continue
            base, end = (a, b) if first_seen[a] <= first_seen[b] else (b, a)
            rays.append(StructureRay(base, end, _direction(base, end), region, ("edge", fu.path)))
    return rays


def incoming_counts(depth: int, region: int = DEFAULT_V3, joint_depth: int | None = None) -> dict:
    """For each joint ``v_fu`` with ``d(fu) <= joint_depth``: (incoming, outgoing) ray counts."""
    jd = depth - 2 if joint_depth is None else joint_depth
    rays = structure_rays(depth, region)
    joints = {fu.apex: fu.path for fu in build_region(jd, region)}
    out = {}
    for p, path in joints.items():
        inc = sum(1 for r in rays if r.contains(p, interior=True) or (r.end == p))
        outg = sum(1 for r in rays if r.base == p)
        out[path] = (inc, outg)
    return out


def local_ray_directions(fu: Chamber, depth: int) -> list:
    """Primitive frame directions of the structure rays born at ``v_fu`` (descendants to ``depth``)."""
    F = chamber_frame(fu)
    chain = [fu] + diag_chain(fu, 1, depth) + diag_chain(fu, 2, depth)
    seen = set()
    for c in chain:
        for p, q in c.edges():
            if F.apex in (p, q):
                other = q if p == F.apex else p
                X, Y = F.coords(other)
                seen.add(_direction((0, 0), (X, Y)))
    # the two incoming lines are E1 and E2 of fu itself; drop their backward halves
    incoming = {_direction((0, 0), F.coords(q if p == F.apex else p)) for p, q in fu.edges() if F.apex in (p, q)}
    return sorted(d for d in seen if d not in incoming and (-d[0], -d[1]) not in incoming)


# -- bounding regions -------------------------------------------------------------


def _rational_inside(s: int, root: int, digits: int = 12) -> Fraction:
    """A rational slope strictly inside the cone, within ``10**-digits`` of ``r-`` (root 0) or ``r+`` (root 1)."""
    D = s * s - 4
    N = 10 ** digits
    sq_lo = Fraction(isqrt(D * N * N), N)           # <= sqrt(D) < sq_lo + 1/N
    if root == 0:
        return (s - sq_lo) / 2 + Fraction(1, N)     # > r-
    return (s + sq_lo) / 2 - Fraction(1, N)         # < r+


def _base_endpoints(fu: Chamber):
    """Endpoints of the edge ``fu`` shares with its parent (``E_3`` of the model), with owners."""
    return [(fu.S(fu.model.v[m]), fu.owners[m]) for m in (0, 1)]


def bounding_region(fu: Chamber, index: RegionIndex | None = None, digits: int = 6) -> tuple:
    """A rational triangle containing ``R_fu`` and hence every descendant of ``fu``.

    ``R_fu`` is cut out by the shared edge and, at each of its endpoints
    ``p``, the boundary ray of the cone ``C_p`` on the side of ``fu``.  Those
    rays have quadratic slopes; each is replaced by a rational ray turned
    slightly into its cone, which only enlarges the triangle.
    """
    index = index or RegionIndex([root_chamber(fu.region)])
    if fu.depth == 0:
        probes = [child(fu, 2), child(fu, 1)]  # children across E2 (through v1) and E1 (through v2)
    else:
        probes = [fu, fu]
    rays = []
    for (p, owner), probe in zip(_base_endpoints(fu), probes):
        F = index.frame_of(owner)
        cx = sum(q[0] for q in probe.triangle) / 3
        cy = sum(q[1] for q in probe.triangle) / 3
        side = F.classify((cx, cy))
        q = _rational_inside(F.s, 0 if side == "below" else 1, digits)
        inv = F.L.inverse()
        rays.append((p, inv.apply_linear((1, q))))
    (p1, d1), (p2, d2) = rays
    den = wedge(d1, d2)
    if den == 0:
        raise ArithmeticError("bounding rays are parallel")
    t = wedge(sub(p2, p1), d2) / den
    u = wedge(sub(p2, p1), d1) / den
    if t <= 0 or u <= 0:
        raise ArithmeticError("bounding rays do not meet beyond the base")
    Z = add(p1, scale(t, d1))
    return (p1, p2, Z)


# -- shrinking witness --------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    point: tuple
    region: int
    paths: tuple        # path of fu_1, fu_2, ...
    triples: tuple      # labelled model triples
    f_squared: tuple    # exact squared Euclidean lengths f(i)^2
    sides: tuple        # successor index chosen at each step

    @property
    def f(self) -> list:
        return [float(q) ** 0.5 for q in self.f_squared]

    def first_below(self, ratio: Fraction = Fraction(1, 1000)):
        """First index ``i`` with ``f(i) < ratio * f(0)``, or ``None``."""
        bound = ratio * ratio * self.f_squared[0]
        for i, q in enumerate(self.f_squared):
            if q < bound:
                return i
        return None

    def halving_holds(self, stable_only: bool = True) -> list:
        """``(i, ok)`` for ``f(i+1) <= f(i)/2`` at steps where the model triple has minimum 1.

        With ``stable_only`` a step counts only when the same successor side
        is chosen at ``i`` and ``i+1``, i.e. the model edge behind ``F(i)`` is
        the one behind ``F(i+1)``: the regime in which the halving argument
        applies.  Without it every minimum-1 step is listed.
        """
        out = []
        for i in range(len(self.f_squared) - 1):
            if min(self.triples[i]) != 1:
                continue
            if stable_only and self.sides[i] != self.sides[i + 1]:
                continue
            out.append((i, 4 * self.f_squared[i + 1] <= self.f_squared[i]))
        return out


def _side(F: VertexFrame, x) -> int:
    """Successor index for a point outside the open cone: 1 below, 2 above (boundary included)."""
    c = F.classify(x)
    if c == "inside":
        raise NotInRegion("the point lies in the open cone at the apex")
    if c == "boundary":
        X, Y = F.coords(x)
        return 1 if _sign(2 * Y - F.s * X) < 0 else 2
    return 1 if c == "below" else 2


def _length2(p, q):
    d = sub(q, p)
    return d[0] * d[0] + d[1] * d[1]


def shrinking_witness(x, steps: int = 40, region: int = DEFAULT_V3) -> Witness:
    """Follow the chambers ``fu_1, fu_2, ...`` toward ``x`` and record ``f(i)``.

    ``fu_1`` is the chamber across the edge of P0 facing ``x``; each next
    chamber is the successor on the side of ``x`` relative to the cone at the
    current apex.  ``f(i)`` is the length of the edge of ``fu_i`` through
    ``v_(fu_i)`` that is not shared with ``fu_(i+1)``.
    """
    fu = root_chamber(region)
    if in_triangle(fu.triangle, x):
        raise PointInsideV("the point lies in P0")
    sel = _side(chamber_frame(fu), x)
    fu = child(fu, sel)
    paths, triples, fsq, sides = [], [], [], []
    for _ in range(steps):
        if in_triangle(fu.triangle, x):
            raise PointInsideV(f"the point lies in the chamber {fu.path}")
        sel = _side(chamber_frame(fu), x)
        p, q = fu.edge(3 - sel)
        paths.append(fu.path)
        triples.append(fu.model.triple())
        fsq.append(_length2(p, q))
        sides.append(sel)
        fu = child(fu, sel, limit=steps + 1)
    return Witness(tuple(x), region, tuple(paths), tuple(triples), tuple(fsq), tuple(sides))


def witness_points(count: int = 10) -> list:
    """Deterministic points outside ``V``: on boundary rays of cones at shallow joints.

    A point on the boundary of ``C_p`` near ``p`` is not in the open cone and,
    the cone being a limit of chambers, not in any chamber either.
    Returns ``(region, point)`` pairs with quadratic coordinates.
    """
    out = []
    for r in (2, 0, 1):
        F = chamber_frame(root_chamber(r))
        for d in F.boundary_directions():
            out.append((r, (F.apex[0] + d[0] * Fraction(1, 10), F.apex[1] + d[1] * Fraction(1, 10))))
    for fu in build_region(2, DEFAULT_V3)[1:]:
        F = chamber_frame(fu)
        for d in F.boundary_directions():
            t = fu.scale / 10
            out.append((DEFAULT_V3, (F.apex[0] + d[0] * t, F.apex[1] + d[1] * t)))
    return out[:count]
