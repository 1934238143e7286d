from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from p2tropical import chambers as ch
from p2tropical import fano
from p2tropical import potential as P
from p2tropical.potential import W0, LaurentPolynomial as L

DEPTH1 = L({(1, 0): 1, (2, 2): 2, (3, 4): 1, (-1, -1): 1})
REGIONS2 = [fu for r in range(3) for fu in ch.build_region(2, r)]
REGIONS3 = [fu for r in range(3) for fu in ch.build_region(3, r)]


def _centroid(tri):
    return (sum(p[0] for p in tri) / 3, sum(p[1] for p in tri) / 3)


def test_algebraic_mutation_example():
    assert P.algebraic_mutate(W0, (2, -1), (1, 2)) == DEPTH1
    assert sorted(fano.triangle_weights(tuple(DEPTH1.newton_polygon().vertices))) == [1, 1, 4]
    # <w, n> = 0 on every exponent: nothing moves
    f = L({(1, 2): 3, (-2, -4): 1})
    assert P.algebraic_mutate(f, (2, -1), (1, 2)) == f
    assert P.algebraic_mutate(DEPTH1, (-2, 1), (1, 2)) == W0


def test_algebraic_mutation_rational_function_oracle():
    sp = pytest.importorskip("sympy")
    x, y = sp.symbols("x y")
    for fu in REGIONS2[1:]:
        f = W0
        for w, u, _, _ in P.path_walls(fu):
            F = 1 + x ** u[0] * y ** u[1]
            expr = sum(c * x ** m[0] * y ** m[1] for m, c in f.terms.items())
            sub = expr.subs({x: x * F ** w[0], y: y * F ** w[1]}, simultaneous=True)
            ours = P.algebraic_mutate(f, w, u)
            theirs = sum(c * x ** m[0] * y ** m[1] for m, c in ours.terms.items())
            assert sp.simplify(sp.together(sub) - theirs) == 0
            f = ours


def test_not_laurent():
    with pytest.raises(P.NotLaurent):
        P.algebraic_mutate(L({(1, 0): 1}), (-1, 0), (0, 1))  # x / (1 + y)
    with pytest.raises(ValueError):
        P.algebraic_mutate(W0, (1, 0), (1, 1))


def test_transport_examples():
    fu = ch.build_region(2)[3]
    walls = [(w, u) for w, u, _, _ in P.path_walls(fu)]
    assert P.transport(W0, walls[:1]) == DEPTH1
    there = P.transport(W0, walls)
    back = P.transport(there, [(w, u, -1) for w, u in reversed(walls)])
    assert back == W0
    assert P.transport(P.transport(W0, walls[:1]), walls[1:]) == there


def test_chamber_potential_examples():
    root = ch.root_chamber()
    assert P.chamber_potential(root) == W0
    assert W0.pretty() == "x^-1y^-1 + y + x"
    assert P.chamber_potential(ch.build_region(1)[1]) == DEPTH1


def test_chamber_potential_signature_depth3():
    for fu in REGIONS3:
        W = P.chamber_potential(fu)
        assert W.newton_polygon().same_as(fu.model.polygon)
        assert P.edge_coefficients_binomial(W)
        assert W.is_integral() and all(c > 0 for c in W.terms.values())
        assert all(W.terms[v] == 1 for v in W.newton_polygon().vertices)


def test_newton_mutation_compatibility_depth4():
    for fu in ch.build_region(4):
        node, f = ch.root_chamber(fu.region), W0
        for i in fu.path:
            M = fano.mutate(node.model, i, 3 - i)
            f = P.algebraic_mutate(f, M.w, M.u)
            assert f.newton_polygon().same_as(M.triangle.polygon)
            node = ch.child(node, i)


def _brute_period(f, M):
    out, power = [], L.one()
    for _ in range(M + 1):
        out.append(power.constant_term())
        power = power * f
    return out


def test_period_examples():
    expected = [1, 0, 0, 6, 0, 0, 90, 0, 0, 1680]
    assert P.period(W0, 9) == expected
    assert P.period(DEPTH1, 9) == expected
    assert P.period(L.one(), 5) == [1] * 6
    qp = P.quantum_period_P2(12)
    assert qp[0] == 1 and qp[3] == 6 and qp[6] == 90
    assert all(qp[3 * m] == factorial(3 * m) // factorial(m) ** 3 for m in range(5))
    assert P.is_mirror_dual(W0, 12)
    assert not P.is_mirror_dual(W0 + L.one(), 6)


def test_period_against_brute_force():
    for fu in REGIONS2:
        W = P.chamber_potential(fu)
        assert P.period(W, 9) == _brute_period(W, 9)


@settings(max_examples=20)
@given(st.sampled_from(REGIONS3), st.sampled_from([1, 2]))
def test_period_invariant_under_mutation(fu, i):
    f = P.chamber_potential(fu)
    M = fano.mutate(fu.model, i, 3 - i)
    g = P.algebraic_mutate(f, M.w, M.u)
    assert P.period(g, 9) == P.period(f, 9)


def test_all_depth3_mirror_dual():
    assert all(P.is_mirror_dual(P.chamber_potential(fu), 9) for fu in REGIONS3)


def test_central_broken_lines():
    for K in (0, 3, 6):
        lines, W = P.broken_lines(ch.root_chamber(), (Fraction(0), Fraction(0)), K)
        assert len(lines) == 3 and W == W0
        for line in lines:
            assert line.coefficient == 1 and not line.bends
            s = line.segments[0]
            # initial direction runs along an unbounded leg, travel direction = exponent
            assert s.direction == s.exponent and s.direction in ch.P0_CYCLE


def test_depth1_broken_lines():
    fu = ch.build_region(1)[1]
    lines, W = P.broken_lines(fu, _centroid(fu.triangle), 4)
    assert W == DEPTH1
    twos = [l for l in lines if l.exponent == (2, 2)]
    assert sum(l.coefficient for l in twos) == 2 and all(l.bends for l in twos)


def test_broken_lines_match_transport_at_stabilization():
    for fu in REGIONS2:
        K = int(P.stabilization_order(fu))
        c = _centroid(fu.triangle)
        _, W = P.broken_lines(fu, c, K)
        assert W == P.chamber_potential(fu)
        # increasing K adds nothing
        _, W2 = P.broken_lines(fu, c, K + 3)
        assert W2 == W
        for line in P.broken_lines(fu, c, K)[0]:
            assert all(s.direction == s.exponent for s in line.segments)
            assert line.segments[0].coefficient == 1


@given(st.sampled_from(REGIONS2), st.fractions(0, 1, max_denominator=50), st.fractions(0, 1, max_denominator=50))
def test_basepoint_independence(fu, a, b):
    if a + b >= 1 or a == 0 or b == 0:
        return
    p0, p1, p2 = fu.triangle
    p = tuple(p0[k] + a * (p1[k] - p0[k]) + b * (p2[k] - p0[k]) for k in (0, 1))
    K = 6
    assert P.broken_lines(fu, p, K)[1] == P.broken_lines(fu, _centroid(fu.triangle), K)[1]


def test_nongeneric_basepoint():
    fu = ch.build_region(1)[1]
    with pytest.raises(P.NonGenericBasepoint):
        P.broken_lines(fu, fu.triangle[0], 4)
    with pytest.raises(P.NonGenericBasepoint):
        P.broken_lines(fu, (Fraction(5), Fraction(5)), 4)


def test_json_roundtrip():
    for fu in REGIONS2:
        W = P.chamber_potential(fu)
        assert L.from_json(W.to_json()) == W
    half = L({(1, 0): Fraction(1, 2)})
    assert half.to_json() == [[[1, 0], [1, 2]]] and L.from_json(half.to_json()) == half
