from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from p2tropical.lattice import (
    AffineMap, DegenerateCone, SingularLinearPart, ZeroVector,
    apply, compose, cone_normal_form, primitive, wedge,
)

ints = st.integers(-10**6, 10**6)
vecs = st.tuples(ints, ints)
small = st.integers(-30, 30)
rats = st.fractions(min_value=-20, max_value=20, max_denominator=30)


@pytest.mark.parametrize("v, expected", [
    ((4, 6), (2, (2, 3))),
    ((0, -5), (5, (0, -1))),
    ((-2, -1), (1, (-2, -1))),
])
def test_primitive_examples(v, expected):
    assert primitive(v) == expected


def test_primitive_rejects_zero():
    with pytest.raises(ZeroVector):
        primitive((0, 0))


@pytest.mark.parametrize("u, v, w", [
    ((1, 0), (0, 1), 1),
    ((2, -1), (-1, 2), 3),
    ((1, 2), (2, 4), 0),
])
def test_wedge_examples(u, v, w):
    assert wedge(u, v) == w


@given(vecs, vecs, vecs, small)
def test_wedge_antisymmetric_and_bilinear(u, v, w, k):
    assert wedge(u, v) == -wedge(v, u)
    uw = (u[0] + k * w[0], u[1] + k * w[1])
    assert wedge(uw, v) == wedge(u, v) + k * wedge(w, v)


@given(st.tuples(small, small).filter(lambda p: p != (0, 0)), st.integers(1, 50))
def test_primitive_of_multiple(p, k):
    g, q = primitive(p)
    assert primitive((k * q[0], k * q[1])) == (k, q)


def test_affine_hand_evaluation():
    S = AffineMap.scale_translate(Fraction(1, 2), (Fraction(-3, 2), -1))
    assert apply(S, (3, 4)) == (0, 1)
    half = AffineMap.scale_translate(Fraction(1, 2), (0, 0))
    assert apply(compose(half, half), (4, 0)) == (1, 0)
    I = AffineMap.identity()
    assert compose(I, I) == I


def test_affine_singular_rejected():
    with pytest.raises(SingularLinearPart):
        AffineMap(1, 2, 2, 4)


maps = st.tuples(rats, rats, rats, rats, rats, rats).filter(lambda t: t[0] * t[3] != t[1] * t[2])


@given(maps, maps, maps, st.tuples(rats, rats))
def test_affine_composition_associative(a, b, c, p):
    A, B, C = AffineMap(*a), AffineMap(*b), AffineMap(*c)
    assert compose(compose(A, B), C) == compose(A, compose(B, C))
    assert apply(compose(A, B), p) == apply(A, apply(B, p))
    assert apply(A.inverse(), apply(A, p)) == tuple(Fraction(x) for x in p)


def test_cone_examples():
    assert cone_normal_form((1, 0), (0, 1)).r == 1
    nf = cone_normal_form((1, 0), (1, 2))
    assert (nf.r, nf.c) == (2, 1)
    assert cone_normal_form((0, 1), (1, -2)) == cone_normal_form((1, 0), (-2, 1))
    with pytest.raises(DegenerateCone):
        cone_normal_form((1, 2), (2, 4))


def _brute_index(r1, r2):
    # oracle: the index is the number of lattice points in the half-open fundamental parallelogram
    area = abs(wedge(r1, r2))
    xs = [0, r1[0], r2[0], r1[0] + r2[0]]
    ys = [0, r1[1], r2[1], r1[1] + r2[1]]
    n = 0
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            a = Fraction(wedge((x, y), r2), wedge(r1, r2))
            b = Fraction(wedge(r1, (x, y)), wedge(r1, r2))
            n += 0 <= a < 1 and 0 <= b < 1
    assert n == area
    return area


unimodular = st.sampled_from([((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 1), (0, 1)), ((1, 0), (1, 1)),
                              ((1, -1), (0, 1)), ((-1, 0), (0, 1)), ((2, 1), (1, 1)), ((0, -1), (1, 0))])


@given(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), st.tuples(st.integers(-6, 6), st.integers(-6, 6)),
       st.lists(unimodular, min_size=1, max_size=20))
def test_cone_normal_form_unimodular_invariant(p, q, mats):
    if p == (0, 0) or q == (0, 0) or wedge(p, q) == 0:
        return
    r1, r2 = primitive(p)[1], primitive(q)[1]
    nf = cone_normal_form(r1, r2)
    assert nf.r == _brute_index(r1, r2)
    a, b = r1, r2
    for (m00, m01), (m10, m11) in mats:
        a = (m00 * a[0] + m01 * a[1], m10 * a[0] + m11 * a[1])
        b = (m00 * b[0] + m01 * b[1], m10 * b[0] + m11 * b[1])
    assert cone_normal_form(a, b) == nf
