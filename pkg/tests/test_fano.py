from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from p2tropical import chambers as ch
from p2tropical import fano, markov
from p2tropical.fano import P0, LabeledTriangle, NotMutable, SharedEdge
from p2tropical.lattice import primitive, wedge
from p2tropical.polygon import Polygon

P112 = Polygon(((1, 0), (0, 1), (-1, -2)))


def _edge(P, a, b):
    return fano.edge_data(P, fano.find_edge(P, a, b))


@pytest.mark.parametrize("verts, edge, expected", [
    (P0.v, ((0, 1), (-1, -1)), ((2, -1), 1, 1)),
    (((0, 1), (1, 0), (-1, -4)), ((1, 0), (-1, -4)), ((-2, 1), 2, 2)),
    (((1, 1), (-1, 1), (-1, -1), (1, -1)), ((1, 1), (1, -1)), ((-1, 0), 1, 2)),
])
def test_edge_data_examples(verts, edge, expected):
    assert tuple(_edge(Polygon(verts), *edge)) == expected


@pytest.mark.parametrize("verts, w", [
    (P0.v, (1, 1, 1)),
    (((0, 1), (1, 0), (-1, -4)), (4, 1, 1)),
    (((-1, -1), (1, 0), (3, 4)), (4, 1, 1)),
])
def test_weights_examples(verts, w):
    assert fano.triangle_weights(verts) == w


def test_weights_linear_solve_oracle():
    sympy = pytest.importorskip("sympy")
    v = fano.triangle_from_triple((1, 2, 5)).v
    b1, b2 = sympy.symbols("b1 b2")
    # fix b3 = 1 and solve sum b_i v_i = 0, then clear denominators
    sol = sympy.solve([b1 * v[0][k] + b2 * v[1][k] + v[2][k] for k in (0, 1)], [b1, b2])
    vals = [sympy.Rational(sol[b1]), sympy.Rational(sol[b2]), sympy.Integer(1)]
    den = sympy.ilcm(*[x.q for x in vals])
    ints = [int(x * den) for x in vals]
    g = sympy.igcd(*ints)
    assert tuple(x // g for x in ints) == fano.triangle_weights(v)
    assert sorted(fano.triangle_weights(v)) == [1, 4, 25]


def test_mutate_examples():
    M = fano.mutate(P0, 1, 2)
    assert M.triangle.polygon.same_as(Polygon(((-1, -1), (1, 0), (3, 4))))
    assert (M.v, M.v_prime, M.w, M.u) == ((-1, -1), (1, 0), (2, -1), (1, 2))
    assert sorted(M.triangle.weights()) == [1, 1, 4]
    N = fano.mutate(P0, 2, 1)
    assert N.triangle.polygon.same_as(Polygon(((-1, -1), (0, 1), (4, 3))))
    # the mutated edge now sits opposite label 3, the fixed edge keeps label 2
    assert fano.mutate(M.triangle, 3, 2).triangle == P0


def test_mutate_errors():
    with pytest.raises(SharedEdge):
        fano.mutate(P0, 1, 1)
    # E3 = conv{(1,3),(2,3)} has length 1 at height 3
    T = LabeledTriangle(((1, 3), (2, 3), (-2, -5)))
    assert tuple(T.edge_data(3)) == ((0, -1), 3, 1)
    with pytest.raises(NotMutable):
        fano.mutate(T, 3, 1)


def test_transform_normals_examples():
    ws = ((2, -1), (-1, 2), (-1, -1))
    out = fano.transform_normals(ws, 0, 1)
    assert out == ((-2, 1), (-1, 2), (5, -4))
    assert set(out) == set(fano.mutate(P0, 1, 2).triangle.normals())
    assert fano.transform_normals(out, 0, 1) == ws
    assert fano.normal_sequence(3, 4) == [(0, 1), (1, 0), (3, -1), (8, -3)]


def test_normal_form_examples():
    nf = fano.normal_form(P0)
    assert nf.vertices == ((2, -1), (-1, 2), (-1, -1)) and nf.s == 3
    # images of E1 and E2 sit on x = -1 and y = -1
    e1 = [nf.apply(p) for p in P0.edge(1)]
    e2 = [nf.apply(p) for p in P0.edge(2)]
    assert {p[0] for p in e1} == {-1} and {p[1] for p in e2} == {-1}
    assert fano.normal_form(fano.triangle_from_triple((1, 1, 2))).s == 6


def test_sublattice_factors_examples():
    F = fano.sublattice_mutation_factors(P0)
    assert {F.f1, F.f2} == {(3, 0), (0, 3)}
    F = fano.sublattice_mutation_factors(fano.triangle_from_triple((1, 1, 2)))
    assert {tuple(abs(c) for c in F.f1), tuple(abs(c) for c in F.f2)} == {(6, 0), (0, 6)}


def test_singularity_content_examples():
    assert str(fano.singularity_content(P0.polygon)) == "(3,∅)"
    c = fano.singularity_content(P112)
    assert (c.n, c.basket) == (4, ())
    for fu in ch.build_region(5):
        assert fano.singularity_content(fu.model.polygon) == (3, ())


def test_triangle_from_triple_examples():
    assert fano.triangle_from_triple((1, 1, 1)) == P0
    assert fano.triangle_from_triple((1, 1, 2)).polygon.same_as(Polygon(((-1, -1), (1, 0), (3, 4))))
    T = fano.triangle_from_triple((1, 2, 5))
    assert sorted(T.weights()) == [1, 4, 25] and 1 + 4 + 25 == 3 * 1 * 2 * 5


def test_mutation_equivalence():
    ok, path = fano.mutation_equivalent_to_P0(Polygon(((-1, -1), (1, 0), (3, 4))))
    assert ok and len(path) == 1
    assert fano.mutation_equivalent_to_P0(P0.polygon) == (True, ())
    ok, why = fano.mutation_equivalent_to_P0(P112)
    assert not ok and "(4,∅)" in why


def test_json_schema():
    data = fano.triangle_from_triple((1, 1, 2)).to_json()
    assert set(data) == {"vertices", "labels", "weights"}
    assert sorted(data["weights"]) == [1, 1, 4]


# -- properties over the labelled triangles of the chamber regions ---------------------

MODELS5 = [fu.model for r in range(3) for fu in ch.build_region(5, r)]
MODELS6 = [fu.model for fu in ch.build_region(6)]


@given(st.sampled_from(MODELS5), st.permutations([1, 2, 3]))
def test_mutation_invariants(T, perm):
    i, j = perm[0], perm[1]
    a = T.triple()
    if T.edge_data(i).lattice_length != T.edge_data(i).local_index:
        return
    M = fano.mutate(T, i, j)
    assert fano.singularity_content(M.triangle.polygon) == fano.singularity_content(T.polygon)
    # weight transport: a_i becomes 3 a_j a_k - a_i
    j2, k2 = [m for m in (1, 2, 3) if m != i]
    expected = sorted([a[j2 - 1], a[k2 - 1], 3 * a[j2 - 1] * a[k2 - 1] - a[i - 1]])
    assert sorted(M.triangle.triple()) == expected
    assert markov.is_markov(*expected)
    # normal transport
    assert set(fano.transform_normals(T.normals(), i - 1, j - 1)) == set(M.triangle.normals())


def test_edge_invariants_and_wedges_depth6():
    for T in MODELS6:
        a = T.triple()
        ws = T.normals()
        for i in (1, 2, 3):
            ed = T.edge_data(i)
            assert ed.lattice_length == a[i - 1] == ed.local_index
            j, k = [m - 1 for m in (1, 2, 3) if m != i]
            assert abs(wedge(ws[j], ws[k])) == 3 * a[i - 1]
        assert fano.normal_form(T).s == 3 * a[2]
        assert sum(Fraction(a[i] ** 2) * T.v[i][0] for i in range(3)) == 0
        assert sum(Fraction(a[i] ** 2) * T.v[i][1] for i in range(3)) == 0
        assert all(primitive(v)[0] == 1 for v in T.v)
        assert T.polygon.is_fano()
