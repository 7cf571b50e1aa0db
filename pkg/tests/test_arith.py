from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from singres.arith import Matrix, adjugate, det, exterior_product, format_rat, inverse, parse_rat, rank, solve
from singres.errors import DimensionError

square = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n)
)


def test_det_examples():
    assert det(Matrix.identity(3)) == 1
    assert det([[3, 2], [2, 1]]) == -1
    assert det([[1, 1], [1, 1]]) == 0


def test_det_rejects_non_square():
    with pytest.raises(DimensionError):
        det([[1, 2, 3], [4, 5, 6]])


def test_adjugate_examples():
    assert adjugate(Matrix.identity(2)) == Matrix.identity(2)
    assert adjugate([[3, 1], [2, 1]]).to_json() == [[1, -1], [-2, 3]]
    assert adjugate([[2, 0], [0, 2]]).to_json() == [[2, 0], [0, 2]]


def test_adjugate_rejects_non_square():
    with pytest.raises(DimensionError):
        adjugate([[1, 2]])


def test_exterior_product_examples():
    assert exterior_product([(3, 2)]) == (-2, 3)
    assert exterior_product([(1, 0, 0), (0, 1, 0)]) == (0, 0, -1)
    assert exterior_product([(0, 1, 0), (1, 0, 0)]) == (0, 0, 1)


def test_exterior_product_length_mismatch():
    with pytest.raises(DimensionError):
        exterior_product([(1, 2, 3)])


def test_rational_text_round_trip():
    assert format_rat(Fraction(6, 4)) == "3/2"
    assert format_rat(Fraction(-4, 2)) == "-2"
    assert parse_rat("3/2") == Fraction(3, 2)
    assert parse_rat("7") == 7


@settings(max_examples=150, deadline=None)
@given(square)
def test_det_and_adjugate_match_sympy(rows):
    m = Matrix.of(rows)
    oracle = sympy.Matrix(rows)
    assert det(m) == oracle.det()
    n = len(rows)
    adj = adjugate(m)
    assert [[int(x) for x in r] for r in adj.rows] == [[int(oracle.adjugate()[i, j]) for j in range(n)] for i in range(n)]
    d = det(m)
    assert m @ adj == Matrix.identity(n).scale(d)
    assert adj @ m == Matrix.identity(n).scale(d)


@settings(max_examples=100, deadline=None)
@given(square)
def test_rank_and_inverse_match_sympy(rows):
    m = Matrix.of(rows)
    assert rank(m) == sympy.Matrix(rows).rank()
    if det(m) != 0:
        assert m @ inverse(m) == Matrix.identity(len(rows))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5).flatmap(lambda n: st.tuples(
    st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n - 1, max_size=n - 1),
    st.lists(st.integers(-4, 4), min_size=n, max_size=n),
    st.integers(-3, 3),
)))
def test_exterior_product_is_multilinear_and_alternating(data):
    vs, extra, t = data
    base = exterior_product(vs)
    # Pairs with every input to 0; the determinant form of the definition.
    for v in vs:
        assert sum(a * b for a, b in zip(base, v)) == 0
    moved = [list(vs[0])] + [list(v) for v in vs[1:]]
    moved[0] = [a + t * b for a, b in zip(vs[0], extra)]
    lhs = exterior_product(moved)
    rhs = tuple(a + t * b for a, b in zip(base, exterior_product([extra] + list(vs[1:]))))
    assert lhs == rhs
    if len(vs) >= 2:
        assert not any(exterior_product([vs[0], vs[0]] + list(vs[2:])))


def test_solve_returns_exact_rationals():
    m = Matrix.of([[2, 1], [1, 3]])
    assert solve(m, (1, 0)) == (Fraction(3, 5), Fraction(-1, 5))
