import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from corpus import poly, random_unimodular
from singres.arith import Matrix
from singres.canonical import (
    Inconsistent,
    admissible_exceptional_sets,
    canonical_reduce,
    decompose_interim,
    deficiency,
    inconsistent_form,
    interim_principles_hold,
    is_consistent,
    latent_primary_component,
    reduce_trivial_inconsistency,
    synthesize,
    verify_reduction_identity,
)
from singres.errors import DomainError, PreconditionError

F = Fraction


def sym(m: Matrix) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(F(x).numerator, F(x).denominator) for x in r] for r in m.rows])


def oracle_identity(cr) -> bool:
    """Recompute the reduction matrix and identity with sympy."""
    k, n = cr.k, cr.n
    P = sym(cr.permuted)
    A, B, C, D = P[:k, :k], P[:k, k:], P[k:, :k], P[k:, k:]
    dd = D.det() if n > k else 1
    f_expected = dd * A - (B * D.adjugate() * C if n > k else sympy.zeros(k, k))
    if sym(cr.F) != f_expected:
        return False
    N = sympy.Matrix(sympy.BlockMatrix([[sympy.eye(k), B], [sympy.zeros(n - k, k), D]])) if n > k else sympy.eye(k)
    rel = (N.inv() * P)[:k, :]
    return dd * rel == f_expected.row_join(sympy.zeros(k, n - k))


def inconsistent_example(lam, c, g, a, b):
    return Matrix.of([[0, a, b], [1, lam * c, lam * g], [0, c, g]])


def test_constant_shape_golden():
    cr = canonical_reduce(Matrix.of([[1, 0, 2], [0, 1, 5], [0, 0, 3]]), [2])
    assert cr.N == Matrix.of([[1, 0, 2], [0, 1, 5], [0, 0, 3]])
    assert cr.F == Matrix.of([[3, 0], [0, 3]])
    assert verify_reduction_identity(cr) and oracle_identity(cr)


def test_inconsistent_form_golden():
    m = inconsistent_example(2, 1, 3, 1, 1)
    assert not is_consistent(m, [1, 2])
    with pytest.raises(Inconsistent) as info:
        canonical_reduce(m, [1, 2])
    nf = info.value.form
    assert nf.row_order == (1, 2, 0)
    assert nf.N_bar == Matrix.of([[1, 2, 6], [0, 1, 3], [0, 1, 1]])
    S, T = decompose_interim(nf)
    assert S == Matrix.of([[1, 6, 0], [0, 3, 0], [0, 0, 1]])
    assert T == Matrix.of([[1, 0, 0], [0, F(1, 3), 1], [0, 1, 1]])
    assert interim_principles_hold(nf, S, T, [(1, 2, 3), (0, 0, 5), (4, 1, 0)])


def test_synthesis_golden():
    nf = inconsistent_form(inconsistent_example(2, 1, 3, 1, 1), [1, 2])
    _, T = decompose_interim(nf)
    following = inconsistent_example(F(1, 2), 2, 1, 1, 3)
    syn = synthesize(T, following, nf.latent)
    assert syn.Q == Matrix.of([[0, 1, 3], [F(1, 3), F(7, 3), F(7, 6)], [1, 3, F(3, 2)]])
    cr = canonical_reduce(syn.Q, [1, 2], primary_row=2)
    assert cr.row_order == (2, 0, 1)
    assert cr.N == Matrix.of([[1, 3, F(3, 2)], [0, 1, 3], [0, F(7, 3), F(7, 6)]])
    assert cr.F == Matrix.of([[F(-10, 3)]])
    assert verify_reduction_identity(cr) and oracle_identity(cr)


def test_trivial_inconsistency():
    m = Matrix.of([[0, 0, 3], [1, 0, 0], [0, 1, 0]])
    with pytest.raises(Inconsistent) as info:
        canonical_reduce(m, [2])
    nf = info.value.form
    assert nf.N_bar == Matrix.of([[1, 0, 0], [0, 1, 0], [0, 0, 3]])
    reduced = reduce_trivial_inconsistency(nf)
    assert reduced.N_bar == Matrix.identity(3)
    assert decompose_interim(reduced) == (Matrix.identity(3), Matrix.identity(3))
    other = inconsistent_form(inconsistent_example(2, 1, 3, 1, 1), [1, 2])
    assert reduce_trivial_inconsistency(other) is other


def test_inconsistent_form_needs_an_inconsistent_input():
    with pytest.raises(PreconditionError):
        inconsistent_form(Matrix.identity(2), [1])


def test_deficiency_examples():
    cr = canonical_reduce(Matrix.identity(2), [1])
    info = deficiency(cr, poly("x1 + x1*x2"))
    assert info.rows == (0,)
    assert info.support == ((1, 0),)
    assert info.function == poly("x1", 2)
    assert info.identity_ok
    assert not deficiency(canonical_reduce(Matrix.of([[1, 1], [0, 1]]), [1])).deficient


def test_latent_primary_component():
    assert latent_primary_component((5, 0), (2, 0), 0) == 3
    with pytest.raises(DomainError):
        latent_primary_component((1,), (1, 2), 0)


@settings(max_examples=150, deadline=None)
@given(
    st.fractions(min_value=0, max_value=4, max_denominator=3),
    st.integers(0, 4),
    st.integers(1, 4),
    st.integers(0, 4),
    st.integers(0, 4),
)
def test_inconsistent_family(lam, c, g, a, b):
    assume(c * b - g * a != 0)
    m = inconsistent_example(lam, c, g, a, b)
    nf = inconsistent_form(m, [1, 2])
    assert nf.row_order == (1, 2, 0)
    assert nf.N_bar == Matrix.of([[1, lam * c, lam * g], [0, c, g], [0, a, b]])
    S, T = decompose_interim(nf)
    assert S == Matrix.of([[1, lam * g, 0], [0, g, 0], [0, 0, 1]])
    assert T == Matrix.of([[1, 0, 0], [0, F(c, g), 1], [0, a, b]])
    assert sym(S) * sym(T) == sym(nf.N_bar)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4))
def test_random_unimodular_reductions(seed, n):
    rng = random.Random(seed)
    m = random_unimodular(n, rng)
    for size in range(1, n):
        for ex in itertools.combinations(range(n), size):
            try:
                cr = canonical_reduce(m, ex)
            except Inconsistent as sig:
                nf = sig.form
                assert nf.exceptional_block.nrows == size
                S, T = decompose_interim(nf)
                assert sym(S) * sym(T) == sym(nf.N_bar)
                continue
            assert verify_reduction_identity(cr)
            assert oracle_identity(cr)
            assert cr.row_order[0] == 0
            assert sym(cr.D).det() == cr.det_D != 0


def test_admissible_sets():
    assert admissible_exceptional_sets(Matrix.of([[1, 2], [0, 1]])) == [(1,)]
    assert admissible_exceptional_sets(Matrix.of([[2, 3], [1, 2]])) == [(0,), (1,)]
