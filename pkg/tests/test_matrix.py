from fractions import Fraction

import sympy
from flint import fmpq
from hypothesis import given, strategies as st

from qspair.matrix import Matrix, block_diag, commutator, qbracket
from qspair.scalars import ONE, ZERO, qpow, specialize

v = sympy.Symbol("v")
small = st.sampled_from([ZERO, ONE, -ONE, qpow(1), qpow(-1), ONE * 2, qpow(1) + 1])
square = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n))


def test_identity_and_zero():
    I = Matrix.identity(3)
    assert I.is_identity() and I.is_diagonal()
    assert (I - I).is_zero()


def test_kron_dimensions_and_mixed_product():
    A = Matrix.from_dense([[ONE, qpow(1)], [ZERO, ONE]])
    B = Matrix.from_dense([[ZERO, ONE], [ONE, ZERO]])
    C = Matrix.from_dense([[qpow(2), ZERO], [ONE, ONE]])
    assert A.kron(B).shape == (4, 4)
    assert A.kron(B) * C.kron(C) == (A * C).kron(B * C)


def test_brackets():
    A = Matrix.from_dense([[ONE, qpow(1)], [ZERO, ONE]])
    B = Matrix.from_dense([[ZERO, ONE], [ONE, ZERO]])
    assert commutator(A, A).is_zero()
    assert qbracket(A, B, qpow(1)) == A * B - B * A * qpow(1)


def test_block_diag():
    D = block_diag([Matrix.identity(1), Matrix.identity(2) * qpow(1)])
    assert D == Matrix.diag([ONE, qpow(1), qpow(1)])


@given(square)
def test_charpoly_matches_sympy(rows):
    A = Matrix.from_dense(rows)
    n = len(rows)
    S = sympy.Matrix(n, n, lambda i, j: specialize(rows[i][j], 2))
    x = sympy.Symbol("x")
    expected = sympy.Poly(S.charpoly(x).as_expr(), x).all_coeffs()[::-1]
    got = [specialize(c, 2) for c in A.charpoly()]
    assert got == [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in expected]


@given(square)
def test_inverse_when_invertible(rows):
    A = Matrix.from_dense(rows)
    if A.rank() == len(rows):
        assert A * A.inverse() == Matrix.identity(len(rows))


def test_specialize_is_exact():
    A = Matrix.from_dense([[qpow(1), ONE], [ZERO, qpow(-1)]])
    M = A.specialize(3)
    assert M[0, 0] == 9 and M[1, 1] == fmpq(1, 9)
