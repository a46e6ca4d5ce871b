import dataclasses

import pytest
from hypothesis import given, strategies as st

from qspair.coideal import braid_oracle, embed, verify_kolb
from qspair.rootdata import build_satake
from qspair.scalars import ONE, qpow
from qspair.symnc import (NCPoly, SizeError, almost_commuting, boldP, braid_substitute,
                          bracket_program_library, CommutationSpec, iterP, iterPprime, kmono,
                          lemma_suite, letter, pc_equal, pc_normal_form, qbracket)
from conftest import V

y1, y2, y3 = letter("y1"), letter("y2"), letter("y3")
q = qpow(1)


def test_qbracket_examples():
    x = letter("x")
    assert qbracket(x, x, ONE).is_zero()
    assert qbracket(y1, y2) == y1 * y2 - (y2 * y1) * q
    assert qbracket(x, NCPoly.one(), qpow(3)) == x * (ONE - qpow(3))


def test_iterated_brackets_small_cases():
    assert iterP([y1]) == y1 and iterPprime([y1]) == y1
    assert iterP([y1, y2]) == qbracket(y1, y2) == iterPprime([y1, y2])
    assert iterP([y1, y2, y3]) == qbracket(y1, qbracket(y2, y3))
    assert iterPprime([y1, y2, y3]) == qbracket(qbracket(y1, y2), y3)
    with pytest.raises(ValueError):
        iterP([])


def test_pc_equal_basic():
    comm = CommutationSpec([("y1", "y3")])
    assert pc_equal(y1 * y3, y3 * y1, comm)
    assert not pc_equal(y1 * y2, y2 * y1, comm)


@pytest.mark.parametrize("k", range(3, 7))
def test_P_equals_Pprime_almost_commuting(k):
    names = [f"y{m}" for m in range(1, k + 1)]
    ys = [letter(x) for x in names]
    assert pc_equal(iterP(ys), iterPprime(ys), almost_commuting(names))
    # without the commutations the two differ
    assert not pc_equal(iterP(ys), iterPprime(ys), CommutationSpec())


@pytest.mark.parametrize("k", range(2, 7))
def test_exchange(k):
    names = [f"y{m}" for m in range(1, k + 1)]
    ys = [letter(x) for x in names]
    for m in range(k - 1):
        sw = ys[:m] + [ys[m + 1], ys[m]] + ys[m + 2:]
        assert pc_equal(iterP(ys), iterP(sw), CommutationSpec([(names[m], names[m + 1])]))


def test_telescoping():
    ys = [letter(f"y{m}") for m in range(1, 7)]
    for k in range(2, 7):
        for l in range(1, k):
            assert iterP(ys[:k]) == iterP(ys[:l] + [iterP(ys[l:k])])


def test_lemma_suite_passes():
    rep = lemma_suite(6)
    assert rep["pass"] and not rep["failures"]


words = st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=10)
comm_abcd = CommutationSpec([("a", "c"), ("b", "d"), ("a", "d")])


@given(words, st.data())
def test_pc_normal_form_idempotent_and_swap_invariant(w, data):
    nf = pc_normal_form(tuple(w), comm_abcd)
    assert pc_normal_form(nf, comm_abcd) == nf
    w2 = list(w)
    for _ in range(data.draw(st.integers(0, 12))):
        if len(w2) < 2:
            break
        p = data.draw(st.integers(0, len(w2) - 2))
        if comm_abcd.commute(w2[p], w2[p + 1]):
            w2[p], w2[p + 1] = w2[p + 1], w2[p]
    assert pc_normal_form(tuple(w2), comm_abcd) == nf


def test_boldP():
    B1, B2, B0 = letter("B1"), letter("B2"), letter("B0")
    K1 = kmono(("KK", 1, 1))
    assert boldP(B1, B2, NCPoly.zero(), K1).is_zero()
    assert boldP(B1, B2, B0, K1) == qbracket(B1, qbracket(B2, B0)) - (K1 * B0) * q


def test_braid_substitute_cases():
    d3 = build_satake(3)
    # case (a): tau(2) = 2
    assert braid_substitute(d3, 2, letter("B0")) == letter("B0")
    assert braid_substitute(d3, 2, letter("B2")) == kmono(("KK", 2, -1)) * letter("B2")
    # case (b): a_{1,3} = 0
    assert braid_substitute(d3, 1, letter("B1")) == (kmono(("KK", 1, -1)) * letter("B3")) * (-1)
    with pytest.raises(ValueError):
        braid_substitute(d3, 1, letter("F1"))


def test_size_cap():
    d = build_satake(3)
    p = letter("B0") * letter("B0") * letter("B0")
    with pytest.raises(SizeError):
        braid_substitute(d, 0, braid_substitute(d, 1, p), cap=5)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_braid_generators_are_automorphisms_on_a_module(N):
    CR = embed(V(N, 2))
    d = CR.diagram
    # the diagram rotation lies in the relative group only for odd N
    rot = [("pi", d.n)] if d.odd else []
    for g in list(d.reps) + rot:
        o = braid_oracle(CR).apply(g)
        img = dataclasses.replace(CR, B=o.B, KK=o.KK, cache={})
        assert verify_kolb(img)["pass"], g
        back = o.apply(g, inverse=True)
        assert all(back.B[j] == CR.B[j] for j in d.nodes)
        assert all(back.KK[j] == CR.KK[j] for j in d.nodes)


def test_program_library_sexpr_and_errors():
    d2 = build_satake(2)
    s = bracket_program_library(d2, "A_minus1", 1).sexpr()
    assert "B0" in s and "B1" in s
    assert bracket_program_library(d2, "A_minus1", 1).sexpr() == s
    with pytest.raises(KeyError):
        bracket_program_library(d2, "nope", 1)
    with pytest.raises(ValueError):
        bracket_program_library(d2, "TomegaPrimeF", 7)
