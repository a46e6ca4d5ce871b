import pytest

from qspair.rootdata import (R, build_satake, fundamental_weight_word, perm_of, relative_simple,
                             root_length, root_suite, tilde_alpha, tilde_alpha_prime, weyl_act,
                             zeta_word, Word)


@pytest.mark.parametrize("N", range(1, 9))
def test_diagram_invariants(N):
    d = build_satake(N)
    assert d.tau(0) == 0
    assert all(d.tau(i) == N + 1 - i for i in d.finite_nodes)
    for i in d.nodes:
        for j in d.nodes:
            assert d.a(d.tau(i), d.tau(j)) == d.a(i, j)
            if i and j and d.a(i, j) == -1:
                assert d.sign(i) * d.sign(j) == -1


def test_relative_types():
    assert build_satake(3).relative_type == "C2^(1)"
    assert build_satake(3).tau(2) == 2
    assert build_satake(2).relative_type == "A2^(2)"
    assert build_satake(1).relative_type == "A1^(1)"
    assert build_satake(1).tau(1) == 1


def test_node_out_of_range():
    with pytest.raises(ValueError):
        build_satake(3).tau(4)
    with pytest.raises(ValueError):
        build_satake(0)


def test_relative_simple_reflections():
    assert relative_simple(build_satake(3), 2) == [2]
    assert relative_simple(build_satake(3), 1) == [1, 3]
    assert relative_simple(build_satake(4), 2) == [2, 3, 2]


def test_fundamental_weight_words():
    d3 = build_satake(3)
    # pi_n r_n [n-1, n] ... [1, n] with n = 2
    assert fundamental_weight_word(d3, 2).to_json(d3) == [{"aut": "pi_n"}, {"r": 2}, {"r": 1}, {"r": 2}]
    d2 = build_satake(2)
    assert fundamental_weight_word(d2, 1).to_json(d2) == [{"r": 0}, {"r": 1}]


@pytest.mark.parametrize("N", range(1, 8))
def test_words_reduced_and_translations(N):
    rep = root_suite(N)
    assert not rep["braid_failures"]
    for w in rep["words"]:
        assert w["expanded_length"] == w["inversions"] == w["root_inversions"]
        assert w["translation"] and w["tau_commutes"]
    assert all(z["ok"] for z in rep["zeta"])
    assert rep["ok"]


def test_identity_word_acts_trivially():
    d = build_satake(5)
    beta = (1, 0, 2, 0, 0, 1)
    assert weyl_act(d, Word(()), beta) == beta


def test_zeta_examples():
    d5 = build_satake(5)
    assert weyl_act(d5, zeta_word(d5, 1), tilde_alpha(d5, 1)) == tilde_alpha(d5, 2)
    assert tilde_alpha(d5, 2) == (0, 0, 1, 0, 0, 0)
    d4 = build_satake(4)
    assert tilde_alpha_prime(d4, 1) == (0, 0, 0, 0, 1)
    # n = 2, so the index 2 wraps to 0: alpha'_0 = alpha_0 + ... + alpha_3
    assert weyl_act(d4, zeta_word(d4, 1), tilde_alpha_prime(d4, 1)) == (1, 1, 1, 1, 0)


def test_simple_reflection_length_one():
    d = build_satake(4)
    for i in d.reps:
        assert root_length(d, R(i)) == len(relative_simple(d, i))
        assert perm_of(d, R(i)).length() == root_length(d, R(i))
