from collections import Counter

import pytest
import sympy
from hypothesis import assume, given, strategies as st

from qspair.charlab import (D_I_GE, POSITIVE, LWeightData, appendix_lemmas, boundary_qchar,
                            check_coproduct, check_factorization, check_omega_prime,
                            congruence_check, congruence_witnesses, drinfeld_polys, ell_weights,
                            format_scalar, module_action_check, monomial_to_gamma, p_dagger, p_star,
                            poly_from_roots, qchar, spectrum_report, spectrum_verify,
                            specialization_oracle, thmC_predict, y_substitution)
from qspair.coideal import Theta_series, embed
from qspair.loopalg import Params, drinfeld_ladder, eval_module, trivial_rep
from qspair.scalars import ONE, ZERO, TruncSeries, parse_scalar, qpow
from conftest import V, VW

q = qpow(1)


# -- congruences -----------------------------------------------------------------------------

def test_congruence_trivial_cases():
    W = V(3, 2)
    X = TruncSeries([W.K[1], W.F[2]], 1)
    assert congruence_check(W, X, X, POSITIVE)
    Y = TruncSeries([W.K[1] + W.E[2] * qpow(3), W.F[2] + W.E[1] * W.E[2]], 1)
    assert congruence_check(W, Y, X, POSITIVE)
    Z = TruncSeries([W.K[1] + W.F[1], W.F[2]], 1)
    w = congruence_witnesses(W, Z, X, POSITIVE)
    assert w and w[0]["nu"] == [-1, 0, 0] and w[0]["m"] == 0


def test_cone_membership():
    assert POSITIVE.contains((0, 1, 0)) and not POSITIVE.contains((0, 0, 0))
    assert not POSITIVE.contains((1, -1, 0))
    cone = D_I_GE(2, 1)
    assert cone.contains((1, 1, 0)) and not cone.contains((0, 1, 0)) and not cone.contains((1, 0, 0))


_T = VW(3, 2, -4)
_BASE = TruncSeries([_T.K[1] * _T.F[2], _T.F[1] * _T.F[3] + _T.E[2]], 1)
letters = st.lists(st.integers(1, 3), min_size=1, max_size=3)
coeffs = st.sampled_from([ONE, q, -qpow(-2), ONE * 3])


def _E_word(word):
    P = _T.identity()
    for j in word:
        P = P * _T.E[j]
    return P


@given(letters, coeffs, st.integers(0, 1))
def test_congruence_soundness_positive_perturbation(word, c, m):
    P = _E_word(word) * c
    coeffs_ = [x for x in _BASE.coeffs]
    coeffs_[m] = coeffs_[m] + P
    assert congruence_check(_T, TruncSeries(coeffs_, 1), _BASE, POSITIVE)


@given(letters, st.integers(1, 3), st.integers(0, 2), coeffs)
def test_congruence_detects_F_letter(word, j, pos, c):
    word = [x for x in word if x != j]
    pos = min(pos, len(word))
    P = _T.identity()
    for x in word[:pos]:
        P = P * _T.E[x]
    P = P * _T.F[j]
    for x in word[pos:]:
        P = P * _T.E[x]
    assume(not P.is_zero())
    X = TruncSeries([_BASE.coeffs[0] + P * c, _BASE.coeffs[1]], 1)
    assert not congruence_check(_T, X, _BASE, POSITIVE)


# -- factorization and coproduct -------------------------------------------------------------

def test_factorization_trivial_rep():
    for N in (1, 2, 3):
        CR = embed(trivial_rep(Params(N)))
        assert all(check_factorization(CR, i, 3)["status"] == "pass" for i in range(1, N + 1))


def test_factorization_rank_one():
    rep = check_factorization(V(1, 3), 1, 4)
    assert rep["status"] == "pass" and rep["theorem"] == "factorization" and rep["M"] == 4


def test_factorization_rank_two_q3():
    assert all(check_factorization(V(2, 3), i, 3)["status"] == "pass" for i in (1, 2))


def test_factorization_tensor_rank_three():
    T = VW(3, 2, -4)
    assert all(check_factorization(T, i, 3)["status"] == "pass" for i in (1, 2, 3))


def test_factorization_fault_is_caught():
    rep = check_factorization(V(2, 2), 1, 3, drop_theta_term=True)
    assert rep["status"] == "fail"
    assert rep["witnesses"][0]["nu"] == [-1, -1]


def test_coproduct_with_trivial_second_factor():
    W, triv = V(2, 3), trivial_rep(Params(2))
    for i in (1, 2):
        rep = check_coproduct(W, triv, i, 3)
        assert rep["status"] == "pass" and rep["first_form"] == "pass"


def test_coproduct_rank_two():
    for i in (1, 2):
        rep = check_coproduct(V(2, 3), V(2, -1), i, 3)
        assert rep["status"] == "pass" and rep["first_form"] == "pass"


def test_coproduct_fault_is_caught():
    rep = check_coproduct(V(2, 3), V(2, -1), 1, 3, drop_theta_term=True)
    assert rep["status"] == "fail" and rep["witnesses"]


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_omega_prime_congruences(N):
    W = V(N, 2)
    for i in range(1, N + 1):
        rep = check_omega_prime(W, i)
        assert rep["status"] == "pass", (i, rep["witnesses"][:2])


# -- Drinfeld polynomials and q-characters ---------------------------------------------------

def test_star_and_dagger():
    a, C = qpow(3), qpow(6)
    assert p_star([a]) == [qpow(-3)]
    assert p_dagger([a], C) == [C / a]
    z = sympy.Symbol("z")
    av, Cv = sympy.Integer(7), sympy.Integer(5)
    P = 1 - av * z
    Pd = 1 - Cv / av * z
    # P(z) = xi z^deg P^dagger(C^{-1} z^{-1})
    assert sympy.simplify(P / (z * Pd.subs(z, 1 / (Cv * z)))) == -av


def test_poly_from_roots():
    assert poly_from_roots([q, qpow(2)]) == [ONE, -(q + qpow(2)), qpow(3)]
    assert poly_from_roots([]) == [ONE]


def test_trivial_rep_polys_and_characters():
    T = trivial_rep(Params(2))
    (entry,) = drinfeld_polys(T)
    assert entry["Q"] == {1: [], 2: []} and entry["R"] == {1: [], 2: []}
    assert qchar(T).to_json() == [{"Y": [], "mult": 1}]
    data = boundary_qchar(embed(T), 3)
    assert len(data.entries) == 1
    assert all(s.coeffs == [ONE, ZERO, ZERO, ZERO] for s in data.entries[0]["gamma"].values())


def test_qchar_rank_one():
    chi = qchar(eval_module(Params(1), q), 4).to_json()
    assert chi == [{"Y": [{"i": 1, "a": "q^-1", "e": 1}], "mult": 1},
                   {"Y": [{"i": 1, "a": "q", "e": -1}], "mult": 1}]


def test_psi_eigenvalues_rank_one_brute_force():
    # top vector of V(a): psi(z) = q (1 - q^{-1} b z) / (1 - q b z) with b = a q^{-2}
    a = qpow(3)
    W = eval_module(Params(1), a)
    M = 4
    data = drinfeld_ladder(W, 1, M)
    b = a * qpow(-2)
    expected = TruncSeries.from_rational([q, -b], [ONE, -q * b], M)
    got = [data.psi[m][0, 0] for m in range(M + 1)]
    assert got == expected.coeffs
    assert all(data.psi[m].is_diagonal() for m in range(M + 1))


def test_qchar_rank_two_known():
    chi = qchar(V(2, 2), 5)
    mons = {tuple((y["i"], y["a"], y["e"]) for y in t["Y"]) for t in chi.to_json()}
    assert mons == {((1, "-q^-1", 1),), ((1, "-q", -1), (2, "-1", 1)), ((2, "-q^2", -1),)}


@given(st.sampled_from([1, 2]), st.integers(-4, 4), st.integers(-4, 4))
def test_qchar_multiplicative(N, k1, k2):
    Vk, Wk = V(N, k1), V(N, k2)
    T = VW(N, k1, k2)
    assert qchar(T).multiset() == (qchar(Vk) * qchar(Wk)).multiset()


def test_format_scalar():
    assert format_scalar(qpow(3)) == "q^3"
    assert format_scalar(-qpow(-1)) == "-q^-1"
    assert parse_scalar(format_scalar(qpow(1) * 2)) == qpow(1) * 2


# -- boundary spectra ------------------------------------------------------------------------

def _scaled(data: LWeightData, c):
    return LWeightData([{"mult": e["mult"], "gamma": {i: s.map(lambda x: x * c) for i, s in e["gamma"].items()}}
                        for e in data.entries], data.M)


@pytest.mark.parametrize("N,k", [(1, 3), (1, 2), (2, 3)])
def test_spectrum_predictions(N, k):
    CR = embed(V(N, k))
    data = boundary_qchar(CR, 4, verify=False)
    assert sum(e["mult"] for e in data.entries) == CR.dim
    for i in range(1, N + 1):
        assert spectrum_verify(CR, i, data, 4)
        assert all(e["gamma"][i].coeffs[0] == ONE for e in data.entries)
        assert specialization_oracle(CR, i, data, 4, 3)["status"] == "pass"


def test_spectrum_rank_one_two_series():
    data = boundary_qchar(embed(V(1, 3)), 4)
    assert len(data.entries) == 2


def test_thmC_prediction_matches_direct_eigenvalues_rank_one():
    CR = embed(V(1, 3))
    d = CR.diagram
    grave = Theta_series(CR, 1, 4)[1]
    for lw in ell_weights(CR.base, 5):
        kappa = {1: qpow(lw.weight[0])}
        gamma = thmC_predict(lw.polys(), CR.C, kappa, d.tau, 4)[1]
        # the l-weight vectors of V(a) are the standard basis vectors
        idx = CR.base.weights.index(tuple(lw.weight))
        assert [grave.coeffs[m][idx, idx] for m in range(5)] == gamma.coeffs


def test_spectrum_fault_perturbed_gamma():
    CR = embed(V(2, 3))
    data = boundary_qchar(CR, 4, verify=False)
    rep = spectrum_report(CR, 1, _scaled(data, q), 4)
    assert rep["status"] == "fail" and rep["witnesses"][0]["m"] == 0


def test_multiplicities_must_sum_to_dim():
    CR = embed(V(2, 3))
    data = boundary_qchar(CR, 3, verify=False)
    short = LWeightData(data.entries[:-1], 3)
    assert not spectrum_verify(CR, 1, short, 3)


# -- module action ---------------------------------------------------------------------------

def test_y_substitution_and_gamma():
    C = qpow(3)
    tau = lambda i: 3 - i  # noqa: E731
    mono = Counter({(1, q): 1})
    assert y_substitution(mono, C, tau) == Counter({(2, C * q): 1, (1, qpow(-1)): -1})
    g = monomial_to_gamma(Counter(), [1, 2], 3)
    assert all(s.coeffs == [ONE, ZERO, ZERO, ZERO] for s in g.values())


def test_module_action_trivial_trivial():
    T = trivial_rep(Params(2))
    assert module_action_check(T, trivial_rep(Params(2)), 3)["status"] == "pass"


def test_module_action_trivial_and_evaluation():
    rep = module_action_check(trivial_rep(Params(2)), V(2, 2), 3)
    assert rep["status"] == "pass", rep["witnesses"]


def test_module_action_two_evaluations():
    rep = module_action_check(V(2, -1), V(2, 3), 3)
    assert rep["status"] == "pass", rep["witnesses"]


# -- auxiliary identities --------------------------------------------------------------------

@pytest.mark.parametrize("N", [3, 4, 5])
def test_appendix_lemmas(N):
    rep = appendix_lemmas(V(N, 2))
    assert rep["pass"], rep["failures"]
    ids = {r["id"] for r in rep["relations"]}
    assert "F-Etilde-commute" in ids
    assert ("braid-pair-even" in ids) == (N % 2 == 0)
    assert ("nested-bracket-zero" in ids) == (N == 5)
