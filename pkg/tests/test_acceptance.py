"""The ten acceptance criteria, one test each.  Every test prints a PASS/FAIL line."""

import dataclasses

from qspair.charlab import (appendix_lemmas, boundary_qchar, check_coproduct, check_factorization,
                            ell_weights, LWeightData, module_action_check, spectrum_report,
                            spectrum_verify, specialization_oracle, thmC_predict)
from qspair.coideal import dual_oracle_check, embed, verify_kolb
from qspair.loopalg import Params, eval_module, tensor, verify_relations
from qspair.rootdata import root_suite
from qspair.scalars import qpow
from qspair.symnc import lemma_suite

q = qpow(1)


def _params(N, u):
    return Params(N, (u,) * (N + 1) if u is not None else ())


def _ev(N, a, u=None):
    return eval_module(_params(N, u), a)


def test_criterion_01_relation_gates(criterion):
    with criterion(1, "relation gates (loop algebra and coideal relations)", 120):
        for u in (None, q):
            for N in range(1, 6):
                for a in (qpow(2), qpow(-3)):
                    W = _ev(N, a, u)
                    assert verify_relations(W)["pass"], (N, a, u)
                    assert verify_kolb(W)["pass"], (N, a, u)
            for N in range(1, 4):
                T = tensor(_ev(N, qpow(2), u), _ev(N, qpow(-4), u))
                assert verify_relations(T)["pass"], (N, u)
                assert verify_kolb(T)["pass"], (N, u)


def test_criterion_02_symbolic_lemmas(criterion):
    with criterion(2, "symbolic lemma suite: P = P' (k = 3..6), exchange (k <= 6)", 30):
        rep = lemma_suite(6)
        assert rep["pass"], rep["failures"]
        ks = {r["k"] for r in rep["relations"] if r["id"] == "P=P'"}
        assert ks == {3, 4, 5, 6}
        assert {r["k"] for r in rep["relations"] if r["id"] == "exchange"} == {2, 3, 4, 5, 6}


def test_criterion_03_root_suite(criterion):
    with criterion(3, "root combinatorics for n <= 4", 30):
        for N in range(1, 9):
            rep = root_suite(N)
            assert rep["ok"], N


def test_criterion_04_dual_oracle(criterion):
    with criterion(4, "dual oracle A_{i,r}, r in {-1,0,1,2}, N = 2..4", 300):
        for N in (2, 3, 4):
            rep = dual_oracle_check(_ev(N, qpow(2)))
            assert rep["pass"], (N, rep["failures"][:3])
            assert len(rep["relations"]) == 4 * N


def test_criterion_05_factorization(criterion):
    with criterion(5, "factorization to order 4 on V(a) and V(q^2)(x)V(q^-4)", 600):
        for N in range(1, 5):
            for a in (qpow(2), qpow(-3)):
                CR = embed(_ev(N, a))
                for i in range(1, N + 1):
                    rep = check_factorization(CR, i, 4)
                    assert rep["status"] == "pass", (N, a, i, rep["witnesses"][:2])
        for N in range(1, 4):
            CR = embed(tensor(_ev(N, qpow(2)), _ev(N, qpow(-4))))
            for i in range(1, N + 1):
                rep = check_factorization(CR, i, 4)
                assert rep["status"] == "pass", (N, i, rep["witnesses"][:2])


def test_criterion_06_coproduct(criterion):
    with criterion(6, "coproduct to order 3 on (V(q^3), V(q^-1))", 600):
        for N in range(1, 4):
            Va, Wb = _ev(N, qpow(3)), _ev(N, qpow(-1))
            for i in range(1, N + 1):
                rep = check_coproduct(Va, Wb, i, 3)
                assert rep["status"] == "pass" and rep["first_form"] == "pass", (N, i)


def test_criterion_07_spectrum(criterion):
    with criterion(7, "spectrum: closed form verified and confirmed at v = 3", 300):
        for N in (1, 2):
            for a in (qpow(2), qpow(3), qpow(-3)):
                CR = embed(_ev(N, a))
                d = CR.diagram
                entries = []
                for lw in ell_weights(CR.base, 5):
                    kappa = {i: qpow(lw.weight[i - 1]) for i in d.finite_nodes}
                    entries.append({"mult": lw.mult,
                                    "gamma": thmC_predict(lw.polys(), CR.C, kappa, d.tau, 4)})
                data = LWeightData(entries, 4)
                for i in d.finite_nodes:
                    assert spectrum_verify(CR, i, data, 4), (N, a, i)
                    oracle = specialization_oracle(CR, i, data, 4, 3)
                    assert oracle["status"] == "pass", (N, a, i, oracle["witnesses"])


def test_criterion_08_module_action(criterion):
    with criterion(8, "boundary q-character compatibility, both forms, N = 2, M = 3", 300):
        from qspair.loopalg import trivial_rep
        p = Params(2)
        for Vc, W in ((trivial_rep(p), _ev(2, qpow(2))), (_ev(2, qpow(-1)), _ev(2, qpow(3)))):
            rep = module_action_check(Vc, W, 3)
            assert rep["status"] == "pass", rep["witnesses"]


def test_criterion_09_appendix(criterion):
    with criterion(9, "auxiliary identities on V(q^2), N = 5 and N = 4", 120):
        for N, expect in ((5, {"F-Etilde-commute", "braid-pair-odd", "boldP-affine-node", "nested-bracket-zero"}), (4, {"F-Etilde-commute", "braid-pair-even"})):
            rep = appendix_lemmas(_ev(N, qpow(2)))
            assert rep["pass"], (N, rep["failures"])
            assert {r["id"] for r in rep["relations"]} == expect


def test_criterion_10_fault_injection(criterion):
    with criterion(10, "fault injections caught with witnesses", 60):
        # scaled E_0
        W = _ev(2, qpow(3))
        bad = dataclasses.replace(W, E=[W.E[0] * q] + W.E[1:], cache={})
        rep = verify_relations(bad)
        assert not rep["pass"] and all("witness" in r for r in rep["failures"])
        # dropped T^{-1}_theta(B_0) term; it only occurs at the middle nodes of an even diagram
        for N in (2, 4):
            rep = check_factorization(_ev(N, qpow(2)), N // 2, 3, drop_theta_term=True)
            assert rep["status"] == "fail" and rep["witnesses"][0]["nu"]
        rep = check_coproduct(_ev(2, qpow(3)), _ev(2, qpow(-1)), 1, 3, drop_theta_term=True)
        assert rep["status"] == "fail" and rep["witnesses"]
        # perturbed gamma
        CR = embed(_ev(2, qpow(3)))
        data = boundary_qchar(CR, 4, verify=False)
        scaled = LWeightData([{"mult": e["mult"],
                               "gamma": {i: s.map(lambda x: x * q) for i, s in e["gamma"].items()}}
                              for e in data.entries], 4)
        rep = spectrum_report(CR, 1, scaled, 4)
        assert rep["status"] == "fail" and rep["witnesses"]
