"""The coideal subalgebra inside a loop-algebra representation.

B_i acts as F_i + c_i E_tau(i) K_i^{-1} and 𝕂_i as c_i K_i K_tau(i)^{-1}
(or -q^2 c_i at a tau-fixed node).  Everything here is computed as exact
matrices on a given ``Rep``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .loopalg import Rep, serre_poly
from .matrix import Matrix, commutator, qbracket
from .rootdata import SatakeDiagram, fundamental_weight_word
from .scalars import ONE, ZERO, Scalar, TruncSeries, qint, qpow, rho
from .symnc import BraidOracle, bracket_program_library

__all__ = [
    "CoidealRep", "KolbError", "b_matrix", "kk_matrix", "embed", "verify_kolb",
    "A_minus1", "theta_inv_b0", "H1", "A_modes", "A_series", "Theta_series",
    "oracle_A", "dual_oracle_check", "braid_oracle", "lw_relation_checks", "grave_prefactor",
]


class KolbError(RuntimeError):
    pass


def b_matrix(V: Rep, j: int) -> Matrix:
    d = V.diagram
    return V.F[j] + V.Et(d.tau(j)) * V.Ktp(j)


def kk_matrix(V: Rep, j: int) -> Matrix:
    d = V.diagram
    t = d.tau(j)
    m = V.Kt(j) * V.Ktp(t)
    return m * (-qpow(2)) if t == j else m


@dataclass
class CoidealRep:
    base: Rep
    B: dict
    KK: dict
    C: Scalar
    cache: dict = field(default_factory=dict)

    @property
    def diagram(self) -> SatakeDiagram:
        return self.base.diagram

    @property
    def N(self) -> int:
        return self.base.N

    @property
    def dim(self) -> int:
        return self.base.dim

    def identity(self) -> Matrix:
        return self.base.identity()

    def Kinv(self, j: int) -> Matrix:
        return self.base.k_atom("KK", j, -1)

    def to_json(self) -> dict:
        return {"N": self.N, "dim": self.dim, "C": str(self.C),
                "B": {str(j): m.to_json() for j, m in sorted(self.B.items())},
                "KK": {str(j): m.to_json() for j, m in sorted(self.KK.items())}}


def _as_coideal(X) -> CoidealRep:
    return X if isinstance(X, CoidealRep) else embed(X)


def embed(V: Rep, check: bool = True) -> CoidealRep:
    """Restrict V to the coideal subalgebra; by default gate on the defining relations of the coideal."""
    key = ("coideal",)
    if key in V.cache:
        return V.cache[key]
    d = V.diagram
    CR = CoidealRep(V, {j: V.letter(f"B{j}") for j in d.nodes},
                    {j: V.k_atom("KK", j, 1) for j in d.nodes}, V.params.C)
    if check:
        rep = verify_kolb(CR)
        if not rep["pass"]:
            bad = rep["failures"][0]
            raise KolbError(f"coideal relation {bad['id']} fails at {bad['indices']}")
        V.cache[key] = CR
    return CR


def _record(rel, rid, idx, mat):
    entry = {"id": rid, "indices": list(idx), "pass": mat.is_zero()}
    if not entry["pass"]:
        i, j, x = next(iter(mat.entries()))
        entry["witness"] = {"row": i, "col": j, "value": str(x)}
    rel.append(entry)


def _report(rel) -> dict:
    return {"pass": all(r["pass"] for r in rel), "relations": rel,
            "failures": [r for r in rel if not r["pass"]]}


def verify_kolb(X) -> dict:
    """Check the defining coideal relations for the images of B_i, 𝕂_i."""
    if isinstance(X, CoidealRep):
        V, B, K, C = X.base, X.B, X.KK, X.C
    else:
        V = X
        d = V.diagram
        B = {j: V.letter(f"B{j}") for j in d.nodes}
        K = {j: V.k_atom("KK", j, 1) for j in d.nodes}
        C = V.params.C
    d = V.diagram
    rel = []
    # the central element (-q)^{N-1} 𝕂_delta must act by the scalar C
    Kd = V.identity()
    for j in d.nodes:
        Kd = Kd * K[j]
    _record(rel, "C-scalar", (), Kd * ((-qpow(1)) ** (d.N - 1)) - V.identity() * C)
    for i in d.nodes:
        t = d.tau(i)
        for j in d.nodes:
            _record(rel, "K-commute", (i, j), commutator(K[i], K[j]))
            e = -d.a(i, j) + d.a(t, j)
            _record(rel, "KB", (i, j), K[i] * B[j] - (B[j] * K[i]) * qpow(e))
            if i == j:
                continue
            lhs = serre_poly(B[i], B[j], d.a(i, j))
            if t != i and d.a(t, j) != 2:
                rhs = Matrix(V.dim)
            elif t != i and d.a(i, t) == 0:
                rhs = (K[t] - K[i]) * rho().inverse()
            elif t != i:
                rhs = (K[i] * B[i] + B[i] * K[t]) * (-qpow(1) * qint(2))
            elif d.a(i, j) == 0:
                rhs = Matrix(V.dim)
            elif d.a(i, j) == -1:
                rhs = (B[j] * K[i]) * (-qpow(-1))
            else:
                rhs = (K[i] * commutator(B[i], B[j])) * (-qpow(-1) * qint(2) ** 2)
            _record(rel, "Serre", (i, j), lhs - rhs)
    return _report(rel)


def braid_oracle(X) -> BraidOracle:
    CR = _as_coideal(X)
    return BraidOracle(CR.diagram, CR.B, CR.KK, CR.identity())


# -- Drinfeld-type generators ---------------------------------------------------------------

def A_minus1(X, i: int) -> Matrix:
    """A_{i,-1} from its explicit bracket program."""
    CR = _as_coideal(X)
    key = ("A-1", i)
    if key not in CR.cache:
        CR.cache[key] = CR.base.eval_prog(bracket_program_library(CR.diagram, "A_minus1", i))
    return CR.cache[key]


def theta_inv_b0(X, k_index: int | None = None) -> Matrix:
    CR = _as_coideal(X)
    key = ("TthetaInvB0", k_index)
    if key not in CR.cache:
        CR.cache[key] = CR.base.eval_prog(
            bracket_program_library(CR.diagram, "TthetaInvB0", k_index=k_index))
    return CR.cache[key]


def H1(X, i: int) -> Matrix:
    """H_{i,1} by the case formula for a_{i,tau(i)} in {0, 2, -1}."""
    CR = _as_coideal(X)
    d = CR.diagram
    t = d.tau(i)
    key = ("H1", i)
    if key in CR.cache:
        return CR.cache[key]
    c = d.case(i)
    if c == 0:
        out = (CR.Kinv(t) * commutator(CR.B[i], A_minus1(CR, t))) * CR.C
    elif c == 2:
        out = (CR.Kinv(i) * qbracket(CR.B[i], A_minus1(CR, i), qpow(2))) * (-CR.C)
    else:
        out = (CR.Kinv(t) * qbracket(CR.B[i], A_minus1(CR, t), qpow(-1))) * (qpow(1) * CR.C) \
            + (theta_inv_b0(CR) * CR.KK[i]) * (qpow(1) * d.sign(i))
    CR.cache[key] = out
    return out


def A_modes(X, i: int, M: int) -> dict:
    """{r: A_{i,r}} for -1 <= r <= M+1, from [H_{i,1}, A_{i,r}] = [2]A_{i,r+1} - [a_{tau(i),i}] C A_{i,r-1}."""
    CR = _as_coideal(X)
    d = CR.diagram
    key = ("Amodes", i)
    have = CR.cache.get(key)
    if have is not None and max(have) >= M + 1:
        return have
    h = H1(CR, i)
    two_inv = qint(2).inverse()
    lower = qint(d.a(d.tau(i), i)) * CR.C
    A = {-1: A_minus1(CR, i), 0: CR.B[i]}
    for r in range(M + 1):
        A[r + 1] = (commutator(h, A[r]) + A[r - 1] * lower) * two_inv
    CR.cache[key] = A
    return A


def A_series(X, i: int, M: int) -> TruncSeries:
    A = A_modes(X, i, M)
    return TruncSeries([A[r] for r in range(M + 1)], M)


def grave_prefactor(X, i: int, M: int) -> TruncSeries:
    """rho (1 - q^{-a} C z^2) / (1 - C z^2), a = a_{i,tau(i)}: the ratio Θ̀_i / Θ_i."""
    CR = _as_coideal(X)
    d = CR.diagram
    a = d.a(i, d.tau(i))
    return TruncSeries.from_rational([rho(), ZERO, -rho() * qpow(-a) * CR.C], [ONE, ZERO, -CR.C], M)


def _shifted(coeffs: list, k: int, M: int, dim: int) -> TruncSeries:
    """z^k * sum coeffs[r] z^r truncated at order M."""
    z = Matrix(dim)
    return TruncSeries(([z] * k + list(coeffs))[: M + 1], M, zero=z)


def _scalar_series_times(s: TruncSeries, X: TruncSeries) -> TruncSeries:
    return TruncSeries([sum((X.coeffs[j] * s.coeffs[k - j] for j in range(1, k + 1)),
                            X.coeffs[0] * s.coeffs[k]) for k in range(X.order + 1)], X.order)


def Theta_series(X, i: int, M: int, drop_theta_term: bool = False) -> tuple:
    """(Θ_i(z), Θ̀_i(z)) to order M.

    Θ̀ comes from the case formula in terms of the series 𝐀_i; Θ is obtained by
    dividing out ``grave_prefactor``.  ``drop_theta_term`` removes the
    T_theta^{-1}(B_0) contribution (used for fault injection).
    """
    CR = _as_coideal(X)
    d = CR.diagram
    key = ("Theta", i, M, drop_theta_term)
    if key in CR.cache:
        return CR.cache[key]
    t = d.tau(i)
    n = CR.dim
    q = qpow(1)
    C = CR.C
    A = A_modes(CR, i, M)
    Ai = [A[r] for r in range(M + 1)]
    geo = TruncSeries.from_rational([ONE], [ONE, ZERO, -C], M)
    c = d.case(i)
    if c == 0:
        coeffs = [(CR.Kinv(t) * commutator(Ai[r], CR.B[t])) * rho() for r in range(M + 1)]
        coeffs[0] = coeffs[0] + CR.KK[i] * CR.Kinv(t)
        grave = TruncSeries(coeffs, M)
    elif c == 2:
        body = _shifted([qbracket(A[-1], a, qpow(-2)) for a in Ai], 1, M, n) \
            + _shifted([qbracket(A[0], a, qpow(2)) * (-qpow(-2)) for a in Ai], 2, M, n)
        pre = CR.Kinv(i) * (q * q * rho() * C)
        grave = _scalar_series_times(geo, body).map(lambda m: pre * m)
        grave.coeffs[0] = grave.coeffs[0] + CR.identity()
    else:
        At = A_modes(CR, t, M)
        o = d.sign(i)
        body = _shifted([qbracket(At[-1], a, q) for a in Ai], 1, M, n) \
            + _shifted([qbracket(At[0], a, qpow(-1)) * (-q) for a in Ai], 2, M, n)
        extra = [CR.KK[t] * (-rho() * C).inverse()]
        extra.append(Matrix(n) if drop_theta_term
                     else (CR.KK[t] * theta_inv_b0(CR) * CR.KK[i]) * (-o * q * C.inverse()))
        extra.append(CR.KK[i] * rho().inverse())
        body = body + _shifted(extra, 0, M, n)
        pre = CR.Kinv(t) * (-rho() * C)
        grave = _scalar_series_times(geo, body).map(lambda m: pre * m)
    theta = _scalar_series_times(grave_prefactor(CR, i, M).inverse(), grave)
    CR.cache[key] = (theta, grave)
    return theta, grave


def oracle_A(X, i: int, r: int) -> Matrix:
    """A_{i,r} = o(i)^r T_{varpi_i}^{-r}(B_i), by the generator-wise braid action."""
    if abs(r) > 2:
        raise ValueError("oracle_A supports -2 <= r <= 2")
    CR = _as_coideal(X)
    key = ("oracleA", i, r)
    if key in CR.cache:
        return CR.cache[key]
    d = CR.diagram
    o = braid_oracle(CR)
    if r:
        o = o.apply_word(fundamental_weight_word(d, i), -r)
    out = o.B[i] * (d.sign(i) ** abs(r))
    CR.cache[key] = out
    return out


def dual_oracle_check(X, rs=(-1, 0, 1, 2)) -> dict:
    """Ladder modes A_{i,r} against the braid-group oracle, every finite node i."""
    CR = _as_coideal(X)
    d = CR.diagram
    M = max(max(rs), 0) + 1
    rel = []
    for i in d.finite_nodes:
        A = A_modes(CR, i, M)
        for r in rs:
            _record(rel, "dual-oracle", (i, r), A[r] - oracle_A(CR, i, r))
    return _report(rel)


# -- Drinfeld-type relation checks ----------------------------------------------------------

def lw_relation_checks(X, M: int = 3, rmax: int = 2) -> dict:
    """Θ_{i,0}, Θ_{i,1} = H_{i,1}, Cartan commutativity and the A-mode exchange relations."""
    CR = _as_coideal(X)
    d = CR.diagram
    n = CR.dim
    q = qpow(1)
    C = CR.C
    rel = []
    nodes = list(d.finite_nodes)
    need = max(M, 2 * rmax + 2)
    thetas = {i: Theta_series(CR, i, need)[0] for i in nodes}
    A = {i: A_modes(CR, i, need) for i in nodes}

    def th(j, m):
        return thetas[j].coeffs[m] if m >= 0 else Matrix(n)

    for i in nodes:
        _record(rel, "Theta_0", (i,), thetas[i].coeffs[0] - CR.identity() * rho().inverse())
        _record(rel, "Theta_1=H_1", (i,), thetas[i].coeffs[1] - H1(CR, i))
    modes = [(i, m) for i in nodes for m in range(1, M + 1)]
    for a, (i, r) in enumerate(modes):
        for (j, s) in modes[a + 1:]:
            _record(rel, "Theta-commute", (i, r, j, s), commutator(th(i, r), th(j, s)))
        _record(rel, "Theta-K-commute", (i, r), sum((commutator(th(i, r), CR.KK[k]) for k in nodes), Matrix(n)))
    for i in nodes:
        t = d.tau(i)
        for j in nodes:
            for r in range(rmax + 1):
                lhs = commutator(H1(CR, i), A[j][r])
                rhs = A[j][r + 1] * qint(d.a(i, j)) - A[j][r - 1] * (qint(d.a(t, j)) * C)
                _record(rel, "H1-A", (i, j, r), lhs - rhs)
            for r in range(rmax + 1):
                for s in range(rmax + 1):
                    Ar, As = A[i][r], A[j][s]
                    if j == t and j != i and d.a(i, t) == 0:
                        rhs = (CR.KK[t] * th(i, r - s)) * C ** s - (CR.KK[i] * th(t, s - r)) * C ** r
                        _record(rel, "A-A-tau", (i, j, r, s), commutator(Ar, As) - rhs)
                    elif j != t and d.a(i, j) == 0:
                        _record(rel, "commute", (i, j, r, s), commutator(Ar, As))
                    if j != t:
                        a = d.a(i, j)
                        lhs = qbracket(Ar, A[j][s + 1], qpow(-a)) \
                            - qbracket(A[i][r + 1], As, qpow(a)) * qpow(-a)
                        _record(rel, "A-A-shift", (i, j, r, s), lhs)
                    elif i == t:
                        K = CR.KK[i]
                        lhs = qbracket(Ar, A[i][s + 1], qpow(-2)) \
                            - qbracket(A[i][r + 1], As, qpow(2)) * qpow(-2)
                        rhs = (K * th(i, s - r + 1)) * (qpow(-2) * C ** r) \
                            - (K * th(i, s - r - 1)) * (qpow(-4) * C ** (r + 1)) \
                            + (K * th(i, r - s + 1)) * (qpow(-2) * C ** s) \
                            - (K * th(i, r - s - 1)) * (qpow(-4) * C ** (s + 1))
                        _record(rel, "A-A-self", (i, r, s), lhs - rhs)
                    elif d.a(i, t) == -1:
                        Ki, Kt = CR.KK[i], CR.KK[t]
                        lhs = qbracket(Ar, A[t][s + 1], q) - qbracket(A[i][r + 1], As, qpow(-1)) * q
                        rhs = -(Ki * th(t, s - r + 1)) * C ** r \
                            + (Ki * th(t, s - r - 1)) * (q * C ** (r + 1)) \
                            - (Kt * th(i, r - s + 1)) * C ** s \
                            + (Kt * th(i, r - s - 1)) * (q * C ** (s + 1))
                        _record(rel, "A-A-tau-adjacent", (i, r, s), lhs - rhs)
    return _report(rel)
