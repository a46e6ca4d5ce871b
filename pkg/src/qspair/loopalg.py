"""Finite-dimensional representations of the quantum loop algebra of sl_{N+1}.

Generators are stored as matrices for E_i, F_i, K_i^{±1} (i = 0..N).  The
double's generators are read through the dictionary

    Ẽ_i -> u_i E_i,   F̃_i -> F_i,   K̃_i -> u_i K_i,   K̃'_i -> u_i K_i^{-1},

with c_i = u_i^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .matrix import Matrix, commutator, qbracket
from .rootdata import SatakeDiagram, build_satake
from .scalars import ONE, Scalar, as_scalar, qbinom, qint, qpow, rho
from .symnc import KMono, NCPoly, Prog, bracket_program_library

__all__ = [
    "Params", "Rep", "RelationError", "eval_module", "trivial_rep", "tensor",
    "verify_relations", "graded_component", "graded_decomposition",
    "drinfeld_seed", "drinfeld_ladder", "DrinfeldData", "serre_poly", "seed_gate",
    "cross_seed_gate", "phi_alt",
]


class RelationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Params:
    N: int
    u: tuple = ()

    def __post_init__(self):
        u = tuple(as_scalar(x) for x in (self.u or (ONE,) * (self.N + 1)))
        if len(u) != self.N + 1:
            raise ValueError(f"u must have {self.N + 1} entries")
        if any(x.is_zero() for x in u):
            raise ValueError("u entries must be invertible")
        d = build_satake(self.N)
        if any(u[i] != u[d.tau(i)] for i in d.nodes):
            raise ValueError("u must be tau-symmetric")
        object.__setattr__(self, "u", u)

    @property
    def diagram(self) -> SatakeDiagram:
        return build_satake(self.N)

    def c(self, i: int) -> Scalar:
        return self.u[i] * self.u[i]

    @property
    def c_delta(self) -> Scalar:
        out = ONE
        for i in range(self.N + 1):
            out = out * self.c(i)
        return out

    @property
    def c_delta_half(self) -> Scalar:
        out = ONE
        for x in self.u:
            out = out * x
        return out

    @property
    def C(self) -> Scalar:
        e = self.N + 3 if self.N % 2 else self.N + 1
        return qpow(1) ** e * self.c_delta

    def to_json(self) -> dict:
        return {"N": self.N, "u": [str(x) for x in self.u]}


@dataclass
class Rep:
    params: Params
    dim: int
    weights: list  # per basis vector: tuple over I0 (exponent of q for K_1..K_N)
    E: list
    F: list
    K: list
    labels: list = field(default_factory=list)
    cache: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def diagram(self) -> SatakeDiagram:
        return self.params.diagram

    def Kinv(self, i: int) -> Matrix:
        key = ("Kinv", i)
        if key not in self.cache:
            self.cache[key] = self.K[i].inverse()
        return self.cache[key]

    def identity(self) -> Matrix:
        return Matrix.identity(self.dim)

    # dictionary images
    def Et(self, i: int) -> Matrix:
        return self.E[i] * self.params.u[i]

    def Kt(self, i: int) -> Matrix:
        return self.K[i] * self.params.u[i]

    def Ktp(self, i: int) -> Matrix:
        return self.Kinv(i) * self.params.u[i]

    def k_atom(self, name: str, idx: int, exp: int) -> Matrix:
        """Matrix of a Cartan letter to a power: K, Kt (K̃), Ktp (K̃'), KK (coideal 𝕂)."""
        key = ("katom", name, idx, exp)
        if key in self.cache:
            return self.cache[key]
        if name == "K":
            base = self.K[idx] if exp > 0 else self.Kinv(idx)
        elif name == "Kt":
            base = self.Kt(idx) if exp > 0 else self.Kt(idx).inverse()
        elif name == "Ktp":
            base = self.Ktp(idx) if exp > 0 else self.Ktp(idx).inverse()
        elif name == "KK":
            from .coideal import kk_matrix
            m = kk_matrix(self, idx)
            base = m if exp > 0 else m.inverse()
        else:
            raise ValueError(f"unknown Cartan letter {name}")
        out = base ** abs(exp)
        self.cache[key] = out
        return out

    def letter(self, name: str) -> Matrix:
        """Matrix for a letter: E_j (as Ẽ_j), F_j, Et_j (E_tau(j) K̃'_j), B_j."""
        key = ("letter", name)
        if key in self.cache:
            return self.cache[key]
        import re
        m = re.fullmatch(r"(Et|E|F|B)(\d+)", name)
        if not m:
            raise ValueError(f"unknown letter {name}")
        kind, j = m.group(1), int(m.group(2))
        d = self.diagram
        if kind == "E":
            out = self.Et(j)
        elif kind == "F":
            out = self.F[j]
        elif kind == "Et":
            out = self.Et(d.tau(j)) * self.Ktp(j)
        else:
            from .coideal import b_matrix
            out = b_matrix(self, j)
        self.cache[key] = out
        return out

    def eval_poly(self, p: NCPoly) -> Matrix:
        def k_fn(m: KMono):
            acc = self.identity()
            for (name, idx), e in m.factors:
                acc = acc * self.k_atom(name, idx, e)
            return acc
        return p.evaluate(self.letter, k_fn, self.identity())

    def eval_prog(self, prog: Prog) -> Matrix:
        return prog.evaluate(_RepAlgebra(self))

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(), "dim": self.dim,
            "labels": list(self.labels), "weights": [list(w) for w in self.weights],
            "E": [m.to_json() for m in self.E], "F": [m.to_json() for m in self.F],
            "K": [m.to_json() for m in self.K],
        }


class _RepAlgebra:
    def __init__(self, rep: Rep):
        self.rep = rep

    def letter(self, name):
        return self.rep.letter(name)

    def k(self, name, idx, exp):
        return self.rep.k_atom(name, idx, exp)


def _k_from_weights(N: int, weights: Sequence) -> list:
    """K_1..K_N diagonal from weights, K_0 = (K_1...K_N)^{-1}."""
    K = [None] * (N + 1)
    for i in range(1, N + 1):
        K[i] = Matrix.diag([qpow(w[i - 1]) for w in weights])
    K[0] = Matrix.diag([qpow(-sum(w)) for w in weights])
    return K


def eval_module(params: Params, a, check: bool = True) -> Rep:
    """Evaluation module V(a) on v_1..v_{N+1}."""
    a = as_scalar(a)
    if a.is_zero():
        raise ValueError("spectral parameter must be invertible")
    N = params.N
    m = N + 1
    weights = []
    for k in range(1, m + 1):
        weights.append(tuple((1 if k == i else 0) - (1 if k == i + 1 else 0) for i in range(1, N + 1)))
    E = [None] * m
    F = [None] * m
    for i in range(1, m):
        E[i] = Matrix.from_entries(m, m, [(i - 1, i, ONE)])
        F[i] = Matrix.from_entries(m, m, [(i, i - 1, ONE)])
    E[0] = Matrix.from_entries(m, m, [(m - 1, 0, a)])
    F[0] = Matrix.from_entries(m, m, [(0, m - 1, a.inverse())])
    rep = Rep(params, m, weights, E, F, _k_from_weights(N, weights),
              labels=[f"v{k}" for k in range(1, m + 1)])
    rep.cache["spectral"] = a
    if check:
        _gate(rep)
    return rep


def trivial_rep(params: Params) -> Rep:
    N = params.N
    z = Matrix(1)
    one = Matrix.identity(1)
    return Rep(params, 1, [tuple([0] * N)], [z] * (N + 1), [z] * (N + 1), [one] * (N + 1), labels=["1"])


def tensor(V: Rep, W: Rep, check: bool = True) -> Rep:
    """V ⊗ W with E -> E⊗1 + K⊗E, F -> F⊗K^{-1} + 1⊗F, K -> K⊗K."""
    if V.params != W.params:
        raise ValueError("parameter mismatch between tensor factors")
    N = V.N
    IV, IW = V.identity(), W.identity()
    E = [V.E[i].kron(IW) + V.K[i].kron(W.E[i]) for i in range(N + 1)]
    F = [V.F[i].kron(W.Kinv(i)) + IV.kron(W.F[i]) for i in range(N + 1)]
    K = [V.K[i].kron(W.K[i]) for i in range(N + 1)]
    weights = [tuple(a + b for a, b in zip(wv, ww)) for wv in V.weights for ww in W.weights]
    labels = [f"{x}⊗{y}" for x in V.labels for y in W.labels]
    rep = Rep(V.params, V.dim * W.dim, weights, E, F, K, labels=labels)
    rep.cache["factors"] = (V, W)
    if check:
        _gate(rep)
    return rep


def _gate(rep: Rep) -> None:
    report = verify_relations(rep)
    if not report["pass"]:
        bad = next(r for r in report["relations"] if not r["pass"])
        raise RelationError(f"relation {bad['id']} fails at {bad['indices']}")


def serre_poly(x, y, a: int):
    """sum_r (-1)^r [1-a choose r] x^{1-a-r} y x^r."""
    m = 1 - a
    total = None
    for r in range(m + 1):
        t = (x ** (m - r)) * y * (x ** r) * (qbinom(m, r) * (-1) ** r)
        total = t if total is None else total + t
    return total


def verify_relations(V: Rep) -> dict:
    """Check the defining relations of the double through the dictionary, as exact matrices."""
    d = V.diagram
    rel = []

    def record(rid, idx, mat):
        ok = mat.is_zero()
        entry = {"id": rid, "indices": list(idx), "pass": ok}
        if not ok:
            i, j, x = next(iter(mat.entries()))
            entry["witness"] = {"row": i, "col": j, "value": str(x)}
        rel.append(entry)

    rho_ = rho()
    Kdelta = V.identity()
    for i in d.nodes:
        Kdelta = Kdelta * V.K[i]
        record("K-invertible", (i,), V.K[i] * V.Kinv(i) - V.identity())
    record("K_delta=1", (), Kdelta - V.identity())
    for i in d.nodes:
        for j in d.nodes:
            record("K-commute", (i, j), commutator(V.K[i], V.K[j]))
            a = d.a(i, j)
            Ej, Fj = V.Et(j), V.F[j]
            record("KE", (i, j), V.Kt(i) * Ej - (Ej * V.Kt(i)) * qpow(a))
            record("KpE", (i, j), V.Ktp(i) * Ej - (Ej * V.Ktp(i)) * qpow(-a))
            record("KF", (i, j), V.Kt(i) * Fj - (Fj * V.Kt(i)) * qpow(-a))
            record("KpF", (i, j), V.Ktp(i) * Fj - (Fj * V.Ktp(i)) * qpow(a))
            rhs = (V.Kt(i) - V.Ktp(i)) * rho_.inverse() if i == j else Matrix(V.dim)
            record("EF", (i, j), commutator(V.Et(i), Fj) - rhs)
            if i != j:
                record("Serre+", (i, j), serre_poly(V.Et(i), Ej, a))
                record("Serre-", (i, j), serre_poly(V.F[i], Fj, a))
    return {"pass": all(r["pass"] for r in rel), "relations": rel,
            "failures": [r for r in rel if not r["pass"]]}


# -- weight grading -----------------------------------------------------------------------

def root_to_weight_shift(N: int, nu: Sequence[int]) -> tuple:
    """Shift in stored weights (K-exponents) caused by root-lattice degree nu over I0."""
    out = []
    for i in range(1, N + 1):
        s = 0
        for j in range(1, N + 1):
            aij = 2 if i == j else (-1 if abs(i - j) == 1 else 0)
            s += aij * nu[j - 1]
        out.append(s)
    return tuple(out)


def _root_coords(V: Rep, shift: tuple):
    """Invert the finite Cartan matrix on an integer weight shift; None if not in the root lattice."""
    key = ("rootcoords", shift)
    if key in V.cache:
        return V.cache[key]
    from fractions import Fraction
    N = V.N
    A = [[Fraction(2 if i == j else (-1 if abs(i - j) == 1 else 0)) for j in range(N)] for i in range(N)]
    b = [Fraction(x) for x in shift]
    # Gaussian elimination over Q
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for c in range(N):
        p = next(r for r in range(c, N) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(N):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    sol = [M[i][N] for i in range(N)]
    out = tuple(int(x) for x in sol) if all(x.denominator == 1 for x in sol) else None
    V.cache[key] = out
    return out


def graded_decomposition(V: Rep, X: Matrix) -> dict:
    """Split X into components by the root degree nu (over I0) they shift weights by."""
    comps: dict = {}
    for i, j, x in X.entries():
        shift = tuple(a - b for a, b in zip(V.weights[i], V.weights[j]))
        nu = _root_coords(V, shift)
        if nu is None:
            raise ValueError("operator does not respect the root grading")
        comps.setdefault(nu, Matrix(V.dim)).rows.setdefault(i, {})[j] = x
    return comps


def graded_component(V: Rep, X: Matrix, nu: Sequence[int]) -> Matrix:
    return graded_decomposition(V, X).get(tuple(nu), Matrix(V.dim))


# -- Drinfeld generators ----------------------------------------------------------------------

@dataclass
class DrinfeldData:
    """Ladder data for one node i: x^-_{i,k}, and phi/psi modes."""
    i: int
    xplus0: Matrix
    xplus_m1: Matrix
    xminus: dict  # k -> matrix
    h1: Matrix
    hm1: Matrix
    psi: list  # psi_{i,m}, m = 0..M
    phi: list  # phi_{i,-m}, m = 0..M


def drinfeld_seed(V: Rep, i: int, check: bool = True) -> dict:
    """x^±_{i,0}, x^+_{i,-1}, x^-_{i,1}, h_{i,±1} as matrices."""
    key = ("seed", i)
    if key in V.cache:
        return V.cache[key]
    d = V.diagram
    p = V.params
    o = d.sign(i)
    cdh_inv = p.c_delta_half.inverse()
    Tf = V.eval_prog(bracket_program_library(d, "TomegaPrimeF", i))
    Te = V.eval_prog(bracket_program_library(d, "TomegaPrimeE", i))
    xp0 = V.Et(i)
    xm0 = V.F[i]
    xpm1 = (Tf * V.Ktp(i)) * (-o * cdh_inv)
    xm1 = (V.Kt(i) * Te) * (-o * cdh_inv)
    r = rho()
    ui = p.u[i]
    psi1 = commutator(xp0, xm1) * (r / ui)
    phim1 = commutator(xpm1, xm0) * (-r * p.c_delta_half / ui)
    h1 = (V.Kt(i).inverse() * psi1) * (ui / r)
    hm1 = (V.Ktp(i).inverse() * phim1) * (-ui / r)
    seed = {"xplus0": xp0, "xminus0": xm0, "xplus_m1": xpm1, "xminus1": xm1,
            "h1": h1, "hm1": hm1, "psi1": psi1, "phim1": phim1}
    V.cache[key] = seed
    if check:
        gate = seed_gate(V, i, seed)
        if not gate["pass"]:
            raise RelationError(f"seed gate fails for i={i}: {gate['failures']}")
    return seed


def seed_gate(V: Rep, i: int, seed: dict | None = None) -> dict:
    """Consistency checks on the Drinfeld seeds at node i."""
    d = V.diagram
    p = V.params
    seed = seed or drinfeld_seed(V, i, check=False)
    r = rho()
    fails = []
    # [x^+_{i,-1}, x^-_{i,1}] = c_i^{1/2} c_delta^{-1/2} (K̃_i-phi... ) reduces to the k=-1, l=1 case:
    # psi_{i,0} - phi_{i,0} with prefactor c_i^{1/2} c_delta^{-1/2} / rho
    lhs = commutator(seed["xplus_m1"], seed["xminus1"])
    psi0 = V.Kt(i) * p.u[i].inverse()
    phi0 = V.Ktp(i) * p.u[i].inverse()
    rhs = (psi0 - phi0) * (p.u[i] / (p.c_delta_half * r))
    if lhs != rhs:
        fails.append(("x+_{-1} x-_{1}", i))
    for j in d.finite_nodes:
        if j == i:
            continue
        if not commutator(seed["xplus_m1"], V.F[j]).is_zero():
            fails.append(("[x+_{i,-1}, x-_{j,0}]", i, j))
        if not commutator(V.Et(j), seed["xminus1"]).is_zero():
            fails.append(("[x+_{j,0}, x-_{i,1}]", i, j))
    # [h_{i,1}, x^-_{i,0}] = -[2] x^-_{i,1}
    if commutator(seed["h1"], V.F[i]) != seed["xminus1"] * (-qint(2)):
        fails.append(("[h_{i,1}, x-_{i,0}]", i))
    # [h_{i,-1}, x^+_{i,0}] = c_delta^{1/2} [-2]/(-1) x^+_{i,-1}
    if commutator(seed["hm1"], V.Et(i)) != seed["xplus_m1"] * (qint(2) * p.c_delta_half):
        fails.append(("[h_{i,-1}, x+_{i,0}]", i))
    # h's commute with the Cartan part and with each other
    if not commutator(seed["h1"], seed["hm1"]).is_zero():
        fails.append(("[h_1, h_-1]", i))
    return {"pass": not fails, "failures": fails}


def cross_seed_gate(V: Rep) -> dict:
    """[h_{i,1}, x^-_{j,0}] = -[a_ij] x^-_{j,1} and the x^- relation for adjacent i, j."""
    d = V.diagram
    fails = []
    seeds = {i: drinfeld_seed(V, i) for i in d.finite_nodes}
    for i in d.finite_nodes:
        for j in d.finite_nodes:
            a = d.a(i, j)
            lhs = commutator(seeds[i]["h1"], V.F[j])
            if lhs != seeds[j]["xminus1"] * (-qint(a)):
                fails.append(("[h_{i,1}, x-_{j,0}]", i, j))
            if i != j and a == -1:
                # [x-_{i,1}, x-_{j,0}]_{q^{-a}} = q^{-a} [x-_{i,0}, x-_{j,1}]_{q^{a}}
                l = qbracket(seeds[i]["xminus1"], V.F[j], qpow(-a))
                r = qbracket(V.F[i], seeds[j]["xminus1"], qpow(a)) * qpow(-a)
                if l != r:
                    fails.append(("x- rel", i, j))
    return {"pass": not fails, "failures": fails}


def drinfeld_ladder(V: Rep, i: int, M: int) -> DrinfeldData:
    """x^-_{i,k} for -M <= k <= M+1 and phi/psi modes up to order M."""
    key = ("ladder", i)
    cached = V.cache.get(key)
    if cached is not None and len(cached.psi) > M:
        return cached
    p = V.params
    s = drinfeld_seed(V, i)
    two_inv = qint(2).inverse()
    xm = {0: s["xminus0"], 1: s["xminus1"]}
    for k in range(1, M + 1):
        xm[k + 1] = commutator(s["h1"], xm[k]) * (-two_inv)
    for k in range(0, -M, -1):
        xm[k - 1] = commutator(s["hm1"], xm[k]) * (-two_inv)
    # path independence: x^-_{i,1} from the downward ladder must return to the seed
    if commutator(s["h1"], xm[0]) * (-two_inv) != xm[1]:
        raise RelationError(f"ladder inconsistency at node {i}")
    r = rho()
    ui = p.u[i]
    psi = [V.Kt(i) * ui.inverse()]
    phi = [V.Ktp(i) * ui.inverse()]
    for m in range(1, M + 1):
        psi.append(commutator(s["xplus0"], xm[m]) * (r / ui))
        phi.append(commutator(s["xplus0"], xm[-m]) * (-r / ui))
    data = DrinfeldData(i, s["xplus0"], s["xplus_m1"], xm, s["h1"], s["hm1"], psi, phi)
    V.cache[key] = data
    return data


def phi_alt(V: Rep, i: int, M: int) -> list:
    """phi_{i,-m} via the k = -1 form -rho c_i^{-1/2} c_delta^{1/2} [x^+_{i,-1}, x^-_{i,1-m}]."""
    data = drinfeld_ladder(V, i, M)
    p = V.params
    out = [data.phi[0]]
    for m in range(1, M + 1):
        out.append(commutator(data.xplus_m1, data.xminus[1 - m]) * (-rho() * p.c_delta_half / p.u[i]))
    return out
