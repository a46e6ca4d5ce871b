"""Satake diagrams of type AIII, relative Weyl group words and root actions.

The extended affine Weyl group of type A_N^(1) is realized by affine
permutations of Z with period N+1: ``s_j`` swaps ``j`` and ``j+1`` (mod N+1)
and the rotation ``pi`` is ``x -> x+1``.  Words are read as compositions
``g_1 g_2 ... g_k`` acting on the left.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "SatakeDiagram", "build_satake", "Word", "relative_simple",
    "fundamental_weight_word", "fundamental_weight_prime_word", "theta_word",
    "zeta_word", "expand", "AffinePerm", "perm_of", "weyl_act", "root_length",
    "tilde_alpha", "tilde_alpha_prime", "tau_commutes", "same_element",
    "check_relative_braid_relations", "root_suite", "weight_vector", "is_translation_by",
    "R", "PI", "bracket",
]


@dataclass(frozen=True)
class SatakeDiagram:
    N: int

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError("N must be an integer >= 1")

    @property
    def nodes(self) -> range:
        return range(self.N + 1)

    @property
    def finite_nodes(self) -> range:
        return range(1, self.N + 1)

    @property
    def n(self) -> int:
        return (self.N + 1) // 2

    @property
    def odd(self) -> bool:
        return self.N % 2 == 1

    @cached_property
    def cartan(self) -> tuple:
        N = self.N
        size = N + 1
        rows = []
        for i in range(size):
            row = []
            for j in range(size):
                if i == j:
                    row.append(2)
                elif N == 1:
                    row.append(-2)
                elif (i - j) % size in (1, size - 1):
                    row.append(-1)
                else:
                    row.append(0)
            rows.append(tuple(row))
        return tuple(rows)

    def a(self, i: int, j: int) -> int:
        return self.cartan[i][j]

    def tau(self, i: int) -> int:
        self._check_node(i)
        return 0 if i == 0 else self.N + 1 - i

    def sign(self, i: int) -> int:
        """o(i) = (-1)^i."""
        return -1 if i % 2 else 1

    def case(self, i: int) -> int:
        """a_{i, tau(i)}: 2, 0 or -1."""
        return self.a(i, self.tau(i))

    @property
    def reps(self) -> tuple:
        """Orbit representatives I_tau = {0, ..., n}."""
        return tuple(range(self.n + 1))

    def rep(self, i: int) -> int:
        return i if i <= self.n else self.tau(i)

    @property
    def relative_type(self) -> str:
        if self.N == 1:
            return "A1^(1)"
        if self.odd:
            return f"C{self.n}^(1)"
        return f"A{2 * self.n}^(2)"

    def _check_node(self, i: int):
        if not (0 <= i <= self.N):
            raise ValueError(f"node {i} outside 0..{self.N}")

    def relative_coxeter(self, i: int, j: int) -> int | None:
        """Order of r_i r_j in the relative Weyl group (None = infinite)."""
        if i == j:
            return 1
        n = self.n
        if self.N <= 2:
            return None
        a, b = sorted((i, j))
        if b - a != 1:
            return 2
        if a == 0 or b == n:
            return 4
        return 3

    def to_json(self) -> dict:
        return {"N": self.N, "tau": [self.tau(i) for i in self.nodes],
                "reps": list(self.reps), "relative_type": self.relative_type}


def build_satake(N: int) -> SatakeDiagram:
    return SatakeDiagram(N)


# -- words ---------------------------------------------------------------------

@dataclass(frozen=True)
class Word:
    """Sequence of tokens ('pi', k) (rotation power) and ('r', i) (relative simple reflection)."""

    tokens: tuple = field(default_factory=tuple)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.tokens + other.tokens)

    def __pow__(self, k: int) -> "Word":
        return Word(self.tokens * k)

    def __len__(self):
        return sum(1 for t in self.tokens if t[0] == "r")

    def letters(self) -> list:
        return [t[1] for t in self.tokens if t[0] == "r"]

    def without_last(self) -> "Word":
        if not self.tokens or self.tokens[-1][0] != "r":
            raise ValueError("word does not end with a reflection")
        return Word(self.tokens[:-1])

    def to_json(self, d: SatakeDiagram | None = None) -> list:
        out = []
        for kind, k in self.tokens:
            if kind == "pi":
                if d is not None and d.odd and d.N > 1 and k == d.n:
                    out.append({"aut": "pi_n"})
                else:
                    out.append({"aut": f"pi^{k}"})
            else:
                out.append({"r": k})
        return out


def R(*idx: int) -> Word:
    return Word(tuple(("r", i) for i in idx))


def PI(k: int) -> Word:
    return Word((("pi", k),))


def bracket(a: int, b: int) -> Word:
    """[a, b] = r_a r_{a+1} ... r_b (ascending) or r_a r_{a-1} ... r_b (descending)."""
    step = 1 if a <= b else -1
    return R(*range(a, b + step, step))


def relative_simple(d: SatakeDiagram, i: int) -> list:
    """Expansion of r_i as a list of s-indices."""
    if i not in d.reps:
        raise ValueError(f"{i} is not an orbit representative of {d.reps}")
    t = d.tau(i)
    c = d.case(i)
    if c == 2:
        return [i]
    if c == 0:
        return [i, t]
    return [i, t, i]


def fundamental_weight_word(d: SatakeDiagram, i: int) -> Word:
    """Reduced word for the relative fundamental weight varpi_i, 1 <= i <= N."""
    if not (1 <= i <= d.N):
        raise ValueError(f"index {i} outside 1..{d.N}")
    i = d.rep(i)
    N, n = d.N, d.n
    if N == 1:
        return PI(1) * R(1)
    if N == 2:
        return R(0, 1)
    if d.odd and i == n:
        w = PI(n) * R(n)
        for a in range(n - 1, 0, -1):
            w = w * bracket(a, n)
        return w
    w = (R(0) * bracket(1, n)) ** i
    for a in range(n - i, 0, -1):
        w = w * bracket(a, a + i - 1)
    return w


def fundamental_weight_prime_word(d: SatakeDiagram, i: int) -> Word:
    """varpi'_i, with varpi_i = varpi'_i r_i."""
    return fundamental_weight_word(d, i).without_last()


def theta_word(d: SatakeDiagram) -> Word:
    """theta_n = r_{n-1} (r_{n-2} r_{n-1}) ... (r_1 ... r_{n-1})."""
    n = d.n
    w = Word()
    for a in range(n - 1, 0, -1):
        w = w * bracket(a, n - 1)
    return w


def zeta_word(d: SatakeDiagram, i: int) -> Word:
    return (R(0) * bracket(1, d.n)) ** i


def expand(d: SatakeDiagram, w: Word) -> list:
    """Expand relative letters into ('s', j) / ('pi', k) tokens."""
    out = []
    for kind, k in w.tokens:
        if kind == "pi":
            out.append(("pi", k))
        else:
            out.extend(("s", j) for j in relative_simple(d, k))
    return out


# -- affine permutations -------------------------------------------------------

class AffinePerm:
    """Bijection f of Z with f(x + m) = f(x) + m, m = N+1; stored by its window f(1..m)."""

    __slots__ = ("m", "win")

    def __init__(self, m: int, win: Sequence[int]):
        self.m = m
        self.win = tuple(win)

    @classmethod
    def identity(cls, m: int) -> "AffinePerm":
        return cls(m, range(1, m + 1))

    @classmethod
    def simple(cls, m: int, j: int) -> "AffinePerm":
        win = list(range(1, m + 1))
        if m == 1:
            raise ValueError("rank too small")
        if j == 0:
            win[0], win[m - 1] = 0, m + 1
        else:
            win[j - 1], win[j] = j + 1, j
        return cls(m, win)

    @classmethod
    def rotation(cls, m: int, k: int = 1) -> "AffinePerm":
        return cls(m, [x + k for x in range(1, m + 1)])

    def __call__(self, x: int) -> int:
        q, r = divmod(x - 1, self.m)
        return self.win[r] + q * self.m

    def __mul__(self, other: "AffinePerm") -> "AffinePerm":
        return AffinePerm(self.m, [self(other(x)) for x in range(1, self.m + 1)])

    def inverse(self) -> "AffinePerm":
        out = [0] * self.m
        for x in range(1, self.m + 1):
            y = self.win[x - 1]
            q, r = divmod(y - 1, self.m)
            out[r] = x - q * self.m
        return AffinePerm(self.m, out)

    def __eq__(self, other):
        return isinstance(other, AffinePerm) and self.win == other.win

    def __hash__(self):
        return hash(self.win)

    def length(self) -> int:
        """Inversion count #{(a, b): 1 <= a <= m, a < b, f(a) > f(b)}."""
        m = self.m
        total = 0
        for a in range(1, m + 1):
            fa = self(a)
            for b in range(a + 1, a + m):
                fb = self(b)
                diff = fa - fb
                if diff > 0:
                    # pairs (a, b + k m), k >= 0, with f(a) > f(b) + k m
                    total += (diff - 1) // m + 1
            # b = a + k m never inverts
        return total

    def tau_conjugate(self) -> "AffinePerm":
        """sigma f sigma with sigma(x) = 1 - x; realizes the diagram involution."""
        return AffinePerm(self.m, [1 - self(1 - x) for x in range(1, self.m + 1)])

    def translation_vector(self):
        """If f(x) = x + m*lam_x, return lam (as tuple over the window), else None."""
        lam = []
        for x in range(1, self.m + 1):
            dlt = self(x) - x
            if dlt % self.m:
                return None
            lam.append(dlt // self.m)
        return tuple(lam)

    def __repr__(self):
        return f"AffinePerm({list(self.win)})"


def perm_of(d: SatakeDiagram, w: Word) -> AffinePerm:
    m = d.N + 1
    f = AffinePerm.identity(m)
    for kind, k in expand(d, w):
        g = AffinePerm.rotation(m, k) if kind == "pi" else AffinePerm.simple(m, k)
        f = f * g
    return f


def weight_vector(d: SatakeDiagram, i: int) -> tuple:
    """varpi_i in epsilon coordinates: omega_i (+ omega_tau(i) when tau(i) != i)."""
    m = d.N + 1
    vec = [0] * m
    for j in {i, d.tau(i)}:
        for x in range(j):
            vec[x] += 1
    return tuple(vec)


def is_translation_by(f: AffinePerm, lam: Sequence[int], sign: int) -> bool:
    """f(x) = x + sign*m*(lam_x + c) for a constant c (weights are taken modulo the all-ones vector)."""
    t = f.translation_vector()
    if t is None:
        return False
    shifts = {sign * t[x] - lam[x] for x in range(len(lam))}
    return len(shifts) == 1


# -- root action ----------------------------------------------------------------

def _simple_act(d: SatakeDiagram, j: int, beta: Sequence[int]) -> tuple:
    pairing = sum(beta[k] * d.a(j, k) for k in d.nodes)
    out = list(beta)
    out[j] -= pairing
    return tuple(out)


def _rot_act(d: SatakeDiagram, k: int, beta: Sequence[int]) -> tuple:
    m = d.N + 1
    out = [0] * m
    for i in range(m):
        out[(i + k) % m] = beta[i]
    return tuple(out)


def weyl_act(d: SatakeDiagram, w: Word, beta: Sequence[int]) -> tuple:
    """Left action of the word on a root vector (coefficients on alpha_0..alpha_N)."""
    beta = tuple(beta)
    for kind, k in reversed(expand(d, w)):
        beta = _rot_act(d, k, beta) if kind == "pi" else _simple_act(d, k, beta)
    return beta


def _positive_real_roots(d: SatakeDiagram, kmax: int) -> Iterable[tuple]:
    """Positive real roots eps_a - eps_b + k delta up to |k| <= kmax."""
    m = d.N + 1
    for a in range(1, m + 1):
        for b in range(1, m + 1):
            if a == b:
                continue
            base = [0] * m
            if a < b:
                for j in range(a, b):
                    base[j] += 1
                kmin = 0
            else:
                for j in range(b, a):
                    base[j] -= 1
                kmin = 1
            for k in range(kmin, kmax + 1):
                yield tuple(x + k for x in base)


def root_length(d: SatakeDiagram, w: Word) -> int:
    """Number of positive real roots sent to negative roots by w."""
    if d.N == 1:
        # roots of A_1^(1): alpha_1 + k delta (k >= 0) and -alpha_1 + k delta (k >= 1)
        roots = [(k, k + 1) for k in range(0, len(expand(d, w)) + 2)]
        roots += [(k, k - 1) for k in range(1, len(expand(d, w)) + 2)]
    else:
        roots = _positive_real_roots(d, len(expand(d, w)) + 1)
    count = 0
    for beta in roots:
        img = weyl_act(d, w, beta)
        if all(x <= 0 for x in img):
            count += 1
    return count


def tilde_alpha(d: SatakeDiagram, k: int) -> tuple:
    """alpha~_k (k taken modulo n)."""
    n, m = d.n, d.N + 1
    k %= n
    vec = [0] * m
    if k:
        vec[k] = 1
        return tuple(vec)
    vec[0] = 1
    top = n - 1 if d.odd else n
    for j in range(top + 1):
        vec[n + j] += 1
    return tuple(vec)


def tilde_alpha_prime(d: SatakeDiagram, k: int) -> tuple:
    n, m = d.n, d.N + 1
    k %= n
    vec = [0] * m
    if k:
        vec[2 * n - k if d.odd else 2 * n - k + 1] = 1
        return tuple(vec)
    top = n if d.odd else n + 1
    for j in range(top + 1):
        vec[j] += 1
    return tuple(vec)


def tau_commutes(d: SatakeDiagram, w: Word) -> bool:
    """tau w tau = w in the extended affine Weyl group (affine permutations modulo x -> x + k(N+1))."""
    f = perm_of(d, w)
    g = f.tau_conjugate()
    t = (f.inverse() * g).translation_vector()
    return t is not None and len(set(t)) == 1


def same_element(d: SatakeDiagram, w1: Word, w2: Word) -> bool:
    t = (perm_of(d, w1).inverse() * perm_of(d, w2)).translation_vector()
    return t is not None and len(set(t)) == 1


def check_relative_braid_relations(d: SatakeDiagram) -> list:
    """Return failures of r_i^2 = 1 and (r_i r_j)^m = 1 as root-lattice actions."""
    failures = []
    m = d.N + 1
    basis = [tuple(1 if k == j else 0 for k in range(m)) for j in range(m)]
    for i in d.reps:
        sq = R(i, i)
        if any(weyl_act(d, sq, b) != b for b in basis):
            failures.append(("square", i))
        for j in d.reps:
            if j <= i:
                continue
            order = d.relative_coxeter(i, j)
            if order is None:
                continue
            w = R(i, j) ** order
            if any(weyl_act(d, w, b) != b for b in basis):
                failures.append(("braid", i, j, order))
    return failures


def root_suite(N: int) -> dict:
    """Reducedness, translation property, tau-symmetry and the zeta root actions for one N."""
    d = build_satake(N)
    report = {"N": N, "words": [], "zeta": [], "braid_failures": check_relative_braid_relations(d)}
    for i in range(1, d.n + 1):
        w = fundamental_weight_word(d, i)
        f = perm_of(d, w)
        expanded = sum(len(relative_simple(d, k)) for k in w.letters())
        report["words"].append({
            "i": i, "word": w.to_json(d), "expanded_length": expanded,
            "inversions": f.length(), "root_inversions": root_length(d, w),
            "translation": is_translation_by(f, weight_vector(d, i), 1),
            "tau_commutes": tau_commutes(d, w),
        })
    if N >= 3:
        n = d.n
        for i in range(1, (n - 1 if d.odd else n) + 1):
            z = zeta_word(d, i)
            for k in range(1, n + 1):
                ok = (weyl_act(d, z, tilde_alpha(d, k)) == tilde_alpha(d, k + i)
                      and weyl_act(d, z, tilde_alpha_prime(d, k)) == tilde_alpha_prime(d, k + i))
                report["zeta"].append({"i": i, "k": k, "ok": ok})
    report["ok"] = (not report["braid_failures"]
                    and all(r["expanded_length"] == r["inversions"] == r["root_inversions"]
                            and r["translation"] and r["tau_commutes"] for r in report["words"])
                    and all(z["ok"] for z in report["zeta"]))
    return report
