"""Sparse square/rectangular matrices with exact Scalar entries."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from flint import fmpq, fmpq_mat

from .scalars import ONE, ZERO, Scalar, as_scalar, specialize

MAX_DIM = 64


class DimensionError(ValueError):
    pass


class Matrix:
    """Sparse matrix stored as {row: {col: Scalar}} with zero entries pruned."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int | None = None, rows: dict | None = None):
        ncols = nrows if ncols is None else ncols
        if nrows > MAX_DIM or ncols > MAX_DIM:
            raise DimensionError(f"matrix dimension {nrows}x{ncols} exceeds cap {MAX_DIM}")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else {}

    # -- constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, n: int, m: int | None = None) -> "Matrix":
        return cls(n, m)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, {i: {i: ONE} for i in range(n)})

    @classmethod
    def diag(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        rows = {}
        for i, e in enumerate(entries):
            e = as_scalar(e)
            if not e.is_zero():
                rows[i] = {i: e}
        return cls(n, n, rows)

    @classmethod
    def from_entries(cls, n: int, m: int, entries: Iterable) -> "Matrix":
        """Build from (row, col, value) triplets; repeated positions add."""
        out = cls(n, m)
        for i, j, x in entries:
            out._add_entry(i, j, as_scalar(x))
        return out

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "Matrix":
        n = len(data)
        m = len(data[0]) if n else 0
        return cls.from_entries(n, m, ((i, j, x) for i, r in enumerate(data) for j, x in enumerate(r)))

    def _add_entry(self, i: int, j: int, x: Scalar) -> None:
        if x.is_zero():
            return
        row = self.rows.setdefault(i, {})
        y = row.get(j)
        y = x if y is None else y + x
        if y.is_zero():
            row.pop(j, None)
            if not row:
                del self.rows[i]
        else:
            row[j] = y

    # -- access ----------------------------------------------------------------
    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self.rows.get(i, {}).get(j, ZERO)

    def entries(self):
        for i in sorted(self.rows):
            row = self.rows[i]
            for j in sorted(row):
                yield i, j, row[j]

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def dense(self) -> list[list[Scalar]]:
        return [[self[i, j] for j in range(self.ncols)] for i in range(self.nrows)]

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def is_zero(self) -> bool:
        return not self.rows

    def is_identity(self) -> bool:
        if self.nrows != self.ncols or len(self.rows) != self.nrows:
            return False
        return all(len(r) == 1 and r.get(i) == ONE for i, r in self.rows.items())

    def is_diagonal(self) -> bool:
        return all(len(r) == 1 and i in r for i, r in self.rows.items())

    def one_like(self) -> "Matrix":
        return Matrix.identity(self.nrows)

    def zero_like(self) -> "Matrix":
        return Matrix(self.nrows, self.ncols)

    # -- arithmetic ------------------------------------------------------------
    def _check_same(self, other: "Matrix"):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check_same(other)
        rows = {i: dict(r) for i, r in self.rows.items()}
        out = Matrix(self.nrows, self.ncols, rows)
        for i, r in other.rows.items():
            for j, x in r.items():
                out._add_entry(i, j, x)
        return out

    def __neg__(self):
        return Matrix(self.nrows, self.ncols,
                      {i: {j: -x for j, x in r.items()} for i, r in self.rows.items()})

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = as_scalar(c)
        if c.is_zero():
            return self.zero_like()
        if c == ONE:
            return self
        return Matrix(self.nrows, self.ncols,
                      {i: {j: c * x for j, x in r.items()} for i, r in self.rows.items()})

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            out = Matrix(self.nrows, other.ncols)
            orows = other.rows
            for i, r in self.rows.items():
                acc: dict[int, Scalar] = {}
                for k, x in r.items():
                    ok = orows.get(k)
                    if not ok:
                        continue
                    for j, y in ok.items():
                        t = x * y
                        z = acc.get(j)
                        acc[j] = t if z is None else z + t
                acc = {j: z for j, z in acc.items() if not z.is_zero()}
                if acc:
                    out.rows[i] = acc
            return out
        c = as_scalar(other)
        if c is NotImplemented:
            return NotImplemented
        return self.scale(c)

    def __rmul__(self, other):
        c = as_scalar(other)
        if c is NotImplemented:
            return NotImplemented
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    __hash__ = None

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            return self.inverse() ** (-k)
        out = self.one_like()
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def transpose(self) -> "Matrix":
        out = Matrix(self.ncols, self.nrows)
        for i, j, x in self.entries():
            out.rows.setdefault(j, {})[i] = x
        return out

    def trace(self) -> Scalar:
        acc = ZERO
        for i, r in self.rows.items():
            if i in r:
                acc = acc + r[i]
        return acc

    def commutes_with(self, other: "Matrix") -> bool:
        return self * other == other * self

    def kron(self, other: "Matrix") -> "Matrix":
        n2, m2 = other.nrows, other.ncols
        out = Matrix(self.nrows * n2, self.ncols * m2)
        for i, r in self.rows.items():
            for j, x in r.items():
                for k, r2 in other.rows.items():
                    row = out.rows.setdefault(i * n2 + k, {})
                    for l, y in r2.items():
                        row[j * m2 + l] = x * y
        return out

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        cidx = {c: k for k, c in enumerate(cols)}
        out = Matrix(len(rows), len(cols))
        for a, i in enumerate(rows):
            r = self.rows.get(i)
            if not r:
                continue
            nr = {cidx[j]: x for j, x in r.items() if j in cidx}
            if nr:
                out.rows[a] = nr
        return out

    # -- linear algebra --------------------------------------------------------
    def inverse(self) -> "Matrix":
        if self.nrows != self.ncols:
            raise DimensionError("inverse of non-square matrix")
        n = self.nrows
        if self.is_diagonal() and len(self.rows) == n:
            return Matrix(n, n, {i: {i: r[i].inverse()} for i, r in self.rows.items()})
        aug = [dict(self.rows.get(i, {})) for i in range(n)]
        inv = [{i: ONE} for i in range(n)]
        for c in range(n):
            piv = None
            for i in range(c, n):
                if c in aug[i]:
                    if piv is None or len(aug[i]) < len(aug[piv]):
                        piv = i
            if piv is None:
                raise ZeroDivisionError("matrix is singular")
            aug[c], aug[piv] = aug[piv], aug[c]
            inv[c], inv[piv] = inv[piv], inv[c]
            p = aug[c][c].inverse()
            aug[c] = {j: x * p for j, x in aug[c].items()}
            inv[c] = {j: x * p for j, x in inv[c].items()}
            for i in range(n):
                if i == c or c not in aug[i]:
                    continue
                f = aug[i][c]
                _axpy(aug[i], aug[c], -f)
                _axpy(inv[i], inv[c], -f)
        return Matrix(n, n, {i: r for i, r in enumerate(inv) if r})

    def rref(self):
        """Reduced row echelon form as list of row dicts and pivot columns."""
        rows = [dict(self.rows.get(i, {})) for i in range(self.nrows)]
        pivots = []
        r = 0
        for c in range(self.ncols):
            piv = next((i for i in range(r, len(rows)) if c in rows[i]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            p = rows[r][c].inverse()
            rows[r] = {j: x * p for j, x in rows[r].items()}
            for i in range(len(rows)):
                if i != r and c in rows[i]:
                    _axpy(rows[i], rows[r], -rows[i][c])
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        return rows[:r], pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[list[Scalar]]:
        """Basis of the right kernel, as column vectors."""
        rows, pivots = self.rref()
        free = [c for c in range(self.ncols) if c not in set(pivots)]
        basis = []
        for f in free:
            vec = [ZERO] * self.ncols
            vec[f] = ONE
            for row, pc in zip(rows, pivots):
                x = row.get(f)
                if x is not None:
                    vec[pc] = -x
            basis.append(vec)
        return basis

    def charpoly(self) -> list[Scalar]:
        """Coefficients c_0..c_n of det(x - A), via Faddeev-LeVerrier."""
        n = self.nrows
        coeffs = [ZERO] * (n + 1)
        coeffs[n] = ONE
        Mk = Matrix(n, n)
        ident = self.one_like()
        ck = ONE
        for k in range(1, n + 1):
            Mk = self * Mk + ident.scale(ck)
            ck = -(self * Mk).trace() * Fraction(1, k)
            coeffs[n - k] = ck
        return coeffs

    def apply(self, vec: Sequence[Scalar]) -> list[Scalar]:
        out = [ZERO] * self.nrows
        for i, r in self.rows.items():
            acc = ZERO
            for j, x in r.items():
                if not vec[j].is_zero():
                    acc = acc + x * vec[j]
            out[i] = acc
        return out

    # -- specialization / io ---------------------------------------------------
    def specialize(self, value) -> fmpq_mat:
        out = fmpq_mat(self.nrows, self.ncols)
        for i, j, x in self.entries():
            f = specialize(x, value)
            out[i, j] = fmpq(f.numerator, f.denominator)
        return out

    def to_json(self) -> dict:
        return {"shape": [self.nrows, self.ncols],
                "entries": [[i, j, str(x)] for i, j, x in self.entries()]}

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    def __str__(self):
        return "\n".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.dense())


def _axpy(target: dict, src: dict, f: Scalar) -> None:
    """target += f * src (row dicts)."""
    for j, x in src.items():
        t = f * x
        y = target.get(j)
        y = t if y is None else y + t
        if y.is_zero():
            target.pop(j, None)
        else:
            target[j] = y


def commutator(x: Matrix, y: Matrix) -> Matrix:
    return x * y - y * x


def qbracket(x: Matrix, y: Matrix, c) -> Matrix:
    """[x, y]_c = xy - c yx."""
    return x * y - (y * x).scale(c)


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    n = sum(b.nrows for b in blocks)
    out = Matrix(n, n)
    off = 0
    for b in blocks:
        for i, j, x in b.entries():
            out.rows.setdefault(i + off, {})[j + off] = x
        off += b.nrows
    return out
