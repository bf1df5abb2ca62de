"""Exact integer linear algebra.

Everything here works on Python integers, so no intermediate result can
overflow.  Matrices are small and dense; the algorithms are the classical
elimination ones, written for clarity first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NonSquare, NotInSpan, ParseError

__all__ = [
    "IntMat",
    "SmithForm",
    "FinAbGroup",
    "snf",
    "det",
    "hnf",
    "kernel_basis",
    "quotient",
    "solve_integer",
    "rank",
    "rank_mod_p",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass(frozen=True)
class IntMat:
    """Immutable dense integer matrix, entries stored row by row."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatch("negative dimension")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatch(
                f"entries do not match declared shape {self.rows}x{self.cols}"
            )

    # -- construction -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> IntMat:
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if not data:
            return cls(0, cols or 0, ())
        return cls(len(data), len(data[0]), data)

    @classmethod
    def from_columns(cls, columns: Iterable[Iterable[int]], rows: int) -> IntMat:
        cols = [tuple(int(x) for x in c) for c in columns]
        for c in cols:
            if len(c) != rows:
                raise DimensionMismatch("column length differs from row count")
        return cls(rows, len(cols), tuple(tuple(c[i] for c in cols) for i in range(rows)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMat:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> IntMat:
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, values: Sequence[int]) -> IntMat:
        n = len(values)
        return cls(n, n, tuple(tuple(int(values[i]) if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def from_array(cls, array) -> IntMat:
        array = np.asarray(array)
        if array.ndim != 2:
            raise DimensionMismatch("expected a 2-d array")
        return cls(array.shape[0], array.shape[1], tuple(tuple(int(x) for x in r) for r in array.tolist()))

    # -- access -----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def to_array(self, dtype=np.int64) -> np.ndarray:
        """Numpy copy.  The entries must fit ``dtype`` exactly, or this raises."""
        if self.rows == 0 or self.cols == 0:
            return np.zeros((self.rows, self.cols), dtype=dtype)
        if dtype is not object:
            if np.issubdtype(dtype, np.integer):
                lo, hi = np.iinfo(dtype).min, np.iinfo(dtype).max
            else:  # floats only while integers are represented exactly
                lo, hi = -(2**53), 2**53
            if any(x > hi or x < lo for r in self.entries for x in r):
                raise OverflowError("matrix entries do not fit the requested dtype")
        return np.array(self.entries, dtype=dtype)

    @property
    def T(self) -> IntMat:
        if self.rows == 0:
            return IntMat(self.cols, 0, tuple(() for _ in range(self.cols)))
        return IntMat(self.cols, self.rows, tuple(zip(*self.entries)))

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def is_identity(self) -> bool:
        return self.is_square() and all(
            x == (1 if i == j else 0) for i, r in enumerate(self.entries) for j, x in enumerate(r)
        )

    def max_abs(self) -> int:
        return max((abs(x) for r in self.entries for x in r), default=0)

    # -- arithmetic -------------------------------------------------------
    def __matmul__(self, other: IntMat) -> IntMat:
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        return IntMat(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ocols) for r in self.entries),
        )

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise DimensionMismatch("vector length differs from column count")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.entries)

    def _zip(self, other: IntMat, op) -> IntMat:
        if self.shape != other.shape:
            raise DimensionMismatch(f"shape {self.shape} vs {other.shape}")
        return IntMat(
            self.rows,
            self.cols,
            tuple(tuple(op(a, b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
        )

    def __add__(self, other: IntMat) -> IntMat:
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other: IntMat) -> IntMat:
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self) -> IntMat:
        return self.scale(-1)

    def scale(self, c: int) -> IntMat:
        return IntMat(self.rows, self.cols, tuple(tuple(c * x for x in r) for r in self.entries))

    def __pow__(self, k: int) -> IntMat:
        if not self.is_square():
            raise NonSquare("power of a non-square matrix")
        if k < 0:
            raise ValueError("negative powers are not supported")
        result, base = IntMat.identity(self.rows), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def hstack(self, other: IntMat) -> IntMat:
        if self.rows != other.rows:
            raise DimensionMismatch("hstack needs equal row counts")
        return IntMat(self.rows, self.cols + other.cols, tuple(r + s for r, s in zip(self.entries, other.entries)))

    def vstack(self, other: IntMat) -> IntMat:
        if self.cols != other.cols:
            raise DimensionMismatch("vstack needs equal column counts")
        return IntMat(self.rows + other.rows, self.cols, self.entries + other.entries)

    @classmethod
    def stack(cls, mats: Sequence[IntMat], cols: int) -> IntMat:
        """Vertical concatenation; ``cols`` fixes the width when ``mats`` is empty."""
        rows: list[tuple[int, ...]] = []
        for m in mats:
            if m.cols != cols:
                raise DimensionMismatch("vstack needs equal column counts")
            rows.extend(m.entries)
        return cls(len(rows), cols, tuple(rows))

    def select_columns(self, idx: Sequence[int]) -> IntMat:
        return IntMat(self.rows, len(idx), tuple(tuple(r[j] for j in idx) for r in self.entries))

    def select_rows(self, idx: Sequence[int]) -> IntMat:
        return IntMat(len(idx), self.cols, tuple(self.entries[i] for i in idx))

    def __repr__(self) -> str:
        return f"IntMat({self.rows}x{self.cols}, {self.to_list()})"


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == D`` with unimodular ``U``, ``V`` and ``D`` in Smith form."""

    U: IntMat
    D: IntMat
    V: IntMat

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def _identity_rows(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _smith(a: list[list[int]], m: int, n: int, want_u: bool, want_v: bool):
    """In-place Smith reduction of ``a``; returns (diag, U, V) as lists."""
    U = _identity_rows(m) if want_u else None
    V = _identity_rows(n) if want_v else None

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        if U is not None:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        if V is not None:
            for r in V:
                r[j], r[k] = r[k], r[j]

    def add_row(i, k, q):
        # row_i -= q * row_k
        ri, rk = a[i], a[k]
        a[i] = [x - q * y for x, y in zip(ri, rk)]
        if U is not None:
            U[i] = [x - q * y for x, y in zip(U[i], U[k])]

    def add_col(j, k, q):
        # col_j -= q * col_k
        for r in a:
            if r[k]:
                r[j] -= q * r[k]
        if V is not None:
            for r in V:
                if r[k]:
                    r[j] -= q * r[k]

    diag: list[int] = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)

        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                x = a[i][t]
                if x:
                    add_row(i, t, x // p)
                    if a[i][t]:
                        dirty = True
            row_t = a[t]
            for j in range(t + 1, n):
                x = row_t[j]
                if x:
                    add_col(j, t, x // p)
                    if a[t][j]:
                        dirty = True
            if dirty:
                # move the smallest leftover of row/column t onto the pivot
                cand = None
                for i in range(t + 1, m):
                    x = a[i][t]
                    if x and (cand is None or abs(x) < cand[0]):
                        cand = (abs(x), "r", i)
                for j in range(t + 1, n):
                    x = a[t][j]
                    if x and (cand is None or abs(x) < cand[0]):
                        cand = (abs(x), "c", j)
                if cand[1] == "r":
                    swap_rows(t, cand[2])
                else:
                    swap_cols(t, cand[2])
                continue
            # pivot must divide the remaining block
            bad = None
            for i in range(t + 1, m):
                row = a[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        diag.append(a[t][t])
        t += 1
    return diag, U, V


def snf(A: IntMat) -> SmithForm:
    """Smith normal form with transforms: ``U @ A @ V == D``.

    Pivot is the nonzero entry of least absolute value (ties: lowest row,
    then lowest column), which keeps entries small and the output
    deterministic.
    """
    m, n = A.shape
    a = [list(r) for r in A.entries]
    diag, U, V = _smith(a, m, n, True, True)
    full = diag + [0] * (min(m, n) - len(diag))
    D = IntMat(m, n, tuple(tuple(full[i] if i == j else 0 for j in range(n)) for i in range(m)))
    return SmithForm(IntMat.from_rows(U, cols=m), D, IntMat.from_rows(V, cols=n))


def smith_diagonal(A: IntMat) -> list[int]:
    """Nonzero Smith invariants of ``A`` (no transforms computed)."""
    a = [list(r) for r in A.entries]
    diag, _, _ = _smith(a, A.rows, A.cols, False, False)
    return diag


def det(A: IntMat) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    if not A.is_square():
        raise NonSquare(f"determinant of a {A.rows}x{A.cols} matrix")
    n = A.rows
    if n == 0:
        return 1
    a = [list(r) for r in A.entries]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def rank(A: IntMat) -> int:
    return len(smith_diagonal(A))


def rank_mod_p(A: IntMat, p: int) -> int:
    """Rank over GF(p) by plain Gaussian elimination."""
    a = [[x % p for x in r] for r in A.entries]
    m, n = A.shape
    r = 0
    for j in range(n):
        piv = next((i for i in range(r, m) if a[i][j]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][j], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(m):
            if i != r and a[i][j]:
                c = a[i][j]
                a[i] = [(x - c * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == m:
            break
    return r


# ---------------------------------------------------------------------------
# Hermite normal form, kernels, quotients
# ---------------------------------------------------------------------------


def _hnf_rows(rows: list[list[int]], n: int) -> list[list[int]]:
    """Row-style Hermite normal form; zero rows are dropped."""
    a = [r[:] for r in rows if any(r)]
    out: list[list[int]] = []
    for j in range(n):
        live = [r for r in a if r[j]]
        if not live:
            continue
        rest = [r for r in a if not r[j]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[j]))
            p = live[0]
            nxt = [p]
            for r in live[1:]:
                q = r[j] // p[j]
                r = [x - q * y for x, y in zip(r, p)]
                if r[j]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = nxt
        p = live[0]
        if p[j] < 0:
            p = [-x for x in p]
        # reduce earlier rows above the new pivot
        for k in range(len(out)):
            q = out[k][j] // p[j]
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], p)]
        out.append(p)
        a = rest
    return out


def hnf(A: IntMat) -> IntMat:
    """Row Hermite normal form of ``A`` (zero rows removed).

    Rows are in echelon form, pivots positive, entries above each pivot
    reduced into ``[0, pivot)``.
    """
    return IntMat.from_rows(_hnf_rows([list(r) for r in A.entries], A.cols), cols=A.cols)


def kernel_basis(A: IntMat) -> IntMat:
    """Columns form a basis of the saturated lattice ``{x : A x = 0}``.

    The basis comes from the column transform of the Smith form, so the
    lattice it spans is primitive; it is then put into column Hermite form
    so the answer does not depend on the reduction path.
    """
    m, n = A.shape
    a = [list(r) for r in A.entries]
    diag, _, V = _smith(a, m, n, False, True)
    r = len(diag)
    cols = [[V[i][j] for i in range(n)] for j in range(r, n)]
    echelon = _hnf_rows(cols, n)
    return IntMat.from_columns(echelon, rows=n) if echelon else IntMat.zeros(n, 0)


def solve_integer(A: IntMat, B: IntMat) -> IntMat:
    """Integer ``X`` with ``A @ X == B``; raises :class:`NotInSpan` if none exists.

    When ``A`` has dependent columns the free coordinates are set to zero.
    """
    if A.rows != B.rows:
        raise DimensionMismatch(f"A has {A.rows} rows, B has {B.rows}")
    F = snf(A)
    UB = (F.U @ B).to_list()
    d = F.diagonal
    r = F.rank
    Y = [[0] * B.cols for _ in range(A.cols)]
    for i in range(A.rows):
        for j in range(B.cols):
            x = UB[i][j]
            if i < r:
                q, rem = divmod(x, d[i])
                if rem:
                    raise NotInSpan("right-hand side is not in the integer span")
                Y[i][j] = q
            elif x:
                raise NotInSpan("right-hand side is not in the rational span")
    return F.V @ IntMat.from_rows(Y, cols=B.cols)


def echelon_coordinates(basis: IntMat, B: IntMat) -> IntMat:
    """Coordinates of the columns of ``B`` in a column-echelon ``basis``.

    ``basis`` must be as returned by :func:`kernel_basis` (its transpose is
    in row echelon form), which allows plain forward substitution.
    """
    n, k = basis.shape
    cols = basis.columns()
    pivots = []
    for c in cols:
        pivots.append(next(i for i, x in enumerate(c) if x))
    out = []
    for b in B.columns():
        b = list(b)
        coords = []
        for c, p in zip(cols, pivots):
            q, rem = divmod(b[p], c[p])
            if rem:
                raise NotInSpan("vector is not in the integer span of the basis")
            coords.append(q)
            if q:
                b = [x - q * y for x, y in zip(b, c)]
        if any(b):
            raise NotInSpan("vector is not in the span of the basis")
        out.append(coords)
    return IntMat.from_columns(out, rows=k)


# ---------------------------------------------------------------------------
# finite abelian groups
# ---------------------------------------------------------------------------


def _normalize_orders(values: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors of a direct sum of cyclic groups of the given orders."""
    vals = [abs(int(v)) for v in values if abs(int(v)) != 1]
    if any(v == 0 for v in vals):
        raise ValueError("use free_rank for infinite cyclic summands")
    # repeated (gcd, lcm) sweeps until the chain divides
    changed = True
    vals.sort()
    while changed:
        changed = False
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                if b % a:
                    g = math.gcd(a, b)
                    vals[i], vals[j] = g, a * b // g
                    changed = True
        vals.sort()
    return tuple(v for v in vals if v != 1)


@dataclass(frozen=True)
class FinAbGroup:
    """Finitely generated abelian group ``Z/d1 x ... x Z/dk x Z^free_rank``."""

    invariant_factors: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors", tuple(int(d) for d in self.invariant_factors))
        f = self.invariant_factors
        if self.free_rank < 0 or any(d < 2 for d in f) or any(f[i + 1] % f[i] for i in range(len(f) - 1)):
            raise ValueError(f"not in invariant-factor normal form: {f}, free rank {self.free_rank}")

    @classmethod
    def from_orders(cls, orders: Iterable[int], free_rank: int = 0) -> FinAbGroup:
        return cls(_normalize_orders(orders), free_rank)

    @classmethod
    def trivial(cls) -> FinAbGroup:
        return cls()

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def order(self) -> int | float:
        """Group order; ``math.inf`` when there is a free part."""
        if self.free_rank:
            return math.inf
        return math.prod(self.invariant_factors)

    def p_part(self, p: int) -> FinAbGroup:
        """The p-primary torsion subgroup."""
        out = []
        for d in self.invariant_factors:
            q = 1
            while d % p == 0:
                d //= p
                q *= p
            out.append(q)
        return FinAbGroup.from_orders(out)

    def to_json(self) -> dict:
        return {
            "invariant_factors": [str(d) for d in self.invariant_factors],
            "free_rank": self.free_rank,
            "text": str(self),
        }

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " x ".join(parts) if parts else "0"


def quotient(ambient_rank: int, sub: IntMat) -> FinAbGroup:
    """``Z^ambient_rank / (column span of sub)`` in normal form."""
    if sub.rows != ambient_rank:
        raise DimensionMismatch(f"sub has {sub.rows} rows, ambient rank is {ambient_rank}")
    diag = smith_diagonal(sub)
    return FinAbGroup(tuple(d for d in diag if d > 1), ambient_rank - len(diag))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def matrix_to_json(M: IntMat) -> dict:
    return {"rows": M.rows, "cols": M.cols, "entries": [[str(x) for x in r] for r in M.entries]}


def matrix_from_json(obj) -> IntMat:
    """Accepts the ``{"rows", "cols", "entries"}`` object or a bare list of rows."""
    try:
        if isinstance(obj, list):
            return IntMat.from_rows(obj)
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = [[int(x) for x in r] for r in obj["entries"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad matrix object: {exc}") from exc
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise ParseError(f"entries do not match declared shape {rows}x{cols}")
    return IntMat(rows, cols, tuple(tuple(r) for r in entries))
