"""Sym^2, wedge^2 and tensor products of G-lattices.

Coordinates on ``Sym^2 Z^r`` use the basis ``e_i . e_j`` (i <= j) in
lexicographic order; ``Wedge^2`` uses ``e_i ^ e_j`` (i < j).  The class of
``x (x) y`` in ``Sym^2`` is written ``x . y``; note that ``e_i . e_j``
appears with coefficient ``x_i y_j + x_j y_i`` for ``i < j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .errors import DimensionMismatch, GroupMismatch, NotApplicable
from .groups import GLattice
from .linalg import IntMat, det, kernel_basis, smith_diagonal

__all__ = [
    "Sym2Basis",
    "Wedge2Basis",
    "sym2_matrix",
    "wedge2_matrix",
    "kron",
    "sym2",
    "wedge2",
    "tensor",
    "sym2_product",
    "check_sym_wedge_sequence",
    "check_direct_sum_decomposition",
    "direct_sum",
    "split_lattice",
]


@dataclass(frozen=True)
class Sym2Basis:
    rank: int

    @cached_property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i in range(self.rank) for j in range(i, self.rank))

    @cached_property
    def index(self) -> dict[tuple[int, int], int]:
        return {p: k for k, p in enumerate(self.pairs)}

    def __len__(self) -> int:
        return self.rank * (self.rank + 1) // 2

    def of(self, i: int, j: int) -> int:
        return self.index[(i, j) if i <= j else (j, i)]


@dataclass(frozen=True)
class Wedge2Basis:
    rank: int

    @cached_property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i in range(self.rank) for j in range(i + 1, self.rank))

    @cached_property
    def index(self) -> dict[tuple[int, int], int]:
        return {p: k for k, p in enumerate(self.pairs)}

    def __len__(self) -> int:
        return self.rank * (self.rank - 1) // 2


def sym2_product(x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    """Coordinates of ``x . y`` in Sym^2."""
    if len(x) != len(y):
        raise DimensionMismatch("vectors of different lengths")
    r = len(x)
    out = []
    for i in range(r):
        out.append(x[i] * y[i])
        for j in range(i + 1, r):
            out.append(x[i] * y[j] + x[j] * y[i])
    return tuple(out)


def wedge2_product(x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    r = len(x)
    return tuple(x[i] * y[j] - x[j] * y[i] for i in range(r) for j in range(i + 1, r))


def sym2_matrix(g: IntMat) -> IntMat:
    """Matrix of ``Sym^2 g``: column ``(i, j)`` is ``g e_i . g e_j``."""
    cols = g.columns()
    basis = Sym2Basis(g.rows)
    return IntMat.from_columns([sym2_product(cols[i], cols[j]) for i, j in basis.pairs], rows=len(basis))


def wedge2_matrix(g: IntMat) -> IntMat:
    cols = g.columns()
    basis = Wedge2Basis(g.rows)
    return IntMat.from_columns([wedge2_product(cols[i], cols[j]) for i, j in basis.pairs], rows=len(basis))


def kron(a: IntMat, b: IntMat) -> IntMat:
    """Kronecker product; basis ``e_i (x) f_j`` has index ``i * b.rows + j``."""
    return IntMat.from_rows(
        [
            [a[i, k] * b[j, l] for k in range(a.cols) for l in range(b.cols)]
            for i in range(a.rows)
            for j in range(b.rows)
        ],
        cols=a.cols * b.cols,
    )


def sym2(L: GLattice) -> GLattice:
    return GLattice(L.group, [sym2_matrix(a) for a in L.action], L.rank * (L.rank + 1) // 2)


def wedge2(L: GLattice) -> GLattice:
    return GLattice(L.group, [wedge2_matrix(a) for a in L.action], L.rank * (L.rank - 1) // 2)


def tensor(L: GLattice, M: GLattice) -> GLattice:
    if L.group is not M.group and L.group.generators != M.group.generators:
        raise GroupMismatch("tensor product needs both factors over the same group")
    return GLattice(L.group, [kron(a, b) for a, b in zip(L.action, M.action)], L.rank * M.rank)


def direct_sum(L1: GLattice, L2: GLattice) -> GLattice:
    if L1.group is not L2.group and L1.group.generators != L2.group.generators:
        raise GroupMismatch("direct sum needs both summands over the same group")
    n1, n2 = L1.rank, L2.rank
    mats = []
    for a, b in zip(L1.action, L2.action):
        rows = [list(r) + [0] * n2 for r in a.entries] + [[0] * n1 + list(r) for r in b.entries]
        mats.append(IntMat.from_rows(rows, cols=n1 + n2))
    return GLattice(L1.group, mats, n1 + n2)


def split_lattice(L: GLattice, k: int) -> tuple[GLattice, GLattice]:
    """Split ``L`` as ``Z^k + Z^(rank-k)`` when every generator is block diagonal."""
    if not 0 <= k <= L.rank:
        raise DimensionMismatch(f"split point {k} outside 0..{L.rank}")
    n = L.rank
    first, second = [], []
    for a in L.action:
        if any(a[i, j] for i in range(k) for j in range(k, n)) or any(a[i, j] for i in range(k, n) for j in range(k)):
            raise NotApplicable("the action mixes the two summands")
        first.append(IntMat.from_rows([r[:k] for r in a.entries[:k]], cols=k))
        second.append(IntMat.from_rows([r[k:] for r in a.entries[k:]], cols=n - k))
    return GLattice(L.group, first, k), GLattice(L.group, second, n - k)


def _block_diag(blocks: Sequence[IntMat]) -> IntMat:
    n = sum(b.rows for b in blocks)
    rows, off = [], 0
    for b in blocks:
        for r in b.entries:
            rows.append([0] * off + list(r) + [0] * (n - off - b.cols))
        off += b.cols
    return IntMat.from_rows(rows, cols=n)


def _is_unimodular_onto(M: IntMat) -> bool:
    """Surjective over Z: full row rank with every Smith invariant equal to 1."""
    diag = smith_diagonal(M)
    return len(diag) == M.rows and all(d == 1 for d in diag)


def check_sym_wedge_sequence(L: GLattice) -> bool:
    """Verify ``0 -> Wedge^2 L -> L (x) L -> Sym^2 L -> 0`` is exact and equivariant.

    The first map sends ``a ^ b`` to ``a (x) b - b (x) a``, the second is the
    canonical projection.
    """
    r = L.rank
    W, S = Wedge2Basis(r), Sym2Basis(r)
    inc = [[0] * len(W) for _ in range(r * r)]
    for k, (i, j) in enumerate(W.pairs):
        inc[i * r + j][k] = 1
        inc[j * r + i][k] = -1
    iota = IntMat.from_rows(inc, cols=len(W))
    proj = [[0] * (r * r) for _ in range(len(S))]
    for i in range(r):
        for j in range(r):
            proj[S.of(i, j)][i * r + j] = 1
    pi = IntMat.from_rows(proj, cols=r * r)

    for a in L.action:
        t = kron(a, a)
        if t @ iota != iota @ wedge2_matrix(a) or sym2_matrix(a) @ pi != pi @ t:
            return False
    if not (pi @ iota).is_zero():
        return False
    # iota injective with saturated image (a direct summand)
    diag = smith_diagonal(iota)
    if len(diag) != len(W) or any(d != 1 for d in diag):
        return False
    # image equals ker(pi): both saturated of the same rank, one inside the other
    if kernel_basis(pi).cols != len(W):
        return False
    return _is_unimodular_onto(pi)


def _sum_to_sym2_map(n1: int, n2: int) -> IntMat:
    """Canonical map Sym^2 A1 + A1 (x) A2 + Sym^2 A2 -> Sym^2(A1 + A2)."""
    n = n1 + n2
    S, S1, S2 = Sym2Basis(n), Sym2Basis(n1), Sym2Basis(n2)
    cols = []
    for i, j in S1.pairs:
        cols.append(S.of(i, j))
    for i in range(n1):
        for j in range(n2):
            cols.append(S.of(i, n1 + j))
    for i, j in S2.pairs:
        cols.append(S.of(n1 + i, n1 + j))
    return IntMat.from_columns([[1 if t == c else 0 for t in range(len(S))] for c in cols], rows=len(S))


def _sum_to_wedge2_map(n1: int, n2: int) -> IntMat:
    n = n1 + n2
    W, W1, W2 = Wedge2Basis(n), Wedge2Basis(n1), Wedge2Basis(n2)
    cols = []
    for i, j in W1.pairs:
        cols.append(W.index[(i, j)])
    for i in range(n1):
        for j in range(n2):
            cols.append(W.index[(i, n1 + j)])
    for i, j in W2.pairs:
        cols.append(W.index[(n1 + i, n1 + j)])
    return IntMat.from_columns([[1 if t == c else 0 for t in range(len(W))] for c in cols], rows=len(W))


def check_direct_sum_decomposition(L1: GLattice, L2: GLattice) -> bool:
    """Is the canonical map onto ``Sym^2(L1 + L2)`` (and ``Wedge^2``) an equivariant isomorphism?"""
    L = direct_sum(L1, L2)
    n1, n2 = L1.rank, L2.rank
    phi_s = _sum_to_sym2_map(n1, n2)
    phi_w = _sum_to_wedge2_map(n1, n2)
    for m in (phi_s, phi_w):
        if m.rows and abs(det(m)) != 1:
            return False
    for a1, a2, a in zip(L1.action, L2.action, L.action):
        src_s = _block_diag([sym2_matrix(a1), kron(a1, a2), sym2_matrix(a2)])
        if phi_s @ src_s != sym2_matrix(a) @ phi_s:
            return False
        src_w = _block_diag([wedge2_matrix(a1), kron(a1, a2), wedge2_matrix(a2)])
        if phi_w @ src_w != wedge2_matrix(a) @ phi_w:
            return False
    return True
