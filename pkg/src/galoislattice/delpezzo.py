"""Picard lattices of del Pezzo surfaces and their Weyl-group actions.

A del Pezzo surface of degree ``d`` is the blow-up of the plane in
``r = 9 - d`` points, so its geometric Picard group is ``Z^(r+1)`` with
basis ``l_0`` (pull-back of a line) and ``l_1, ..., l_r`` (exceptional
curves), intersection form ``diag(1, -1, ..., -1)`` and canonical class
``omega = -3 l_0 + l_1 + ... + l_r``.  Vectors are coefficient tuples in
this basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

from .errors import (
    ActionDoesNotPreserveForm,
    BadDegree,
    BadInput,
    BadRank,
    DimensionMismatch,
    NotARoot,
    TooLargeForEnumeration,
    WrongDegree,
)
from .groups import DEFAULT_CAP, GLattice, MatGroup, close_group, h1, invariants
from .linalg import FinAbGroup, IntMat, kernel_basis
from .multilinear import Sym2Basis, sym2, sym2_product

# |W(R_r)| for r = 3..8 (root systems A1xA2, A4, D5, E6, E7, E8).
WEYL_ORDERS = {
    3: 2 * 6,
    4: 120,
    5: 2**7 * 3 * 5,
    6: 2**7 * 3**4 * 5,
    7: 2**10 * 3**4 * 5 * 7,
    8: 2**14 * 3**5 * 5**2 * 7,
}
ROOT_COUNTS = {3: 8, 4: 20, 5: 40, 6: 72, 7: 126, 8: 240}
EXCEPTIONAL_COUNTS = {1: 1, 2: 3, 3: 6, 4: 10, 5: 16, 6: 27, 7: 56, 8: 240}
ENUMERABLE_RANK = 6

# l_0-coefficient window for the class searches
DEFAULT_BOUND = (-3, 7)


@dataclass(frozen=True)
class DelPezzoPic:
    degree: int

    @property
    def r(self) -> int:
        return 9 - self.degree

    @property
    def rank(self) -> int:
        return self.r + 1

    @property
    def signs(self) -> tuple[int, ...]:
        return (1,) + (-1,) * self.r

    @cached_property
    def form(self) -> IntMat:
        return IntMat.diag(self.signs)

    @property
    def omega(self) -> tuple[int, ...]:
        return (-3,) + (1,) * self.r

    @property
    def labels(self) -> list[str]:
        return [f"l{i}" for i in range(self.rank)]

    def intersect(self, x: Sequence[int], y: Sequence[int]) -> int:
        if len(x) != self.rank or len(y) != self.rank:
            raise DimensionMismatch(f"vectors must have length {self.rank}")
        return sum(s * a * b for s, a, b in zip(self.signs, x, y))

    def basis_vector(self, i: int) -> tuple[int, ...]:
        return tuple(1 if k == i else 0 for k in range(self.rank))

    def preserves_structure(self, g: IntMat) -> bool:
        """``g^T Q g == Q`` and ``g omega == omega``."""
        return g.T @ self.form @ g == self.form and g.apply(self.omega) == self.omega


def picard_lattice(d: int) -> DelPezzoPic:
    if not isinstance(d, int) or not 1 <= d <= 9:
        raise BadDegree(f"degree must be an integer in 1..9, got {d!r}")
    return DelPezzoPic(d)


# ---------------------------------------------------------------------------
# class searches
# ---------------------------------------------------------------------------


def _vectors(k: int, total: int, norm: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors of length ``k`` with given coordinate sum and sum of squares."""
    if k == 0:
        if total == 0 and norm == 0:
            yield ()
        return
    if norm < 0 or total * total > k * norm:
        return
    m = math.isqrt(norm)
    for a in range(-m, m + 1):
        for rest in _vectors(k - 1, total - a, norm - a * a):
            yield (a,) + rest


def _classes(P: DelPezzoPic, self_int: int, omega_int: int, bound: tuple[int, int]) -> list[tuple[int, ...]]:
    # x = a0 l0 + sum a_i l_i:  x.x = a0^2 - sum a_i^2,  x.omega = -3 a0 - sum a_i
    out = []
    for a0 in range(bound[0], bound[1] + 1):
        norm = a0 * a0 - self_int
        total = -omega_int - 3 * a0
        for rest in _vectors(P.r, total, norm):
            out.append((a0,) + rest)
    out.sort(key=lambda v: (v[0], tuple(-abs(c) for c in v[1:]), v[1:]))
    return out


def exceptional_classes(P: DelPezzoPic, bound: tuple[int, int] = DEFAULT_BOUND) -> list[tuple[int, ...]]:
    """All ``E`` with ``E.E = -1`` and ``E.omega = -1`` (l_0-coefficient within ``bound``)."""
    if P.r < 1:
        raise BadRank("the plane (r = 0) has no exceptional classes")
    return _classes(P, -1, -1, bound)


@dataclass(frozen=True)
class RootDatum:
    r: int
    roots: tuple[tuple[int, ...], ...]
    simple_roots: tuple[tuple[int, ...], ...]
    weyl_order_constant: int


def simple_roots(P: DelPezzoPic) -> list[tuple[int, ...]]:
    """``l0 - l1 - l2 - l3`` followed by ``l_i - l_(i+1)``."""
    r = P.r
    first = (1, -1, -1, -1) + (0,) * (r - 3)
    rest = [tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(r + 1)) for i in range(1, r)]
    return [first] + rest


def roots(P: DelPezzoPic, bound: tuple[int, int] = DEFAULT_BOUND) -> RootDatum:
    if not 3 <= P.r <= 8:
        raise BadRank(f"root systems are tabulated for 3 <= r <= 8, got r = {P.r}")
    found = _classes(P, -2, 0, bound)
    return RootDatum(P.r, tuple(found), tuple(simple_roots(P)), WEYL_ORDERS[P.r])


def reflection(P: DelPezzoPic, alpha: Sequence[int]) -> IntMat:
    """``s(x) = x + (x . alpha) alpha``; an involution fixing omega."""
    alpha = tuple(alpha)
    if len(alpha) != P.rank or P.intersect(alpha, alpha) != -2 or P.intersect(alpha, P.omega) != 0:
        raise NotARoot(f"{alpha} is not a root")
    cols = []
    for j in range(P.rank):
        c = P.signs[j] * alpha[j]  # e_j . alpha
        cols.append([(1 if i == j else 0) + c * alpha[i] for i in range(P.rank)])
    return IntMat.from_columns(cols, rows=P.rank)


def weyl_group(P: DelPezzoPic, cap: int = DEFAULT_CAP) -> MatGroup:
    if P.r > ENUMERABLE_RANK:
        raise TooLargeForEnumeration(
            f"W(R_{P.r}) has {WEYL_ORDERS[P.r]} elements; only its order is used"
        )
    if P.r < 3:
        raise BadRank(f"no tabulated root system for r = {P.r}")
    return close_group([reflection(P, a) for a in simple_roots(P)], cap=cap)


def transposition(P: DelPezzoPic, i: int, j: int) -> IntMat:
    perm = list(range(P.rank))
    perm[i], perm[j] = perm[j], perm[i]
    return IntMat.from_columns([P.basis_vector(perm[k]) for k in range(P.rank)], rows=P.rank)


def symmetric_group_image(P: DelPezzoPic, cap: int = DEFAULT_CAP) -> MatGroup:
    """Permutations of ``l_1..l_r`` fixing ``l_0``, generated by adjacent transpositions."""
    if P.r < 2:
        raise BadRank("need r >= 2")
    return close_group([transposition(P, i, i + 1) for i in range(1, P.r)], cap=cap)


# ---------------------------------------------------------------------------
# Sym^2 Pic and the cup product
# ---------------------------------------------------------------------------


def cup(P: DelPezzoPic, v: Sequence[int]) -> int:
    """Intersection number of a Sym^2 class: ``x . y -> (x, y)``, extended linearly."""
    basis = Sym2Basis(P.rank)
    if len(v) != len(basis):
        raise DimensionMismatch(f"Sym^2 vector must have length {len(basis)}")
    return sum(P.signs[i] * v[basis.of(i, i)] for i in range(P.rank))


def cup_row(P: DelPezzoPic) -> IntMat:
    basis = Sym2Basis(P.rank)
    row = [P.signs[i] if i == j else 0 for i, j in basis.pairs]
    return IntMat.from_rows([row])


def omega_squared(P: DelPezzoPic) -> tuple[int, ...]:
    return sym2_product(P.omega, P.omega)


def diagonal_class(P: DelPezzoPic) -> tuple[int, ...]:
    """``L = l0.l0 - sum l_i.l_i``, invariant under the whole Weyl group for r = 6."""
    basis = Sym2Basis(P.rank)
    v = [0] * len(basis)
    for i in range(P.rank):
        v[basis.of(i, i)] = P.signs[i]
    return tuple(v)


def degree6_witnesses(P: DelPezzoPic) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The two invariant classes with coprime cup values in degree 6.

    ``L1 = sum_{i<j} (l0 - l_i).(l0 - l_j)`` and ``L2 = l0.(omega + l0)``.
    """
    if P.degree != 6:
        raise WrongDegree("the witnesses live in degree 6")
    e = P.basis_vector
    diff = [tuple(a - b for a, b in zip(e(0), e(i))) for i in range(1, 4)]
    L1 = [0] * (P.rank * (P.rank + 1) // 2)
    for i in range(3):
        for j in range(i + 1, 3):
            L1 = [a + b for a, b in zip(L1, sym2_product(diff[i], diff[j]))]
    L2 = sym2_product(e(0), tuple(a + b for a, b in zip(P.omega, e(0))))
    return tuple(L1), L2


def _check_group(P: DelPezzoPic, gens: Sequence[IntMat]) -> None:
    for g in gens:
        if g.shape != (P.rank, P.rank):
            raise DimensionMismatch(f"generator must be {P.rank}x{P.rank}")
        if not P.preserves_structure(g):
            raise ActionDoesNotPreserveForm("generator does not preserve the intersection form and omega")


def kernel_lattice(P: DelPezzoPic, G: MatGroup) -> GLattice:
    """The G-lattice ``ker(cup: Sym^2 Pic -> Z)`` with the induced action.

    Its basis (columns, Sym^2 coordinates) is :func:`cup_kernel_basis`.
    """
    _check_group(P, G.generators)
    K = cup_kernel_basis(P)
    S = sym2(GLattice(G, G.generators, P.rank))
    return S.sublattice(K)


def cup_kernel_basis(P: DelPezzoPic) -> IntMat:
    return kernel_basis(cup_row(P))


# ---------------------------------------------------------------------------
# the cubic surface (d = 3)
# ---------------------------------------------------------------------------


def line_order(P: DelPezzoPic) -> list[tuple[int, ...]]:
    """The 27 lines as ``l_i``, then ``2 l0 - sum_{j != i} l_j``, then ``l0 - l_i - l_j``."""
    if P.degree != 3:
        raise WrongDegree("the 27 lines live in degree 3")
    e = P.basis_vector
    lines = [e(i) for i in range(1, 7)]
    for i in range(1, 7):
        lines.append((2,) + tuple(0 if j == i else -1 for j in range(1, 7)))
    for i in range(1, 7):
        for j in range(i + 1, 7):
            lines.append((1,) + tuple(-1 if k in (i, j) else 0 for k in range(1, 7)))
    return lines


def mixed_basis_change(P: DelPezzoPic) -> IntMat:
    """Signed permutation taking lexicographic Sym^2 coordinates to the mixed basis

    ``[(l_i.l_i)_{i=0..r}, (-l0.l_i)_{i=1..r}, (l_i.l_j)_{1<=i<j<=r}]``.
    """
    basis = Sym2Basis(P.rank)
    order = [((i, i), 1) for i in range(P.rank)]
    order += [((0, i), -1) for i in range(1, P.rank)]
    order += [((i, j), 1) for i in range(1, P.rank) for j in range(i + 1, P.rank)]
    n = len(basis)
    rows = []
    for pair, sign in order:
        row = [0] * n
        row[basis.index[pair]] = sign
        rows.append(row)
    return IntMat.from_rows(rows, cols=n)


def permutation_basis_vectors(P: DelPezzoPic) -> list[tuple[int, ...]]:
    """``-L`` followed by ``D_i.D_i`` for the 27 lines, in Sym^2 coordinates."""
    minus_L = tuple(-x for x in diagonal_class(P))
    return [minus_L] + [sym2_product(D, D) for D in line_order(P)]


def matrix_A(P: DelPezzoPic) -> IntMat:
    """Rows: ``-L`` and ``D_i.D_i`` written in the mixed basis of :func:`mixed_basis_change`."""
    if P.degree != 3:
        raise WrongDegree("matrix A is defined for the cubic surface only")
    C = mixed_basis_change(P)
    return IntMat.from_rows([C.apply(v) for v in permutation_basis_vectors(P)])


def permutation_basis(P: DelPezzoPic) -> IntMat:
    """Same vectors as columns, in lexicographic Sym^2 coordinates."""
    return IntMat.from_columns(permutation_basis_vectors(P), rows=P.rank * (P.rank + 1) // 2)


# ---------------------------------------------------------------------------
# Sylow arithmetic
# ---------------------------------------------------------------------------


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, math.isqrt(p) + 1))


def sylow_order_check(d: int, p: int) -> bool:
    """Do ``r!`` and ``|W(R_r)|`` have the same ``p``-adic valuation (``r = 9 - d``)?

    When they do, a Sylow p-subgroup of the symmetric group on the ``l_i`` is
    a Sylow p-subgroup of the Weyl group.
    """
    if d not in (1, 2, 3, 4):
        raise BadInput(f"degree must be 1, 2, 3 or 4, got {d}")
    if not _is_prime(p):
        raise BadInput(f"{p} is not prime")
    r = 9 - d
    return valuation(math.factorial(r), p) == valuation(WEYL_ORDERS[r], p)


def weyl_sylow_comparison(p: int) -> bool:
    """Same p-part for W(E6) and W(E7)?  (Used for the degree-2 reduction at p = 3.)"""
    if not _is_prime(p):
        raise BadInput(f"{p} is not prime")
    return valuation(WEYL_ORDERS[6], p) == valuation(WEYL_ORDERS[7], p)


# ---------------------------------------------------------------------------
# obstruction report
# ---------------------------------------------------------------------------


@dataclass
class ObstructionReport:
    degree: int
    group_order: int
    cup_index: int
    invariant_rank: int
    h1_sym2: FinAbGroup
    h1_kernel: FinAbGroup
    order_identity: bool
    vanishing_flag: bool
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "group_order": str(self.group_order),
            "cup_index": str(self.cup_index),
            "invariant_rank": self.invariant_rank,
            "h1_sym2": self.h1_sym2.to_json(),
            "h1_kernel": self.h1_kernel.to_json(),
            "order_identity": self.order_identity,
            "vanishing_flag": self.vanishing_flag,
            "notes": list(self.notes),
        }


def obstruction_report(d: int, galois_generators: Sequence[IntMat], cap: int = DEFAULT_CAP) -> ObstructionReport:
    """Lattice side of the exact sequence

    ``(Sym^2 Pic)^G --cup--> Z -> H^1(G, ker cup) -> H^1(G, Sym^2 Pic) -> 0``.

    ``cup_index`` is the index of the image of the invariants in ``Z``;
    ``order_identity`` checks ``|H^1(ker)| == cup_index * |H^1(Sym^2)|``.
    """
    P = picard_lattice(d)
    gens = list(galois_generators)
    _check_group(P, gens)
    G = close_group(gens, cap=cap, rank=P.rank)
    S = sym2(GLattice(G, G.generators, P.rank))
    inv = invariants(S)
    values = [cup(P, c) for c in inv.columns()]
    index = math.gcd(*values) if values else 0
    h_sym = h1(S)
    K = S.sublattice(cup_kernel_basis(P))
    h_ker = h1(K)
    notes = []
    if index == 0:
        notes.append("cup vanishes on invariants")
        identity = False
    else:
        identity = h_ker.order() == index * h_sym.order()
    return ObstructionReport(d, G.order, index, inv.cols, h_sym, h_ker, identity, h_sym.is_trivial(), notes)
