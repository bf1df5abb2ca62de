"""Finite matrix groups, G-lattices and their low-degree cohomology.

A :class:`MatGroup` is the closure of a list of invertible integer
matrices, enumerated breadth first.  A :class:`GLattice` attaches to each
generator of such a group a matrix acting on a free module; the action of
every other element is read off along the BFS tree.

``H^1`` is computed from generator values of cocycles: a cocycle ``f`` is
determined by ``f(s)`` for the generators ``s``, the tree gives ``f(g)`` as
a linear expression in those unknowns, and the cocycle identity
``f(s g) = f(s) + s f(g)`` for all generators ``s`` and elements ``g``
cuts out ``Z^1``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    GroupTooLarge,
    IndexOutOfRange,
    InconsistentAction,
    NotInvertible,
    NotPeriodic,
)
from .linalg import (
    FinAbGroup,
    IntMat,
    det,
    echelon_coordinates,
    kernel_basis,
    quotient,
    smith_diagonal,
    solve_integer,
)

DEFAULT_CAP = 200_000

# Entries of finite-group elements stay tiny; anything this large means the
# generated group is infinite (or hopeless), and int64 products stay exact.
_ENTRY_LIMIT = 2**24

# Prime used only to pick a maximal independent subset of constraint rows.
_SELECTION_PRIME = 2_147_483_647


def _as_array(m: IntMat) -> np.ndarray:
    if m.max_abs() > _ENTRY_LIMIT:
        raise GroupTooLarge("matrix entries too large for enumeration")
    return m.to_array(np.int64)


class MatGroup:
    """Finite group of integer matrices given by generators.

    Elements are stored in BFS order starting from the identity; element
    ``y`` was first reached as ``parent[y] * generators[parent_gen[y]]``.
    """

    def __init__(self, rank: int, generators: Sequence[IntMat], cap: int = DEFAULT_CAP):
        self.rank = rank
        self.generators: tuple[IntMat, ...] = tuple(generators)
        self.cap = cap
        for g in self.generators:
            if g.shape != (rank, rank):
                raise DimensionMismatch(f"generator of shape {g.shape}, expected {rank}x{rank}")
            if abs(det(g)) != 1:
                raise NotInvertible("generator is not invertible over Z")
        self._gens = [_as_array(g) for g in self.generators]
        self._enumerate()

    def _enumerate(self) -> None:
        r = self.rank
        ident = np.eye(r, dtype=np.int64)
        mats = [ident]
        index = {ident.tobytes(): 0}
        parent, parent_gen = [-1], [-1]
        layer = [0]
        while layer:
            block = np.stack([mats[i] for i in layer])
            nxt = []
            for s_idx, s in enumerate(self._gens):
                prods = block @ s
                if np.abs(prods).max(initial=0) > _ENTRY_LIMIT:
                    raise GroupTooLarge("entries grow without bound; the group looks infinite")
                for pos, y in enumerate(prods):
                    key = y.tobytes()
                    if key not in index:
                        index[key] = len(mats)
                        mats.append(y)
                        parent.append(layer[pos])
                        parent_gen.append(s_idx)
                        nxt.append(len(mats) - 1)
                        if len(mats) > self.cap:
                            raise GroupTooLarge(f"closure exceeds cap of {self.cap} elements")
            layer = nxt
        self._mats = np.stack(mats)
        self._index = index
        self.parent = parent
        self.parent_gen = parent_gen

    # -- basic access ---------------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.parent)

    def __len__(self) -> int:
        return self.order

    @property
    def arrays(self) -> np.ndarray:
        """All elements as an ``(order, rank, rank)`` int64 array (read-only use)."""
        return self._mats

    def element(self, i: int) -> IntMat:
        if not 0 <= i < self.order:
            raise IndexOutOfRange(f"element index {i} outside 0..{self.order - 1}")
        return IntMat.from_array(self._mats[i])

    @cached_property
    def elements(self) -> list[IntMat]:
        return [IntMat.from_array(m) for m in self._mats]

    def index_of(self, m) -> int:
        arr = m.to_array(np.int64) if isinstance(m, IntMat) else np.ascontiguousarray(m, dtype=np.int64)
        try:
            return self._index[arr.tobytes()]
        except KeyError:
            raise KeyError("matrix is not an element of the group") from None

    def lookup(self, arrays: np.ndarray) -> np.ndarray:
        """Indices of a stack of matrices; ``-1`` for non-members."""
        get = self._index.get
        return np.fromiter((get(np.ascontiguousarray(a).tobytes(), -1) for a in arrays), dtype=np.int64, count=len(arrays))

    def __contains__(self, m) -> bool:
        try:
            self.index_of(m)
        except (KeyError, OverflowError):
            return False
        return True

    @cached_property
    def generator_indices(self) -> list[int]:
        return [self.index_of(g) for g in self._gens]

    def word(self, i: int) -> list[int]:
        """Generator indices ``w`` with ``element(i) == prod(generators[w[k]])``."""
        out = []
        while self.parent[i] >= 0:
            out.append(self.parent_gen[i])
            i = self.parent[i]
        return out[::-1]

    @property
    def generator_words(self) -> list[list[int]]:
        return [self.word(i) for i in range(self.order)]

    # -- arithmetic on indices ------------------------------------------------
    def multiply(self, i: int, j: int) -> int:
        return self._index[(self._mats[i] @ self._mats[j]).tobytes()]

    def left_table(self, s: int) -> np.ndarray:
        """``t[g]`` = index of ``generators[s] * element(g)``."""
        return self._left_tables[s]

    @cached_property
    def _left_tables(self) -> list[np.ndarray]:
        return [self.lookup(s @ self._mats) for s in self._gens]

    @cached_property
    def _powers(self) -> tuple[np.ndarray, np.ndarray]:
        """Element orders and inverse indices, by batch powering."""
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        inverse = np.full(n, -1, dtype=np.int64)
        ident = np.eye(self.rank, dtype=np.int64)
        cur = self._mats.copy()
        prev_index = np.zeros(n, dtype=np.int64)  # index of g^(k-1)
        k = 1
        while (orders == 0).any():
            done = np.all(cur == ident, axis=(1, 2)) & (orders == 0)
            orders[done] = k
            inverse[done] = prev_index[done]
            prev_index = self.lookup(cur)
            cur = cur @ self._mats
            k += 1
        inverse[0] = 0
        return orders, inverse

    def element_order(self, i: int) -> int:
        return int(self._powers[0][i])

    def inverse(self, i: int) -> int:
        return int(self._powers[1][i])

    def power(self, i: int, k: int) -> int:
        m = np.linalg.matrix_power(self._mats[i], k)
        return self._index[m.tobytes()]

    def subgroup_closure(self, gens: Sequence[int]) -> set[int]:
        """Element indices of the subgroup generated by the given indices."""
        seen = np.zeros(self.order, dtype=bool)
        seen[0] = True
        frontier = np.array([0])
        gen_mats = [self._mats[g] for g in gens]
        while frontier.size:
            images = np.concatenate([self.lookup(self._mats[frontier] @ g) for g in gen_mats]) if gen_mats else frontier[:0]
            images = np.unique(images[~seen[images]])
            seen[images] = True
            frontier = images
        return set(np.flatnonzero(seen).tolist())

    def __repr__(self) -> str:
        return f"MatGroup(rank={self.rank}, generators={len(self.generators)}, order={self.order})"


def close_group(generators: Sequence[IntMat], cap: int = DEFAULT_CAP, rank: int | None = None) -> MatGroup:
    """Enumerate the group generated by ``generators`` (BFS, capped)."""
    if rank is None:
        if not generators:
            raise DimensionMismatch("rank is required when there are no generators")
        rank = generators[0].rows
    return MatGroup(rank, generators, cap)


# ---------------------------------------------------------------------------
# G-lattices
# ---------------------------------------------------------------------------


class GLattice:
    """Free module ``Z^rank`` on which ``group`` acts, one matrix per generator."""

    def __init__(self, group: MatGroup, action: Sequence[IntMat] | None = None, rank: int | None = None):
        if action is None:
            action = group.generators
            rank = group.rank
        action = tuple(action)
        if len(action) != len(group.generators):
            raise DimensionMismatch("need exactly one action matrix per generator")
        if rank is None:
            if not action:
                raise DimensionMismatch("rank is required for a trivial group")
            rank = action[0].rows
        for a in action:
            if a.shape != (rank, rank):
                raise DimensionMismatch(f"action matrix of shape {a.shape}, expected {rank}x{rank}")
            if abs(det(a)) != 1:
                raise NotInvertible("action matrix is not invertible over Z")
        self.rank = rank
        self.group = group
        self.action = action

    @classmethod
    def standard(cls, group: MatGroup) -> GLattice:
        return cls(group, group.generators, group.rank)

    @classmethod
    def trivial(cls, group: MatGroup, rank: int) -> GLattice:
        return cls(group, [IntMat.identity(rank)] * len(group.generators), rank)

    @cached_property
    def _action_arrays(self) -> list[np.ndarray]:
        return [a.to_array(np.int64) for a in self.action]

    def action_of(self, i: int) -> IntMat:
        """Matrix by which group element ``i`` acts."""
        m = IntMat.identity(self.rank)
        for s in self.group.word(i):
            m = m @ self.action[s]
        return m

    @cached_property
    def element_actions(self) -> np.ndarray:
        """``(order, rank, rank)`` array of the action of every element."""
        G = self.group
        out = np.empty((G.order, self.rank, self.rank), dtype=np.int64)
        out[0] = np.eye(self.rank, dtype=np.int64)
        acts = self._action_arrays
        for y in range(1, G.order):
            out[y] = out[G.parent[y]] @ acts[G.parent_gen[y]]
            if np.abs(out[y]).max() > _ENTRY_LIMIT:
                raise InconsistentAction("action entries explode; the action is not a finite-group action")
        return out

    def check_action(self) -> bool:
        """True iff the generator matrices define an action of the closure."""
        acts = self.element_actions
        for s, a in enumerate(self._action_arrays):
            t = self.group.left_table(s)
            if not np.array_equal(acts[t], np.einsum("ij,gjk->gik", a, acts)):
                return False
        return True

    def sublattice(self, basis: IntMat) -> GLattice:
        """Induced action on the G-stable sublattice spanned by ``basis``'s columns."""
        induced = [solve_integer(basis, a @ basis) for a in self.action]
        return GLattice(self.group, induced, basis.cols)

    def conjugate(self, P: IntMat) -> GLattice:
        """Same module written in the basis given by the columns of unimodular ``P``."""
        Pinv = solve_integer(P, IntMat.identity(self.rank))
        return GLattice(self.group, [Pinv @ a @ P for a in self.action], self.rank)

    def __repr__(self) -> str:
        return f"GLattice(rank={self.rank}, group order={self.group.order})"


# ---------------------------------------------------------------------------
# cohomology
# ---------------------------------------------------------------------------


def invariants(L: GLattice) -> IntMat:
    """Basis (columns) of the saturated fixed sublattice ``M^G``."""
    ident = IntMat.identity(L.rank)
    return kernel_basis(IntMat.stack([a - ident for a in L.action], L.rank))


def _independent_rows(M: np.ndarray, p: int = _SELECTION_PRIME) -> list[int]:
    """Indices of rows of ``M`` that are independent modulo ``p``.

    Rows independent mod p are independent over Q; whether they span the
    rational row space is checked afterwards by the caller.
    """
    A = M % p
    chosen: list[int] = []
    for j in range(A.shape[1]):
        nz = np.flatnonzero(A[:, j])
        if nz.size == 0:
            continue
        r = int(nz[0])
        chosen.append(r)
        inv = pow(int(A[r, j]), -1, p)
        pivot = (A[r] * inv) % p
        col = A[:, j].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            A[hit] = (A[hit] - (col[hit, None] * pivot[None, :]) % p) % p
        A[r] = 0
    return chosen


def _kills(C: np.ndarray, K: IntMat) -> np.ndarray:
    """Mask of the rows ``c`` of ``C`` with ``c K != 0``, computed exactly."""
    bound = int(np.abs(C).max(initial=0)) * K.max_abs() * C.shape[1]
    if bound < 2**53:  # every partial sum is an integer float64 represents exactly
        prod = C.astype(np.float64) @ K.to_array(np.float64)
    elif bound < 2**62:
        prod = C @ K.to_array(np.int64)
    else:
        prod = C.astype(object) @ K.to_array(object)
    return np.any(prod != 0, axis=1)


def _distinct_rows(C: np.ndarray) -> np.ndarray:
    """Drop repeated rows, keyed by a wrapping hash.

    A hash collision can only drop a distinct row; callers re-verify
    everything exactly, so that costs a pass, never correctness.
    """
    if C.shape[0] < 2:
        return C
    weights = np.random.default_rng(0).integers(1, 2**62, size=C.shape[1], dtype=np.int64)
    with np.errstate(over="ignore"):
        keys = C @ weights
    _, first = np.unique(keys, return_index=True)
    return C[np.sort(first)]


def _kernel_streamed(chunks: Callable[[], Iterator[np.ndarray]], ncols: int, batch: int | None = None) -> IntMat:
    """Saturated integer kernel of the tall matrix whose rows ``chunks()`` yields.

    Starting from the whole space, rows that do not vanish on the current
    candidate kernel are collected, a subset independent mod p is kept and
    the kernel recomputed exactly.  Every round strictly lowers the kernel
    rank, and the loop only ends after a full exact pass finds no violated
    row, so the answer never depends on the prime.
    """
    batch = batch or max(64, 4 * ncols)
    selected = np.zeros((0, ncols), dtype=np.int64)
    K = IntMat.identity(ncols)
    while True:
        found, count = [], 0
        for C in chunks():
            if not K.cols:
                break
            bad = C[_kills(C, K)]
            if bad.shape[0]:
                bad = _distinct_rows(bad)[:batch]
                found.append(bad)
                count += bad.shape[0]
                if count >= batch:
                    break
        if not found:
            return K
        cand = _distinct_rows(np.concatenate([selected] + found))
        idx = _independent_rows(cand)
        if len(idx) > selected.shape[0]:
            selected = cand[sorted(idx)]
        else:  # the prime lost rank; keep every violated row, the kernel stays exact
            selected = cand
        K = kernel_basis(IntMat.from_array(selected))


@dataclass(frozen=True)
class H1Result:
    """``cocycle_basis`` holds cocycles by their values on generators: those of
    ``L.group``, or the elements listed in ``generators`` when the computation
    switched to a smaller generating set."""

    group: FinAbGroup
    z1_rank: int
    b1_rank: int
    cocycle_basis: IntMat = field(repr=False)
    generators: tuple[int, ...] | None = None


# Above this many entries (order x generators x rank^2) H^1 is computed over a
# two-element generating set when one is found.
_REDUCE_GENERATORS = 50_000_000


def two_generators(G: MatGroup, tries: int = 32, seed: int = 0) -> list[int] | None:
    """A pair of element indices generating ``G``, by seeded random search."""
    rng = random.Random(seed)
    for _ in range(tries):
        pair = [rng.randrange(G.order), rng.randrange(G.order)]
        if len(G.subgroup_closure(pair)) == G.order:
            return pair
    return None


def h1_details(L: GLattice) -> H1Result:
    """``H^1(G, M)`` with the ranks of ``Z^1`` and ``B^1``."""
    G = L.group
    k, n = len(G.generators), L.rank
    if k == 0 or n == 0:
        return H1Result(FinAbGroup.trivial(), 0, 0, IntMat.zeros(k * n, 0))
    if k > 2 and G.order * k * n * n > _REDUCE_GENERATORS:
        pair = two_generators(G)
        if pair is not None:
            small = GLattice(MatGroup(G.rank, [G.element(i) for i in pair], G.cap), [L.action_of(i) for i in pair], n)
            res = h1_details(small)
            return H1Result(res.group, res.z1_rank, res.b1_rank, res.cocycle_basis, tuple(pair))
    acts = L.element_actions
    nv = k * n
    # F[g]: f(g) as a linear map of the generator values (n x k*n); entries
    # grow at most by max|act| per BFS layer, which decides the storage type
    depth = np.zeros(G.order, dtype=np.int64)
    for y in range(1, G.order):
        depth[y] = depth[G.parent[y]] + 1
    bound = int(depth.max(initial=0)) * int(np.abs(acts).max(initial=1))
    F = np.zeros((G.order, n, nv), dtype=np.int32 if bound < 2**31 else np.int64)
    for y in range(1, G.order):
        x, s = G.parent[y], G.parent_gen[y]
        F[y] = F[x]
        F[y][:, s * n:(s + 1) * n] += acts[x]
    step = max(1, 2_000_000 // (n * nv))
    eye = np.eye(n, dtype=np.int64)
    amax = max(int(np.abs(a).max(initial=0)) for a in L._action_arrays)
    exact_float = (bound + 1) * (amax * n + 1) < 2**53

    def times(a, block):
        # a @ block[g] for every g, as one matrix product
        g = block.shape[0]
        flat = block.transpose(1, 0, 2).reshape(n, g * nv)
        if exact_float:
            prod = np.rint(a.astype(np.float64) @ flat.astype(np.float64)).astype(np.int64)
        else:
            prod = a @ flat.astype(np.int64)
        return prod.reshape(n, g, nv).transpose(1, 0, 2)

    def chunks():
        for s, a in enumerate(L._action_arrays):
            t = G.left_table(s)
            for lo in range(0, G.order, step):
                hi = min(lo + step, G.order)
                C = F[t[lo:hi]].astype(np.int64) - times(a, F[lo:hi])
                C[:, :, s * n:(s + 1) * n] -= eye
                C = C.reshape(-1, nv)
                yield C[np.any(C != 0, axis=1)]

    Z = _kernel_streamed(chunks, nv)
    ident = IntMat.identity(n)
    B = IntMat.stack([a - ident for a in L.action], n)
    coords = echelon_coordinates(Z, B)
    return H1Result(quotient(Z.cols, coords), Z.cols, len(smith_diagonal(B)), Z)


def h1(L: GLattice) -> FinAbGroup:
    """First cohomology ``H^1(G, M)`` in invariant-factor form."""
    return h1_details(L).group


def h1_cyclic(sigma: IntMat, order: int) -> FinAbGroup:
    """``H^1`` of the cyclic group generated by ``sigma``: ``ker(N) / im(sigma - 1)``."""
    if not sigma.is_square():
        raise DimensionMismatch("sigma must be square")
    n = sigma.rows
    if order < 1 or not (sigma ** order).is_identity():
        raise NotPeriodic(f"sigma^{order} is not the identity")
    norm = IntMat.zeros(n, n)
    p = IntMat.identity(n)
    for _ in range(order):
        norm = norm + p
        p = p @ sigma
    K = kernel_basis(norm)
    coords = echelon_coordinates(K, sigma - IntMat.identity(n))
    return quotient(K.cols, coords)


@dataclass(frozen=True)
class PermutationCertificate:
    """Outcome of :func:`is_permutation_basis`.

    ``permutations[s][j]`` is the column of the basis that generator ``s``
    sends column ``j`` to.
    """

    ok: bool
    determinant: int
    coprime: bool
    permutations: tuple[tuple[int, ...], ...] | None
    reason: str = ""


def is_permutation_basis(L: GLattice, B: IntMat, p: int) -> PermutationCertificate:
    """Does G permute the columns of ``B`` (no signs), with ``p`` not dividing det B?

    A yes means ``M tensor Z_p`` is a permutation module, so its ``H^1``
    vanishes for every subgroup; in particular ``H^1(H, M)[p] = 0``.
    """
    if B.shape != (L.rank, L.rank):
        raise DimensionMismatch(f"basis must be {L.rank}x{L.rank}, got {B.shape}")
    d = det(B)
    coprime = d % p != 0
    cols = B.columns()
    where = {c: j for j, c in enumerate(cols)}
    perms = []
    for s, a in enumerate(L.action):
        image = (a @ B).columns()
        perm = tuple(where.get(c, -1) for c in image)
        if -1 in perm or len(set(perm)) != len(perm):
            return PermutationCertificate(False, d, coprime, None, f"generator {s} does not permute the basis")
        perms.append(perm)
    if not coprime:
        return PermutationCertificate(False, d, coprime, tuple(perms), f"{p} divides det = {d}")
    return PermutationCertificate(True, d, coprime, tuple(perms))


def restrict(L: GLattice, subgroup_generators: Sequence[int]) -> GLattice:
    """Restriction of ``L`` to the subgroup generated by the given element indices."""
    G = L.group
    for i in subgroup_generators:
        if not 0 <= i < G.order:
            raise IndexOutOfRange(f"element index {i} outside 0..{G.order - 1}")
    sub = MatGroup(G.rank, [G.element(i) for i in subgroup_generators], G.cap)
    return GLattice(sub, [L.action_of(i) for i in subgroup_generators], L.rank)


def _p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def sylow_subgroup(G: MatGroup, p: int, seed: int | None = None) -> list[int]:
    """Element indices generating a Sylow ``p``-subgroup of ``G``.

    Grows a p-subgroup ``P`` one factor of ``p`` at a time: if ``P`` is not
    yet Sylow, some ``g`` in its normaliser lies outside ``P`` with
    ``g^p`` in ``P``, and ``<P, g>`` has order ``p |P|``.  Candidates are
    scanned in BFS order, or in a shuffled order when ``seed`` is given.
    """
    target = _p_part(G.order, p)
    if target == 1:
        return []
    orders, inverse = G._powers
    scan = list(range(G.order))
    if seed is not None:
        random.Random(seed).shuffle(scan)
    scan = np.array(scan, dtype=np.int64)
    mats = G.arrays
    inv_mats = mats[inverse]
    powered = mats
    for _ in range(p - 1):
        powered = powered @ mats
    pth = G.lookup(powered)

    first = next(int(i) for i in scan if orders[i] == p)
    gens = [first]
    members = G.subgroup_closure(gens)
    while len(members) < target:
        member_mask = np.zeros(G.order, dtype=bool)
        member_mask[list(members)] = True
        ok = ~member_mask & (pth >= 0)
        ok &= member_mask[np.where(pth >= 0, pth, 0)]
        for x in gens:
            conj = G.lookup(mats @ mats[x] @ inv_mats)
            ok &= (conj >= 0) & member_mask[np.where(conj >= 0, conj, 0)]
        pick = next((int(i) for i in scan if ok[i]), None)
        if pick is None:  # impossible for a genuine finite group
            raise ArithmeticError("no normalising p-element found")
        gens.append(pick)
        members = G.subgroup_closure(gens)
    return gens
