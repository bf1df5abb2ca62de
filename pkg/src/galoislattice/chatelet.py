"""Picard lattices of generalized Chatelet surfaces.

The surface is a conic bundle ``y^2 - a z^2 = P(t)`` split by ``k' = k(sqrt a)``.
Its geometric Picard group is free on the fibre components ``D_j`` (one per
root ``j`` of ``P``), the fibre ``F`` and a section ``G``, with the conjugate
classes given by ``D'_j = F - D_j`` and ``G' = G + sum_j D_j - (n/2) F``.

The input is abstract Galois data: the roots ``0..n-1`` are grouped into
blocks ``J_i`` (the irreducible factors, listed in order), ``Gamma'`` (the
absolute Galois group of ``k'``) acts through the given root permutations,
and ``sigma`` is the root permutation of one lift of the generator of
``Gal(k'/k)``.  Elements of ``Gamma'`` act on the basis by permutation;
lifts of ``sigma`` additionally swap each ``D`` with ``D'`` and ``G`` with ``G'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .errors import (
    BadFactorId,
    BadInput,
    GroupTooLarge,
    InconsistentSigma,
    NotInSpan,
    NotTransitive,
    OddDegree,
    ParseError,
    PreconditionViolated,
    WitnessNotFound,
)
from .groups import DEFAULT_CAP, GLattice, MatGroup, h1, h1_cyclic
from .linalg import FinAbGroup, IntMat, det, echelon_coordinates, kernel_basis, solve_integer
from .multilinear import sym2, sym2_matrix, sym2_product

Perm = tuple[int, ...]


def compose(g: Perm, h: Perm) -> Perm:
    """``(g h)(j) = g(h(j))``."""
    return tuple(g[x] for x in h)


def invert(g: Perm) -> Perm:
    out = [0] * len(g)
    for i, x in enumerate(g):
        out[x] = i
    return tuple(out)


def perm_closure(gens: Sequence[Perm], n: int, cap: int = DEFAULT_CAP) -> list[Perm]:
    ident = tuple(range(n))
    seen = {ident: None}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen[y] = None
                    order.append(y)
                    nxt.append(y)
                    if len(order) > cap:
                        raise GroupTooLarge(f"permutation group exceeds cap of {cap}")
        frontier = nxt
    return order


@dataclass(frozen=True)
class ChateletSpec:
    factors: tuple[tuple[int, int], ...]
    gamma_generators: tuple[Perm, ...]
    sigma_root_perm: Perm

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((int(i), int(d)) for i, d in self.factors))
        object.__setattr__(self, "gamma_generators", tuple(tuple(int(x) for x in g) for g in self.gamma_generators))
        object.__setattr__(self, "sigma_root_perm", tuple(int(x) for x in self.sigma_root_perm))
        ids = [i for i, _ in self.factors]
        if not self.factors:
            raise BadInput("at least one factor is required")
        if len(set(ids)) != len(ids):
            raise BadInput("factor ids must be distinct")
        if any(d < 1 for _, d in self.factors):
            raise BadInput("factor degrees must be positive")
        if self.n % 2:
            raise OddDegree(f"total degree {self.n} is odd")
        for g in self.gamma_generators + (self.sigma_root_perm,):
            if sorted(g) != list(range(self.n)):
                raise BadInput(f"{list(g)} is not a permutation of 0..{self.n - 1}")
            for block in self.blocks.values():
                if {g[j] for j in block} != set(block):
                    raise BadInput(f"{list(g)} does not preserve the root block {block}")

    # -- structure ----------------------------------------------------------
    @property
    def n(self) -> int:
        return sum(d for _, d in self.factors)

    @property
    def ids(self) -> list[int]:
        return [i for i, _ in self.factors]

    @cached_property
    def blocks(self) -> dict[int, tuple[int, ...]]:
        out, start = {}, 0
        for i, d in self.factors:
            out[i] = tuple(range(start, start + d))
            start += d
        return out

    def degree(self, i: int) -> int:
        return len(self.block(i))

    def block(self, i: int) -> tuple[int, ...]:
        try:
            return self.blocks[i]
        except KeyError:
            raise BadFactorId(f"no factor with id {i}") from None

    def position(self, i: int) -> int:
        return self.ids.index(i)

    @cached_property
    def gamma_elements(self) -> list[Perm]:
        return perm_closure(self.gamma_generators, self.n)

    # -- hypotheses -----------------------------------------------------------
    def transitivity_failures(self) -> list[int]:
        """Factor ids on whose roots ``Gamma'`` is not transitive."""
        bad = []
        for i, block in self.blocks.items():
            orbit = {g[block[0]] for g in self.gamma_elements}
            if orbit != set(block):
                bad.append(i)
        return bad

    def sigma_problems(self) -> list[str]:
        gamma = set(self.gamma_elements)
        s = self.sigma_root_perm
        s_inv = invert(s)
        problems = []
        for g in self.gamma_generators:
            if compose(compose(s, g), s_inv) not in gamma:
                problems.append(f"sigma does not normalize Gamma' (conjugate of {list(g)})")
        if compose(s, s) not in gamma:
            problems.append("sigma^2 is not in Gamma'")
        return problems

    # -- JSON -----------------------------------------------------------------
    @classmethod
    def from_json(cls, obj) -> ChateletSpec:
        try:
            factors = [(f["id"], f["degree"]) for f in obj["factors"]]
            gens = [tuple(g) for g in obj.get("gamma_generators", [])]
            n = sum(int(d) for _, d in factors)
            sigma = tuple(obj.get("sigma_root_perm", range(n)))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad Chatelet spec: {exc}") from exc
        return cls(tuple(factors), tuple(gens), sigma)

    def to_json(self) -> dict:
        return {
            "factors": [{"id": i, "degree": d} for i, d in self.factors],
            "gamma_generators": [list(g) for g in self.gamma_generators],
            "sigma_root_perm": list(self.sigma_root_perm),
        }


# ---------------------------------------------------------------------------
# the Picard lattice
# ---------------------------------------------------------------------------


def _action_matrix(n: int, perm: Perm, eps: int) -> IntMat:
    F, G = n, n + 1
    cols = []
    for j in range(n):
        c = [0] * (n + 2)
        if eps:
            c[F] = 1
            c[perm[j]] = -1
        else:
            c[perm[j]] = 1
        cols.append(c)
    f = [0] * (n + 2)
    f[F] = 1
    g = [0] * (n + 2)
    g[G] = 1
    if eps:
        for j in range(n):
            g[j] = 1
        g[F] = -(n // 2)
    return IntMat.from_columns(cols + [f, g], rows=n + 2)


def _decode(n: int, m: IntMat) -> tuple[Perm, int] | None:
    """Root permutation and sign of a closure element, or None if it is not of the expected shape."""
    for eps in (0, 1):
        perm = []
        for j in range(n):
            col = m.column(j)
            hits = [k for k in range(n) if col[k]]
            if len(hits) != 1:
                return None
            perm.append(hits[0])
        if sorted(perm) == list(range(n)) and _action_matrix(n, tuple(perm), eps) == m:
            return tuple(perm), eps
    return None


@dataclass
class ChateletLattice:
    spec: ChateletSpec
    lattice: GLattice
    gamma_matrices: list[IntMat]
    sigma_matrix: IntMat
    hypotheses_hold: bool
    problems: list[str] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return self.spec.n + 2

    @property
    def labels(self) -> list[str]:
        return [f"D{j}" for j in range(self.spec.n)] + ["F", "G"]

    @property
    def F(self) -> int:
        return self.spec.n

    @property
    def G(self) -> int:
        return self.spec.n + 1


def build_picard(spec: ChateletSpec, cap: int = DEFAULT_CAP, strict: bool = True) -> ChateletLattice:
    """Action of the Galois group on ``Pic = Z<D_j, F, G>``.

    With ``strict`` a non-transitive factor raises :class:`NotTransitive`;
    otherwise it is recorded in ``problems``.  An inconsistent ``sigma``
    always raises.
    """
    n = spec.n
    problems = []
    bad = spec.transitivity_failures()
    if bad:
        msg = f"Gamma' is not transitive on the roots of factor(s) {bad}"
        if strict:
            raise NotTransitive(msg)
        problems.append(msg)
    sigma_bad = spec.sigma_problems()
    if sigma_bad:
        raise InconsistentSigma("; ".join(sigma_bad))
    gamma_mats = [_action_matrix(n, g, 0) for g in spec.gamma_generators]
    sigma_mat = _action_matrix(n, spec.sigma_root_perm, 1)
    group = MatGroup(n + 2, gamma_mats + [sigma_mat], cap)
    gamma = set(spec.gamma_elements)
    for m in group.elements:
        decoded = _decode(n, m)
        if decoded is None:
            raise InconsistentSigma("closure contains an element that is not a lifted root permutation")
        perm, eps = decoded
        if eps == 0 and perm not in gamma:
            raise InconsistentSigma("closure contains an unsigned element outside Gamma'")
    if group.order != 2 * len(gamma):
        raise InconsistentSigma(f"closure has order {group.order}, expected {2 * len(gamma)}")
    return ChateletLattice(spec, GLattice(group, group.generators, n + 2), gamma_mats, sigma_mat, not problems, problems)


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Orbit:
    factors: tuple[int, int]
    pairs: tuple[tuple[int, int], ...]
    sigma_image: int
    sigma_stable: bool
    is_diagonal: bool

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def key(self) -> frozenset:
        return frozenset(tuple(sorted(p)) for p in self.pairs)


def orbit_decomposition(spec: ChateletSpec, i: int, i2: int) -> list[Orbit]:
    """``Gamma'``-orbits on ``J_i x J_i2`` (unordered pairs when ``i == i2``), with the sigma action."""
    A, B = spec.block(i), spec.block(i2)
    same = i == i2

    def norm(p):
        return tuple(sorted(p)) if same else p

    if same:
        points = [(a, b) for a in A for b in A if a <= b]
    else:
        points = [(a, b) for a in A for b in B]
    where: dict[tuple[int, int], int] = {}
    raw: list[list[tuple[int, int]]] = []
    for p in points:
        if p in where:
            continue
        k = len(raw)
        orbit = [p]
        where[p] = k
        frontier = [p]
        while frontier:
            nxt = []
            for q in frontier:
                for g in spec.gamma_generators:
                    r = norm((g[q[0]], g[q[1]]))
                    if r not in where:
                        where[r] = k
                        orbit.append(r)
                        nxt.append(r)
            frontier = nxt
        raw.append(sorted(orbit))
    s = spec.sigma_root_perm
    out = []
    for k, orbit in enumerate(raw):
        image = where[norm((s[orbit[0][0]], s[orbit[0][1]]))]
        diagonal = same and all(a == b for a, b in orbit)
        out.append(Orbit((i, i2), tuple(orbit), image, image == k, diagonal))
    return out


@dataclass(frozen=True)
class OrbitWitness:
    holds: bool
    witness: Orbit | None
    detail: str = ""


def stable_orbit_check(spec: ChateletSpec, i0: int, i: int) -> OrbitWitness:
    """For ``|J_i0|`` odd and ``i != i0``: some orbit of ``J_i0 x J_i`` is sigma-stable."""
    if spec.degree(i0) % 2 == 0:
        raise PreconditionViolated(f"|J_{i0}| = {spec.degree(i0)} is even")
    if i == i0:
        raise PreconditionViolated("need two different factors")
    for orbit in orbit_decomposition(spec, i0, i):
        if orbit.sigma_stable:
            return OrbitWitness(True, orbit)
    return OrbitWitness(False, None, "no sigma-stable orbit")


def diagonal_orbit_check(spec: ChateletSpec, i: int) -> OrbitWitness:
    """Every orbit ``S`` of ``J_i x J_i / ~`` has ``|J_i|`` dividing ``2|S|``; for even
    ``|J_i|`` some sigma-stable ``S`` has ``|S| = s |J_i| / 2`` with ``s`` odd."""
    m = spec.degree(i)
    orbits = orbit_decomposition(spec, i, i)
    bad = [o for o in orbits if (2 * o.size) % m]
    if bad:
        return OrbitWitness(False, None, f"orbit of size {bad[0].size} violates divisibility")
    if m % 2:
        return OrbitWitness(True, None, "odd degree: divisibility only")
    for o in orbits:
        if o.sigma_stable and o.size % (m // 2) == 0 and (o.size // (m // 2)) % 2 == 1:
            return OrbitWitness(True, o)
    return OrbitWitness(False, None, "no sigma-stable orbit with odd s")


# ---------------------------------------------------------------------------
# H^1(k, Sym^2 Pic)
# ---------------------------------------------------------------------------


@dataclass
class Sym2VanishingResult:
    h1: FinAbGroup
    h1_hochschild_serre: FinAbGroup
    h1_over_k_prime: FinAbGroup
    agree: bool
    hypotheses_hold: bool
    group_order: int
    problems: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "h1": self.h1.to_json(),
            "h1_hochschild_serre": self.h1_hochschild_serre.to_json(),
            "h1_over_k_prime": self.h1_over_k_prime.to_json(),
            "agree": self.agree,
            "hypotheses_hold": self.hypotheses_hold,
            "group_order": self.group_order,
            "problems": list(self.problems),
        }


def _gamma_invariants(lat: ChateletLattice) -> IntMat:
    n2 = lat.rank
    S = [sym2_matrix(m) for m in lat.gamma_matrices]
    R = n2 * (n2 + 1) // 2
    if not S:
        return IntMat.identity(R)
    ident = IntMat.identity(R)
    return kernel_basis(IntMat.stack([s - ident for s in S], R))


def verify_sym2_vanishing(spec: ChateletSpec, cap: int = DEFAULT_CAP) -> Sym2VanishingResult:
    """``H^1`` of the full Galois group on ``Sym^2 Pic``, cross-checked two ways.

    The direct value is compared with ``H^1(Gal(k'/k), (Sym^2 Pic)^Gamma')``,
    which agrees with it because ``Gamma'`` permutes a basis of ``Sym^2 Pic``.
    """
    lat = build_picard(spec, cap, strict=False)
    S = sym2(lat.lattice)
    direct = h1(S)
    inv = _gamma_invariants(lat)
    s = sym2_matrix(lat.sigma_matrix)
    sigma_on_inv = echelon_coordinates(inv, s @ inv)
    reduced = h1_cyclic(sigma_on_inv, 2)
    gamma_group = MatGroup(lat.rank, lat.gamma_matrices, cap)
    over_k_prime = h1(sym2(GLattice.standard(gamma_group)))
    return Sym2VanishingResult(
        direct,
        reduced,
        over_k_prime,
        direct == reduced,
        lat.hypotheses_hold,
        lat.lattice.group.order,
        list(lat.problems),
    )


# ---------------------------------------------------------------------------
# the six-step filtration
# ---------------------------------------------------------------------------


@dataclass
class FiltrationStep:
    index: int
    labels: list[str]
    vectors: list[tuple[int, ...]]
    sigma_stable: bool = False
    h1: FinAbGroup | None = None

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "rank": self.rank,
            "labels": list(self.labels),
            "sigma_stable": self.sigma_stable,
            "h1": self.h1.to_json() if self.h1 is not None else None,
        }


@dataclass
class Filtration:
    steps: list[FiltrationStep]
    invariant_rank: int
    spans_invariants: bool
    i0: int | None
    anomalies: list[str] = field(default_factory=list)

    @property
    def total_rank(self) -> int:
        return sum(s.rank for s in self.steps)

    @property
    def all_trivial(self) -> bool:
        return all(s.h1 is not None and s.h1.is_trivial() for s in self.steps)

    def to_json(self) -> dict:
        return {
            "i0": self.i0,
            "invariant_rank": self.invariant_rank,
            "total_rank": self.total_rank,
            "spans_invariants": self.spans_invariants,
            "steps": [s.to_json() for s in self.steps],
            "anomalies": list(self.anomalies),
        }


def build_filtration(spec: ChateletSpec, cap: int = DEFAULT_CAP) -> Filtration:
    """Sublattices ``A_1..A_6`` of ``(Sym^2 Pic)^Gamma'`` and ``H^1(Z/2, A'_l)`` per step.

    ``A'_l`` is the quotient of ``A_1 + ... + A_l`` by ``A_1 + ... + A_(l-1)``.
    Choices (``i0``, the orbits ``S0_i`` and ``S1_i``) are the first valid
    ones in enumeration order.
    """
    lat = build_picard(spec, cap, strict=True)
    n = spec.n
    F, G = n, n + 1

    def e(k):
        return tuple(1 if t == k else 0 for t in range(n + 2))

    def D(i):
        return tuple(1 if t in spec.block(i) else 0 for t in range(n + 2))

    def D_orbit(o: Orbit):
        v = [0] * ((n + 2) * (n + 3) // 2)
        for a, b in o.pairs:
            v = [x + y for x, y in zip(v, sym2_product(e(a), e(b)))]
        return tuple(v)

    ids = spec.ids
    odd = [i for i in ids if spec.degree(i) % 2]
    even = [i for i in ids if spec.degree(i) % 2 == 0]
    i0 = min(odd) if odd else None

    S0 = {}
    for i in even:
        chk = diagonal_orbit_check(spec, i)
        if not chk.holds or chk.witness is None:
            raise WitnessNotFound(f"no orbit S0 for factor {i}")
        S0[i] = chk.witness
    S1 = {}
    for i in odd:
        if i == i0:
            continue
        chk = stable_orbit_check(spec, i0, i)
        if not chk.holds:
            raise WitnessNotFound(f"no orbit S1 for factor {i}")
        S1[i] = chk.witness

    steps = [FiltrationStep(l, [], []) for l in range(1, 7)]

    def add(l, label, v):
        steps[l - 1].labels.append(label)
        steps[l - 1].vectors.append(tuple(v))

    add(1, "F.F", sym2_product(e(F), e(F)))
    for i in odd:
        add(1, f"F.D_{i}", sym2_product(e(F), D(i)))
    for i in odd:
        if i != i0:
            add(1, f"D_{i0}.D_{i}", sym2_product(D(i0), D(i)))
    for i in even:
        add(2, f"F.D_{i}", sym2_product(e(F), D(i)))
    for i in even:
        add(2, f"D_S0_{i}", D_orbit(S0[i]))
    add(3, "G.F", sym2_product(e(G), e(F)))
    excluded = {o.key for o in S0.values()} | {o.key for o in S1.values()}
    for a_pos, a in enumerate(ids):
        for b in ids[a_pos:]:
            for o in orbit_decomposition(spec, a, b):
                if o.is_diagonal or o.key in excluded:
                    continue
                add(4, f"D_S({a},{b})[{o.pairs[0][0]},{o.pairs[0][1]}]", D_orbit(o))
    for i in ids:
        add(5, f"G.D_{i}", sym2_product(e(G), D(i)))
    for i in ids:
        diag = [o for o in orbit_decomposition(spec, i, i) if o.is_diagonal]
        add(5, f"D_Delta_{i}", D_orbit(diag[0]))
    add(6, "G.G", sym2_product(e(G), e(G)))

    anomalies = []
    inv = _gamma_invariants(lat)
    R = (n + 2) * (n + 3) // 2
    allvecs = [v for s in steps for v in s.vectors]
    B = IntMat.from_columns(allvecs, rows=R)
    spans = False
    if B.cols == inv.cols:
        try:
            coords = echelon_coordinates(inv, B)
            spans = abs(det(coords)) == 1
        except NotInSpan:
            spans = False
    if not spans:
        anomalies.append("the six families do not form a basis of the Gamma'-invariants")
        return Filtration(steps, inv.cols, False, i0, anomalies)

    sig = sym2_matrix(lat.sigma_matrix)
    X = solve_integer(B, sig @ B)  # sigma in the filtration basis
    start = 0
    for step in steps:
        end = start + step.rank
        step.sigma_stable = all(X[r, c] == 0 for r in range(end, B.cols) for c in range(end))
        if not step.sigma_stable:
            anomalies.append(f"A_1 + ... + A_{step.index} is not sigma-stable")
            start = end
            continue
        block = IntMat.from_rows([[X[r, c] for c in range(start, end)] for r in range(start, end)], cols=end - start)
        step.h1 = h1_cyclic(block, 2)
        start = end
    return Filtration(steps, inv.cols, True, i0, anomalies)
