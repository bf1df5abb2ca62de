import itertools
import random

import pytest

from galoislattice.battery import chatelet_samples
from galoislattice.chatelet import (
    ChateletSpec,
    build_filtration,
    build_picard,
    compose,
    diagonal_orbit_check,
    invert,
    orbit_decomposition,
    perm_closure,
    stable_orbit_check,
    verify_sym2_vanishing,
)
from galoislattice.errors import (
    BadFactorId,
    BadInput,
    InconsistentSigma,
    NotTransitive,
    OddDegree,
    ParseError,
    PreconditionViolated,
)
from galoislattice.groups import h1
from galoislattice.multilinear import sym2
from galoislattice.oracles import h1_bar


def spec(factors, gens, sigma):
    return ChateletSpec(tuple(factors), tuple(tuple(g) for g in gens), tuple(sigma))


ONE_QUADRATIC = spec([(0, 2)], [(1, 0)], (0, 1))


def test_spec_validation():
    with pytest.raises(OddDegree):
        spec([(0, 3)], [], (0, 1, 2))
    with pytest.raises(BadInput):
        spec([], [], ())
    with pytest.raises(BadInput):
        spec([(0, 1), (0, 1)], [], (0, 1))
    with pytest.raises(BadInput):
        spec([(0, 1), (1, 1)], [(1, 0)], (0, 1))  # mixes blocks
    with pytest.raises(BadFactorId):
        ONE_QUADRATIC.block(7)
    with pytest.raises(ParseError):
        ChateletSpec.from_json({"factors": [{"id": 0}]})


def test_spec_json_roundtrip():
    for s in chatelet_samples().values():
        assert ChateletSpec.from_json(s.to_json()) == s


def test_inconsistent_sigma():
    # sigma must normalize Gamma' and square into it
    s = spec([(0, 4)], [(1, 0, 3, 2), (2, 3, 0, 1)], (0, 1, 3, 2))
    assert s.sigma_problems() == []
    bad = spec([(0, 4)], [(1, 2, 3, 0)], (1, 0, 2, 3))
    with pytest.raises(InconsistentSigma):
        build_picard(bad)


def test_not_transitive_is_strict_only():
    s = spec([(0, 2)], [], (0, 1))
    with pytest.raises(NotTransitive):
        build_picard(s)
    lat = build_picard(s, strict=False)
    assert not lat.hypotheses_hold and lat.problems
    res = verify_sym2_vanishing(s)
    assert not res.hypotheses_hold and res.problems


def test_one_quadratic_lattice():
    lat = build_picard(ONE_QUADRATIC)
    assert lat.rank == 4 and lat.lattice.group.order == 4
    assert lat.lattice.check_action()
    # sigma fixes the roots but swaps D_j with F - D_j
    assert lat.sigma_matrix.apply((1, 0, 0, 0)) == (-1, 0, 1, 0)


def test_conjugate_classes_keep_intersections():
    # D'_j = F - D_j and G' = G + sum D_j - (n/2) F, so sigma preserves the form
    for s in chatelet_samples().values():
        lat = build_picard(s)
        n = s.n
        for g in lat.lattice.group.generators:
            assert g.apply(tuple([0] * n + [1, 0])) == tuple([0] * n + [1, 0])


def test_orbit_examples():
    s = spec([(0, 1), (1, 3)], [(0, 2, 3, 1)], (0, 1, 3, 2))
    orbits = orbit_decomposition(s, 0, 1)
    assert [o.size for o in orbits] == [3]
    assert orbits[0].sigma_stable
    diag = orbit_decomposition(s, 1, 1)
    assert sorted(o.size for o in diag) == [3, 3]
    assert sum(o.is_diagonal for o in diag) == 1


def test_orbit_sizes_sum():
    for s in chatelet_samples().values():
        for i, i2 in itertools.product(s.ids, repeat=2):
            total = sum(o.size for o in orbit_decomposition(s, i, i2))
            m, m2 = s.degree(i), s.degree(i2)
            assert total == (m * (m + 1) // 2 if i == i2 else m * m2)


def test_stable_orbit_check_examples():
    # |J_i0| = 3 cyclic, against factors of degree 2 and 4 (plus a linear factor)
    factors = [(0, 3), (1, 2), (2, 4), (3, 1)]
    s = spec(factors, [(1, 2, 0, 4, 3, 6, 7, 8, 5, 9)], tuple(range(10)))
    assert stable_orbit_check(s, 0, 1).holds
    assert stable_orbit_check(s, 0, 2).holds
    s2 = spec(factors, [(1, 2, 0, 4, 3, 6, 7, 8, 5, 9)], (0, 2, 1, 4, 3, 8, 7, 6, 5, 9))
    assert s2.sigma_problems() == []
    assert stable_orbit_check(s2, 0, 1).holds and stable_orbit_check(s2, 0, 2).holds
    with pytest.raises(PreconditionViolated):
        stable_orbit_check(s, 1, 0)
    with pytest.raises(PreconditionViolated):
        stable_orbit_check(s, 0, 0)
    assert stable_orbit_check(s, 3, 2).holds


def test_diagonal_orbit_check_examples():
    cyc4 = spec([(0, 4)], [(1, 2, 3, 0)], (0, 1, 2, 3))
    w = diagonal_orbit_check(cyc4, 0)
    assert w.holds and w.witness is not None and w.witness.size == 2
    dih4 = spec([(0, 4)], [(1, 2, 3, 0)], (0, 3, 2, 1))
    assert diagonal_orbit_check(dih4, 0).holds
    assert diagonal_orbit_check(ONE_QUADRATIC, 0).holds
    odd = spec([(0, 3), (1, 1)], [(1, 2, 0, 3)], (0, 1, 2, 3))
    assert diagonal_orbit_check(odd, 0).holds


def test_vanishing_on_samples():
    for name, s in chatelet_samples().items():
        res = verify_sym2_vanishing(s)
        assert res.hypotheses_hold, name
        assert res.h1.is_trivial() and res.agree, name
        assert res.h1_over_k_prime.is_trivial(), name


def test_vanishing_matches_bar_complex_on_small_samples():
    for name in ("one_quadratic", "two_quadratics_twisted", "linear_cubic", "dihedral_quartic"):
        s = chatelet_samples()[name]
        L = sym2(build_picard(s).lattice)
        assert h1(L) == h1_bar(L), name


def test_filtration_single_even_factor():
    f = build_filtration(ONE_QUADRATIC)
    assert f.i0 is None and f.spans_invariants
    assert [st.labels for st in f.steps if st.index == 1] == [["F.F"]]
    assert f.all_trivial and f.total_rank == f.invariant_rank


def test_filtration_on_samples():
    for name, s in chatelet_samples().items():
        f = build_filtration(s)
        assert f.spans_invariants and f.anomalies == [], name
        assert f.total_rank == f.invariant_rank, name
        assert all(st.sigma_stable for st in f.steps), name
        assert f.all_trivial, name


# -- randomized Galois data ---------------------------------------------------


def block_perms(blocks):
    per = [list(itertools.permutations(b)) for b in blocks]
    for choice in itertools.product(*per):
        p = [0] * sum(len(b) for b in blocks)
        for b, img in zip(blocks, choice):
            for x, y in zip(b, img):
                p[x] = y
        yield tuple(p)


def random_spec(rng, max_gamma=8, max_n=6):
    # sigma is found by brute force among block-preserving permutations
    # that normalize Gamma' and square into it
    while True:
        degs = [rng.randint(1, 4) for _ in range(rng.randint(1, 3))]
        n = sum(degs)
        if n % 2 or n > max_n:
            continue
        blocks, start = [], 0
        for d in degs:
            blocks.append(tuple(range(start, start + d)))
            start += d
        perms = list(block_perms(blocks))
        gens = tuple(rng.choice(perms) for _ in range(rng.randint(0, 2)))
        gamma = set(perm_closure(gens, n))
        if len(gamma) > max_gamma:
            continue
        if any({g[b[0]] for g in gamma} != set(b) for b in blocks):
            continue
        sigmas = [
            p for p in perms
            if compose(p, p) in gamma and all(compose(compose(p, g), invert(p)) in gamma for g in gens)
        ]
        return ChateletSpec(tuple(enumerate(degs)), gens, rng.choice(sigmas))


def test_randomized_galois_data():
    rng = random.Random(11)
    for _ in range(15):
        s = random_spec(rng)
        lat = build_picard(s)
        assert lat.lattice.group.order <= 16
        res = verify_sym2_vanishing(s)
        assert res.h1.is_trivial() and res.agree, s
        f = build_filtration(s)
        assert f.spans_invariants and f.all_trivial, s
