import random

import numpy as np
import pytest

from galoislattice.battery import random_finite_lattice
from galoislattice.delpezzo import picard_lattice, reflection, symmetric_group_image, weyl_group
from galoislattice.errors import GroupTooLarge, IndexOutOfRange, NotInvertible, NotPeriodic
from galoislattice.groups import (
    GLattice,
    MatGroup,
    close_group,
    h1,
    h1_cyclic,
    h1_details,
    invariants,
    is_permutation_basis,
    restrict,
    sylow_subgroup,
    two_generators,
)
from galoislattice.linalg import FinAbGroup, IntMat
from galoislattice.oracles import h1_bar


def M(rows):
    return IntMat.from_rows(rows)


SWAP = M([[0, 1], [1, 0]])
NEG = M([[-1]])
ROT3 = M([[0, -1], [1, -1]])


def test_close_group_examples():
    assert close_group([], rank=2).order == 1
    assert close_group([NEG]).order == 2
    P = picard_lattice(4)
    assert weyl_group(P).order == 1920


def test_close_group_errors():
    with pytest.raises(GroupTooLarge):
        close_group([M([[1, 1], [0, 1]])], cap=50)
    with pytest.raises(NotInvertible):
        close_group([M([[2]])])


def test_group_bookkeeping():
    G = close_group([SWAP, ROT3])
    assert G.order == 6
    for i in range(G.order):
        assert G.multiply(i, G.inverse(i)) == 0
        w = G.word(i)
        m = IntMat.identity(2)
        for s in w:
            m = m @ G.generators[s]
        assert G.index_of(m) == i
    assert sorted(G.element_order(i) for i in range(6)) == [1, 2, 2, 2, 3, 3]
    assert G.power(G.index_of(ROT3), 3) == 0
    assert M([[2, 0], [0, 1]]) not in G


def test_invariants_examples():
    G = close_group([], rank=2)
    assert invariants(GLattice.trivial(G, 2)).cols == 2
    S = GLattice.standard(close_group([SWAP]))
    assert invariants(S).columns() == [(1, 1)]


def test_h1_examples():
    assert h1(GLattice.trivial(close_group([], rank=3), 3)).is_trivial()
    assert h1(GLattice.standard(close_group([NEG]))) == FinAbGroup((2,), 0)
    assert h1(GLattice.standard(close_group([SWAP]))).is_trivial()
    assert h1(GLattice.standard(close_group([ROT3]))) == FinAbGroup((3,), 0)


def test_h1_cyclic_examples():
    assert h1_cyclic(M([[1]]), 2).is_trivial()
    assert h1_cyclic(M([[0, -1], [-1, 0]]), 2).is_trivial()
    assert h1_cyclic(NEG, 2) == FinAbGroup((2,), 0)
    with pytest.raises(NotPeriodic):
        h1_cyclic(ROT3, 2)


def test_h1_trivial_action_is_hom_to_z():
    # Hom(G, Z) = 0 for finite G
    G = close_group([ROT3, SWAP])
    assert h1(GLattice.trivial(G, 3)).is_trivial()


def test_h1_matches_bar_complex_randomized():
    rng = random.Random(5)
    for _ in range(25):
        L = random_finite_lattice(rng)
        assert h1(L) == h1_bar(L)


def test_h1_details_ranks():
    d = h1_details(GLattice.standard(close_group([NEG])))
    assert (d.z1_rank, d.b1_rank) == (1, 1)


def test_is_permutation_basis_symmetric_group():
    G = symmetric_group_image(picard_lattice(6))
    L = GLattice.standard(G)
    for p in (2, 3, 5):
        assert is_permutation_basis(L, IntMat.identity(4), p).ok
    cert = is_permutation_basis(L, IntMat.diag([1, 1, 1, 3]), 3)
    assert not cert.ok


def test_restrict_examples():
    P = picard_lattice(6)
    W = weyl_group(P)
    L = GLattice.standard(W)
    assert h1(restrict(L, [0])).is_trivial()
    S3 = symmetric_group_image(P)
    cyc = next(i for i in range(S3.order) if S3.element_order(i) == 3)
    idx = W.index_of(S3.element(cyc))
    R = restrict(L, [idx])
    assert R.group.order == 3 and h1(R).is_trivial()
    sigma = reflection(P, (1, -1, -1, -1))
    R2 = restrict(L, [W.index_of(sigma)])
    assert h1(R2) == h1_cyclic(sigma, 2)
    with pytest.raises(IndexOutOfRange):
        restrict(L, [W.order])


def test_sylow_examples():
    P = picard_lattice(6)
    S3 = symmetric_group_image(P)
    gens = sylow_subgroup(S3, 3)
    assert len(S3.subgroup_closure(gens)) == 3
    W5 = weyl_group(picard_lattice(4))
    assert len(W5.subgroup_closure(sylow_subgroup(W5, 5))) == 5
    assert len(W5.subgroup_closure(sylow_subgroup(W5, 2))) == 128
    assert sylow_subgroup(S3, 5) == []


def test_sylow_seeded_is_still_sylow():
    W5 = weyl_group(picard_lattice(4))
    for seed in (1, 2):
        assert len(W5.subgroup_closure(sylow_subgroup(W5, 3, seed=seed))) == 3


def test_two_generators_and_reduced_h1_agree():
    W = weyl_group(picard_lattice(4))
    pair = two_generators(W)
    assert pair is not None and len(W.subgroup_closure(pair)) == W.order
    L = GLattice.standard(W)
    small = GLattice(MatGroup(W.rank, [W.element(i) for i in pair]), [L.action_of(i) for i in pair], L.rank)
    assert h1(small) == h1(L)


def test_check_action_detects_bad_action():
    G = close_group([ROT3])
    good = GLattice(G, [ROT3], 2)
    assert good.check_action()
    bad = GLattice(G, [SWAP], 2)  # order 2 matrix for an order 3 generator
    assert not bad.check_action()


def test_element_actions_shape():
    G = close_group([SWAP, ROT3])
    acts = GLattice.standard(G).element_actions
    assert acts.shape == (6, 2, 2)
    assert np.array_equal(acts, G.arrays)
