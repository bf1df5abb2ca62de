import random

import pytest

from galoislattice.battery import random_finite_lattice
from galoislattice.delpezzo import picard_lattice, weyl_group
from galoislattice.errors import GroupMismatch, NotApplicable
from galoislattice.groups import GLattice, close_group, h1
from galoislattice.linalg import IntMat
from galoislattice.multilinear import (
    Sym2Basis,
    check_direct_sum_decomposition,
    check_sym_wedge_sequence,
    direct_sum,
    split_lattice,
    sym2,
    sym2_matrix,
    sym2_product,
    tensor,
    wedge2,
    wedge2_matrix,
)


def M(rows):
    return IntMat.from_rows(rows)


SWAP = M([[0, 1], [1, 0]])


def test_sym2_examples():
    assert sym2_matrix(M([[-1]])) == M([[1]])
    # basis e1.e1, e1.e2, e2.e2
    assert sym2_matrix(SWAP) == M([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    P = picard_lattice(3)
    assert len(Sym2Basis(P.rank)) == 28


def test_sym2_product_coefficients():
    assert sym2_product((1, 2), (3, 4)) == (3, 10, 8)
    assert sym2_product((1, 0), (1, 0)) == (1, 0, 0)


def test_wedge2_examples():
    assert wedge2_matrix(SWAP) == M([[-1]])
    assert wedge2_matrix(IntMat.identity(2)) == M([[1]])
    cyc = IntMat.from_columns([[0, 1, 0], [0, 0, 1], [1, 0, 0]], rows=3)
    W = wedge2(GLattice.standard(close_group([cyc])))
    a = W.action[0]
    assert all(sum(abs(x) for x in a.row(i)) == 1 for i in range(3))
    assert h1(W).is_trivial()


def test_tensor_examples():
    G = close_group([M([[-1]])])
    L = GLattice.standard(G)
    assert tensor(L, GLattice.trivial(G, 1)).action == L.action
    assert tensor(L, L).action[0] == M([[1]])
    S = GLattice.standard(close_group([SWAP]))
    # e_i (x) e_j -> e_s(i) (x) e_s(j): (11)<->(22) and (12)<->(21), no fixed tensor
    T = tensor(S, S).action[0]
    assert T == M([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])
    with pytest.raises(GroupMismatch):
        tensor(L, S)


def test_sym_wedge_sequence():
    assert check_sym_wedge_sequence(GLattice.standard(close_group([M([[-1]])])))
    assert check_sym_wedge_sequence(GLattice.standard(weyl_group(picard_lattice(6))))
    rng = random.Random(3)
    for _ in range(10):
        assert check_sym_wedge_sequence(random_finite_lattice(rng, max_order=8))


def test_direct_sum_decomposition():
    G = close_group([], rank=1)
    assert check_direct_sum_decomposition(GLattice.trivial(G, 1), GLattice.trivial(G, 1))
    rng = random.Random(4)
    for _ in range(10):
        L = random_finite_lattice(rng, max_order=6, max_rank=3)
        M2 = GLattice(L.group, [a @ a for a in L.action], L.rank)
        assert check_direct_sum_decomposition(L, M2)


def test_split_lattice_roundtrip():
    G = close_group([M([[0, 1, 0], [1, 0, 0], [0, 0, -1]])])
    L = GLattice.standard(G)
    A, B = split_lattice(L, 2)
    assert direct_sum(A, B).action == L.action
    with pytest.raises(NotApplicable):
        split_lattice(L, 1)


def test_sym2_of_sum_splits_cohomology():
    # H^1 is additive over the canonical decomposition of Sym^2(A + B)
    rng = random.Random(8)
    L = random_finite_lattice(rng, max_order=6, max_rank=2)
    T = GLattice.trivial(L.group, 1)
    whole = h1(sym2(direct_sum(L, T)))
    parts = [h1(sym2(L)), h1(tensor(L, T)), h1(sym2(T))]
    assert whole.order() == parts[0].order() * parts[1].order() * parts[2].order()
