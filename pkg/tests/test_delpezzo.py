import json
from importlib import resources

import numpy as np
import pytest

from galoislattice.delpezzo import (
    WEYL_ORDERS,
    cup,
    degree6_witnesses,
    diagonal_class,
    exceptional_classes,
    kernel_lattice,
    line_order,
    matrix_A,
    mixed_basis_change,
    obstruction_report,
    omega_squared,
    permutation_basis,
    picard_lattice,
    reflection,
    roots,
    symmetric_group_image,
    sylow_order_check,
    transposition,
    weyl_group,
    weyl_sylow_comparison,
)
from galoislattice.errors import (
    ActionDoesNotPreserveForm,
    BadDegree,
    BadInput,
    BadRank,
    DimensionMismatch,
    NotARoot,
    TooLargeForEnumeration,
    WrongDegree,
)
from galoislattice.groups import GLattice, close_group, is_permutation_basis
from galoislattice.linalg import IntMat, det, matrix_from_json
from galoislattice.multilinear import sym2


@pytest.fixture(scope="module")
def cubic():
    return picard_lattice(3)


@pytest.fixture(scope="module")
def w6(cubic):
    return weyl_group(cubic)


def test_picard_lattice_examples():
    P = picard_lattice(3)
    assert P.rank == 7 and P.intersect(P.omega, P.omega) == 3
    P9 = picard_lattice(9)
    assert P9.rank == 1 and P9.omega == (-3,) and P9.intersect(P9.omega, P9.omega) == 9
    P1 = picard_lattice(1)
    assert P1.rank == 9 and P1.intersect(P1.omega, P1.omega) == 1
    for d in range(1, 10):
        P = picard_lattice(d)
        assert P.intersect(P.omega, P.omega) == d
    for bad in (0, 10):
        with pytest.raises(BadDegree):
            picard_lattice(bad)


def test_exceptional_classes_examples():
    assert exceptional_classes(picard_lattice(8)) == [(0, 1)]
    P = picard_lattice(6)
    expected = {(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, -1, -1, 0), (1, -1, 0, -1), (1, 0, -1, -1)}
    assert set(exceptional_classes(P)) == expected
    assert len(exceptional_classes(picard_lattice(3))) == 27
    with pytest.raises(BadRank):
        exceptional_classes(picard_lattice(9))


def test_exceptional_classes_are_lines(cubic):
    for E in exceptional_classes(cubic):
        assert cubic.intersect(E, E) == -1 and cubic.intersect(E, cubic.omega) == -1


@pytest.mark.parametrize("r,count", [(3, 8), (4, 20), (5, 40), (6, 72)])
def test_root_counts_with_enlarged_bound(r, count):
    P = picard_lattice(9 - r)
    R = roots(P)
    assert len(R.roots) == count
    assert set(roots(P, bound=(-5, 9)).roots) == set(R.roots)
    assert R.weyl_order_constant == WEYL_ORDERS[r]
    for a in R.roots:
        assert P.intersect(a, a) == -2 and P.intersect(a, P.omega) == 0


def test_roots_bad_rank():
    with pytest.raises(BadRank):
        roots(picard_lattice(7))


def test_reflection_examples():
    P = picard_lattice(6)
    s = reflection(P, (1, -1, -1, -1))
    for v in [(1, 0, 0, 0), (2, -1, 3, 5), (0, 1, 1, 0)]:
        a0, a1, a2, a3 = v
        c = a0 + a1 + a2 + a3
        assert s.apply(v) == (a0 + c, a1 - c, a2 - c, a3 - c)
    assert reflection(P, (0, 1, -1, 0)) == transposition(P, 1, 2)
    for a in roots(P).roots:
        t = reflection(P, a)
        assert (t @ t).is_identity()
    with pytest.raises(NotARoot):
        reflection(P, (1, 0, 0, 0))


def test_weyl_group_orders():
    assert weyl_group(picard_lattice(6)).order == 12
    assert weyl_group(picard_lattice(4)).order == 1920
    with pytest.raises(TooLargeForEnumeration):
        weyl_group(picard_lattice(2))


def test_weyl_group_preserves_structure(cubic, w6):
    Q = cubic.form.to_array()
    A = w6.arrays
    assert np.array_equal(np.einsum("gji,jk,gkl->gil", A, Q, A), np.broadcast_to(Q, A.shape))
    omega = np.array(cubic.omega)
    assert np.array_equal(A @ omega, np.broadcast_to(omega, (w6.order, 7)))


def test_weyl_group_permutes_lines_and_roots(cubic, w6):
    lines = set(exceptional_classes(cubic))
    rts = set(roots(cubic).roots)
    for g in w6.generators:
        assert {g.apply(v) for v in lines} == lines
        assert {g.apply(v) for v in rts} == rts


def test_symmetric_group_image(cubic, w6):
    assert symmetric_group_image(picard_lattice(6)).order == 6
    S6 = symmetric_group_image(cubic)
    assert S6.order == 720
    assert all(g in w6 for g in S6.generators)


def test_cup_examples(cubic):
    assert cup(cubic, omega_squared(cubic)) == 3
    assert cup(cubic, diagonal_class(cubic)) == 7
    with pytest.raises(DimensionMismatch):
        cup(cubic, (1, 2))


def test_cup_is_invariant(cubic, w6):
    S = sym2(GLattice.standard(w6))
    rng = np.random.default_rng(0)
    for _ in range(5):
        v = tuple(int(x) for x in rng.integers(-3, 4, size=28))
        for a in S.action:
            assert cup(cubic, a.apply(v)) == cup(cubic, v)


def test_degree6_witnesses():
    P = picard_lattice(6)
    L1, L2 = degree6_witnesses(P)
    assert (cup(P, L1), cup(P, L2)) == (3, -2)
    with pytest.raises(WrongDegree):
        degree6_witnesses(picard_lattice(5))


def test_kernel_lattice_ranks(cubic, w6):
    K9 = kernel_lattice(picard_lattice(9), close_group([], rank=1))
    assert K9.rank == 0
    sub = close_group([w6.element(5)])
    assert kernel_lattice(cubic, sub).rank == 27
    with pytest.raises(ActionDoesNotPreserveForm):
        kernel_lattice(cubic, close_group([IntMat.diag([1, 1, 1, 1, 1, 1, -1])]))


def test_matrix_A(cubic):
    A = matrix_A(cubic)
    assert A.shape == (28, 28)
    assert abs(det(A)) == 5 * 2**27
    assert A.row(0) == (-1, 1, 1, 1, 1, 1, 1) + (0,) * 21
    assert A.row(1) == tuple(1 if j == 1 else 0 for j in range(28))
    assert A.row(7)[:7] == (4, 0, 1, 1, 1, 1, 1)
    printed = json.loads(resources.files("galoislattice").joinpath("data", "cubic_surface_matrix_printed.json").read_text())
    assert A == matrix_from_json(printed)
    with pytest.raises(WrongDegree):
        matrix_A(picard_lattice(4))


def test_line_order(cubic):
    lines = line_order(cubic)
    assert len(lines) == 27 and set(lines) == set(exceptional_classes(cubic))
    assert lines[6] == (2, 0, -1, -1, -1, -1, -1)
    assert lines[12] == (1, -1, -1, 0, 0, 0, 0)


def test_mixed_basis_change_is_signed_permutation(cubic):
    C = mixed_basis_change(cubic)
    assert abs(det(C)) == 1
    assert all(sum(abs(x) for x in r) == 1 for r in C.entries)


def test_permutation_basis_certificates(cubic, w6):
    S = sym2(GLattice.standard(w6))
    B = permutation_basis(cubic)
    assert is_permutation_basis(S, B, 3).ok
    assert is_permutation_basis(S, B, 5).coprime is False
    cert = is_permutation_basis(S, B, 2)
    assert not cert.ok and cert.permutations is not None


def test_sylow_order_check_examples():
    assert sylow_order_check(4, 3)
    assert sylow_order_check(3, 5)
    assert not sylow_order_check(3, 3)
    assert sylow_order_check(1, 7)
    with pytest.raises(BadInput):
        sylow_order_check(5, 3)
    with pytest.raises(BadInput):
        sylow_order_check(3, 4)


def test_weyl_sylow_comparison():
    # |W(E6)| = 2^7 3^4 5, |W(E7)| = 2^10 3^4 5 7
    assert weyl_sylow_comparison(3)
    assert weyl_sylow_comparison(5)
    assert not weyl_sylow_comparison(2)
    assert not weyl_sylow_comparison(7)
    with pytest.raises(BadInput):
        weyl_sylow_comparison(9)


def test_obstruction_report_examples(w6):
    r9 = obstruction_report(9, [])
    assert r9.cup_index == 1 and r9.h1_sym2.is_trivial() and r9.h1_kernel.is_trivial() and r9.order_identity
    P = picard_lattice(6)
    r6 = obstruction_report(6, weyl_group(P).generators)
    assert r6.cup_index == 1 and r6.order_identity
    orders, _ = w6._powers
    k = int(np.flatnonzero(orders == 3)[0])
    r3 = obstruction_report(3, [w6.element(k)])
    assert r3.h1_sym2.p_part(3).is_trivial() and r3.order_identity
    with pytest.raises(ActionDoesNotPreserveForm):
        obstruction_report(6, [IntMat.diag([1, 1, 1, -1])])


def test_obstruction_report_nontrivial_index():
    # a single reflection in degree 6: cup is onto but Sym^2 H^1 is not zero
    P = picard_lattice(6)
    rep = obstruction_report(6, [reflection(P, (0, 1, -1, 0))])
    assert rep.order_identity
    assert rep.h1_kernel.order() == rep.cup_index * rep.h1_sym2.order()
