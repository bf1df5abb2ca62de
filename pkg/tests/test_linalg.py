import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galoislattice.battery import linalg_case, random_unimodular
from galoislattice.errors import DimensionMismatch, NonSquare, NotInSpan, ParseError
from galoislattice.linalg import (
    FinAbGroup,
    IntMat,
    det,
    echelon_coordinates,
    hnf,
    kernel_basis,
    matrix_from_json,
    matrix_to_json,
    quotient,
    rank,
    smith_diagonal,
    snf,
    solve_integer,
)


def M(rows):
    return IntMat.from_rows(rows)


def test_snf_identity():
    S = snf(IntMat.identity(3))
    assert S.D == IntMat.identity(3)
    assert S.U @ IntMat.identity(3) @ S.V == S.D


def test_snf_diag_2_3():
    S = snf(IntMat.diag([2, 3]))
    assert S.D == IntMat.diag([1, 6])


def test_snf_rank_one():
    A = M([[4, 6], [6, 9]])
    S = snf(A)
    assert S.D == IntMat.diag([1, 0])
    assert S.U @ A @ S.V == S.D


def test_snf_empty_shapes():
    for shape in [(0, 3), (3, 0), (0, 0)]:
        A = IntMat.zeros(*shape)
        S = snf(A)
        assert S.D.shape == shape
        assert S.rank == 0


def test_det_examples():
    assert det(IntMat.identity(28)) == 1
    assert det(IntMat.diag([2, 3])) == 6
    assert det(IntMat.zeros(0, 0)) == 1
    with pytest.raises(NonSquare):
        det(M([[1, 2]]))


def test_kernel_examples():
    assert kernel_basis(M([[1, -1]])).columns() == [(1, 1)]
    assert kernel_basis(IntMat.identity(3)).cols == 0
    K = kernel_basis(M([[2, 4]]))
    assert K.cols == 1
    assert K.column(0) in [(2, -1), (-2, 1)]


def test_kernel_is_saturated():
    # x + y + z = 0 over Z has a basis, not just a finite-index sublattice
    K = kernel_basis(M([[2, 2, 2]]))
    assert K.cols == 2
    assert smith_diagonal(K) == [1, 1]


def test_quotient_examples():
    assert quotient(1, M([[2]])) == FinAbGroup((2,), 0)
    assert quotient(2, IntMat.from_columns([[2, 0], [0, 3]], rows=2)) == FinAbGroup((6,), 0)
    assert quotient(2, IntMat.zeros(2, 0)) == FinAbGroup((), 2)
    with pytest.raises(DimensionMismatch):
        quotient(3, M([[1]]))


def test_finabgroup_normal_form():
    G = FinAbGroup.from_orders([2, 3, 4])
    assert G.invariant_factors == (2, 12)
    assert G.order() == 24
    assert str(G) == "Z/2 x Z/12"
    assert G.p_part(2) == FinAbGroup((2, 4), 0)
    assert str(FinAbGroup.trivial()) == "0"
    with pytest.raises(Exception):
        FinAbGroup((3, 2), 0)


def test_hnf_and_rank():
    H = hnf(M([[2, 4], [1, 3], [3, 7]]))
    assert H.rows == 2 and rank(M([[2, 4], [1, 3], [3, 7]])) == 2
    assert all(H[i, j] == 0 for i in range(2) for j in range(i))


def test_solve_integer():
    A = M([[2, 0], [0, 3]])
    B = M([[4], [9]])
    assert solve_integer(A, B) == M([[2], [3]])
    with pytest.raises(NotInSpan):
        solve_integer(A, M([[1], [0]]))


def test_echelon_coordinates_roundtrip():
    K = kernel_basis(M([[1, 1, 1, 1]]))
    X = M([[1, 0], [-1, 2], [3, 1], [-3, -3]])
    assert K @ echelon_coordinates(K, X) == X


def test_matrix_json_roundtrip():
    A = M([[10**30, -1], [0, 7]])
    assert matrix_from_json(matrix_to_json(A)) == A
    assert matrix_from_json([[1, 2], [3, 4]]) == M([[1, 2], [3, 4]])
    with pytest.raises(ParseError):
        matrix_from_json({"rows": 2, "cols": 2, "entries": [[1]]})


def test_big_integers_are_exact():
    big = 2**80 + 1
    A = M([[big, 0], [0, big]])
    assert det(A) == big * big
    assert smith_diagonal(A) == [big, big]


def test_randomized_property_suite():
    rng = random.Random(1)
    failures = [e for _ in range(200) for e in linalg_case(rng)]
    assert failures == []


small = st.integers(-6, 6)


@st.composite
def matrices(draw, max_dim=5):
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    return IntMat.from_rows([[draw(small) for _ in range(n)] for _ in range(m)], cols=n)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_snf_axioms(A):
    S = snf(A)
    assert S.U @ A @ S.V == S.D
    assert abs(det(S.U)) == 1 and abs(det(S.V)) == 1
    d = [x for x in S.diagonal if x]
    assert all(b % a == 0 for a, b in zip(d, d[1:]))


@settings(max_examples=60, deadline=None)
@given(matrices(), st.integers(0, 10**6))
def test_quotient_invariant_under_unimodular_change(A, seed):
    rng = random.Random(seed)
    U, V = random_unimodular(rng, A.rows), random_unimodular(rng, A.cols)
    assert quotient(A.rows, A) == quotient(A.rows, U @ A @ V)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(*[st.lists(small, min_size=n * n, max_size=n * n)] * 2, st.just(n))))
def test_det_multiplicative(data):
    a, b, n = data
    A = IntMat.from_rows([a[i * n:(i + 1) * n] for i in range(n)], cols=n)
    B = IntMat.from_rows([b[i * n:(i + 1) * n] for i in range(n)], cols=n)
    assert det(A @ B) == det(A) * det(B)
