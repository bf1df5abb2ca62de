"""Slow reference implementations used to cross-check the fast paths."""

from __future__ import annotations

from .groups import GLattice
from .linalg import FinAbGroup, IntMat, echelon_coordinates, hnf, kernel_basis, quotient


def h1_bar(L: GLattice) -> FinAbGroup:
    """``H^1(G, M)`` from inhomogeneous 1-cochains on every group element.

    Unknowns are the values ``f(g)`` for all ``g``; the cocycle condition
    ``f(gh) = f(g) + g f(h)`` is imposed for every pair.  Only meant for
    small groups.
    """
    G = L.group
    n, N = L.rank, G.order
    if n == 0:
        return FinAbGroup.trivial()
    acts = [L.action_of(g) for g in range(N)]
    rows = set()
    for g in range(N):
        for h in range(N):
            gh = G.index_of(G.element(g) @ G.element(h))
            for i in range(n):
                row = [0] * (N * n)
                row[gh * n + i] += 1
                row[g * n + i] -= 1
                for j in range(n):
                    row[h * n + j] -= acts[g][i, j]
                if any(row):
                    rows.add(tuple(row))
    if rows:
        C = hnf(IntMat.from_rows(sorted(rows), cols=N * n))
        Z = kernel_basis(C)
    else:
        Z = IntMat.identity(N * n)
    ident = IntMat.identity(n)
    B = IntMat.stack([a - ident for a in acts], n)
    coords = echelon_coordinates(Z, B)
    return quotient(Z.cols, coords)
