import pytest

from samelson_lab import linalg
from samelson_lab.exact import exact
from samelson_lab.liealg import build_algebra, cartan_decomposition
from samelson_lab.weyl import (
    invariant_polynomials,
    reflection_matrices,
    root_frame_coordinates,
    weyl_group,
)


def cart(spec):
    return cartan_decomposition(build_algebra(spec))


def test_group_orders():
    # (1) classical orders: |W| = 2, 6, 4, 8, 16
    for spec, want in (("A1", 2), ("A2", 6), ("A1+A1", 4), ("B2", 8),
                       ("A1+A1+A1+A1", 16)):
        assert len(weyl_group(cart(spec))) == want, spec


def test_reflections_are_orthogonal_involutions():
    cd = cart("A2")
    for s in reflection_matrices(cd):
        M = [list(row) for row in s]
        # (1) s^2 = 1
        assert linalg.matmul(M, M) == linalg.identity(2, exact(1))
        # (2) s preserves the orthonormal frame metric: s^T s = 1
        assert linalg.matmul(linalg.transpose(M), M) == linalg.identity(2, exact(1))


def test_group_is_closed():
    G = weyl_group(cart("B2"))
    gs = set(G)
    # (1) products of group elements stay inside
    for g in G[:4]:
        for h in G:
            prod = tuple(tuple(row) for row in linalg.matmul(
                [list(r) for r in g], [list(r) for r in h]))
            assert prod in gs


def test_root_coordinates_reproduce_killing_angles():
    cd = cart("A2")
    coords = [root_frame_coordinates(cd)[i] for i in range(6) if cd.positive(i)]
    # (1) all positive roots of su(3) have the same length
    n2 = [sum((x * x for x in a), exact(0)) for a in coords]
    assert n2[0] == n2[1] == n2[2]


def test_invariant_dimensions():
    cd = cart("A2")
    G = weyl_group(cd)
    # (1) invariant ring of W(A2) is generated in degrees 2 and 3
    assert [len(invariant_polynomials(cd, d, group=G)) for d in range(1, 7)] == \
        [0, 1, 1, 1, 1, 2]
    cdb = cart("B2")
    Gb = weyl_group(cdb)
    # (2) W(B2): generators in degrees 2 and 4
    assert [len(invariant_polynomials(cdb, d, group=Gb)) for d in (2, 3, 4)] == \
        [1, 0, 2]
    cd2 = cart("A1+A1")
    # (3) two commuting A1 factors: separate squares in degree 2
    assert len(invariant_polynomials(cd2, 2)) == 2


def test_quadratic_invariant_is_round():
    cd = cart("A2")
    inv = invariant_polynomials(cd, 2)
    # (1) in the orthonormal frame the quadratic invariant is x^2 + y^2
    assert inv == [{(2, 0): exact(1), (0, 2): exact(1)}]


def test_invariance_under_every_element():
    cd = cart("A2")
    G = weyl_group(cd)
    from samelson_lab.weyl import _apply_group_element

    for poly in invariant_polynomials(cd, 3, group=G):
        for g in G:
            moved: dict = {}
            for e, c in poly.items():
                for m, cm in _apply_group_element(g, e).items():
                    prev = moved.get(m, exact(0))
                    moved[m] = prev + c * cm
            moved = {m: c for m, c in moved.items() if not c.is_zero()}
            # (1) each basis polynomial is fixed exactly by each element
            assert moved == poly


def test_abelian_torus_trivial():
    cd = cart("T2")
    # (1) no roots: the group is trivial
    assert len(weyl_group(cd)) == 1
    # (2) no semisimple coordinates: no positive-degree invariants
    assert invariant_polynomials(cd, 2) == []
    with pytest.raises(ValueError):
        invariant_polynomials(cd, -1)


def test_closure_bound_guard():
    cd = cart("B2")
    with pytest.raises(RuntimeError, match="exceeded"):
        weyl_group(cd, bound=3)
