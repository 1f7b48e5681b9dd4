import pytest

from samelson_lab.bicomplex import (
    FLAVORS,
    cohomology,
    complex_from_json,
    complex_to_json,
    kunneth_aeppli_check,
    make_complex,
    random_double_complex,
    tensor_product,
    validate,
    zigzag_decompose,
)
from samelson_lab.exact import exact

one = exact(1)


def square_complex(sign=-1):
    return make_complex(
        {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
        {(0, 0): [[one]], (0, 1): [[one]]},
        {(0, 0): [[one]], (1, 0): [[exact(sign)]]},
    )


def corner_source_l():
    # one generator at (1,1) mapped injectively by both differentials
    return make_complex(
        {(1, 1): 1, (2, 1): 1, (1, 2): 1},
        {(1, 1): [[one]]},
        {(1, 1): [[one]]},
    )


def test_square_acyclic():
    sq = square_complex()
    # (1) the square satisfies all three differential identities
    assert validate(sq).ok
    # (2) every flavor vanishes on a square
    for fl in FLAVORS:
        assert cohomology(sq, fl).dims == {}
    # (3) decomposition recovers exactly one square anchored at (0,0)
    dec = zigzag_decompose(sq)
    assert dec.squares == ((0, 0),)
    assert dec.zigzags == ()


def test_corner_source_l():
    L = corner_source_l()
    # (1) Dolbeault sees only the spot untouched by the (0,1)-arrow
    assert cohomology(L, "dolbeault").dims == {(2, 1): 1}
    assert cohomology(L, "conj_dolbeault").dims == {(1, 2): 1}
    # (2) Bott-Chern counts the two sinks, Aeppli the single source
    assert cohomology(L, "bott_chern").dims == {(2, 1): 1, (1, 2): 1}
    assert cohomology(L, "aeppli").dims == {(1, 1): 1}
    # (3) the odd-length piece leaves one de Rham class in degree 3
    assert cohomology(L, "de_rham").dims == {3: 1}
    # (4) the Aeppli representative is the generator itself
    reps = cohomology(L, "aeppli", representatives=True).reps
    assert reps[(1, 1)] == [[one]]
    # (5) decomposition: a single zig-zag of length 3 anchored at (1,1)
    dec = zigzag_decompose(L)
    assert dec.squares == ()
    assert dec.records() == (((1, 1), 3, ((1, 2), (1, 1), (2, 1))),)


def test_single_arrow():
    nu = make_complex({(0, 1): 1, (1, 1): 1}, {(0, 1): [[one]]}, {})
    # (1) no (0,1)-differential: both spots survive in Dolbeault
    assert cohomology(nu, "dolbeault").dims == {(0, 1): 1, (1, 1): 1}
    # (2) the (1,0)-arrow kills both spots in the conjugate flavor
    assert cohomology(nu, "conj_dolbeault").dims == {}
    # (3) sink in Bott-Chern, source in Aeppli, nothing in de Rham
    assert cohomology(nu, "bott_chern").dims == {(1, 1): 1}
    assert cohomology(nu, "aeppli").dims == {(0, 1): 1}
    assert cohomology(nu, "de_rham").dims == {}
    # (4) one length-2 zig-zag
    assert zigzag_decompose(nu).zigzags == (((0, 1), (1, 1)),)


def test_validation_locates_violation():
    bad = square_complex(sign=1)
    rep = validate(bad)
    # (1) the flipped sign breaks anticommutation at the anchor
    assert not rep.ok
    assert rep.location == (0, 0)
    assert "d1*d2 + d2*d1" in rep.message
    # (2) invalid complexes are rejected by cohomology
    with pytest.raises(ValueError, match="invalid double complex"):
        cohomology(bad, "aeppli")
    # (3) dimension mismatches raise immediately
    wrong = make_complex({(0, 0): 1, (1, 0): 2}, {(0, 0): [[one]]}, {})
    with pytest.raises(ValueError, match="shape"):
        validate(wrong)


def test_random_decomposition_matches_truth():
    for seed in range(25):
        D, truth = random_double_complex(seed)
        # (1) the peeled multiset equals the generating multiset
        assert zigzag_decompose(D, seed=seed) == truth


def test_tensor_with_unit():
    unit = make_complex({(0, 0): 1}, {}, {})
    L = corner_source_l()
    P = tensor_product(L, unit)
    # (1) tensoring with a point changes nothing
    assert P.spots == L.spots
    for fl in FLAVORS:
        assert cohomology(P, fl).dims == cohomology(L, fl).dims


def test_segment_product_is_square():
    A = make_complex({(0, 0): 1, (1, 0): 1}, {(0, 0): [[one]]}, {})
    B = make_complex({(0, 0): 1, (0, 1): 1}, {}, {(0, 0): [[one]]})
    P = tensor_product(A, B)
    # (1) the Koszul sign makes the product a genuine anticommuting square
    assert validate(P).ok
    # (2) it decomposes as a single square, hence is acyclic everywhere
    dec = zigzag_decompose(P)
    assert dec.squares == ((0, 0),)
    assert dec.zigzags == ()


def test_kunneth_aeppli():
    unit = make_complex({(0, 0): 1}, {}, {})
    L = corner_source_l()
    rep = kunneth_aeppli_check(L, unit)
    # (1) against a point the lifted classes fill the product, defect 0
    assert rep.per_bidegree[(1, 1)] == (1, 1, 0)
    assert rep.defect(1, 1) == 0
    # (2) two segments tensor to an acyclic square: nothing to explain
    A = make_complex({(0, 0): 1, (1, 0): 1}, {(0, 0): [[one]]}, {})
    B = make_complex({(0, 0): 1, (0, 1): 1}, {}, {(0, 0): [[one]]})
    rep2 = kunneth_aeppli_check(A, B)
    assert all(v[2] == 0 for v in rep2.per_bidegree.values())


def test_json_round_trip():
    D, _ = random_double_complex(7)
    data = complex_to_json(D)
    D2 = complex_from_json(data)
    # (1) support and all cohomology flavors survive the round trip
    assert D2.spots == D.spots
    for fl in FLAVORS:
        assert cohomology(D2, fl).dims == cohomology(D, fl).dims
    # (2) tampering with one entry breaks an identity and is caught
    data["d2"][0][4] = "7"
    with pytest.raises(ValueError, match="invalid"):
        complex_from_json(data)
