from __future__ import annotations

from fractions import Fraction as F
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from samelson_lab import geometry as geo
from samelson_lab.liealg import build_algebra, cartan_decomposition
from samelson_lab.samelson import biinvariant_metric, build_samelson_structure


def structure(spec):
    return build_samelson_structure(cartan_decomposition(build_algebra(spec)))


def random_hermitian(S, rng, amp=0.3):
    Jm = geo.j_array(S)
    n = Jm.shape[0]
    G0 = geo.metric_array(biinvariant_metric(S))
    Y = rng.standard_normal((n, n))
    Y = 0.5 * (Y + Y.T)
    X = 0.5 * (Y + Jm.T @ Y @ Jm)
    X *= amp / max(np.abs(X).max(), 1e-30)
    return geo.as_metric(G0 + X, S)


def cross_algebra():
    # [e2, e3] = e1 and cyclic, the spin normalization
    C = [[[F(0)] * 3 for _ in range(3)] for _ in range(3)]
    for i, j, k in ((1, 2, 0), (2, 0, 1), (0, 1, 2)):
        C[i][j][k] = F(1)
        C[j][i][k] = F(-1)
    return SimpleNamespace(dimension=3, structure=C)


def test_invariant_d_small_algebras():
    L = cross_algebra()
    # (1) the dual of the bracket image picks up minus the bracket pairing
    assert geo.invariant_d(L, {(0,): F(1)}) == {(1, 2): F(-1)}
    # (2) d squares to zero on the same generator
    assert geo.invariant_d(L, geo.invariant_d(L, {(0,): F(1)})) == {}
    # (3) abelian factors have closed duals
    T = structure("T2").algebra
    assert geo.invariant_d(T, {(0,): F(1)}) == {}
    assert geo.invariant_d(T, {(1,): F(3)}) == {}
    # (4) components of two different degrees are refused
    with pytest.raises(ValueError):
        geo.invariant_d(L, {(0,): F(1), (0, 1): F(1)})


@settings(max_examples=40, deadline=None)
@given(
    spec=st.sampled_from(["A1", "A1+A1", "A2", "A1+T2"]),
    seed=st.integers(0, 10 ** 6),
    deg=st.sampled_from([1, 2]),
)
def test_invariant_d_squares_to_zero(spec, seed, deg):
    # (1) d(d(phi)) = 0 exactly, any algebra, rational coefficients
    L = build_algebra(spec)
    rng = np.random.default_rng(seed)
    n = L.dimension
    keys = [(i,) for i in range(n)] if deg == 1 else [
        (i, j) for i in range(n) for j in range(i + 1, n)]
    phi = {k: F(int(rng.integers(-9, 10)), int(rng.integers(1, 7)))
           for k in keys}
    assert geo.invariant_d(L, geo.invariant_d(L, phi)) == {}


def test_wedge_graded_commutativity():
    rng = np.random.default_rng(11)
    f1 = {(i,): F(int(rng.integers(-5, 6))) for i in range(6)}
    f2 = {(i,): F(int(rng.integers(-5, 6))) for i in range(6)}
    f3 = {(i, j): F(int(rng.integers(-5, 6)))
          for i in range(6) for j in range(i + 1, 6)}
    # (1) odd-degree forms anticommute
    lhs = geo.wedge(f1, f2)
    rhs = {k: -v for k, v in geo.wedge(f2, f1).items()}
    assert lhs == rhs
    # (2) 1-form against 2-form commutes
    assert geo.wedge(f1, f3) == geo.wedge(f3, f1)
    # (3) wedge of a 1-form with itself dies
    assert geo.wedge(f1, f1) == {}


def test_biinvariant_curvature():
    for spec in ("A2", "A1+A1"):
        S = structure(spec)
        g = biinvariant_metric(S)
        rep = geo.curvature_report(g)
        # (1) bi-invariant compatible metrics are Bismut flat
        assert rep.bismut_flat_norm < 1e-10
        # (2) and pluriclosed
        assert rep.pluriclosed_residual < 1e-12
        assert rep.pluriclosed
        # (3) flatness forces a vanishing Bismut Ricci form
        assert np.abs(rep.ricci_bismut).max() < 1e-10
        # (4) Levi-Civita is half the bracket
        C = geo.structure_array(S.algebra)
        Gm = geo.metric_array(g)
        half_br = 0.5 * np.einsum("ija,ak->ijk", C, Gm)
        assert np.abs(rep.gamma_lc - half_br).max() < 1e-12


def test_exact_flatness_certificate():
    # (1) exact arithmetic certifies flatness with no rounding at all
    assert geo.certify_bismut_flat(biinvariant_metric(structure("A1+A1")))
    assert geo.certify_bismut_flat(biinvariant_metric(structure("A2")))
    # (2) rescaled bi-invariant metrics stay exactly flat
    S = structure("A2")
    assert geo.certify_bismut_flat(biinvariant_metric(S, lam=[F(7, 3)]))
    # (3) the exact path refuses float input rather than faking rationals
    _, gf = geo.su3_torus_family(1.0, 1.0, 0.2)
    with pytest.raises(ValueError):
        geo.certify_bismut_flat(gf)


def test_connection_invariants_random_metric():
    S = structure("A1+A1")
    rng = np.random.default_rng(5)
    Jm = geo.j_array(S)
    C = geo.structure_array(S.algebra)
    n = Jm.shape[0]
    for _ in range(4):
        g = random_hermitian(S, rng)
        rep = geo.curvature_report(g, pluriclosed_tol=1e-8)
        Gm = geo.metric_array(g)
        Ginv = np.linalg.inv(Gm)
        Lt = np.einsum("ija,ak->ijk", C, Gm)
        for gamma in (rep.gamma_bismut, rep.gamma_chern):
            # (1) both Hermitian connections are metric
            assert np.abs(gamma + np.einsum("ikj->ijk", gamma)).max() < 1e-10
            # (2) and complex: the connection matrices commute with J
            A = np.einsum("ijk,km->imj", gamma, Ginv)
            assert max(np.abs(A[i] @ Jm - Jm @ A[i]).max()
                       for i in range(n)) < 1e-10
        # (3) the Bismut torsion is minus J applied to d(omega)
        Jdom = -np.einsum("abc,ai,bj,ck->ijk", rep.domega, Jm, Jm, Jm)
        assert np.abs(rep.torsion + Jdom).max() < 1e-12
        # (4) and totally antisymmetric
        H = rep.torsion
        assert np.abs(H + np.einsum("jik->ijk", H)).max() < 1e-12
        assert np.abs(H + np.einsum("ikj->ijk", H)).max() < 1e-12
        # (5) the Chern torsion has no (1,1) part
        Tch = rep.gamma_chern - np.einsum("jik->ijk", rep.gamma_chern) - Lt
        T11 = 0.5 * (Tch + np.einsum("abk,ai,bj->ijk", Tch, Jm, Jm))
        assert np.abs(T11).max() < 1e-10
        # (6) the Ricci split is exact and has the right J symmetries
        assert np.abs(rep.ricci_bismut - rep.ricci_11 - rep.ricci_anti).max() == 0
        assert np.abs(rep.ricci_11 - Jm.T @ rep.ricci_11 @ Jm).max() < 1e-12
        assert np.abs(rep.ricci_anti + Jm.T @ rep.ricci_anti @ Jm).max() < 1e-12


def test_ricci_identity():
    # (1) both sides agree on the bi-invariant metric of su(3)
    S = structure("A2")
    g = biinvariant_metric(S)
    assert geo.verify_ricci_identity(g) < 1e-8
    # (2) the identity is scale natural
    g2 = geo.as_metric(2.0 * geo.metric_array(g), S)
    assert geo.verify_ricci_identity(g2, S) < 1e-8
    # (3) and survives random Hermitian metrics on a product group
    S2 = structure("A1+A1")
    rng = np.random.default_rng(17)
    for _ in range(5):
        assert geo.verify_ricci_identity(random_hermitian(S2, rng), S2) < 1e-8


def test_curvature_report_rejects_bad_metrics():
    S = structure("A1+A1")
    n = S.algebra.dimension
    G0 = geo.metric_array(biinvariant_metric(S))
    # (1) breaking J-invariance is an error
    bad = G0.copy()
    bad[0, 1] = bad[1, 0] = 0.5
    with pytest.raises(ValueError):
        geo.curvature_report(geo.as_metric(bad, S), S)
    # (2) losing positivity is an error
    neg = G0.copy()
    neg[0, 0] = neg[1, 1] = -1.0
    with pytest.raises(ValueError):
        geo.curvature_report(geo.as_metric(neg, S), S)
    # (3) a metric with no structure attached cannot be analyzed
    loose = geo.as_metric(G0, S)
    loose = type(loose)(g=loose.g, algebra=S.algebra, structure=None)
    with pytest.raises(ValueError):
        geo.curvature_report(loose)


def test_su3_torus_family():
    # (1) the whole admissible family is Bismut flat and pluriclosed
    for u in (0.0, 0.3, 0.2 + 0.25j):
        S, g = geo.su3_torus_family(1.0, 1.0, u)
        rep = geo.curvature_report(g)
        assert rep.bismut_flat_norm < 1e-8
        assert rep.pluriclosed_residual < 1e-12
    # (2) u = 0 is bi-invariant, u != 0 is not
    _, g0 = geo.su3_torus_family(1.0, 1.0, 0.0)
    assert geo.biinvariance_residual(g0) < 1e-12
    _, g3 = geo.su3_torus_family(1.0, 1.0, 0.3)
    assert geo.biinvariance_residual(g3) > 1e-3
    # (3) the positivity wall sits exactly at alpha*beta = 4|u|^2
    geo.su3_torus_family(1.0, 1.0, 0.49)
    with pytest.raises(ValueError):
        geo.su3_torus_family(1.0, 1.0, 0.51)
    with pytest.raises(ValueError):
        geo.su3_torus_family(-1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        geo.su3_torus_family(1.0, 0.0, 0.0)


def test_bigraded_part_resolution():
    S = structure("A2")
    Jm = geo.j_array(S)
    rng = np.random.default_rng(23)
    n = 8
    # (1) the (p,q) parts of a 2-form resum to the form
    phi = rng.standard_normal((n, n))
    phi = phi - phi.T
    total = sum(geo.bigraded_part(phi, Jm, p, 2 - p) for p in range(3))
    assert np.abs(total - phi).max() < 1e-12
    # (2) same for a 3-form
    psi = rng.standard_normal((n, n, n))
    psi = psi - np.einsum("jik->ijk", psi)
    psi = psi - np.einsum("ikj->ijk", psi)
    total = sum(geo.bigraded_part(psi, Jm, p, 3 - p) for p in range(4))
    assert np.abs(total - psi).max() < 1e-11
    # (3) a fundamental form is purely (1,1)
    Om = Jm.T @ geo.metric_array(biinvariant_metric(S))
    assert np.abs(geo.bigraded_part(Om, Jm, 1, 1) - Om).max() < 1e-12
    assert np.abs(geo.bigraded_part(Om, Jm, 2, 0)).max() < 1e-12
    # (4) bad bidegrees are refused
    with pytest.raises(ValueError):
        geo.bigraded_part(phi, Jm, 3, 0)


def test_report_json():
    import json

    S = structure("A2")
    rep = geo.curvature_report(biinvariant_metric(S))
    # (1) the compact report carries the three headline residuals
    d = geo.report_to_json(rep)
    assert set(d) == {"dimension", "bismut_flat_norm", "pluriclosed_residual",
                      "ricci_identity_residual", "pluriclosed"}
    json.dumps(d)
    # (2) the full dump stays serializable
    d = geo.report_to_json(rep, full=True)
    assert "torsion" in d and "ricci_11" in d
    json.dumps(d)


def test_closed_invariant_two_forms_degenerate():
    for spec in ("A2", "A1+A1"):
        S = structure(spec)
        C = geo.structure_array(S.algebra)
        n = S.algebra.dimension
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        cols = []
        for i, j in pairs:
            phi = np.zeros((n, n))
            phi[i, j], phi[j, i] = 1.0, -1.0
            cols.append(geo._d2(C, phi).ravel())
        M = np.array(cols).T
        _u, sv, vt = np.linalg.svd(M)
        rank = int((sv > 1e-9 * sv[0]).sum())
        # (1) no second cohomology and no center: closed two-forms are the
        #     coboundaries, one per basis covector
        assert len(pairs) - rank == n
        kernel = vt[rank:]
        rng = np.random.default_rng(11)
        for k in range(len(kernel) + 5):
            c = kernel[k] if k < len(kernel) else (
                rng.standard_normal(len(kernel)) @ kernel)
            phi = np.zeros((n, n))
            for (i, j), x in zip(pairs, c):
                phi[i, j], phi[j, i] = x, -x
            s = np.linalg.svd(phi, compute_uv=False)
            # (2) every closed invariant two-form is degenerate, so there is
            #     no invariant symplectic structure on these groups
            assert s[-1] < 1e-10 * max(s[0], 1.0)
