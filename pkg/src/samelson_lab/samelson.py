"""Left-invariant complex structures of Samelson type and bi-invariant metrics.

The torus part of a complex structure is supplied as a rational matrix in a
fixed orthonormal frame of the torus: per factor, Gram-Schmidt of the i*H_k
basis against -B (abelian summands use the standard metric).  Realizing such
a matrix on the algebra itself may require a single real surd sqrt(d); the
entries of J then live in Q(i, sqrt(d)) and stay exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from samelson_lab import linalg
from samelson_lab.exact import ExactScalar, exact, exact_i, sqrt_rational
from samelson_lab.liealg import CartanData, LieAlgebra, killing_form

__all__ = [
    "InvariantMetric",
    "SamelsonStructure",
    "biinvariant_metric",
    "build_samelson_structure",
    "default_torus_j",
    "irreducible_components",
    "killing_metric",
    "mixing_torus_j",
    "orthonormal_torus_frame",
    "product_torus_j",
    "structure_from_json",
    "structure_to_json",
]

F = Fraction
_I = exact_i()


@dataclass(frozen=True)
class SamelsonStructure:
    cartan: CartanData
    J: tuple  # n x n ExactScalar, columns are images of basis vectors
    torus_J: tuple  # the r x r rational matrix in the orthonormal torus frame
    positive_roots: tuple  # root indices forming R+
    components: tuple  # partition of factor indices
    surd: int  # d with entries of J in Q(i, sqrt(d))

    @property
    def algebra(self) -> LieAlgebra:
        return self.cartan.algebra


@dataclass(frozen=True)
class InvariantMetric:
    g: tuple  # n x n symmetric, Fractions (exact) or floats
    algebra: LieAlgebra
    structure: Optional[SamelsonStructure] = None
    hermitian: bool = False
    biinvariant_lambda: Optional[tuple] = None


def _factor_of_coord(cd: CartanData):
    L = cd.algebra
    out = []
    for ti in cd.torus_indices:
        out.append(next(f for f, blk in enumerate(L.factors) if ti in blk))
    return out


def orthonormal_torus_frame(cd: CartanData):
    """Per-factor Gram-Schmidt of the torus basis against -B.

    Returns (W, N): columns of W express the frame vectors w_l in torus
    coordinates, N[l] = <w_l, w_l>; the normalized frame is w_l/sqrt(N_l).
    """
    L = cd.algebra
    B = killing_form(L)
    r = cd.rank
    ti = cd.torus_indices
    ip = lambda x, y: sum(
        -B[ti[a]][ti[b]] * x[a] * y[b] for a in range(r) for b in range(r)
    )
    fac = _factor_of_coord(cd)
    cols = []
    norms = []
    for l in range(r):
        if l in cd.abelian_coords:
            w = [F(int(a == l)) for a in range(r)]
            cols.append(w)
            norms.append(F(1))
            continue
        w = [F(int(a == l)) for a in range(r)]
        for p in range(l):
            if fac[p] != fac[l] or p in cd.abelian_coords:
                continue
            c = ip(w, cols[p]) / norms[p]
            if c:
                w = [a - c * b for a, b in zip(w, cols[p])]
        n = ip(w, w)
        assert n > 0
        cols.append(w)
        norms.append(n)
    W = [[cols[l][k] for l in range(r)] for k in range(r)]
    return W, norms


def default_torus_j(cd: CartanData):
    """Rotation pairing consecutive orthonormal torus coordinates."""
    r = cd.rank
    if r % 2:
        raise ValueError("torus dimension %d is odd; no complex structure" % (r,))
    J = [[F(0)] * r for _ in range(r)]
    for k in range(0, r, 2):
        J[k + 1][k] = F(1)
        J[k][k + 1] = F(-1)
    return J


def mixing_torus_j(cd: CartanData):
    """A torus structure tying all coordinates into one component."""
    r = cd.rank
    if r == 2:
        return default_torus_j(cd)
    if r == 4:
        # left quaternion multiplication by (0, 1/3, 2/3, 2/3)
        x, y, z = F(1, 3), F(2, 3), F(2, 3)
        return [
            [F(0), -x, -y, -z],
            [x, F(0), -z, y],
            [y, z, F(0), -x],
            [z, -y, x, F(0)],
        ]
    raise ValueError("no canonical mixing structure for rank %d; pass a matrix" % (r,))


def product_torus_j(cd: CartanData):
    """Default pairing, required to leave at least two components."""
    J = default_torus_j(cd)
    S = build_samelson_structure(cd, J)
    if len(S.components) < 2:
        raise ValueError(
            "no reducible structure from the default pairing: every complex "
            "structure mixes the rank-one torus parts of the factors"
        )
    return J


def _validate_torus_j(Jk, r):
    if len(Jk) != r or any(len(row) != r for row in Jk):
        raise ValueError("torus complex structure must be %d x %d" % (r, r))
    Jk = [[F(x) for x in row] for row in Jk]
    for k in range(r):
        for l in range(r):
            if Jk[k][l] != -Jk[l][k]:
                raise ValueError(
                    "torus complex structure not orthogonal: pair (%d, %d)" % (k, l)
                )
    sq = linalg.matmul(Jk, Jk)
    for k in range(r):
        for l in range(r):
            if sq[k][l] != (F(-1) if k == l else 0):
                raise ValueError("torus matrix does not square to -Id")
    return Jk


def build_samelson_structure(cd: CartanData, torus_J=None) -> SamelsonStructure:
    L = cd.algebra
    n, r = L.dimension, cd.rank
    if torus_J is None:
        torus_J = default_torus_j(cd)
    Jk = _validate_torus_j(torus_J, r)

    W, N = orthonormal_torus_frame(cd)
    # realized frame matrix: w_l -> sum_k Jk[k][l] sqrt(N_l/N_k) w_k
    surd = 1
    M = [[exact(0)] * r for _ in range(r)]
    for k in range(r):
        for l in range(r):
            if Jk[k][l]:
                root = sqrt_rational(N[l] / N[k])
                if root.d != 1:
                    if surd not in (1, root.d):
                        raise NotImplementedError(
                            "torus structure needs sqrt(%d) and sqrt(%d); "
                            "a single quadratic extension is supported" % (surd, root.d)
                        )
                    surd = root.d
                M[k][l] = exact(Jk[k][l]) * root
    We = [[exact(x) for x in row] for row in W]
    Jt = linalg.matmul(We, linalg.matmul(M, linalg.inv(We)))

    J = [[exact(0)] * n for _ in range(n)]
    for a, ti in enumerate(cd.torus_indices):
        for b, tj in enumerate(cd.torus_indices):
            J[ti][tj] = Jt[a][b]
    pos = tuple(i for i in range(len(cd.roots)) if cd.positive(i))
    for ui, vi, ia in cd.root_planes:
        eps = exact(1) if cd.positive(ia) else exact(-1)
        J[vi][ui] = eps
        J[ui][vi] = -eps

    mI = [[exact(-1 if i == j else 0) for j in range(n)] for i in range(n)]
    assert linalg.matmul(J, J) == mI, "realized J fails J*J = -Id"

    S = SamelsonStructure(
        cartan=cd,
        J=tuple(tuple(row) for row in J),
        torus_J=tuple(tuple(x for x in row) for row in Jk),
        positive_roots=pos,
        components=_components(cd, Jk),
        surd=surd,
    )
    _assert_subalgebra(S)
    return S


def _components(cd: CartanData, Jk):
    fac = _factor_of_coord(cd)
    nf = len(cd.algebra.factors)
    parent = list(range(nf))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in range(cd.rank):
        for l in range(cd.rank):
            if Jk[k][l]:
                a, b = find(fac[k]), find(fac[l])
                if a != b:
                    parent[b] = a
    blocks: dict = {}
    for f in range(nf):
        blocks.setdefault(find(f), []).append(f)
    return tuple(tuple(b) for _, b in sorted(blocks.items()))


def holomorphic_frame(S: SamelsonStructure):
    """Basis of the +i eigenspace: projected torus vectors, then root vectors."""
    cd = S.cartan
    n = cd.algebra.dimension
    vecs = []
    for ti in cd.torus_indices:
        t = [exact(0)] * n
        t[ti] = exact(1)
        vecs.append([t[i] - _I * S.J[i][ti] for i in range(n)])
    # keep a maximal independent subset of the projected torus vectors
    _, piv_t = linalg.rref(linalg.transpose(vecs))
    torus_part = [vecs[i] for i in piv_t]
    root_part = [list(cd.root_vectors[i]) for i in S.positive_roots]
    return torus_part, root_part


def _assert_subalgebra(S: SamelsonStructure) -> None:
    L = S.algebra
    n = L.dimension
    tor, roo = holomorphic_frame(S)
    basis = tor + roo
    assert len(basis) == n // 2
    cols = linalg.transpose(basis)
    _, piv = linalg.rref(basis)
    sub = [[basis[k][p] for k in range(len(basis))] for p in piv]
    sinv = linalg.inv(sub)
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            z = L.bracket(basis[a], basis[b])
            x = linalg.matvec(sinv, [z[p] for p in piv])
            rec = linalg.matvec(cols, x)
            assert rec == z, "holomorphic subspace is not bracket-closed"


def irreducible_components(S: SamelsonStructure, L: Optional[LieAlgebra] = None):
    if L is not None and L is not S.algebra:
        raise ValueError("structure was built on a different algebra")
    return S.components


def biinvariant_metric(S: SamelsonStructure, L: Optional[LieAlgebra] = None, lam=None):
    L = S.algebra if L is None else L
    comps = S.components
    if lam is None:
        lam = [F(1)] * len(comps)
    if len(lam) != len(comps):
        raise ValueError(
            "expected %d coefficients, one per component" % (len(comps),)
        )
    lam = [F(x) if not isinstance(x, float) else x for x in lam]
    if any(x <= 0 for x in lam):
        raise ValueError("component coefficients must be positive")
    B = killing_form(L)
    n = L.dimension
    g = [[F(0)] * n for _ in range(n)]
    abel_idx = {cd_ti for k, cd_ti in enumerate(S.cartan.torus_indices)
                if k in S.cartan.abelian_coords}
    for comp, l in zip(comps, lam):
        for f in comp:
            for i in L.factors[f]:
                for j in L.factors[f]:
                    if i in abel_idx or j in abel_idx:
                        g[i][j] = l * F(int(i == j))
                    else:
                        g[i][j] = -l * B[i][j]
    return InvariantMetric(
        g=tuple(tuple(row) for row in g),
        algebra=L,
        structure=S,
        hermitian=True,
        biinvariant_lambda=tuple(lam),
    )


def killing_metric(S: SamelsonStructure) -> InvariantMetric:
    return biinvariant_metric(S)


# ---------------------------------------------------------------------------


def structure_to_json(S: SamelsonStructure) -> dict:
    from samelson_lab.liealg import cartan_to_json

    return {
        "cartan": cartan_to_json(S.cartan),
        "J": [[x.to_token() for x in row] for row in S.J],
        "torus_J": [[str(x) for x in row] for row in S.torus_J],
        "positive_roots": list(S.positive_roots),
        "components": [list(b) for b in S.components],
        "surd": S.surd,
    }


def structure_from_json(d: dict) -> SamelsonStructure:
    from samelson_lab.liealg import cartan_from_json

    cd = cartan_from_json(d["cartan"])
    S = build_samelson_structure(cd, [[F(x) for x in row] for row in d["torus_J"]])
    got = [[x.to_token() for x in row] for row in S.J]
    if got != d["J"] or list(S.positive_roots) != d["positive_roots"]:
        raise ValueError("serialized structure disagrees with its rebuild")
    return S
