"""Compact Lie algebras of types A-D (plus abelian summands) over Q.

Each simple factor is realized by explicit matrices: the compact form is
spanned by i*H_k on the diagonal together with X - X^t and i*(X + X^t)
for the canonical positive-root matrices X.  Structure constants are
recovered by exact linear solves against the matrix basis, so every
downstream identity (Jacobi, root brackets, Killing signs) is exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from samelson_lab.exact import ExactScalar, exact, exact_i
from samelson_lab import linalg

__all__ = [
    "CartanData",
    "LieAlgebra",
    "algebra_from_json",
    "algebra_to_json",
    "build_algebra",
    "cartan_decomposition",
    "cartan_from_json",
    "cartan_to_json",
    "killing_form",
    "negative_definite",
    "parse_group_spec",
]

F = Fraction
GroupSpec = tuple[tuple[str, int], ...]

_I = exact_i()
_HALF = exact(F(1, 2))


# ---------------------------------------------------------------------------
# sparse complex m x m matrices as {(i, j): ExactScalar}, 0-based


def _clean(M: dict) -> dict:
    return {k: v for k, v in M.items() if not v.is_zero()}


def _madd(A: dict, B: dict, sign: int = 1) -> dict:
    out = dict(A)
    for k, v in B.items():
        out[k] = out.get(k, exact(0)) + (v if sign > 0 else -v)
    return _clean(out)


def _mmul(A: dict, B: dict) -> dict:
    rows: dict = {}
    for (i, j), v in B.items():
        rows.setdefault(i, []).append((j, v))
    out: dict = {}
    for (i, k), a in A.items():
        for j, b in rows.get(k, ()):
            out[(i, j)] = out.get((i, j), exact(0)) + a * b
    return _clean(out)


def _mbracket(A: dict, B: dict) -> dict:
    return _madd(_mmul(A, B), _mmul(B, A), -1)


def _mtrans(A: dict) -> dict:
    return {(j, i): v for (i, j), v in A.items()}


def _mscale(c: ExactScalar, A: dict) -> dict:
    return _clean({k: c * v for k, v in A.items()})


# ---------------------------------------------------------------------------
# canonical realizations; positive roots listed with their h-coordinates


def _realize_factor(typ: str, r: int):
    """Return (m, H_mats, pos_roots) with pos_roots = [(alpha, label, X)]."""
    E = lambda i, j: {(i - 1, j - 1): exact(1)}  # 1-based convenience
    if typ == "A":
        m = r + 1
        H = [_madd(E(k, k), E(k + 1, k + 1), -1) for k in range(1, r + 1)]
        pos = []
        for i in range(1, m + 1):
            for j in range(i + 1, m + 1):
                a = [0] * r
                for k, s in ((i, 1), (i - 1, -1), (j, -1), (j - 1, 1)):
                    if 1 <= k <= r:
                        a[k - 1] += s
                pos.append((tuple(a), "e%d-e%d" % (i, j), E(i, j)))
        return m, H, pos
    if typ in ("B", "D"):
        m = 2 * r + 1 if typ == "B" else 2 * r
    elif typ == "C":
        m = 2 * r
    else:
        raise ValueError("unsupported Cartan type %r" % (typ,))
    co = lambda i: m + 1 - i
    H = [_madd(E(k, k), E(co(k), co(k)), -1) for k in range(1, r + 1)]
    pos = []
    unit = lambda k: tuple(1 if t == k - 1 else 0 for t in range(r))
    add = lambda u, v: tuple(x + y for x, y in zip(u, v))
    sub = lambda u, v: tuple(x - y for x, y in zip(u, v))
    for k in range(1, r + 1):
        for l in range(k + 1, r + 1):
            pos.append(
                (sub(unit(k), unit(l)), "e%d-e%d" % (k, l),
                 _madd(E(k, l), E(co(l), co(k)), -1))
            )
            sgn = 1 if typ == "C" else -1
            pos.append(
                (add(unit(k), unit(l)), "e%d+e%d" % (k, l),
                 _madd(E(k, co(l)), E(l, co(k)), sgn))
            )
    if typ == "B":
        for k in range(1, r + 1):
            pos.append(
                (unit(k), "e%d" % (k,),
                 _madd(E(k, r + 1), E(r + 1, co(k)), -1))
            )
    if typ == "C":
        for k in range(1, r + 1):
            pos.append((add(unit(k), unit(k)), "2e%d" % (k,), E(k, co(k))))
    return m, H, pos


_SUPPORTED = {"A": (1, 8), "B": (2, 8), "C": (2, 8), "D": (3, 8), "T": (1, 8)}


def parse_group_spec(s: Union[str, Sequence]) -> GroupSpec:
    if not isinstance(s, str):
        return tuple((str(t), int(r)) for t, r in s)
    out = []
    for part in s.split("+"):
        part = part.strip()
        if not part or not part[0].isalpha():
            raise ValueError("bad group spec %r" % (s,))
        out.append((part[0].upper(), int(part[1:])))
    return tuple(out)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LieAlgebra:
    dimension: int
    labels: tuple
    structure: tuple  # dense c[i][j][k], Fractions
    factors: tuple  # index blocks, one per spec entry
    rank: int
    spec: GroupSpec
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def bracket_table(self):
        """Sparse brackets: list over i of [(j, k, Fraction), ...]."""
        if "table" not in self._cache:
            tab = []
            for i in range(self.dimension):
                row = []
                for j in range(self.dimension):
                    for k, c in enumerate(self.structure[i][j]):
                        if c:
                            row.append((j, k, c))
                tab.append(row)
            self._cache["table"] = tab
        return self._cache["table"]

    def bracket(self, x, y):
        """[x, y] for coefficient vectors over any scalar with +,*."""
        z0 = x[0] - x[0]
        out = [z0] * self.dimension
        for i, xi in enumerate(x):
            if xi == z0:
                continue
            for j, k, c in self.bracket_table()[i]:
                yj = y[j]
                if yj != z0:
                    out[k] = out[k] + xi * yj * c
        return out

    def ad(self, i: int):
        n = self.dimension
        A = [[F(0)] * n for _ in range(n)]
        for j, k, c in self.bracket_table()[i]:
            A[k][j] = c
        return A


@dataclass(frozen=True)
class CartanData:
    algebra: LieAlgebra
    torus_indices: tuple  # global basis indices of the r torus directions
    abelian_coords: tuple  # torus-coordinate positions from abelian factors
    roots: tuple  # r-vectors of Fractions; alpha(sum c_k z_k) = i <alpha, c>
    root_vectors: tuple  # ExactScalar n-vectors in the complexification
    neg_of: tuple  # involution on root indices
    factor_of_root: tuple
    root_planes: tuple  # (u_index, v_index, root_index of the canonical alpha)
    H_reg: tuple  # Fractions, regular element in torus coordinates

    @property
    def rank(self) -> int:
        return len(self.torus_indices)

    def positive(self, i: int) -> bool:
        s = sum(a * h for a, h in zip(self.roots[i], self.H_reg))
        return s > 0


def build_algebra(spec: Union[str, Sequence]) -> LieAlgebra:
    spec = parse_group_spec(spec)
    if not spec:
        raise ValueError("empty group spec")
    for typ, r in spec:
        if typ not in _SUPPORTED:
            raise ValueError("unsupported Cartan type %r" % (typ,))
        lo, hi = _SUPPORTED[typ]
        if not lo <= r <= hi:
            raise ValueError("rank %d out of supported range for type %s" % (r, typ))

    labels: list = []
    factors: list = []
    c_blocks: list = []  # per factor dense structure constants
    torus_indices: list = []
    abelian_coords: list = []
    roots: list = []
    root_vectors: list = []
    neg_of: list = []
    factor_of_root: list = []
    root_planes: list = []
    offset = 0
    coord = 0
    many = len(spec) > 1

    for fidx, (typ, r) in enumerate(spec):
        pre = "g%d." % (fidx + 1,) if many else ""
        if typ == "T":
            nf = r
            labels += [pre + "a%d" % (k + 1,) for k in range(nf)]
            torus_indices += list(range(offset, offset + nf))
            abelian_coords += list(range(coord, coord + nf))
            c_blocks.append([[[F(0)] * nf for _ in range(nf)] for _ in range(nf)])
            factors.append(tuple(range(offset, offset + nf)))
            offset += nf
            coord += nf
            continue

        m, Hs, pos = _realize_factor(typ, r)
        mats: list = []
        for k, Hm in enumerate(Hs):
            labels.append(pre + "t%d" % (k + 1,))
            mats.append(_mscale(_I, Hm))
        for pidx, (alpha, lab, X) in enumerate(pos):
            Xt = _mtrans(X)
            labels.append(pre + "u(%s)" % (lab,))
            labels.append(pre + "v(%s)" % (lab,))
            mats.append(_madd(X, Xt, -1))
            mats.append(_mscale(_I, _madd(X, Xt, 1)))
        nf = len(mats)
        assert nf == r + 2 * len(pos)

        cf = _structure_constants(mats, m)
        c_blocks.append(cf)
        factors.append(tuple(range(offset, offset + nf)))
        torus_indices += list(range(offset, offset + r))

        rtot = sum(rr for _, rr in spec)
        for pidx, (alpha, lab, X) in enumerate(pos):
            ui = offset + r + 2 * pidx
            vi = ui + 1
            ga = [F(0)] * rtot
            for k, a in enumerate(alpha):
                ga[coord + k] = F(a)
            ia = len(roots)
            roots.append(tuple(ga))
            roots.append(tuple(-a for a in ga))
            neg_of += [ia + 1, ia]
            factor_of_root += [fidx, fidx]
            root_planes.append((ui, vi, ia))
        offset += nf
        coord += r

    n = offset
    rtot = coord
    dense = [[[F(0)] * n for _ in range(n)] for _ in range(n)]
    for blk, cf in zip(factors, c_blocks):
        for a, i in enumerate(blk):
            for b, j in enumerate(blk):
                for cc, k in enumerate(blk):
                    dense[i][j][k] = cf[a][b][cc]

    L = LieAlgebra(
        dimension=n,
        labels=tuple(labels),
        structure=tuple(tuple(tuple(row) for row in plane) for plane in dense),
        factors=tuple(factors),
        rank=rtot,
        spec=spec,
    )

    # root vectors Y_alpha = (u - i v)/2, Y_{-alpha} = (u + i v)/2
    z = [exact(0)] * n
    for ui, vi, ia in root_planes:
        Y = list(z)
        Y[ui], Y[vi] = _HALF, -_HALF * _I
        Yn = list(z)
        Yn[ui], Yn[vi] = _HALF, _HALF * _I
        root_vectors += [tuple(Y), tuple(Yn)]
    L._cache["cartan_raw"] = (
        tuple(torus_indices),
        tuple(abelian_coords),
        tuple(roots),
        tuple(root_vectors),
        tuple(neg_of),
        tuple(factor_of_root),
        tuple(root_planes),
    )
    return L


def _structure_constants(mats, m):
    """Exact c[i][j][k] for sparse matrix basis mats (complex m x m)."""
    n = len(mats)
    flat = [[exact(0)] * (m * m) for _ in range(n)]
    for k, M in enumerate(mats):
        for (i, j), v in M.items():
            flat[k][i * m + j] = v
    _, piv = linalg.rref(flat)
    if len(piv) != n:
        raise AssertionError("matrix basis is linearly dependent")
    S = [[flat[k][p] for k in range(n)] for p in piv]
    Sinv = linalg.inv(S)
    c = [[[F(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            M = _mbracket(mats[i], mats[j])
            rhs = [M.get((p // m, p % m), exact(0)) for p in piv]
            x = linalg.matvec(Sinv, rhs)
            # exact reconstruction guard: coefficients must rebuild M
            acc: dict = {}
            for k, xk in enumerate(x):
                if not xk.is_zero():
                    acc = _madd(acc, _mscale(xk, mats[k]))
            if acc != M:
                raise AssertionError(
                    "bracket of basis %d,%d leaves the spanned algebra" % (i, j)
                )
            for k, xk in enumerate(x):
                if not xk.is_zero():
                    q = xk.to_fraction()  # raises unless real rational
                    c[i][j][k] = q
                    c[j][i][k] = -q
    return c


# ---------------------------------------------------------------------------


def killing_form(L: LieAlgebra):
    """B[i][j] = tr(ad_i ad_j), exact Fractions."""
    if "killing" in L._cache:
        return L._cache["killing"]
    n = L.dimension
    tab = L.bracket_table()
    c = L.structure
    B = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = F(0)
            for l, k, cv in tab[i]:
                s += cv * c[j][k][l]
            B[i][j] = B[j][i] = s
    L._cache["killing"] = B
    return B


def negative_definite(B) -> bool:
    """Exact test via elimination pivots of -B."""
    n = len(B)
    A = [[-B[i][j] for j in range(n)] for i in range(n)]
    for k in range(n):
        p = A[k][k]
        if p <= 0:
            return False
        for i in range(k + 1, n):
            f = A[i][k] / p
            if f:
                for j in range(k, n):
                    A[i][j] -= f * A[k][j]
    return True


# ---------------------------------------------------------------------------


def cartan_decomposition(
    L: LieAlgebra, torus_choice: Optional[Sequence[int]] = None, seed: int = 0
) -> CartanData:
    raw = L._cache.get("cartan_raw")
    if raw is None:
        raise ValueError("algebra lacks realization data; rebuild via build_algebra")
    torus_indices, abel, roots, rvs, neg_of, f_of, planes = raw

    if torus_choice is not None:
        chosen = tuple(sorted(torus_choice))
        for i in chosen:
            for j in chosen:
                if any(L.structure[i][j][k] for k in range(L.dimension)):
                    raise ValueError(
                        "torus_choice is not abelian: [e_%d, e_%d] != 0" % (i, j)
                    )
        if chosen != tuple(sorted(torus_indices)):
            if len(chosen) < L.rank or _centralizer_dim(L, chosen) > L.rank:
                raise ValueError("torus_choice is not maximal abelian")
            raise NotImplementedError(
                "decomposition along a non-canonical maximal torus is not supported"
            )

    rng = random.Random(seed)
    rsemi = [k for k in range(L.rank) if k not in abel]
    while True:
        H = [F(0)] * L.rank
        for k in rsemi:
            H[k] = F(rng.randint(-9, 9))
        if all(sum(a * h for a, h in zip(al, H)) != 0 for al in roots):
            break

    cd = CartanData(
        algebra=L,
        torus_indices=torus_indices,
        abelian_coords=abel,
        roots=roots,
        root_vectors=rvs,
        neg_of=neg_of,
        factor_of_root=f_of,
        root_planes=planes,
        H_reg=tuple(H),
    )
    _verify_cartan(cd)
    return cd


def _centralizer_dim(L: LieAlgebra, idx) -> int:
    # kernel of the stacked ad matrices of the chosen elements
    stacked = []
    for i in idx:
        stacked += L.ad(i)
    return L.dimension - linalg.rank(stacked)


def _verify_cartan(cd: CartanData) -> None:
    L = cd.algebra
    n = L.dimension
    nroots = len(cd.roots)
    assert nroots == n - cd.rank, "root count must be n - r"
    assert len(set(cd.roots)) == nroots, "root spaces must be one-dimensional"
    zero = [exact(0)] * n

    # eigenvector property against every torus direction
    for k, ti in enumerate(cd.torus_indices):
        t = list(zero)
        t[ti] = exact(1)
        for a in range(nroots):
            Y = list(cd.root_vectors[a])
            lhs = L.bracket(t, Y)
            lam = _I * exact(cd.roots[a][k])
            if any(l != lam * y for l, y in zip(lhs, Y)):
                raise AssertionError(
                    "[z_%d, E_%d] != alpha(z_%d) E_%d" % (k, a, k, a)
                )

    # bracket relations: [g_a, g_b] lands in g_{a+b}, the torus, or zero
    index = {cd.roots[a]: a for a in range(nroots)}
    tset = set(cd.torus_indices)
    for a in range(nroots):
        Ya = list(cd.root_vectors[a])
        for b in range(nroots):
            Z = L.bracket(Ya, list(cd.root_vectors[b]))
            s = tuple(x + y for x, y in zip(cd.roots[a], cd.roots[b]))
            if all(x == 0 for x in s):
                bad = [i for i, z in enumerate(Z) if not z.is_zero() and i not in tset]
                if bad:
                    raise AssertionError("[g_a, g_{-a}] must lie in the torus")
            elif s in index:
                W = cd.root_vectors[index[s]]
                piv = next(i for i, w in enumerate(W) if not w.is_zero())
                lam = Z[piv] / W[piv]
                if any(z != lam * w for z, w in zip(Z, W)):
                    raise AssertionError("[g_a, g_b] escapes g_{a+b}")
            else:
                if any(not z.is_zero() for z in Z):
                    raise AssertionError(
                        "[g_a, g_b] must vanish when a+b is not a root"
                    )


# ---------------------------------------------------------------------------
# JSON


def _fr(s: str) -> F:
    return F(s)


def algebra_to_json(L: LieAlgebra) -> dict:
    trips = []
    for i in range(L.dimension):
        for j in range(L.dimension):
            for k, c in enumerate(L.structure[i][j]):
                if c:
                    trips.append([i, j, k, str(c)])
    return {
        "spec": [[t, r] for t, r in L.spec],
        "dimension": L.dimension,
        "rank": L.rank,
        "labels": list(L.labels),
        "factors": [list(b) for b in L.factors],
        "structure_constants": trips,
    }


def algebra_from_json(d: dict) -> LieAlgebra:
    L = build_algebra([(t, r) for t, r in d["spec"]])
    if L.dimension != d["dimension"] or L.rank != d["rank"]:
        raise ValueError("serialized dimensions disagree with the rebuilt algebra")
    got = {(i, j, k): str(c) for i in range(L.dimension) for j in range(L.dimension)
           for k, c in enumerate(L.structure[i][j]) if c}
    want = {(i, j, k): s for i, j, k, s in d["structure_constants"]}
    if got != want:
        raise ValueError("serialized structure constants disagree")
    return L


def cartan_to_json(cd: CartanData) -> dict:
    return {
        "algebra": algebra_to_json(cd.algebra),
        "torus_indices": list(cd.torus_indices),
        "abelian_coords": list(cd.abelian_coords),
        "roots": [[str(x) for x in al] for al in cd.roots],
        "root_vectors": [
            [[str(v.real_part().to_fraction()), str(v.imag_part().ra)] for v in Y]
            for Y in cd.root_vectors
        ],
        "neg_of": list(cd.neg_of),
        "factor_of_root": list(cd.factor_of_root),
        "root_planes": [list(p) for p in cd.root_planes],
        "H_reg": [str(h) for h in cd.H_reg],
    }


def cartan_from_json(d: dict) -> CartanData:
    L = algebra_from_json(d["algebra"])
    cd = CartanData(
        algebra=L,
        torus_indices=tuple(d["torus_indices"]),
        abelian_coords=tuple(d["abelian_coords"]),
        roots=tuple(tuple(_fr(x) for x in al) for al in d["roots"]),
        root_vectors=tuple(
            tuple(ExactScalar(_fr(re), 0, _fr(im), 0) for re, im in Y)
            for Y in d["root_vectors"]
        ),
        neg_of=tuple(d["neg_of"]),
        factor_of_root=tuple(d["factor_of_root"]),
        root_planes=tuple(tuple(p) for p in d["root_planes"]),
        H_reg=tuple(_fr(h) for h in d["H_reg"]),
    )
    _verify_cartan(cd)
    return cd
