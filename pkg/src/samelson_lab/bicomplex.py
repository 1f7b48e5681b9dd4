"""Bounded double complexes over an exact field: cohomology and structure.

A DoubleComplex stores explicit bases per bidegree and matrices for the two
differentials d1 (bidegree (1,0)) and d2 (bidegree (0,1)), anticommuting.
Beyond the five cohomology flavors, the module decomposes a complex into its
indecomposable summands (squares and zig-zags) by peeling chain projections,
and cross-checks the decomposition against directly computed cohomology.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from samelson_lab import linalg
from samelson_lab.exact import ExactScalar, exact, exact_i

__all__ = [
    "CohomologyTable",
    "DoubleComplex",
    "FLAVORS",
    "ValidationReport",
    "ZigzagDecomposition",
    "cohomology",
    "complex_from_json",
    "complex_to_json",
    "kunneth_aeppli_check",
    "make_complex",
    "random_double_complex",
    "tensor_product",
    "validate",
    "zigzag_decompose",
]

FLAVORS = ("dolbeault", "conj_dolbeault", "bott_chern", "aeppli", "de_rham")

_0 = exact(0)
_1 = exact(1)


def _zeros(rows: int, cols: int):
    return [[_0] * cols for _ in range(rows)]


def _eye(n: int):
    return [[_1 if i == j else _0 for j in range(n)] for i in range(n)]


def _apply(M, v):
    return [sum((a * x for a, x in zip(row, v) if not a.is_zero()), _0) for row in M]


def _mat_mul(A, B):
    if not A or not B:
        return _zeros(len(A), len(B[0]) if B else 0)
    return [[sum((a * B[k][j] for k, a in enumerate(row) if not a.is_zero()), _0)
             for j in range(len(B[0]))] for row in A]


def _mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _is_zero_mat(M) -> bool:
    return all(x.is_zero() for row in M for x in row)


def _kernel(M, cols: int):
    if cols == 0:
        return []
    if not M or _is_zero_mat(M):
        return [list(r) for r in _eye(cols)]
    return linalg.nullspace(M)


def _independent(vectors):
    vectors = [v for v in vectors if any(not x.is_zero() for x in v)]
    if not vectors:
        return []
    _, piv = linalg.rref(linalg.transpose(vectors))
    return [vectors[i] for i in piv]


def _rank_of(vectors) -> int:
    return len(_independent(vectors))


def _complete(base, extra):
    """Vectors from extra extending span(base); returns the added ones."""
    work = _independent(base)
    r = len(work)
    added = []
    for v in extra:
        if any(not x.is_zero() for x in v):
            cand = work + [v]
            if _rank_of(cand) > r:
                work = cand
                r += 1
                added.append(v)
    return added


def _coords_in(basis, v):
    """Coordinates of v in the span of the (independent) basis rows."""
    if not basis:
        if any(not x.is_zero() for x in v):
            raise ValueError("vector outside the zero subspace")
        return []
    return linalg.solve(linalg.transpose(basis), v)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DoubleComplex:
    spots: dict  # (p, q) -> dimension >= 1
    d1: dict  # (p, q) -> matrix into (p+1, q)
    d2: dict  # (p, q) -> matrix into (p, q+1)
    meta: dict = field(default_factory=dict, compare=False)

    def dim(self, p: int, q: int) -> int:
        return self.spots.get((p, q), 0)

    def map1(self, p: int, q: int):
        M = self.d1.get((p, q))
        return M if M is not None else _zeros(self.dim(p + 1, q), self.dim(p, q))

    def map2(self, p: int, q: int):
        M = self.d2.get((p, q))
        return M if M is not None else _zeros(self.dim(p, q + 1), self.dim(p, q))

    def support(self):
        return sorted(self.spots)

    def total_dimension(self) -> int:
        return sum(self.spots.values())


def make_complex(spots: dict, d1: dict, d2: dict, meta: Optional[dict] = None) -> DoubleComplex:
    spots = {s: d for s, d in spots.items() if d > 0}
    d1 = {s: M for s, M in d1.items() if s in spots and M and M[0]}
    d2 = {s: M for s, M in d2.items() if s in spots and M and M[0]}
    return DoubleComplex(spots=spots, d1=d1, d2=d2, meta=meta or {})


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    message: str = "valid"
    location: Optional[tuple] = None


def validate(D: DoubleComplex) -> ValidationReport:
    for (p, q), dim in D.spots.items():
        for store, dp, dq in ((D.d1, 1, 0), (D.d2, 0, 1)):
            M = store.get((p, q))
            if M is None:
                continue
            rows, cols = len(M), len(M[0]) if M else 0
            want = (D.dim(p + dp, q + dq), dim)
            if (rows, cols) != want:
                raise ValueError(
                    "differential at %r has shape %r, expected %r"
                    % ((p, q), (rows, cols), want)
                )
    for p, q in D.support():
        if not _is_zero_mat(_mat_mul(D.map1(p + 1, q), D.map1(p, q))):
            return ValidationReport(False, "d1*d1 != 0 at (%d, %d)" % (p, q), (p, q))
        if not _is_zero_mat(_mat_mul(D.map2(p, q + 1), D.map2(p, q))):
            return ValidationReport(False, "d2*d2 != 0 at (%d, %d)" % (p, q), (p, q))
        anti = _mat_add(
            _mat_mul(D.map1(p, q + 1), D.map2(p, q)),
            _mat_mul(D.map2(p + 1, q), D.map1(p, q)),
        )
        if not _is_zero_mat(anti):
            return ValidationReport(
                False, "d1*d2 + d2*d1 != 0 at (%d, %d)" % (p, q), (p, q)
            )
    return ValidationReport(True)


def _require_valid(D: DoubleComplex) -> None:
    rep = validate(D)
    if not rep.ok:
        raise ValueError("invalid double complex: " + rep.message)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CohomologyTable:
    flavor: str
    dims: dict  # (p, q) -> int, or total degree -> int for de_rham
    reps: Optional[dict] = None  # same keys, list of coordinate vectors


def cohomology(D: DoubleComplex, flavor: str, representatives: bool = False) -> CohomologyTable:
    if flavor not in FLAVORS:
        raise ValueError("unknown flavor %r" % (flavor,))
    _require_valid(D)
    if flavor == "de_rham":
        return _de_rham(D)
    dims: dict = {}
    reps: dict = {}
    for p, q in D.support():
        n = D.dim(p, q)
        if flavor == "dolbeault":
            K = _kernel(D.map2(p, q), n)
            I = _independent(linalg.transpose(D.map2(p, q - 1)) if D.dim(p, q - 1) else [])
        elif flavor == "conj_dolbeault":
            K = _kernel(D.map1(p, q), n)
            I = _independent(linalg.transpose(D.map1(p - 1, q)) if D.dim(p - 1, q) else [])
        elif flavor == "bott_chern":
            K = _kernel(D.map1(p, q) + D.map2(p, q), n)
            dd = _mat_mul(D.map1(p - 1, q), D.map2(p - 1, q - 1)) if D.dim(p - 1, q - 1) else []
            I = _independent(linalg.transpose(dd) if dd else [])
        else:  # aeppli
            dd = _mat_mul(D.map1(p, q + 1), D.map2(p, q))
            K = _kernel(dd, n)
            cand = []
            if D.dim(p - 1, q):
                cand += linalg.transpose(D.map1(p - 1, q))
            if D.dim(p, q - 1):
                cand += linalg.transpose(D.map2(p, q - 1))
            I = _independent(cand)
        new = _complete(I, K)
        dims[(p, q)] = len(new)
        if representatives:
            reps[(p, q)] = new
    dims = {s: d for s, d in dims.items() if d}
    return CohomologyTable(flavor, dims, reps if representatives else None)


def _de_rham(D: DoubleComplex) -> CohomologyTable:
    levels: dict = {}
    for (p, q), d in D.spots.items():
        levels.setdefault(p + q, []).append((p, q))
    for k in levels:
        levels[k].sort()
    ks = sorted(levels)
    offs: dict = {}
    tdim: dict = {}
    for k in ks:
        off = 0
        for s in levels[k]:
            offs[s] = off
            off += D.spots[s]
        tdim[k] = off
    dmat: dict = {}
    for k in ks:
        M = _zeros(tdim.get(k + 1, 0), tdim[k])
        for (p, q) in levels[k]:
            for tgt, A in (((p + 1, q), D.map1(p, q)), ((p, q + 1), D.map2(p, q))):
                if tgt in D.spots:
                    ro, co = offs[tgt], offs[(p, q)]
                    for i, row in enumerate(A):
                        for j, x in enumerate(row):
                            M[ro + i][co + j] = M[ro + i][co + j] + x
        dmat[k] = M
    dims = {}
    for k in ks:
        kerd = tdim[k] - (linalg.rank(dmat[k]) if tdim.get(k + 1, 0) else 0)
        imd = 0
        if k - 1 in dmat and tdim.get(k - 1, 0) and tdim[k]:
            imd = linalg.rank(dmat[k - 1])
        h = kerd - imd
        if h:
            dims[k] = h
    return CohomologyTable("de_rham", dims)


# ---------------------------------------------------------------------------
# tensor product with Koszul signs


def tensor_product(D1: DoubleComplex, D2: DoubleComplex) -> DoubleComplex:
    _require_valid(D1)
    _require_valid(D2)
    layout: dict = {}
    spots: dict = {}
    for (p1, q1), n1 in sorted(D1.spots.items()):
        for (p2, q2), n2 in sorted(D2.spots.items()):
            s = (p1 + p2, q1 + q2)
            off = spots.get(s, 0)
            layout.setdefault(s, []).append(((p1, q1), (p2, q2), off, n1, n2))
            spots[s] = off + n1 * n2
    d1: dict = {}
    d2: dict = {}
    for s, blocks in layout.items():
        for which, (dp, dq) in (("d1", (1, 0)), ("d2", (0, 1))):
            tgt = (s[0] + dp, s[1] + dq)
            if tgt not in spots:
                continue
            M = _zeros(spots[tgt], spots[s])
            tblocks = {(b[0], b[1]): b for b in layout[tgt]}
            for (s1, s2, off, n1, n2) in blocks:
                sgn = exact(-1 if (s1[0] + s1[1]) % 2 else 1)
                A1 = (D1.map1 if which == "d1" else D1.map2)(*s1)
                t1 = ((s1[0] + dp, s1[1] + dq), s2)
                if t1 in tblocks and A1:
                    _, _, toff, m1, m2 = tblocks[t1]
                    for i, row in enumerate(A1):
                        for j, x in enumerate(row):
                            if not x.is_zero():
                                for b in range(n2):
                                    M[toff + i * m2 + b][off + j * n2 + b] = x
                A2 = (D2.map1 if which == "d1" else D2.map2)(*s2)
                t2 = (s1, (s2[0] + dp, s2[1] + dq))
                if t2 in tblocks and A2:
                    _, _, toff, m1, m2 = tblocks[t2]
                    for i, row in enumerate(A2):
                        for j, x in enumerate(row):
                            if not x.is_zero():
                                for a in range(n1):
                                    M[toff + a * m2 + i][off + a * n2 + j] = sgn * x
            if not _is_zero_mat(M):
                (d1 if which == "d1" else d2)[s] = M
    out = make_complex(spots, d1, d2, meta={"tensor_layout": layout})
    _require_valid(out)
    return out


def _tensor_vector(layout, s, s1, s2, x, y):
    for (b1, b2, off, n1, n2) in layout[s]:
        if (b1, b2) == (s1, s2):
            v = [_0] * sum(bl[3] * bl[4] for bl in layout[s])
            for i, xv in enumerate(x):
                for j, yv in enumerate(y):
                    v[off + i * n2 + j] = xv * yv
            return v
    raise KeyError((s1, s2))


@dataclass(frozen=True)
class KunnethReport:
    per_bidegree: dict  # (p,q) -> (product_dim, image_dim, defect)

    def defect(self, p: int, q: int) -> int:
        return self.per_bidegree.get((p, q), (0, 0, 0))[2]


def kunneth_aeppli_check(D1: DoubleComplex, D2: DoubleComplex) -> KunnethReport:
    """Compare H_A of the product with classes lifted from the factors.

    For each bidegree the tensor classes x (x) y with d1 d2 (x (x) y) = 0 are
    mapped into H_A of the product; the report lists the product dimension,
    the rank of that map, and the defect (the part not hit by lifted classes).
    """
    P = tensor_product(D1, D2)
    layout = P.meta["tensor_layout"]
    t1 = cohomology(D1, "aeppli", representatives=True)
    t2 = cohomology(D2, "aeppli", representatives=True)
    tP = cohomology(P, "aeppli", representatives=True)
    out: dict = {}
    for s in sorted(set(tP.dims) | {k for k in layout}):
        lifted = []
        for (s1, s2, off, n1, n2) in layout.get(s, []):
            for x in (t1.reps or {}).get(s1, []):
                for y in (t2.reps or {}).get(s2, []):
                    lifted.append(_tensor_vector(layout, s, s1, s2, x, y))
        pdim = tP.dims.get(s, 0)
        if not lifted:
            if pdim:
                out[s] = (pdim, 0, pdim)
            continue
        p, q = s
        dd = _mat_mul(P.map1(p, q + 1), P.map2(p, q))
        # columns of Dmat are d1 d2 applied to each lifted tensor class
        Dmat = linalg.transpose([_apply(dd, v) for v in lifted])
        closed_coeffs = _kernel(Dmat, len(lifted))
        closed = [
            [sum((ci * lifted[i][j] for i, ci in enumerate(c) if not ci.is_zero()), _0)
             for j in range(len(lifted[0]))]
            for c in closed_coeffs
        ]
        # rank of the image of the closed lifted classes inside H_A(product)
        I = []
        if P.dim(p - 1, q):
            I += linalg.transpose(P.map1(p - 1, q))
        if P.dim(p, q - 1):
            I += linalg.transpose(P.map2(p, q - 1))
        base = _independent(I)
        img = len(_complete(base, closed))
        out[s] = (pdim, img, pdim - img)
    return KunnethReport(per_bidegree=out)


# ---------------------------------------------------------------------------
# decomposition into squares and zig-zags


def _outer(col, row):
    return [[c * r for r in row] for c in col]


def _mat_eq(A, B) -> bool:
    return all(x == y for ra, rb in zip(A, B) for x, y in zip(ra, rb))


class _Work:
    """Mutable copy of a complex peeled by successive chain projections."""

    def __init__(self, D: DoubleComplex):
        self.dims = dict(D.spots)
        self.d1 = {s: [row[:] for row in D.map1(*s)] for s in D.spots
                   if D.dim(s[0] + 1, s[1])}
        self.d2 = {s: [row[:] for row in D.map2(*s)] for s in D.spots
                   if D.dim(s[0], s[1] + 1)}

    def dim(self, s) -> int:
        return self.dims.get(s, 0)

    def map1(self, s):
        M = self.d1.get(s)
        return M if M is not None else _zeros(self.dim((s[0] + 1, s[1])), self.dim(s))

    def map2(self, s):
        M = self.d2.get(s)
        return M if M is not None else _zeros(self.dim((s[0], s[1] + 1)), self.dim(s))

    def _check_projection(self, proj) -> None:
        for s, P in proj.items():
            assert _mat_eq(P, _mat_mul(P, P)), "internal: peel projection not idempotent"
        for s in self.dims:
            p, q = s
            for tgt, M in (((p + 1, q), self.map1(s)), ((p, q + 1), self.map2(s))):
                if s not in proj and tgt not in proj:
                    continue
                Ps = proj.get(s, _zeros(self.dim(s), self.dim(s)))
                Pt = proj.get(tgt, _zeros(self.dim(tgt), self.dim(tgt)))
                assert _mat_eq(_mat_mul(Pt, M), _mat_mul(M, Ps)), (
                    "internal: peel projection is not a chain map at %r" % (s,))

    def restrict(self, proj) -> None:
        self._check_projection(proj)
        newbasis = {}
        for s in self.dims:
            B = linalg.nullspace(proj[s]) if s in proj else _eye(self.dim(s))
            if B:
                newbasis[s] = B
        stores = []
        for store, dp, dq in ((self.d1, 1, 0), (self.d2, 0, 1)):
            new = {}
            for s, B in newbasis.items():
                t = (s[0] + dp, s[1] + dq)
                M = (self.d1 if dp else self.d2)[s] if s in store else None
                if M is None:
                    continue
                if t not in newbasis:
                    for b in B:
                        assert all(x.is_zero() for x in _apply(M, b)), (
                            "internal: complement not preserved at %r" % (s,))
                    continue
                if s not in proj and t not in proj:
                    new[s] = M
                    continue
                Tb = linalg.transpose(newbasis[t])
                cols = [linalg.solve(Tb, _apply(M, b)) for b in B]
                new[s] = linalg.transpose(cols)
            stores.append(new)
        self.dims = {s: len(B) for s, B in newbasis.items()}
        self.d1, self.d2 = stores

    # phase 1: squares -----------------------------------------------------

    def peel_squares(self, out) -> None:
        while True:
            hit = None
            for s in sorted(self.dims):
                p, q = s
                dd = _mat_mul(self.map1((p, q + 1)), self.map2(s))
                if dd and dd[0] and not _is_zero_mat(dd):
                    hit = (s, dd)
                    break
            if hit is None:
                return
            (p, q), dd = hit
            col = row = None
            for j in range(len(dd[0])):
                for i in range(len(dd)):
                    if not dd[i][j].is_zero():
                        col, row = j, i
                        break
                if col is not None:
                    break
            inv = dd[row][col].inverse()
            n00 = self.dim((p, q))
            e_c = [_1 if i == col else _0 for i in range(n00)]
            d1v = _apply(self.map1((p, q)), e_c)
            d2v = _apply(self.map2((p, q)), e_c)
            w = [dd[i][col] for i in range(len(dd))]
            d2r = self.map2((p + 1, q))
            d1r = self.map1((p, q + 1))
            proj = {
                (p, q): _outer(e_c, [x * inv for x in dd[row]]),
                (p + 1, q): _outer(d1v, [-x * inv for x in d2r[row]]),
                (p, q + 1): _outer(d2v, [x * inv for x in d1r[row]]),
                (p + 1, q + 1): _outer(w, [inv if i == row else _0
                                           for i in range(len(w))]),
            }
            self.restrict(proj)
            out.append((p, q))

    # singleton summands ---------------------------------------------------

    def peel_singletons(self, out) -> None:
        for s in sorted(self.dims):
            n = self.dim(s)
            K = _kernel(self.map1(s) + self.map2(s), n)
            p, q = s
            ins = []
            if self.dim((p - 1, q)):
                ins += linalg.transpose(self.map1((p - 1, q)))
            if self.dim((p, q - 1)):
                ins += linalg.transpose(self.map2((p, q - 1)))
            U = _independent(ins)
            assert _rank_of(U + K) == _rank_of(K), (
                "internal: incoming image escapes the joint kernel at %r" % (s,))
            M_add = _complete(U, K)
            if not M_add:
                continue
            C_add = _complete(U + M_add, _eye(n))
            FB = U + M_add + C_add
            T = linalg.transpose(FB)
            Tinv = linalg.inv(T)
            sel = [[_1 if (i == j and len(U) <= i < len(U) + len(M_add)) else _0
                    for j in range(n)] for i in range(n)]
            P = _mat_mul(T, _mat_mul(sel, Tinv))
            self.restrict({s: P})
            out.extend([((p, q),)] * len(M_add))

    # phase 2: zig-zags on antidiagonal pairs ------------------------------

    def peel_pairs(self, out, rng) -> None:
        guard = sum(self.dims.values())
        while self.dims:
            k = min(p + q for p, q in self.dims)
            if not self._peel_one_interval(k, rng, out):
                raise AssertionError(
                    "internal: zig-zag peeling is stuck at antidiagonal %d" % k)
            total = sum(self.dims.values())
            assert total < guard, "internal: peel made no progress"
            guard = total

    def _vertex_spot(self, k: int, v: int):
        if v % 2 == 0:
            return (v // 2, k + 1 - v // 2)
        return ((v - 1) // 2, k - (v - 1) // 2)

    def _peel_one_interval(self, k: int, rng, out) -> bool:
        verts = set()
        for (p, q) in self.dims:
            if p + q == k:
                verts.add(2 * p + 1)
            elif p + q == k + 1:
                verts.add(2 * p)
        present = sorted(verts)
        if not present:
            return False
        runs = []
        start = prev = present[0]
        for v in present[1:]:
            if v == prev + 1:
                prev = v
                continue
            runs.append((start, prev))
            start = prev = v
        runs.append((start, prev))
        cands = []
        for a, b in runs:
            for i in range(a, b + 1):
                for j in range(i + 1, b + 1):
                    cands.append(tuple(range(i, j + 1)))
        cands.sort(key=lambda c: (-len(c), c))
        for cand in cands:
            if self._try_interval(k, cand, rng, out):
                return True
        return False

    def _try_interval(self, k: int, cand, rng, out) -> bool:
        spot = {v: self._vertex_spot(k, v) for v in cand}
        incand = set(cand)
        srcs = [v for v in cand if v % 2 == 1]
        snks = [v for v in cand if v % 2 == 0]
        # complement of the joint kernel supplies generator coordinates
        Cb = {}
        for v in srcs:
            s = spot[v]
            n = self.dim(s)
            K = _kernel(self.map1(s) + self.map2(s), n)
            Cb[v] = _complete(K, _eye(n))
            if not Cb[v]:
                return False
        offs = {}
        ncols = 0
        for v in srcs:
            offs[v] = ncols
            ncols += len(Cb[v])
        # arrow images of the C-basis vectors, as columns in ambient coords
        f_img = {v: [_apply(self.map2(spot[v]), c) for c in Cb[v]] for v in srcs}
        g_img = {v: [_apply(self.map1(spot[v]), c) for c in Cb[v]] for v in srcs}
        rows = []
        for v in snks:
            left, right = v - 1, v + 1
            if left in incand and right in incand:
                m = self.dim(spot[v])
                for i in range(m):
                    r = [_0] * ncols
                    for jj, y in enumerate(g_img[left]):
                        r[offs[left] + jj] = y[i]
                    for jj, y in enumerate(f_img[right]):
                        r[offs[right] + jj] = r[offs[right] + jj] - y[i]
                    rows.append(r)
        for v in srcs:
            for side, img in ((v - 1, f_img[v]), (v + 1, g_img[v])):
                if side in incand:
                    continue
                tdim = len(img[0]) if img else 0
                for i in range(tdim):
                    r = [_0] * ncols
                    for jj, y in enumerate(img):
                        r[offs[v] + jj] = y[i]
                    rows.append(r)
        null = _kernel(rows, ncols)
        if not null:
            return False
        for _ in range(30):
            coeff = [exact(rng.randint(-9, 9)) for _ in null]
            x = [sum((c * nv[j] for c, nv in zip(coeff, null) if not c.is_zero()), _0)
                 for j in range(ncols)]
            if all(t.is_zero() for t in x):
                continue
            gen = {}
            for v in srcs:
                c = x[offs[v]:offs[v] + len(Cb[v])]
                gen[v] = [sum((ci * Cb[v][i][j] for i, ci in enumerate(c)
                               if not ci.is_zero()), _0)
                          for j in range(self.dim(spot[v]))]
            tvec = {}
            ok = True
            for v in snks:
                if v + 1 in incand:
                    t = _apply(self.map2(spot[v + 1]), gen[v + 1])
                else:
                    t = _apply(self.map1(spot[v - 1]), gen[v - 1])
                if all(y.is_zero() for y in t):
                    ok = False
                    break
                tvec[v] = t
            if not ok:
                continue
            proj = self._interval_projection(k, cand, spot, gen, tvec)
            if proj is None:
                continue
            self.restrict(proj)
            out.append(tuple(spot[v] for v in cand))
            return True
        return False

    def _interval_projection(self, k, cand, spot, gen, tvec):
        incand = set(cand)
        snks = [v for v in cand if v % 2 == 0]
        srcs = [v for v in cand if v % 2 == 1]
        offs = {}
        ncols = 0
        for v in snks:
            offs[v] = ncols
            ncols += self.dim(spot[v])
        rows = []
        rhs = []
        for v in snks:
            r = [_0] * ncols
            for i, y in enumerate(tvec[v]):
                r[offs[v] + i] = y
            rows.append(r)
            rhs.append(_1)
            # incoming arrows from sources outside the interval must die
            for u in (v - 1, v + 1):
                s_u = self._vertex_spot(k, u)
                if u in incand or not self.dim(s_u):
                    continue
                A = self.map1(s_u) if u == v - 1 else self.map2(s_u)
                for col in linalg.transpose(A):
                    r = [_0] * ncols
                    for i, y in enumerate(col):
                        r[offs[v] + i] = y
                    rows.append(r)
                    rhs.append(_0)
        for v in srcs:
            if v - 1 in incand and v + 1 in incand:
                s_v = spot[v]
                F = self.map2(s_v)
                G = self.map1(s_v)
                for j in range(self.dim(s_v)):
                    r = [_0] * ncols
                    for i in range(len(F)):
                        r[offs[v - 1] + i] = F[i][j]
                    for i in range(len(G)):
                        r[offs[v + 1] + i] = r[offs[v + 1] + i] - G[i][j]
                    rows.append(r)
                    rhs.append(_0)
        try:
            psi = linalg.solve(rows, rhs, unique=False)
        except ValueError:
            return None
        proj = {}
        for v in snks:
            pv = psi[offs[v]:offs[v] + self.dim(spot[v])]
            proj[spot[v]] = _outer(tvec[v], pv)
        for v in srcs:
            if v - 1 in incand:
                pv = psi[offs[v - 1]:offs[v - 1] + self.dim(spot[v - 1])]
                A = self.map2(spot[v])
            else:
                pv = psi[offs[v + 1]:offs[v + 1] + self.dim(spot[v + 1])]
                A = self.map1(spot[v])
            phi = [sum((pv[i] * A[i][j] for i in range(len(A))
                        if not pv[i].is_zero()), _0)
                   for j in range(self.dim(spot[v]))]
            proj[spot[v]] = _outer(gen[v], phi)
        return proj


@dataclass(frozen=True)
class ZigzagDecomposition:
    squares: tuple  # anchors (p, q), lower-left corner of each square
    zigzags: tuple  # spot tuples along the path; singletons have length 1

    def total_dimension(self) -> int:
        return 4 * len(self.squares) + sum(len(z) for z in self.zigzags)

    def records(self):
        """(anchor, length, spots) per zig-zag, anchor = smallest spot."""
        return tuple((min(z), len(z), z) for z in self.zigzags)

    def tables(self) -> dict:
        tabs: dict = {fl: {} for fl in FLAVORS}

        def bump(d, key):
            d[key] = d.get(key, 0) + 1

        for piece in self.zigzags:
            if len(piece) == 1:
                s = piece[0]
                for fl in ("dolbeault", "conj_dolbeault", "bott_chern", "aeppli"):
                    bump(tabs[fl], s)
                bump(tabs["de_rham"], s[0] + s[1])
                continue
            touched1: set = set()
            touched2: set = set()
            incoming: set = set()
            outgoing: set = set()
            for a, b in zip(piece, piece[1:]):
                src, snk = (a, b) if a[0] + a[1] < b[0] + b[1] else (b, a)
                which = touched1 if snk == (src[0] + 1, src[1]) else touched2
                which.update((src, snk))
                outgoing.add(src)
                incoming.add(snk)
            for s in piece:
                if s not in touched2:
                    bump(tabs["dolbeault"], s)
                if s not in touched1:
                    bump(tabs["conj_dolbeault"], s)
                if s not in outgoing:
                    bump(tabs["bott_chern"], s)
                if s not in incoming:
                    bump(tabs["aeppli"], s)
            if len(piece) % 2 == 1:
                k = min(p + q for p, q in piece)
                ends = piece[0][0] + piece[0][1]
                bump(tabs["de_rham"], k if ends == k else k + 1)
        return tabs


def zigzag_decompose(D: DoubleComplex, seed: int = 0) -> ZigzagDecomposition:
    """Split D into squares and zig-zags by peeling chain projections.

    The result is cross-checked against directly computed cohomology in all
    five flavors; any disagreement raises, so a returned decomposition is
    certified.
    """
    _require_valid(D)
    w = _Work(D)
    squares: list = []
    zz: list = []
    w.peel_squares(squares)
    w.peel_singletons(zz)
    w.peel_pairs(zz, random.Random(seed))
    dec = ZigzagDecomposition(tuple(sorted(squares)), tuple(sorted(zz)))
    assert dec.total_dimension() == D.total_dimension(), (
        "internal: decomposition loses dimensions")
    derived = dec.tables()
    for flavor in FLAVORS:
        direct = cohomology(D, flavor).dims
        if direct != derived[flavor]:
            raise AssertionError(
                "internal: %s from the decomposition %r disagrees with the "
                "direct computation %r" % (flavor, derived[flavor], direct))
    return dec


# ---------------------------------------------------------------------------
# random complexes with known decomposition, for exercising the peeler


def random_double_complex(seed: int = 0, max_spot_dim: int = 4, max_pq: int = 3,
                          n_pieces: Optional[int] = None):
    """A random bounded complex plus its true summand decomposition.

    Spot dimensions stay <= max_spot_dim and the support stays inside
    [0, max_pq]^2.  The complex is a shuffled direct sum of squares and
    zig-zags conjugated by random invertible basis changes per spot.
    """
    rng = random.Random(seed)
    dims: dict = {}
    squares: list = []
    zigzags: list = []

    def room(spots):
        return all(0 <= p <= max_pq and 0 <= q <= max_pq
                   and dims.get((p, q), 0) < max_spot_dim for p, q in spots)

    target = n_pieces if n_pieces is not None else rng.randint(3, 7)
    for _ in range(80):
        if len(squares) + len(zigzags) >= target:
            break
        roll = rng.random()
        if roll < 0.3:
            p, q = rng.randint(0, max_pq - 1), rng.randint(0, max_pq - 1)
            spots = [(p, q), (p + 1, q), (p, q + 1), (p + 1, q + 1)]
            if room(spots):
                for s in spots:
                    dims[s] = dims.get(s, 0) + 1
                squares.append((p, q))
        elif roll < 0.45:
            s = (rng.randint(0, max_pq), rng.randint(0, max_pq))
            if room([s]):
                dims[s] = dims.get(s, 0) + 1
                zigzags.append((s,))
        else:
            k = rng.randint(0, 2 * max_pq - 1)
            v0 = rng.randint(0, 2 * max_pq + 1)
            L = rng.randint(2, 5)
            spots = []
            for v in range(v0, v0 + L):
                p = v // 2 if v % 2 == 0 else (v - 1) // 2
                q = (k + 1 - p) if v % 2 == 0 else (k - p)
                spots.append((p, q))
            if room(spots):
                for s in spots:
                    dims[s] = dims.get(s, 0) + 1
                zigzags.append(tuple(spots))
    # assemble block-diagonal differentials piece by piece
    filled = {s: 0 for s in dims}
    d1 = {s: _zeros(dims.get((s[0] + 1, s[1]), 0), n) for s, n in dims.items()}
    d2 = {s: _zeros(dims.get((s[0], s[1] + 1), 0), n) for s, n in dims.items()}

    def take(s):
        i = filled[s]
        filled[s] += 1
        return i

    for (p, q) in squares:
        iv, ix, iy, iw = take((p, q)), take((p + 1, q)), take((p, q + 1)), take((p + 1, q + 1))
        d1[(p, q)][ix][iv] = _1
        d2[(p, q)][iy][iv] = _1
        d2[(p + 1, q)][iw][ix] = -_1
        d1[(p, q + 1)][iw][iy] = _1
    for piece in zigzags:
        idx = {s: take(s) for s in piece}
        for a, b in zip(piece, piece[1:]):
            src, snk = (a, b) if a[0] + a[1] < b[0] + b[1] else (b, a)
            store = d1 if snk == (src[0] + 1, src[1]) else d2
            store[src][idx[snk]][idx[src]] = _1
    # conjugate by random invertible integer matrices per spot
    B: dict = {}
    Binv: dict = {}
    for s, n in dims.items():
        M = _eye(n)
        for _ in range(2 * n):
            i, j = rng.randrange(n), rng.randrange(n)
            if i != j:
                c = exact(rng.randint(-2, 2))
                M[i] = [a + c * b for a, b in zip(M[i], M[j])]
        B[s] = M
        Binv[s] = linalg.inv(M)
    for store, dp, dq in ((d1, 1, 0), (d2, 0, 1)):
        for s in list(store):
            t = (s[0] + dp, s[1] + dq)
            if t in dims:
                store[s] = _mat_mul(B[t], _mat_mul(store[s], Binv[s]))
            else:
                del store[s]
    D = make_complex(dims, d1, d2)
    rep = validate(D)
    assert rep.ok, "internal: random complex is invalid: " + rep.message
    truth = ZigzagDecomposition(tuple(sorted(squares)), tuple(sorted(zigzags)))
    return D, truth


# ---------------------------------------------------------------------------
# serialization


def complex_to_json(D: DoubleComplex) -> dict:
    _require_valid(D)

    def entries(store):
        out = []
        for (p, q), M in sorted(store.items()):
            for i, row in enumerate(M):
                for j, x in enumerate(row):
                    if not x.is_zero():
                        if x.d != 1:
                            raise ValueError(
                                "only Gaussian rational entries serialize")
                        out.append([p, q, i, j, str(x.real_part()),
                                    str(x.imag_part())])
        return out

    return {
        "support": [[p, q, n] for (p, q), n in sorted(D.spots.items())],
        "d1": entries(D.d1),
        "d2": entries(D.d2),
    }


def complex_from_json(data: dict) -> DoubleComplex:
    from fractions import Fraction

    spots = {(p, q): n for p, q, n in data["support"]}
    stores = {"d1": {}, "d2": {}}
    for key in ("d1", "d2"):
        for p, q, i, j, re, im in data[key]:
            M = stores[key].setdefault((p, q), {})
            M[(i, j)] = exact(Fraction(re)) + exact_i() * exact(Fraction(im))
    built = {}
    for key, (dp, dq) in (("d1", (1, 0)), ("d2", (0, 1))):
        built[key] = {}
        for s, entries in stores[key].items():
            rows = spots.get((s[0] + dp, s[1] + dq), 0)
            cols = spots.get(s, 0)
            M = _zeros(rows, cols)
            for (i, j), x in entries.items():
                M[i][j] = x
            built[key][s] = M
    D = make_complex(spots, built["d1"], built["d2"])
    rep = validate(D)
    if not rep.ok:
        raise ValueError("serialized complex is invalid: " + rep.message)
    return D
