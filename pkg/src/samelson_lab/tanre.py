"""Bigraded model of a Samelson structure, built on coinvariants.

The model multiplies the coinvariant algebra of the Weyl action (generators
w_l in bidegree (1,1)) with exterior generators e_a of bidegree (1,0) and
their conjugates (0,1) spanning the torus (1,0)-covectors.  Differentials:
d1 e_a = 0, d2 e_a = sum_l c_l w_l with c the frame coordinates of e_a, and
the mirrored rule for conjugates.  The result is a DoubleComplex truncated
in total degree; cohomology queries at (p, q) are reliable when
p + q + 2 <= truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from samelson_lab import linalg
from samelson_lab.bicomplex import DoubleComplex, cohomology, make_complex, validate
from samelson_lab.exact import ExactScalar, exact, exact_i
from samelson_lab.liealg import CartanData
from samelson_lab.samelson import SamelsonStructure
from samelson_lab.weyl import _monomials, invariant_polynomials, weyl_group

__all__ = [
    "AeppliH11Report",
    "CentralSquareReport",
    "CoinvariantAlgebra",
    "TanreModel",
    "aeppli_h11",
    "build_model",
    "central_square_solve",
    "coinvariant_algebra",
    "one_one_form_coords",
    "torus_blocks",
]

_0 = exact(0)
_1 = exact(1)


@dataclass(frozen=True)
class CoinvariantAlgebra:
    nvars: int
    hilbert: tuple  # dimensions of the graded pieces actually built
    qmons: tuple  # per degree: exponent tuples representing the basis
    mult: tuple  # mult[l][k]: matrix of multiplication by x_l, deg k -> k+1
    _mons: tuple
    _rref: tuple  # per degree: (rows, pivots) spanning the ideal piece

    def dim(self, k: int) -> int:
        return self.hilbert[k] if 0 <= k < len(self.hilbert) else 0

    def reduce(self, k: int, vec):
        """Coordinates of a degree-k coefficient vector in the basis."""
        rows, piv = self._rref[k]
        v = list(vec)
        for i, p in enumerate(piv):
            c = v[p]
            if not c.is_zero():
                v = [a - c * b for a, b in zip(v, rows[i])]
        sel = [self._mons[k].index(m) for m in self.qmons[k]]
        return [v[j] for j in sel]


def coinvariant_algebra(cd: CartanData, truncation: int = 6,
                        group: Optional[tuple] = None) -> CoinvariantAlgebra:
    if group is None:
        group = weyl_group(cd)
    ss = [l for l in range(cd.rank) if l not in cd.abelian_coords]
    n = len(ss)
    top = truncation // 2
    invs = {j: invariant_polynomials(cd, j, group=group) for j in range(1, top + 1)}
    hilbert = []
    qmons = []
    monlist = []
    rrefs = []
    mult = [[None] * (top + 1) for _ in range(n)]
    for k in range(top + 1):
        mons = _monomials(n, k) if n else ([tuple()] if k == 0 else [])
        order = {m: i for i, m in enumerate(mons)}
        rows = []
        for j in range(1, k + 1):
            for poly in invs.get(j, []):
                for m in _monomials(n, k - j):
                    row = [_0] * len(mons)
                    for e, c in poly.items():
                        em = tuple(a + b for a, b in zip(e, m))
                        row[order[em]] = row[order[em]] + c
                    rows.append(row)
        if rows:
            R, piv = linalg.rref(rows)
        else:
            R, piv = [], []
        pivset = set(piv)
        qm = tuple(mons[i] for i in range(len(mons)) if i not in pivset)
        monlist.append(tuple(mons))
        rrefs.append((R, piv))
        qmons.append(qm)
        hilbert.append(len(qm))
    alg = CoinvariantAlgebra(n, tuple(hilbert), tuple(qmons), tuple(),
                             tuple(monlist), tuple(rrefs))
    cols = []
    for l in range(n):
        per_deg = []
        for k in range(top):
            if not hilbert[k] or not hilbert[k + 1]:
                per_deg.append(None)
                continue
            mat = []
            for m in qmons[k]:
                em = tuple(a + (1 if idx == l else 0) for idx, a in enumerate(m))
                vec = [_0] * len(monlist[k + 1])
                vec[monlist[k + 1].index(em)] = _1
                mat.append(alg.reduce(k + 1, vec))
            per_deg.append(linalg.transpose(mat))
        cols.append(tuple(per_deg))
    return CoinvariantAlgebra(n, tuple(hilbert), tuple(qmons), tuple(cols),
                              tuple(monlist), tuple(rrefs))


def _subsets(m: int, size: int):
    if size < 0 or size > m:
        return []
    if size == 0:
        return [tuple()]
    out = []

    def rec(start, acc):
        if len(acc) == size:
            out.append(tuple(acc))
            return
        for x in range(start, m):
            rec(x + 1, acc + [x])

    rec(0, [])
    return out


@dataclass(frozen=True)
class TanreModel:
    structure: SamelsonStructure
    truncation: int
    coinv: CoinvariantAlgebra
    eta: tuple  # m covector rows over the torus frame coordinates
    complex: DoubleComplex
    basis: dict  # (p, q) -> tuple of (k, iy, S, T)

    def _table(self, flavor: str, representatives: bool):
        cache = self.complex.meta.setdefault("cohomology_cache", {})
        key = (flavor, representatives)
        if key not in cache:
            cache[key] = cohomology(self.complex, flavor,
                                    representatives=representatives)
        return cache[key]

    def query(self, flavor: str, p: int, q: int, representatives: bool = False):
        if flavor == "de_rham":
            if p + 2 > self.truncation:
                raise ValueError("degree %d beyond trusted truncation" % (p,))
            return self._table(flavor, False).dims.get(p, 0)
        if p + q + 2 > self.truncation:
            raise ValueError(
                "bidegree (%d, %d) beyond trusted truncation %d"
                % (p, q, self.truncation))
        t = self._table(flavor, representatives)
        if representatives:
            return t.dims.get((p, q), 0), (t.reps or {}).get((p, q), [])
        return t.dims.get((p, q), 0)

    def table(self, flavor: str) -> dict:
        t = self._table(flavor, False)
        if flavor == "de_rham":
            return {k: v for k, v in t.dims.items() if k + 2 <= self.truncation}
        return {s: v for s, v in t.dims.items()
                if s[0] + s[1] + 2 <= self.truncation}

    def describe_basis(self, p: int, q: int):
        names = []
        for (k, iy, S, T) in self.basis.get((p, q), ()):
            parts = []
            if k:
                mon = self.coinv.qmons[k][iy]
                parts.append("*".join(
                    "w%d" % (l + 1,) for l, e in enumerate(mon) for _ in range(e)))
            parts += ["e%d" % (a + 1,) for a in S]
            parts += ["ebar%d" % (a + 1,) for a in T]
            names.append("^".join(parts) if parts else "1")
        return tuple(names)


def torus_blocks(cd: CartanData):
    """Per-factor torus coordinate groups, semisimple first, then abelian."""
    from samelson_lab.samelson import _factor_of_coord

    fac = _factor_of_coord(cd)
    ab = set(cd.abelian_coords)
    groups: dict = {}
    for k in range(cd.rank):
        if k not in ab:
            groups.setdefault(fac[k], []).append(k)
    blocks = tuple(tuple(g) for _, g in sorted(groups.items()))
    return blocks, tuple(sorted(ab))


@dataclass(frozen=True)
class CentralSquareReport:
    dimension: int  # solutions modulo matrices with vanishing (1,1)-form
    full_dimension: int
    trivial_dimension: int
    basis: tuple  # essential representatives (A matrix, b vector)
    b_equal: bool  # every solution has all b_i equal
    identity_b: tuple  # the b vector realized by A = Id
    antisym_kernel_dim: int


def _as_exact_matrix(J):
    return [[x if isinstance(x, ExactScalar) else exact(x) for x in row]
            for row in J]


def central_square_solve(J, blocks, abelian=()) -> CentralSquareReport:
    Jm = _as_exact_matrix(J)
    r = len(Jm)
    i_unit = exact_i()
    J2 = linalg.matmul(Jm, Jm)
    for a in range(r):
        for c in range(r):
            want = -_1 if a == c else _0
            if J2[a][c] != want:
                raise ValueError("torus map does not square to minus identity")
            if Jm[a][c] != -Jm[c][a]:
                raise ValueError("torus map is not antisymmetric in this frame")
    if blocks and isinstance(blocks[0], int):
        sizes, blocks2, at = list(blocks), [], 0
        coords = [k for k in range(r) if k not in set(abelian)]
        for n in sizes:
            blocks2.append(tuple(coords[at:at + n]))
            at += n
        blocks = tuple(blocks2)
    s = len(blocks)
    block_of = {}
    for t, blk in enumerate(blocks):
        for k in blk:
            block_of[k] = t
    ss = sorted(block_of)
    n_unk = r * r + s

    def qcoef(i, j, k, l):
        c = _0
        if i == k and j == l:
            c = c + _1
        if j == l:
            c = c - i_unit * Jm[i][k]
        if i == k:
            c = c - i_unit * Jm[l][j]
        return c - Jm[i][k] * Jm[l][j]

    rows = []
    for i in ss:
        for j in ss:
            if i > j:
                continue
            row = [_0] * n_unk
            for k in range(r):
                for l in range(r):
                    row[k * r + l] = qcoef(i, j, k, l) + qcoef(j, i, k, l)
            if i == j:
                row[r * r + block_of[i]] = -_1
            rows.append(row)
    half = exact(Fraction(1, 2))
    # the (1,1)-form of A has coefficient matrix 4 P A P with P = (Id - iJ)/2,
    # so A contributes nothing exactly when P A P = 0
    P = [[half * ((_1 if a == c else _0) - i_unit * Jm[a][c]) for c in range(r)]
         for a in range(r)]
    form_rows = []
    for l in range(r):
        for m2 in range(r):
            row = [_0] * (r * r)
            for i in range(r):
                for j in range(r):
                    row[i * r + j] = P[l][i] * P[j][m2]
            form_rows.append(row)
    N = linalg.nullspace(rows) if rows else linalg.identity(n_unk, _1)
    K0 = linalg.nullspace(form_rows)
    K = [list(v) + [_0] * s for v in K0]
    base = [list(v) for v in K]
    rk = linalg.rank(base) if base else 0
    assert rk == len(K), "internal: trivial solutions are dependent"
    ess = []
    for v in N:
        trial = base + [list(v)]
        r2 = linalg.rank(trial)
        if r2 > rk:
            base, rk = trial, r2
            ess.append(v)
    assert rk == len(N), "internal: matrices with zero form must solve the system"

    def unpack(v):
        A = tuple(tuple(v[k * r + l] for l in range(r)) for k in range(r))
        return A, tuple(v[r * r + t] for t in range(s))

    b_equal = True
    for v in N:
        _, b = unpack(v)
        if any(x != b[0] for x in b[1:]):
            b_equal = False
    two = exact(2)
    Qid = [[two * ((_1 if a == c else _0) - i_unit * Jm[a][c]) for c in range(r)]
           for a in range(r)]
    B = [[Qid[a][c] + Qid[c][a] for c in range(r)] for a in range(r)]
    idb = [B[blk[0]][blk[0]] for blk in blocks]
    for i in ss:
        for j in ss:
            want = idb[block_of[i]] if i == j else _0
            assert B[i][j] == want, "internal: identity matrix fails the central system"
    anti = []
    for i in range(r):
        for j in range(r):
            row = [_0] * (r * r)
            for k in range(r):
                row[k * r + j] = row[k * r + j] + Jm[i][k]
            row[i * r + j] = row[i * r + j] - i_unit
            anti.append(list(row))
            row = [_0] * (r * r)
            for k in range(r):
                row[i * r + k] = row[i * r + k] + Jm[k][j]
            row[i * r + j] = row[i * r + j] - i_unit
            anti.append(list(row))
            if i <= j:
                row = [_0] * (r * r)
                row[i * r + j] = row[i * r + j] + _1
                row[j * r + i] = row[j * r + i] + _1
                anti.append(list(row))
    anti_dim = len(linalg.nullspace(anti))
    return CentralSquareReport(
        dimension=len(ess),
        full_dimension=len(N),
        trivial_dimension=len(K),
        basis=tuple(unpack(v) for v in ess),
        b_equal=b_equal,
        identity_b=tuple(idb),
        antisym_kernel_dim=anti_dim,
    )


def build_model(S: SamelsonStructure, truncation: int = 6) -> TanreModel:
    cd = S.cartan
    r = cd.rank
    m = r // 2
    coinv = coinvariant_algebra(cd, truncation)
    ss = [l for l in range(r) if l not in cd.abelian_coords]
    # (1,0) covectors: solutions of J^T c = i c over the torus frame
    i_unit = exact_i()
    M = [[exact(S.torus_J[b][a]) - (i_unit if a == b else _0) for b in range(r)]
         for a in range(r)]
    eta = linalg.nullspace(M)
    assert len(eta) == m, "complex torus covectors should number r/2"
    etabar = [[c.conjugate() for c in row] for row in eta]
    dcoef = [[row[l] for l in ss] for row in eta]
    dcoef_bar = [[row[l] for l in ss] for row in etabar]

    basis: dict = {}
    index: dict = {}
    spots: dict = {}
    for total in range(truncation + 1):
        for p in range(total + 1):
            q = total - p
            elems = []
            for k in range(min(p, q) + 1):
                ny = coinv.dim(k)
                if not ny:
                    continue
                for iy in range(ny):
                    for Sset in _subsets(m, p - k):
                        for Tset in _subsets(m, q - k):
                            elems.append((k, iy, Sset, Tset))
            if elems:
                basis[(p, q)] = tuple(elems)
                index[(p, q)] = {e: i for i, e in enumerate(elems)}
                spots[(p, q)] = len(elems)

    def mu(coefs, k):
        """Multiplication by sum_l coefs[l] w_l as a matrix Y_k -> Y_{k+1}."""
        nk, nk1 = coinv.dim(k), coinv.dim(k + 1)
        out = [[_0] * nk for _ in range(nk1)]
        if not nk1:
            return out
        for l, c in enumerate(coefs):
            if c.is_zero():
                continue
            Ml = coinv.mult[l][k]
            if Ml is None:
                continue
            for i in range(nk1):
                for j in range(nk):
                    out[i][j] = out[i][j] + c * Ml[i][j]
        return out

    d1: dict = {}
    d2: dict = {}
    for (p, q), elems in basis.items():
        for which, tgt in (("d2", (p, q + 1)), ("d1", (p + 1, q))):
            if tgt not in spots:
                continue
            Mt = [[_0] * len(elems) for _ in range(spots[tgt])]
            tix = index[tgt]
            for col, (k, iy, Sset, Tset) in enumerate(elems):
                if which == "d2":
                    for pos, a in enumerate(Sset):
                        rest = tuple(x for x in Sset if x != a)
                        block = mu(dcoef[a], k)
                        sgn = -_1 if pos % 2 else _1
                        for iy2 in range(coinv.dim(k + 1)):
                            c = block[iy2][iy]
                            if not c.is_zero():
                                row = tix[(k + 1, iy2, rest, Tset)]
                                Mt[row][col] = Mt[row][col] + sgn * c
                else:
                    for pos, a in enumerate(Tset):
                        rest = tuple(x for x in Tset if x != a)
                        block = mu(dcoef_bar[a], k)
                        sgn = -_1 if (len(Sset) + pos) % 2 else _1
                        for iy2 in range(coinv.dim(k + 1)):
                            c = block[iy2][iy]
                            if not c.is_zero():
                                row = tix[(k + 1, iy2, Sset, rest)]
                                Mt[row][col] = Mt[row][col] + sgn * c
            if any(not x.is_zero() for rw in Mt for x in rw):
                (d2 if which == "d2" else d1)[(p, q)] = Mt
    D = make_complex(spots, d1, d2)
    rep = validate(D)
    assert rep.ok, "internal: model differentials are inconsistent: " + rep.message
    return TanreModel(S, truncation, coinv, tuple(tuple(row) for row in eta), D, basis)


def one_one_form_coords(model: TanreModel, F):
    """Coordinates of sum_{l<m} F[l][m] xi^l xi^m in the (1,1) model basis."""
    Fm = _as_exact_matrix(F)
    r = len(Fm)
    m = len(model.eta)
    for l in range(r):
        for m2 in range(r):
            assert Fm[l][m2] == -Fm[m2][l], "coefficient matrix must be antisymmetric"
    C = [list(row) for row in model.eta]
    C += [[c.conjugate() for c in row] for row in model.eta]
    Cinv = linalg.inv(C)
    G = [[sum((Cinv[l][a] * Fm[l][mm] * Cinv[mm][b]
               for l in range(r) for mm in range(r)), _0)
          for b in range(r)] for a in range(r)]
    for a in range(r):
        for b in range(a + 1, r):
            if (a < m) == (b < m) and not G[a][b].is_zero():
                raise ValueError("form has components outside bidegree (1,1)")
    out = [_0] * len(model.basis[(1, 1)])
    idx = {e: i for i, e in enumerate(model.basis[(1, 1)])}
    for a in range(m):
        for b in range(m):
            out[idx[(0, 0, (a,), (b,))]] = G[a][m + b]
    return out


def aeppli_functionals(model: TanreModel):
    """Exact (1,1) Aeppli class coordinates: pair these rows with a cocycle."""
    n = model.complex.dim(1, 1)
    dim, reps = model.query("aeppli", 1, 1, representatives=True)
    cols = []
    for src, M in (((0, 1), model.complex.map1(0, 1)),
                   ((1, 0), model.complex.map2(1, 0))):
        if model.complex.dim(*src) and M:
            for j in range(len(M[0])):
                cols.append([M[i][j] for i in range(n)])
    chosen = []
    rk = 0
    for v in cols:
        trial = chosen + [v]
        r2 = linalg.rank(trial)
        if r2 > rk:
            chosen, rk = trial, r2
    at = len(chosen)
    chosen += [list(v) for v in reps]
    assert linalg.rank(chosen) == len(chosen), "internal: representatives not independent"
    for j in range(n):
        e = [_0] * n
        e[j] = _1
        trial = chosen + [e]
        if linalg.rank(trial) > len(chosen):
            chosen = trial
    M = linalg.transpose(chosen)
    Minv = linalg.inv(M)
    funcs = [Minv[at + i] for i in range(dim)]
    return tuple(tuple(f) for f in funcs), tuple(tuple(v) for v in reps)


@dataclass(frozen=True)
class AeppliH11Report:
    dimension: int
    representatives: tuple
    functionals: tuple  # rows pairing a (1,1) cocycle to class coordinates
    metric_coords: tuple  # per J-component: class of the bi-invariant (1,1)-form
    central: CentralSquareReport


def aeppli_h11(model: TanreModel) -> AeppliH11Report:
    from samelson_lab.samelson import _factor_of_coord

    S = model.structure
    cd = S.cartan
    r = cd.rank
    blocks, ab = torus_blocks(cd)
    central = central_square_solve(S.torus_J, blocks, ab)
    dim = model.query("aeppli", 1, 1)
    if central.dimension != dim:
        raise AssertionError(
            "internal: model Aeppli dimension %d disagrees with the central "
            "system dimension %d" % (dim, central.dimension))
    funcs, reps = aeppli_functionals(model)
    fac = _factor_of_coord(cd)
    mi4 = exact(-4) * exact_i()
    metric = []
    for comp in S.components:
        inside = set(comp)
        F = [[mi4 * exact(S.torus_J[l][m]) if fac[l] in inside and fac[m] in inside
              else _0 for m in range(r)] for l in range(r)]
        v = one_one_form_coords(model, F)
        metric.append(tuple(sum((f[i] * v[i] for i in range(len(v))), _0)
                            for f in funcs))
    return AeppliH11Report(dim, reps, funcs, tuple(metric), central)
