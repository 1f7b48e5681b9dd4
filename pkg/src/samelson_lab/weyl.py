"""Weyl group acting on the orthonormal torus frame, and its invariants.

Reflections are computed from root coordinates in the metric-orthonormal
frame; entries live in Q(sqrt(d)) with the surds confined to single factor
blocks.  Invariant polynomial spaces feed the coinvariant algebra used by
the bigraded model.
"""

from __future__ import annotations

from typing import Optional

from samelson_lab import linalg
from samelson_lab.exact import ExactScalar, exact, sqrt_rational
from samelson_lab.liealg import CartanData
from samelson_lab.samelson import orthonormal_torus_frame

__all__ = [
    "invariant_polynomials",
    "reflection_matrices",
    "root_frame_coordinates",
    "weyl_group",
]

_0 = exact(0)
_1 = exact(1)


def root_frame_coordinates(cd: CartanData):
    """Each root as an ExactScalar r-vector in the orthonormal frame."""
    W, N = orthonormal_torus_frame(cd)
    r = cd.rank
    out = []
    for alpha in cd.roots:
        a = []
        for l in range(r):
            q = sum(W[k][l] * alpha[k] for k in range(r))
            a.append(exact(q) * sqrt_rational(1 / N[l]) if q else _0)
        out.append(tuple(a))
    return out


def _reflection(a):
    n2 = sum((x * x for x in a), _0)
    scale = exact(2) * n2.inverse()
    r = len(a)
    return tuple(
        tuple((_1 if i == j else _0) - scale * a[i] * a[j] for j in range(r))
        for i in range(r)
    )


def reflection_matrices(cd: CartanData):
    """One reflection per positive root, deduplicated."""
    coords = root_frame_coordinates(cd)
    seen = []
    for i, a in enumerate(coords):
        if not cd.positive(i):
            continue
        s = _reflection(a)
        if s not in seen:
            seen.append(s)
    return tuple(seen)


def weyl_group(cd: CartanData, bound: int = 100000):
    """Closure of the reflections; raises past the safety bound."""
    refs = reflection_matrices(cd)
    r = cd.rank
    ident = tuple(tuple(_1 if i == j else _0 for j in range(r)) for i in range(r))
    group = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for g in frontier:
            for s in refs:
                h = tuple(tuple(row) for row in linalg.matmul(
                    [list(row) for row in s], [list(row) for row in g]))
                if h not in group:
                    if len(group) >= bound:
                        raise RuntimeError(
                            "Weyl closure exceeded %d elements" % (bound,))
                    group.add(h)
                    new.append(h)
        frontier = new
    return tuple(sorted(group, key=repr))


def _pmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for ea, ca in p.items():
        for eb, cb in q.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            c = out.get(e)
            out[e] = ca * cb if c is None else c + ca * cb
    return {e: c for e, c in out.items() if not c.is_zero()}


def _apply_group_element(g_sub, expt: tuple) -> dict:
    s = len(expt)
    poly = {tuple([0] * s): _1}
    for i, e in enumerate(expt):
        if not e:
            continue
        lf = {}
        for j in range(s):
            if not g_sub[i][j].is_zero():
                unit = tuple(1 if a == j else 0 for a in range(s))
                lf[unit] = g_sub[i][j]
        for _ in range(e):
            poly = _pmul(poly, lf)
    return poly


def invariant_polynomials(cd: CartanData, degree: int,
                          group: Optional[tuple] = None):
    """Echelon basis of the degree-d Weyl invariants.

    Works in the semisimple orthonormal coordinates only; abelian torus
    directions carry a trivial action and are handled by free tensor
    factors elsewhere.  Polynomials are dicts exponent tuple -> ExactScalar.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if group is None:
        group = weyl_group(cd)
    r = cd.rank
    ss = [l for l in range(r) if l not in cd.abelian_coords]
    s = len(ss)
    if s == 0 or degree == 0:
        return [] if degree else [{tuple(): _1}]
    subs = [[[g[a][b] for b in ss] for a in ss] for g in group]
    expts = _monomials(s, degree)
    order = {e: i for i, e in enumerate(expts)}
    rows = []
    ginv = exact(len(group)).inverse()
    for e in expts:
        acc: dict = {}
        for g_sub in subs:
            for m, c in _apply_group_element(g_sub, e).items():
                prev = acc.get(m)
                acc[m] = c if prev is None else prev + c
        row = [_0] * len(expts)
        for m, c in acc.items():
            row[order[m]] = c * ginv
        rows.append(row)
    R, piv = linalg.rref(rows)
    basis = []
    for i in range(len(piv)):
        poly = {expts[j]: R[i][j] for j in range(len(expts))
                if not R[i][j].is_zero()}
        basis.append(poly)
    return basis


def _monomials(nvars: int, degree: int):
    if nvars == 1:
        return [(degree,)]
    out = []
    for e in range(degree + 1):
        for rest in _monomials(nvars - 1, degree - e):
            out.append((e,) + rest)
    return out
