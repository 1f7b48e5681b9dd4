"""Connections, torsion and curvature of left-invariant Hermitian metrics.

Everything is computed on the Lie algebra: a left-invariant tensor is a
constant tensor on the frame, the exterior derivative is the
Chevalley-Eilenberg differential and the Koszul formula loses its derivative
terms.  The float kernel drives the flow; an exact duck-typed path certifies
Bismut flatness without rounding.

Frozen sign conventions, pinned once by the Bismut/Chern Ricci identity on
bi-invariant metrics and then left alone:

  omega(x, y)    = g(Jx, y)
  g(Db_x y, z)   = g(D_x y, z) + (1/2) domega(Jx, Jy, Jz)  [Bismut]
  g(Dc_x y, z)   = g(D_x y, z) - (1/2) domega(Jx, y, z)    [Chern]
  rho(x, y)      = -(1/2) sum_i g(R(x, y) e_i, J e_i)      [orthonormal e_i]
  theta          solves  d(omega^(m-1)) = theta ^ omega^(m-1), m = dim_C
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction as F
from itertools import combinations
from typing import Dict, Optional, Tuple

import numpy as np

from samelson_lab import linalg
from samelson_lab.exact import ExactScalar, exact
from samelson_lab.liealg import LieAlgebra, build_algebra, cartan_decomposition, killing_form
from samelson_lab.samelson import (InvariantMetric, SamelsonStructure,
                                   build_samelson_structure,
                                   orthonormal_torus_frame)

__all__ = [
    "CurvatureReport",
    "as_metric",
    "biinvariance_residual",
    "bigraded_part",
    "bismut_curvature_exact",
    "certify_bismut_flat",
    "curvature_report",
    "invariant_d",
    "metric_array",
    "report_to_json",
    "su3_torus_family",
    "verify_ricci_identity",
    "wedge",
]

Key = Tuple[int, ...]
Form = Dict[Key, object]

# rho sign fixed by the identity rho_b^{1,1} = rho_ch + i(del theta01 - delbar theta10)
RICCI_SIGN = 1.0


# ---------------------------------------------------------------------------
# exterior algebra on constant forms, duck-typed coefficients


def _sort_sign(seq):
    """(sorted tuple, permutation sign) or None on a repeated index."""
    seq = list(seq)
    sign = 1
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(seq, seq[1:]):
        if a == b:
            return None
    return tuple(seq), sign


def wedge(f1: Form, f2: Form) -> Form:
    out: Form = {}
    for k1, v1 in f1.items():
        for k2, v2 in f2.items():
            hit = _sort_sign(k1 + k2)
            if hit is None:
                continue
            key, sgn = hit
            term = v1 * v2 if sgn > 0 else -(v1 * v2)
            cur = out.get(key)
            out[key] = term if cur is None else cur + term
    return {k: v for k, v in out.items() if v}


def invariant_d(L, form: Form) -> Form:
    """Chevalley-Eilenberg differential of a constant form.

    Keys are strictly increasing index tuples; d xi^m picks up
    -c_{ab}^m xi^a ^ xi^b from every bracket [e_a, e_b] = c_{ab}^m e_m.
    """
    C = L.structure
    n = L.dimension
    degs = {len(k) for k in form}
    if len(degs) > 1:
        raise ValueError("mixed-degree form: bare components of degrees %s"
                         % (sorted(degs),))
    out: Form = {}
    for S, v in form.items():
        if not v:
            continue
        for pos, m in enumerate(S):
            rest = S[:pos] + S[pos + 1:]
            lead = -1 if pos % 2 else 1
            for a in range(n):
                for b in range(a + 1, n):
                    c = C[a][b][m]
                    if not c:
                        continue
                    hit = _sort_sign((a, b) + rest)
                    if hit is None:
                        continue
                    key, sgn = hit
                    term = v * c * (-lead * sgn)
                    cur = out.get(key)
                    out[key] = term if cur is None else cur + term
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# float kernel


def metric_array(g: InvariantMetric) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in g.g], dtype=float)


def as_metric(Gm, S: SamelsonStructure, hermitian: bool = True) -> InvariantMetric:
    g = tuple(tuple(float(x) for x in row) for row in np.asarray(Gm))
    return InvariantMetric(g=g, algebra=S.algebra, structure=S, hermitian=hermitian)


def structure_array(L: LieAlgebra) -> np.ndarray:
    if "np_structure" not in L._cache:
        n = L.dimension
        C = np.zeros((n, n, n))
        for i in range(n):
            for j in range(n):
                for k, c in enumerate(L.structure[i][j]):
                    if c:
                        C[i, j, k] = float(c)
        L._cache["np_structure"] = C
    return L._cache["np_structure"]


def j_array(S: SamelsonStructure) -> np.ndarray:
    key = "np_j"
    if key not in S.algebra._cache:
        S.algebra._cache[key] = np.array(
            [[float(x) for x in row] for row in S.J], dtype=float)
    return S.algebra._cache[key]


def _check_metric(Gm, Jm, tol=1e-9):
    if np.abs(Gm - Gm.T).max() > tol:
        raise ValueError("metric matrix is not symmetric")
    if np.abs(Jm.T @ Gm @ Jm - Gm).max() > tol:
        raise ValueError("metric is not Hermitian for this complex structure")
    try:
        np.linalg.cholesky(Gm)
    except np.linalg.LinAlgError:
        raise ValueError("metric is not positive definite")


def _d2(C, phi):
    # CE differential of a constant 2-form, any dtype
    T = np.einsum("ija,ak->ijk", C, phi)
    return -T + np.einsum("ikj->ijk", T) - np.einsum("jki->ijk", T)


def _d3(C, phi):
    T = np.einsum("ija,akl->ijkl", C, phi)
    return (-T
            + np.einsum("ikjl->ijkl", T) - np.einsum("iljk->ijkl", T)
            - np.einsum("jkil->ijkl", T) + np.einsum("jlik->ijkl", T)
            - np.einsum("klij->ijkl", T))


def _d1(C, theta):
    return -np.einsum("ijm,m->ij", C, theta)


def bigraded_part(phi, Jm, p, q):
    """(p,q) component of a constant k-form, k = p+q = phi.ndim."""
    k = phi.ndim
    if p + q != k or p < 0 or q < 0:
        raise ValueError("bidegree (%d,%d) does not match a %d-form" % (p, q, k))
    n = phi.shape[0]
    Pp = 0.5 * (np.eye(n) - 1j * Jm)
    Pm = 0.5 * (np.eye(n) + 1j * Jm)
    out = np.zeros(phi.shape, dtype=complex)
    for holo in combinations(range(k), p):
        cur = phi.astype(complex)
        for s in range(k):
            # cycles the contracted axis to the back; k steps restore order
            cur = np.tensordot(cur, Pp if s in holo else Pm, axes=([0], [0]))
        out += cur
    return out


def bismut_tensors(C, Jm, Gm):
    """All Bismut-side arrays for one metric; the flow's inner kernel."""
    Ginv = np.linalg.inv(Gm)
    Lt = np.einsum("ija,ak->ijk", C, Gm)
    glc = 0.5 * (Lt - np.einsum("jki->ijk", Lt) + np.einsum("kij->ijk", Lt))
    Om = Jm.T @ Gm
    dom = _d2(C, Om)
    H = np.einsum("abc,ai,bj,ck->ijk", dom, Jm, Jm, Jm)
    gb = glc + 0.5 * H
    A = np.einsum("ijk,km->imj", gb, Ginv)
    Rop = np.einsum("imb,jbk->ijmk", A, A)
    Rop = Rop - np.einsum("jimk->ijmk", Rop) - np.einsum("ija,amk->ijmk", C, A)
    M = Ginv @ Jm.T @ Gm
    rho = RICCI_SIGN * (-0.5) * np.einsum("ab,ijba->ij", M, Rop)
    rho11 = 0.5 * (rho + Jm.T @ rho @ Jm)
    return {
        "Ginv": Ginv, "glc": glc, "Om": Om, "dom": dom, "H": H, "gb": gb,
        "A": A, "Rop": Rop, "rho": rho, "rho11": rho11,
        "rho_anti": rho - rho11,
        "flat_norm": float(np.abs(Rop).max()),
        "pluriclosed_residual": float(np.abs(_d3(C, H)).max()),
    }


def _ricci_of(C, Jm, Gm, Ginv, gamma):
    A = np.einsum("ijk,km->imj", gamma, Ginv)
    Rop = np.einsum("imb,jbk->ijmk", A, A)
    Rop = Rop - np.einsum("jimk->ijmk", Rop) - np.einsum("ija,amk->ijmk", C, A)
    M = Ginv @ Jm.T @ Gm
    return Rop, RICCI_SIGN * (-0.5) * np.einsum("ab,ijba->ij", M, Rop)


def _lee_form(L, Jm, Gm, Om):
    n2 = Gm.shape[0]
    if n2 % 2:
        raise ValueError("odd-dimensional algebra carries no complex structure")
    m = n2 // 2
    om: Form = {}
    for i in range(n2):
        for j in range(i + 1, n2):
            if abs(Om[i, j]) > 0:
                om[(i, j)] = float(Om[i, j])
    W: Form = {(): 1.0}
    for _ in range(m - 1):
        W = wedge(W, om)
    dW = invariant_d(L, W)
    full = tuple(range(n2))
    rows = np.zeros((n2, n2))
    rhs = np.zeros(n2)
    for miss in range(n2):
        K = full[:miss] + full[miss + 1:]
        rhs[miss] = dW.get(K, 0.0)
        for pos, a in enumerate(K):
            sub = K[:pos] + K[pos + 1:]
            rows[miss, a] = (1 if pos % 2 == 0 else -1) * W.get(sub, 0.0)
    theta, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    return theta


@dataclass(frozen=True)
class CurvatureReport:
    metric: InvariantMetric
    structure: SamelsonStructure
    gamma_lc: np.ndarray
    gamma_bismut: np.ndarray
    gamma_chern: np.ndarray
    torsion: np.ndarray  # T^B = domega(J., J., J.), totally antisymmetric
    domega: np.ndarray
    curvature: np.ndarray  # R^B(e_i, e_j) e_k coefficients, axes (i, j, m, k)
    ricci_bismut: np.ndarray
    ricci_11: np.ndarray
    ricci_anti: np.ndarray  # (2,0)+(0,2) part
    ricci_chern: np.ndarray
    lee: np.ndarray
    lee_10: np.ndarray
    lee_01: np.ndarray
    bismut_flat_norm: float
    pluriclosed_residual: float
    ricci_identity_residual: float
    pluriclosed: bool


def curvature_report(g: InvariantMetric, S: Optional[SamelsonStructure] = None,
                     pluriclosed_tol: float = 1e-10) -> CurvatureReport:
    S = g.structure if S is None else S
    if S is None:
        raise ValueError("no Samelson structure attached to the metric")
    L = S.algebra
    C = structure_array(L)
    Jm = j_array(S)
    Gm = metric_array(g)
    _check_metric(Gm, Jm)
    data = bismut_tensors(C, Jm, Gm)
    Ginv = data["Ginv"]
    gch = data["glc"] - 0.5 * np.einsum("ai,ajk->ijk", Jm, data["dom"])
    _, rho_ch = _ricci_of(C, Jm, Gm, Ginv, gch)
    theta = _lee_form(L, Jm, Gm, data["Om"])
    th10 = 0.5 * (theta - 1j * (Jm.T @ theta))
    th01 = np.conj(th10)
    d01 = _d1(C, th01)
    d10 = _d1(C, th10)
    part = lambda X: 0.5 * (X + Jm.T @ X @ Jm)
    torsion_term = 1j * (part(d01) - part(d10))
    resid = float(np.abs(data["rho11"] - rho_ch - torsion_term).max())
    pc = data["pluriclosed_residual"]
    return CurvatureReport(
        metric=g, structure=S,
        gamma_lc=data["glc"], gamma_bismut=data["gb"], gamma_chern=gch,
        torsion=data["H"], domega=data["dom"], curvature=data["Rop"],
        ricci_bismut=data["rho"], ricci_11=data["rho11"],
        ricci_anti=data["rho_anti"], ricci_chern=rho_ch,
        lee=theta, lee_10=th10, lee_01=th01,
        bismut_flat_norm=data["flat_norm"],
        pluriclosed_residual=pc,
        ricci_identity_residual=resid,
        pluriclosed=pc < pluriclosed_tol,
    )


def verify_ricci_identity(g: InvariantMetric,
                          S: Optional[SamelsonStructure] = None) -> float:
    return curvature_report(g, S).ricci_identity_residual


def report_to_json(rep: CurvatureReport, full: bool = False) -> dict:
    out = {
        "dimension": int(rep.gamma_lc.shape[0]),
        "bismut_flat_norm": rep.bismut_flat_norm,
        "pluriclosed_residual": rep.pluriclosed_residual,
        "ricci_identity_residual": rep.ricci_identity_residual,
        "pluriclosed": bool(rep.pluriclosed),
    }
    if full:
        ri = lambda X: {"re": np.real(X).tolist(), "im": np.imag(X).tolist()}
        out["g"] = metric_array(rep.metric).tolist()
        out["ricci_bismut"] = rep.ricci_bismut.tolist()
        out["ricci_11"] = rep.ricci_11.tolist()
        out["ricci_chern"] = np.real_if_close(rep.ricci_chern).real.tolist()
        out["torsion"] = rep.torsion.tolist()
        out["lee"] = rep.lee.tolist()
        out["lee_10"] = ri(rep.lee_10)
    return out


# ---------------------------------------------------------------------------
# exact path


def _emat(rows):
    return [list(r) for r in rows]


def bismut_curvature_exact(g: InvariantMetric,
                           S: Optional[SamelsonStructure] = None):
    """R^B with exact scalars; entries live in Q(i, sqrt(d)).

    Only rational metrics qualify; use it to certify flatness, not to race
    the float kernel.
    """
    S = g.structure if S is None else S
    L = S.algebra
    n = L.dimension
    C = L.structure
    for row in g.g:
        for x in row:
            if isinstance(x, float):
                raise ValueError("exact certification needs a rational metric")
    G = [[F(x) for x in row] for row in g.g]
    J = _emat(S.J)
    Ginv = linalg.inv(G)
    z = exact(0)

    def cdot(i, j, M, k):
        # sum_a C[i][j][a] M[a][k] skipping zeros
        acc = None
        for a in range(n):
            c = C[i][j][a]
            if c:
                t = M[a][k] * c
                acc = t if acc is None else acc + t
        return z if acc is None else acc

    Lt = [[[cdot(i, j, G, k) for k in range(n)] for j in range(n)] for i in range(n)]
    half = F(1, 2)
    glc = [[[(Lt[i][j][k] - Lt[j][k][i] + Lt[k][i][j]) * half
             for k in range(n)] for j in range(n)] for i in range(n)]
    Om = linalg.matmul(linalg.transpose(J), [[exact(x) for x in row] for row in G])
    T1 = [[[cdot(i, j, Om, k) for k in range(n)] for j in range(n)] for i in range(n)]
    dom = [[[-T1[i][j][k] + T1[i][k][j] - T1[j][k][i]
             for k in range(n)] for j in range(n)] for i in range(n)]
    # contract one slot at a time to keep the operation count near n^4
    H1 = [[[sum((dom[a][b][c] * J[a][i] for a in range(n)), z)
            for c in range(n)] for b in range(n)] for i in range(n)]
    H2 = [[[sum((H1[i][b][c] * J[b][j] for b in range(n)), z)
            for c in range(n)] for j in range(n)] for i in range(n)]
    H = [[[sum((H2[i][j][c] * J[c][k] for c in range(n)), z)
           for k in range(n)] for j in range(n)] for i in range(n)]
    gb = [[[glc[i][j][k] + H[i][j][k] * half for k in range(n)]
           for j in range(n)] for i in range(n)]
    A = [[[sum((gb[i][j][k] * Ginv[k][m] for k in range(n)), z)
           for j in range(n)] for m in range(n)] for i in range(n)]
    R = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            com = linalg.matmul(A[i], A[j])
            com2 = linalg.matmul(A[j], A[i])
            blk = [[com[a][b] - com2[a][b] for b in range(n)] for a in range(n)]
            for a2 in range(n):
                c = C[i][j][a2]
                if c:
                    for p in range(n):
                        for q in range(n):
                            blk[p][q] = blk[p][q] - A[a2][p][q] * c
            R[i][j] = blk
            R[j][i] = [[-x for x in row] for row in blk]
        R[i][i] = [[z] * n for _ in range(n)]
    return R


def certify_bismut_flat(g: InvariantMetric,
                        S: Optional[SamelsonStructure] = None) -> bool:
    R = bismut_curvature_exact(g, S)
    return all(x == 0 for ri in R for blk in ri for row in blk for x in row)


# ---------------------------------------------------------------------------
# diagnostics and the coupled su(3) x T^2 family


def biinvariance_residual(g: InvariantMetric) -> float:
    """max |g([x,y],z) + g(y,[x,z])| over basis triples; 0 iff bi-invariant."""
    L = g.algebra
    C = structure_array(L)
    Gm = metric_array(g)
    T = np.einsum("ija,ak->ijk", C, Gm)
    return float(np.abs(T + np.einsum("ikj->ijk", T)).max())


def su3_torus_family(alpha: float, beta: float, u=0.0):
    """Bismut-flat coupled metrics on su(3) + R^2.

    omega = alpha*omega_bf + beta*(i/2) psi^bar(psi)
            + u nu1^bar(psi) - bar(u) psi^bar(nu1)
    with omega_bf the fundamental form of the negative Killing form, psi the
    (1,0) covector of the abelian factor and nu1 the first (1,0) torus frame
    covector.  Positive-definite exactly when alpha, beta > 0 and
    alpha*beta > 4|u|^2.
    """
    u = complex(u)
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    if not alpha * beta > 4 * abs(u) ** 2:
        raise ValueError("alpha*beta must exceed 4|u|^2 for positivity")
    L = build_algebra("A2+T2")
    cd = cartan_decomposition(L)
    S = build_samelson_structure(cd)
    n = L.dimension
    r = cd.rank
    W, N = orthonormal_torus_frame(cd)
    Mf = np.array([[float(W[k][l]) / math.sqrt(float(N[l]))
                    for l in range(r)] for k in range(r)])
    Minv = np.linalg.inv(Mf)
    xi = np.zeros((r, n))
    for l in range(r):
        for k in range(r):
            xi[l, cd.torus_indices[k]] = Minv[l, k]
    Jm = j_array(S)
    nu1 = xi[0] - 1j * (Jm.T @ xi[0])
    pa = cd.abelian_coords[0]
    psi = xi[pa] - 1j * (Jm.T @ xi[pa])
    B = killing_form(L)
    Gbf = np.zeros((n, n))
    for i in L.factors[0]:
        for j in L.factors[0]:
            Gbf[i, j] = -float(B[i][j])
    skew = lambda a, b: np.outer(a, b) - np.outer(b, a)
    sigma = (0.5j * skew(psi, np.conj(psi))).real
    U = (u * skew(nu1, np.conj(psi)) - np.conj(u) * skew(psi, np.conj(nu1)))
    assert np.abs(U.imag).max() < 1e-12
    Om = alpha * (Jm.T @ Gbf) + beta * sigma + U.real
    Gm = Om @ Jm
    _check_metric(Gm, Jm)
    return S, as_metric(Gm, S)
