"""Exact Gaussian elimination over any field-like scalar type.

Matrices are plain lists of lists.  Entries only need +, -, *, / and ==;
Fraction and ExactScalar both qualify.  The additive zero is derived from
the matrix itself (x - x), so no type tokens are threaded through.
"""

from __future__ import annotations

__all__ = [
    "identity",
    "inv",
    "matmul",
    "matvec",
    "nullspace",
    "rank",
    "rref",
    "solve",
    "transpose",
]


def _zero_of(M):
    x = M[0][0]
    return x - x


def transpose(M):
    return [list(col) for col in zip(*M)]


def matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    assert len(A[0]) == k
    z = _zero_of(A)
    out = []
    for i in range(n):
        Ai = A[i]
        row = []
        for j in range(m):
            s = z
            for t in range(k):
                a = Ai[t]
                if a != z:
                    s = s + a * B[t][j]
            row.append(s)
        out.append(row)
    return out


def matvec(A, v):
    z = _zero_of(A)
    out = []
    for row in A:
        s = z
        for a, x in zip(row, v):
            if a != z:
                s = s + a * x
        out.append(s)
    return out


def identity(n, one):
    z = one - one
    return [[one if i == j else z for j in range(n)] for i in range(n)]


def rref(M):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = [list(row) for row in M]
    if not R:
        return R, []
    z = _zero_of(R)
    nrow, ncol = len(R), len(R[0])
    pivots = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, nrow) if R[i][c] != z), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        pv = R[r][c]
        R[r] = [x / pv for x in R[r]]
        for i in range(nrow):
            if i != r and R[i][c] != z:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == nrow:
            break
    return R, pivots


def rank(M):
    if not M or not M[0]:
        return 0
    return len(rref(M)[1])


def nullspace(M):
    """Basis of the right kernel, free variables set to one."""
    if not M or not M[0]:
        return []
    R, pivots = rref(M)
    z = _zero_of(M)
    one = None
    for row in R:
        for x in row:
            if x != z:
                one = x / x
                break
        if one is not None:
            break
    ncol = len(M[0])
    if one is None:
        one = _unit_like(M)
    free = [c for c in range(ncol) if c not in pivots]
    basis = []
    for f in free:
        v = [z] * ncol
        v[f] = one
        for r, c in enumerate(pivots):
            v[c] = -R[r][f]
        basis.append(v)
    return basis


def _unit_like(M):
    # all-zero matrix: synthesize 1 by probing the scalar type
    x = M[0][0]
    try:
        return x + 1 - x
    except TypeError:
        from samelson_lab.exact import exact

        return exact(1)


def solve(A, b, unique=True):
    """Solve A x = b for a vector b.

    Raises ValueError when inconsistent.  With unique=True also raises
    when the solution is not unique; otherwise returns one solution with
    free variables set to zero.
    """
    z = _zero_of(A)
    aug = [list(row) + [bb] for row, bb in zip(A, b)]
    R, pivots = rref(aug)
    ncol = len(A[0])
    if ncol in pivots:
        raise ValueError("inconsistent linear system")
    if unique and len(pivots) < ncol:
        raise ValueError("underdetermined linear system")
    x = [z] * ncol
    for r, c in enumerate(pivots):
        x[c] = R[r][ncol]
    return x


def inv(A):
    n = len(A)
    assert all(len(row) == n for row in A)
    z = _zero_of(A)
    one = None
    for row in A:
        for x in row:
            if x != z:
                one = x / x
                break
        if one is not None:
            break
    if one is None:
        raise ValueError("singular matrix")
    aug = [list(row) + ide for row, ide in zip(A, identity(n, one))]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in R]
