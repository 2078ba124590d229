"""Exact integer matrix routines: Smith normal form, kernels, linear solving.

Dense lists of Python ints; sizes here are desk scale, exactness is the point.
"""

from __future__ import annotations

Matrix = list[list[int]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    M = zeros(n, n)
    for i in range(n):
        M[i][i] = 1
    return M


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A or not B:
        return [[0] * (len(B[0]) if B else 0) for _ in range(len(A))]
    n, k, m = len(A), len(B), len(B[0])
    out = zeros(n, m)
    for i in range(n):
        Ai = A[i]
        for t in range(k):
            a = Ai[t]
            if a:
                Bt = B[t]
                row = out[i]
                for j in range(m):
                    row[j] += a * Bt[j]
    return out


def transpose(A: Matrix) -> Matrix:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def smith_normal_form(A: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """(D, L, R) with D = L A R, L and R unimodular, D diagonal with
    d1 | d2 | ... nonnegative."""
    m = len(A)
    n = len(A[0]) if A else 0
    D = [row[:] for row in A]
    L = identity(m)
    R = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row dst += k * row src
        D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
        L[dst] = [a + k * b for a, b in zip(L[dst], L[src])]

    def add_col(dst, src, k):
        for row in D:
            row[dst] += k * row[src]
        for row in R:
            row[dst] += k * row[src]

    def negate_row(i):
        D[i] = [-a for a in D[i]]
        L[i] = [-a for a in L[i]]

    s = 0
    while s < min(m, n):
        # pivot: nonzero entry of least absolute value in the remaining block
        piv = None
        best = None
        for i in range(s, m):
            for j in range(s, n):
                v = abs(D[i][j])
                if v and (best is None or v < best):
                    best, piv = v, (i, j)
        if piv is None:
            break
        i, j = piv
        if i != s:
            swap_rows(s, i)
        if j != s:
            swap_cols(s, j)
        if D[s][s] < 0:
            negate_row(s)
        dirty = False
        for i in range(s + 1, m):
            if D[i][s]:
                q = D[i][s] // D[s][s]
                add_row(i, s, -q)
                if D[i][s]:
                    dirty = True
        for j in range(s + 1, n):
            if D[s][j]:
                q = D[s][j] // D[s][s]
                add_col(j, s, -q)
                if D[s][j]:
                    dirty = True
        if dirty:
            continue
        # divisibility: fold in any entry the pivot does not divide
        offender = None
        for i in range(s + 1, m):
            for j in range(s + 1, n):
                if D[i][j] % D[s][s]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(s, offender, 1)
            continue
        s += 1
    return D, L, R


def snf_diagonal(A: Matrix) -> list[int]:
    D, _, _ = smith_normal_form(A)
    out = []
    for k in range(min(len(D), len(D[0]) if D else 0)):
        out.append(abs(D[k][k]))
    return out


def kernel_basis(A: Matrix) -> list[list[int]]:
    """Columns forming a basis of the integer kernel lattice of A."""
    if not A or not A[0]:
        n = len(A[0]) if A else 0
        return [list(col) for col in identity(n)] if n else []
    D, L, R = smith_normal_form(A)
    n = len(A[0])
    m = len(A)
    basis = []
    for j in range(n):
        dj = D[j][j] if j < min(m, n) else 0
        if dj == 0:
            basis.append([R[i][j] for i in range(n)])
    return basis


def solve(A: Matrix, b: list[int]) -> list[int] | None:
    """An integral solution x of A x = b, or None."""
    m = len(A)
    n = len(A[0]) if A else 0
    if n == 0:
        return [] if all(v == 0 for v in b) else None
    D, L, R = smith_normal_form(A)
    c = [sum(L[i][k] * b[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        d = D[i][i] if i < min(m, n) else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            if i < n:
                y[i] = c[i] // d
    return [sum(R[i][k] * y[k] for k in range(n)) for i in range(n)]


def hstack(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return [row[:] for row in B]
    if not B:
        return [row[:] for row in A]
    return [ra + rb for ra, rb in zip(A, B)]


def invariant_factors(relations: Matrix, rank: int) -> tuple[int, ...]:
    """Invariant factors of Z^rank / column span: the >1 torsion factors
    followed by one 0 per free summand."""
    if rank == 0:
        return ()
    if not relations or not relations[0]:
        return (0,) * rank
    diag = snf_diagonal(relations)
    torsion = [d for d in diag if d > 1]
    rk = sum(1 for d in diag if d != 0)
    free = rank - rk
    return tuple(torsion) + (0,) * free
