"""Exact rational and integer linear algebra.

Matrices are plain lists of lists of ``Fraction`` (or ``int``).  Nothing
here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def frac(x) -> Fraction:
    """Parse ``int``, ``Fraction`` or a ``"p/q"`` string into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[frac(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(n: int, m: int) -> Matrix:
    return [[Fraction(0)] * m for _ in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def rref(a) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[frac(x) for x in row] for row in a]
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a) -> int:
    return len(rref(a)[1])


def nullspace(a, ncols: int | None = None) -> Matrix:
    """Basis (as a list of vectors) of the right kernel of ``a``."""
    if not a:
        n = ncols or 0
        return identity(n)
    n = len(a[0])
    m, pivots = rref(a)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -m[r][f]
        basis.append(v)
    return basis


def det(a) -> Fraction:
    m = [[frac(x) for x in row] for row in a]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def inverse(a) -> Matrix:
    n = len(a)
    aug = [list(map(frac, row)) + e for row, e in zip(a, identity(n))]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in m]


def solve(a, b) -> list[Fraction] | None:
    """One rational solution of ``a x = b`` or None."""
    n = len(a[0])
    m, pivots = rref([list(row) + [frac(y)] for row, y in zip(a, b)])
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, p in enumerate(pivots):
        x[p] = m[r][n]
    return x


def signature(a) -> tuple[int, int]:
    """(positive, negative) inertia of a symmetric matrix by congruence."""
    m = [[frac(x) for x in row] for row in a]
    n = len(m)
    pos = neg = 0
    for k in range(n):
        p = next((i for i in range(k, n) if m[i][i] != 0), None)
        if p is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if m[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j gives diagonal entry 2 m[i][j] != 0
            m[i] = [x + y for x, y in zip(m[i], m[j])]
            for row in m:
                row[i] += row[j]
            p = i
        m[k], m[p] = m[p], m[k]
        for row in m:
            row[k], row[p] = row[p], row[k]
        piv = m[k][k]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = m[i][k] / piv
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
                for row in m:
                    row[i] -= f * row[k]
    return pos, neg


def integer_nth_root(x: int, n: int) -> int | None:
    """Exact non-negative integer n-th root of ``x >= 0`` or None."""
    if x < 0:
        raise ValueError("negative radicand")
    if x < 2:
        return x
    r = int(round(x ** (1.0 / n))) if x.bit_length() < 1000 else 1 << (x.bit_length() // n)
    # Newton polish, then local search
    for _ in range(200):
        nr = ((n - 1) * r + x // (r ** (n - 1))) // n
        if nr >= r:
            break
        r = nr
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** n == x:
            return c
    return None


def rational_odd_root(x: Fraction, n: int) -> Fraction | None:
    """Real n-th root of ``x`` (n odd) when it is rational."""
    if n % 2 == 0:
        raise ValueError("odd roots only")
    s = -1 if x < 0 else 1
    p = integer_nth_root(abs(x.numerator), n)
    q = integer_nth_root(x.denominator, n)
    if p is None or q is None:
        return None
    return Fraction(s * p, q)


# --- integer lattices ------------------------------------------------------


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (U, D, V) with U @ a @ V == D, U and V unimodular, D diagonal.

    Diagonal entries are non-negative and each divides the next.
    """
    m = [[int(x) for x in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        m[dst] = [x - f * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x - f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for row in m:
            row[dst] -= f * row[src]
        for row in v:
            row[dst] -= f * row[src]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(m[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if m[i][j] != 0]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    add_row(i, t, q)
                    if m[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    add_col(j, t, q)
                    if m[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: pivot must divide the remaining block
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if m[i][j] % m[t][t]), None)
            if bad is None:
                break
            i, _ = bad
            add_row(t, i, -1)
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, m, v


def int_matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def int_inverse_unimodular(a) -> list[list[int]]:
    inv = inverse(a)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def hermite_rows(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form basis of the lattice spanned by ``vectors``.

    Canonical: two generating sets of the same lattice give the same output.
    """
    m = [list(map(int, v)) for v in vectors if any(v)]
    if not m:
        return []
    n = len(m[0])
    out: list[list[int]] = []
    col = 0
    while m and col < n:
        nz = [r for r in m if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len([r for r in m if r[col] != 0]) > 1:
            nz = sorted((r for r in m if r[col] != 0), key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for k in range(n):
                    r[k] -= q * piv[k]
        piv = next(r for r in m if r[col] != 0)
        if piv[col] < 0:
            piv[:] = [-x for x in piv]
        m.remove(piv)
        m = [r for r in m if any(r)]
        out.append(piv)
        col += 1
    # reduce entries above pivots
    for i, row in enumerate(out):
        c = next(k for k, x in enumerate(row) if x)
        for j in range(i):
            q = out[j][c] // row[c]
            out[j] = [x - q * y for x, y in zip(out[j], row)]
    return [tuple(r) for r in out]


def integer_kernel(a: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis of the saturated lattice ``{x in Z^n : a x = 0}``."""
    if not a:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    _, d, v = smith_normal_form(a)
    r = sum(1 for i in range(min(len(d), ncols)) if d[i][i] != 0)
    return [[v[i][j] for i in range(ncols)] for j in range(r, ncols)]


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """One integer solution of ``a x = b`` or None."""
    rows = len(a)
    if rows == 0:
        return []
    cols = len(a[0])
    u, d, v = smith_normal_form(a)
    c = [sum(u[i][k] * b[k] for k in range(rows)) for i in range(rows)]
    y = [0] * cols
    for i in range(rows):
        di = d[i][i] if i < cols else 0
        if di == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % di:
                return None
            y[i] = c[i] // di
    return [sum(v[i][k] * y[k] for k in range(cols)) for i in range(cols)]
