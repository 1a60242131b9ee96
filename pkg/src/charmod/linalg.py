"""Exact linear algebra over the rationals and the integers.

Matrices are lists of rows; entries are ``Fraction`` or ``int``.  Everything
here is small-scale (ambient dimension at most a handful), so plain Gaussian
elimination is used throughout.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vector = tuple
Matrix = list


def frac(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            den_i = int(den)
            if den_i == 0:
                raise ZeroDivisionError(f"zero denominator in {value!r}")
            return Fraction(int(num), den_i)
        return Fraction(int(text))
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form. Returns ``(rows, pivot_columns)``."""
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return [], []
    n = len(mat[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(n):
        if r == len(mat):
            break
        p = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    return mat[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple]:
    """Basis of the right null space ``{x : A x = 0}``."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, p in zip(red, pivots):
            vec[p] = -row[f]
        basis.append(tuple(vec))
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> tuple | None:
    """One solution of ``A x = b`` (free variables zero), or None."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return tuple(x)


def det(rows: Sequence[Sequence]) -> Fraction:
    mat = [[Fraction(x) for x in row] for row in rows]
    n = len(mat)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if mat[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            mat[c], mat[p] = mat[p], mat[c]
            result = -result
        result *= mat[c][c]
        for i in range(c + 1, n):
            if mat[i][c] != 0:
                f = mat[i][c] / mat[c][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[c])]
    return result


def inverse(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(c) for c in zip(*a)]


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def primitive(vec: Sequence) -> tuple[int, ...]:
    """Positive multiple of a rational vector with coprime integer entries."""
    fr = [Fraction(x) for x in vec]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


def scale_to_integers(vec: Sequence) -> tuple[tuple[int, ...], Fraction]:
    """Return ``(ints, factor)`` with ``ints = factor * vec`` primitive, factor > 0."""
    prim = primitive(vec)
    idx = next(i for i, x in enumerate(prim) if x != 0)
    return prim, Fraction(prim[idx]) / Fraction(vec[idx])


# ---------------------------------------------------------------- integers

def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def column_echelon(rows: Sequence[Sequence[int]], ncols: int):
    """Unimodular column reduction ``A U = [L | 0]``.

    Returns ``(U, r)`` where ``U`` is an integer unimodular ``ncols x ncols``
    matrix (as a list of rows) and ``r`` is the rank of ``A``.  Columns
    ``r..ncols-1`` of ``U`` are a basis of the integer kernel lattice.
    """
    a = [[int(x) for x in row] for row in rows]
    u = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def colop(j, k, p, q, s, t):
        # (col_j, col_k) <- (p col_j + q col_k, s col_j + t col_k)
        for mat in (a, u):
            for row in mat:
                cj, ck = row[j], row[k]
                row[j], row[k] = p * cj + q * ck, s * cj + t * ck

    r = 0
    for i in range(len(a)):
        if r == ncols:
            break
        for k in range(r + 1, ncols):
            if a[i][k] == 0:
                continue
            x, y = a[i][r], a[i][k]
            g, p, q = _ext_gcd(x, y)
            colop(r, k, p, q, -y // g, x // g)
        if a[i][r] != 0:
            if a[i][r] < 0:
                for mat in (a, u):
                    for row in mat:
                        row[r] = -row[r]
            r += 1
    return u, r


def integer_kernel(rows: Sequence[Sequence], ncols: int) -> list[tuple[int, ...]]:
    """Basis of ``{x in Z^n : A x = 0}`` for a rational matrix ``A``,
    canonicalised to Hermite normal form (rows of the result)."""
    int_rows = [primitive(r) for r in rows if any(Fraction(x) != 0 for x in r)]
    u, r = column_echelon(int_rows, ncols)
    basis = [tuple(u[i][j] for i in range(ncols)) for j in range(r, ncols)]
    return hermite_rows(basis)


def hermite_rows(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form of a list of integer vectors (same lattice)."""
    mat = [list(v) for v in vectors]
    if not mat:
        return []
    n = len(mat[0])
    out = []
    row = 0
    for c in range(n):
        if row == len(mat):
            break
        for i in range(row + 1, len(mat)):
            while mat[i][c] != 0:
                if mat[row][c] == 0 or abs(mat[i][c]) < abs(mat[row][c]):
                    mat[row], mat[i] = mat[i], mat[row]
                    continue
                q = mat[i][c] // mat[row][c]
                mat[i] = [a - q * b for a, b in zip(mat[i], mat[row])]
        if mat[row][c] == 0:
            continue
        if mat[row][c] < 0:
            mat[row] = [-a for a in mat[row]]
        for i in range(row):
            q = mat[i][c] // mat[row][c]
            if q:
                mat[i] = [a - q * b for a, b in zip(mat[i], mat[row])]
        row += 1
    out = [tuple(r) for r in mat[:row]]
    return out


def unimodular_completion(basis: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Square unimodular matrix (rows) whose first rows are ``basis``.

    ``basis`` must span a saturated sublattice of ``Z^n``.
    """
    k = len(basis)
    if k == 0:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    # the kernel of basis^T-pairing gives a complement via the column echelon
    u, r = column_echelon(basis, ncols)
    # basis * U = [L | 0] with L lower triangular, unimodular since saturated
    uinv = inverse(u)
    rows = [list(b) for b in basis]
    # rows r..n-1 of U^{-1} complete ``basis`` to a unimodular matrix
    for j in range(r, ncols):
        rows.append([int(x) for x in uinv[j]])
    if abs(det(rows)) != 1:
        raise ValueError("basis does not span a saturated lattice")
    return rows
