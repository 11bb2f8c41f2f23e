"""Exact linear algebra helpers: rational elimination, integer Smith form.

Everything works on plain lists/dicts of Fractions or ints.  Matrices are
small (desk scale), so the cubic algorithms are fine; the sparse span is the
one structure tuned a little because the filtration layer checks push a few
thousand mostly-empty rows through it.
"""

from __future__ import annotations

import math
from fractions import Fraction


# ------------------------------------------------------------ dense over Q

def rref(rows):
    """Row-reduce a list of Fraction lists in place; returns pivot columns."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    del rows[r:]
    return pivots


def nullspace(rows, ncols):
    """Basis of the right nullspace of the matrix (list of Fraction lists)."""
    work = [list(map(Fraction, row)) for row in rows]
    pivots = rref(work)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -work[r][fc]
        basis.append(vec)
    return basis


def span_equal(rows_a, rows_b, ncols):
    """Do two families of row vectors span the same subspace of Q^ncols?"""
    a = [list(map(Fraction, r)) for r in rows_a]
    b = [list(map(Fraction, r)) for r in rows_b]
    rref(a)
    rref(b)
    return a == b


def solve_combination(rows, target):
    """Coefficients expressing target as a combination of rows, or None."""
    n = len(rows)
    if n == 0:
        return [] if not any(target) else None
    width = len(target)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(rows)]
    pivots = []
    r = 0
    for col in range(width):
        sel = next((i for i in range(r, n) if aug[i][col] != 0), None)
        if sel is None:
            continue
        aug[r], aug[sel] = aug[sel], aug[r]
        pv = aug[r][col]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(n):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append((col, r))
        r += 1
        if r == n:
            break
    t = list(map(Fraction, target))
    comb = [Fraction(0)] * n
    for col, ri in pivots:
        if t[col] != 0:
            f = t[col]
            row = aug[ri]
            t = [a - f * b for a, b in zip(t, row[:width])]
            comb = [a + f * b for a, b in zip(comb, row[width:])]
    if any(v != 0 for v in t):
        return None
    return comb


class SparseSpan:
    """Incrementally built row space with membership tests.

    Rows are dicts column-key -> Fraction.  Columns can be any hashable key
    (we use monomial tuples).  `add` reduces and inserts, `contains` only
    reduces.
    """

    def __init__(self):
        self.pivot_rows = {}  # pivot column key -> reduced row dict

    def _reduce(self, row):
        row = {k: Fraction(v) for k, v in row.items() if v != 0}
        while row:
            # deterministic pivot choice: smallest key repr
            hit = None
            for k in row:
                if k in self.pivot_rows:
                    hit = k
                    break
            if hit is None:
                return row
            fac = row[hit]
            for k, v in self.pivot_rows[hit].items():
                nv = row.get(k, 0) - fac * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return row

    def add(self, row) -> bool:
        """Insert a row; returns True when it enlarged the span."""
        red = self._reduce(row)
        if not red:
            return False
        piv = min(red, key=repr)
        inv = 1 / red[piv]
        red = {k: v * inv for k, v in red.items()}
        self.pivot_rows[piv] = red
        return True

    def contains(self, row) -> bool:
        return not self._reduce(row)

    def dim(self) -> int:
        return len(self.pivot_rows)


# ------------------------------------------------------------ over Z

def smith_normal_form(mat):
    """Nonzero elementary divisors of an integer matrix, in chain order."""
    if not mat or not mat[0]:
        return []
    _, d, _ = smith_with_transforms(mat)
    return [abs(d[i][i]) for i in range(min(len(d), len(d[0]))) if d[i][i]]


def smith_with_transforms(mat):
    """(U, D, V) with U*mat*V = D in Smith form, U and V unimodular."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    a = [list(map(int, row)) for row in mat]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(i, k, q):  # row i -= q * row k
        a[i] = [x - q * y for x, y in zip(a[i], a[k])]
        u[i] = [x - q * y for x, y in zip(u[i], u[k])]

    def col_op(j, k, q):  # col j -= q * col k
        for row in a:
            row[j] -= q * row[k]
        for row in v:
            row[j] -= q * row[k]

    def row_swap(i, k):
        a[i], a[k] = a[k], a[i]
        u[i], u[k] = u[k], u[i]

    def col_swap(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in v:
            row[j], row[k] = row[k], row[j]

    r = 0
    while r < min(m, n):
        found = None
        for i in range(r, m):
            for j in range(r, n):
                if a[i][j]:
                    found = (i, j)
                    break
            if found:
                break
        if not found:
            break
        i, j = found
        if i != r:
            row_swap(r, i)
        if j != r:
            col_swap(r, j)
        while True:
            done = True
            for i in range(m):
                if i != r and a[i][r]:
                    row_op(i, r, a[i][r] // a[r][r])
                    if a[i][r]:
                        row_swap(r, i)
                        done = False
            for j in range(n):
                if j != r and a[r][j]:
                    col_op(j, r, a[r][j] // a[r][r])
                    if a[r][j]:
                        col_swap(r, j)
                        done = False
            if done:
                break
        if a[r][r] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        r += 1
    # divisibility chain, keeping transforms in sync
    for _ in range(r):
        for i in range(r - 1):
            x, y = a[i][i], a[i + 1][i + 1]
            if x and y % x:
                # standard 2x2 trick: add col i+1 to col i, then reduce
                col_op(i, i + 1, -1)
                while True:
                    done = True
                    for ii in range(m):
                        if ii != i and a[ii][i]:
                            row_op(ii, i, a[ii][i] // a[i][i])
                            if a[ii][i]:
                                row_swap(i, ii)
                                done = False
                    for jj in range(n):
                        if jj != i and a[i][jj]:
                            col_op(jj, i, a[i][jj] // a[i][i])
                            if a[i][jj]:
                                col_swap(i, jj)
                                done = False
                    if done:
                        break
                if a[i][i] < 0:
                    a[i] = [-x for x in a[i]]
                    u[i] = [-x for x in u[i]]
                if a[i + 1][i + 1] < 0:
                    a[i + 1] = [-x for x in a[i + 1]]
                    u[i + 1] = [-x for x in u[i + 1]]
    return u, a, v


def integer_kth_root(n: int, k: int):
    """Exact k-th root of a nonnegative integer, or None."""
    if n < 0 or k < 1:
        raise ValueError("bad root arguments")
    if n in (0, 1) or k == 1:
        return n
    lo, hi = 0, 1
    while hi ** k <= n:
        hi *= 2
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if mid ** k <= n:
            lo = mid
        else:
            hi = mid
    return lo if lo ** k == n else None


def rational_kth_root(q: Fraction, k: int):
    """Exact k-th root of a rational, or None when it is irrational."""
    if k < 1:
        raise ValueError("bad root order")
    if q == 0:
        return Fraction(0)
    neg = q < 0
    if neg and k % 2 == 0:
        return None
    num = integer_kth_root(abs(q.numerator), k)
    den = integer_kth_root(q.denominator, k)
    if num is None or den is None:
        return None
    root = Fraction(num, den)
    return -root if neg else root


def rational_roots(coeffs):
    """All rational roots of sum coeffs[i] * T^i, coefficients rational.

    Uses the rational root bound on the integer-cleared polynomial; the
    zero polynomial is rejected rather than reporting everything.
    """
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial has every root")
    if len(coeffs) == 1:
        return []
    scale = 1
    for c in coeffs:
        scale = scale * c.denominator // math.gcd(scale, c.denominator)
    ints = [int(c * scale) for c in coeffs]
    low = 0
    while ints[low] == 0:
        low += 1
    roots = [Fraction(0)] if low > 0 else []
    a0, an = abs(ints[low]), abs(ints[-1])
    for p in _divisors(a0):
        for q in _divisors(an):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand in roots:
                    continue
                if sum(c * cand ** i for i, c in enumerate(coeffs)) == 0:
                    roots.append(cand)
    return roots


def _divisors(n: int):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)
