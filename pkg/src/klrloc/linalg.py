"""Exact linear algebra over Q, plus the few Q[z]-matrix utilities we need.

Matrices are lists of lists of Fractions (dense) unless stated otherwise.
The sparse solver used by the homomorphism machinery works on rows stored
as {column: Fraction} dicts.
"""

from __future__ import annotations

from fractions import Fraction

from .rings import ZPoly


def zeros(rows, cols, ring=None):
    z = Fraction(0) if ring is None else ring.zero()
    return [[z for _ in range(cols)] for _ in range(rows)]


def identity(n, ring=None):
    one = Fraction(1) if ring is None else ring.one()
    m = zeros(n, n, ring)
    for i in range(n):
        m[i][i] = one
    return m


def mat_mul(a, b):
    if not a or not b:
        return []
    n, k, m = len(a), len(b), len(b[0])
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(m):
                    if bt[j]:
                        oi[j] = oi[j] + c * bt[j]
    zero = Fraction(0)
    for i in range(n):
        for j in range(m):
            if out[i][j] == 0:
                out[i][j] = zero
    return out


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a):
    return [[c * x for x in row] for row in a]


def mat_vec(a, v):
    return [sum((c * x for c, x in zip(row, v) if c and x), Fraction(0)) for row in a]


def transpose(a):
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def is_zero_matrix(a):
    return all(all(not x for x in row) for row in a)


def rref(mat):
    """Row-reduce a copy of mat; returns (rref_rows, pivot_columns)."""
    m = [list(row) for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pr = None
        for i in range(r, rows):
            if m[i][c]:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [x / pv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(mat):
    if not mat or not mat[0]:
        return 0
    return len(rref(mat)[1])


def nullspace(mat, ncols=None):
    """Basis of the right kernel of mat (list of column vectors)."""
    if ncols is None:
        ncols = len(mat[0]) if mat else 0
    if not mat:
        return [[Fraction(1) if i == j else Fraction(0) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(mat)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(mat, rhs):
    """One solution x of mat @ x = rhs, or None if inconsistent."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    aug = [list(mat[i]) + [rhs[i]] for i in range(rows)]
    red, pivots = rref(aug)
    for r in range(len(pivots), rows):
        if red[r][cols]:
            return None
    if pivots and pivots[-1] == cols:
        return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


def inverse(mat):
    n = len(mat)
    aug = [list(mat[i]) + [Fraction(1) if j == i else Fraction(0) for j in range(n)] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in red]


def row_space_basis(rows):
    """Basis (in rref form) of the span of the given row vectors."""
    if not rows:
        return []
    red, pivots = rref(rows)
    return [red[i] for i in range(len(pivots))]


def in_row_space(basis_rref, pivots, vec):
    """Reduce vec against an rref basis; returns the residual vector."""
    v = list(vec)
    for row, pc in zip(basis_rref, pivots):
        if v[pc]:
            f = v[pc]
            v = [x - f * y for x, y in zip(v, row)]
    return v


class SpanBuilder:
    """Incremental row-space builder with exact reduction."""

    def __init__(self, dim):
        self.dim = dim
        self.rows = []
        self.pivots = []

    def add(self, vec):
        """Add vec to the span; returns True if it enlarged the span."""
        v = list(vec)
        for row, pc in zip(self.rows, self.pivots):
            if v[pc]:
                f = v[pc]
                v = [x - f * y for x, y in zip(v, row)]
        for c in range(self.dim):
            if v[c]:
                pv = v[c]
                v = [x / pv for x in v]
                # keep rows reduced against the new row
                for i, (row, pc) in enumerate(zip(self.rows, self.pivots)):
                    if row[c]:
                        f = row[c]
                        self.rows[i] = [x - f * y for x, y in zip(row, v)]
                self.rows.append(v)
                self.pivots.append(c)
                order = sorted(range(len(self.pivots)), key=lambda i: self.pivots[i])
                self.rows = [self.rows[i] for i in order]
                self.pivots = [self.pivots[i] for i in order]
                return True
        return False

    def contains(self, vec):
        v = list(vec)
        for row, pc in zip(self.rows, self.pivots):
            if v[pc]:
                f = v[pc]
                v = [x - f * y for x, y in zip(v, row)]
        return all(not x for x in v)

    def rank(self):
        return len(self.rows)


def sparse_nullspace(rows, ncols):
    """Right kernel basis for a system given as sparse rows {col: coeff}."""
    # Gaussian elimination on sparse rows.
    work = []
    for row in rows:
        r = {c: v for c, v in row.items() if v}
        if r:
            work.append(r)
    pivots = {}  # col -> fully reduced row (rref invariant)
    for r in work:
        r = dict(r)
        # fully reduce against every existing pivot column
        while True:
            hit = None
            for k in r:
                if k in pivots:
                    hit = k
                    break
            if hit is None:
                break
            f = r[hit]
            for pc, pv in pivots[hit].items():
                nv = r.get(pc, Fraction(0)) - f * pv
                if nv:
                    r[pc] = nv
                else:
                    r.pop(pc, None)
        if not r:
            continue
        c = min(r)
        pv = r[c]
        if pv != 1:
            r = {k: v / pv for k, v in r.items()}
        # back-substitute into existing pivot rows
        for oc, orow in list(pivots.items()):
            if c in orow:
                f = orow[c]
                for k, v in r.items():
                    nv = orow.get(k, Fraction(0)) - f * v
                    if nv:
                        orow[k] = nv
                    else:
                        orow.pop(k, None)
        pivots[c] = r
    pivcols = set(pivots)
    free = [c for c in range(ncols) if c not in pivcols]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for pc, prow in pivots.items():
            if fc in prow:
                v[pc] = -prow[fc]
        basis.append(v)
    return basis


def solve_right_factor(A, B):
    """Solve X . A = B (all over Q); returns X or None if inconsistent.

    A: (m x n), B: (p x n) -> X: (p x m).  Solved via A^T X^T = B^T with a
    single row reduction of the augmented matrix.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    p = len(B)
    At = transpose(A)  # n x m
    Bt = transpose(B)  # n x p
    aug = [list(At[i]) + list(Bt[i]) for i in range(n)]
    red, pivots = rref(aug)
    for r in range(len(pivots), n):
        if any(red[r][m:]):
            return None
    if pivots and pivots[-1] >= m:
        return None
    Xt = [[Fraction(0)] * p for _ in range(m)]
    for r, pc in enumerate(pivots):
        for j in range(p):
            Xt[pc][j] = red[r][m + j]
    return transpose(Xt)


# ---------------------------------------------------------------------------
# Q[z] matrices

def zmat_valuation(mat):
    """Minimum z-adic valuation over all entries; None if the matrix is zero."""
    val = None
    for row in mat:
        for e in row:
            if isinstance(e, ZPoly):
                v = e.valuation()
            else:
                v = 0 if e else None
            if v is not None:
                val = v if val is None else min(val, v)
    return val


def zmat_shift_down(mat, s):
    out = []
    for row in mat:
        out.append([e.shift_down(s) if isinstance(e, ZPoly) else e for e in row])
    return out


def zmat_at_zero(mat):
    return [[e.at_zero() if isinstance(e, ZPoly) else Fraction(e) for e in row] for row in mat]


def zmat_eval(mat, value):
    return [[e.eval(value) if isinstance(e, ZPoly) else Fraction(e) for e in row] for row in mat]


def zmat_injective(mat, ncols):
    """Exact injectivity test for a Q[z]-matrix acting on a free module.

    The matrix is injective over Q[z] iff its rank over the fraction field
    Q(z) equals ncols; the rank is detected by evaluating at enough rational
    points (a maximal minor is a nonzero polynomial of bounded degree).
    """
    if ncols == 0:
        return True
    maxdeg = 0
    for row in mat:
        for e in row:
            if isinstance(e, ZPoly) and e.coeffs:
                maxdeg = max(maxdeg, len(e.coeffs) - 1)
    bound = ncols * maxdeg + 1
    for t in range(1, bound + 2):
        if rank(zmat_eval(mat, Fraction(t))) == ncols:
            return True
    return False
