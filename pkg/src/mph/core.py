"""Graded sparse linear algebra over a prime field.

Grades are points of the 2-parameter index poset, stored as plain
``(x, y)`` float tuples under the product order (reversed-order axes are
negated upstream so the stored order is always the product order).
Matrices between free bigraded modules carry one grade per row and per
column and must be homogeneous: a nonzero entry at ``(i, j)`` requires
``row_grade[i] <= col_grade[j]`` in the product order.

Columns are sorted lists of ``(row_index, coeff)`` with strictly
increasing row indices and no zero coefficients; the pivot of a column is
its largest row index.
"""

from __future__ import annotations

DEFAULT_P = 2
MAX_P = 1 << 16

Grade = tuple  # (x, y) floats
Column = list  # [(row_index, coeff), ...] sorted by row index


class HomogeneityError(ValueError):
    """A matrix entry sits below the grade of its row."""


def check_prime(p):
    if not 2 <= p < MAX_P:
        raise ValueError(f"field order {p} out of range [2, {MAX_P})")
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise ValueError(f"field order {p} is not prime")
        d += 1
    return p


def inv_mod(a, p):
    return pow(a % p, p - 2, p)


def grade_leq(a, b):
    """Product partial order: a <= b iff both coordinates are <=."""
    return a[0] <= b[0] and a[1] <= b[1]


def grade_lt(a, b):
    return grade_leq(a, b) and a != b


def grade_join(a, b):
    return (max(a[0], b[0]), max(a[1], b[1]))


def colex_key(g):
    """Sort key for the colexicographic order: y first, then x."""
    return (g[1], g[0])


def colex_less(a, b):
    return colex_key(a) < colex_key(b)


def colex_compare(a, b):
    """-1, 0, or 1 comparing y first, then x; equal-grade ties are left
    to the caller's insertion order."""
    ka, kb = colex_key(a), colex_key(b)
    return -1 if ka < kb else (1 if ka > kb else 0)


# ---------------------------------------------------------------------------
# sparse column arithmetic

def col_pivot(col):
    """Largest row index of a column, or -1 if the column is zero."""
    return col[-1][0] if col else -1


def col_scale(col, lam, p):
    lam %= p
    if lam == 0:
        return []
    if lam == 1:
        return list(col)
    return [(r, (c * lam) % p) for r, c in col]


def col_add_scaled(a, b, lam, p):
    """Return a + lam*b, merging two sorted sparse columns."""
    lam %= p
    if lam == 0:
        return list(a)
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        ra, ca = a[i]
        rb, cb = b[j]
        if ra < rb:
            out.append((ra, ca))
            i += 1
        elif rb < ra:
            out.append((rb, (cb * lam) % p))
            j += 1
        else:
            c = (ca + cb * lam) % p
            if c:
                out.append((ra, c))
            i += 1
            j += 1
    out.extend(a[i:])
    for rb, cb in b[j:]:
        out.append((rb, (cb * lam) % p))
    return out


def col_from_dense(vec, p):
    return [(i, int(v) % p) for i, v in enumerate(vec) if int(v) % p]


def col_to_dense(col, n):
    out = [0] * n
    for r, c in col:
        out[r] = c
    return out


def unit_col(i, p=2):
    return [(i, 1)]


# ---------------------------------------------------------------------------

class GradedMatrix:
    """A sparse field-valued matrix with a grade per row and per column.

    Rows are kept in colexicographic order of their grades (ties broken by
    insertion order), and likewise for columns; ``build`` sorts arbitrary
    input into this canonical form.
    """

    __slots__ = ("p", "row_grades", "col_grades", "columns")

    def __init__(self, p, row_grades, col_grades, columns):
        self.p = p
        self.row_grades = row_grades
        self.col_grades = col_grades
        self.columns = columns

    @classmethod
    def build(cls, p, row_grades, col_grades, columns, validate=True):
        """Canonicalize row/column order and return a checked matrix.

        ``columns[j]`` may be any iterable of ``(row_index, coeff)`` pairs
        with row indices referring to the order of ``row_grades`` as given.
        """
        check_prime(p)
        row_perm = sorted(range(len(row_grades)),
                          key=lambda i: (colex_key(row_grades[i]), i))
        row_rank = [0] * len(row_grades)
        for new, old in enumerate(row_perm):
            row_rank[old] = new
        col_perm = sorted(range(len(col_grades)),
                          key=lambda j: (colex_key(col_grades[j]), j))
        new_rows = [tuple(row_grades[i]) for i in row_perm]
        new_cols = []
        new_columns = []
        for j in col_perm:
            new_cols.append(tuple(col_grades[j]))
            col = sorted((row_rank[r], c % p) for r, c in columns[j])
            col = [(r, c) for r, c in col if c]
            new_columns.append(col)
        m = cls(p, new_rows, new_cols, new_columns)
        if validate:
            m.validate()
        return m

    @property
    def nrows(self):
        return len(self.row_grades)

    @property
    def ncols(self):
        return len(self.col_grades)

    def validate(self):
        """Check sortedness, entry ranges, and homogeneity."""
        for grades in (self.row_grades, self.col_grades):
            keys = [colex_key(g) for g in grades]
            if any(keys[i] > keys[i + 1] for i in range(len(keys) - 1)):
                raise ValueError("grades not in colexicographic order")
        for j, col in enumerate(self.columns):
            gj = self.col_grades[j]
            prev = -1
            for r, c in col:
                if not 0 <= r < self.nrows:
                    raise ValueError(f"row index {r} out of range in column {j}")
                if r <= prev:
                    raise ValueError(f"column {j} rows not strictly increasing")
                prev = r
                if not 0 < c < self.p:
                    raise ValueError(f"coefficient {c} out of range in column {j}")
                if not grade_leq(self.row_grades[r], gj):
                    raise HomogeneityError(
                        f"entry ({r}, {j}): row grade {self.row_grades[r]} "
                        f"not <= column grade {gj}")
        return self

    def column_dense(self, j):
        return col_to_dense(self.columns[j], self.nrows)

    def to_dense(self):
        import numpy as np
        a = np.zeros((self.nrows, self.ncols), dtype=np.int64)
        for j, col in enumerate(self.columns):
            for r, c in col:
                a[r, j] = c
        return a

    def copy(self):
        return GradedMatrix(self.p, list(self.row_grades),
                            list(self.col_grades),
                            [list(c) for c in self.columns])

    def __eq__(self, other):
        return (isinstance(other, GradedMatrix) and self.p == other.p
                and self.row_grades == other.row_grades
                and self.col_grades == other.col_grades
                and self.columns == other.columns)

    def __repr__(self):
        return (f"GradedMatrix(p={self.p}, {self.nrows}x{self.ncols})")


def identity_matrix(p, grades):
    return GradedMatrix(p, list(grades), list(grades),
                        [[(i, 1)] for i in range(len(grades))])


def matmul(a: GradedMatrix, b: GradedMatrix) -> GradedMatrix:
    """Product a·b of graded matrices over the same field."""
    if a.p != b.p:
        raise ValueError("field mismatch")
    if a.ncols != b.nrows:
        raise ValueError("shape mismatch")
    cols = []
    for j in range(b.ncols):
        acc = []
        for r, c in b.columns[j]:
            acc = col_add_scaled(acc, a.columns[r], c, a.p)
        cols.append(acc)
    return GradedMatrix(a.p, list(a.row_grades), list(b.col_grades), cols)


# ---------------------------------------------------------------------------
# reductions

def rank_of_columns(columns, p):
    """Rank over F_p of a list of sparse columns (grades ignored)."""
    reduced = []  # pivot -> column, kept as dict
    pivots = {}
    rank = 0
    for col in columns:
        cur = list(col)
        while cur:
            piv = cur[-1][0]
            other = pivots.get(piv)
            if other is None:
                break
            lam = (-cur[-1][1] * inv_mod(other[-1][1], p)) % p
            cur = col_add_scaled(cur, other, lam, p)
        if cur:
            pivots[cur[-1][0]] = cur
            rank += 1
    return rank


def reduce(m: GradedMatrix, track_combinations=False):
    """Bigraded column reduction: one pass in colexicographic column order.

    Each column is repeatedly reduced against earlier columns whose grade
    is <= its own grade (so homogeneity is preserved) until its pivot is
    free among such columns.  With ``track_combinations`` a slave matrix
    records, per output column, the combination of input columns that
    produced it; slave columns inherit the master column's grade.

    Returns ``(reduced, slave)``; ``slave`` is None unless requested.
    """
    m.validate()
    p = m.p
    cols = [list(c) for c in m.columns]
    slave = [[(j, 1)] for j in range(m.ncols)] if track_combinations else None
    by_pivot = {}  # pivot row -> list of earlier column indices
    for j in range(m.ncols):
        gj = m.col_grades[j]
        cur = cols[j]
        while cur:
            piv = cur[-1][0]
            src = None
            for i in by_pivot.get(piv, ()):
                if grade_leq(m.col_grades[i], gj):
                    src = i
                    break
            if src is None:
                break
            lam = (-cur[-1][1] * inv_mod(cols[src][-1][1], p)) % p
            cur = col_add_scaled(cur, cols[src], lam, p)
            if track_combinations:
                slave[j] = col_add_scaled(slave[j], slave[src], lam, p)
        cols[j] = cur
        if cur:
            by_pivot.setdefault(cur[-1][0], []).append(j)
    out = GradedMatrix(p, list(m.row_grades), list(m.col_grades), cols)
    out.validate()
    slave_m = None
    if track_combinations:
        slave_m = GradedMatrix(p, list(m.col_grades), list(m.col_grades), slave)
    return out, slave_m
