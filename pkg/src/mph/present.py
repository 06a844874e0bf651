"""Minimal presentations, minimal resolutions, and bigraded Betti numbers.

The workhorse is a grade-by-grade column reduction of a homogeneous
matrix: grid rows (y-values) are swept in increasing order, and within
each sweep every live column re-enters at its own x-grade, where the
restriction of the product order to the sweep row is total.  A column
dying at sweep position ``(x, y)`` witnesses a kernel basis element at
that grade; a column surviving the sweep of its own grade is a minimal
generator of the image.
"""

from __future__ import annotations

from .core import GradedMatrix, col_add_scaled, inv_mod, matmul


class Presentation:
    """A homogeneous relations matrix presenting a bipersistence module.

    Rows are generators, columns are relations; the module is the
    cokernel.  ``axes`` names the two parameters and ``dirs`` records, per
    axis, whether stored values are the raw parameter (``+``) or its
    negation (``-``, for reversed-order axes).
    """

    __slots__ = ("matrix", "hom_degree", "axes", "dirs")

    def __init__(self, matrix: GradedMatrix, hom_degree=0,
                 axes=("x", "y"), dirs=("+", "+")):
        self.matrix = matrix
        self.hom_degree = hom_degree
        self.axes = tuple(axes)
        self.dirs = tuple(dirs)

    @property
    def p(self):
        return self.matrix.p

    @property
    def row_grades(self):
        return self.matrix.row_grades

    @property
    def col_grades(self):
        return self.matrix.col_grades

    def copy(self):
        return Presentation(self.matrix.copy(), self.hom_degree,
                            self.axes, self.dirs)

    def is_minimal(self):
        """No nonzero entry joins a row and a column of equal grade."""
        for j, col in enumerate(self.matrix.columns):
            gj = self.matrix.col_grades[j]
            for r, _ in col:
                if self.matrix.row_grades[r] == gj:
                    return False
        return True

    def __repr__(self):
        return (f"Presentation(p={self.p}, hom={self.hom_degree}, "
                f"gens={self.matrix.nrows}, rels={self.matrix.ncols})")


class Resolution:
    """Minimal free resolution [d1, d2] with d1·d2 = 0."""

    __slots__ = ("d1", "d2", "hom_degree")

    def __init__(self, d1: GradedMatrix, d2: GradedMatrix, hom_degree=0):
        self.d1 = d1
        self.d2 = d2
        self.hom_degree = hom_degree


# ---------------------------------------------------------------------------
# the bigraded sweep

def _sweep(m: GradedMatrix, want_kernel, want_gens):
    """Shared engine behind kernel_basis and min_gens.

    Returns (kernel_cols, kernel_grades, gen_indices).  Kernel columns are
    combinations of input columns (in input column coordinates); their
    grades are the sweep positions where the corresponding column died.
    Generator indices select input columns forming a minimal generating
    set of the column span.
    """
    m.validate()
    p = m.p
    n = m.ncols
    cols = [list(c) for c in m.columns]
    slave = [[(j, 1)] for j in range(n)] if want_kernel else None
    alive = [True] * n
    seen_own_grade = [False] * n
    kernel_cols, kernel_grades, gen_indices = [], [], []

    ys = sorted({g[1] for g in m.col_grades})
    for y in ys:
        # live columns whose y-grade has been reached, re-entering at
        # their own x-grade; the sweep order makes grades totally ordered.
        entries = [j for j in range(n) if alive[j] and m.col_grades[j][1] <= y]
        entries.sort(key=lambda j: (m.col_grades[j][0], j))
        pivots = {}
        for j in entries:
            cur = cols[j]
            while cur:
                piv = cur[-1][0]
                src = pivots.get(piv)
                if src is None:
                    break
                lam = (-cur[-1][1] * inv_mod(cols[src][-1][1], p)) % p
                cur = col_add_scaled(cur, cols[src], lam, p)
                if want_kernel:
                    slave[j] = col_add_scaled(slave[j], slave[src], lam, p)
            cols[j] = cur
            own = m.col_grades[j][1] == y
            if cur:
                pivots[cur[-1][0]] = j
                if own and not seen_own_grade[j]:
                    seen_own_grade[j] = True
                    if want_gens:
                        gen_indices.append(j)
            else:
                alive[j] = False
                if own:
                    seen_own_grade[j] = True
                if want_kernel:
                    kernel_cols.append(slave[j])
                    kernel_grades.append((m.col_grades[j][0], y))
    return kernel_cols, kernel_grades, gen_indices


def kernel_basis(f: GradedMatrix) -> GradedMatrix:
    """Basis of the kernel of a homogeneous map of free modules.

    The kernel of such a map is itself free; the returned matrix has one
    column per basis element, expressed in the domain basis of ``f``, with
    the element's birth grade as its column grade.  ``f`` composed with
    the result is zero.
    """
    kcols, kgrades, _ = _sweep(f, want_kernel=True, want_gens=False)
    return GradedMatrix.build(f.p, list(f.col_grades), kgrades, kcols)


def min_gens(f: GradedMatrix):
    """Minimal generators of the column span (image) of ``f``.

    Returns ``(grades, indices)``: the selected input columns form a
    generating set of the image that is minimal at every grade
    simultaneously.
    """
    _, _, idx = _sweep(f, want_kernel=False, want_gens=True)
    return [f.col_grades[j] for j in idx], idx


# ---------------------------------------------------------------------------

def solve_in_basis(basis_columns, targets, p):
    """Express each target column in a basis given by sparse columns.

    The basis columns are linearly independent, so coefficients are
    unique.  Raises if a target is outside the span.
    """
    cols = [list(c) for c in basis_columns]
    combo = [[(j, 1)] for j in range(len(cols))]
    pivots = {}
    for j in range(len(cols)):
        cur = cols[j]
        while cur and cur[-1][0] in pivots:
            src = pivots[cur[-1][0]]
            lam = (-cur[-1][1] * inv_mod(cols[src][-1][1], p)) % p
            cur = col_add_scaled(cur, cols[src], lam, p)
            combo[j] = col_add_scaled(combo[j], combo[src], lam, p)
        if not cur:
            raise ValueError("basis columns are linearly dependent")
        cols[j] = cur
        pivots[cur[-1][0]] = j
    out = []
    for t in targets:
        cur = list(t)
        coeffs = []
        while cur:
            piv = cur[-1][0]
            src = pivots.get(piv)
            if src is None:
                raise ValueError(f"target not in span (stuck at row {piv})")
            lam = (-cur[-1][1] * inv_mod(cols[src][-1][1], p)) % p
            cur = col_add_scaled(cur, cols[src], lam, p)
            coeffs.append((src, (-lam) % p))
        expr = []
        for src, c in coeffs:
            expr = col_add_scaled(expr, combo[src], c, p)
        out.append(sorted(expr))
    return out


def presentation(short_complex, do_minimize=True) -> Presentation:
    """Present ker g / im f from a short complex X --f--> Y --g--> Z.

    Rows of the result are a kernel basis of ``g``; columns express a
    minimal generating set of im ``f`` in that basis.  The result is
    semi-minimal; with ``do_minimize`` (default) it is fully minimized.
    """
    f, g = short_complex.f, short_complex.g
    if f.p != g.p:
        raise ValueError("field mismatch in short complex")
    comp = matmul(g, f)
    if any(comp.columns):
        raise ValueError("composition g·f is nonzero")
    gen_grades, gen_idx = min_gens(f)
    kernel = kernel_basis(g)
    exprs = solve_in_basis(kernel.columns, [f.columns[j] for j in gen_idx], f.p)
    # build() validates; a homogeneity failure here is a broken contract
    mat = GradedMatrix.build(f.p, list(kernel.col_grades), gen_grades, exprs)
    pres = Presentation(mat, hom_degree=getattr(short_complex, "hom_degree", 0),
                        axes=getattr(short_complex, "axes", ("x", "y")),
                        dirs=getattr(short_complex, "dirs", ("+", "+")))
    return minimize(pres) if do_minimize else pres


def minimize(pres: Presentation) -> Presentation:
    """Cancel unit entries whose row and column grades are equal, then
    drop relations that are redundant at their own grade.

    Each cancellation removes one generator and one relation without
    changing the cokernel; candidates are taken lowest colex column
    first, then lowest row.  The pruning pass afterwards keeps a minimal
    generating set of the relation image (a redundant column is a
    combination of earlier ones at its own grade, hence at every later
    grade too), so the output is a genuinely minimal presentation: no
    unit at equal grade, and none in the kernel of the result either.
    """
    m = pres.matrix
    p = m.p
    cols = {j: dict(m.columns[j]) for j in range(m.ncols)}
    live_rows = set(range(m.nrows))
    live_cols = set(range(m.ncols))

    while True:
        target = None
        for j in sorted(live_cols):
            gj = m.col_grades[j]
            for r in sorted(cols[j]):
                if m.row_grades[r] == gj:
                    target = (r, j)
                    break
            if target:
                break
        if target is None:
            break
        r0, j0 = target
        u_inv = inv_mod(cols[j0][r0], p)
        piv_col = cols[j0]
        for j in sorted(live_cols):
            if j == j0:
                continue
            c = cols[j].get(r0)
            if not c:
                continue
            lam = (-c * u_inv) % p
            for r, v in piv_col.items():
                nv = (cols[j].get(r, 0) + lam * v) % p
                if nv:
                    cols[j][r] = nv
                else:
                    cols[j].pop(r, None)
        live_cols.discard(j0)
        live_rows.discard(r0)

    rows_sorted = sorted(live_rows)
    remap = {r: i for i, r in enumerate(rows_sorted)}
    row_grades = [m.row_grades[r] for r in rows_sorted]
    col_grades, columns = [], []
    for j in sorted(live_cols):
        col_grades.append(m.col_grades[j])
        columns.append(sorted((remap[r], c) for r, c in cols[j].items()))
    out = GradedMatrix.build(p, row_grades, col_grades, columns)

    _, keep = min_gens(out)
    out = GradedMatrix.build(p, row_grades,
                             [out.col_grades[j] for j in keep],
                             [out.columns[j] for j in keep])
    res = Presentation(out, pres.hom_degree, pres.axes, pres.dirs)
    assert res.is_minimal()
    return res


def minimal_resolution(pres: Presentation) -> Resolution:
    """Extend a minimal presentation by one kernel computation.

    For two parameters the resolution stops here: the kernel of a map of
    free modules is free, so [d1 = pres.matrix, d2 = its kernel basis] is
    a full minimal resolution.
    """
    if not pres.is_minimal():
        raise ValueError("presentation must be minimized first")
    d1 = pres.matrix
    d2 = kernel_basis(d1)
    comp = matmul(d1, d2)
    assert not any(comp.columns), "resolution does not compose to zero"
    for j, col in enumerate(d2.columns):
        gj = d2.col_grades[j]
        if any(d2.row_grades[r] == gj for r, _ in col):
            raise ValueError("presentation has a redundant relation; "
                             "run minimize first")
    return Resolution(d1, d2, pres.hom_degree)


def betti_numbers(res: Resolution):
    """Multisets of basis grades per homological index.

    Returns ``(b0, b1, b2)``, each a dict mapping a grade to its count.
    """
    def count(grades):
        out = {}
        for g in grades:
            out[g] = out.get(g, 0) + 1
        return out

    return (count(res.d1.row_grades), count(res.d1.col_grades),
            count(res.d2.col_grades))


# ---------------------------------------------------------------------------
# presentation file format (line-oriented, bit-exact)

def _fmt(v):
    return repr(float(v))


def write_mpres(pres: Presentation) -> str:
    m = pres.matrix
    lines = ["mpres v1", f"field {m.p}", f"hom {pres.hom_degree}",
             f"rows {m.nrows}"]
    for g in m.row_grades:
        lines.append(f"{_fmt(g[0])} {_fmt(g[1])}")
    lines.append(f"cols {m.ncols}")
    for j in range(m.ncols):
        g = m.col_grades[j]
        if m.p == 2:
            ent = " ".join(str(r) for r, _ in m.columns[j])
        else:
            ent = " ".join(f"{r}^{c}" for r, c in m.columns[j])
        lines.append(f"{_fmt(g[0])} {_fmt(g[1])} :" + (" " + ent if ent else ""))
    return "\n".join(lines) + "\n"


def _parse_float(tok):
    v = float(tok)
    return 0.0 if v == 0 else v


class FormatError(ValueError):
    pass


def read_mpres(text: str) -> Presentation:
    lines = [ln for ln in text.splitlines()]
    try:
        if lines[0].strip() != "mpres v1":
            raise FormatError(f"bad header {lines[0]!r}")
        p = int(lines[1].split()[1])
        hom = int(lines[2].split()[1])
        nrows = int(lines[3].split()[1])
        row_grades = []
        for i in range(nrows):
            x, y = lines[4 + i].split()
            row_grades.append((_parse_float(x), _parse_float(y)))
        at = 4 + nrows
        ncols = int(lines[at].split()[1])
        col_grades, columns = [], []
        for j in range(ncols):
            head, _, tail = lines[at + 1 + j].partition(":")
            x, y = head.split()
            col_grades.append((_parse_float(x), _parse_float(y)))
            col = []
            for tok in tail.split():
                if "^" in tok:
                    r, c = tok.split("^")
                    col.append((int(r), int(c)))
                else:
                    col.append((int(tok), 1))
            columns.append(col)
    except (IndexError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"malformed mpres file: {e}") from e
    mat = GradedMatrix.build(p, row_grades, col_grades, columns)
    return Presentation(mat, hom_degree=hom)
