"""Bifiltration construction from point clouds and distance matrices.

Degree-Rips filters by Rips scale and a vertex-degree threshold (the
degree axis is reversed, so stored degree values are negated); function-
Rips filters by Rips scale and super- or sublevel sets of a vertex
function.  Degree-Rips is multicritical: a simplex carries an antichain
of incomparable birth grades, the staircase corners swept out as the
scale grows.

Homology input is a short chain complex of free modules.  A multicritical
bifiltration is converted to one by a telescope construction: each
simplex contributes one generator per birth, plus one connector generator
per consecutive birth pair (born at the join) whose boundary identifies
the two copies; boundary columns pick, per face, the lowest-index copy
born early enough, and a correction term supported on connectors makes
consecutive maps compose to zero.  The correction is the unique solution
of a small linear system, and the composite g.f = 0 is asserted.
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np

from .core import (GradedMatrix, col_add_scaled, grade_join, grade_leq,
                   matmul)
from .present import solve_in_basis


class ParseError(ValueError):
    pass


class PointCloud:
    """Fixed-dimension coordinate vectors with an optional scalar each."""

    def __init__(self, points, values=None):
        self.points = np.asarray(points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must form a 2-d array")
        self.values = None if values is None else np.asarray(values, dtype=float)
        if self.values is not None and len(self.values) != len(self.points):
            raise ValueError("one scalar per point required")

    def __len__(self):
        return len(self.points)


class DistanceMatrix:
    """Symmetric nonnegative distances with zero diagonal.

    No triangle inequality is required anywhere downstream.
    """

    def __init__(self, d):
        d = np.asarray(d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance matrix must be square")
        if (d < 0).any():
            raise ValueError("distances must be nonnegative")
        if np.diag(d).any():
            raise ValueError("diagonal must be zero")
        if not np.array_equal(d, d.T):
            raise ValueError("distance matrix must be symmetric")
        self.d = d
        self.n = d.shape[0]

    def __getitem__(self, ij):
        return self.d[ij]


def load_points(text, function_column=False) -> PointCloud:
    """Parse point CSV: one point per line, '#' lines ignored.

    With ``function_column`` the last column is the vertex scalar.
    """
    rows = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        try:
            vals = [float(f) for f in fields]
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric field") from None
        if width is None:
            width = len(vals)
            if function_column and width < 2:
                raise ParseError(f"line {lineno}: need coordinates plus a "
                                 "function value")
        elif len(vals) != width:
            raise ParseError(f"line {lineno}: expected {width} fields, "
                             f"got {len(vals)}")
        rows.append(vals)
    if not rows:
        raise ParseError("no points in input")
    arr = np.array(rows, dtype=float)
    if function_column:
        return PointCloud(arr[:, :-1], arr[:, -1])
    return PointCloud(arr)


def load_distances(text) -> DistanceMatrix:
    """Parse a distance file: first line n, then lower-triangular rows."""
    lines = [ln.strip() for ln in text.splitlines()
             if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ParseError("empty distance file")
    try:
        n = int(lines[0])
    except ValueError:
        raise ParseError("first line must be the point count") from None
    if len(lines) != n:
        raise ParseError(f"expected {n - 1} triangular rows, got {len(lines) - 1}")
    d = np.zeros((n, n), dtype=float)
    for i in range(1, n):
        try:
            vals = [float(t) for t in lines[i].split()]
        except ValueError:
            raise ParseError(f"line {i + 1}: non-numeric field") from None
        if len(vals) != i:
            raise ParseError(f"line {i + 1}: expected {i} entries, got {len(vals)}")
        for j, v in enumerate(vals):
            d[i, j] = d[j, i] = v
    return DistanceMatrix(d)


def pairwise_distances(cloud: PointCloud) -> DistanceMatrix:
    """Euclidean distances, each pair computed once."""
    if len(cloud) == 0:
        raise ValueError("empty point cloud")
    pts = cloud.points
    n = len(pts)
    d = np.zeros((n, n), dtype=float)
    for i in range(n):
        for j in range(i + 1, n):
            v = float(np.linalg.norm(pts[i] - pts[j]))
            d[i, j] = d[j, i] = v
    return DistanceMatrix(d)


def rips_complex(dm: DistanceMatrix, r, max_dim):
    """All cliques of the r-neighborhood graph up to dimension max_dim."""
    if r < 0 or max_dim < 0:
        raise ValueError("need r >= 0 and max_dim >= 0")
    n = dm.n
    nbrs = [[j for j in range(i + 1, n) if dm.d[i, j] <= r] for i in range(n)]
    out = [(i,) for i in range(n)]

    def extend(clique, candidates):
        for k, v in enumerate(candidates):
            cur = clique + (v,)
            out.append(cur)
            if len(cur) <= max_dim:
                extend(cur, [u for u in candidates[k + 1:] if dm.d[v, u] <= r])

    if max_dim >= 1:
        for i in range(n):
            extend((i,), nbrs[i])
    return sorted(out, key=lambda s: (len(s), s))


# ---------------------------------------------------------------------------

class BifiltSimplex:
    """A simplex with its antichain of birth grades (sorted by x)."""

    __slots__ = ("vertices", "births")

    def __init__(self, vertices, births):
        self.vertices = tuple(vertices)
        self.births = tuple(sorted(set(births)))
        if not self.births:
            raise ValueError("birth set must be nonempty")
        for a in self.births:
            for b in self.births:
                if a != b and grade_leq(a, b):
                    raise ValueError(f"births of {self.vertices} not an "
                                     f"antichain: {a} <= {b}")

    def born_by(self, z):
        return any(grade_leq(b, z) for b in self.births)

    def __repr__(self):
        return f"BifiltSimplex({self.vertices}, {self.births})"


class Bifiltration:
    """Simplices grouped by dimension over a finite grade grid."""

    def __init__(self, by_dim, axes=("x", "y"), dirs=("+", "+"), p=2):
        self.by_dim = [list(level) for level in by_dim]
        self.axes = tuple(axes)
        self.dirs = tuple(dirs)
        self.p = p
        grades = [b for level in self.by_dim for s in level for b in s.births]
        self.grid_x = sorted({g[0] for g in grades})
        self.grid_y = sorted({g[1] for g in grades})
        self.validate()

    def dim_count(self):
        return len(self.by_dim)

    def simplices(self, d):
        if d < 0 or d >= len(self.by_dim):
            return []
        return self.by_dim[d]

    def complex_at(self, z):
        """Vertex tuples of all simplices present at grade z."""
        return [s.vertices for level in self.by_dim for s in level
                if s.born_by(z)]

    def is_one_critical(self):
        return all(len(s.births) == 1 for level in self.by_dim for s in level)

    def validate(self):
        """Face closure: every facet's birth region contains the simplex's."""
        index = {}
        for d, level in enumerate(self.by_dim):
            for s in level:
                if len(s.vertices) != d + 1:
                    raise ValueError(f"{s.vertices} filed under dimension {d}")
                index[s.vertices] = s
        for d in range(1, len(self.by_dim)):
            for s in self.by_dim[d]:
                for k in range(len(s.vertices)):
                    facet = s.vertices[:k] + s.vertices[k + 1:]
                    fs = index.get(facet)
                    if fs is None:
                        raise ValueError(f"missing facet {facet} of {s.vertices}")
                    for b in s.births:
                        if not any(grade_leq(fb, b) for fb in fs.births):
                            raise ValueError(
                                f"facet {facet} not born by {b}, a birth of "
                                f"{s.vertices}")
        return self


# ---------------------------------------------------------------------------
# degree-Rips and function-Rips

def snap_up(values, v):
    """Smallest grid value >= v (radius axis: later birth shrinks)."""
    i = bisect_right(values, v)
    if i > 0 and values[i - 1] == v:
        return v
    if i == len(values):
        return values[-1]
    return values[i]


def snap_down(values, v):
    """Largest grid value <= v (degree axis: lower threshold shrinks)."""
    i = bisect_right(values, v)
    if i == 0:
        return values[0]
    return values[i - 1]


def degree_rips(dm: DistanceMatrix, max_dim, grid=(64, 64)) -> Bifiltration:
    """Degree-Rips bifiltration over (degree, radius).

    The degree axis is indexed opposite to inclusion, so stored degree
    values are negated.  A simplex's birth set is the staircase of
    (degree threshold, radius) corners at which all its vertices have
    high enough degree and all its edges are short enough, snapped onto
    the coarsening grid (radius up, degree down).
    """
    if not grid or len(grid) != 2 or not grid[0] or not grid[1]:
        raise ValueError("degree-Rips needs a (degree, radius) grid spec")
    n_deg, n_rad = int(grid[0]), int(grid[1])
    if n_deg < 1 or n_rad < 1:
        raise ValueError("grid counts must be positive")
    n = dm.n
    rmax = float(dm.d.max()) if n > 1 else 0.0

    dists = np.unique(dm.d[np.triu_indices(n, 1)]) if n > 1 else np.array([0.0])
    radii = sorted(set([0.0] + list(dists)))
    if len(radii) > n_rad:
        radii = sorted(set(
            [0.0] + [float(v) for v in np.linspace(0.0, rmax, n_rad)]))

    degrees = list(range(1, n + 1))
    if len(degrees) > n_deg:
        degrees = sorted({1, n} | {int(round(v))
                                   for v in np.linspace(1, n, n_deg)})

    # vertex degree in the r-neighborhood graph at each grid radius
    deg_at = np.empty((len(radii), n), dtype=int)
    for ri, r in enumerate(radii):
        deg_at[ri] = (dm.d <= r).sum(axis=1) - 1  # minus the self-distance

    simplices = rips_complex(dm, radii[-1], max_dim)
    by_dim = [[] for _ in range(max_dim + 1)]
    for s in simplices:
        k = len(s) - 1
        diam = 0.0
        for a in range(len(s)):
            for b in range(a + 1, len(s)):
                diam = max(diam, dm.d[s[a], s[b]])
        r0 = snap_up(radii, diam)
        births = []
        last_deg = None
        for ri in range(radii.index(r0), len(radii)):
            mindeg = int(deg_at[ri][list(s)].min())
            d_param = snap_down(degrees, mindeg + 1)
            if last_deg is None or d_param > last_deg:
                births.append((-float(d_param), radii[ri]))
                last_deg = d_param
        by_dim[k].append(BifiltSimplex(s, births))
    return Bifiltration(by_dim, axes=("degree", "radius"), dirs=("-", "+"))


def function_rips(dm: DistanceMatrix, values, direction, max_dim) -> Bifiltration:
    """Function-Rips bifiltration over (function threshold, radius).

    1-critical: a simplex is born at (level of its worst vertex, its
    diameter).  Superlevel filtrations store the function axis negated.
    """
    values = np.asarray(values, dtype=float)
    if len(values) != dm.n:
        raise ValueError("need one function value per point")
    if direction not in ("superlevel", "sublevel"):
        raise ValueError("direction must be 'superlevel' or 'sublevel'")
    superlevel = direction == "superlevel"
    rmax = float(dm.d.max()) if dm.n > 1 else 0.0
    simplices = rips_complex(dm, rmax, max_dim)
    by_dim = [[] for _ in range(max_dim + 1)]
    for s in simplices:
        k = len(s) - 1
        diam = 0.0
        for a in range(len(s)):
            for b in range(a + 1, len(s)):
                diam = max(diam, dm.d[s[a], s[b]])
        vals = values[list(s)]
        a_val = -float(vals.min()) if superlevel else float(vals.max())
        a_val = 0.0 if a_val == 0 else a_val
        by_dim[k].append(BifiltSimplex(s, [(a_val, diam)]))
    return Bifiltration(by_dim, axes=("level", "radius"),
                        dirs=("-" if superlevel else "+", "+"))


# ---------------------------------------------------------------------------
# free chain complexes (telescope conversion for multicritical input)

class ShortComplex:
    """X --f--> Y --g--> Z of free modules with g.f = 0."""

    def __init__(self, f: GradedMatrix, g: GradedMatrix, hom_degree=0,
                 axes=("x", "y"), dirs=("+", "+")):
        if f.row_grades != g.col_grades:
            raise ValueError("middle bases of f and g do not match")
        comp = matmul(g, f)
        if any(comp.columns):
            raise ValueError("composite g.f is nonzero")
        self.f = f
        self.g = g
        self.hom_degree = hom_degree
        self.axes = tuple(axes)
        self.dirs = tuple(dirs)


def _level_items(bif: Bifiltration, level):
    """Basis of the free telescope at one level: copies of level-simplices
    plus connectors of (level-1)-simplices, in a fixed order."""
    items = []
    for idx, s in enumerate(bif.simplices(level)):
        for m, b in enumerate(s.births):
            items.append(("c", idx, m, b))
    if level >= 1:
        for idx, s in enumerate(bif.simplices(level - 1)):
            for c in range(len(s.births) - 1):
                g = grade_join(s.births[c], s.births[c + 1])
                items.append(("n", idx, c, g))
    return items


def _select_copy(simplex: BifiltSimplex, grade):
    """Lowest-index birth of the simplex that is <= grade."""
    for m, b in enumerate(simplex.births):
        if grade_leq(b, grade):
            return m
    raise ValueError(f"face {simplex.vertices} not born by {grade}")


def _sparse_apply(columns, vec, p):
    acc = []
    for idx, coeff in vec:
        acc = col_add_scaled(acc, columns[idx], coeff, p)
    return acc


def _chain_map_raw(bif: Bifiltration, level, lower=None):
    """Telescope boundary map from ``level`` to ``level - 1``.

    Columns and row indices follow the generation order of
    ``_level_items`` (canonicalization happens once the recursion is
    done).  ``lower`` is the raw map out of level-1, used to solve for
    the connector corrections; at level 1 no correction is ever needed.
    Returns (columns, items_hi, items_lo).
    """
    p = bif.p
    items_hi = _level_items(bif, level)
    items_lo = _level_items(bif, level - 1)
    lo_index = {key[:3]: i for i, key in enumerate(items_lo)}
    simplices_hi = bif.simplices(level)
    simplices_lo = bif.simplices(level - 1)
    lo_by_vertices = {s.vertices: i for i, s in enumerate(simplices_lo)}

    lower_cols = None
    conn_positions = None
    if lower is not None:
        lower_columns, _, _ = lower
        conn_positions = [i for i, key in enumerate(items_lo) if key[0] == "n"]
        lower_cols = [lower_columns[i] for i in conn_positions]

    columns = []
    for kind, idx, which, grade in items_hi:
        entries = {}

        def add(pos, coeff):
            entries[pos] = (entries.get(pos, 0) + coeff) % p

        if kind == "c":
            s = simplices_hi[idx]
            for k in range(len(s.vertices)):
                facet = s.vertices[:k] + s.vertices[k + 1:]
                fidx = lo_by_vertices[facet]
                sel = _select_copy(simplices_lo[fidx], grade)
                add(lo_index[("c", fidx, sel)], (-1) ** k)
        else:
            s = simplices_lo[idx]
            add(lo_index[("c", idx, which + 1)], 1)
            add(lo_index[("c", idx, which)], -1)
        main = sorted((i, c % p) for i, c in entries.items() if c % p)

        if lower is not None and main:
            r = _sparse_apply(lower_columns, main, p)
            if r:
                # unique connector combination with the same lower image
                sol = solve_in_basis(lower_cols, [r], p)[0]
                corr = sorted((conn_positions[i], c) for i, c in sol)
                main = col_add_scaled(main, corr, -1, p)
        columns.append(main)

    return columns, items_hi, items_lo


def chain_map(bif: Bifiltration, level, lower=None) -> GradedMatrix:
    """Canonicalized telescope boundary map from ``level`` to ``level-1``."""
    columns, items_hi, items_lo = _chain_map_raw(bif, level, lower)
    return GradedMatrix.build(bif.p, [key[3] for key in items_lo],
                              [key[3] for key in items_hi], columns)


def short_complex(bif: Bifiltration, hom_degree) -> ShortComplex:
    """Free short chain complex whose middle homology is H_i pointwise.

    For 1-critical input this is the plain simplicial boundary pair; the
    telescope machinery only engages on multicritical birth sets.
    """
    if hom_degree < 0:
        raise ValueError("homology degree must be >= 0")
    raws = {}
    for level in range(1, hom_degree + 2):
        raws[level] = _chain_map_raw(bif, level, raws.get(level - 1))

    def finish(level):
        columns, items_hi, items_lo = raws[level]
        return GradedMatrix.build(bif.p, [key[3] for key in items_lo],
                                  [key[3] for key in items_hi], columns)

    f = finish(hom_degree + 1)
    if hom_degree == 0:
        g = GradedMatrix(bif.p, [], list(f.row_grades),
                         [[] for _ in f.row_grades])
    else:
        g = finish(hom_degree)
    return ShortComplex(f, g, hom_degree, bif.axes, bif.dirs)


# ---------------------------------------------------------------------------
# bifcc file format: the chain levels (2, 1, 0) of the free complex

def _fmt(v):
    return repr(float(v))


def _fmt_col(col, p):
    if p == 2:
        return " ".join(str(r) for r, _ in col)
    return " ".join(f"{r}^{c}" for r, c in col)


def write_bifcc(bif: Bifiltration) -> str:
    """Serialize the free chain complex at levels (2, 1, 0).

    Multicritical input is converted (telescope) before export, so the
    format only ever holds 1-critical free complexes.
    """
    p = bif.p
    raw1 = _chain_map_raw(bif, 1)
    d1 = chain_map(bif, 1)
    d2 = chain_map(bif, 2, lower=raw1)
    # blocks follow the matrices' canonical bases so indices line up
    lines = ["bifcc v1", f"field {p}",
             f"axes {bif.axes[0]} {bif.axes[1]} {bif.dirs[0]} {bif.dirs[1]}",
             f"sizes {d2.ncols} {d1.ncols} {d1.nrows}"]
    for j in range(d2.ncols):
        g = d2.col_grades[j]
        ent = _fmt_col(d2.columns[j], p)
        lines.append(f"{_fmt(g[0])} {_fmt(g[1])} :" + (" " + ent if ent else ""))
    for j in range(d1.ncols):
        g = d1.col_grades[j]
        ent = _fmt_col(d1.columns[j], p)
        lines.append(f"{_fmt(g[0])} {_fmt(g[1])} :" + (" " + ent if ent else ""))
    for g in d1.row_grades:
        lines.append(f"{_fmt(g[0])} {_fmt(g[1])} :")
    return "\n".join(lines) + "\n"


class BifccFile:
    """Parsed bifcc contents: the two boundary matrices and metadata."""

    def __init__(self, d2, d1, p, axes, dirs):
        self.d2 = d2
        self.d1 = d1
        self.p = p
        self.axes = axes
        self.dirs = dirs

    def to_short_complex(self, hom_degree) -> ShortComplex:
        if hom_degree == 1:
            return ShortComplex(self.d2, self.d1, 1, self.axes, self.dirs)
        if hom_degree == 0:
            g = GradedMatrix(self.p, [], list(self.d1.row_grades),
                             [[] for _ in self.d1.row_grades])
            return ShortComplex(self.d1, g, 0, self.axes, self.dirs)
        raise ValueError("bifcc files support homology degrees 0 and 1")


def _parse_float(tok):
    v = float(tok)
    return 0.0 if v == 0 else v


def _parse_col(tail):
    col = []
    for tok in tail.split():
        if "^" in tok:
            r, c = tok.split("^")
            col.append((int(r), int(c)))
        else:
            col.append((int(tok), 1))
    return col


def read_bifcc(text) -> BifccFile:
    lines = text.splitlines()
    try:
        if lines[0].strip() != "bifcc v1":
            raise ParseError(f"bad header {lines[0]!r}")
        p = int(lines[1].split()[1])
        ax = lines[2].split()
        if ax[0] != "axes" or len(ax) != 5:
            raise ParseError("bad axes line")
        axes, dirs = (ax[1], ax[2]), (ax[3], ax[4])
        n2, n1, n0 = (int(t) for t in lines[3].split()[1:4])

        def block(start, count):
            grades, cols = [], []
            for i in range(count):
                head, _, tail = lines[start + i].partition(":")
                x, y = head.split()
                grades.append((_parse_float(x), _parse_float(y)))
                cols.append(_parse_col(tail))
            return grades, cols

        g2, c2 = block(4, n2)
        g1, c1 = block(4 + n2, n1)
        g0, _ = block(4 + n2 + n1, n0)
    except (IndexError, ValueError) as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(f"malformed bifcc file: {e}") from e
    d1 = GradedMatrix.build(p, g0, g1, c1)
    d2 = GradedMatrix.build(p, g1, g2, c2)
    return BifccFile(d2, d1, p, axes, dirs)
