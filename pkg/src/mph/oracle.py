"""Brute-force ground truth for the fast paths.

An ExplicitModule is a pointwise tabulation of a bipersistence module on
a finite grid: one dimension and one transition matrix per cover
relation, all over F_p.  Ranks are composed along monotone paths, limits
and colimits are assembled from explicit constraint matrices, exactness
is checked square by square, and interleavings of interval modules are
decided by an exhaustive feasibility search.  Everything here favors
obviousness over speed.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .invariants import GradeGrid, Rectangle, RankInvariant, \
    mobius_multiplicities
from .present import Presentation

INF = math.inf


# ---------------------------------------------------------------------------
# dense F_p linear algebra

def fp_rank(a, p):
    a = np.array(a, dtype=np.int64) % p
    if a.size == 0:
        return 0
    rank = 0
    nrows, ncols = a.shape
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, nrows):
            if a[r, col]:
                piv = r
                break
        if piv is None:
            continue
        a[[row, piv]] = a[[piv, row]]
        inv = pow(int(a[row, col]), p - 2, p)
        a[row] = (a[row] * inv) % p
        for r in range(nrows):
            if r != row and a[r, col]:
                a[r] = (a[r] - a[r, col] * a[row]) % p
        row += 1
        rank += 1
        if row == nrows:
            break
    return rank


def fp_nullspace(a, p):
    """Columns spanning the kernel of a (dense, F_p)."""
    a = np.array(a, dtype=np.int64) % p
    nrows, ncols = a.shape
    if ncols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    aug = a.copy()
    pivots = {}
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, nrows):
            if aug[r, col]:
                piv = r
                break
        if piv is None:
            continue
        aug[[row, piv]] = aug[[piv, row]]
        inv = pow(int(aug[row, col]), p - 2, p)
        aug[row] = (aug[row] * inv) % p
        for r in range(nrows):
            if r != row and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[row]) % p
        pivots[col] = row
        row += 1
        if row == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((ncols, len(free)), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for pc, pr in pivots.items():
            basis[pc, k] = (-aug[pr, fc]) % p
    return basis


class _CokerBasis:
    """Cokernel of a set of columns in F_p^n, with class projection."""

    def __init__(self, ambient_rows, columns, p):
        self.p = p
        self.rows = list(ambient_rows)  # active coordinate labels
        self.pos = {r: i for i, r in enumerate(self.rows)}
        self.pivcols = {}  # pivot position -> dense reduced column
        for col in columns:
            self._add(col)
        self.basis_rows = [r for r in self.rows
                           if self.pos[r] not in self.pivcols]

    def _dense(self, col):
        v = np.zeros(len(self.rows), dtype=np.int64)
        for r, c in col:
            v[self.pos[r]] = c % self.p
        return v

    def _reduce_top(self, v):
        # eliminate the leading entry only: enough to build the echelon
        p = self.p
        while True:
            nz = np.nonzero(v)[0]
            if len(nz) == 0:
                return v
            piv = int(nz[-1])
            other = self.pivcols.get(piv)
            if other is None:
                return v
            lam = (v[piv] * pow(int(other[piv]), p - 2, p)) % p
            v = (v - lam * other) % p

    def _normal_form(self, v):
        # eliminate every entry sitting on a pivot row (not only the
        # leading one): the result is the canonical representative whose
        # support avoids all pivot rows, so reading off the basis-row
        # coordinates is the true class
        p = self.p
        while True:
            hit = None
            for r in np.nonzero(v)[0][::-1]:
                if int(r) in self.pivcols:
                    hit = int(r)
                    break
            if hit is None:
                return v
            other = self.pivcols[hit]
            lam = (v[hit] * pow(int(other[hit]), p - 2, p)) % p
            v = (v - lam * other) % p

    def _add(self, col):
        v = self._reduce_top(self._dense(col))
        nz = np.nonzero(v)[0]
        if len(nz):
            self.pivcols[int(nz[-1])] = v

    @property
    def dim(self):
        return len(self.basis_rows)

    def project(self, col):
        """Class of a vector, in the cokernel basis."""
        v = self._normal_form(self._dense(col))
        return np.array([v[self.pos[r]] for r in self.basis_rows],
                        dtype=np.int64)


class ExplicitModule:
    """Pointwise module on a grid: dims plus one matrix per cover relation.

    ``step_x[(ix, iy)]`` maps the space at ``(ix, iy)`` to ``(ix+1, iy)``;
    shapes follow ``dims``.  ``validate`` checks commutativity of every
    grid square entrywise.
    """

    def __init__(self, grid: GradeGrid, dims, step_x, step_y, p=2):
        self.grid = grid
        self.dims = dims          # {(ix, iy): int}
        self.step_x = step_x      # {(ix, iy): ndarray}
        self.step_y = step_y
        self.p = p

    def dim(self, ix, iy):
        return self.dims[(ix, iy)]

    def validate(self):
        g = self.grid
        for iy in range(g.ny):
            for ix in range(g.nx):
                if ix + 1 < g.nx:
                    sx = self.step_x[(ix, iy)]
                    assert sx.shape == (self.dim(ix + 1, iy), self.dim(ix, iy))
                if iy + 1 < g.ny:
                    sy = self.step_y[(ix, iy)]
                    assert sy.shape == (self.dim(ix, iy + 1), self.dim(ix, iy))
                if ix + 1 < g.nx and iy + 1 < g.ny:
                    a = self.step_y[(ix + 1, iy)] @ self.step_x[(ix, iy)]
                    b = self.step_x[(ix, iy + 1)] @ self.step_y[(ix, iy)]
                    if ((a - b) % self.p).any():
                        raise AssertionError(
                            f"square at index ({ix}, {iy}) does not commute")
        return self


def module_from_presentation(pres: Presentation, grid: GradeGrid) -> ExplicitModule:
    """Tabulate coker of the relations pointwise, with transition matrices."""
    m = pres.matrix
    p = m.p
    cokers = {}
    for iy, y in enumerate(grid.ys):
        for ix, x in enumerate(grid.xs):
            rows = [i for i in range(m.nrows)
                    if m.row_grades[i][0] <= x and m.row_grades[i][1] <= y]
            cols = [m.columns[j] for j in range(m.ncols)
                    if m.col_grades[j][0] <= x and m.col_grades[j][1] <= y]
            cokers[(ix, iy)] = _CokerBasis(rows, cols, p)

    dims = {k: cb.dim for k, cb in cokers.items()}

    def transition(src, dst):
        a = np.zeros((cokers[dst].dim, cokers[src].dim), dtype=np.int64)
        for k, r in enumerate(cokers[src].basis_rows):
            a[:, k] = cokers[dst].project([(r, 1)])
        return a

    step_x, step_y = {}, {}
    for iy in range(grid.ny):
        for ix in range(grid.nx):
            if ix + 1 < grid.nx:
                step_x[(ix, iy)] = transition((ix, iy), (ix + 1, iy))
            if iy + 1 < grid.ny:
                step_y[(ix, iy)] = transition((ix, iy), (ix, iy + 1))
    return ExplicitModule(grid, dims, step_x, step_y, p).validate()


def transition(mod: ExplicitModule, s_idx, t_idx):
    """Composite matrix along a monotone staircase path (x first, then y);
    well-defined by commutativity."""
    (sx, sy), (tx, ty) = s_idx, t_idx
    if not (sx <= tx and sy <= ty):
        raise ValueError(f"incomparable pair {s_idx}, {t_idx}")
    a = np.eye(mod.dim(sx, sy), dtype=np.int64)
    ix, iy = sx, sy
    while ix < tx:
        a = mod.step_x[(ix, iy)] @ a % mod.p
        ix += 1
    while iy < ty:
        a = mod.step_y[(ix, iy)] @ a % mod.p
        iy += 1
    return a


def rank_between(mod: ExplicitModule, s_idx, t_idx) -> int:
    """Rank of the composite along a monotone staircase path."""
    return fp_rank(transition(mod, s_idx, t_idx), mod.p)


def rank_invariant_table(mod: ExplicitModule, sentinel=False) -> RankInvariant:
    """Rank invariant of an explicit module, independent of presentations."""
    g = mod.grid
    grid = GradeGrid(g.xs, g.ys, sentinel_x=sentinel, sentinel_y=sentinel)
    table = {}
    for siy in range(g.ny):
        for six in range(g.nx):
            for tiy in range(siy, g.ny):
                for tix in range(six, g.nx):
                    table[((six, siy), (tix, tiy))] = \
                        rank_between(mod, (six, siy), (tix, tiy))
    if sentinel:
        top = (g.nx - 1, g.ny - 1)
        for tiy in range(grid.ny_ext):
            for tix in range(grid.nx_ext):
                if tix < g.nx and tiy < g.ny:
                    continue
                ct = (min(tix, top[0]), min(tiy, top[1]))
                for siy in range(ct[1] + 1):
                    for six in range(ct[0] + 1):
                        table[((six, siy), (tix, tiy))] = \
                            table[((six, siy), ct)]
    return RankInvariant(grid, table)


def simplicial_homology_dim(simplices, hom_degree, p=2) -> int:
    """dim H_i of a complex given by its vertex tuples, over F_p."""
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(tuple(sorted(s)))
    for d in by_dim:
        by_dim[d] = sorted(set(by_dim[d]))
    i = hom_degree
    ci = by_dim.get(i, [])
    if not ci:
        return 0
    index_i = {s: k for k, s in enumerate(ci)}
    index_down = {s: k for k, s in enumerate(by_dim.get(i - 1, []))}

    def boundary(simplices_up, index_lower):
        rows = len(index_lower)
        cols = len(simplices_up)
        a = np.zeros((rows, cols), dtype=np.int64)
        for j, s in enumerate(simplices_up):
            for k in range(len(s)):
                face = s[:k] + s[k + 1:]
                a[index_lower[face], j] = (-1) ** k % p
        return a

    di = boundary(ci, index_down) if i >= 1 else np.zeros((0, len(ci)),
                                                          dtype=np.int64)
    up = by_dim.get(i + 1, [])
    dup = boundary(up, index_i) if up else np.zeros((len(ci), 0),
                                                    dtype=np.int64)
    ker = len(ci) - fp_rank(di, p)
    return ker - fp_rank(dup, p)


# ---------------------------------------------------------------------------
# interval subsets, limits and colimits

def _check_interval(grid: GradeGrid, cells) -> set:
    cells = set(cells)
    if not cells:
        raise ValueError("interval must be nonempty")
    # convexity
    for (ax, ay) in cells:
        for (bx, by) in cells:
            for ux in range(min(ax, bx), max(ax, bx) + 1):
                for uy in range(min(ay, by), max(ay, by) + 1):
                    if ax <= ux <= bx and ay <= uy <= by:
                        if (ux, uy) not in cells:
                            raise ValueError(
                                f"not convex: ({ux}, {uy}) missing between "
                                f"({ax}, {ay}) and ({bx}, {by})")
    # connectivity through comparable steps
    seen = set()
    stack = [next(iter(sorted(cells)))]
    while stack:
        z = stack.pop()
        if z in seen:
            continue
        seen.add(z)
        x, y = z
        for w in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if w in cells and w not in seen:
                stack.append(w)
    if seen != cells:
        raise ValueError("interval is not connected")
    return cells


def generalized_rank(mod: ExplicitModule, cells) -> int:
    """Rank of the canonical map lim M|_I -> colim M|_I over an interval I.

    The limit is the solution space of the compatibility constraints over
    the cover relations internal to I; the colimit is the quotient of the
    direct sum by the relation-images of the same covers.
    """
    cells = _check_interval(mod.grid, cells)
    p = mod.p
    order = sorted(cells)
    offset = {}
    total = 0
    for z in order:
        offset[z] = total
        total += mod.dim(*z)

    covers = []
    for (x, y) in order:
        if (x + 1, y) in cells:
            covers.append(((x, y), (x + 1, y), mod.step_x[(x, y)]))
        if (x, y + 1) in cells:
            covers.append(((x, y), (x, y + 1), mod.step_y[(x, y)]))

    # limit: kernel of the pasted difference map
    nconstraints = sum(mod.dim(*w) for _, w, _ in covers)
    cmat = np.zeros((max(nconstraints, 0), total), dtype=np.int64)
    at = 0
    for z, w, step in covers:
        dz, dw = mod.dim(*z), mod.dim(*w)
        cmat[at:at + dw, offset[z]:offset[z] + dz] = step % p
        cmat[at:at + dw, offset[w]:offset[w] + dw] -= np.eye(dw, dtype=np.int64)
        at += dw
    lim_basis = fp_nullspace(cmat % p, p) if total else \
        np.zeros((0, 0), dtype=np.int64)

    # colimit: cokernel of the pasted relation map
    rel_cols = []
    for z, w, step in covers:
        dz = mod.dim(*z)
        for k in range(dz):
            col = np.zeros(total, dtype=np.int64)
            col[offset[z] + k] = 1
            col[offset[w]:offset[w] + mod.dim(*w)] -= step[:, k]
            rel_cols.append(col % p)
    coker = _CokerBasis(range(total),
                        [[(i, int(v)) for i, v in enumerate(c) if v] for c in rel_cols],
                        p)

    # canonical map: project each limit element at one point of I (the
    # colimit identifies the values at all points of a connected interval)
    if lim_basis.shape[1] == 0 or coker.dim == 0:
        return 0
    z0 = order[0]
    d0 = mod.dim(*z0)
    imgs = np.zeros((coker.dim, lim_basis.shape[1]), dtype=np.int64)
    for k in range(lim_basis.shape[1]):
        vec = lim_basis[offset[z0]:offset[z0] + d0, k] % p
        imgs[:, k] = coker.project(
            [(offset[z0] + i, int(v)) for i, v in enumerate(vec) if v])
    return fp_rank(imgs, p)


def slice_barcode_via_module(mod: ExplicitModule, line, ts):
    """Barcode of the restriction to a line, from pointwise ranks only.

    ``ts`` are the parameters to sample (they must include every grid
    crossing where the restricted module can change).  The module at an
    off-grid point is read at the componentwise-largest grid point below
    it, which is exact for modules presented on the grid.  Interval
    multiplicities come from the standard rank-difference formula.
    """
    g = mod.grid
    ts = sorted(set(ts))

    def snap(vals, v):
        # guard against roundoff in line arithmetic at grid crossings
        i = bisect_right(vals, v)
        for j in (i - 1, i):
            if 0 <= j < len(vals) and abs(vals[j] - v) <= 1e-9 * (1 + abs(v)):
                return vals[j]
        return v

    def cell_at(t):
        x, y = line.at(t)
        ix = bisect_right(g.xs, snap(g.xs, x)) - 1
        iy = bisect_right(g.ys, snap(g.ys, y)) - 1
        # below the grid the module is zero; above it, it has stabilized
        if ix < 0 or iy < 0:
            return None
        return (min(ix, g.nx - 1), min(iy, g.ny - 1))

    cells = [cell_at(t) for t in ts]
    k = len(ts)

    def rk(i, j):
        if i < 0 or j >= k:
            return 0
        if cells[i] is None or cells[j] is None:
            return 0
        return rank_between(mod, cells[i], cells[j])

    bars = []
    for i in range(k):
        for j in range(i + 1, k + 1):  # death at t_j, or at +inf for j == k
            mult = rk(i, j - 1) - rk(i - 1, j - 1) - rk(i, j) + rk(i - 1, j)
            if mult > 0:
                death = INF if j == k else ts[j]
                bars.extend([(ts[i], death)] * mult)
    bars.sort()
    return bars


# ---------------------------------------------------------------------------
# exactness and rectangle decomposition

def _square_data(mod: ExplicitModule, ix, iy, jx, jy):
    """Matrices for the square a=(ix,iy), b=(ix,jy), c=(jx,iy), d=(jx,jy)."""
    p = mod.p
    ab = transition(mod, (ix, iy), (ix, jy))
    ac = transition(mod, (ix, iy), (jx, iy))
    bd = transition(mod, (ix, jy), (jx, jy))
    cd = transition(mod, (jx, iy), (jx, jy))
    stack = np.vstack([ab, ac]) % p
    concat = np.hstack([bd, (-cd) % p]) % p
    union = np.hstack([bd, cd]) % p
    ad = (bd @ ab) % p
    return ab, ac, bd, cd, stack, concat, union, ad


def _squares(grid):
    """All squares (x,y) < (x',y'), both coordinates strictly increasing."""
    for iy in range(grid.ny - 1):
        for ix in range(grid.nx - 1):
            for jy in range(iy + 1, grid.ny):
                for jx in range(ix + 1, grid.nx):
                    yield ix, iy, jx, jy


def is_middle_exact(mod: ExplicitModule) -> bool:
    """Image of a -> b(+)c equals kernel of b(+)c -> d on every square
    a=(x,y), b=(x,y'), c=(x',y), d=(x',y')."""
    p = mod.p
    for ix, iy, jx, jy in _squares(mod.grid):
        ab, ac, _, _, stack, concat, _, _ = _square_data(mod, ix, iy, jx, jy)
        dim_mid = ab.shape[0] + ac.shape[0]
        if fp_rank(stack, p) != dim_mid - fp_rank(concat, p):
            return False
    return True


def _weak_square_ok(mod, ix, iy, jx, jy):
    p = mod.p
    ab, ac, bd, cd, stack, _, union, ad = _square_data(mod, ix, iy, jx, jy)
    img_ok = fp_rank(ad, p) == (fp_rank(bd, p) + fp_rank(cd, p)
                                - fp_rank(union, p))
    ker_ok = fp_rank(ad, p) == (fp_rank(ab, p) + fp_rank(ac, p)
                                - fp_rank(stack, p))
    return img_ok, ker_ok


def is_weakly_exact(mod: ExplicitModule) -> bool:
    """Image and kernel conditions of weak exactness on every square."""
    for ix, iy, jx, jy in _squares(mod.grid):
        img_ok, ker_ok = _weak_square_ok(mod, ix, iy, jx, jy)
        if not (img_ok and ker_ok):
            return False
    return True


@dataclass
class Refusal:
    """Decomposition refusal naming a concrete failing grid square."""

    square: tuple  # ((x, y), (x', y')) in real coordinates
    reason: str

    def __bool__(self):
        return False


def _failing_square(mod: ExplicitModule):
    g = mod.grid
    for ix, iy, jx, jy in _squares(g):
        img_ok, ker_ok = _weak_square_ok(mod, ix, iy, jx, jy)
        if not (img_ok and ker_ok):
            lo = (g.xs[ix], g.ys[iy])
            hi = (g.xs[jx], g.ys[jy])
            what = "image" if not img_ok else "kernel"
            return Refusal((lo, hi), f"{what} condition fails")
    return None


def rectangle_decompose(mod: ExplicitModule):
    """Summand multiset of a weakly-exact module, or a Refusal.

    Multiplicities come from the inclusion-exclusion of the rank
    invariant; the result is verified by rebuilding dimensions and ranks
    of the direct sum.
    """
    refused = _failing_square(mod)
    if refused is not None:
        return refused
    ri = rank_invariant_table(mod, sentinel=False)
    grid = ri.grid
    rects = []
    for (s, t), mult in sorted(mobius_multiplicities(ri).items()):
        if mult < 0:
            raise AssertionError(
                f"negative multiplicity {mult} for a weakly-exact module")
        rects.append((Rectangle(grid.grade(*s), grid.grade(*t)), mult))
    # verification: dimensions and ranks of the rebuilt direct sum
    for iy in range(grid.ny):
        for ix in range(grid.nx):
            z = grid.grade(ix, iy)
            total = sum(mult for rect, mult in rects if rect.contains(z))
            if total != mod.dim(ix, iy):
                raise AssertionError(f"dimension mismatch at {z}")
    for (s, t), r in ri.table.items():
        sg, tg = grid.grade(*s), grid.grade(*t)
        total = sum(mult for rect, mult in rects
                    if rect.contains(sg) and rect.contains(tg))
        if total != r:
            raise AssertionError(f"rank mismatch at {sg} -> {tg}")
    return rects


# ---------------------------------------------------------------------------
# exhaustive interleaving search for interval (rectangle) modules

def _natural_map_status(src, dst):
    """Existence/zero-tie analysis of natural maps src -> dst on a rep grid.

    Both arguments are boolean arrays over the same representative grid.
    Returns a boolean array: True where a component map can be nonzero.
    Variables live where src & dst; adjacent variables are equal; a
    variable is forced to zero when the source flows somewhere the target
    cannot follow, or arrives where it could not have come from.
    """
    from scipy.ndimage import label

    dom = src & dst
    if not dom.any():
        return np.zeros_like(dom)
    comp, _ = label(dom, structure=np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]]))
    # predecessor has src without dst: variable here is forced zero
    pred_bad_x = np.zeros_like(dom)
    pred_bad_x[1:, :] = src[:-1, :] & ~dst[:-1, :]
    pred_bad_y = np.zeros_like(dom)
    pred_bad_y[:, 1:] = src[:, :-1] & ~dst[:, :-1]
    # successor has dst without src: variable here is forced zero
    succ_bad_x = np.zeros_like(dom)
    succ_bad_x[:-1, :] = ~src[1:, :] & dst[1:, :]
    succ_bad_y = np.zeros_like(dom)
    succ_bad_y[:, :-1] = ~src[:, 1:] & dst[:, 1:]
    bad = dom & (pred_bad_x | pred_bad_y | succ_bad_x | succ_bad_y)
    bad_comps = set(np.unique(comp[bad])) - {0}
    ok = dom.copy()
    for c in bad_comps:
        ok[comp == c] = False
    return ok


def _axis_samples(coords, eps):
    """Cell representatives of the arrangement {c - k*eps : k=0..3}.

    Exact Fraction arithmetic; the returned list interleaves an outer pad,
    the boundary values, and the midpoints of consecutive cells, so that
    an indicator module is constant around each representative.
    """
    vals = set()
    for c in coords:
        if c not in (INF, -INF):
            fc = Fraction(c)
            for k in range(4):
                vals.add(fc - k * eps)
    if not vals:
        vals = {Fraction(0)}
    bnd = sorted(vals)
    reps = [bnd[0] - 1]
    for i, v in enumerate(bnd):
        reps.append(v)
        if i + 1 < len(bnd):
            reps.append((v + bnd[i + 1]) / 2)
    reps.append(bnd[-1] + 1)
    return reps


def _axis_indicator(reps, shift, lo, hi):
    """Boolean vector: lo <= rep + shift <= hi, exact on Fractions."""
    flo = -INF if lo == -INF else Fraction(lo)
    fhi = INF if hi == INF else Fraction(hi)
    out = np.empty(len(reps), dtype=bool)
    for i, r in enumerate(reps):
        v = r + shift
        out[i] = (flo == -INF or v >= flo) and (fhi == INF or v <= fhi)
    return out


def _axis_shift_lookup(reps, delta):
    """For each representative r, the index of the cell containing r+delta."""
    out = np.empty(len(reps), dtype=np.int64)
    for i, r in enumerate(reps):
        v = r + delta
        j = bisect_left(reps, v)
        if j < len(reps) and reps[j] == v:
            out[i] = j
        elif j == 0:
            out[i] = 0
        elif j >= len(reps):
            out[i] = len(reps) - 1
        else:
            # strictly between reps[j-1] and reps[j]: exactly one of the
            # two flanking representatives is a cell midpoint or pad
            out[i] = j - 1 if (j - 1) % 2 == 0 else j
    return out


def _rect_grid(rect, xs, ys, shift):
    if rect is None:
        return np.zeros((len(xs), len(ys)), dtype=bool)
    gx = _axis_indicator(xs, shift, rect.lo[0], rect.hi[0])
    gy = _axis_indicator(ys, shift, rect.lo[1], rect.hi[1])
    return gx[:, None] & gy[None, :]


def interleaving_feasible(a, b, eps) -> bool:
    """Decide existence of an eps-interleaving of two interval modules.

    ``a`` and ``b`` are closed rectangles (possibly with +inf sides) or
    None for the zero module.  The naturality systems for the two shift
    morphisms are solved by zero-propagation over connected components of
    the sampled arrangement, and the two composite conditions are then
    checked pointwise.
    """
    eps = Fraction(eps)
    if eps < 0:
        return False
    corners_x, corners_y = [], []
    for rect in (a, b):
        if rect is not None:
            corners_x += [rect.lo[0], rect.hi[0]]
            corners_y += [rect.lo[1], rect.hi[1]]
    xs = _axis_samples(corners_x, eps)
    ys = _axis_samples(corners_y, eps)

    a0 = _rect_grid(a, xs, ys, 0)
    a2 = _rect_grid(a, xs, ys, 2 * eps)
    b1 = _rect_grid(b, xs, ys, eps)
    b3 = _rect_grid(b, xs, ys, 3 * eps)

    f_ok = _natural_map_status(a0, b1)    # f_z : A_z -> B_{z+eps}
    g_ok = _natural_map_status(b1, a2)    # g at z+eps : B_{z+eps} -> A_{z+2eps}

    # composite to A's transition: wherever A_z and A_{z+2eps} are nonzero
    if (a0 & a2 & ~(f_ok & g_ok)).any():
        return False

    # composite to B's transition at w = z+eps: g at w, then f at w+eps,
    # whose status is f's component status at z+2eps
    need_b = b1 & b3
    if need_b.any():
        fx = _axis_shift_lookup(xs, 2 * eps)
        fy = _axis_shift_lookup(ys, 2 * eps)
        f2 = f_ok[fx[:, None], fy[None, :]]
        if (need_b & ~(g_ok & f2)).any():
            return False
    return True


def interleaving_candidates(a, b):
    """Candidate epsilons sure to include the interleaving distance."""
    vals = {Fraction(0)}
    coords = [[], []]
    for rect in (a, b):
        if rect is not None:
            for axis in (0, 1):
                coords[axis] += [rect.lo[axis], rect.hi[axis]]
    for axis in (0, 1):
        cs = [Fraction(c) for c in coords[axis] if c not in (INF, -INF)]
        for c1 in cs:
            for c2 in cs:
                d = abs(c1 - c2)
                for k in (1, 2, 3):
                    vals.add(d / k)
    return sorted(vals)


def interleaving_search(a, b, eps_candidates=None) -> float:
    """Smallest feasible epsilon from the candidate list (exact search).

    Inputs are interval modules given as rectangles (or None for zero);
    non-rectangle intervals are not supported here: deciding interleaving
    existence for arbitrary modules is hard, and the oracle does not guess.
    """
    for rect in (a, b):
        if rect is not None and not isinstance(rect, Rectangle):
            raise ValueError("interleaving search accepts rectangles or None")
    if eps_candidates is None:
        cands = interleaving_candidates(a, b)
    else:
        cands = sorted(set(Fraction(e) for e in eps_candidates))
    if not cands:
        raise ValueError("empty candidate list")

    # The distance is an infimum and the feasible set may be open at its
    # boundary (collapsing a closed rectangle needs a strict inequality);
    # feasibility is constant between consecutive candidate thresholds, so
    # testing each threshold and the midpoint just after it computes the
    # infimum exactly.
    def ok(i):
        if interleaving_feasible(a, b, cands[i]):
            return True
        just_after = (cands[i] + cands[i + 1]) / 2 if i + 1 < len(cands) \
            else cands[i] + 1
        return interleaving_feasible(a, b, just_after)

    lo, hi = 0, len(cands) - 1
    if not ok(hi):
        return INF
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])
