"""Invariants of bipersistence modules given by presentations.

Everything here is driven by a finite grade grid: the Hilbert function
and rank invariant are tabulated over it, the signed rectangle barcode is
obtained from the rank invariant by inclusion-exclusion over grid
neighbors, and line slices restrict a presentation to an admissible line
by pushing generator and relation grades forward.

Sentinel flags on a grid add one virtual index per axis beyond the
maximum, where a finitely presented module has stabilized; rectangles
reaching a sentinel are reported with an infinite coordinate.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from typing import NamedTuple

from .core import col_add_scaled, colex_key, grade_leq, inv_mod, unit_col
from .present import Presentation

INF = math.inf


class GradeGrid:
    """Sorted distinct axis values with optional per-axis sentinels."""

    __slots__ = ("xs", "ys", "sentinel_x", "sentinel_y")

    def __init__(self, xs, ys, sentinel_x=False, sentinel_y=False):
        self.xs = sorted(set(float(x) for x in xs))
        self.ys = sorted(set(float(y) for y in ys))
        if not self.xs or not self.ys:
            raise ValueError("grid axes must be nonempty")
        self.sentinel_x = sentinel_x
        self.sentinel_y = sentinel_y

    @classmethod
    def from_grades(cls, grades, sentinel=False, extra_x=(), extra_y=()):
        xs = [g[0] for g in grades] or [0.0]
        ys = [g[1] for g in grades] or [0.0]
        return cls(list(xs) + list(extra_x), list(ys) + list(extra_y),
                   sentinel_x=sentinel, sentinel_y=sentinel)

    @classmethod
    def from_presentation(cls, pres: Presentation, sentinel=False):
        grades = list(pres.row_grades) + list(pres.col_grades)
        return cls.from_grades(grades or [(0.0, 0.0)], sentinel=sentinel)

    @property
    def nx(self):
        return len(self.xs)

    @property
    def ny(self):
        return len(self.ys)

    # extended index range, sentinel included
    @property
    def nx_ext(self):
        return self.nx + (1 if self.sentinel_x else 0)

    @property
    def ny_ext(self):
        return self.ny + (1 if self.sentinel_y else 0)

    def grade(self, ix, iy):
        """Real-plane grade of an extended index (sentinel -> +inf)."""
        x = INF if ix >= self.nx else self.xs[ix]
        y = INF if iy >= self.ny else self.ys[iy]
        return (x, y)

    def clamp(self, ix, iy):
        return (min(ix, self.nx - 1), min(iy, self.ny - 1))

    def cells(self):
        for iy in range(self.ny):
            for ix in range(self.nx):
                yield ix, iy

    def index_of(self, g):
        ix = bisect_left(self.xs, g[0])
        iy = bisect_left(self.ys, g[1])
        if ix == self.nx or self.xs[ix] != g[0] or iy == self.ny or self.ys[iy] != g[1]:
            raise ValueError(f"grade {g} not on grid")
        return ix, iy

    def index_ext(self, g):
        """Extended index of a grade; +inf coordinates map to sentinels."""
        if g[0] == INF:
            if not self.sentinel_x:
                raise ValueError("no x sentinel on this grid")
            ix = self.nx
        else:
            ix = bisect_left(self.xs, g[0])
            if ix == self.nx or self.xs[ix] != g[0]:
                raise ValueError(f"grade {g} not on grid")
        if g[1] == INF:
            if not self.sentinel_y:
                raise ValueError("no y sentinel on this grid")
            iy = self.ny
        else:
            iy = bisect_left(self.ys, g[1])
            if iy == self.ny or self.ys[iy] != g[1]:
                raise ValueError(f"grade {g} not on grid")
        return ix, iy

    def next_x(self, x):
        """Next grid value after x, or +inf past the end."""
        i = bisect_right(self.xs, x)
        return self.xs[i] if i < self.nx else INF

    def next_y(self, y):
        i = bisect_right(self.ys, y)
        return self.ys[i] if i < self.ny else INF


class Rectangle(NamedTuple):
    """Closed rectangle [lo, hi]; hi coordinates may be +inf."""

    lo: tuple
    hi: tuple

    def contains(self, g):
        return grade_leq(self.lo, g) and grade_leq(g, self.hi)

    def sides(self):
        return (self.hi[0] - self.lo[0], self.hi[1] - self.lo[1])


class SignedBarcode:
    """Positive and negative rectangle multisets with disjoint supports."""

    __slots__ = ("positive", "negative")

    def __init__(self, positive, negative):
        self.positive = sorted(positive)  # [(Rectangle, mult)]
        self.negative = sorted(negative)
        pos = {r for r, _ in self.positive}
        neg = {r for r, _ in self.negative}
        if pos & neg:
            raise ValueError("positive and negative parts share a rectangle")

    def counting_rank(self, s, t):
        """#{R containing s and t} - #{S containing s and t}."""
        out = 0
        for rect, mult in self.positive:
            if rect.contains(s) and rect.contains(t):
                out += mult
        for rect, mult in self.negative:
            if rect.contains(s) and rect.contains(t):
                out -= mult
        return out


class Line(NamedTuple):
    """Parameterized line t -> (vx*t + bx, vy*t + by), slopes in [1, inf)."""

    vx: float
    vy: float
    bx: float
    by: float

    def at(self, t):
        return (self.vx * t + self.bx, self.vy * t + self.by)


def admissible_line(vx, vy, bx=0.0, by=0.0) -> Line:
    if not (vx >= 1 and vy >= 1):
        raise ValueError(f"inadmissible direction ({vx}, {vy}); need v >= (1, 1)")
    return Line(float(vx), float(vy), float(bx), float(by))


def push_to_line(g, line: Line) -> float:
    """Smallest t with line(t) >= g in the product order."""
    return max((g[0] - line.bx) / line.vx, (g[1] - line.by) / line.vy)


# ---------------------------------------------------------------------------
# Hilbert function

def _incremental_rank():
    """Incremental column echelon over F_p; add(col, p) -> current rank."""
    pivots = {}
    state = {"rank": 0}

    def add(col, p):
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
            state["rank"] += 1
        return state["rank"]

    return add, state


def hilbert_function(pres: Presentation, grid: GradeGrid):
    """dim M_z for every grid grade z, as a dict grade -> int."""
    m = pres.matrix
    p = m.p
    # generator counts by 2-d dominance, per grid row
    gen_x_by_row = {}
    dims = {}
    for iy, y in enumerate(grid.ys):
        gen_xs = sorted(g[0] for g in m.row_grades if g[1] <= y)
        cols = sorted((j for j in range(m.ncols) if m.col_grades[j][1] <= y),
                      key=lambda j: (m.col_grades[j][0], j))
        add, state = _incremental_rank()
        ci = 0
        for ix, x in enumerate(grid.xs):
            while ci < len(cols) and m.col_grades[cols[ci]][0] <= x:
                add(m.columns[cols[ci]], p)
                ci += 1
            ngens = bisect_right(gen_xs, x)
            dims[(x, y)] = ngens - state["rank"]
    return dims


# ---------------------------------------------------------------------------
# rank invariant

class RankInvariant:
    """Table of rank(M_s -> M_t) over grid pairs s <= t (t may be sentinel)."""

    __slots__ = ("grid", "table")

    def __init__(self, grid, table):
        self.grid = grid
        self.table = table

    def rank(self, s_idx, t_idx):
        if not (s_idx[0] <= t_idx[0] and s_idx[1] <= t_idx[1]):
            raise ValueError(f"rank query needs s <= t, got {s_idx} and {t_idx}")
        return self.table.get((s_idx, t_idx), 0)

    def rank_grades(self, s, t):
        if not grade_leq(s, t):
            raise ValueError(f"rank query needs s <= t, got {s} and {t}")
        return self.rank(self.grid.index_of(s), self.grid.index_ext(t))


def rank_invariant(pres: Presentation, grid: GradeGrid) -> RankInvariant:
    """rank(s, t) = rank[G_s | R_t] - rank[R_t] for all grid pairs s <= t.

    R_t collects the relation columns with grade <= t and G_s unit columns
    for the generators with grade <= s.  Sentinel t-indices reuse the
    clamped maximum grade (a finitely presented module has stabilized).
    """
    m = pres.matrix
    p = m.p
    if grid.sentinel_x or grid.sentinel_y:
        # stabilization beyond the grid is only sound if it holds the
        # whole presentation
        top = (grid.xs[-1], grid.ys[-1])
        for g in list(m.row_grades) + list(m.col_grades):
            if not grade_leq(g, top):
                raise ValueError(f"grade {g} beyond the grid top {top}; "
                                 "sentinel ranks would be wrong")
    gens_sorted = sorted(range(m.nrows),
                         key=lambda i: (m.row_grades[i][0], i))
    table = {}
    # distinct clamped t-cells; sentinel combinations reuse them
    for tiy in range(grid.ny):
        ty = grid.ys[tiy]
        for tix in range(grid.nx):
            tx = grid.xs[tix]
            # echelon of R_t
            rel_pivots = {}
            for j in range(m.ncols):
                gj = m.col_grades[j]
                if gj[0] <= tx and gj[1] <= ty:
                    cur = list(m.columns[j])
                    while cur:
                        piv = cur[-1][0]
                        other = rel_pivots.get(piv)
                        if other is None:
                            break
                        lam = (-cur[-1][1] * inv_mod(other[-1][1], p)) % p
                        cur = col_add_scaled(cur, other, lam, p)
                    if cur:
                        rel_pivots[cur[-1][0]] = cur
            # sweep s over cells <= t; generators join a combined echelon
            # seeded with the relation pivots, so dependencies through the
            # relations are found no matter how the pivots interleave
            for siy in range(tiy + 1):
                sy = grid.ys[siy]
                pivots = dict(rel_pivots)
                rank_s = 0
                gi_ptr = 0
                ordered = [i for i in gens_sorted if m.row_grades[i][1] <= sy]
                for six in range(tix + 1):
                    sx = grid.xs[six]
                    while gi_ptr < len(ordered) and \
                            m.row_grades[ordered[gi_ptr]][0] <= sx:
                        cur = unit_col(ordered[gi_ptr])
                        while cur:
                            piv = cur[-1][0]
                            other = pivots.get(piv)
                            if other is None:
                                break
                            lam = (-cur[-1][1]
                                   * inv_mod(other[-1][1], p)) % p
                            cur = col_add_scaled(cur, other, lam, p)
                        if cur:
                            pivots[cur[-1][0]] = cur
                            rank_s += 1
                        gi_ptr += 1
                    table[((six, siy), (tix, tiy))] = rank_s
    # sentinel extensions clamp to the top cell
    ext = {}
    for (s, t), r in table.items():
        ext[(s, t)] = r
    for tiy in range(grid.ny_ext):
        for tix in range(grid.nx_ext):
            if tix < grid.nx and tiy < grid.ny:
                continue
            ct = (min(tix, grid.nx - 1), min(tiy, grid.ny - 1))
            for siy in range(grid.ny):
                for six in range(grid.nx):
                    if six <= ct[0] and siy <= ct[1]:
                        ext[((six, siy), (tix, tiy))] = table[((six, siy), ct)]
    return RankInvariant(grid, ext)


# ---------------------------------------------------------------------------
# signed barcode by inclusion-exclusion over grid neighbors

def mobius_multiplicities(ri: RankInvariant):
    """Multiplicity of every rectangle [s, t], via the neighbor formula.

    Steps off the grid contribute zero; a finitely presented module's
    persistence beyond the grid shows up at sentinel indices.
    """
    grid = ri.grid
    table = ri.table
    alphas = {}
    for siy in range(grid.ny):
        for six in range(grid.nx):
            for tiy in range(siy, grid.ny_ext):
                for tix in range(six, grid.nx_ext):
                    total = 0
                    for dsx in (0, 1):
                        if six - dsx < 0:
                            continue
                        for dsy in (0, 1):
                            if siy - dsy < 0:
                                continue
                            for dtx in (0, 1):
                                for dty in (0, 1):
                                    s2 = (six - dsx, siy - dsy)
                                    t2 = (tix + dtx, tiy + dty)
                                    if t2[0] >= grid.nx_ext or t2[1] >= grid.ny_ext:
                                        continue
                                    if not (s2[0] <= t2[0] and s2[1] <= t2[1]):
                                        continue
                                    r = table.get((s2, t2), 0)
                                    if r:
                                        sign = (-1) ** (dsx + dsy + dtx + dty)
                                        total += sign * r
                    if total:
                        alphas[((six, siy), (tix, tiy))] = total
    return alphas


def signed_barcode(ri: RankInvariant) -> SignedBarcode:
    grid = ri.grid
    pos, neg = [], []
    for (s, t), mult in sorted(mobius_multiplicities(ri).items()):
        rect = Rectangle(grid.grade(*s), grid.grade(*t))
        if mult > 0:
            pos.append((rect, mult))
        else:
            neg.append((rect, -mult))
    return SignedBarcode(pos, neg)


# ---------------------------------------------------------------------------
# 1-parameter barcodes

def barcode_1d(cells, hom_degree, p=2):
    """Standard persistence pairing of a filtered chain complex.

    ``cells`` is a list of ``(birth, dim, boundary)`` sorted by birth with
    faces before cofaces on ties; ``boundary`` lists indices of
    1-codimensional faces, optionally as ``(index, coeff)`` pairs.
    Zero-length intervals are dropped; unpaired cells die at +inf.
    """
    n = len(cells)
    births = [c[0] for c in cells]
    dims = [c[1] for c in cells]
    cols = []
    for j, (_, d, bnd) in enumerate(cells):
        col = []
        for entry in bnd:
            i, c = entry if isinstance(entry, tuple) else (entry, 1)
            if i >= j:
                raise ValueError(f"cell {j} has a boundary face {i} not before it")
            if dims[i] != d - 1:
                raise ValueError(f"cell {j} boundary face {i} has wrong dimension")
            if births[i] > births[j]:
                raise ValueError(f"cell {j} born before its face {i}")
            col.append((i, c % p))
        cols.append(sorted((i, c) for i, c in col if c))
    if any(births[i] > births[i + 1] for i in range(n - 1)):
        raise ValueError("cells not sorted by birth")
    # boundary-of-boundary must vanish
    for j in range(n):
        acc = []
        for i, c in cols[j]:
            acc = col_add_scaled(acc, cols[i], c, p)
        if acc:
            raise ValueError(f"boundary of boundary of cell {j} is nonzero")

    pivots = {}
    pair_of = {}
    for j in range(n):
        cur = cols[j]
        while cur:
            piv = cur[-1][0]
            other = pivots.get(piv)
            if other is None:
                break
            lam = (-cur[-1][1] * inv_mod(cols[other][-1][1], p)) % p
            cur = col_add_scaled(cur, cols[other], lam, p)
        cols[j] = cur
        if cur:
            piv = cur[-1][0]
            pivots[piv] = j
            pair_of[piv] = j

    bars = []
    for i in range(n):
        if dims[i] != hom_degree:
            continue
        if cols[i]:
            continue  # i is a cycle column (positive cell)
        j = pair_of.get(i)
        if j is None:
            bars.append((births[i], INF))
        elif births[j] > births[i]:
            bars.append((births[i], births[j]))
    bars.sort()
    return bars


def pushed_barcode(gen_ts, rel_ts, rel_cols, p):
    """Barcode of a 1-parameter module given by pushed presentation data.

    Generators precede relations on ties.  ``rel_cols`` are sparse columns
    over the generator indices as given.
    """
    gen_order = sorted(range(len(gen_ts)), key=lambda i: (gen_ts[i], i))
    gen_pos = [0] * len(gen_ts)
    for pos, i in enumerate(gen_order):
        gen_pos[i] = pos
    rel_order = sorted(range(len(rel_ts)), key=lambda j: (rel_ts[j], j))

    pivots = {}
    bars = []
    paired = set()
    for j in rel_order:
        cur = sorted((gen_pos[i], c) for i, c in rel_cols[j])
        while cur:
            piv = cur[-1][0]
            other = pivots.get(piv)
            if other is None:
                break
            lam = (-cur[-1][1] * inv_mod(other[-1][1], p)) % p
            cur = col_add_scaled(cur, other, lam, p)
        if cur:
            piv = cur[-1][0]
            pivots[piv] = cur
            paired.add(piv)
            birth = gen_ts[gen_order[piv]]
            death = rel_ts[j]
            if death > birth:
                bars.append((birth, death))
    for pos, i in enumerate(gen_order):
        if pos not in paired:
            bars.append((gen_ts[i], INF))
    bars.sort()
    return bars


def slice_barcode(pres: Presentation, line: Line):
    """Barcode of the restriction of the module to an admissible line."""
    if not (line.vx >= 1 and line.vy >= 1):
        raise ValueError("inadmissible line: need v >= (1, 1) componentwise")
    m = pres.matrix
    gen_ts = [push_to_line(g, line) for g in m.row_grades]
    rel_ts = [push_to_line(g, line) for g in m.col_grades]
    return pushed_barcode(gen_ts, rel_ts, m.columns, m.p)


# ---------------------------------------------------------------------------
# JSON payloads (stable field names)

def _jnum(v):
    if v == INF:
        return "inf"
    return v


def hilbert_payload(pres: Presentation, grid: GradeGrid):
    dims = hilbert_function(pres, grid)
    flat = [dims[(x, y)] for y in grid.ys for x in grid.xs]
    return {"xs": list(grid.xs), "ys": list(grid.ys), "dims": flat}


def betti_payload(betti_triple):
    b0, b1, b2 = betti_triple
    def fmt(b):
        return [[g[0], g[1], mult] for g, mult in
                sorted(b.items(), key=lambda kv: (colex_key(kv[0]), kv[0]))]
    return {"b0": fmt(b0), "b1": fmt(b1), "b2": fmt(b2)}


def signed_payload(sb: SignedBarcode):
    def fmt(part):
        return [[r.lo[0], r.lo[1], _jnum(r.hi[0]), _jnum(r.hi[1]), mult]
                for r, mult in part]
    return {"positive": fmt(sb.positive), "negative": fmt(sb.negative)}


def rank_payload(ri: RankInvariant):
    grid = ri.grid
    entries = []
    for (s, t), r in sorted(ri.table.items()):
        sg = grid.grade(*s)
        tg = grid.grade(*t)
        entries.append([sg[0], sg[1], _jnum(tg[0]), _jnum(tg[1]), r])
    return {"xs": list(grid.xs), "ys": list(grid.ys), "entries": entries}


def slice_payload(line: Line, bars):
    return {"line": {"vx": line.vx, "vy": line.vy, "bx": line.bx, "by": line.by},
            "bars": [[b, _jnum(d)] for b, d in bars]}


def dumps(payload) -> str:
    """Canonical JSON used by both the CLI and the service."""
    return json.dumps(payload, separators=(",", ":"), sort_keys=False)


def slice_json(pres: Presentation, vx, vy, bx, by) -> str:
    """Slice response shared verbatim by the CLI and the HTTP service."""
    line = admissible_line(vx, vy, bx, by)
    return dumps(slice_payload(line, slice_barcode(pres, line)))
