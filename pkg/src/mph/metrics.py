"""Distances: exact 1-parameter bottleneck, generalized bottleneck on
rectangle barcodes, interval-module interleaving closed forms, and the
sampled matching distance.

All bottleneck computations use the standard exact scheme: binary search
over candidate cost values with a perfect-matching feasibility test on
the doubled bipartite graph (every item gains a diagonal partner that is
free to pair with other diagonals).
"""

from __future__ import annotations

import math

from .invariants import SignedBarcode, admissible_line, slice_barcode

INF = math.inf


# ---------------------------------------------------------------------------
# exact bottleneck engine

def _perfect_matching_exists(nu, nv, adj):
    """Kuhn's augmenting-path maximum matching; True if it saturates U."""
    match_v = [-1] * nv

    def try_augment(u, seen):
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_v[v] == -1 or try_augment(match_v[v], seen):
                    match_v[v] = u
                    return True
        return False

    for u in range(nu):
        if not try_augment(u, [False] * nv):
            return False
    return True


def _exact_bottleneck(costs_pair, costs_c, costs_d):
    """Infimal matching cost given pairwise and unmatched cost tables.

    ``costs_pair[i][j]`` is the cost of matching C[i] to D[j];
    ``costs_c[i]`` / ``costs_d[j]`` the cost of leaving an item unmatched.
    """
    nc, nd = len(costs_c), len(costs_d)
    if nc == 0 and nd == 0:
        return 0.0
    cand = {0.0}
    for row in costs_pair:
        cand.update(v for v in row if v < INF)
    cand.update(v for v in costs_c if v < INF)
    cand.update(v for v in costs_d if v < INF)
    cand = sorted(cand)

    def feasible(eps):
        # U = C + diagonals of D, V = D + diagonals of C
        nu = nc + nd
        nv = nd + nc
        adj = [[] for _ in range(nu)]
        for i in range(nc):
            for j in range(nd):
                if costs_pair[i][j] <= eps:
                    adj[i].append(j)
            if costs_c[i] <= eps:
                adj[i].append(nd + i)
        for j in range(nd):
            if costs_d[j] <= eps:
                adj[nc + j].append(j)
            for i in range(nc):
                adj[nc + j].append(nd + i)
        return _perfect_matching_exists(nu, nv, adj)

    lo, hi = 0, len(cand) - 1
    if not feasible(cand[hi]):
        return INF
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    return cand[lo]


# ---------------------------------------------------------------------------
# 1-parameter bottleneck

def _bar_cost(i1, i2):
    a, b = i1
    c, d = i2
    db = 0.0 if (b == INF and d == INF) else abs(d - b)
    return max(abs(c - a), db)


def _bar_to_diag(i1):
    a, b = i1
    return INF if b == INF else (b - a) / 2.0


def bottleneck_1d(c_bars, d_bars) -> float:
    """Exact bottleneck distance between finite half-open barcodes.

    Intervals with infinite death match only each other (cost is the
    birth difference) or contribute infinity unmatched.
    """
    c_bars = list(c_bars)
    d_bars = list(d_bars)
    costs_pair = [[_bar_cost(i, j) for j in d_bars] for i in c_bars]
    costs_c = [_bar_to_diag(i) for i in c_bars]
    costs_d = [_bar_to_diag(j) for j in d_bars]
    return _exact_bottleneck(costs_pair, costs_c, costs_d)


def bottleneck_exhaustive(c_bars, d_bars) -> float:
    """Brute-force minimum over all partial matchings (small inputs only).

    Both sides are padded with unmatched slots so that any subset of
    either barcode may stay unmatched.
    """
    from itertools import permutations

    c_bars, d_bars = list(c_bars), list(d_bars)
    nc, nd = len(c_bars), len(d_bars)
    size = nc + nd
    cs = c_bars + [None] * nd
    ds = d_bars + [None] * nc
    best = INF
    for perm in permutations(range(size)):
        cost = 0.0
        for i, pi in enumerate(perm):
            ci, dj = cs[i], ds[pi]
            if ci is not None and dj is not None:
                cost = max(cost, _bar_cost(ci, dj))
            elif ci is not None:
                cost = max(cost, _bar_to_diag(ci))
            elif dj is not None:
                cost = max(cost, _bar_to_diag(dj))
            if cost >= best:
                break
        best = min(best, cost)
    return best


# ---------------------------------------------------------------------------
# interval-module interleavings

def rect_to_zero(rect) -> float:
    """Interleaving distance between a rectangle module and zero."""
    if rect is None:
        return 0.0
    sx, sy = rect.sides()
    return min(sx, sy) / 2.0


def _coord_delta(u, v):
    if u == v:
        return 0.0  # covers inf == inf: two unbounded sides cost nothing
    return abs(u - v)


def interleaving_rectangles(a, b) -> float:
    """Closed-form interleaving distance between rectangle modules.

    Either the two modules are matched by a diagonal shift, paying the
    largest corner displacement in the sup norm, or both are collapsed to
    zero, paying the larger of the two halved minimal side lengths.
    """
    if a is None and b is None:
        return 0.0
    if a is None or b is None:
        return rect_to_zero(a if b is None else b)
    shift = max(_coord_delta(a.lo[0], b.lo[0]), _coord_delta(a.lo[1], b.lo[1]),
                _coord_delta(a.hi[0], b.hi[0]), _coord_delta(a.hi[1], b.hi[1]))
    return min(max(rect_to_zero(a), rect_to_zero(b)), shift)


def bottleneck_signed(x: SignedBarcode, y: SignedBarcode) -> float:
    """Generalized bottleneck between combined signed barcodes.

    Matches the multiset X.positive + Y.negative against
    Y.positive + X.negative, with rectangle interleavings as matched cost
    and collapse-to-zero as unmatched cost.
    """
    def expand(part):
        out = []
        for rect, mult in part:
            out.extend([rect] * mult)
        return out

    c = expand(x.positive) + expand(y.negative)
    d = expand(y.positive) + expand(x.negative)
    costs_pair = [[interleaving_rectangles(i, j) for j in d] for i in c]
    costs_c = [rect_to_zero(i) for i in c]
    costs_d = [rect_to_zero(j) for j in d]
    return _exact_bottleneck(costs_pair, costs_c, costs_d)


# ---------------------------------------------------------------------------
# sampled matching distance

def sample_lines(bounds, n_angles, n_offsets):
    """Deterministic line grid: angles in [pi/8, 3pi/8], offsets across the
    bounding box antidiagonal.  Directions are normalized so the smaller
    component is 1, the parameterization under which the slicewise
    bottleneck is largest."""
    (lox, loy), (hix, hiy) = bounds
    if hix <= lox:
        hix = lox + 1.0
    if hiy <= loy:
        hiy = loy + 1.0
    lines = []
    for i in range(n_angles):
        t = 0.5 if n_angles == 1 else i / (n_angles - 1)
        theta = math.pi / 8 + t * (math.pi / 4)
        cx, cy = math.cos(theta), math.sin(theta)
        m = min(cx, cy)
        vx, vy = cx / m, cy / m
        for k in range(n_offsets):
            u = 0.5 if n_offsets == 1 else k / (n_offsets - 1)
            bx = lox + u * (hix - lox)
            by = hiy + u * (loy - hiy)
            lines.append(admissible_line(vx, vy, bx, by))
    return lines


def presentation_bounds(pres):
    grades = list(pres.row_grades) + list(pres.col_grades)
    if not grades:
        return ((0.0, 0.0), (1.0, 1.0))
    xs = [g[0] for g in grades]
    ys = [g[1] for g in grades]
    return ((min(xs), min(ys)), (max(xs), max(ys)))


def matching_distance_over_lines(p_pres, q_pres, lines):
    """Max slicewise bottleneck over an explicit line set, with argmax."""
    if p_pres.axes != q_pres.axes or p_pres.dirs != q_pres.dirs:
        raise ValueError("presentations use different axes")
    best, best_line = 0.0, None
    for line in lines:
        d = bottleneck_1d(slice_barcode(p_pres, line),
                          slice_barcode(q_pres, line))
        if best_line is None or d > best:
            best, best_line = d, line
    return best, best_line


def matching_distance(p_pres, q_pres, n_angles=8, n_offsets=8):
    """Sampled lower bound for the matching distance.

    The exact value is a supremum over all admissible lines; sampling a
    deterministic grid of lines yields a lower bound, reported together
    with the line achieving the maximum.
    """
    (plo, phi) = presentation_bounds(p_pres)
    (qlo, qhi) = presentation_bounds(q_pres)
    bounds = ((min(plo[0], qlo[0]), min(plo[1], qlo[1])),
              (max(phi[0], qhi[0]), max(phi[1], qhi[1])))
    lines = sample_lines(bounds, n_angles, n_offsets)
    return matching_distance_over_lines(p_pres, q_pres, lines)
