import math

import pytest

from mph.invariants import GradeGrid, Rectangle, SignedBarcode, \
    admissible_line, rank_invariant, signed_barcode
from mph.metrics import (bottleneck_1d, bottleneck_exhaustive,
                         bottleneck_signed, interleaving_rectangles,
                         matching_distance, matching_distance_over_lines,
                         rect_to_zero, sample_lines)
from mph.oracle import interleaving_search

from conftest import rectangle_sum_presentation

INF = math.inf


def random_barcode(rng, n_max=5, allow_inf=True):
    bars = []
    for _ in range(rng.randint(0, n_max)):
        b = round(rng.uniform(0, 10), 2)
        if allow_inf and rng.random() < 0.2:
            bars.append((b, INF))
        else:
            bars.append((b, round(b + rng.uniform(0.1, 8), 2)))
    return bars


# ---------------------------------------------------------------------------
# bottleneck

def test_bottleneck_identical_is_zero():
    c = [(0.0, 10.0), (1.0, 2.0), (3.0, INF)]
    assert bottleneck_1d(c, c) == 0.0


def test_bottleneck_single_unmatched():
    assert bottleneck_1d([(0.0, 10.0)], []) == 5.0


def test_bottleneck_matched_beats_diagonal():
    assert bottleneck_1d([(0.0, 10.0)], [(1.0, 9.0)]) == 1.0


def test_bottleneck_infinite_bars_match_by_birth():
    assert bottleneck_1d([(0.0, INF)], [(2.0, INF)]) == 2.0
    assert bottleneck_1d([(0.0, INF)], []) == INF
    assert bottleneck_1d([(0.0, INF), (0.0, 1.0)], [(0.0, INF)]) == 0.5


def test_bottleneck_exact_vs_exhaustive(rng):
    for _ in range(40):
        c = random_barcode(rng, n_max=3)
        d = random_barcode(rng, n_max=3)
        assert bottleneck_1d(c, d) == bottleneck_exhaustive(c, d)


def test_bottleneck_pseudometric(rng):
    for _ in range(20):
        a = random_barcode(rng, n_max=4, allow_inf=False)
        b = random_barcode(rng, n_max=4, allow_inf=False)
        c = random_barcode(rng, n_max=4, allow_inf=False)
        dab = bottleneck_1d(a, b)
        dba = bottleneck_1d(b, a)
        assert dab == dba
        assert bottleneck_1d(a, c) <= dab + bottleneck_1d(b, c) + 1e-12
        assert bottleneck_1d(a, a) == 0.0


# ---------------------------------------------------------------------------
# rectangle interleavings

def test_interleaving_equal_rectangles():
    r = Rectangle((0.0, 0.0), (2.0, 2.0))
    assert interleaving_rectangles(r, r) == 0.0


def test_interleaving_to_zero_halves_min_side():
    assert interleaving_rectangles(Rectangle((0.0, 0.0), (2.0, 2.0)),
                                   None) == 1.0
    assert interleaving_rectangles(Rectangle((0.0, 0.0), (2.0, 4.0)),
                                   None) == 1.0
    assert rect_to_zero(Rectangle((0.0, 0.0), (4.0, 4.0))) == 2.0


def test_interleaving_shifted_corner():
    a = Rectangle((0.0, 0.0), (10.0, 10.0))
    b = Rectangle((1.0, 1.0), (10.0, 10.0))
    assert interleaving_rectangles(a, b) == 1.0


def test_interleaving_infinite_sides_cost_nothing():
    a = Rectangle((0.0, 0.0), (INF, INF))
    b = Rectangle((1.0, 0.0), (INF, INF))
    assert interleaving_rectangles(a, b) == 1.0
    assert interleaving_rectangles(a, a) == 0.0
    assert rect_to_zero(a) == INF


def test_interleaving_formula_matches_oracle_small_grid():
    rects = []
    for x1 in range(3):
        for x2 in range(x1, 3):
            for y1 in range(3):
                for y2 in range(y1, 3):
                    rects.append(Rectangle((float(x1), float(y1)),
                                           (float(x2), float(y2))))
    for i, a in enumerate(rects):
        for b in rects[i:]:
            assert interleaving_rectangles(a, b) == interleaving_search(a, b)
        assert interleaving_rectangles(a, None) == interleaving_search(a, None)


def test_oracle_search_examples():
    a = Rectangle((0.0, 0.0), (2.0, 4.0))
    assert interleaving_search(a, a) == 0.0
    assert interleaving_search(a, None) == 1.0
    assert interleaving_search(Rectangle((0.0, 0.0), (10.0, 10.0)),
                               Rectangle((1.0, 1.0), (10.0, 10.0))) == 1.0


# ---------------------------------------------------------------------------
# generalized bottleneck on signed barcodes

def _sb(pos, neg=()):
    return SignedBarcode([(r, 1) for r in pos], [(r, 1) for r in neg])


def test_signed_bottleneck_identical():
    x = _sb([Rectangle((0.0, 0.0), (2.0, 2.0))],
            [Rectangle((0.0, 0.0), (1.0, 1.0))])
    assert bottleneck_signed(x, x) == 0.0


def test_signed_bottleneck_unmatched_cost():
    x = _sb([Rectangle((0.0, 0.0), (4.0, 4.0))])
    y = _sb([])
    assert bottleneck_signed(x, y) == 2.0


def test_signed_bottleneck_crossover_pairing():
    # swapping the two arguments swaps the combined multisets: symmetric
    a = Rectangle((0.0, 0.0), (3.0, 3.0))
    b = Rectangle((1.0, 1.0), (2.0, 2.0))
    x = _sb([a], [b])
    y = _sb([b], [a])
    assert bottleneck_signed(x, y) == bottleneck_signed(y, x)
    # crossover moves negatives across: comparing (R|S) with the empty
    # barcode matches R against S directly
    assert bottleneck_signed(x, _sb([])) == interleaving_rectangles(a, b)


# ---------------------------------------------------------------------------
# matching distance

def test_matching_distance_self_is_zero():
    pres = rectangle_sum_presentation([((0.0, 0.0), (2.0, 2.0))])
    value, line = matching_distance(pres, pres, n_angles=4, n_offsets=4)
    assert value == 0.0
    assert line.vx >= 1 and line.vy >= 1


def test_matching_distance_rectangle_vs_zero():
    pres = rectangle_sum_presentation([((0.0, 0.0), (3.0, 3.0))],
                                      grid_vals=(0.0, 1.0, 2.0, 3.0, 4.0))
    zero = rectangle_sum_presentation([], grid_vals=(0.0, 4.0))
    value, line = matching_distance(pres, zero, n_angles=5, n_offsets=7)
    assert value >= 2.0 - 1e-9  # slice through the square: cost (4-0)/2
    # the exact diagonal gives exactly the half-length of [0, 4)
    exact, _ = matching_distance_over_lines(
        pres, zero, [admissible_line(1.0, 1.0, 0.0, 0.0)])
    assert exact == 2.0


def test_matching_distance_monotone_in_line_set(rng):
    p = rectangle_sum_presentation([((0.0, 0.0), (2.0, 2.0))])
    q = rectangle_sum_presentation([((1.0, 1.0), (2.0, 2.0))])
    bounds = ((0.0, 0.0), (3.0, 3.0))
    lines4 = sample_lines(bounds, 2, 2)
    lines16 = lines4 + sample_lines(bounds, 4, 4)
    v4, _ = matching_distance_over_lines(p, q, lines4)
    v16, _ = matching_distance_over_lines(p, q, lines16)
    assert v16 >= v4


def test_matching_distance_bounded_by_interleaving(rng):
    # sampled lower bound never exceeds the exact rectangle interleaving
    for _ in range(50):
        grid_vals = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
        def rand_rect():
            x1 = rng.randint(0, 3); x2 = rng.randint(x1, 4)
            y1 = rng.randint(0, 3); y2 = rng.randint(y1, 4)
            return ((float(x1), float(y1)), (float(x2), float(y2)))
        ra, rb = rand_rect(), rand_rect()
        pa = rectangle_sum_presentation([ra], grid_vals=grid_vals)
        pb = rectangle_sum_presentation([rb], grid_vals=grid_vals)
        # the presented module is supported on [lo, hi+1) half-open; its
        # interleaving distance uses the open corner values
        a = Rectangle(ra[0], (ra[1][0] + 1.0, ra[1][1] + 1.0))
        b = Rectangle(rb[0], (rb[1][0] + 1.0, rb[1][1] + 1.0))
        di = interleaving_rectangles(a, b)
        value, _ = matching_distance(pa, pb, n_angles=4, n_offsets=4)
        assert value <= di + 1e-9


def test_matching_distance_rejects_axis_mismatch():
    from mph.present import Presentation
    pa = rectangle_sum_presentation([((0.0, 0.0), (1.0, 1.0))])
    pb = rectangle_sum_presentation([((0.0, 0.0), (1.0, 1.0))])
    pb = Presentation(pb.matrix, axes=("degree", "radius"))
    with pytest.raises(ValueError):
        matching_distance(pa, pb)


def _presentation_from_rectangles(rects, grid):
    """Presentation of a sum of closed grid rectangles (hi may be +inf)."""
    from mph.core import GradedMatrix
    from mph.present import Presentation
    rows, col_grades, cols = [], [], []
    expanded = []
    for r, mult in rects:
        expanded.extend([r] * mult)
    for k, r in enumerate(expanded):
        rows.append(r.lo)
    for k, r in enumerate(expanded):
        if r.hi[0] != INF:
            col_grades.append((grid.next_x(r.hi[0]), r.lo[1]))
            cols.append([(k, 1)])
        if r.hi[1] != INF:
            col_grades.append((r.lo[0], grid.next_y(r.hi[1])))
            cols.append([(k, 1)])
    return Presentation(GradedMatrix.build(2, rows, col_grades, cols))


def test_combined_pairing_stability_sampled(rng):
    # on rectangle-decomposable pairs, slicing the combined barcode
    # reconstructions is no farther apart than slicing the originals
    grid_vals = (0.0, 1.0, 2.0, 3.0, 4.0)
    for _ in range(20):
        def rand_pieces():
            out = []
            for _ in range(rng.randint(1, 3)):
                x1 = rng.randint(0, 2); x2 = rng.randint(x1, 3)
                y1 = rng.randint(0, 2); y2 = rng.randint(y1, 3)
                out.append(((float(x1), float(y1)), (float(x2), float(y2))))
            return out
        m = rectangle_sum_presentation(rand_pieces(), grid_vals=grid_vals)
        n = rectangle_sum_presentation(rand_pieces(), grid_vals=grid_vals)
        grid = GradeGrid(grid_vals, grid_vals, sentinel_x=True,
                         sentinel_y=True)
        sb_m = signed_barcode(rank_invariant(m, grid))
        sb_n = signed_barcode(rank_invariant(n, grid))
        assert sb_m.negative == [] and sb_n.negative == []
        # combined pairing R_m + S_n vs R_n + S_m, rebuilt as presentations
        comb_1 = _presentation_from_rectangles(
            list(sb_m.positive) + list(sb_n.negative), grid)
        comb_2 = _presentation_from_rectangles(
            list(sb_n.positive) + list(sb_m.negative), grid)
        lines = sample_lines(((0.0, 0.0), (4.0, 4.0)), 3, 3)
        lhs, _ = matching_distance_over_lines(comb_1, comb_2, lines)
        rhs, _ = matching_distance_over_lines(m, n, lines)
        assert lhs <= rhs + 1e-12
