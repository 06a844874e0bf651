import itertools
import random

import pytest

from mph.bifilt import BifiltSimplex, Bifiltration
from mph.core import GradedMatrix
from mph.present import Presentation


def staircase_presentation(p=2):
    """Two generators at the origin, five relations forming a staircase.

    Minimal free resolution has first syzygies at (1,3), (2,2), (3,1);
    pointwise dimensions by row (y=0,1,2): (2,2,1,0), (2,1,0,0), (1,0,0,0).
    """
    mat = GradedMatrix.build(
        p,
        [(0.0, 0.0), (0.0, 0.0)],
        [(0.0, 2.0), (0.0, 3.0), (1.0, 1.0), (2.0, 0.0), (3.0, 0.0)],
        [[(0, 1)], [(1, 1)], [(0, 1), (1, 1)], [(1, 1)], [(0, 1)]],
    )
    return Presentation(mat)


def band_presentation(p=2):
    """The standard module with no good (unsigned) barcode.

    Generators a at (0,1) and b at (1,0); b dies at (1,2) and a+b at
    (2,1).  Its signed barcode has a nonempty negative part.
    """
    mat = GradedMatrix.build(
        p,
        [(0.0, 1.0), (1.0, 0.0)],
        [(1.0, 2.0), (2.0, 1.0)],
        [[(1, 1)], [(0, 1), (1, 1)]],
    )
    return Presentation(mat)


def rectangle_sum_presentation(pieces, grid_vals=(0.0, 1.0, 2.0, 3.0), p=2):
    """Presentation of a direct sum of closed grid-rectangle modules.

    Each piece is (lo, hi) with hi strictly inside the grid on any axis
    it is bounded on; the relation killing axis i sits at the successor
    grid value.  hi coordinates equal to the top grid value persist.
    """
    grid_vals = sorted(grid_vals)

    def succ(v):
        i = grid_vals.index(v)
        return grid_vals[i + 1] if i + 1 < len(grid_vals) else None

    rows, col_grades, cols = [], [], []
    for k, (lo, hi) in enumerate(pieces):
        rows.append((float(lo[0]), float(lo[1])))
    for k, (lo, hi) in enumerate(pieces):
        sx = succ(float(hi[0]))
        sy = succ(float(hi[1]))
        if sx is not None:
            col_grades.append((sx, float(lo[1])))
            cols.append([(k, 1)])
        if sy is not None:
            col_grades.append((float(lo[0]), sy))
            cols.append([(k, 1)])
    mat = GradedMatrix.build(p, rows, col_grades, cols)
    return Presentation(mat)


def random_presentation(rng, p=2, max_grid=4, max_gens=4, max_rels=5):
    """Seeded random homogeneous presentation on a small integer grid."""
    vals = [float(v) for v in range(max_grid)]
    n_gens = rng.randint(1, max_gens)
    rows = [(rng.choice(vals), rng.choice(vals)) for _ in range(n_gens)]
    n_rels = rng.randint(0, max_rels)
    col_grades, cols = [], []
    for _ in range(n_rels):
        g = (rng.choice(vals), rng.choice(vals))
        support = [i for i in range(n_gens)
                   if rows[i][0] <= g[0] and rows[i][1] <= g[1]]
        col = [(i, rng.randint(1, p - 1)) for i in support
               if rng.random() < 0.7]
        col_grades.append(g)
        cols.append(col)
    mat = GradedMatrix.build(p, rows, col_grades, cols)
    return Presentation(mat)


def random_bifiltration(rng, n_pts=6, max_dim=2, p=2, multicritical=True):
    """Seeded random face-closed bifiltration with antichain births."""
    vals = [0.0, 1.0, 2.0, 3.0]
    simplices = []
    for d in range(max_dim + 1):
        simplices.extend(itertools.combinations(range(n_pts), d + 1))
    keep = set((v,) for v in range(n_pts))
    for s in simplices:
        if len(s) == 1:
            continue
        facets_ok = all(tuple(f) in keep
                        for f in itertools.combinations(s, len(s) - 1))
        if facets_ok and rng.random() < 0.6:
            keep.add(s)
    index = {}
    by_dim = [[] for _ in range(max_dim + 1)]
    for s in sorted(keep, key=lambda t: (len(t), t)):
        d = len(s) - 1
        births = []
        n_births = rng.randint(1, 3 if multicritical else 1)
        for _ in range(n_births):
            g = (rng.choice(vals), rng.choice(vals))
            if d > 0:
                for f in itertools.combinations(s, d):
                    fb = index[tuple(f)].births
                    b = min(fb, key=lambda t: (max(t[0], g[0])
                                               + max(t[1], g[1])))
                    g = (max(g[0], b[0]), max(g[1], b[1]))
            births.append(g)
        births = [g for g in set(births)
                  if not any(h != g and h[0] <= g[0] and h[1] <= g[1]
                             for h in set(births))]
        sx = BifiltSimplex(s, births)
        index[s] = sx
        by_dim[d].append(sx)
    return Bifiltration(by_dim, p=p)


TEN_POINTS = [
    (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0),
    (0.707, 0.707), (-0.707, 0.707), (-0.707, -0.707), (0.707, -0.707),
    (1.22, 0.47), (0.6, 0.31),
]


@pytest.fixture
def rng():
    return random.Random(20260810)
