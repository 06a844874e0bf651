"""Two-parameter persistent homology toolkit.

Builds bifiltrations from point-cloud data, computes minimal
presentations and resolutions of the resulting persistence modules by
bigraded matrix reduction, derives invariants (Hilbert function, bigraded
Betti numbers, rank invariant, signed rectangle barcode, fibered barcode)
and distances (bottleneck, matching), and serves interactive line-slice
queries over HTTP.
"""

__version__ = "0.1.0"

from .core import GradedMatrix, grade_leq, grade_join, colex_key, reduce
from .present import (Presentation, Resolution, kernel_basis, min_gens,
                      presentation, minimize, minimal_resolution,
                      betti_numbers)
from .invariants import (GradeGrid, Rectangle, SignedBarcode, Line,
                         hilbert_function, rank_invariant, signed_barcode,
                         barcode_1d, push_to_line, slice_barcode)
from .metrics import (bottleneck_1d, interleaving_rectangles,
                      bottleneck_signed, matching_distance)
from .oracle import (ExplicitModule, module_from_presentation, rank_between,
                     generalized_rank, is_middle_exact, is_weakly_exact,
                     rectangle_decompose, interleaving_search)
