"""Function-side local and outer norms computed from frequency-band pieces.

These evaluate the same B/F aggregation formulas as the sequence norms,
with the per-level fields |f * phi_i| in place of the piecewise-constant
coefficient fields.  Level sums are truncated at the grid depth; the
optional ``truncation_delta`` reports the change from dropping the top
level.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .dyadic import DEFAULT_VIRTUAL_LEVELS, DyadicCube
from .fields import BandStack, NormReport, SampledSignal
from .lpdecomp import FilterBank, lp_pieces
from .seqspace import (
    SpaceParams,
    local_norm_from_stack,
    local_norm_table,
    outer_sup_from_table,
    weighted_level_stack,
)

__all__ = ["NormReport", "local_func_norm", "full_norm", "band_stack_norm"]


def _piece_stack(pieces: BandStack, params: SpaceParams) -> np.ndarray:
    fields = [np.abs(pieces.pieces[i]) for i in range(pieces.depth + 1)]
    return weighted_level_stack(fields, params, pieces.depth, pieces.ndim)


def local_func_norm(pieces: BandStack, cube: DyadicCube,
                    params: SpaceParams) -> float:
    """Local norm c(E)(P) (or the weighted variant) of band pieces at one cube."""
    stack = _piece_stack(pieces, params)
    return local_norm_from_stack(stack, cube, params, pieces.depth, pieces.ndim)


def band_stack_norm(pieces: BandStack, params: SpaceParams,
                    mvirtual: int = DEFAULT_VIRTUAL_LEVELS,
                    collect_per_cube: bool = False) -> NormReport:
    """Outer norm evaluated directly on precomputed band pieces."""
    stack = _piece_stack(pieces, params)
    tables = local_norm_table(stack, params, pieces.depth, pieces.ndim)
    return outer_sup_from_table(tables, params, pieces.depth, pieces.ndim,
                                mvirtual=mvirtual,
                                collect_per_cube=collect_per_cube)


def full_norm(f: SampledSignal, params: SpaceParams, bank: FilterBank,
              mvirtual: int = DEFAULT_VIRTUAL_LEVELS,
              collect_per_cube: bool = False,
              with_truncation_delta: bool = False) -> NormReport:
    """Full space norm of a sampled signal: band decomposition + double sup."""
    pieces = lp_pieces(f, bank)
    report = band_stack_norm(pieces, params, mvirtual=mvirtual,
                             collect_per_cube=collect_per_cube)
    if with_truncation_delta:
        # value change when the deepest band is dropped (documented truncation)
        shallow = BandStack(
            pieces.pieces[:-1] + [np.zeros_like(pieces.pieces[-1])],
            ndim=pieces.ndim,
        )
        prev = band_stack_norm(shallow, params, mvirtual=mvirtual)
        report.truncation_delta = report.value - prev.value
    return report
