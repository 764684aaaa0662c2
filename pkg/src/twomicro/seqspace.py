"""Dyadic sequence-space norms, smoothing/maximal operators, cube matrices.

The local norm of a coefficient field over a cube P aggregates per-level
fields over levels ``i >= max(level(P), 0)``: B-type takes the ell^q norm
of per-level L^p(P) norms, F-type the L^p(P) norm of the pointwise ell^q
aggregate (with the ``l(P)^{-n/q} L^q(P)`` form when p = inf in the
F family).  The outer norm is a double supremum over anchor cubes Q
containing the reference point and cubes P inside 3Q, or a single
supremum over P for the weighted ("tilde") variant.

All L^p(P) norms are Riemann sums over the grid points of P with cell
volume weights; ``p = inf`` and ``q = inf`` use maxima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .dyadic import (
    DEFAULT_VIRTUAL_LEVELS,
    DyadicCube,
    cubes_containing,
    region_index_ranges,
    torus_distance_grid,
    triple,
)
from .fields import CoefField, NormReport, SampledSignal

INF = math.inf


class NormOverflowError(ArithmeticError):
    """A norm evaluation produced a non-finite intermediate or result."""


@dataclass(frozen=True)
class SpaceParams:
    """Parameter tuple selecting one norm.

    ``family`` is "B" or "F"; ``sprime`` the per-level smoothness weight,
    ``s`` the inner-cube exponent, ``sigma`` the anchor-cube exponent
    (weight exponent for the tilde variant), ``x0`` the reference point.
    """

    family: str
    sprime: float
    p: float
    q: float
    s: float = 0.0
    sigma: float = 0.0
    tilde: bool = False
    x0: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if self.family not in ("B", "F"):
            raise ValueError(f"family must be 'B' or 'F', got {self.family!r}")
        if not (self.p > 0 and self.q > 0):
            raise ValueError("p and q must be positive (math.inf allowed)")
        x0 = self.x0
        if np.isscalar(x0):
            x0 = (float(x0),)
        x0 = tuple(float(v) % 1.0 for v in x0)
        object.__setattr__(self, "x0", x0)

    def j_exponent(self, ndim: int) -> float:
        """Critical index n/min(1,p,q) for F-type, n/min(1,p) for B-type."""
        if self.family == "F":
            return ndim / min(1.0, self.p, self.q)
        return ndim / min(1.0, self.p)

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "tilde": self.tilde,
            "s": self.s,
            "sprime": self.sprime,
            "sigma": self.sigma,
            "p": self.p if self.p != INF else "inf",
            "q": self.q if self.q != INF else "inf",
            "x0": list(self.x0),
        }


def weight(i: int, x, sigma: float, x0) -> float:
    """Two-microlocal weight (2**-i + dist(x0, x))**(-sigma) at a point."""
    from .dyadic import torus_distance

    return (2.0 ** (-i) + torus_distance(x0, x)) ** (-sigma)


def weight_grid(i: int, depth: int, sigma: float, x0,
                ndim: int = 1) -> np.ndarray:
    """The weight evaluated at every grid point."""
    dist = torus_distance_grid(x0, depth, ndim)
    return (2.0 ** (-i) + dist) ** (-sigma)


# ---------------------------------------------------------------------------
# level stacks and block reductions
# ---------------------------------------------------------------------------

def upsample_to_grid(arr: np.ndarray, depth: int) -> np.ndarray:
    """Repeat a level-j cube array onto the 2**depth grid (piecewise constant)."""
    ndim = arr.ndim
    level = arr.shape[0].bit_length() - 1
    factor = 1 << (depth - level)
    out = arr
    for ax in range(ndim):
        out = np.repeat(out, factor, axis=ax)
    return out


def coef_level_stack(c: CoefField) -> np.ndarray:
    """|c| per level, upsampled to the grid: shape (depth+1, *grid)."""
    grid_shape = (1 << c.depth,) * c.ndim
    out = np.empty((c.depth + 1,) + grid_shape)
    for j in range(c.depth + 1):
        out[j] = upsample_to_grid(np.abs(c.levels[j]), c.depth)
    return out


def weighted_level_stack(abs_fields: Sequence[np.ndarray], params: SpaceParams,
                         depth: int, ndim: int) -> np.ndarray:
    """Apply 2**(i s') and, for tilde norms, the two-microlocal weight.

    Scale factors are applied per level before any aggregation so that a
    blow-up is caught here rather than surfacing as silent infinities.
    """
    out = np.empty((depth + 1,) + np.shape(abs_fields[0]))
    dist = None
    if params.tilde:
        dist = torus_distance_grid(params.x0, depth, ndim)
    for i in range(depth + 1):
        factor = 2.0 ** (i * params.sprime)
        if not math.isfinite(factor):
            raise NormOverflowError(f"level factor 2**(i*s') overflows at i={i}")
        field = factor * np.asarray(abs_fields[i])
        if dist is not None:
            field = field * (2.0 ** (-i) + dist) ** (-params.sigma)
        if not np.all(np.isfinite(field)):
            raise NormOverflowError(f"non-finite weighted field at level {i}")
        out[i] = field
    return out


def _block_reduce(x: np.ndarray, level: int, op) -> np.ndarray:
    """Reduce a grid field to one value per level-``level`` cube."""
    ndim = x.ndim
    depth = x.shape[0].bit_length() - 1
    if level == depth:
        return x
    shape = []
    for _ in range(ndim):
        shape.extend([1 << level, 1 << (depth - level)])
    y = x.reshape(shape)
    axes = tuple(2 * a + 1 for a in range(ndim))
    return op(y, axis=axes)


def _lp_pyramid(field: np.ndarray, depth: int, ndim: int, p: float,
                cell_vol: float) -> list[np.ndarray]:
    """Per-level-j arrays of ||field||_{L^p(P)} over all level-j cubes."""
    out: list[np.ndarray] = [None] * (depth + 1)  # type: ignore[list-item]
    if p == INF:
        cur = np.abs(field)
        out[depth] = cur
        for j in range(depth - 1, -1, -1):
            cur = _block_reduce(cur, j, np.max)
            out[j] = cur
        return out
    cur = np.abs(field) ** p * cell_vol
    out[depth] = cur ** (1.0 / p)
    for j in range(depth - 1, -1, -1):
        cur = _block_reduce(cur, j, np.sum)
        out[j] = cur ** (1.0 / p)
    return out


def local_norm_table(stack: np.ndarray, params: SpaceParams, depth: int,
                     ndim: int, base: Optional[np.ndarray] = None
                     ) -> list[np.ndarray]:
    """Local norms for every coefficient cube, one array per level.

    ``stack`` holds the weighted per-level fields; ``base``, when given,
    adds ``||base||_{L^p(P)}`` to every cube's value (used by the
    difference/oscillation functionals).
    """
    cell_vol = 2.0 ** (-depth * ndim)
    p, q = params.p, params.q
    tables: list[np.ndarray] = [None] * (depth + 1)  # type: ignore[list-item]
    if params.family == "B":
        pyramids = [_lp_pyramid(stack[i], depth, ndim, p, cell_vol)
                    for i in range(depth + 1)]
        for j in range(depth + 1):
            vals = np.stack([pyramids[i][j] for i in range(j, depth + 1)])
            if q == INF:
                tables[j] = vals.max(axis=0)
            else:
                tables[j] = (vals ** q).sum(axis=0) ** (1.0 / q)
    else:
        suffix = None
        for j in range(depth, -1, -1):
            layer = stack[j]
            if q == INF:
                suffix = layer if suffix is None else np.maximum(suffix, layer)
            else:
                suffix = layer ** q if suffix is None else suffix + layer ** q
            if p == INF:
                if q == INF:
                    tables[j] = _block_reduce(suffix, j, np.max)
                else:
                    sums = _block_reduce(suffix, j, np.sum) * cell_vol
                    tables[j] = 2.0 ** (j * ndim / q) * sums ** (1.0 / q)
            else:
                agg = suffix if q == INF else suffix ** (1.0 / q)
                sums = _block_reduce(agg ** p, j, np.sum) * cell_vol
                tables[j] = sums ** (1.0 / p)
    if base is not None:
        base_pyr = _lp_pyramid(base, depth, ndim, p, cell_vol)
        tables = [tables[j] + base_pyr[j] for j in range(depth + 1)]
    return tables


def _cube_grid_slice(cube: DyadicCube, depth: int):
    if cube.level <= 0:
        return (slice(None),) * cube.ndim
    stride = 1 << (depth - cube.level)
    return tuple(slice(k * stride, (k + 1) * stride) for k in cube.index)


def _lp_on_slice(field: np.ndarray, sl, p: float, cell_vol: float) -> float:
    vals = np.abs(field[sl])
    if p == INF:
        return float(vals.max())
    return float((vals ** p).sum() * cell_vol) ** (1.0 / p)


def local_norm_from_stack(stack: np.ndarray, cube: DyadicCube,
                          params: SpaceParams, depth: int, ndim: int,
                          base: Optional[np.ndarray] = None) -> float:
    """Single-cube reference path for the local norm (virtual cubes allowed)."""
    if cube.level > depth:
        raise ValueError(f"cube level {cube.level} exceeds depth {depth}")
    cell_vol = 2.0 ** (-depth * ndim)
    j0 = max(cube.level, 0)
    sl = _cube_grid_slice(cube, depth)
    p, q = params.p, params.q
    if j0 > depth:
        return 0.0
    if params.family == "B":
        vals = np.array([_lp_on_slice(stack[i], sl, p, cell_vol)
                         for i in range(j0, depth + 1)])
        result = vals.max() if q == INF else (vals ** q).sum() ** (1.0 / q)
    else:
        sub = stack[j0:depth + 1, ...][(slice(None),) + sl]
        if q == INF:
            agg = sub.max(axis=0)
        else:
            agg = (sub ** q).sum(axis=0) ** (1.0 / q)
        if p == INF:
            if q == INF:
                result = float(agg.max())
            else:
                lq = float((agg ** q).sum() * cell_vol) ** (1.0 / q)
                result = 2.0 ** (cube.level * ndim / q) * lq
        else:
            result = float((agg ** p).sum() * cell_vol) ** (1.0 / p)
    base_val = 0.0
    if base is not None:
        base_val = _lp_on_slice(base, sl, p, cell_vol)
    value = float(result) + base_val
    if not math.isfinite(value):
        raise NormOverflowError("local norm is not finite")
    return value


def local_seq_norm(c: CoefField, cube: DyadicCube, params: SpaceParams) -> float:
    """Local sequence norm c(e)(P) (or weighted variant) at one cube."""
    stack = weighted_level_stack(coef_level_stack(c), params, c.depth, c.ndim)
    return local_norm_from_stack(stack, cube, params, c.depth, c.ndim)


# ---------------------------------------------------------------------------
# outer double supremum
# ---------------------------------------------------------------------------

def outer_sup_from_table(tables: Sequence[np.ndarray], params: SpaceParams,
                         depth: int, ndim: int,
                         mvirtual: int = DEFAULT_VIRTUAL_LEVELS,
                         collect_per_cube: bool = False) -> NormReport:
    """Evaluate the outer supremum given per-cube local norms.

    Non-tilde: sup over anchor cubes Q through x0 (levels -mvirtual..depth)
    and cubes P inside 3Q of ``l(Q)**-sigma l(P)**-s * local(P)``.  Tilde:
    sup over all P of ``l(P)**-s * local(P)``.  Ties resolve to the first
    witness in (level, lexicographic index) order.
    """
    weighted = [2.0 ** (j * params.s) * np.asarray(tables[j])
                for j in range(depth + 1)]
    for j, w in enumerate(weighted):
        if not np.all(np.isfinite(w)):
            raise NormOverflowError(f"non-finite local norm at level {j}")
    best = -INF
    wq: Optional[DyadicCube] = None
    wp: Optional[DyadicCube] = None
    if params.tilde:
        for j in range(depth + 1):
            flat = weighted[j].reshape(-1)
            pos = int(np.argmax(flat))
            if flat[pos] > best:
                best = float(flat[pos])
                wp = DyadicCube(j, np.unravel_index(pos, weighted[j].shape))
        wq = None
    else:
        for lev in range(-mvirtual, depth + 1):
            anchor = cubes_containing(params.x0, [lev])[0]
            qweight = 2.0 ** (lev * params.sigma)
            if not math.isfinite(qweight):
                raise NormOverflowError("anchor weight overflows")
            region = triple(anchor)
            for j in range(depth + 1):
                ranges = region_index_ranges(region, j)
                if any(r.size == 0 for r in ranges):
                    continue
                if ndim == 1:
                    sub = weighted[j][ranges[0]]
                else:
                    sub = weighted[j][np.ix_(*ranges)]
                pos = int(np.argmax(sub))
                cand = qweight * float(sub.reshape(-1)[pos])
                if cand > best:
                    best = cand
                    multi = np.unravel_index(pos, sub.shape)
                    idx = tuple(int(ranges[a][multi[a]]) for a in range(ndim))
                    wq = anchor
                    wp = DyadicCube(j, idx)
    if not math.isfinite(best):
        raise NormOverflowError("outer norm is not finite")
    per_cube = None
    if collect_per_cube:
        per_cube = []
        for j in range(depth + 1):
            arr = np.asarray(tables[j])
            for pos in range(arr.size):
                idx = np.unravel_index(pos, arr.shape)
                per_cube.append((DyadicCube(j, idx), float(arr[idx])))
    return NormReport(value=float(best), witness_Q=wq, witness_P=wp,
                      params=params.to_json_dict(), depth=depth,
                      per_cube=per_cube)


def outer_norm(c: CoefField, params: SpaceParams,
               mvirtual: int = DEFAULT_VIRTUAL_LEVELS,
               collect_per_cube: bool = False) -> NormReport:
    """Full sequence-space norm of a coefficient field with witnesses."""
    stack = weighted_level_stack(coef_level_stack(c), params, c.depth, c.ndim)
    tables = local_norm_table(stack, params, c.depth, c.ndim)
    return outer_sup_from_table(tables, params, c.depth, c.ndim,
                                mvirtual=mvirtual,
                                collect_per_cube=collect_per_cube)


# ---------------------------------------------------------------------------
# smoothing and maximal operators
# ---------------------------------------------------------------------------

def _circ_distance_grid(level: int, ndim: int) -> np.ndarray:
    """Torus distances between cube corners at one level, as an offset grid."""
    m = 1 << level
    offs = np.minimum(np.arange(m), m - np.arange(m)) / m
    sq = None
    for ax in range(ndim):
        shape = [1] * ndim
        shape[ax] = m
        term = (offs * offs).reshape(shape)
        sq = term if sq is None else sq + term
    return np.sqrt(sq)


def star_smoothing(c: CoefField, decay: float) -> CoefField:
    """Per-level smoothing c*(P) = sum_R |c(R)| (1 + l(P)^{-1}|x_P - x_R|)**-decay.

    The sum runs over same-level cubes; ``decay`` must exceed the critical
    index for the smoothed field to stay comparable to the original.
    """
    out = []
    for j in range(c.depth + 1):
        kernel = (1.0 + (1 << j) * _circ_distance_grid(j, c.ndim)) ** (-decay)
        conv = np.fft.ifftn(np.fft.fftn(np.abs(c.levels[j])) *
                            np.fft.fftn(kernel)).real
        out.append(np.maximum(conv, 0.0))
    return CoefField(out, ndim=c.ndim)


def maximal_mt(g: SampledSignal, t: float) -> SampledSignal:
    """Dyadic maximal function: sup over cubes through x of the t-power mean."""
    if not (0 < t <= 1):
        raise ValueError("t must lie in (0, 1]")
    vals = np.abs(g.samples) ** t
    best = vals.copy()
    means = vals
    for j in range(g.depth - 1, -1, -1):
        means = _block_reduce(means, j, np.mean)
        best = np.maximum(best, upsample_to_grid(means, g.depth))
    return SampledSignal(best ** (1.0 / t), ndim=g.ndim)


# ---------------------------------------------------------------------------
# cube-indexed matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlmostDiagonalParams:
    """Decay exponents (r1, r2, L) and constant C of the almost-diagonal bound."""

    r1: float
    r2: float
    L: float
    C: float = 1.0

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0 or self.L <= 0 or self.C <= 0:
            raise ValueError("need r1, r2 >= 0 and L, C > 0")


def level_corners(level: int, ndim: int) -> np.ndarray:
    """Corners of all level cubes, flattened lexicographically: (count, ndim)."""
    m = 1 << level
    axes = [np.arange(m) / m] * ndim
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _corner_distance_block(jq: int, jp: int, ndim: int) -> np.ndarray:
    cq = level_corners(jq, ndim)
    cp = level_corners(jp, ndim)
    diff = cq[:, None, :] - cp[None, :, :]
    diff = np.abs((diff + 0.5) % 1.0 - 0.5)
    return np.sqrt((diff * diff).sum(axis=-1))


def ad_envelope_block(jq: int, jp: int, ad: AlmostDiagonalParams,
                      ndim: int = 1) -> np.ndarray:
    """Almost-diagonal envelope for the (level jq, level jp) block."""
    dist = _corner_distance_block(jq, jp, ndim)
    if jq >= jp:  # l(Q) <= l(P)
        scale = 2.0 ** (-(jq - jp) * ad.r1)
        return scale * (1.0 + (1 << jp) * dist) ** (-ad.L)
    scale = 2.0 ** (-(jp - jq) * ad.r2)
    return scale * (1.0 + (1 << jq) * dist) ** (-ad.L)


class CubeMatrix:
    """Matrix indexed by coefficient cubes, dense or kernel-backed.

    Kernel form supplies blocks lazily per level pair, keeping memory at
    one block; dense form stores the full matrix over the cube enumeration
    (levels ascending, lexicographic index within a level).
    """

    def __init__(self, depth: int, ndim: int = 1,
                 dense: Optional[np.ndarray] = None,
                 kernel: Optional[Callable[[int, int], np.ndarray]] = None):
        if (dense is None) == (kernel is None):
            raise ValueError("provide exactly one of dense or kernel")
        self.depth = depth
        self.ndim = ndim
        counts = [(1 << (j * ndim)) for j in range(depth + 1)]
        self.offsets = np.concatenate([[0], np.cumsum(counts)])
        self.size = int(self.offsets[-1])
        if dense is not None:
            dense = np.asarray(dense)
            if dense.shape != (self.size, self.size):
                raise ValueError(
                    f"dense shape {dense.shape} != ({self.size}, {self.size})"
                )
        self.dense = dense
        self.kernel = kernel

    def block(self, jq: int, jp: int) -> np.ndarray:
        if self.dense is not None:
            return self.dense[self.offsets[jq]:self.offsets[jq + 1],
                              self.offsets[jp]:self.offsets[jp + 1]]
        return self.kernel(jq, jp)

    @classmethod
    def identity(cls, depth: int, ndim: int = 1) -> "CubeMatrix":
        def kern(jq, jp):
            mq = 1 << (jq * ndim)
            mp = 1 << (jp * ndim)
            if jq != jp:
                return np.zeros((mq, mp))
            return np.eye(mq)
        return cls(depth, ndim, kernel=kern)

    @classmethod
    def diagonal_level_scaling(cls, depth: int, factors: Sequence[float],
                               ndim: int = 1) -> "CubeMatrix":
        def kern(jq, jp):
            mq = 1 << (jq * ndim)
            mp = 1 << (jp * ndim)
            if jq != jp:
                return np.zeros((mq, mp))
            return factors[jq] * np.eye(mq)
        return cls(depth, ndim, kernel=kern)


def random_almost_diagonal(depth: int, ad: AlmostDiagonalParams, seed: int,
                           ndim: int = 1) -> CubeMatrix:
    """Random matrix saturating the almost-diagonal envelope.

    Entries are the envelope times independent uniform [-1, 1] draws;
    blocks are regenerated deterministically from (seed, jq, jp).
    """
    def kern(jq, jp):
        env = ad.C * ad_envelope_block(jq, jp, ad, ndim)
        rng = np.random.default_rng((seed, jq, jp))
        return env * rng.uniform(-1.0, 1.0, size=env.shape)
    return CubeMatrix(depth, ndim, kernel=kern)


@dataclass
class ADReport:
    smallest_c: float
    max_violation_ratio: float
    passes: bool
    worst_block: tuple[int, int]


def is_almost_diagonal(matrix: CubeMatrix, ad: AlmostDiagonalParams,
                       rtol: float = 1e-9) -> ADReport:
    """Check both decay inequalities entrywise against the envelope."""
    worst = 0.0
    worst_block = (0, 0)
    for jq in range(matrix.depth + 1):
        for jp in range(matrix.depth + 1):
            env = ad_envelope_block(jq, jp, ad, matrix.ndim)
            ratio = np.abs(matrix.block(jq, jp)) / env
            m = float(ratio.max())
            if m > worst:
                worst = m
                worst_block = (jq, jp)
    return ADReport(
        smallest_c=worst,
        max_violation_ratio=worst / ad.C,
        passes=worst <= ad.C * (1.0 + rtol),
        worst_block=worst_block,
    )


def apply_matrix(matrix: CubeMatrix, c: CoefField) -> CoefField:
    """(Ac)(Q) = sum_P a_{QP} c(P) as an exact finite sum."""
    return apply_matrix_many(matrix, [c])[0]


def apply_matrix_many(matrix: CubeMatrix, fields: Sequence[CoefField]
                      ) -> list[CoefField]:
    """Apply one matrix to several coefficient fields, building blocks once."""
    depth, ndim = matrix.depth, matrix.ndim
    for c in fields:
        if c.depth != depth or c.ndim != ndim:
            raise ValueError("coefficient field does not match matrix index set")
    nf = len(fields)
    ins = [np.stack([np.asarray(c.levels[jp]).ravel() for c in fields], axis=-1)
           for jp in range(depth + 1)]
    outs = [np.zeros(((1 << (jq * ndim)), nf),
                     dtype=np.result_type(*[i.dtype for i in ins]))
            for jq in range(depth + 1)]
    for jq in range(depth + 1):
        for jp in range(depth + 1):
            outs[jq] += matrix.block(jq, jp) @ ins[jp]
    results = []
    for fi in range(nf):
        levels = [outs[jq][:, fi].reshape((1 << jq,) * ndim)
                  for jq in range(depth + 1)]
        results.append(CoefField(levels, ndim=ndim))
    return results


def gram_matrix(fam1, fam2, depth: int, ndim: int = 1) -> CubeMatrix:
    """Normalized pairings min(l(P), l(R))**-n <fam1_P, fam2_R> by quadrature.

    ``fam1`` and ``fam2`` map a :class:`DyadicCube` to its sampled function
    on the grid.  Rows index fam1 cubes, columns fam2 cubes.
    """
    cell_vol = 2.0 ** (-depth * ndim)
    cubes = []
    for j in range(depth + 1):
        m = 1 << j
        if ndim == 1:
            cubes.extend(DyadicCube(j, (k,)) for k in range(m))
        else:
            corners = level_corners(j, ndim) * m
            cubes.extend(DyadicCube(j, tuple(int(v) for v in row))
                         for row in corners)
    rows1 = np.stack([np.asarray(fam1(q)).ravel() for q in cubes])
    rows2 = np.stack([np.asarray(fam2(q)).ravel() for q in cubes])
    gram = (rows1 * cell_vol) @ rows2.T
    levels = np.array([q.level for q in cubes])
    norm = 2.0 ** (np.maximum(levels[:, None], levels[None, :]) * ndim)
    return CubeMatrix(depth, ndim, dense=norm * gram)
