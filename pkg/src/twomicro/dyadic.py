"""Dyadic cube lattice on the periodic unit domain.

All geometry lives on the torus [0, 1)^n.  Cubes at level ``l >= 0`` have
side ``2**-l`` and corner ``2**-l * k`` with the integer index reduced
modulo ``2**l`` per axis.  Negative levels are "virtual" coarse cubes
(a single cube per level, index 0) used only as outer-supremum anchors;
their tripled region saturates to the whole torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_DEPTH = 10
DEFAULT_VIRTUAL_LEVELS = 4

_EPS = 1e-12


def _as_point(x) -> tuple[float, ...]:
    if np.isscalar(x):
        return (float(x),)
    return tuple(float(v) for v in x)


@dataclass(frozen=True)
class DyadicCube:
    """Cube ``[0, 2**-level)^n + 2**-level * index`` on the torus."""

    level: int
    index: tuple[int, ...]

    def __post_init__(self):
        idx = self.index
        if np.isscalar(idx):
            idx = (int(idx),)
        idx = tuple(int(k) for k in idx)
        if self.level < 0:
            idx = (0,) * len(idx)
        else:
            m = 1 << self.level
            idx = tuple(k % m for k in idx)
        object.__setattr__(self, "index", idx)

    @property
    def ndim(self) -> int:
        return len(self.index)

    @property
    def side(self) -> float:
        return 2.0 ** (-self.level)

    @property
    def corner(self) -> tuple[float, ...]:
        return tuple(k * self.side for k in self.index)

    @property
    def center(self) -> tuple[float, ...]:
        half = 0.5 * self.side
        return tuple(c + half for c in self.corner)

    def contains(self, x) -> bool:
        """Point membership; virtual cubes cover the whole torus."""
        pt = _as_point(x)
        if self.level < 0:
            return True
        for xi, ci in zip(pt, self.corner):
            xi = xi % 1.0
            if not (ci <= xi < ci + self.side):
                return False
        return True


@dataclass(frozen=True)
class CubeRegion:
    """Axis-aligned cube region (same half-width per axis) on the torus."""

    center: tuple[float, ...]
    half_width: float
    saturated: bool

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center))

    @property
    def ndim(self) -> int:
        return len(self.center)

    def contains_point(self, x) -> bool:
        if self.saturated:
            return True
        pt = _as_point(x)
        for xi, ci in zip(pt, self.center):
            d = abs((xi - ci + 0.5) % 1.0 - 0.5)
            if d > self.half_width + _EPS:
                return False
        return True


def torus_distance(x, y) -> float:
    """Euclidean distance with each coordinate difference wrapped to [0, 1/2]."""
    px, py = _as_point(x), _as_point(y)
    acc = 0.0
    for a, b in zip(px, py):
        d = abs((a - b + 0.5) % 1.0 - 0.5)
        acc += d * d
    return math.sqrt(acc)


def torus_distance_grid(x0, depth: int, ndim: int = 1) -> np.ndarray:
    """Distances from every grid point of the 2**depth lattice to ``x0``."""
    pt = _as_point(x0)
    if len(pt) != ndim:
        raise ValueError(f"x0 has {len(pt)} coordinates, expected {ndim}")
    n_side = 1 << depth
    coords = np.arange(n_side) / n_side
    sq = None
    for ax in range(ndim):
        d = np.abs((coords - pt[ax] + 0.5) % 1.0 - 0.5)
        shape = [1] * ndim
        shape[ax] = n_side
        term = (d * d).reshape(shape)
        sq = term if sq is None else sq + term
    return np.sqrt(sq)


def cube_geometry(cube: DyadicCube, level_range: tuple[int, int] | None = None):
    """Return ``(side, corner)``; optionally enforce a configured level window."""
    if level_range is not None:
        lo, hi = level_range
        if not (lo <= cube.level <= hi):
            raise ValueError(f"cube level {cube.level} outside [{lo}, {hi}]")
    corner = cube.corner
    if cube.ndim == 1:
        return cube.side, corner[0]
    return cube.side, corner


def triple(cube: DyadicCube) -> CubeRegion:
    """The 3Q region: same center, three times the side, on the torus."""
    side = cube.side
    return CubeRegion(
        center=cube.center,
        half_width=1.5 * side,
        saturated=3.0 * side >= 1.0,
    )


def cubes_containing(x0, levels: Iterable[int]) -> list[DyadicCube]:
    """The unique cube through ``x0`` at each requested level.

    For levels >= 0 the index is ``floor(2**level * x0)`` per axis; every
    negative level yields the single virtual cube.
    """
    pt = _as_point(x0)
    out = []
    for lev in levels:
        if lev < 0:
            out.append(DyadicCube(lev, (0,) * len(pt)))
        else:
            m = 1 << lev
            idx = tuple(int(math.floor((xi % 1.0) * m)) % m for xi in pt)
            out.append(DyadicCube(lev, idx))
    return out


def _axis_index_range(center: float, half_width: float, level: int) -> np.ndarray:
    """Sorted level-``level`` indices k whose closed cell fits the closed interval."""
    m = 1 << level
    lo = center - half_width
    hi = center + half_width
    k_lo = math.ceil(lo * m - _EPS)
    k_hi = math.floor(hi * m + _EPS) - 1
    count = k_hi - k_lo + 1
    if count <= 0:
        return np.empty(0, dtype=np.int64)
    if count >= m:
        return np.arange(m, dtype=np.int64)
    ks = (np.arange(k_lo, k_hi + 1, dtype=np.int64)) % m
    ks.sort()
    return ks


def region_index_ranges(region: CubeRegion, level: int) -> list[np.ndarray]:
    """Per-axis sorted index arrays of the level cubes inside the region."""
    if level < 0:
        raise ValueError("region enumeration requires level >= 0")
    m = 1 << level
    if region.saturated:
        return [np.arange(m, dtype=np.int64) for _ in range(region.ndim)]
    return [
        _axis_index_range(c, region.half_width, level) for c in region.center
    ]


def cubes_in_region(region: CubeRegion, level: int) -> Iterator[DyadicCube]:
    """All level cubes whose closed cube lies in the closed region, k-lexicographic."""
    ranges = region_index_ranges(region, level)
    if any(r.size == 0 for r in ranges):
        return
    if region.ndim == 1:
        for k in ranges[0]:
            yield DyadicCube(level, (int(k),))
        return
    grids = np.meshgrid(*ranges, indexing="ij")
    stacked = np.stack([g.ravel() for g in grids], axis=-1)
    for row in stacked:
        yield DyadicCube(level, tuple(int(v) for v in row))


def cube_in_region(cube: DyadicCube, region: CubeRegion) -> bool:
    """Closed-cube containment in the closed region (torus wrap aware)."""
    if region.saturated:
        return True
    if cube.level < 0:
        return False
    half_side = 0.5 * cube.side
    for cc, rc in zip(cube.center, region.center):
        d = abs((cc - rc + 0.5) % 1.0 - 0.5)
        if d + half_side > region.half_width + _EPS:
            return False
    return True
