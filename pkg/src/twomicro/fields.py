"""Value containers shared across the analysis pipeline.

``SampledSignal`` holds grid samples on the torus, ``CoefField`` holds one
coefficient per dyadic cube for levels ``0..depth``, ``BandStack`` the
frequency-band pieces of a signal, and ``NormReport`` the result of an
outer norm evaluation (value plus witness cubes).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dyadic import DyadicCube


class SampledSignal:
    """Samples of a function on the uniform 2**depth grid of [0,1)^n."""

    __slots__ = ("ndim", "depth", "samples")

    def __init__(self, samples, ndim: int | None = None):
        arr = np.asarray(samples)
        if ndim is None:
            ndim = arr.ndim
        if arr.ndim != ndim:
            side = round(arr.size ** (1.0 / ndim))
            arr = arr.reshape((side,) * ndim)
        side = arr.shape[0]
        if any(s != side for s in arr.shape):
            raise ValueError(f"expected a square grid, got shape {arr.shape}")
        depth = int(side).bit_length() - 1
        if side != 1 << depth:
            raise ValueError(f"grid side {side} is not a power of two")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples contain non-finite values")
        if not np.iscomplexobj(arr):
            arr = arr.astype(np.float64, copy=False)
        self.ndim = ndim
        self.depth = depth
        self.samples = arr

    @property
    def grid_size(self) -> int:
        return self.samples.size

    @property
    def cell_volume(self) -> float:
        return 2.0 ** (-self.depth * self.ndim)

    def copy_with(self, samples) -> "SampledSignal":
        return SampledSignal(samples, ndim=self.ndim)

    def __repr__(self):
        return f"SampledSignal(n={self.ndim}, depth={self.depth})"


class CoefField:
    """Dyadic-cube coefficients c(R) for levels 0..depth.

    ``levels[j]`` has shape ``(2**j,) * ndim``; entry ``levels[j][k]`` is the
    coefficient of the cube with corner ``2**-j * k``.
    """

    __slots__ = ("ndim", "depth", "levels")

    def __init__(self, levels: Sequence[np.ndarray], ndim: int | None = None):
        lv = []
        for j, arr in enumerate(levels):
            arr = np.asarray(arr)
            if ndim is None:
                ndim = arr.ndim if arr.ndim > 0 else 1
            want = (1 << j,) * ndim
            arr = arr.reshape(want)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"level {j} contains non-finite values")
            if not np.iscomplexobj(arr):
                arr = arr.astype(np.float64, copy=False)
            lv.append(arr)
        self.ndim = ndim
        self.depth = len(lv) - 1
        self.levels = lv

    @classmethod
    def zeros(cls, depth: int, ndim: int = 1) -> "CoefField":
        return cls([np.zeros((1 << j,) * ndim) for j in range(depth + 1)], ndim=ndim)

    def value(self, cube: DyadicCube) -> complex | float:
        if not (0 <= cube.level <= self.depth):
            raise ValueError(f"cube level {cube.level} outside [0, {self.depth}]")
        return self.levels[cube.level][cube.index]

    def with_value(self, cube: DyadicCube, v) -> "CoefField":
        out = [a.copy() for a in self.levels]
        out[cube.level][cube.index] = v
        return CoefField(out, ndim=self.ndim)

    def abs(self) -> "CoefField":
        return CoefField([np.abs(a) for a in self.levels], ndim=self.ndim)

    def scale(self, factor: float) -> "CoefField":
        return CoefField([factor * a for a in self.levels], ndim=self.ndim)

    def to_json_dict(self) -> dict:
        return {
            "n": self.ndim,
            "D": self.depth,
            "levels": [a.tolist() for a in self.levels],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CoefField":
        return cls([np.asarray(a) for a in d["levels"]], ndim=int(d["n"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "CoefField":
        return cls.from_json_dict(json.loads(text))

    def __repr__(self):
        return f"CoefField(n={self.ndim}, depth={self.depth})"


class BandStack:
    """Frequency-band pieces ``pieces[j] = f * phi_j`` for ``j = 0..depth``."""

    __slots__ = ("ndim", "depth", "pieces")

    def __init__(self, pieces: Sequence[np.ndarray], ndim: int):
        self.pieces = [np.asarray(p) for p in pieces]
        self.ndim = ndim
        self.depth = len(self.pieces) - 1

    def piece(self, j: int) -> np.ndarray:
        return self.pieces[j]

    def total(self) -> np.ndarray:
        out = np.zeros_like(self.pieces[0])
        for p in self.pieces:
            out = out + p
        return out


def _cube_json(cube: Optional[DyadicCube]):
    if cube is None:
        return None
    return {"level": cube.level, "k": list(cube.index)}


@dataclass
class NormReport:
    """Outer norm value with the witness cubes achieving the supremum."""

    value: float
    witness_Q: Optional[DyadicCube]
    witness_P: Optional[DyadicCube]
    params: dict
    depth: int
    per_cube: Optional[list] = None
    truncation_delta: Optional[float] = None

    def to_json_dict(self) -> dict:
        out = {
            "schema": "v1",
            "value": self.value,
            "witness_Q": _cube_json(self.witness_Q),
            "witness_P": _cube_json(self.witness_P),
            "params": self.params,
            "depth": self.depth,
        }
        if self.truncation_delta is not None:
            out["truncation_delta"] = self.truncation_delta
        if self.per_cube is not None:
            out["per_cube"] = [
                {"P": _cube_json(p), "value": v} for p, v in self.per_cube
            ]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)
