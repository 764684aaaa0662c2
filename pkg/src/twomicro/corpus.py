"""Fixture signals and seeded random generators for tests and suites.

Model functions with known local regularity (cusp, chirp, lacunary sum)
are sampled pointwise on the grid; the aliasing in the deepest octave is
accepted and documented.  Random signals and coefficient fields are fully
determined by their seed.
"""

from __future__ import annotations

import math

import numpy as np

from .fields import CoefField, SampledSignal


def _grid(depth: int) -> np.ndarray:
    n_side = 1 << depth
    return np.arange(n_side) / n_side


def _torus_dist(xs: np.ndarray, x0: float) -> np.ndarray:
    return np.abs((xs - x0 + 0.5) % 1.0 - 0.5)


def cusp(depth: int, alpha: float = 0.5, x0: float = 0.5) -> SampledSignal:
    """|x - x0|**alpha on the torus: pointwise regularity alpha at x0."""
    return SampledSignal(_torus_dist(_grid(depth), x0) ** alpha)


def chirp(depth: int, alpha: float = 0.8, beta: float = 1.0,
          x0: float = 0.5) -> SampledSignal:
    """|x - x0|**alpha sin(|x - x0|**-beta): oscillating singularity at x0."""
    d = _torus_dist(_grid(depth), x0)
    safe = np.where(d > 0, d, 1.0)
    vals = np.where(d > 0, d ** alpha * np.sin(safe ** (-beta)), 0.0)
    return SampledSignal(vals)


def weierstrass(depth: int, alpha: float = 0.5) -> SampledSignal:
    """Lacunary cosine sum with uniform Hoelder exponent alpha."""
    xs = _grid(depth)
    out = np.zeros_like(xs)
    for m in range(depth):
        out += 2.0 ** (-alpha * m) * np.cos(2.0 * np.pi * (1 << m) * xs + 0.7 * m)
    return SampledSignal(out)


def random_wavelet_series(depth: int, seed: int = 0, hoelder: float = 0.7,
                          r: int = 3) -> SampledSignal:
    """Seeded random detail coefficients with 2**(-j(H+1/2)) decay, synthesized."""
    from .synthesis import build_wavelet_system

    rng = np.random.default_rng(seed)
    system = build_wavelet_system(r, depth, 1)
    scaling = rng.normal(size=(1,))
    details = []
    for j in range(depth):
        scale = 2.0 ** (-j * (hoelder + 0.5))
        details.append(scale * rng.normal(size=(1 << j,)))
    return SampledSignal(system.idwt(scaling, details))


def bandlimited_noise(depth: int, seed: int = 0,
                      cutoff: int | None = None) -> SampledSignal:
    """Random real signal with spectrum supported in |xi| <= cutoff."""
    n_side = 1 << depth
    if cutoff is None:
        cutoff = n_side // 8
    rng = np.random.default_rng(seed)
    spectrum = np.zeros(n_side, dtype=np.complex128)
    freqs = np.fft.fftfreq(n_side, d=1.0 / n_side)
    active = np.abs(freqs) <= cutoff
    spectrum[active] = rng.normal(size=active.sum()) + \
        1j * rng.normal(size=active.sum())
    # hermitian symmetry for a real signal
    conj_idx = (-np.arange(n_side)) % n_side
    spectrum = 0.5 * (spectrum + np.conj(spectrum[conj_idx]))
    return SampledSignal(np.fft.ifft(spectrum).real * math.sqrt(n_side))


def fixture_signals(depth: int, x0: float = 0.5) -> dict[str, SampledSignal]:
    """The five standard fixtures at one grid depth."""
    return {
        "cusp": cusp(depth, 0.5, x0),
        "chirp": chirp(depth, 0.8, 1.0, x0),
        "weierstrass": weierstrass(depth, 0.5),
        "wavelet_series": random_wavelet_series(depth, seed=11),
        "bandlimited": bandlimited_noise(depth, seed=7),
    }


def random_signals(depth: int, count: int, base_seed: int = 0
                   ) -> list[SampledSignal]:
    """Seeded random corpus: band-limited noise at varying cutoffs."""
    out = []
    n_side = 1 << depth
    for idx in range(count):
        cutoff = max(4, n_side >> (2 + idx % 3))
        out.append(bandlimited_noise(depth, seed=base_seed + 1000 + idx,
                                     cutoff=cutoff))
    return out


def random_coef_field(depth: int, seed: int = 0, decay: float = 0.5,
                      ndim: int = 1) -> CoefField:
    """Seeded coefficient field with per-level scale 2**(-j*decay)."""
    rng = np.random.default_rng(seed)
    levels = []
    for j in range(depth + 1):
        scale = 2.0 ** (-j * decay)
        levels.append(scale * rng.normal(size=(1 << j,) * ndim))
    return CoefField(levels, ndim=ndim)
