"""Littlewood-Paley filter bank and the dual analysis/synthesis transform pair.

The bank stores Fourier-domain radial profiles ``phi_hat_j`` on the integer
frequency grid of the torus.  Band 0 is the low pass, bands ``1..depth-1``
are telescoped annular differences, and the top band absorbs the residual
tail so the profiles sum to one at every represented frequency.

The base cutoff frequency defaults to 1/4 cycle per domain.  With that
choice each band's support is alias-free under subsampling by its own
corner lattice (band j lives in ``(2**(j-3), 2**(j-1)]`` cycles while the
level-j lattice aliases modulo ``2**j``), which makes the coefficient
transform an exact inverse on the grid.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .fields import BandStack, CoefField, SampledSignal

DEFAULT_F_BASE = 0.25

_DUAL_FLOOR = 0.25


@dataclass(frozen=True)
class ProfileSpec:
    """Radial bump parameters: value 1 below ``f_base``, 0 above ``2*f_base``."""

    f_base: float = DEFAULT_F_BASE
    glue: str = "exp"  # "exp" (C-infinity) or "cos" (raised cosine)

    def __post_init__(self):
        if self.f_base <= 0 or self.f_base > 0.25:
            raise ValueError("f_base must lie in (0, 1/4] for alias-free bands")
        if self.glue not in ("exp", "cos"):
            raise ValueError(f"unknown glue {self.glue!r}")


def bump_profile(r, glue: str = "exp") -> np.ndarray:
    """Radial step h(r): 1 for r <= 1, 0 for r >= 2, smooth in between."""
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros_like(r)
    out[r <= 1.0] = 1.0
    mid = (r > 1.0) & (r < 2.0)
    t = r[mid]
    if glue == "exp":
        g_up = np.exp(-1.0 / (2.0 - t))
        g_dn = np.exp(-1.0 / (t - 1.0))
        out[mid] = g_up / (g_up + g_dn)
    else:
        out[mid] = np.cos(0.5 * np.pi * (t - 1.0)) ** 2
    return out


def frequency_radius(depth: int, ndim: int = 1) -> np.ndarray:
    """|xi| on the integer frequency grid (cycles per domain)."""
    n_side = 1 << depth
    freqs = np.fft.fftfreq(n_side, d=1.0 / n_side)
    sq = None
    for ax in range(ndim):
        shape = [1] * ndim
        shape[ax] = n_side
        term = (freqs * freqs).reshape(shape)
        sq = term if sq is None else sq + term
    return np.sqrt(sq)


class FilterBank:
    """Fourier-domain band profiles and (optionally) the dual system."""

    __slots__ = ("depth", "ndim", "spec", "profiles", "dual_profiles")

    def __init__(self, depth, ndim, spec, profiles, dual_profiles=None):
        self.depth = depth
        self.ndim = ndim
        self.spec = spec
        self.profiles = profiles
        self.dual_profiles = dual_profiles

    @property
    def f_base(self) -> float:
        return self.spec.f_base

    def partition_deviation(self) -> float:
        return float(np.max(np.abs(self.profiles.sum(axis=0) - 1.0)))


def build_filter_bank(depth: int, profile_spec: ProfileSpec | None = None,
                      ndim: int = 1) -> FilterBank:
    """Construct the band profiles for a 2**depth grid.

    Raises if the grid cannot represent the top band (depth < 2).
    """
    if depth < 2:
        raise ValueError("depth must be >= 2 to represent the top band")
    spec = profile_spec or ProfileSpec()
    radius = frequency_radius(depth, ndim)
    # Cumulative low-pass H_j = phi0_hat(2**-j xi); telescoping differences.
    cums = [bump_profile(radius / (spec.f_base * (1 << j)), spec.glue)
            for j in range(depth)]
    profiles = np.empty((depth + 1,) + radius.shape)
    profiles[0] = cums[0]
    for j in range(1, depth):
        profiles[j] = cums[j] - cums[j - 1]
    profiles[depth] = 1.0 - cums[depth - 1]
    return FilterBank(depth, ndim, spec, profiles)


def build_dual_bank(bank: FilterBank) -> FilterBank:
    """Dual profiles psi_hat_j = phi_hat_j / sum_k phi_hat_k**2.

    The denominator stays >= 1/2 wherever the partition of unity holds;
    a smaller value signals a defective profile and raises.
    """
    denom = np.sum(bank.profiles ** 2, axis=0)
    if float(denom.min()) < _DUAL_FLOOR:
        raise ValueError(
            f"profile energy floor {denom.min():.3g} below {_DUAL_FLOOR}; "
            "bad band profile"
        )
    dual = bank.profiles / denom
    return FilterBank(bank.depth, bank.ndim, bank.spec, bank.profiles, dual)


@functools.lru_cache(maxsize=32)
def get_filter_bank(depth: int, ndim: int = 1,
                    f_base: float = DEFAULT_F_BASE,
                    glue: str = "exp") -> FilterBank:
    """Cached fully-built bank (profiles and duals)."""
    bank = build_filter_bank(depth, ProfileSpec(f_base=f_base, glue=glue), ndim)
    return build_dual_bank(bank)


def _check_compat(f: SampledSignal, bank: FilterBank):
    if f.depth != bank.depth or f.ndim != bank.ndim:
        raise ValueError(
            f"signal (n={f.ndim}, D={f.depth}) does not match bank "
            f"(n={bank.ndim}, D={bank.depth})"
        )


def lp_pieces(f: SampledSignal, bank: FilterBank) -> BandStack:
    """Band pieces f * phi_j by spectral multiplication (circular)."""
    _check_compat(f, bank)
    spectrum = np.fft.fftn(f.samples)
    real_input = not np.iscomplexobj(f.samples)
    pieces = []
    for j in range(bank.depth + 1):
        piece = np.fft.ifftn(spectrum * bank.profiles[j])
        pieces.append(piece.real if real_input else piece)
    return BandStack(pieces, ndim=f.ndim)


def _corner_slice(depth: int, level: int, ndim: int):
    stride = 1 << (depth - level)
    return (slice(None, None, stride),) * ndim


def phi_analysis(f: SampledSignal, bank: FilterBank) -> CoefField:
    """Coefficients c(P) = (f * phi_j)(x_P): band pieces at cube corners."""
    stack = lp_pieces(f, bank)
    levels = [stack.pieces[j][_corner_slice(f.depth, j, f.ndim)].copy()
              for j in range(f.depth + 1)]
    return CoefField(levels, ndim=f.ndim)


def phi_synthesis(c: CoefField, bank: FilterBank) -> SampledSignal:
    """Sum of c(Q) psi_Q over all coefficient cubes, via per-level comb spectra.

    psi_Q(x) = psi(l(Q)^{-1}(x - x_Q)) built from the dual profile, so with
    coefficients from :func:`phi_analysis` this inverts exactly on the grid.
    """
    if bank.dual_profiles is None:
        raise ValueError("bank has no dual profiles; call build_dual_bank first")
    if c.depth != bank.depth or c.ndim != bank.ndim:
        raise ValueError("coefficient field does not match bank")
    n_side = 1 << c.depth
    shape = (n_side,) * c.ndim
    spectrum = np.zeros(shape, dtype=np.complex128)
    for j in range(c.depth + 1):
        comb = np.zeros(shape, dtype=np.complex128)
        comb[_corner_slice(c.depth, j, c.ndim)] = c.levels[j]
        spectrum += (2.0 ** (-j * c.ndim)) * bank.dual_profiles[j] * np.fft.fftn(comb)
    out = np.fft.ifftn(spectrum) * float(n_side ** c.ndim)
    if not any(np.iscomplexobj(a) for a in c.levels):
        out = out.real
    return SampledSignal(out, ndim=c.ndim)
