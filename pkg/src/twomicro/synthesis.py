"""Orthonormal periodized wavelets, smooth atoms/molecules, norm equivalence.

The wavelet system is a compactly supported orthonormal family with a
prescribed number of vanishing moments, realized on the grid by the exact
periodized filter cascade (so grid orthonormality holds to rounding
error).  Coefficients follow the dilation-only normalization
``psi_Q(x) = psi(l(Q)^{-1}(x - x_Q))``: the cube coefficient is
``l(Q)^{-n} <f, psi_Q>``, related to the L2-normalized transform by the
factor ``l(Q)^{n/2}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .dyadic import DEFAULT_VIRTUAL_LEVELS, DyadicCube, torus_distance
from .fields import CoefField, SampledSignal
from .lpdecomp import FilterBank, phi_analysis
from .funcnorm import full_norm
from .seqspace import SpaceParams, outer_norm

MAX_VANISHING_MOMENTS = 10


# ---------------------------------------------------------------------------
# filters
# ---------------------------------------------------------------------------

def daubechies_filter(r: int) -> np.ndarray:
    """Minimal-length orthonormal low-pass filter with r vanishing moments.

    Built by spectral factorization of the half-band polynomial; r = 1 is
    the two-tap averaging filter.
    """
    if not (1 <= r <= MAX_VANISHING_MOMENTS):
        raise ValueError(f"r must lie in 1..{MAX_VANISHING_MOMENTS}")
    if r == 1:
        return np.array([1.0, 1.0]) / math.sqrt(2.0)
    # P(y) = sum_{m < r} C(r-1+m, m) y^m, roots give the factorization.
    coeffs = [math.comb(r - 1 + m, m) for m in range(r)]
    yroots = np.roots(coeffs[::-1])
    zroots = []
    for y0 in yroots:
        # y = (2 - z - 1/z)/4  <=>  z**2 + (4y - 2) z + 1 = 0
        b = 4.0 * y0 - 2.0
        disc = np.sqrt(b * b - 4.0 + 0j)
        z1 = (-b + disc) / 2.0
        z2 = (-b - disc) / 2.0
        zroots.append(z1 if abs(z1) < 1.0 else z2)
    poly = np.array([1.0 + 0j])
    for _ in range(r):
        poly = np.convolve(poly, [1.0, 1.0])
    for z0 in zroots:
        poly = np.convolve(poly, [1.0, -z0])
    h = poly.real
    h = h * (math.sqrt(2.0) / h.sum())
    return h


def quadrature_mirror(lowpass: np.ndarray) -> np.ndarray:
    """High-pass companion g[m] = (-1)^m h[L-1-m]."""
    signs = np.where(np.arange(lowpass.size) % 2 == 0, 1.0, -1.0)
    return signs * lowpass[::-1]


def check_orthonormal_filter(lowpass: np.ndarray, tol: float = 1e-10):
    """Validate sum h = sqrt(2) and double-shift orthonormality."""
    h = np.asarray(lowpass, dtype=np.float64)
    if h.size % 2 != 0:
        raise ValueError("filter length must be even")
    if abs(h.sum() - math.sqrt(2.0)) > tol:
        raise ValueError("filter does not sum to sqrt(2)")
    for t in range(h.size // 2):
        val = float(np.dot(h, np.roll(h, 2 * t))) if False else \
            float((h[: h.size - 2 * t] * h[2 * t:]).sum())
        want = 1.0 if t == 0 else 0.0
        if abs(val - want) > tol:
            raise ValueError(f"filter violates shift orthonormality at shift {2*t}")


def load_wavelet_filter(path) -> np.ndarray:
    """Read a low-pass filter from a plain-text table, one coefficient per line."""
    vals = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            vals.append(float(line))
    arr = np.array(vals, dtype=np.float64)
    check_orthonormal_filter(arr)
    return arr


# ---------------------------------------------------------------------------
# periodized cascade
# ---------------------------------------------------------------------------

def _analysis_axis(a: np.ndarray, filt: np.ndarray, axis: int) -> np.ndarray:
    a = np.moveaxis(a, axis, -1)
    m = a.shape[-1]
    idx = (2 * np.arange(m // 2)[:, None] + np.arange(filt.size)[None, :]) % m
    out = a[..., idx] @ filt
    return np.moveaxis(out, -1, axis)


def _synthesis_axis(lo_part: np.ndarray, hi_part: np.ndarray,
                    lo: np.ndarray, hi: np.ndarray, axis: int) -> np.ndarray:
    lo_part = np.moveaxis(lo_part, axis, -1)
    hi_part = np.moveaxis(hi_part, axis, -1)
    half = lo_part.shape[-1]
    m = 2 * half
    out = np.zeros(lo_part.shape[:-1] + (m,))
    idx = (2 * np.arange(half)[:, None] + np.arange(lo.size)[None, :]) % m
    flat_idx = idx.ravel()
    contrib = (lo_part[..., :, None] * lo[None, :] +
               hi_part[..., :, None] * hi[None, :])
    np.add.at(out, (..., flat_idx), contrib.reshape(contrib.shape[:-2] + (-1,)))
    return np.moveaxis(out, -1, axis)


class WaveletSystem:
    """Compactly supported orthonormal wavelet family on the torus grid."""

    __slots__ = ("r", "depth", "ndim", "lowpass", "highpass")

    def __init__(self, r: int, depth: int, ndim: int = 1,
                 lowpass: Optional[np.ndarray] = None):
        if lowpass is None:
            lowpass = daubechies_filter(r)
        else:
            lowpass = np.asarray(lowpass, dtype=np.float64)
            check_orthonormal_filter(lowpass)
        self.r = r
        self.depth = depth
        self.ndim = ndim
        self.lowpass = lowpass
        self.highpass = quadrature_mirror(lowpass)

    @property
    def support_radius(self) -> float:
        return float(self.lowpass.size - 1)

    @property
    def decay_exponent(self) -> float:
        return math.inf  # compact support

    def n_orientations(self) -> int:
        return (1 << self.ndim) - 1

    # -- transform ---------------------------------------------------------

    def dwt(self, samples: np.ndarray):
        """Full periodized transform: (scaling, details[j] for j=0..depth-1)."""
        a = np.asarray(samples, dtype=np.float64)
        details: list = [None] * self.depth
        for j in range(self.depth - 1, -1, -1):
            if self.ndim == 1:
                lo_part = _analysis_axis(a, self.lowpass, 0)
                hi_part = _analysis_axis(a, self.highpass, 0)
                a, details[j] = lo_part, hi_part
            else:
                lo0 = _analysis_axis(a, self.lowpass, 0)
                hi0 = _analysis_axis(a, self.highpass, 0)
                ll = _analysis_axis(lo0, self.lowpass, 1)
                lh = _analysis_axis(lo0, self.highpass, 1)
                hl = _analysis_axis(hi0, self.lowpass, 1)
                hh = _analysis_axis(hi0, self.highpass, 1)
                a, details[j] = ll, (lh, hl, hh)
        return a, details

    def idwt(self, scaling: np.ndarray, details: Sequence) -> np.ndarray:
        a = np.asarray(scaling, dtype=np.float64)
        for j in range(self.depth):
            if self.ndim == 1:
                a = _synthesis_axis(a, details[j], self.lowpass, self.highpass, 0)
            else:
                lh, hl, hh = details[j]
                lo0 = _synthesis_axis(a, lh, self.lowpass, self.highpass, 1)
                hi0 = _synthesis_axis(hl, hh, self.lowpass, self.highpass, 1)
                a = _synthesis_axis(lo0, hi0, self.lowpass, self.highpass, 0)
        return a

    # -- sampled basis functions -------------------------------------------

    def basis_vector(self, cube: DyadicCube, orientation: int = 0) -> np.ndarray:
        """Grid samples of the L2-normalized wavelet for one detail cube."""
        if not (0 <= cube.level < self.depth):
            raise ValueError("detail levels run 0..depth-1 on this grid")
        scaling = np.zeros((1,) * self.ndim)
        details = []
        for j in range(self.depth):
            if self.ndim == 1:
                details.append(np.zeros(1 << j))
            else:
                details.append(tuple(np.zeros((1 << j,) * self.ndim)
                                     for _ in range(3)))
        if self.ndim == 1:
            details[cube.level][cube.index[0]] = 1.0
        else:
            details[cube.level][orientation][cube.index] = 1.0
        vec = self.idwt(scaling, details)
        cell_vol = 2.0 ** (-self.depth * self.ndim)
        return vec / math.sqrt(cell_vol)

    def scaling_vector(self) -> np.ndarray:
        """Grid samples of the (single, periodized) level-0 scaling function."""
        scaling = np.ones((1,) * self.ndim)
        details = []
        for j in range(self.depth):
            if self.ndim == 1:
                details.append(np.zeros(1 << j))
            else:
                details.append(tuple(np.zeros((1 << j,) * self.ndim)
                                     for _ in range(3)))
        vec = self.idwt(scaling, details)
        cell_vol = 2.0 ** (-self.depth * self.ndim)
        return vec / math.sqrt(cell_vol)

    def sampled_mother(self, kind: str = "wavelet"):
        """Mother function samples in its own coordinates: (values, coords, dx).

        Extracted from a coarse-level basis vector so the support does not
        wrap; usable for moment and decay checks (1D only).
        """
        if self.ndim != 1:
            raise NotImplementedError("mother extraction implemented for n=1")
        width = self.support_radius
        jm = max(2, math.ceil(math.log2(max(2.0 * width, 2.0))))
        if jm >= self.depth:
            raise ValueError("depth too small to isolate the mother function")
        if kind == "wavelet":
            vec = self.basis_vector(DyadicCube(jm, (0,)))
        else:
            vec = self.scaling_vector()
            jm = 0
        scale = 2.0 ** (jm / 2.0)
        n_side = 1 << self.depth
        xs = np.arange(n_side) / n_side
        coords = (1 << jm) * xs
        values = vec / scale
        dx = (1 << jm) / n_side
        keep = coords <= width + 1.0
        return values[keep], coords[keep], dx


def build_wavelet_system(r: int, depth: int, ndim: int = 1,
                         filter_coeffs=None) -> WaveletSystem:
    """Orthonormal periodized family with at least r vanishing moments."""
    return WaveletSystem(r, depth, ndim, lowpass=filter_coeffs)


# ---------------------------------------------------------------------------
# analysis / synthesis with the dilation-only normalization
# ---------------------------------------------------------------------------

@dataclass
class WaveletCoeffs:
    """Scaling slice c_k plus per-orientation detail coefficient fields."""

    scaling: np.ndarray
    details: tuple[CoefField, ...]
    ndim: int
    depth: int

    def scaling_field(self) -> CoefField:
        """The scaling slice embedded as a coefficient field (zeros below level 0)."""
        field = CoefField.zeros(self.depth, self.ndim)
        field.levels[0][...] = self.scaling
        return field


def wavelet_analysis(f: SampledSignal, system: WaveletSystem) -> WaveletCoeffs:
    """Cube coefficients l(Q)^{-n} <f, psi_Q> and the level-0 scaling slice.

    Detail levels exist for 0..depth-1 on the grid; the level-depth slot of
    each coefficient field is zero (documented truncation).
    """
    if f.depth != system.depth or f.ndim != system.ndim:
        raise ValueError("signal does not match wavelet system")
    half_vol = math.sqrt(f.cell_volume)
    scaling, details = system.dwt(f.samples)
    n_ori = system.n_orientations()
    fields = []
    for ori in range(n_ori):
        levels = []
        for j in range(f.depth):
            d = details[j] if f.ndim == 1 else details[j][ori]
            levels.append(2.0 ** (j * f.ndim / 2.0) * half_vol * d)
        levels.append(np.zeros((1 << f.depth,) * f.ndim))
        fields.append(CoefField(levels, ndim=f.ndim))
    return WaveletCoeffs(scaling=half_vol * scaling, details=tuple(fields),
                         ndim=f.ndim, depth=f.depth)


def wavelet_synthesis(coeffs: WaveletCoeffs, system: WaveletSystem
                      ) -> SampledSignal:
    """Sum c_k psi_{0,k} + sum c(Q) psi_Q; exact inverse of the analysis."""
    if coeffs.depth != system.depth or coeffs.ndim != system.ndim:
        raise ValueError("coefficients do not match wavelet system")
    half_vol = math.sqrt(2.0 ** (-coeffs.depth * coeffs.ndim))
    for field in coeffs.details:
        if float(np.abs(field.levels[coeffs.depth]).max()) > 0.0:
            raise ValueError(
                "level-depth detail coefficients are not representable on "
                "this grid (detail levels run 0..depth-1)"
            )
    scaling = np.asarray(coeffs.scaling) / half_vol
    details = []
    for j in range(coeffs.depth):
        factor = 2.0 ** (-j * coeffs.ndim / 2.0) / half_vol
        if coeffs.ndim == 1:
            details.append(factor * np.asarray(coeffs.details[0].levels[j]))
        else:
            details.append(tuple(factor * np.asarray(f.levels[j])
                                 for f in coeffs.details))
    return SampledSignal(system.idwt(scaling, details), ndim=coeffs.ndim)


# ---------------------------------------------------------------------------
# atoms and molecules
# ---------------------------------------------------------------------------

class CubeFamily:
    """Per-cube evaluable functions on the grid."""

    def __init__(self, func: Callable[[DyadicCube], np.ndarray], depth: int,
                 ndim: int = 1):
        self._func = func
        self.depth = depth
        self.ndim = ndim

    def __call__(self, cube: DyadicCube) -> np.ndarray:
        return self._func(cube)


class AtomFamily(CubeFamily):
    def __init__(self, func, depth, ndim, r1: int, r2: int):
        super().__init__(func, depth, ndim)
        self.r1 = r1
        self.r2 = r2


class MoleculeFamily(CubeFamily):
    def __init__(self, func, depth, ndim, r1: int, r2: int, decay: float):
        super().__init__(func, depth, ndim)
        self.r1 = r1
        self.r2 = r2
        self.decay = decay


def _smooth_bump(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def make_bump_atoms(depth: int, r1: int, r2: int, ndim: int = 1,
                    seed: Optional[int] = None) -> AtomFamily:
    """Atoms supported in 3Q: bump times polynomial, moments removed.

    The moment conditions are solved on the actual grid quadrature so the
    validator sees residuals at rounding level.  A seed varies the
    polynomial modulation per cube.
    """
    if ndim != 1:
        raise NotImplementedError("test atoms implemented for n=1")
    n_side = 1 << depth
    xs = np.arange(n_side) / n_side

    def func(cube: DyadicCube) -> np.ndarray:
        center = cube.center[0]
        half = 1.5 * cube.side
        t = ((xs - center + 0.5) % 1.0 - 0.5) / half
        bump = _smooth_bump(t)
        if seed is None:
            poly = 1.0 + 0.5 * t
        else:
            rng = np.random.default_rng((seed, cube.level, cube.index[0]))
            cs = rng.uniform(-1.0, 1.0, size=3)
            poly = cs[0] + cs[1] * t + cs[2] * t * t + 1.5
        raw = bump * poly
        if r2 > 0 and cube.level > 0:
            basis = np.stack([bump * t ** b for b in range(r2)])
            m_mat = np.array([[float((basis[b] * t ** g).sum())
                               for b in range(r2)] for g in range(r2)])
            m_vec = np.array([float((raw * t ** g).sum()) for g in range(r2)])
            coef = np.linalg.solve(m_mat, m_vec)
            raw = raw - coef @ basis
        peak = float(np.abs(raw).max())
        return raw / peak if peak > 0 else raw

    return AtomFamily(func, depth, ndim, r1=r1, r2=r2)


def wavelet_molecules(system: WaveletSystem, orientation: int = 0
                      ) -> MoleculeFamily:
    """The wavelet family viewed as molecules (paper normalization).

    Level-0 cubes map to the scaling function so the coarsest layer is
    exempt from moment conditions, matching the molecule definition.
    """
    # dilation-only normalization: psi_Q = 2^{-jn/2} * (L2-normalized vector)
    def func_norm(cube: DyadicCube) -> np.ndarray:
        if cube.level == 0:
            return system.scaling_vector()
        return (2.0 ** (-cube.level * system.ndim / 2.0) *
                system.basis_vector(cube, orientation))

    return MoleculeFamily(func_norm, system.depth, system.ndim,
                          r1=system.r, r2=system.r, decay=system.support_radius)


def _fd_derivative(values: np.ndarray, order: int, spacing: float) -> np.ndarray:
    out = values
    for _ in range(order):
        out = (np.roll(out, -1) - np.roll(out, 1)) / (2.0 * spacing)
    return out


def validate_molecule_family(fam: CubeFamily, r1: int, r2: int, decay: float,
                             l2: Optional[float] = None,
                             levels: Optional[Sequence[int]] = None) -> dict:
    """Measure the smallest admissible constants of the molecule conditions.

    Returns per-condition constants: sup of |m_Q| (and finite-difference
    derivatives up to r1) against the decay envelope, and the largest
    moment residual for orders below r2.  1D grids only.
    """
    if fam.ndim != 1:
        raise NotImplementedError("validator implemented for n=1")
    depth = fam.depth
    n_side = 1 << depth
    h = 1.0 / n_side
    xs = np.arange(n_side) / n_side
    if l2 is None:
        l2 = fam.ndim + r2 + 1.0
    if levels is None:
        levels = range(0, depth)
    c_decay = 0.0
    c_deriv = np.zeros(max(r1, 0))
    max_moment = 0.0
    for j in levels:
        side = 2.0 ** (-j)
        for k in range(1 << j):
            cube = DyadicCube(j, (k,))
            vals = np.asarray(fam(cube))
            dist = np.abs((xs - cube.corner[0] + 0.5) % 1.0 - 0.5)
            env0 = (1.0 + dist / side) ** (-max(decay, l2))
            c_decay = max(c_decay, float(np.max(np.abs(vals) / env0)))
            env = (1.0 + dist / side) ** (-decay)
            for g in range(1, r1 + 1):
                dv = _fd_derivative(vals, g, h)
                bound = side ** (-g) * env
                c_deriv[g - 1] = max(c_deriv[g - 1],
                                     float(np.max(np.abs(dv) / bound)))
            if j > 0 and r2 > 0:
                shift = n_side // 2 - int(cube.corner[0] * n_side)
                local = np.roll(vals, shift)
                y = xs - 0.5  # cube corner now at the window center
                for g in range(r2):
                    max_moment = max(max_moment,
                                     abs(float((local * y ** g).sum() * h)))
    return {
        "c_decay": c_decay,
        "c_deriv": c_deriv.tolist(),
        "max_moment_residual": max_moment,
        "decay": decay,
        "l2": l2,
    }


def validate_atom_family(fam: AtomFamily, tol: float = 0.0,
                         levels: Optional[Sequence[int]] = None) -> dict:
    """Check support in 3Q, scaled derivative bounds, and moment residuals."""
    if fam.ndim != 1:
        raise NotImplementedError("validator implemented for n=1")
    depth = fam.depth
    n_side = 1 << depth
    h = 1.0 / n_side
    xs = np.arange(n_side) / n_side
    if levels is None:
        levels = range(0, depth + 1)
    support_ok = True
    c_deriv = np.zeros(fam.r1 + 1)
    max_moment = 0.0
    for j in levels:
        side = 2.0 ** (-j)
        for k in range(1 << j):
            cube = DyadicCube(j, (k,))
            vals = np.asarray(fam(cube))
            dist = np.abs((xs - cube.center[0] + 0.5) % 1.0 - 0.5)
            outside = dist > 1.5 * side + 1e-12
            if np.any(np.abs(vals[outside]) > tol):
                support_ok = False
            for g in range(fam.r1 + 1):
                dv = vals if g == 0 else _fd_derivative(vals, g, h)
                c_deriv[g] = max(c_deriv[g],
                                 float(np.max(np.abs(dv)) * side ** g))
            if j > 0 and fam.r2 > 0:
                shift = n_side // 2 - int(cube.corner[0] * n_side)
                local = np.roll(vals, shift)
                y = xs - 0.5
                for g in range(fam.r2):
                    max_moment = max(max_moment,
                                     abs(float((local * y ** g).sum() * h)))
    return {
        "support_ok": support_ok,
        "c_deriv": c_deriv.tolist(),
        "max_moment_residual": max_moment,
    }


def atom_synthesis(c: CoefField, fam: CubeFamily) -> SampledSignal:
    """Finite sum over coefficient cubes of c(Q) times the family function."""
    if c.depth != fam.depth or c.ndim != fam.ndim:
        raise ValueError("coefficient field does not match family grid")
    out = np.zeros((1 << c.depth,) * c.ndim)
    for j in range(c.depth + 1):
        level = np.asarray(c.levels[j])
        if not np.any(level):
            continue
        it = np.nditer(level, flags=["multi_index"])
        for v in it:
            if v == 0:
                continue
            cube = DyadicCube(j, it.multi_index)
            out = out + float(v) * np.asarray(fam(cube))
    return SampledSignal(out, ndim=c.ndim)


# ---------------------------------------------------------------------------
# norm equivalence
# ---------------------------------------------------------------------------

def wavelet_norm(coeffs: WaveletCoeffs, params: SpaceParams,
                 mvirtual: int = DEFAULT_VIRTUAL_LEVELS) -> float:
    """Scaling-slice norm plus detail norms, summed over orientations."""
    total = outer_norm(coeffs.scaling_field(), params, mvirtual=mvirtual).value
    for field in coeffs.details:
        total += outer_norm(field, params, mvirtual=mvirtual).value
    return total


def _log2_ratio(a: float, b: float) -> float:
    if a <= 0.0 or b <= 0.0:
        return math.nan
    return math.log2(a / b)


def equivalence_values(f: SampledSignal, bank: FilterBank,
                       system: WaveletSystem,
                       params_list: Sequence[SpaceParams],
                       mvirtual: int = DEFAULT_VIRTUAL_LEVELS) -> list[dict]:
    """Definition/coefficient/wavelet norms for several parameter sets.

    The three transforms are computed once and reused across parameters.
    """
    from .lpdecomp import lp_pieces
    from .funcnorm import band_stack_norm

    pieces = lp_pieces(f, bank)
    phi_coeffs = phi_analysis(f, bank)
    wav = wavelet_analysis(f, system)
    out = []
    for params in params_list:
        v_def = band_stack_norm(pieces, params, mvirtual=mvirtual).value
        v_phi = outer_norm(phi_coeffs, params, mvirtual=mvirtual).value
        v_wav = wavelet_norm(wav, params, mvirtual=mvirtual)
        out.append({
            "definition": v_def,
            "phi": v_phi,
            "wavelet": v_wav,
            "log2_phi_over_definition": _log2_ratio(v_phi, v_def),
            "log2_wavelet_over_definition": _log2_ratio(v_wav, v_def),
            "log2_wavelet_over_phi": _log2_ratio(v_wav, v_phi),
        })
    return out


def equivalence_report(f: SampledSignal, params: SpaceParams,
                       bank: FilterBank, system: WaveletSystem,
                       mvirtual: int = DEFAULT_VIRTUAL_LEVELS) -> dict:
    """Three equivalent norms of one signal plus pairwise log-ratios."""
    return equivalence_values(f, bank, system, [params], mvirtual=mvirtual)[0]
