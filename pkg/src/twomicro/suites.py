"""Executable property suites: embeddings, almost-diagonal boundedness,
operator mapping, and difference/oscillation equivalences.

Each suite returns a JSON-able result with one entry per check.  Exact
inequalities are asserted with arithmetic slack only; theorem-level
equivalences are asserted as measured constants that stay flat as the
grid is refined (log-slope fits across depths).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .corpus import fixture_signals, random_coef_field, random_signals
from .dyadic import DEFAULT_VIRTUAL_LEVELS, DyadicCube, cubes_containing
from .fields import CoefField, SampledSignal
from .funcnorm import full_norm
from .lpdecomp import get_filter_bank
from .operators import (
    DifferenceSpec,
    apply_multiplier,
    bessel_potential,
    compute_difference_fields,
    difference_norms,
    hilbert_multiplier,
    kth_difference,
    local_mean_difference,
    sup_difference,
    validate_cz_kernel,
    CZKernelSample,
)
from .seqspace import (
    AlmostDiagonalParams,
    SpaceParams,
    apply_matrix_many,
    local_seq_norm,
    outer_norm,
    random_almost_diagonal,
    star_smoothing,
)

INF = math.inf
EXACT_SLACK = 1e-12


@dataclass
class RunConfig:
    """Deterministic run parameters shared by the CLI and the suites."""

    depth: int = 10
    mvirtual: int = DEFAULT_VIRTUAL_LEVELS
    ndim: int = 1
    seed: int = 0
    x0: tuple[float, ...] = (0.5,)
    n_random_fields: int = 8
    n_kernels: int = 8
    trend_depths: tuple[int, ...] = (6, 8, 10)
    corpus: tuple[str, ...] = ("cusp", "chirp", "weierstrass",
                              "wavelet_series", "bandlimited")
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (4 <= self.depth <= 14):
            raise ValueError("depth must lie in [4, 14]")
        if self.ndim not in (1, 2):
            raise ValueError("ndim must be 1 or 2")
        if np.isscalar(self.x0):
            self.x0 = (float(self.x0),)

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def corpus_signals(self, depth: Optional[int] = None
                       ) -> dict[str, SampledSignal]:
        depth = depth or self.depth
        all_fix = fixture_signals(depth, x0=self.x0[0])
        out = {k: v for k, v in all_fix.items() if k in self.corpus}
        if not out:
            raise ValueError("empty corpus selection")
        return out


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_json_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteResult:
    name: str
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json_dict(self):
        return {
            "schema": "v1",
            "suite": self.name,
            "passed": self.passed,
            "checks": [c.to_json_dict() for c in self.checks],
        }


def log_slope(depths: Sequence[int], values: Sequence[float]) -> float:
    """Least-squares slope of log2(value) against depth."""
    xs = np.asarray(depths, dtype=float)
    ys = np.log2(np.maximum(np.asarray(values, dtype=float), 1e-300))
    xm, ym = xs.mean(), ys.mean()
    return float(((xs - xm) * (ys - ym)).sum() / ((xs - xm) ** 2).sum())


def _sample_cubes(depth: int, rng: np.random.Generator, count: int
                  ) -> list[DyadicCube]:
    cubes = [DyadicCube(0, (0,))]
    for _ in range(count):
        lev = int(rng.integers(1, depth + 1))
        cubes.append(DyadicCube(lev, (int(rng.integers(0, 1 << lev)),)))
    return cubes


# ---------------------------------------------------------------------------
# embeddings (exact inequalities)
# ---------------------------------------------------------------------------

def suite_embeddings(config: RunConfig) -> SuiteResult:
    """Exact-inequality chain over random coefficient fields.

    Monotonicity in q, the B/F comparison from the integral triangle
    inequality, the anchor-cube lower bound for s <= 0, the pointwise
    weight bound for the tilde variant, and |c(P)| <= c*(P).
    """
    rng = np.random.default_rng(config.seed)
    depth = config.depth
    slack = config.tol("exact", EXACT_SLACK)
    fields = [random_coef_field(depth, seed=config.seed + i,
                                decay=float(rng.uniform(0.1, 0.9)))
              for i in range(config.n_random_fields)]
    cubes = _sample_cubes(depth, rng, 6)
    x0 = config.x0
    checks = []

    worst_q = 0.0
    worst_bf = 0.0
    worst_tilde = 0.0
    for c in fields:
        for cube in cubes:
            for fam in ("B", "F"):
                for tilde in (False, True):
                    base = dict(family=fam, sprime=0.4, p=2.0, q=1.0,
                                sigma=0.5, tilde=tilde, x0=x0)
                    v1 = local_seq_norm(c, cube, SpaceParams(**base))
                    v2 = local_seq_norm(c, cube,
                                        SpaceParams(**{**base, "q": 2.0}))
                    vinf = local_seq_norm(c, cube,
                                          SpaceParams(**{**base, "q": INF}))
                    scale = max(v1, 1e-30)
                    worst_q = max(worst_q, (v2 - v1) / scale,
                                  (vinf - v2) / scale)
            # B/F comparison at q <= p and p <= q
            for (p, q) in ((2.0, 1.0), (1.0, 2.0)):
                pb = SpaceParams(family="B", sprime=0.4, p=p, q=q, x0=x0)
                pf = SpaceParams(family="F", sprime=0.4, p=p, q=q, x0=x0)
                vb = local_seq_norm(c, cube, pb)
                vf = local_seq_norm(c, cube, pf)
                scale = max(vb, vf, 1e-30)
                if q <= p:
                    worst_bf = max(worst_bf, (vf - vb) / scale)
                else:
                    worst_bf = max(worst_bf, (vb - vf) / scale)
            # tilde local norm <= non-tilde with s' + sigma (sigma >= 0)
            sigma = 0.5
            pt = SpaceParams(family="B", sprime=0.4, p=2.0, q=2.0,
                             sigma=sigma, tilde=True, x0=x0)
            pn = SpaceParams(family="B", sprime=0.4 + sigma, p=2.0, q=2.0,
                             x0=x0)
            vt = local_seq_norm(c, cube, pt)
            vn = local_seq_norm(c, cube, pn)
            worst_tilde = max(worst_tilde, (vt - vn) / max(vn, 1e-30))
    checks.append(CheckResult(
        "lq_monotonicity", worst_q <= slack,
        f"max relative excess {worst_q:.3e}"))
    checks.append(CheckResult(
        "bf_minkowski", worst_bf <= slack,
        f"max relative excess {worst_bf:.3e}"))
    checks.append(CheckResult(
        "tilde_weight_bound", worst_tilde <= slack,
        f"max relative excess {worst_tilde:.3e}"))

    # anchor-cube lower bound for s <= 0: outer >= l(Q)^-(sigma+s) local(Q)
    worst_lb = 0.0
    for c in fields[:4]:
        params = SpaceParams(family="B", sprime=0.4, p=2.0, q=2.0,
                             s=-0.3, sigma=0.5, x0=x0)
        outer = outer_norm(c, params, mvirtual=config.mvirtual).value
        for anchor in cubes_containing(x0, range(0, depth + 1)):
            local = local_seq_norm(c, anchor, params)
            bound = 2.0 ** (anchor.level * (params.sigma + params.s)) * local
            worst_lb = max(worst_lb, (bound - outer) / max(outer, 1e-30))
    checks.append(CheckResult(
        "anchor_lower_bound", worst_lb <= slack,
        f"max relative excess {worst_lb:.3e}"))

    # |c(P)| <= c*(P) pointwise
    worst_star = 0.0
    for c in fields:
        smoothed = star_smoothing(c, decay=2.0)
        for j in range(depth + 1):
            gap = np.abs(c.levels[j]) - smoothed.levels[j]
            worst_star = max(worst_star, float(gap.max()))
    checks.append(CheckResult(
        "star_domination", worst_star <= slack,
        f"max pointwise excess {worst_star:.3e}"))
    return SuiteResult("embeddings", checks)


# ---------------------------------------------------------------------------
# almost-diagonal boundedness
# ---------------------------------------------------------------------------

def suite_almost_diagonal(config: RunConfig,
                          bounded_params: Optional[AlmostDiagonalParams] = None,
                          control_params: Optional[AlmostDiagonalParams] = None
                          ) -> SuiteResult:
    """Boundedness trend of envelope-saturating random matrices.

    For exponents above the critical line the operator-norm proxy
    max_c |Ac| / |c| stays flat in depth; the negative control with decay
    below the dimension grows.  Positive-entry kernels and fields keep
    cancellation out of the statistic.
    """
    slope_tol = config.tol("ad_slope", 0.15)
    control_slope = config.tol("ad_control_slope", 0.3)
    if bounded_params is None:
        bounded_params = AlmostDiagonalParams(r1=2.0, r2=2.0, L=2.5)
    if control_params is None:
        control_params = AlmostDiagonalParams(r1=2.0, r2=2.0, L=0.5)
    space = [
        SpaceParams(family="B", sprime=0.5, p=2.0, q=2.0, sigma=0.25,
                    x0=config.x0),
        SpaceParams(family="F", sprime=0.5, p=2.0, q=2.0, sigma=0.25,
                    x0=config.x0),
    ]
    checks = []
    for label, ad, want_bounded in (
        ("bounded", bounded_params, True),
        ("negative_control", control_params, False),
    ):
        worst_slope = -INF
        best_slope = INF
        for ki in range(config.n_kernels):
            ratios_by_depth = []
            for depth in config.trend_depths:
                base = random_almost_diagonal(depth, ad,
                                              seed=config.seed + 7 * ki)

                def kern(jq, jp, base=base):
                    return np.abs(base.block(jq, jp))

                from .seqspace import CubeMatrix
                matrix = CubeMatrix(depth, config.ndim, kernel=kern)
                fields = [random_coef_field(depth, seed=config.seed + 100 + fi,
                                            decay=0.5)
                          for fi in range(config.n_random_fields)]
                fields = [CoefField([np.abs(a) for a in c.levels])
                          for c in fields]
                outs = apply_matrix_many(matrix, fields)
                worst = 0.0
                for params in space:
                    for c, ac in zip(fields, outs):
                        denom = outer_norm(c, params,
                                           mvirtual=config.mvirtual).value
                        num = outer_norm(ac, params,
                                         mvirtual=config.mvirtual).value
                        worst = max(worst, num / max(denom, 1e-30))
                ratios_by_depth.append(worst)
            slope = log_slope(config.trend_depths, ratios_by_depth)
            worst_slope = max(worst_slope, slope)
            best_slope = min(best_slope, slope)
        if want_bounded:
            ok = abs(worst_slope) <= slope_tol and abs(best_slope) <= slope_tol
            checks.append(CheckResult(
                "bounded_log_slope", ok,
                f"slopes in [{best_slope:+.3f}, {worst_slope:+.3f}], "
                f"tol {slope_tol}"))
        else:
            ok = best_slope > control_slope
            checks.append(CheckResult(
                "negative_control_slope", ok,
                f"min slope {best_slope:+.3f} > {control_slope}"))
    return SuiteResult("almost-diagonal", checks)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def _norm_value(f: SampledSignal, params: SpaceParams, mvirtual: int) -> float:
    bank = get_filter_bank(f.depth, f.ndim)
    return full_norm(f, params, bank, mvirtual=mvirtual).value


def suite_operators(config: RunConfig,
                    mus: tuple[float, ...] = (-1.0, 0.5, 1.0)) -> SuiteResult:
    """Smoothness-lift mapping ratios, multiplier invariance, kernel bounds."""
    slope_tol = config.tol("op_slope", 0.15)
    checks = []
    depths = [d for d in config.trend_depths if d >= 6]
    sig_depth = max(depths)

    # exact multiplier inversion
    f = config.corpus_signals(sig_depth)["bandlimited"]
    rt = bessel_potential(bessel_potential(f, 1.0), -1.0)
    err = float(np.max(np.abs(rt.samples - f.samples)) /
                max(np.max(np.abs(f.samples)), 1e-30))
    checks.append(CheckResult("bessel_round_trip", err < 1e-10,
                              f"relative error {err:.3e}"))

    param_sets = [
        SpaceParams(family="B", sprime=0.3, p=2.0, q=2.0, x0=config.x0),
        SpaceParams(family="F", sprime=0.3, p=2.0, q=2.0, x0=config.x0),
        SpaceParams(family="B", sprime=0.3, p=2.0, q=2.0, sigma=0.5,
                    tilde=True, x0=config.x0),
    ]
    for mu in mus:
        worst = 0.0
        for params in param_sets:
            target = replace(params, sprime=params.sprime - mu)
            for name in ("cusp", "weierstrass"):
                ratios = []
                for depth in depths:
                    g = config.corpus_signals(depth)[name]
                    num = _norm_value(bessel_potential(g, mu), target,
                                      config.mvirtual)
                    den = _norm_value(g, params, config.mvirtual)
                    ratios.append(num / max(den, 1e-30))
                worst = max(worst, abs(log_slope(depths, ratios)))
        checks.append(CheckResult(
            f"bessel_mapping_mu_{mu}", worst <= slope_tol,
            f"max |log-slope| {worst:.3f}, tol {slope_tol}"))

    # Hilbert-type convolution instance: norm preservation + kernel bounds
    worst = 0.0
    for params in param_sets:
        for name in ("cusp", "weierstrass"):
            ratios = []
            for depth in depths:
                g = config.corpus_signals(depth)[name]
                hg = apply_multiplier(g, hilbert_multiplier(depth))
                num = _norm_value(hg, params, config.mvirtual)
                den = _norm_value(g, params, config.mvirtual)
                ratios.append(num / max(den, 1e-30))
            worst = max(worst, abs(log_slope(depths, ratios)))
    checks.append(CheckResult(
        "hilbert_mapping", worst <= slope_tol,
        f"max |log-slope| {worst:.3f}, tol {slope_tol}"))

    kernel = CZKernelSample.from_multiplier(hilbert_multiplier(sig_depth),
                                            r1=1, r2=1, eps=0.5)
    rep = validate_cz_kernel(kernel)
    worst_slack = max(v["slack"] for v in rep["conditions"].values())
    checks.append(CheckResult(
        "hilbert_kernel_bounds", rep["passes"],
        f"max envelope slack {worst_slack:.2f}"))
    return SuiteResult("operators", checks)


# ---------------------------------------------------------------------------
# differences and oscillations
# ---------------------------------------------------------------------------

def suite_differences(config: RunConfig, k: int = 2,
                      sprimes: tuple[float, ...] = (0.3, 0.6),
                      ps: tuple[float, ...] = (1.0, 2.0, INF)) -> SuiteResult:
    """Annihilation exactness, pointwise domination, and the Theorem-style
    equivalence of the four difference functionals across depths."""
    drift_tol = config.tol("diff_drift", 0.2)
    checks = []
    depth = config.depth
    n_side = 1 << depth
    xs = np.arange(n_side) / n_side

    # exact annihilation of degree < k polynomials (away from the wrap)
    poly = SampledSignal(xs ** (k - 1))
    diff = kth_difference(poly, 2.0 ** (-depth) * 4, k)
    interior = slice(0, n_side - 4 * k)
    worst = float(np.max(np.abs(diff.samples[interior])))
    checks.append(CheckResult("annihilation", worst <= 1e-10,
                              f"max interior residual {worst:.3e}"))

    # mean difference below sup difference pointwise
    f = config.corpus_signals(depth)["chirp"]
    worst = 0.0
    for i in (2, 4, 6):
        d = local_mean_difference(f, i, k).samples
        s = sup_difference(f, i, k).samples
        worst = max(worst, float(np.max(d - s)))
    checks.append(CheckResult("mean_below_sup", worst <= 1e-12,
                              f"max excess {worst:.3e}"))

    # drift of the functional log-ratios across depths
    depths = sorted(set(list(config.trend_depths) + [config.depth]))
    depths = [d for d in depths if d >= 6]
    keys = ("supdiff", "oscillation", "mean_difference")
    worst_drift = 0.0
    for name in ("cusp", "weierstrass"):
        for fam in ("B", "F"):
            for sp in sprimes:
                for p in ps:
                    if fam == "F" and p == INF:
                        continue
                    # q = p, except q = 2 at p = inf where the supremum
                    # statistic is witness-unstable on lacunary signals
                    q = p if p != INF else 2.0
                    vals_by_depth = []
                    for d in depths:
                        g = config.corpus_signals(d)[name]
                        params = SpaceParams(family=fam, sprime=sp, p=p,
                                             q=q, x0=config.x0)
                        spec = DifferenceSpec(k=k, p=p, sprime=sp)
                        table = difference_norms(g, params, spec,
                                                 mvirtual=config.mvirtual)
                        vals_by_depth.append(table)
                    for key in keys:
                        logs = [math.log2(t[key] / t["lhs"])
                                for t in vals_by_depth]
                        drift = max(abs(logs[i + 1] - logs[i])
                                    for i in range(len(logs) - 1))
                        worst_drift = max(worst_drift, drift)
    checks.append(CheckResult(
        "equivalence_drift", worst_drift <= drift_tol,
        f"max per-level drift {worst_drift:.3f}, tol {drift_tol}"))

    # one-sided chain: supdiff <= C osc, osc <= C (lhs-base + mean-diff)
    worst_c1 = []
    worst_c2 = []
    for d in depths:
        c1 = c2 = 0.0
        for name in ("cusp", "weierstrass"):
            g = config.corpus_signals(d)[name]
            params = SpaceParams(family="B", sprime=0.4, p=2.0, q=2.0,
                                 x0=config.x0)
            spec = DifferenceSpec(k=k, p=2.0, sprime=0.4)
            t = difference_norms(g, params, spec, mvirtual=config.mvirtual)
            c1 = max(c1, t["supdiff"] / max(t["oscillation"], 1e-30))
            c2 = max(c2, t["oscillation"] / max(t["mean_difference"], 1e-30))
        worst_c1.append(c1)
        worst_c2.append(c2)
    s1 = abs(log_slope(depths, worst_c1))
    s2 = abs(log_slope(depths, worst_c2))
    ok = s1 <= drift_tol and s2 <= drift_tol
    checks.append(CheckResult(
        "one_sided_chain", ok,
        f"C1={worst_c1[-1]:.2f} (slope {s1:.3f}), "
        f"C2={worst_c2[-1]:.2f} (slope {s2:.3f})"))
    return SuiteResult("differences", checks)


SUITES = {
    "embeddings": suite_embeddings,
    "almost-diagonal": suite_almost_diagonal,
    "operators": suite_operators,
    "differences": suite_differences,
}


def run_suite(name: str, config: RunConfig) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; have {sorted(SUITES)}")
    return SUITES[name](config)
