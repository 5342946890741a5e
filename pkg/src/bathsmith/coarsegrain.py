"""Constrained Lorentzian fits to the filtered correlation function.

``fit_effective`` matches a small set of Lorentzians to the target
correlation function in the time domain under two hard conservation
constraints (total reorganization energy and total Huang-Rhys weight),
eliminating two of the weights analytically.  ``conventional_coarse_grain``
builds the single-broad-Lorentzian baseline that conserves only the
reorganization energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from ._quad import build_edges, cosine_sum, lorentzian_t0_correlation, panel_nodes
from .bcf import (
    BathParameters,
    CorrelationFunction,
    DEFAULT_PEAK_PROMINENCE,
    HIGH_FREQUENCY_CUTOFF_CM1,
    bcf_quadrature,
    count_peaks,
    ft_spectrum,
    gaussian_filter,
)
from .errors import ConfigurationError, FitError, ValidationError
from .model import ARComponent, LorentzianComponent, SpectralDensityModel
from .units import KB_CM1_PER_K, RAD_FS_PER_CM1

_GAMMA_BOUNDS = (1.0, 300.0)
_S_FLOOR = 1e-6


@dataclass(frozen=True)
class FitReport:
    """Outcome of a multi-start constrained fit."""

    objective: float
    iterations: int
    multistart_index: int
    n_starts: int
    seed: int
    start_objectives: tuple[float, ...]
    reorg_residual: float
    hr_residual: float


@dataclass(frozen=True)
class EffectiveEnvironment:
    """Fitted Lorentzian set, optionally carrying the AR continuum through.

    ``target_reorg`` and ``target_hr`` are the conserved totals of the
    source model.  The reorganization constraint always holds; the
    Huang-Rhys constraint holds unless ``conserves_hr`` is false (the
    conventional baseline conserves reorganization only).
    """

    keep_ar: bool
    ar: ARComponent | None
    lorentzians: tuple[LorentzianComponent, ...]
    target_reorg: float
    target_hr: float
    fit_report: FitReport | None = None
    label: str = ""
    conserves_hr: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lorentzians", tuple(self.lorentzians))
        if self.keep_ar and self.ar is None:
            raise ValidationError("keep_ar requires an AR component")
        reorg = sum(l.reorganization for l in self.lorentzians)
        hr = sum(l.huang_rhys for l in self.lorentzians)
        if self.ar is not None:
            reorg += self.ar.reorganization
            hr += self.ar.huang_rhys
        if abs(reorg - self.target_reorg) > 1e-6 * abs(self.target_reorg):
            raise ValidationError(
                f"reorganization energy {reorg} does not match target {self.target_reorg}"
            )
        if self.conserves_hr and abs(hr - self.target_hr) > 1e-6 * abs(self.target_hr):
            raise ValidationError(f"Huang-Rhys total {hr} does not match target {self.target_hr}")

    def to_model(self) -> SpectralDensityModel:
        return SpectralDensityModel(
            ar=self.ar, lorentzians=self.lorentzians, label=self.label or "effective"
        )


# ---------------------------------------------------------------------------
# Per-Lorentzian correlation functions with caching
# ---------------------------------------------------------------------------

class _UnitBcfCache:
    """Unit-weight Lorentzian BCFs on a fixed grid, keyed by (omega, gamma).

    The zero-temperature part is closed-form; the thermal part is a
    compact cosine integral.  Finite-difference jacobians perturb one
    parameter at a time, so most lookups hit the cache.
    """

    def __init__(self, t_fs: np.ndarray, temperature: float):
        self.t = t_fs
        self.temperature = temperature
        self._store: dict[tuple[float, float], np.ndarray] = {}

    def __call__(self, omega: float, gamma: float) -> np.ndarray:
        key = (round(float(omega), 10), round(float(gamma), 10))
        hit = self._store.get(key)
        if hit is not None:
            return hit
        vals = lorentzian_t0_correlation(omega, gamma, self.t)
        if self.temperature > 0:
            lor = LorentzianComponent(omega, 1.0, gamma)
            kt = KB_CM1_PER_K * self.temperature
            hi = max(45.0 * kt, omega + 10.0 * gamma)
            edges = build_edges(0.0, hi, lor.breakpoints() + [f * kt for f in (0.5, 1, 2, 4, 8, 16, 32)],
                                float(self.t[-1]), 24)
            x, w = panel_nodes(edges, 24)
            f = lor.evaluate_over_omega(x) * 2.0 * x / np.expm1(x / kt)
            vals = vals + cosine_sum(f, w, x, self.t)
        self._store[key] = vals
        return vals


def _eliminate_weights(omegas, s_free, idx_a, idx_b, free_idx, lam_target, hr_target):
    """Solve the two linear constraints for the eliminated pair (a, b)."""
    r1 = hr_target - np.sum(s_free)
    r2 = lam_target - np.sum(s_free * omegas[free_idx])
    wa, wb = omegas[idx_a], omegas[idx_b]
    sb = (r2 - wa * r1) / (wb - wa)
    sa = r1 - sb
    return sa, sb


def fit_effective(
    model: SpectralDensityModel,
    temperature: float,
    tau: float,
    k_peaks: int | str = "auto",
    keep_ar: bool = True,
    n_starts: int = 16,
    seed: int = 20250810,
    dt: float = 0.5,
) -> EffectiveEnvironment:
    """Fit ``k_peaks`` Lorentzians to the correlation function of ``model``.

    The objective is the Gaussian-weighted squared residual of the
    complex correlation function over [0, 1.5 tau] with weight
    exp(-(t/sigma)^2), sigma = tau/3, normalized by the target norm.
    Both conservation constraints are enforced exactly by eliminating
    two weights; remaining parameters are optimized by trust-region
    least squares from ``n_starts`` jittered initializations.

    With ``keep_ar`` the AR continuum passes through unchanged and only
    the high-frequency content is fitted; otherwise one extra Lorentzian
    (initialized at the AR pseudomode) absorbs the continuum.
    """
    if temperature < 0 or tau <= 0:
        raise ValidationError("temperature must be >= 0 and tau > 0")
    if isinstance(k_peaks, str) and k_peaks != "auto":
        raise ConfigurationError(f"k_peaks must be a positive count or 'auto', got {k_peaks!r}")
    if not isinstance(k_peaks, str) and k_peaks < 1:
        raise ConfigurationError("k_peaks must be >= 1")

    keep_ar = keep_ar and model.ar is not None
    target = model.high_frequency_part() if keep_ar else model
    sigma = tau / 3.0

    params = BathParameters(
        temperature=temperature, tau=tau, filter_sigma=sigma, dt=dt, span=1.5 * tau
    )
    t = params.grid()
    c_target = bcf_quadrature(target, params).values
    weights = np.exp(-((t / sigma) ** 2))
    sqrt_w = np.sqrt(weights)
    norm = np.sqrt(np.sum(weights * np.abs(c_target) ** 2))

    feats_all = [c.omega for c in (target.lorentzians + target.deltas)]
    census_omega_max = 1.3 * max(feats_all) if feats_all else 2000.0
    census = count_peaks(
        ft_spectrum(
            gaussian_filter(bcf_quadrature(target.as_undamped(), params), sigma),
            omega_max=census_omega_max,
        ),
        prominence=DEFAULT_PEAK_PROMINENCE,
        omega_min=HIGH_FREQUENCY_CUTOFF_CM1 if keep_ar else 0.0,
    )
    if k_peaks == "auto":
        k = census.count
        if k < 1:
            raise ConfigurationError("no peaks found for automatic k selection")
    else:
        k = int(k_peaks)

    # conserved totals of the fitted part and of the full model
    lam_fit = sum(l.reorganization for l in target.lorentzians) + sum(
        d.reorganization for d in target.deltas
    )
    hr_fit = sum(l.huang_rhys for l in target.lorentzians) + sum(d.huang_rhys for d in target.deltas)
    if not keep_ar and model.ar is not None:
        lam_fit += model.ar.reorganization
        hr_fit += model.ar.huang_rhys
    target_reorg = lam_fit + (model.ar.reorganization if keep_ar else 0.0)
    target_hr = hr_fit + (model.ar.huang_rhys if keep_ar else 0.0)

    # initialization from the peak census
    centers = [p.center for p in census.peaks]
    heights = [p.height for p in census.peaks]
    if len(centers) >= k:
        order = np.argsort(heights)[::-1][:k]
        centers = [centers[i] for i in sorted(order)]
        heights = [heights[i] for i in sorted(order)]
    else:
        feats = sorted(c.omega for c in (target.lorentzians + target.deltas)) or [tau]
        extra = list(np.linspace(feats[0], feats[-1], k - len(centers) + 2)[1:-1])
        centers = sorted(centers + extra)
        heights = [1.0] * len(centers)
    centers = np.asarray(centers, dtype=float)
    heights = np.asarray(heights, dtype=float)
    if not keep_ar and model.ar is not None:
        k += 1
        centers = np.append(centers, 160.0)
        heights = np.append(heights, np.max(heights))

    gamma0 = min(max(1.0 / (sigma * RAD_FS_PER_CM1), _GAMMA_BOUNDS[0]), _GAMMA_BOUNDS[1])
    s0 = heights / np.maximum(centers, 1.0)
    s0 *= lam_fit / np.sum(s0 * centers)

    feats = [c.omega for c in (target.lorentzians + target.deltas)] or list(centers)
    omega_lo = max(10.0, 0.5 * min(feats + list(centers)))
    omega_hi = 1.3 * max(feats + list(centers))

    unit_bcf = _UnitBcfCache(t, temperature)
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    jitters = rng.uniform(-20.0, 20.0, size=(n_starts, k))
    jitters[0] = 0.0

    if k >= 2:
        idx_a = int(np.argmin(centers))
        idx_b = int(np.argmax(centers))
    else:
        idx_a = idx_b = 0
    free_idx = [i for i in range(k) if i not in (idx_a, idx_b)]

    def unpack(x):
        omegas = x[:k]
        gammas = x[k : 2 * k]
        s_free = x[2 * k :]
        return omegas, gammas, s_free

    def assemble_s(omegas, s_free):
        s = np.empty(k)
        s[free_idx] = s_free
        if k == 1:
            # single peak: reorganization constraint fixes the weight
            s[0] = lam_fit / omegas[0]
            return s
        sa, sb = _eliminate_weights(omegas, s_free, idx_a, idx_b, free_idx, lam_fit, hr_fit)
        s[idx_a] = sa
        s[idx_b] = sb
        return s

    def residuals(x):
        omegas, gammas, s_free = unpack(x)
        s = assemble_s(omegas, s_free)
        c_fit = np.zeros_like(c_target)
        for om, g, sk in zip(omegas, gammas, s):
            c_fit = c_fit + sk * unit_bcf(om, g)
        r = (c_fit - c_target) * sqrt_w / norm
        # weights must stay positive; rejected smoothly, hard-rejected at exit
        pen = 100.0 * np.minimum(s, 0.0) / max(hr_fit, _S_FLOOR)
        return np.concatenate([r.real, r.imag, pen])

    best = None
    start_objectives = []
    for istart in range(n_starts):
        om_init = np.clip(centers + jitters[istart], omega_lo, omega_hi)
        x0 = np.concatenate([om_init, np.full(k, gamma0), s0[free_idx]])
        lb = np.concatenate([np.full(k, omega_lo), np.full(k, _GAMMA_BOUNDS[0]), np.full(len(free_idx), _S_FLOOR * hr_fit)])
        ub = np.concatenate([np.full(k, omega_hi), np.full(k, _GAMMA_BOUNDS[1]), np.full(len(free_idx), hr_fit)])
        try:
            res = least_squares(
                residuals, np.clip(x0, lb, ub), bounds=(lb, ub), method="trf",
                xtol=1e-12, ftol=1e-12, gtol=1e-12, max_nfev=300 * (2 * k + len(free_idx)),
            )
        except Exception:
            start_objectives.append(float("inf"))
            continue
        omegas, gammas, s_free = unpack(res.x)
        s = assemble_s(omegas, s_free)
        data_part = residuals(res.x)[: 2 * t.size]
        obj = float(np.sum(data_part**2))
        start_objectives.append(obj)
        if np.any(s <= 0):
            continue
        if best is None or obj < best[0]:
            best = (obj, istart, res, omegas.copy(), gammas.copy(), s.copy())

    if best is None:
        raise FitError(
            f"all {n_starts} starts rejected (non-positive weights or optimizer failure)",
            best_objective=min(start_objectives) if start_objectives else None,
        )

    obj, istart, res, omegas, gammas, s = best
    order = np.argsort(omegas)
    lors = tuple(
        LorentzianComponent(float(omegas[i]), float(s[i]), float(gammas[i])) for i in order
    )
    reorg_res = abs(sum(l.reorganization for l in lors) - lam_fit) / abs(lam_fit)
    hr_res = abs(sum(l.huang_rhys for l in lors) - hr_fit) / abs(hr_fit)
    report = FitReport(
        objective=obj,
        iterations=int(res.nfev),
        multistart_index=istart,
        n_starts=n_starts,
        seed=seed,
        start_objectives=tuple(start_objectives),
        reorg_residual=reorg_res,
        hr_residual=hr_res,
    )
    # a single Lorentzian can bind only the reorganization constraint
    hr_conserved = k >= 2 or hr_res <= 1e-6
    return EffectiveEnvironment(
        keep_ar=keep_ar,
        ar=model.ar if keep_ar else None,
        lorentzians=lors,
        target_reorg=target_reorg,
        target_hr=target_hr,
        fit_report=report,
        label=f"{model.label}:effective-k{k}" if model.label else f"effective-k{k}",
        conserves_hr=hr_conserved,
    )


def conventional_coarse_grain(
    model: SpectralDensityModel, omega_cg: float, gamma_cg: float
) -> EffectiveEnvironment:
    """Replace the high-frequency content by one broad Lorentzian.

    The weight is solved so the high-frequency reorganization energy is
    conserved; the AR continuum passes through.  This baseline does not
    conserve the Huang-Rhys total.
    """
    if omega_cg <= 0 or gamma_cg <= 0:
        raise ValidationError("omega_cg and gamma_cg must be > 0")
    hf = model.high_frequency_part()
    lam_hf = sum(l.reorganization for l in hf.lorentzians) + sum(
        d.reorganization for d in hf.deltas
    )
    s_cg = lam_hf / omega_cg
    lor = LorentzianComponent(omega_cg, s_cg, gamma_cg)
    ar = model.ar
    target_reorg = lam_hf + (ar.reorganization if ar is not None else 0.0)
    target_hr = sum(l.huang_rhys for l in hf.lorentzians) + sum(d.huang_rhys for d in hf.deltas)
    target_hr += ar.huang_rhys if ar is not None else 0.0
    return EffectiveEnvironment(
        keep_ar=ar is not None,
        ar=ar,
        lorentzians=(lor,),
        target_reorg=target_reorg,
        target_hr=target_hr,
        fit_report=None,
        label=f"{model.label}:conventional" if model.label else "conventional",
        conserves_hr=False,
    )
