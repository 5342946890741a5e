"""Bath correlation functions, Gaussian filtering and filtered spectra.

The finite-temperature correlation function of a spectral density J is

    C(t) = int_0^inf dw J(w) (coth(w/2kT) cos(wt) - i sin(wt))

computed here as the zero-temperature part int J exp(-iwt) dw plus the
real thermal part int J * 2 n_BE(w) cos(wt) dw.  Lorentzian components
use the exact pole decomposition; the AR continuum and the thermal
factor are integrated on feature-adapted Gauss panels.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy import signal

from ._quad import build_edges, cosine_sum, lorentzian_t0_correlation, oscillatory_sum, panel_nodes
from .errors import ConfigurationError, NumericError, ValidationError
from .model import SpectralDensityModel
from .units import KB_CM1_PER_K, RAD_FS_PER_CM1

#: peaks below this frequency belong to the low-frequency continuum
HIGH_FREQUENCY_CUTOFF_CM1 = 100.0

#: fraction of the spectrum maximum used as default peak prominence
DEFAULT_PEAK_PROMINENCE = 0.02


@dataclass(frozen=True)
class BathParameters:
    """Temperature, horizon of interest and time grid for BCF work.

    ``tau`` is the horizon over which the correlation function must be
    faithful (the filter makes it negligible beyond); the grid extends
    to ``span`` (default 4*tau) so transforms see a decayed tail.
    """

    temperature: float
    tau: float
    filter_sigma: float | None = None
    dt: float = 0.25
    span: float | None = None

    def __post_init__(self):
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")
        if self.tau <= 0:
            raise ValidationError("tau must be > 0")
        if self.dt <= 0:
            raise ValidationError("dt must be > 0")
        if self.tau / self.dt < 64:
            raise ValidationError("grid too coarse: need tau/dt >= 64")
        if self.filter_sigma is None:
            object.__setattr__(self, "filter_sigma", self.tau / 3.0)
        if self.filter_sigma <= 0:
            raise ValidationError("filter_sigma must be > 0")
        if self.span is None:
            object.__setattr__(self, "span", 4.0 * self.tau)
        if self.span < self.tau:
            raise ValidationError("span must cover tau")

    def grid(self) -> np.ndarray:
        n = int(round(self.span / self.dt)) + 1
        return np.arange(n) * self.dt


@dataclass(frozen=True)
class CorrelationFunction:
    """Complex correlation samples on a uniform time grid from t = 0."""

    t_fs: np.ndarray
    values: np.ndarray
    temperature: float
    label: str = ""
    filter_sigma: float = 0.0  # fs; 0 means unfiltered

    def __post_init__(self):
        t = np.asarray(self.t_fs, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.ndim != 1 or t.size < 2 or v.shape != t.shape:
            raise ValidationError("correlation needs matching 1-d t and value arrays")
        dt = np.diff(t)
        if t[0] != 0.0 or not np.allclose(dt, dt[0], rtol=1e-9, atol=1e-12):
            raise ValidationError("time grid must be uniform and start at 0")
        if not np.all(np.isfinite(v.view(float))):
            raise ValidationError("correlation values must be finite")
        if abs(v[0].imag) > 1e-8 * max(abs(v[0]), 1e-300):
            raise ValidationError(f"C(0) must be real, got {v[0]!r}")
        object.__setattr__(self, "t_fs", t)
        object.__setattr__(self, "values", v)

    @property
    def dt(self) -> float:
        return float(self.t_fs[1] - self.t_fs[0])


@dataclass(frozen=True)
class FilteredSpectrum:
    """Real one-sided transform samples of a (filtered) correlation."""

    omega_cm1: np.ndarray
    values: np.ndarray
    filter_sigma: float
    label: str = ""

    def __post_init__(self):
        w = np.asarray(self.omega_cm1, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if w.shape != v.shape or w.ndim != 1:
            raise ValidationError("spectrum needs matching 1-d arrays")
        if not np.all(np.isfinite(v)):
            raise ValidationError("spectrum values must be finite")
        object.__setattr__(self, "omega_cm1", w)
        object.__setattr__(self, "values", v)


class Peak(NamedTuple):
    center: float
    height: float


class PeakCensus(NamedTuple):
    count: int
    peaks: list[Peak]


# ---------------------------------------------------------------------------
# Correlation function
# ---------------------------------------------------------------------------

def _delta_part(model: SpectralDensityModel, temperature: float, t_fs: np.ndarray) -> np.ndarray:
    out = np.zeros(t_fs.shape, dtype=complex)
    tau = RAD_FS_PER_CM1 * t_fs
    for d in model.deltas:
        phase = d.omega * tau
        if temperature > 0:
            coth = 1.0 / np.tanh(d.omega / (2.0 * KB_CM1_PER_K * temperature))
        else:
            coth = 1.0
        out += d.omega**2 * d.hr * (coth * np.cos(phase) - 1j * np.sin(phase))
    return out


def _ar_t0_part(model, t_fs, n_nodes):
    ar = model.ar
    hi = min(ar.support_hi, 4000.0)
    edges = build_edges(0.0, hi, ar.breakpoints(), float(t_fs[-1]), n_nodes)
    x, w = panel_nodes(edges, n_nodes)
    return oscillatory_sum(ar.evaluate(x), w, x, t_fs)


def _thermal_part(model, temperature, t_fs, n_nodes):
    kt = KB_CM1_PER_K * temperature
    hi = 45.0 * kt
    features = [f * kt for f in (0.25, 0.5, 1, 2, 4, 8, 16, 32)]
    features += model.breakpoints()
    edges = build_edges(0.0, hi, features, float(t_fs[-1]), n_nodes)
    x, w = panel_nodes(edges, n_nodes)
    # J(w) * 2 n_BE(w) = (J/w) * 2w/(exp(w/kT)-1); expm1 is stable near 0
    f = model.evaluate_J_over_omega(x) * 2.0 * x / np.expm1(x / kt)
    return cosine_sum(f, w, x, t_fs)


def bcf_quadrature(
    model: SpectralDensityModel,
    params: BathParameters,
    rtol: float = 1e-6,
    n_nodes: int = 24,
) -> CorrelationFunction:
    """Correlation function of ``model`` on the grid of ``params``.

    Lorentzian zero-temperature parts are exact (pole decomposition);
    continuum and thermal integrals use feature-adapted panels whose
    order is doubled until the result is stable to ``rtol`` relative to
    max |C|.  At T = 0 the coth factor is replaced by 1.
    """
    t = params.grid()
    temperature = params.temperature

    values = _delta_part(model, temperature, t)
    for lor in model.lorentzians:
        values = values + lor.hr * lorentzian_t0_correlation(lor.omega, lor.gamma, t)

    needs_panels = (model.ar is not None) or (temperature > 0 and model.continuous_components)
    if needs_panels:
        probe = t[:: max(1, t.size // 64)]

        def continuum(nn, tt):
            acc = np.zeros(tt.shape, dtype=complex)
            if model.ar is not None:
                acc = acc + _ar_t0_part(model, tt, nn)
            if temperature > 0 and model.continuous_components:
                acc = acc + _thermal_part(model, temperature, tt, nn)
            return acc

        coarse = continuum(n_nodes, probe)
        scale = max(np.max(np.abs(values[:: max(1, t.size // 64)] + coarse)), 1e-300)
        level = n_nodes
        for _ in range(3):
            fine = continuum(level * 2, probe)
            if np.max(np.abs(fine - coarse)) <= rtol * scale:
                break
            coarse = fine
            level *= 2
        else:
            raise NumericError(
                f"continuum quadrature not converged to rtol={rtol} at {level} nodes/panel"
            )
        values = values + continuum(level, t)

    return CorrelationFunction(
        t_fs=t, values=values, temperature=temperature, label=model.label
    )


def gaussian_filter(corr: CorrelationFunction, sigma: float) -> CorrelationFunction:
    """Multiply by exp(-t^2 / 2 sigma^2); grid unchanged.

    Repeated filtering composes: applying sigma then sigma again equals
    one filter with sigma/sqrt(2), tracked in ``filter_sigma``.
    """
    if sigma <= 0:
        raise ValidationError("filter sigma must be > 0")
    vals = corr.values * np.exp(-corr.t_fs**2 / (2.0 * sigma**2))
    if corr.filter_sigma > 0:
        combined = 1.0 / np.sqrt(1.0 / sigma**2 + 1.0 / corr.filter_sigma**2)
    else:
        combined = sigma
    return replace(corr, values=vals, filter_sigma=combined)


def ft_spectrum(
    corr: CorrelationFunction,
    omega_max: float = 2000.0,
    d_omega: float = 1.0,
) -> FilteredSpectrum:
    """One-sided transform S(w) = (1/pi) Re int_0^inf exp(iwt) C(t) dt.

    Trapezoidal sum on the correlation grid, evaluated on a frequency
    grid covering [-omega_max/4, omega_max].  Peak positions and
    relative heights are meaningful; the absolute scale follows this
    fixed convention.
    """
    if omega_max <= 0 or d_omega <= 0:
        raise ConfigurationError("omega_max and d_omega must be > 0")
    span = float(corr.t_fs[-1])
    if span < 2.0 * np.pi / (RAD_FS_PER_CM1 * omega_max):
        raise ConfigurationError(
            f"time grid span {span} fs cannot resolve frequencies up to {omega_max} cm^-1"
        )
    tail = abs(corr.values[-1])
    head = abs(corr.values[0])
    if head > 0 and tail > 1e-4 * head:
        warnings.warn(
            f"correlation tail is {tail/head:.2e} of C(0); transform may ring",
            stacklevel=2,
        )
    n = int(np.ceil(1.25 * omega_max / d_omega)) + 1
    omega = -omega_max / 4.0 + np.arange(n) * d_omega
    trap = np.full(corr.t_fs.size, corr.dt)
    trap[0] *= 0.5
    trap[-1] *= 0.5
    ct = corr.values * trap
    out = np.empty(n, dtype=float)
    tau = RAD_FS_PER_CM1 * corr.t_fs
    for start in range(0, n, 512):
        sl = slice(start, min(start + 512, n))
        out[sl] = (np.exp(1j * np.outer(omega[sl], tau)) @ ct).real
    return FilteredSpectrum(
        omega_cm1=omega,
        values=out / np.pi,
        filter_sigma=corr.filter_sigma,
        label=corr.label,
    )


def count_peaks(
    spec: FilteredSpectrum,
    prominence: float = DEFAULT_PEAK_PROMINENCE,
    omega_min: float = 0.0,
) -> PeakCensus:
    """Local maxima at w > max(0, omega_min) with the given prominence.

    ``prominence`` is a fraction of the spectrum maximum over w > 0.
    Returns peaks sorted by center.
    """
    if not (0.0 < prominence < 1.0):
        raise ValidationError("prominence must be in (0, 1)")
    pos = spec.omega_cm1 > max(0.0, omega_min)
    w = spec.omega_cm1[pos]
    v = spec.values[pos]
    if v.size < 3:
        return PeakCensus(0, [])
    ref = np.max(spec.values[spec.omega_cm1 > 0])
    if ref <= 0:
        return PeakCensus(0, [])
    idx, _ = signal.find_peaks(v, prominence=prominence * ref)
    peaks = [Peak(float(w[i]), float(v[i])) for i in np.sort(idx)]
    return PeakCensus(len(peaks), peaks)


def bcf_distance(
    ca: CorrelationFunction,
    cb: CorrelationFunction,
    sigma: float,
    t_max: float | None = None,
) -> float:
    """Gaussian-weighted relative L2 distance between two correlations.

    sqrt(sum w_j |Ca - Cb|^2 / sum w_j |Ca|^2) with w_j = exp(-t_j^2/sigma^2),
    optionally restricted to t <= t_max.  Grids must match.
    """
    if ca.t_fs.shape != cb.t_fs.shape or not np.allclose(ca.t_fs, cb.t_fs):
        raise ValidationError("correlation functions must share one time grid")
    if sigma <= 0:
        raise ValidationError("sigma must be > 0")
    t = ca.t_fs
    mask = np.ones(t.shape, dtype=bool) if t_max is None else t <= t_max
    w = np.exp(-(t[mask] ** 2) / sigma**2)
    num = np.sum(w * np.abs(ca.values[mask] - cb.values[mask]) ** 2)
    den = np.sum(w * np.abs(ca.values[mask]) ** 2)
    if den == 0:
        raise ValidationError("reference correlation is identically zero")
    return float(np.sqrt(num / den))
