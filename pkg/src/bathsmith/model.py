"""Spectral-density models and electronic-system descriptions.

A :class:`SpectralDensityModel` is a composite of a smooth low-frequency
continuum (:class:`ARComponent`), a set of narrow antisymmetrized
Lorentzian peaks (:class:`LorentzianComponent`) and discrete undamped
modes (:class:`DeltaComponent`).  All frequencies are in cm^-1; see
:mod:`bathsmith.units`.

The continuum forms are

    J_ar(w) = S/(s1+s2) * sum_i s_i/(7! * 2 * w_i^4) * w^5 * exp(-sqrt(w/w_i))

    J_lor(w) = 4*W*s*g*(W^2+g^2)*w / (pi*((w+W)^2+g^2)*((w-W)^2+g^2))

with W the peak center, s the Huang-Rhys factor and g the half width.
The Lorentzian form integrates to exactly s*W for int J/w dw; its
int J/w^2 dw diverges logarithmically at w -> 0, so the Huang-Rhys
content of a Lorentzian component is its nominal s (see
:func:`huang_rhys_total`).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import NumericError, ValidationError
from .units import CM1_PER_MEV, KB_CM1_PER_K, mev_to_cm1

_SEVEN_FACT_2 = 2.0 * math.factorial(7)  # 10080


def _require_positive(value, name):
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class ARComponent:
    """Smooth low-frequency continuum with a stretched-exponential tail.

    Parameters are the total Huang-Rhys weight ``s_total``, shape weights
    ``s1``/``s2`` and shape frequencies ``w1``/``w2`` (cm^-1).  The form is
    normalized so that int J/w^2 dw = s_total exactly.
    """

    s_total: float
    s1: float
    s2: float
    w1: float
    w2: float

    def __post_init__(self):
        for name in ("s_total", "s1", "s2", "w1", "w2"):
            _require_positive(getattr(self, name), f"ar.{name}")

    def evaluate(self, omega):
        """J(w) for w >= 0 (vectorized)."""
        w = np.asarray(omega, dtype=float)
        return w * self.evaluate_over_omega(w)

    def evaluate_over_omega(self, omega):
        """J(w)/w, finite and -> 0 as w -> 0."""
        w = np.asarray(omega, dtype=float)
        pref = self.s_total / (self.s1 + self.s2) / _SEVEN_FACT_2
        out = np.zeros_like(w)
        pos = w > 0
        wp = w[pos] if w.ndim else (w if w > 0 else None)
        if w.ndim == 0:
            if w <= 0:
                return 0.0
            return float(
                pref
                * w**4
                * (
                    self.s1 / self.w1**4 * np.exp(-np.sqrt(w / self.w1))
                    + self.s2 / self.w2**4 * np.exp(-np.sqrt(w / self.w2))
                )
            )
        out[pos] = (
            pref
            * wp**4
            * (
                self.s1 / self.w1**4 * np.exp(-np.sqrt(wp / self.w1))
                + self.s2 / self.w2**4 * np.exp(-np.sqrt(wp / self.w2))
            )
        )
        return out

    @property
    def reorganization(self) -> float:
        """int J/w dw = 72 * S/(s1+s2) * (s1*w1 + s2*w2), exact."""
        return 72.0 * self.s_total / (self.s1 + self.s2) * (self.s1 * self.w1 + self.s2 * self.w2)

    @property
    def huang_rhys(self) -> float:
        """int J/w^2 dw = s_total, exact by construction."""
        return self.s_total

    def breakpoints(self) -> list[float]:
        # Peaks of the two terms sit at 100*w_i; tail negligible past ~1600.
        pts = []
        for wi in (self.w1, self.w2):
            pts.extend([0.2 * wi, wi, 10.0 * wi, 50.0 * wi, 100.0 * wi, 200.0 * wi, 400.0 * wi, 800.0 * wi])
        return pts

    @property
    def support_hi(self) -> float:
        # exp(-sqrt(w/w2)) < 1e-13 of peak beyond this point
        return 1000.0 * max(self.w1, self.w2)


@dataclass(frozen=True)
class LorentzianComponent:
    """Antisymmetrized Lorentzian peak of nominal Huang-Rhys weight ``hr``."""

    omega: float
    hr: float
    gamma: float

    def __post_init__(self):
        _require_positive(self.omega, "lorentzian.omega_cm1")
        _require_positive(self.hr, "lorentzian.hr")
        _require_positive(self.gamma, "lorentzian.gamma_cm1")

    @property
    def prefactor(self) -> float:
        """A in J(w) = A*w / ((w+W)^2+g^2) / ((w-W)^2+g^2)."""
        return 4.0 * self.omega * self.hr * self.gamma * (self.omega**2 + self.gamma**2) / math.pi

    def evaluate(self, omega):
        w = np.asarray(omega, dtype=float)
        return w * self.evaluate_over_omega(w)

    def evaluate_over_omega(self, omega):
        w = np.asarray(omega, dtype=float)
        denom = ((w + self.omega) ** 2 + self.gamma**2) * ((w - self.omega) ** 2 + self.gamma**2)
        return self.prefactor / denom

    @property
    def reorganization(self) -> float:
        """int J/w dw = hr * omega holds exactly for this lineshape."""
        return self.hr * self.omega

    @property
    def huang_rhys(self) -> float:
        """Nominal weight; the literal int J/w^2 dw log-diverges at w=0."""
        return self.hr

    def poles(self) -> np.ndarray:
        """The four simple poles of J in the complex w plane."""
        W, g = self.omega, self.gamma
        return np.array([W + 1j * g, W - 1j * g, -W + 1j * g, -W - 1j * g])

    def residues(self) -> np.ndarray:
        """Residues of J at :meth:`poles`; they sum to zero (J ~ A/w^3)."""
        p = self.poles()
        res = np.empty(4, dtype=complex)
        for k in range(4):
            others = np.delete(p, k)
            res[k] = self.prefactor * p[k] / np.prod(p[k] - others)
        return res

    def breakpoints(self) -> list[float]:
        pts = [self.omega + f * self.gamma for f in (-24, -12, -6, -3, -1.5, 0, 1.5, 3, 6, 12, 24)]
        return [p for p in pts if p > 0]


@dataclass(frozen=True)
class DeltaComponent:
    """Discrete undamped mode: J contribution w0^2 * s * delta(w - w0)."""

    omega: float
    hr: float

    def __post_init__(self):
        _require_positive(self.omega, "delta.omega_cm1")
        _require_positive(self.hr, "delta.hr")

    @property
    def reorganization(self) -> float:
        return self.hr * self.omega

    @property
    def huang_rhys(self) -> float:
        return self.hr


@dataclass(frozen=True)
class SpectralDensityModel:
    """Composite spectral density: optional AR continuum + Lorentzians + deltas."""

    ar: ARComponent | None = None
    lorentzians: tuple[LorentzianComponent, ...] = ()
    deltas: tuple[DeltaComponent, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "lorentzians", tuple(self.lorentzians))
        object.__setattr__(self, "deltas", tuple(self.deltas))
        if self.ar is None and not self.lorentzians and not self.deltas:
            raise ValidationError("model must contain at least one component")

    @property
    def continuous_components(self):
        comps = list(self.lorentzians)
        if self.ar is not None:
            comps.append(self.ar)
        return comps

    def evaluate_J(self, omega):
        """Pointwise density of the continuous parts (deltas excluded).

        Raises on negative frequencies; vanishes at w = 0.
        """
        w = np.asarray(omega, dtype=float)
        if np.any(w < 0):
            raise ValidationError("evaluate_J requires omega >= 0")
        out = np.zeros_like(w, dtype=float)
        for comp in self.continuous_components:
            out = out + comp.evaluate(w)
        return float(out) if np.ndim(omega) == 0 else out

    def evaluate_J_over_omega(self, omega):
        """J(w)/w for the continuous parts, finite at w = 0."""
        w = np.asarray(omega, dtype=float)
        if np.any(w < 0):
            raise ValidationError("evaluate_J_over_omega requires omega >= 0")
        out = np.zeros_like(w, dtype=float)
        for comp in self.continuous_components:
            out = out + comp.evaluate_over_omega(w)
        return float(out) if np.ndim(omega) == 0 else out

    def high_frequency_part(self) -> "SpectralDensityModel":
        """The model without its AR continuum (Lorentzians and deltas)."""
        if not self.lorentzians and not self.deltas:
            raise ValidationError("model has no high-frequency components")
        return SpectralDensityModel(
            ar=None, lorentzians=self.lorentzians, deltas=self.deltas,
            label=f"{self.label}:high-frequency" if self.label else "high-frequency",
        )

    def ar_part(self) -> "SpectralDensityModel":
        if self.ar is None:
            raise ValidationError("model has no AR component")
        return SpectralDensityModel(ar=self.ar, label=f"{self.label}:ar" if self.label else "ar")

    def with_label(self, label: str) -> "SpectralDensityModel":
        return replace(self, label=label)

    def as_undamped(self) -> "SpectralDensityModel":
        """Lorentzian peaks replaced by undamped modes at (omega, hr).

        Census convention: peak counting probes the structure the mode
        content imprints on the correlation function within the horizon;
        the Lorentzian damping widths are a realization device and are
        dropped here.
        """
        if not self.lorentzians:
            return self
        return SpectralDensityModel(
            ar=self.ar,
            lorentzians=(),
            deltas=self.deltas + tuple(DeltaComponent(l.omega, l.hr) for l in self.lorentzians),
            label=f"{self.label}:undamped" if self.label else "undamped",
        )

    def breakpoints(self) -> list[float]:
        pts: list[float] = [0.0]
        for comp in self.continuous_components:
            pts.extend(comp.breakpoints())
        return sorted(set(pts))

    @property
    def support_hi(self) -> float:
        """Frequency beyond which only Lorentzian power-law tails remain."""
        hi = 0.0
        if self.ar is not None:
            hi = self.ar.support_hi
        for lor in self.lorentzians:
            hi = max(hi, lor.omega + 30.0 * lor.gamma, 2.0 * lor.omega)
        for d in self.deltas:
            hi = max(hi, d.omega)
        return max(hi, 500.0)


# ---------------------------------------------------------------------------
# Integral diagnostics
# ---------------------------------------------------------------------------

def _quad_continuous(model: SpectralDensityModel, integrand, rtol: float) -> float:
    """Adaptive quadrature of `integrand(w)` over the continuous support."""
    hi = model.support_hi
    if model.ar is not None:
        hi = max(hi, 8000.0)
    pts = [p for p in model.breakpoints() if 0.0 < p < hi]
    try:
        value, err = integrate.quad(
            integrand, 0.0, hi, points=pts, limit=50 + 20 * max(1, len(pts)), epsrel=rtol, epsabs=0.0
        )
    except Exception as exc:  # pragma: no cover - scipy failure diagnostics
        raise NumericError(f"quadrature failed over [0, {hi}]: {exc}") from exc
    if abs(err) > 10 * rtol * max(abs(value), 1e-300):
        raise NumericError(
            f"quadrature did not reach rtol={rtol}: value={value}, error estimate={err}"
        )
    return value


def reorganization_energy(model: SpectralDensityModel, rtol: float = 1e-9) -> float:
    """Total reorganization energy int J/w dw + sum_k w_k s_k (cm^-1).

    Continuous parts by adaptive quadrature; the Lorentzian power-law
    tails beyond the integration window are added from the asymptotic
    expansion J/w ~ A/w^4 * (1 - d1/w^2 + ...).
    """
    total = sum(d.reorganization for d in model.deltas)
    if not model.continuous_components:
        return float(total)
    hi = model.support_hi
    if model.ar is not None:
        hi = max(hi, 8000.0)
    total += _quad_continuous(model, model.evaluate_J_over_omega, rtol)
    for lor in model.lorentzians:
        a = lor.prefactor
        d1 = 2.0 * (lor.gamma**2 - lor.omega**2)
        total += a * (1.0 / (3.0 * hi**3) - d1 / (5.0 * hi**5))
    return float(total)


def huang_rhys_total(model: SpectralDensityModel, rtol: float = 1e-9) -> float:
    """Total Huang-Rhys weight of the model (dimensionless).

    AR continuum by quadrature of J/w^2 (finite); Lorentzian and delta
    components contribute their nominal factors.  The pointwise
    int J/w^2 dw of the antisymmetrized Lorentzian diverges
    logarithmically at w -> 0, so the nominal weight is the meaningful
    (and conserved) quantity.
    """
    total = sum(d.huang_rhys for d in model.deltas)
    total += sum(lor.huang_rhys for lor in model.lorentzians)
    if model.ar is not None:
        ar_model = model.ar_part()
        total += _quad_continuous(
            ar_model, lambda w: ar_model.evaluate_J_over_omega(w) / w if w > 0 else 0.0, rtol
        )
    return float(total)


def thermalized_density(model: SpectralDensityModel, temperature: float, omega):
    """Signed-frequency thermalized density J_beta(w).

    J_beta(w) = sign(w) J(|w|) (1 + coth(w / 2 kT)) / 2 over the whole
    real line; continuous at w = 0 with limit J'(0) * kT.  Satisfies
    detailed balance J_beta(-w) = exp(-w/kT) J_beta(w).

    Delta components are excluded (no pointwise density).
    """
    if temperature <= 0:
        raise ValidationError("thermalized_density requires T > 0; use J directly at T = 0")
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    aw = np.abs(w)
    j_over = model.evaluate_J_over_omega(aw)
    kt = KB_CM1_PER_K * temperature
    x = aw / (2.0 * kt)
    # sign(w)*J(|w|)*(1 + coth(w/2kT))/2 = J(|w|)/2*sign(w) + J(|w|)*coth(|w|/2kT)/2
    # second term via series for small arguments: coth(x) ~ 1/x + x/3
    small = x < 1e-3
    coth_term = np.empty_like(aw)
    with np.errstate(over="ignore"):
        coth_term[~small] = aw[~small] * (1.0 / np.tanh(x[~small]))
    xs = x[small]
    coth_term[small] = 2.0 * kt * (1.0 + xs * xs / 3.0)
    out = 0.5 * j_over * (np.sign(w) * aw + coth_term)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Electronic systems and disorder
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElectronicSystem:
    """Site energies, couplings and transition dipoles of an aggregate."""

    site_energies: np.ndarray
    couplings: np.ndarray
    dipoles: np.ndarray
    label: str = ""

    def __post_init__(self):
        e = np.asarray(self.site_energies, dtype=float)
        v = np.asarray(self.couplings, dtype=float)
        mu = np.asarray(self.dipoles, dtype=float)
        n = e.size
        if v.shape != (n, n):
            raise ValidationError(f"couplings_cm1 must be {n}x{n}, got {v.shape}")
        if not np.allclose(v, v.T, atol=1e-12):
            raise ValidationError("couplings_cm1 must be symmetric")
        if np.any(np.abs(np.diag(v)) > 1e-12):
            raise ValidationError("couplings_cm1 must have zero diagonal")
        if mu.shape != (n, 3):
            raise ValidationError(f"dipoles must be {n}x3, got {mu.shape}")
        object.__setattr__(self, "site_energies", e)
        object.__setattr__(self, "couplings", v)
        object.__setattr__(self, "dipoles", mu)

    @property
    def n_sites(self) -> int:
        return self.site_energies.size

    def hamiltonian(self, site_energies=None) -> np.ndarray:
        e = self.site_energies if site_energies is None else np.asarray(site_energies, dtype=float)
        return np.diag(e) + self.couplings

    @property
    def total_dipole_strength(self) -> float:
        return float(np.sum(self.dipoles**2))


@dataclass(frozen=True)
class DisorderSpec:
    """Gaussian static disorder of the site energies."""

    sigma: float
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.sigma < 0:
            raise ValidationError("disorder sigma must be >= 0")
        if self.n_samples < 1:
            raise ValidationError("disorder n_samples must be >= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise ValidationError("seed must fit in 64 bits")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_MODEL_KEYS = {"label", "ar", "lorentzians", "deltas"}
_AR_KEYS = {"S", "s1", "s2", "w1_meV", "w2_meV"}


def _get_number(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise ValidationError(f"missing field {where}.{key}")
    val = obj[key]
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ValidationError(f"field {where}.{key} must be a number, got {val!r}")
    return float(val)


def parse_model(document) -> SpectralDensityModel:
    """Parse a spectral-density document (JSON text or mapping).

    Schema: top-level ``label``, ``ar`` {S, s1, s2, w1_meV, w2_meV},
    ``lorentzians`` [{omega_cm1, hr, gamma_cm1}], ``deltas``
    [{omega_cm1, hr}].  Any non-positive parameter is rejected.
    """
    if isinstance(document, (str, bytes)):
        try:
            obj = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"model document is not valid JSON (line {exc.lineno}): {exc.msg}") from exc
    elif isinstance(document, dict):
        obj = document
    else:
        raise ValidationError(f"model document must be JSON text or a mapping, got {type(document)!r}")

    unknown = set(obj) - _MODEL_KEYS
    if unknown:
        raise ValidationError(f"unknown top-level field(s): {sorted(unknown)}")

    label = obj.get("label", "")
    if not isinstance(label, str):
        raise ValidationError("field label must be a string")

    ar = None
    if obj.get("ar") is not None:
        ar_obj = obj["ar"]
        if not isinstance(ar_obj, dict):
            raise ValidationError("field ar must be a mapping")
        unknown = set(ar_obj) - _AR_KEYS
        if unknown:
            raise ValidationError(f"unknown field(s) in ar: {sorted(unknown)}")
        ar = ARComponent(
            s_total=_get_number(ar_obj, "S", "ar"),
            s1=_get_number(ar_obj, "s1", "ar"),
            s2=_get_number(ar_obj, "s2", "ar"),
            w1=mev_to_cm1(_get_number(ar_obj, "w1_meV", "ar")),
            w2=mev_to_cm1(_get_number(ar_obj, "w2_meV", "ar")),
        )

    lorentzians = []
    for i, entry in enumerate(obj.get("lorentzians", []) or []):
        if not isinstance(entry, dict):
            raise ValidationError(f"lorentzians[{i}] must be a mapping")
        where = f"lorentzians[{i}]"
        lorentzians.append(
            LorentzianComponent(
                omega=_get_number(entry, "omega_cm1", where),
                hr=_get_number(entry, "hr", where),
                gamma=_get_number(entry, "gamma_cm1", where),
            )
        )

    deltas = []
    for i, entry in enumerate(obj.get("deltas", []) or []):
        if not isinstance(entry, dict):
            raise ValidationError(f"deltas[{i}] must be a mapping")
        where = f"deltas[{i}]"
        deltas.append(
            DeltaComponent(
                omega=_get_number(entry, "omega_cm1", where),
                hr=_get_number(entry, "hr", where),
            )
        )

    return SpectralDensityModel(ar=ar, lorentzians=tuple(lorentzians), deltas=tuple(deltas), label=label)


def load_model(path) -> SpectralDensityModel:
    """Read a model document from a JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read model file {path}: {exc}") from exc
    try:
        return parse_model(text)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def model_to_dict(model: SpectralDensityModel) -> dict:
    """Serialize a model back to the document schema."""
    obj: dict = {"label": model.label}
    if model.ar is not None:
        obj["ar"] = {
            "S": model.ar.s_total,
            "s1": model.ar.s1,
            "s2": model.ar.s2,
            "w1_meV": model.ar.w1 / CM1_PER_MEV,
            "w2_meV": model.ar.w2 / CM1_PER_MEV,
        }
    obj["lorentzians"] = [
        {"omega_cm1": l.omega, "hr": l.hr, "gamma_cm1": l.gamma} for l in model.lorentzians
    ]
    obj["deltas"] = [{"omega_cm1": d.omega, "hr": d.hr} for d in model.deltas]
    return obj


def read_mode_table(path, default_gamma: float | None = None) -> SpectralDensityModel:
    """Read a CSV mode table with header ``omega_cm1,hr``.

    A per-file default width may be given as a ``# gamma_cm1 = <value>``
    metadata line or via ``default_gamma``; without either the modes are
    loaded as delta components.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read mode table {path}: {exc}") from exc
    gamma = default_gamma
    rows = []
    header_seen = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if "=" in body:
                key, _, val = body.partition("=")
                if key.strip() == "gamma_cm1" and default_gamma is None:
                    gamma = float(val.strip())
            continue
        if not header_seen:
            if [c.strip() for c in line.split(",")] != ["omega_cm1", "hr"]:
                raise ValidationError(f"{path}:{lineno}: expected header 'omega_cm1,hr'")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValidationError(f"{path}:{lineno}: expected two columns")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise ValidationError(f"{path}: no mode rows found")
    if gamma is None:
        return SpectralDensityModel(deltas=tuple(DeltaComponent(w, s) for w, s in rows), label=path.stem)
    return SpectralDensityModel(
        lorentzians=tuple(LorentzianComponent(w, s, gamma) for w, s in rows), label=path.stem
    )


def parse_electronic(document) -> ElectronicSystem:
    """Parse an electronic system document (JSON text or mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            obj = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"electronic document is not valid JSON (line {exc.lineno}): {exc.msg}") from exc
    elif isinstance(document, dict):
        obj = document
    else:
        raise ValidationError("electronic document must be JSON text or a mapping")
    for key in ("site_energies_cm1", "couplings_cm1", "dipoles"):
        if key not in obj:
            raise ValidationError(f"missing field {key}")
    return ElectronicSystem(
        site_energies=np.asarray(obj["site_energies_cm1"], dtype=float),
        couplings=np.asarray(obj["couplings_cm1"], dtype=float),
        dipoles=np.asarray(obj["dipoles"], dtype=float),
        label=obj.get("label", ""),
    )


def load_electronic(path) -> ElectronicSystem:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read electronic file {path}: {exc}") from exc
    try:
        return parse_electronic(text)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Bundled datasets
# ---------------------------------------------------------------------------

def data_dir() -> Path:
    """Bundled dataset directory; override with $BATHSMITH_DATA."""
    env = os.environ.get("BATHSMITH_DATA")
    if env:
        return Path(env)
    return Path(__file__).parent / "data"


def fmo_phonon_model() -> SpectralDensityModel:
    """AR continuum plus the 62 intra-pigment modes of the FMO complex."""
    return load_model(data_dir() / "fmo_phonon.json")


def fmo_effective_model() -> SpectralDensityModel:
    """AR continuum plus the published five-Lorentzian effective set."""
    return load_model(data_dir() / "fmo_effective5.json")


def fmo_conventional_model() -> SpectralDensityModel:
    """AR continuum plus the single broad reorganization-conserving Lorentzian."""
    return load_model(data_dir() / "fmo_conventional.json")


def ar_pseudomode() -> LorentzianComponent:
    """Single-Lorentzian stand-in for the AR continuum."""
    m = load_model(data_dir() / "ar_pseudomode.json")
    return m.lorentzians[0]


def fmo_electronic_system() -> ElectronicSystem:
    """Seven-site FMO electronic Hamiltonian and dipole table."""
    return load_electronic(data_dir() / "fmo_electronic.json")
