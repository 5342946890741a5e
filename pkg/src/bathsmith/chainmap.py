"""Orthogonal-polynomial chain mapping of (thermalized) spectral densities.

A measure dmu(w) = J_beta(w) dw on a finite support is discretized on
feature-adapted Gauss panels; the Lanczos recurrence (with full
reorthogonalization) of polynomials orthogonal under dmu yields the
site frequencies alpha_n and squared hoppings beta_n of an equivalent
nearest-neighbor oscillator chain.  Truncating the chain and
rediagonalizing gives a discrete star environment whose vacuum
correlation function approximates the thermal one over a finite
horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from ._quad import panel_nodes, subdivide
from .bcf import CorrelationFunction, bcf_distance
from .errors import NumericError, ValidationError
from .model import SpectralDensityModel, thermalized_density
from .units import KB_CM1_PER_K, RAD_FS_PER_CM1


@dataclass(frozen=True)
class ChainCoefficients:
    """Three-term recurrence data: site frequencies and squared hoppings.

    ``betas[0]`` is the total measure weight; the system couples to the
    first site with strength kappa = sqrt(betas[0]).
    """

    alphas: np.ndarray
    betas: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.asarray(self.alphas, dtype=float)
        b = np.asarray(self.betas, dtype=float)
        if a.ndim != 1 or a.shape != b.shape or a.size < 1:
            raise ValidationError("alphas and betas must be equal-length 1-d arrays")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(b > 0)):
            raise ValidationError("chain coefficients must be finite with betas > 0")
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "betas", b)

    @property
    def length(self) -> int:
        return self.alphas.size

    @property
    def kappa(self) -> float:
        return float(np.sqrt(self.betas[0]))

    def truncated(self, length: int) -> "ChainCoefficients":
        if not (1 <= length <= self.length):
            raise ValidationError(f"truncation length must be in [1, {self.length}]")
        return ChainCoefficients(self.alphas[:length], self.betas[:length], self.label)


@dataclass(frozen=True)
class DiscreteEnvironment:
    """Star form of a truncated chain: (frequency, coupling) mode pairs."""

    omegas: np.ndarray
    couplings: np.ndarray
    source_kappa: float
    chain_length: int
    label: str = ""

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=float)
        g = np.asarray(self.couplings, dtype=float)
        if w.shape != g.shape or w.ndim != 1:
            raise ValidationError("omegas and couplings must be matching 1-d arrays")
        total = np.sum(g**2)
        if abs(total - self.source_kappa**2) > 1e-10 * max(self.source_kappa**2, 1e-300):
            raise ValidationError(
                f"sum g^2 = {total} violates orthogonality against kappa^2 = {self.source_kappa**2}"
            )
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "couplings", g)


@dataclass(frozen=True)
class DiscretizedMeasure:
    """Point-mass approximation (nodes, weights) of dmu on its support."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    def moment(self, k: int) -> float:
        return float(np.sum(self.weights * self.nodes**k))

    def correlation(self, t_fs: np.ndarray, temperature: float, label: str = "") -> CorrelationFunction:
        tau = RAD_FS_PER_CM1 * np.asarray(t_fs, dtype=float)
        vals = np.exp(-1j * np.outer(tau, self.nodes)) @ self.weights
        return CorrelationFunction(np.asarray(t_fs, dtype=float), vals, temperature, label=label)


def discretize_measure(
    j_beta,
    support: tuple[float, float],
    features=(),
    n_panels: int = 64,
    n_nodes: int = 32,
    point_masses=(),
) -> DiscretizedMeasure:
    """Composite Gauss-Legendre discretization of dmu = j_beta(w) dw.

    A uniform panel skeleton over the support is refined with feature
    edges (peak positions and widths) so spiky measures keep full
    weight; optional exact ``point_masses`` [(w, mass), ...] are
    appended as discrete nodes.
    """
    lo, hi = support
    if hi <= lo:
        raise ValidationError("support must be an increasing interval")
    edges = set(np.linspace(lo, hi, n_panels + 1))
    for f in features:
        if lo < f < hi:
            edges.add(float(f))
    edges = subdivide(np.array(sorted(edges)), (hi - lo) / n_panels)
    x, w = panel_nodes(edges, n_nodes)
    fw = w * np.asarray(j_beta(x), dtype=float)
    if np.any(fw < -1e-12 * max(np.max(np.abs(fw)), 1e-300)):
        raise ValidationError("measure density must be nonnegative on the support")
    fw = np.maximum(fw, 0.0)
    if point_masses:
        pm = np.asarray(point_masses, dtype=float).reshape(-1, 2)
        x = np.concatenate([x, pm[:, 0]])
        fw = np.concatenate([fw, pm[:, 1]])
    return DiscretizedMeasure(nodes=x, weights=fw)


def recurrence_coefficients(
    j_beta,
    support: tuple[float, float],
    n_coeffs: int,
    features=(),
    n_panels: int = 64,
    n_nodes: int = 32,
    point_masses=(),
    measure: DiscretizedMeasure | None = None,
) -> ChainCoefficients:
    """Recurrence coefficients of polynomials orthogonal under dmu.

    Lanczos iteration on the diagonal node operator with the
    square-root-weight start vector, fully reorthogonalized each step.
    alphas are the monic-recurrence diagonal; betas[0] is the measure
    total, betas[n>=1] the squared off-diagonal coefficients.
    """
    if n_coeffs < 1:
        raise ValidationError("n_coeffs must be >= 1")
    if measure is None:
        measure = discretize_measure(
            j_beta, support, features=features, n_panels=n_panels, n_nodes=n_nodes,
            point_masses=point_masses,
        )
    x, w = measure.nodes, measure.weights
    if n_coeffs > x.size:
        raise ValidationError(f"n_coeffs={n_coeffs} exceeds discretization size {x.size}")
    total = measure.total
    if total <= 0:
        raise ValidationError("measure has no weight")

    alphas = np.zeros(n_coeffs)
    betas = np.zeros(n_coeffs)
    betas[0] = total
    q = np.sqrt(w / total)
    basis = np.empty((n_coeffs, x.size))
    basis[0] = q
    for n in range(n_coeffs):
        r = x * basis[n]
        alphas[n] = basis[n] @ r
        if n + 1 == n_coeffs:
            break
        r -= alphas[n] * basis[n]
        if n > 0:
            r -= np.sqrt(betas[n]) * basis[n - 1]
        # full reorthogonalization, twice for spiky measures
        for _ in range(2):
            r -= basis[: n + 1].T @ (basis[: n + 1] @ r)
        norm2 = r @ r
        if not np.isfinite(norm2) or norm2 <= 0:
            raise NumericError(
                f"orthogonality lost at chain site {n + 1}: squared norm {norm2}"
            )
        betas[n + 1] = norm2
        basis[n + 1] = r / np.sqrt(norm2)
    return ChainCoefficients(alphas=alphas, betas=betas)


def chain_to_star(chain: ChainCoefficients) -> DiscreteEnvironment:
    """Diagonalize the chain into discrete (frequency, coupling) modes.

    Mode frequencies are the eigenvalues of the symmetric tridiagonal
    matrix; couplings are kappa times the first eigenvector components,
    so the couplings satisfy sum g^2 = kappa^2 exactly.
    """
    try:
        vals, vecs = eigh_tridiagonal(chain.alphas, np.sqrt(chain.betas[1:]))
    except Exception as exc:  # pragma: no cover
        raise NumericError(f"tridiagonal eigendecomposition failed: {exc}") from exc
    g = chain.kappa * vecs[0, :]
    # normalize the tiny eigh roundoff so the orthogonality invariant is exact
    g = g * (chain.kappa / np.sqrt(np.sum(g**2)))
    return DiscreteEnvironment(
        omegas=vals,
        couplings=np.abs(g),
        source_kappa=chain.kappa,
        chain_length=chain.length,
        label=chain.label,
    )


def discrete_bcf(
    env: DiscreteEnvironment, t_fs: np.ndarray, temperature: float = 0.0, label: str = ""
) -> CorrelationFunction:
    """Vacuum correlation function sum_j g_j^2 exp(-i w_j t) of the star.

    Finite temperature is already encoded in the signed-frequency
    measure the chain was built from; ``temperature`` is metadata.
    """
    t = np.asarray(t_fs, dtype=float)
    tau = RAD_FS_PER_CM1 * t
    vals = np.exp(-1j * np.outer(tau, env.omegas)) @ env.couplings**2
    return CorrelationFunction(t, vals, temperature, label=label or env.label)


def thermal_measure_inputs(model: SpectralDensityModel, temperature: float):
    """(j_beta callable, support, features, point_masses) for a model at T."""
    kt = KB_CM1_PER_K * temperature
    lo = -min(45.0 * kt, 2000.0) if temperature > 0 else 0.0
    hi = max(3000.0, *(l.omega + 20.0 * l.gamma for l in model.lorentzians)) if model.lorentzians else 3000.0
    features: list[float] = []
    for p in model.breakpoints():
        features.append(p)
        features.append(-p)
    if temperature > 0:
        features.extend(f * kt for f in (-8, -4, -2, -1, 1, 2, 4, 8))
    point_masses = []
    for d in model.deltas:
        if temperature > 0:
            nbar = 1.0 / np.expm1(d.omega / kt)
        else:
            nbar = 0.0
        point_masses.append((d.omega, (nbar + 1.0) * d.omega**2 * d.hr))
        if nbar > 0:
            point_masses.append((-d.omega, nbar * d.omega**2 * d.hr))

    if temperature > 0:
        def j_beta(w):
            return thermalized_density(model, temperature, w)
    else:
        def j_beta(w):
            w = np.asarray(w, dtype=float)
            out = np.zeros_like(w)
            pos = w > 0
            out[pos] = model.evaluate_J(w[pos])
            return out

    return j_beta, (lo, hi), features, point_masses


def chain_for_model(
    model: SpectralDensityModel,
    temperature: float,
    n_coeffs: int,
    n_panels: int = 64,
    n_nodes: int = 32,
) -> tuple[ChainCoefficients, DiscretizedMeasure]:
    """Thermalized chain of a model plus the measure it was built from."""
    j_beta, support, features, masses = thermal_measure_inputs(model, temperature)
    measure = discretize_measure(
        j_beta, support, features=features, n_panels=n_panels, n_nodes=n_nodes,
        point_masses=masses,
    )
    chain = recurrence_coefficients(j_beta, support, n_coeffs, measure=measure)
    return chain, measure


def chain_length_for_horizon(
    j_beta,
    support: tuple[float, float],
    tau: float,
    tol: float,
    features=(),
    point_masses=(),
    dt: float = 0.5,
    max_length: int = 1024,
    temperature: float = 0.0,
) -> int:
    """Smallest chain length reproducing the measure BCF to ``tol`` on [0, tau].

    The reference is the full discretized-measure correlation function;
    candidate lengths are probed by doubling, then bisected.  Distances
    use the Gaussian weight with sigma = tau/3.
    """
    if not (0.0 < tol < 1.0):
        raise ValidationError("tol must be in (0, 1)")
    measure = discretize_measure(j_beta, support, features=features, point_masses=point_masses)
    t = np.arange(0.0, tau + dt / 2, dt)
    c_ref = measure.correlation(t, temperature)
    sigma = tau / 3.0
    cache: dict[str, ChainCoefficients] = {}

    def distance(length: int) -> float:
        chain = cache.get("chain")
        if chain is None or chain.length < length:
            cache["chain"] = chain = recurrence_coefficients(
                j_beta, support, min(max(2 * length, 8), measure.nodes.size), measure=measure
            )
        env = chain_to_star(chain.truncated(length))
        return bcf_distance(discrete_bcf(env, t, temperature), c_ref, sigma, t_max=tau)

    length, prev = 1, 0
    while distance(length) >= tol:
        if length >= max_length:
            raise NumericError(
                f"no chain up to {max_length} sites reaches tolerance {tol} on [0, {tau}] fs"
            )
        prev = length
        length = min(2 * length, max_length)
    lo, hi = prev, length
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if distance(mid) < tol:
            hi = mid
        else:
            lo = mid
    return hi
