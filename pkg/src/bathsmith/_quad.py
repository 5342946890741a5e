"""Composite Gauss-Legendre panel quadrature and exponential integrals.

Shared numerical machinery: panel construction adapted to spectral
features and to the oscillation rate exp(-i w t_max), plus a scaled
exponential integral G(z) = exp(z) E_1(z) that stays finite for the
pole arguments arising in closed-form Lorentzian correlation tails.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import special

from .units import RAD_FS_PER_CM1

# phase half-range (rad) a 24-node panel integrates to ~1e-12
_PHASE_CAP = 8.0
_EULER_GAMMA = 0.5772156649015329


@lru_cache(maxsize=16)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def subdivide(edges: np.ndarray, max_width: float) -> np.ndarray:
    """Split panels wider than ``max_width`` into equal parts."""
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        k = max(1, int(np.ceil((b - a) / max_width)))
        out.extend(np.linspace(a, b, k + 1)[1:])
    return np.asarray(out)


def build_edges(lo: float, hi: float, features, t_max_fs: float, n_nodes: int) -> np.ndarray:
    """Panel edges on [lo, hi] honoring feature points and oscillation.

    Features outside (lo, hi) are dropped; panels are capped so the
    phase swing of exp(-i w t_max) per panel stays within what the
    Gauss rule resolves.
    """
    if hi <= lo:
        raise ValueError(f"empty integration range [{lo}, {hi}]")
    pts = {lo, hi}
    for p in features:
        if lo < p < hi:
            pts.add(float(p))
    edges = np.array(sorted(pts))
    # drop near-duplicate edges
    keep = np.concatenate([[True], np.diff(edges) > 1e-9 * max(abs(lo), abs(hi), 1.0)])
    edges = edges[keep]
    if edges[-1] != hi:
        edges = np.append(edges, hi)
    phase_rate = RAD_FS_PER_CM1 * max(t_max_fs, 1e-12)
    max_width = max(2.0 * _PHASE_CAP * (n_nodes / 24.0) / phase_rate, 1e-6)
    return subdivide(edges, max_width)


def panel_nodes(edges: np.ndarray, n_nodes: int):
    """Gauss-Legendre nodes and weights on each panel, concatenated."""
    x0, w0 = _leggauss(n_nodes)
    a = edges[:-1]
    b = edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    w = (half[:, None] * w0[None, :]).ravel()
    return x, w


def oscillatory_sum(f_vals: np.ndarray, weights: np.ndarray, omega: np.ndarray,
                    t_fs: np.ndarray, chunk: int = 1024) -> np.ndarray:
    """sum_i w_i f(w_i) exp(-i w_i t) evaluated for every t (chunked)."""
    wf = weights * f_vals
    out = np.empty(t_fs.size, dtype=complex)
    tau = RAD_FS_PER_CM1 * t_fs
    for start in range(0, t_fs.size, chunk):
        sl = slice(start, min(start + chunk, t_fs.size))
        phase = np.exp(np.outer(omega, -1j * tau[sl]))
        out[sl] = wf @ phase
    return out


def cosine_sum(f_vals: np.ndarray, weights: np.ndarray, omega: np.ndarray,
               t_fs: np.ndarray, chunk: int = 1024) -> np.ndarray:
    """sum_i w_i f(w_i) cos(w_i t) evaluated for every t (chunked)."""
    wf = weights * f_vals
    out = np.empty(t_fs.size, dtype=float)
    tau = RAD_FS_PER_CM1 * t_fs
    for start in range(0, t_fs.size, chunk):
        sl = slice(start, min(start + chunk, t_fs.size))
        out[sl] = wf @ np.cos(np.outer(omega, tau[sl]))
    return out


def scaled_exp1(z: np.ndarray) -> np.ndarray:
    """G(z) = exp(z) * E_1(z), stable for large |z| at any phase angle.

    Direct evaluation below |z| = 50 (no overflow there), asymptotic
    series above; |arg z| < pi required (principal branch).
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    big = np.abs(z) > 50.0
    if np.any(~big):
        zs = z[~big]
        out[~big] = np.exp(zs) * special.exp1(zs)
    if np.any(big):
        zb = z[big]
        inv = 1.0 / zb
        term = inv.copy()
        acc = term.copy()
        for k in range(1, 16):
            term = term * (-k) * inv
            acc += term
        out[big] = acc
    return out


def lorentzian_t0_correlation(omega0: float, gamma: float, t_fs: np.ndarray) -> np.ndarray:
    """Closed-form int_0^inf J(w) exp(-i w t) dw for a unit-hr Lorentzian.

    Pole decomposition of the antisymmetrized Lorentzian: the pole at
    omega0 - i*gamma contributes the residue term (the exponentially
    decaying oscillation); the branch corrections enter through the
    scaled exponential integral.  Exact for all t >= 0.
    """
    from .model import LorentzianComponent

    lor = LorentzianComponent(omega=omega0, hr=1.0, gamma=gamma)
    poles = lor.poles()
    res = lor.residues()
    t = np.asarray(t_fs, dtype=float)
    tau = RAD_FS_PER_CM1 * t
    out = np.zeros(t.shape, dtype=complex)
    pos = tau > 0
    if np.any(pos):
        tp = tau[pos]
        acc = np.zeros(tp.shape, dtype=complex)
        for p, r in zip(poles, res):
            acc += r * scaled_exp1(-1j * p * tp)
        # pole in the fourth quadrant of -i*p*tau crossed by the contour
        p4 = omega0 - 1j * gamma
        r4 = res[1]
        acc -= 2j * np.pi * r4 * np.exp(-1j * p4 * tp)
        out[pos] = acc
    if np.any(~pos):
        # t = 0: sum_p r_p ln(-p) with principal logs; residues sum to 0
        val = -np.sum(res * np.log(-poles))
        out[~pos] = val
    return out
