"""Unit conventions and physical constants.

Everything inside the package uses one unit system: energies and
frequencies in cm^-1 (wavenumbers), time in fs, temperature in K.
Angular phases are formed as ``RAD_FS_PER_CM1 * omega_cm1 * t_fs``.
"""

from __future__ import annotations

import numpy as np

# 2*pi*c with c = 2.99792458e-5 cm/fs; converts cm^-1 to rad/fs.
RAD_FS_PER_CM1 = 1.883651567e-4

# Boltzmann constant in cm^-1 per K.
KB_CM1_PER_K = 0.695034800

# 1 meV in cm^-1.
CM1_PER_MEV = 8.06554


def mev_to_cm1(energy_mev):
    """Convert an energy in meV to cm^-1."""
    return np.asarray(energy_mev) * CM1_PER_MEV if np.ndim(energy_mev) else energy_mev * CM1_PER_MEV


def cm1_to_mev(energy_cm1):
    """Convert an energy in cm^-1 to meV."""
    return np.asarray(energy_cm1) / CM1_PER_MEV if np.ndim(energy_cm1) else energy_cm1 / CM1_PER_MEV


def angular(omega_cm1):
    """Angular frequency in rad/fs for a wavenumber in cm^-1."""
    return RAD_FS_PER_CM1 * np.asarray(omega_cm1) if np.ndim(omega_cm1) else RAD_FS_PER_CM1 * omega_cm1


def rate_fs_to_cm1(rate_per_fs: float) -> float:
    """Express a decay rate in fs^-1 as an equivalent width in cm^-1."""
    return rate_per_fs / RAD_FS_PER_CM1


def thermal_energy(temperature: float) -> float:
    """k_B * T in cm^-1."""
    return KB_CM1_PER_K * temperature
