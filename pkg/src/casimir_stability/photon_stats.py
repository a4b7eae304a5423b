"""Photon statistics of pair creation: noise temperatures and cavity heating."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError
from .units import NATURAL, UnitSystem

__all__ = [
    "planck_occupation",
    "planck_temperature",
    "noise_temperature",
    "HeatingResult",
    "heat_cavity",
    "enhancement_curve",
    "PulsedTemperature",
    "pulsed_noise_temperature",
]

EXP_LIMIT = 700.0


def planck_occupation(omega: float, temperature: float, units: UnitSystem = NATURAL) -> float:
    """Mean occupation 1/(exp(hbar omega / k_B T) - 1); 0 at T = 0."""
    if temperature == 0:
        return 0.0
    x = units.hbar * omega / (units.k_B * temperature)
    # e^{-x} / (1 - e^{-x}) underflows to 0 where 1/expm1(x) would overflow
    return math.exp(-x) / -math.expm1(-x)


def planck_temperature(omega: float, occupation: float, units: UnitSystem = NATURAL) -> float:
    """Temperature whose Planck occupation is ``occupation``; 0 for N = 0."""
    if occupation < 0:
        raise DomainError(f"occupation must be >= 0, got {occupation!r}")
    if occupation == 0:
        return 0.0
    return units.hbar * omega / (units.k_B * math.log1p(1.0 / occupation))


def _check_reflection(R: float, omega0: float) -> None:
    if not 0 <= R < 1:
        raise DomainError(f"reflection probability must lie in [0, 1), got {R!r}")
    if not omega0 > 0:
        raise DomainError(f"Omega0 must be > 0, got {omega0!r}")


def noise_temperature(R: float, omega0: float, units: UnitSystem = NATURAL) -> float:
    """Pair-creation noise temperature T* defined by R = exp(-hbar Omega0 / k_B T*)."""
    _check_reflection(R, omega0)
    if R == 0:
        return 0.0
    return units.hbar * omega0 / (units.k_B * -math.log(R))


@dataclass(frozen=True)
class HeatingResult:
    T_star: float
    N_bar: float
    N_i: float
    N_f: float
    T_i: float
    T_f: float
    T_f_approx: float
    approx_valid: bool

    def as_dict(self) -> dict:
        return asdict(self)


def heat_cavity(R: float, omega0: float, T_i: float, units: UnitSystem = NATURAL) -> HeatingResult:
    """Mean occupations and temperatures after pulsing a thermal mode.

    ``T_f`` is the exact Planck inversion of ``N_f = (2 N_bar + 1) N_i + N_bar``;
    ``T_f_approx = T* coth(hbar Omega0 / 2 k_B T_i)`` is the high-T* shortcut,
    trusted when ``k_B T* >= 10 hbar Omega0`` (``approx_valid``).
    """
    _check_reflection(R, omega0)
    if not T_i >= 0:
        raise DomainError(f"initial temperature must be >= 0, got {T_i!r}")
    E = units.hbar * omega0
    T_star = noise_temperature(R, omega0, units)
    N_bar = R / (1.0 - R)
    N_i = planck_occupation(omega0, T_i, units)
    N_f = (2.0 * N_bar + 1.0) * N_i + N_bar
    T_f = planck_temperature(omega0, N_f, units)
    if T_i == 0:
        coth = 1.0
    else:
        coth = 1.0 / math.tanh(E / (2.0 * units.k_B * T_i))
    return HeatingResult(
        T_star=T_star,
        N_bar=N_bar,
        N_i=N_i,
        N_f=N_f,
        T_i=T_i,
        T_f=T_f,
        T_f_approx=T_star * coth,
        approx_valid=units.k_B * T_star >= 10.0 * E,
    )


def enhancement_curve(omega0: float, T_star: float, kTi_range=(0.0, 5.0), n: int = 101,
                      units: UnitSystem = NATURAL) -> np.ndarray:
    """Rows of ``(k_B T_i / E, T_f_approx / T*, T_f / T*)`` with E = hbar Omega0."""
    if n < 2:
        raise DomainError(f"need at least 2 points, got {n}")
    lo, hi = kTi_range
    if not (0 <= lo <= hi and math.isfinite(hi)):
        raise DomainError(f"k_B T_i / E range must lie within [0, inf), got {kTi_range}")
    if not T_star > 0:
        raise DomainError(f"T* must be > 0, got {T_star!r}")
    E = units.hbar * omega0
    R = math.exp(-E / (units.k_B * T_star))
    rows = []
    for x in np.linspace(lo, hi, n):
        res = heat_cavity(R, omega0, x * E / units.k_B, units)
        rows.append((float(x), res.T_f_approx / res.T_star, res.T_f / res.T_star))
    return np.array(rows)


@dataclass(frozen=True)
class PulsedTemperature:
    k_B_T: float  # energy
    saturated: bool


def pulsed_noise_temperature(n_p: int, tau: float, net_rate: float, omega0: float,
                             units: UnitSystem = NATURAL) -> PulsedTemperature:
    """Noise temperature after ``n_p`` pulses, ``hbar Omega0 exp(n_p tau Gamma_1)``.

    Exponents above 700 are clipped and flagged as saturated.
    """
    if int(n_p) != n_p or n_p < 0:
        raise DomainError(f"n_p must be a non-negative integer, got {n_p!r}")
    if not tau > 0:
        raise DomainError(f"tau must be > 0, got {tau!r}")
    exponent = n_p * tau * net_rate
    saturated = exponent > EXP_LIMIT
    return PulsedTemperature(units.hbar * omega0 * math.exp(min(exponent, EXP_LIMIT)), saturated)
