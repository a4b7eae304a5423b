"""Saturation of the parametric instability by pump-coordinate noise.

Two-photon absorption and emission driven by the fluctuating pump turn the
linear growth ``dn/dt = 2 gamma n`` into the logistic law

    dn/dt = 2 (gamma n - gamma_tilde n**2),
    gamma_tilde = pi Omega0**2 Sbar(2 Omega0) tanh(hbar Omega0 / k_B T_eta).

The pump coordinate is dimensionless, so its spectral density has units of
time and its response function is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, IntegratorFailure, ZeroNonlinearity
from .units import NATURAL, UnitSystem

__all__ = [
    "PumpNoiseModel",
    "DirectPump",
    "DebyePump",
    "two_photon_rates",
    "absorption_rate_approx",
    "nonlinear_damping",
    "occupation_rate",
    "SaturationReport",
    "saturation_report",
    "evolve_occupation",
    "integrate_occupation",
    "relaxation_time_estimate",
    "braggio_estimate",
]


class PumpNoiseModel:
    """Noise statistics of the pump coordinate at the two-photon frequency."""

    t_eta: float

    def s_bar(self, omega: float, units: UnitSystem = NATURAL) -> float:
        """Symmetrized spectral density at angular frequency ``omega``."""
        raise NotImplementedError

    def boltzmann_factor(self, omega0: float, units: UnitSystem = NATURAL) -> float:
        """S-(2 Omega0) / S+(2 Omega0) = exp(-2 hbar Omega0 / k_B T_eta)."""
        return math.exp(-2.0 * units.hbar * omega0 / (units.k_B * self.t_eta))

    def s_plus(self, omega0: float, units: UnitSystem = NATURAL) -> float:
        return 2.0 * self.s_bar(2.0 * omega0, units) / (1.0 + self.boltzmann_factor(omega0, units))

    def s_minus(self, omega0: float, units: UnitSystem = NATURAL) -> float:
        return self.boltzmann_factor(omega0, units) * self.s_plus(omega0, units)


def _check_t_eta(t_eta):
    if not t_eta > 0:
        raise DomainError(f"pump noise temperature must be > 0, got {t_eta!r}")


@dataclass(frozen=True)
class DirectPump(PumpNoiseModel):
    """Spectral density Sbar(2 Omega0) given directly."""

    s_bar_value: float
    t_eta: float

    def __post_init__(self):
        if not self.s_bar_value >= 0:
            raise DomainError(f"spectral density must be >= 0, got {self.s_bar_value!r}")
        _check_t_eta(self.t_eta)

    def s_bar(self, omega, units=NATURAL):
        return self.s_bar_value


@dataclass(frozen=True)
class DebyePump(PumpNoiseModel):
    """Single-relaxation response ``chi(omega) = chi0 / (1 - i omega tau_dagger)``.

    The noise follows from the fluctuation-dissipation theorem,
    ``Sbar(omega) = (hbar / 2 pi) coth(hbar omega / 2 k_B T_eta) Im chi(omega)``.
    """

    chi0: float
    tau_dagger: float
    t_eta: float

    def __post_init__(self):
        if not self.chi0 >= 0:
            raise DomainError(f"chi0 must be >= 0, got {self.chi0!r}")
        if not self.tau_dagger > 0:
            raise DomainError(f"tau_dagger must be > 0, got {self.tau_dagger!r}")
        _check_t_eta(self.t_eta)

    def im_chi(self, omega):
        x = np.asarray(omega, dtype=float) * self.tau_dagger
        return self.chi0 * x / (1.0 + x * x)

    def chi(self, omega):
        return self.chi0 / (1.0 - 1j * np.asarray(omega) * self.tau_dagger)

    def s_bar(self, omega, units=NATURAL):
        x = units.hbar * omega / (2.0 * units.k_B * self.t_eta)
        return units.hbar / (2.0 * math.pi) / math.tanh(x) * float(self.im_chi(omega))


def two_photon_rates(n: int, omega0: float, pump: PumpNoiseModel,
                     units: UnitSystem = NATURAL) -> tuple[float, float]:
    """Golden-rule rates ``(Gamma+ (n -> n-2), Gamma- (n-2 -> n))``."""
    if int(n) != n or n < 0:
        raise DomainError(f"occupation must be a non-negative integer, got {n!r}")
    pairs = n * (n - 1)
    pref = math.pi * omega0**2 / 8.0 * pairs
    return pref * pump.s_plus(omega0, units), pref * pump.s_minus(omega0, units)


def absorption_rate_approx(n: float, omega0: float, pump: PumpNoiseModel,
                           units: UnitSystem = NATURAL) -> float:
    """Large-n net photon absorption ``(pi Omega0^2 Sbar / 2) tanh(hbar Omega0/k_B T_eta) n^2``.

    This matches per-event pair counting from :func:`two_photon_rates` but is a
    factor 4 below the loss term ``2 gamma_tilde n^2`` of the logistic law;
    :func:`occupation_rate` uses the logistic coefficients.
    """
    x = units.hbar * omega0 / (units.k_B * pump.t_eta)
    return 0.5 * math.pi * omega0**2 * pump.s_bar(2.0 * omega0, units) * math.tanh(x) * n * n


def nonlinear_damping(omega0: float, pump: PumpNoiseModel, units: UnitSystem = NATURAL) -> float:
    """gamma_tilde = pi Omega0^2 Sbar(2 Omega0) tanh(hbar Omega0 / k_B T_eta)."""
    if not omega0 > 0:
        raise DomainError(f"Omega0 must be > 0, got {omega0!r}")
    x = units.hbar * omega0 / (units.k_B * pump.t_eta)
    return math.pi * omega0**2 * pump.s_bar(2.0 * omega0, units) * math.tanh(x)


def occupation_rate(n, gamma: float, gamma_tilde: float):
    """dn/dt of the logistic law."""
    n = np.asarray(n, dtype=float)
    return 2.0 * (gamma * n - gamma_tilde * n * n)


@dataclass(frozen=True)
class SaturationReport:
    gamma: float
    gamma_tilde: float
    n_sat_ms11: float
    n_sat_ms14: float | None
    n_sat_ms16: float | None
    consistency_defect: float

    def as_dict(self) -> dict:
        return asdict(self)


def saturation_report(gamma: float, omega0: float, pump: PumpNoiseModel,
                      units: UnitSystem = NATURAL) -> SaturationReport:
    """Saturated occupation by the noise route, the response route and the relaxation-time route.

    The response and relaxation-time routes need a :class:`DebyePump`; for a
    :class:`DirectPump` they are ``None``.

    Raises
    ------
    ZeroNonlinearity
        If gamma_tilde vanishes, i.e. the growth is never arrested.
    """
    if not gamma > 0:
        raise DomainError(f"linear gain gamma must be > 0, got {gamma!r}")
    gt = nonlinear_damping(omega0, pump, units)
    if gt == 0:
        raise ZeroNonlinearity("gamma_tilde = 0: the occupation grows without bound")
    x = units.hbar * omega0 / (units.k_B * pump.t_eta)
    s_bar = pump.s_bar(2.0 * omega0, units)
    n11 = gamma / (math.pi * omega0**2 * s_bar) / math.tanh(x)
    n14 = n16 = None
    if isinstance(pump, DebyePump):
        n14 = 2.0 * gamma / (omega0**2 * units.hbar * float(pump.im_chi(2.0 * omega0)))
        n16 = gamma / (omega0**3 * pump.tau_dagger * units.hbar * pump.chi0)
    routes = [v for v in (n11, n14, n16) if v is not None]
    defect = max(abs(a - b) / max(abs(a), abs(b)) for a in routes for b in routes)
    return SaturationReport(gamma, gt, n11, n14, n16, defect)


def evolve_occupation(n0: float, gamma: float, gamma_tilde: float, t):
    """Closed-form solution of the logistic law (pure exponential when gamma_tilde = 0)."""
    if not n0 >= 0:
        raise DomainError(f"n0 must be >= 0, got {n0!r}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    if gamma_tilde == 0:
        return n0 * np.exp(2.0 * gamma * t)
    n_sat = gamma / gamma_tilde
    decay = np.exp(-2.0 * gamma * t)
    # algebraically n_sat n0 e^{2gt} / (n_sat + n0 (e^{2gt} - 1)), without overflow
    return n_sat * n0 / (n_sat * decay - n0 * np.expm1(-2.0 * gamma * t))


def integrate_occupation(n0: float, gamma: float, gamma_tilde: float, t, rtol: float = 1e-10):
    """Integrate the logistic law numerically at the times ``t`` (adaptive DOP853)."""
    t = np.asarray(t, dtype=float)
    sol = solve_ivp(
        lambda _, n: 2.0 * (gamma * n - gamma_tilde * n * n),
        (0.0, float(t.max())), [float(n0)], method="DOP853",
        t_eval=t, rtol=rtol, atol=rtol * 1e-6 * max(n0, 1e-300),
    )
    if not sol.success:
        raise IntegratorFailure(f"occupation integration failed: {sol.message}")
    return sol.y[0]


def relaxation_time_estimate(omega_laser: float, tau_recombination: float, chi0: float,
                             units: UnitSystem = NATURAL) -> float:
    """tau_dagger ~ tau_R / (hbar omega_L chi(0)) for a laser-excited semiconductor pump."""
    return tau_recombination / (units.hbar * omega_laser * chi0)


def braggio_estimate(gamma_over_omega: float = 0.05, inv_omega_tau_r: float = 10.0,
                     omega_l_over_omega: float = 2e5) -> float:
    """Order-of-magnitude saturated photon number ``(gamma/Omega0)(1/Omega0 tau_R)(omega_L/Omega0)``."""
    for name, v in (("gamma_over_omega", gamma_over_omega), ("inv_omega_tau_r", inv_omega_tau_r),
                    ("omega_l_over_omega", omega_l_over_omega)):
        if not v > 0:
            raise DomainError(f"{name} must be > 0, got {v!r}")
    return gamma_over_omega * inv_omega_tau_r * omega_l_over_omega
