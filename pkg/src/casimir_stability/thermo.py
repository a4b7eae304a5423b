"""Free energy of the damped mode and its thermodynamic stability.

The bare oscillator contributes ``k_B T ln[2 sinh(hbar Omega / 2 k_B T)]`` and
the wall coupling adds the Matsubara sum

    f_1 = (k_B T / 2) * sum_n ln[1 - Pi(i|omega_n|) / (Omega_inf**2 + omega_n**2)]

with ``hbar omega_n = 2 pi n k_B T``.  The n = 0 term decides stability.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, NonPositiveTemperature, TruncationNotConverged
from .response import DampingModel, Drude, self_energy, self_energy_imag_axis
from .units import NATURAL, CavityMode, UnitSystem

__all__ = [
    "free_energy_bare",
    "matsubara_frequencies",
    "matsubara_log_arguments",
    "FreeEnergyResult",
    "casimir_shift",
    "Stability",
    "StabilityVerdict",
    "stability_verdict",
    "QuarticWell",
    "quartic_well",
]

MARGINAL_TOL = 1e-12
DEFAULT_N_MAX = 10**6


def free_energy_bare(bare_frequency: float, temperature: float, units: UnitSystem = NATURAL) -> float:
    """Free energy of the uncoupled oscillator.

    Uses ``hbar Omega/2 + k_B T ln(1 - exp(-hbar Omega/k_B T))``, the summed
    form of the level sum, which stays finite for any temperature.
    """
    if not bare_frequency > 0:
        raise DomainError(f"bare frequency must be > 0, got {bare_frequency!r}")
    if not temperature >= 0:
        raise DomainError(f"temperature must be >= 0, got {temperature!r}")
    zero_point = 0.5 * units.hbar * bare_frequency
    kT = units.k_B * temperature
    if kT == 0:
        return zero_point
    x = units.hbar * bare_frequency / kT
    return zero_point + kT * math.log1p(-math.exp(-x))


def matsubara_frequencies(n, temperature: float, units: UnitSystem = NATURAL) -> np.ndarray:
    """|omega_n| = 2 pi |n| k_B T / hbar."""
    return 2.0 * math.pi * units.k_B * temperature / units.hbar * np.abs(np.asarray(n))


def matsubara_log_arguments(mode: CavityMode, model: DampingModel, temperature: float, n,
                            units: UnitSystem = NATURAL) -> np.ndarray:
    """``1 - Pi(i|omega_n|)/(Omega_inf**2 + omega_n**2)`` for integer n (sign ignored)."""
    if not temperature > 0:
        raise NonPositiveTemperature(f"temperature must be > 0, got {temperature!r}")
    w2 = mode.bare_frequency**2
    y = matsubara_frequencies(n, temperature, units)
    return 1.0 - self_energy_imag_axis(model, y) / (w2 + y * y)


@dataclass(frozen=True)
class FreeEnergyResult:
    f_bare: float
    f_shift: float
    is_stable: bool
    instability_strength: float | None
    matsubara_terms_used: int
    truncation_error_estimate: float
    min_log_argument: float


def _tail_bound(model: DampingModel, n_last: int, step: float, pi_last: float) -> float:
    """Upper bound on sum_{n > n_last} Pi(i omega_n) / omega_n**2."""
    if isinstance(model, Drude):
        # Pi(iy) <= gamma0 / (tau_c**2 y)  ->  sum of 1/n**3
        coeff = model.gamma0 / (model.tau_c**2 * step**3)
        return coeff * float(special.zeta(3.0, n_last + 1))
    # Pi(iy) is non-increasing in y and sum_{n>N} 1/n^2 <= 1/N
    return pi_last / (step * step * n_last)


def casimir_shift(mode: CavityMode, model: DampingModel, temperature: float,
                  rel_tol: float = 1e-8, n_max: int = DEFAULT_N_MAX,
                  units: UnitSystem = NATURAL) -> FreeEnergyResult:
    """Matsubara free-energy shift with a certified truncation bound.

    Terms are added in ascending n, in blocks, until the bound on the
    neglected tail falls below ``rel_tol * |f_1|``.  If any logarithm argument
    is non-positive the mode is flagged unstable and ``f_shift`` holds the
    real part of the (then complex) sum.
    """
    if not temperature > 0:
        raise NonPositiveTemperature(f"temperature must be > 0, got {temperature!r}")
    kT = units.k_B * temperature
    f_bare = free_energy_bare(mode.bare_frequency, temperature, units)
    if model.is_zero():
        return FreeEnergyResult(f_bare, 0.0, True, None, 1, 0.0, 1.0)

    w2 = mode.bare_frequency**2
    step = 2.0 * math.pi * kT / units.hbar
    pi0 = model.static_self_energy()
    if pi0 is None:
        pi0 = self_energy(model, 0.0).real
    arg0 = 1.0 - pi0 / w2
    min_arg = arg0
    with np.errstate(divide="ignore"):
        total = float(np.log(abs(arg0)))  # n = 0 counts once
    n_done = 0
    block = 16
    bound = math.inf
    while True:
        if n_done >= n_max:
            raise TruncationNotConverged(
                f"Matsubara sum not converged after {n_done} terms "
                f"(tail bound {bound!r}, target {rel_tol!r} relative)"
            )
        n = np.arange(n_done + 1, min(n_done + block, n_max) + 1)
        y = n * step
        pi_vals = self_energy_imag_axis(model, y)
        args = 1.0 - pi_vals / (w2 + y * y)
        min_arg = min(min_arg, float(args.min()))
        with np.errstate(divide="ignore"):
            total += 2.0 * float(np.sum(np.log(np.abs(args))))
        n_done = int(n[-1])
        u_next = float(pi_vals[-1]) / (w2 + float(y[-1]) ** 2)
        tail_u = _tail_bound(model, n_done, step, float(pi_vals[-1]))
        if u_next < 1:
            bound = kT * tail_u / (1.0 - u_next)
        f_shift = 0.5 * kT * total
        if bound <= rel_tol * abs(f_shift) or not math.isfinite(f_shift):
            break
        block = min(2 * block, 1 << 16)

    is_stable = min_arg > 0
    return FreeEnergyResult(
        f_bare=f_bare,
        f_shift=f_shift,
        is_stable=is_stable,
        instability_strength=None if is_stable else pi0 - w2,
        matsubara_terms_used=n_done + 1,
        truncation_error_estimate=bound,
        min_log_argument=min_arg,
    )


class Stability(enum.Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class StabilityVerdict:
    kind: Stability
    omega0: float | None = None  # sqrt(Pi(0) - Omega_inf**2) when unstable

    @property
    def is_stable(self) -> bool:
        return self.kind is Stability.STABLE


def stability_verdict(mode: CavityMode, model: DampingModel) -> StabilityVerdict:
    """Stable iff Pi(0) < Omega_inf**2, with a 1e-12 relative marginal band."""
    w2 = mode.bare_frequency**2
    pi0 = model.static_self_energy()
    if pi0 is None:
        pi0 = self_energy(model, 0.0).real
    excess = pi0 - w2
    if abs(excess) <= MARGINAL_TOL * w2:
        return StabilityVerdict(Stability.MARGINAL)
    if excess > 0:
        return StabilityVerdict(Stability.UNSTABLE, math.sqrt(excess))
    return StabilityVerdict(Stability.STABLE)


@dataclass(frozen=True)
class QuarticWell:
    """Double-well potential that re-stabilizes a statically unstable mode.

    ``V(Phi) = C omega0**2 / (4 Phi0**2 c**2) * (Phi**2 - Phi0**2)**2``, with
    kinetic term ``C Phi_dot**2 / (2 c**2)``.
    """

    omega0: float
    phi0: float
    capacitance: float
    c: float = 1.0

    @property
    def quartic_coefficient(self) -> float:
        return self.capacitance * self.omega0**2 / (4.0 * self.phi0**2 * self.c**2)

    @property
    def minima(self) -> tuple[float, float]:
        return (-self.phi0, self.phi0)

    @property
    def barrier_height(self) -> float:
        return self.capacitance * self.omega0**2 * self.phi0**2 / (4.0 * self.c**2)

    @property
    def small_oscillation_frequency(self) -> float:
        return math.sqrt(2.0) * self.omega0

    def potential(self, phi):
        phi = np.asarray(phi, dtype=float)
        return self.quartic_coefficient * (phi**2 - self.phi0**2) ** 2

    def curvature(self, phi):
        """d^2 V / d Phi^2."""
        phi = np.asarray(phi, dtype=float)
        return self.quartic_coefficient * (12.0 * phi**2 - 4.0 * self.phi0**2)

    def lagrangian(self, phi_dot, phi):
        phi_dot = np.asarray(phi_dot, dtype=float)
        return self.capacitance * phi_dot**2 / (2.0 * self.c**2) - self.potential(phi)


def quartic_well(omega0: float, phi0: float, capacitance: float, c: float = 1.0) -> QuarticWell:
    for name, value in (("omega0", omega0), ("phi0", phi0), ("capacitance", capacitance)):
        if not value > 0:
            raise DomainError(f"{name} must be > 0, got {value!r}")
    return QuarticWell(omega0, phi0, capacitance, c)
