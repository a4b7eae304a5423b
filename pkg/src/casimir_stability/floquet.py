"""Scattering of the mode signal by frequency pulses, and Floquet analysis.

The signal obeys ``phi'' + (Omega0**2 + nu2(t)) phi = 0`` where the modulation
``nu2`` is compactly supported.  Everything is built from the real 2x2
transfer matrix of ``(phi, phi')`` across the pulse support.  Free stretches
are exact rotations; the pulse itself is integrated with an adaptive
embedded Runge-Kutta pair (DOP853).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import CasimirError, DomainError, IntegratorFailure, NonPositiveFrequency
from .thermo import Stability

__all__ = [
    "PulseProfile",
    "RectangularPulse",
    "GaussianPulse",
    "TabulatedPulse",
    "PulseTrain",
    "ScatteringResult",
    "FloquetClass",
    "FloquetResult",
    "ChartCell",
    "rotation_block",
    "transfer_matrix",
    "scatter_pulse",
    "monodromy",
    "classify",
    "net_production_rate",
    "stability_chart",
]

DEFAULT_TOL = 1e-10
MARGINAL_BAND = 1e-10
GAUSSIAN_CUTOFF = 6.0


class PulseProfile:
    """A compactly supported modulation ``nu2(t)`` of the squared frequency."""

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def nu_squared(self, t, omega0: float):
        raise NotImplementedError

    def is_zero(self) -> bool:
        raise NotImplementedError

    def min_nu_squared(self, omega0: float) -> float:
        """Lower bound of nu2 over the support (used for the positivity check)."""
        raise NotImplementedError

    def scalar_function(self, omega0: float):
        """Fast scalar ``t -> nu2(t)`` valid on the support (used by the integrator)."""
        return lambda t: float(self.nu_squared(t, omega0))

    def shifted(self, dt: float) -> "PulseProfile":
        raise NotImplementedError

    def reversed(self) -> "PulseProfile":
        """Time-reversed pulse ``nu2(-t)``."""
        raise NotImplementedError

    def check_positive(self, omega0: float) -> None:
        if not omega0 > 0:
            raise DomainError(f"Omega0 must be > 0, got {omega0!r}")
        lowest = omega0**2 + self.min_nu_squared(omega0)
        if not lowest > 0:
            raise NonPositiveFrequency(
                f"Omega0^2 + nu^2(t) reaches {lowest!r} <= 0 for Omega0 = {omega0!r}"
            )


@dataclass(frozen=True)
class RectangularPulse(PulseProfile):
    """Frequency stepped to ``(1 + alpha) Omega0`` on ``[start, start + width]``."""

    alpha: float
    width: float
    start: float = 0.0

    def __post_init__(self):
        if not self.alpha > -1:
            raise DomainError(f"alpha must be > -1, got {self.alpha!r}")
        if not self.width > 0:
            raise DomainError(f"width must be > 0, got {self.width!r}")

    @property
    def support(self):
        return (self.start, self.start + self.width)

    def level(self, omega0: float) -> float:
        return ((1.0 + self.alpha) ** 2 - 1.0) * omega0**2

    def nu_squared(self, t, omega0):
        t = np.asarray(t, dtype=float)
        a, b = self.support
        return np.where((t >= a) & (t <= b), self.level(omega0), 0.0)

    def is_zero(self):
        return self.alpha == 0

    def scalar_function(self, omega0):
        level = self.level(omega0)
        return lambda t: level

    def min_nu_squared(self, omega0):
        return min(0.0, self.level(omega0))

    def shifted(self, dt):
        return replace(self, start=self.start + dt)

    def reversed(self):
        return replace(self, start=-(self.start + self.width))


@dataclass(frozen=True)
class GaussianPulse(PulseProfile):
    """``nu2(t) = amplitude * exp(-((t - center)/width)**2)``, cut at 6 widths."""

    amplitude: float
    width: float
    center: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError(f"width must be > 0, got {self.width!r}")

    @property
    def support(self):
        half = GAUSSIAN_CUTOFF * self.width
        return (self.center - half, self.center + half)

    def nu_squared(self, t, omega0):
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.exp(-(((t - self.center) / self.width) ** 2))

    def is_zero(self):
        return self.amplitude == 0

    def scalar_function(self, omega0):
        amp, c, w, exp = self.amplitude, self.center, self.width, math.exp
        return lambda t: amp * exp(-(((t - c) / w) ** 2))

    def min_nu_squared(self, omega0):
        return min(0.0, self.amplitude)

    def shifted(self, dt):
        return replace(self, center=self.center + dt)

    def reversed(self):
        return replace(self, center=-self.center)


@dataclass(frozen=True, eq=False)
class TabulatedPulse(PulseProfile):
    """``nu2`` sampled on a uniform grid from ``t_start``; cubic-spline interpolated."""

    values: np.ndarray
    dt: float
    t_start: float = 0.0
    _spline: CubicSpline = field(init=False, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 4:
            raise DomainError("tabulated pulse needs at least 4 samples")
        if not np.all(np.isfinite(values)):
            raise DomainError("tabulated pulse samples must be finite")
        if not self.dt > 0:
            raise DomainError(f"dt must be > 0, got {self.dt!r}")
        t = self.t_start + self.dt * np.arange(values.size)
        object.__setattr__(self, "_spline", CubicSpline(t, values))

    @property
    def support(self):
        return (self.t_start, self.t_start + self.dt * (self.values.size - 1))

    def nu_squared(self, t, omega0):
        t = np.asarray(t, dtype=float)
        a, b = self.support
        return np.where((t >= a) & (t <= b), self._spline(np.clip(t, a, b)), 0.0)

    def is_zero(self):
        return not np.any(self.values)

    def scalar_function(self, omega0):
        coeffs = self._spline.c.T.tolist()
        t0, dt, last = self.t_start, self.dt, len(coeffs) - 1

        def nu2(t):
            i = min(max(int((t - t0) / dt), 0), last)
            c3, c2, c1, c0 = coeffs[i]
            x = t - (t0 + i * dt)
            return ((c3 * x + c2) * x + c1) * x + c0

        return nu2

    def min_nu_squared(self, omega0):
        a, b = self.support
        dense = self._spline(np.linspace(a, b, 8 * self.values.size))
        return min(0.0, float(dense.min()))

    def shifted(self, dt):
        return TabulatedPulse(self.values, self.dt, self.t_start + dt)

    def reversed(self):
        a, b = self.support
        return TabulatedPulse(self.values[::-1].copy(), self.dt, -b)


@dataclass(frozen=True)
class PulseTrain:
    """Periodic repetition of ``pulse``; its support is relative to the period start."""

    pulse: PulseProfile
    period: float
    t0: float = 0.0
    n_pulses: int = 1

    def __post_init__(self):
        if not self.period > 0:
            raise DomainError(f"period must be > 0, got {self.period!r}")
        if int(self.n_pulses) != self.n_pulses or self.n_pulses < 1:
            raise DomainError(f"n_pulses must be an integer >= 1, got {self.n_pulses!r}")
        a, b = self.pulse.support
        slack = 1e-12 * self.period
        if a < -slack or b > self.period + slack:
            raise DomainError(
                f"pulse support [{a!r}, {b!r}] does not fit in one period [0, {self.period!r}]"
            )

    @classmethod
    def rectangular(cls, alpha: float, period: float, duty: float = 0.5, t0: float = 0.0,
                    n_pulses: int = 1) -> "PulseTrain":
        """Frequency Omega0 for the first ``1 - duty`` of each period, then ``(1+alpha) Omega0``."""
        if not 0 < duty <= 1:
            raise DomainError(f"duty must be in (0, 1], got {duty!r}")
        pulse = RectangularPulse(alpha, duty * period, (1.0 - duty) * period)
        return cls(pulse, period, t0, n_pulses)


def rotation_block(omega: float, t: float) -> np.ndarray:
    """Exact transfer matrix of ``phi'' + omega**2 phi = 0`` over time ``t``."""
    c, s = math.cos(omega * t), math.sin(omega * t)
    return np.array([[c, s / omega], [-omega * s, c]])


def transfer_matrix(omega0: float, pulse: PulseProfile, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Map ``(phi, phi')`` at the start of the pulse support to its end."""
    pulse.check_positive(omega0)
    a, b = pulse.support
    if pulse.is_zero():
        return rotation_block(omega0, b - a)
    # integrate in s = omega0 t so the tolerances are scale free
    w2 = omega0 * omega0
    check = isinstance(pulse, TabulatedPulse)
    nu2 = pulse.scalar_function(omega0)

    def rhs(s, y):
        t = s / omega0
        q = 1.0 + nu2(t) / w2
        if check and q <= 0:
            raise NonPositiveFrequency(f"Omega^2(t) <= 0 at t = {t!r}")
        return (y[1], -q * y[0], y[3], -q * y[2])

    sol = solve_ivp(
        rhs, (omega0 * a, omega0 * b), [1.0, 0.0, 0.0, 1.0],
        method="DOP853", rtol=tol, atol=tol * 1e-2,
    )
    if not sol.success:
        raise IntegratorFailure(f"pulse integration failed: {sol.message}")
    y = sol.y[:, -1]
    # back from d/ds to d/dt
    return np.array([[y[0], y[2] / omega0], [omega0 * y[1], y[3]]])


@dataclass(frozen=True)
class ScatteringResult:
    rho: complex
    sigma: complex
    transfer: np.ndarray = field(repr=False)

    @property
    def R(self) -> float:
        return abs(self.rho) ** 2

    @property
    def P(self) -> float:
        return abs(self.sigma) ** 2

    @property
    def Theta(self) -> float:
        """Phase with ``sigma = sqrt(P) exp(-i Theta)``."""
        return -math.atan2(self.sigma.imag, self.sigma.real)

    @property
    def unitarity_defect(self) -> float:
        return abs(self.R + self.P - 1.0)

    def as_dict(self) -> dict:
        return {
            "rho_re": self.rho.real,
            "rho_im": self.rho.imag,
            "sigma_re": self.sigma.real,
            "sigma_im": self.sigma.imag,
            "R": self.R,
            "P": self.P,
            "Theta": self.Theta,
            "unitarity_defect": self.unitarity_defect,
        }


def scatter_pulse(omega0: float, pulse: PulseProfile, tol: float = DEFAULT_TOL) -> ScatteringResult:
    """Pair-creation amplitudes of a single pulse.

    The solution is ``sigma e^{i Omega0 t}`` before the pulse and
    ``e^{i Omega0 t} + rho e^{-i Omega0 t}`` after it, with absolute time t.
    """
    T = transfer_matrix(omega0, pulse, tol)
    a, b = pulse.support
    ea = np.exp(1j * omega0 * a)
    w = T @ np.array([ea, 1j * omega0 * ea])
    A = np.exp(-1j * omega0 * b) * 0.5 * (w[0] + w[1] / (1j * omega0))
    B = np.exp(1j * omega0 * b) * 0.5 * (w[0] - w[1] / (1j * omega0))
    return ScatteringResult(rho=complex(B / A), sigma=complex(1.0 / A), transfer=T)


@dataclass(frozen=True)
class FloquetClass:
    kind: Stability
    rate: float | None = None  # Floquet frequency if stable, growth rate if unstable
    sign: int | None = None  # +1 for mu > 1, -1 for the period-doubling branch


def classify(mu: float, period: float) -> FloquetClass:
    """Classify a characteristic value; reports the non-negative exponent."""
    if not period > 0:
        raise DomainError(f"period must be > 0, got {period!r}")
    excess = abs(mu) - 1.0
    if abs(excess) <= MARGINAL_BAND:
        return FloquetClass(Stability.MARGINAL)
    if excess < 0:
        return FloquetClass(Stability.STABLE, math.acos(mu) / period)
    return FloquetClass(Stability.UNSTABLE, math.acosh(abs(mu)) / period, 1 if mu > 0 else -1)


@dataclass(frozen=True)
class FloquetResult:
    mu: float
    classification: FloquetClass
    monodromy: np.ndarray = field(repr=False)
    det_defect: float
    mu_formula: float
    cross_check_defect: float

    @property
    def kind(self) -> Stability:
        return self.classification.kind

    @property
    def growth_rate(self) -> float:
        """gamma for unstable motion, 0 otherwise."""
        c = self.classification
        return c.rate if c.kind is Stability.UNSTABLE else 0.0


def monodromy(omega0: float, train: PulseTrain, tol: float = DEFAULT_TOL) -> FloquetResult:
    """One-period transfer matrix, its half-trace and classification.

    ``mu`` is also recomputed from the single-pulse transmission as
    ``cos(Omega0 tau + Theta) / sqrt(P)`` and the difference recorded.
    """
    tau = train.period
    a, b = train.pulse.support
    a, b = max(a, 0.0), min(b, tau)
    scat = scatter_pulse(omega0, train.pulse, tol)
    M = rotation_block(omega0, tau - b) @ scat.transfer @ rotation_block(omega0, a)
    mu = 0.5 * float(np.trace(M))
    mu_formula = math.cos(omega0 * tau + scat.Theta) / math.sqrt(scat.P)
    return FloquetResult(
        mu=mu,
        classification=classify(mu, tau),
        monodromy=M,
        det_defect=abs(float(np.linalg.det(M)) - 1.0),
        mu_formula=mu_formula,
        cross_check_defect=abs(mu - mu_formula),
    )


def net_production_rate(gamma: float, omega0: float, Q: float) -> float:
    """Net photon production rate ``2 gamma - Omega0/Q`` (negative means net loss)."""
    if not gamma >= 0:
        raise DomainError(f"gamma must be >= 0, got {gamma!r}")
    if not Q > 0:
        raise DomainError(f"Q must be > 0, got {Q!r}")
    return 2.0 * gamma - omega0 / Q


@dataclass(frozen=True)
class ChartCell:
    alpha: float
    omega0_tau: float
    mu: float
    kind: str  # stable | unstable | marginal | error
    rate: float
    error: str | None = None


def stability_chart(omega0: float, alpha_range, omega0_tau_range, shape=(50, 50),
                    duty: float = 0.5, tol: float = DEFAULT_TOL) -> list[ChartCell]:
    """Row-major scan (alpha outer) of the rectangular pulse train.

    A failing cell is reported with ``kind='error'`` instead of aborting.
    """
    n_alpha, n_ot = shape
    if n_alpha < 2 or n_ot < 2:
        raise DomainError(f"grid shape must be at least 2x2, got {shape}")
    for lo, hi in (alpha_range, omega0_tau_range):
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DomainError("chart ranges must be finite")
    alphas = np.linspace(alpha_range[0], alpha_range[1], n_alpha)
    ots = np.linspace(omega0_tau_range[0], omega0_tau_range[1], n_ot)
    cells = []
    for alpha in alphas:
        for ot in ots:
            try:
                res = monodromy(omega0, PulseTrain.rectangular(float(alpha), float(ot) / omega0, duty), tol)
            except CasimirError as exc:
                cells.append(ChartCell(float(alpha), float(ot), math.nan, "error", math.nan,
                                       f"{type(exc).__name__}: {exc}"))
                continue
            c = res.classification
            cells.append(ChartCell(float(alpha), float(ot), res.mu, c.kind.value,
                                   c.rate if c.rate is not None else 0.0))
    return cells
