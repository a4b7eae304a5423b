"""Causal linear response of the damped mode.

The wall admittance enters only through the damping spectrum Re Gamma(omega)
on the real axis.  Everything else follows from the dispersion integral

    Pi(zeta) = (2/pi) * int_0^inf omega**2 Re Gamma(omega) / (omega**2 - zeta**2) domega

which is valid anywhere in the closed upper half plane.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import DomainError, PoleProximityWarning, QuadratureFailure, UnstableStatic
from .units import CavityMode

__all__ = [
    "DampingModel",
    "Drude",
    "Tabulated",
    "load_damping_table",
    "Renormalization",
    "self_energy",
    "self_energy_imag_axis",
    "propagator",
    "dielectric",
    "admittance",
    "renormalize",
]

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-14
_QUAD_LIMIT = 400


class DampingModel:
    """Base class for passive damping spectra Re Gamma(omega + i0)."""

    def re_gamma(self, omega):
        raise NotImplementedError

    def im_self_energy(self, omega):
        """Im Pi(omega + i0) = omega * Re Gamma(omega)."""
        omega = np.asarray(omega, dtype=float)
        return omega * self.re_gamma(np.abs(omega))

    def scales(self) -> list[float]:
        """Frequencies where the spectrum changes character (quadrature breakpoints)."""
        return []

    def kinks(self) -> list[float]:
        """Frequencies where Re Gamma is not smooth."""
        return []

    def is_zero(self) -> bool:
        raise NotImplementedError

    def static_self_energy(self) -> float | None:
        """Pi(0) in closed form, or None when only quadrature is available."""
        return None

    def sum_rule_integral(self) -> float:
        """(2/pi) * int_0^inf Re Gamma(omega) domega."""
        raise NotImplementedError


@dataclass(frozen=True)
class Drude(DampingModel):
    """Re Gamma(omega) = gamma0 / (1 + (omega tau_c)**2).

    The continuation into the upper half plane is
    Pi(zeta) = gamma0 / (tau_c (1 - i zeta tau_c)).
    """

    gamma0: float
    tau_c: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma0) and self.gamma0 >= 0):
            raise DomainError(f"gamma0 must be finite and >= 0, got {self.gamma0!r}")
        if not (math.isfinite(self.tau_c) and self.tau_c > 0):
            raise DomainError(f"tau_c must be finite and > 0, got {self.tau_c!r}")

    def re_gamma(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.gamma0 / (1.0 + (omega * self.tau_c) ** 2)

    def scales(self):
        return [1.0 / self.tau_c]

    def is_zero(self):
        return self.gamma0 == 0

    def closed_form(self, zeta) -> complex:
        return self.gamma0 / (self.tau_c * (1.0 - 1j * np.asarray(zeta) * self.tau_c))

    def static_self_energy(self):
        return self.gamma0 / self.tau_c

    def sum_rule_integral(self):
        val = _integrate_pieces(
            lambda w: float(self.re_gamma(w)), [0.0, 1.0 / self.tau_c, math.inf],
            DEFAULT_RTOL, 0.0,
        )
        return 2.0 / math.pi * val


@dataclass(frozen=True)
class Tabulated(DampingModel):
    """Re Gamma sampled on an increasing grid, with a power-law tail.

    Between samples the spectrum is linear, below the first sample it is held
    constant, and above the last sample it decays as ``(omega_max/omega)**p``.
    """

    omega: np.ndarray
    values: np.ndarray
    decay_exponent: float

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "values", values)
        if omega.ndim != 1 or omega.shape != values.shape or omega.size < 2:
            raise DomainError("omega and values must be 1-D arrays of equal length >= 2")
        if omega[0] < 0 or np.any(np.diff(omega) <= 0):
            raise DomainError("omega grid must be non-negative and strictly increasing")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise DomainError("tabulated Re Gamma must be finite and >= 0 (passivity)")
        if not self.decay_exponent > 1:
            raise DomainError(
                f"decay exponent must be > 1 for a convergent sum rule, got {self.decay_exponent!r}"
            )

    @property
    def omega_max(self) -> float:
        return float(self.omega[-1])

    def re_gamma(self, omega):
        omega = np.asarray(omega, dtype=float)
        inside = np.interp(omega, self.omega, self.values)
        with np.errstate(divide="ignore"):
            tail = self.values[-1] * (self.omega_max / np.maximum(omega, self.omega_max)) ** self.decay_exponent
        return np.where(omega > self.omega_max, tail, inside)

    def scales(self):
        return [float(self.omega[0]) if self.omega[0] > 0 else float(self.omega[1]), self.omega_max]

    def kinks(self):
        return [float(w) for w in self.omega]

    def is_zero(self):
        return not np.any(self.values > 0)

    def sum_rule_integral(self):
        # exact for the piecewise-linear table plus the analytic power-law tail
        body = float(np.sum(0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.omega)))
        head = float(self.values[0] * self.omega[0])
        tail = float(self.values[-1] * self.omega_max / (self.decay_exponent - 1.0))
        return 2.0 / math.pi * (head + body + tail)

    def _segments(self):
        """Edges and linear coefficients c0 + c1*omega of every table segment."""
        edges = self.omega
        c1 = np.diff(self.values) / np.diff(edges)
        c0 = self.values[:-1] - c1 * edges[:-1]
        if edges[0] > 0:
            edges = np.concatenate([[0.0], edges])
            c0 = np.concatenate([[self.values[0]], c0])
            c1 = np.concatenate([[0.0], c1])
        return edges, c0, c1

    def body_integral(self, zeta: complex) -> complex:
        """int_0^omega_max omega^2 Re Gamma / (omega^2 - zeta^2) in closed form.

        A real ``zeta`` is read as ``zeta + i0``; the logarithmic singularity at
        a table node cancels between the two adjacent segments.
        """
        edges, c0, c1 = self._segments()
        a, b = edges[:-1], edges[1:]
        plain = c0 * (b - a) + 0.5 * c1 * (b * b - a * a)
        if zeta == 0:
            return complex(np.sum(plain))
        r2 = (b / abs(zeta)) ** 2
        far = r2 < 1e-4
        out = np.zeros(a.shape, dtype=complex)
        if np.any(far):
            af, bf, c0f, c1f = a[far], b[far], c0[far], c1[far]
            acc = np.zeros(af.shape, dtype=complex)
            for k in range(4):
                m = 2 * k + 3
                acc += (c0f * (bf**m - af**m) / m + c1f * (bf ** (m + 1) - af ** (m + 1)) / (m + 1)) / zeta ** (2 * k + 2)
            out[far] = -acc
        near = ~far
        if np.any(near):
            an, bn, c0n, c1n = a[near], b[near], c0[near], c1[near]

            def logs(w):
                if zeta.imag == 0:
                    x = zeta.real
                    d = np.abs(w - x)
                    with np.errstate(divide="ignore"):
                        lm = np.where(d > 0, np.log(np.where(d > 0, d, 1.0)), 0.0) - 1j * math.pi * (w < x)
                    lp = np.log(w + x).astype(complex)
                else:
                    lm = np.log(w - zeta)
                    lp = np.log(w + zeta)
                return lm, lp

            lm_b, lp_b = logs(bn)
            lm_a, lp_a = logs(an)
            i0 = ((lm_b - lp_b) - (lm_a - lp_a)) / (2.0 * zeta)
            i1 = 0.5 * ((lm_b + lp_b) - (lm_a + lp_a))
            out[near] = plain[near] + zeta * zeta * (c0n * i0 + c1n * i1)
        return complex(np.sum(out))

    def tail_integral(self, zeta: complex, rtol: float, atol: float) -> complex:
        """int_omega_max^inf omega^2 Re Gamma / (omega^2 - zeta^2) by quadrature."""
        wm, A, p = self.omega_max, float(self.values[-1]), self.decay_exponent
        if A == 0:
            return 0j
        # the tail can sit far below the caller's absolute floor; this one tracks its size
        atol = rtol * 1e-3 * A * wm * min(1.0, (wm / abs(zeta)) ** 2) if zeta != 0 else rtol * 1e-3 * A * wm
        z2 = zeta * zeta

        def t(w):
            return A * (wm / w) ** p * w * w

        if zeta.imag == 0 and zeta.real != 0:
            x = abs(zeta.real)
            if x == wm:
                raise DomainError("real-axis self energy exactly at the table edge is undefined")
            if x > wm:
                d = x - wm

                def folded(s):
                    return (t(x + s) / (2 * x + s) - t(x - s) / (2 * x - s)) / s

                near = _integrate_pieces(folded, [0.0, d], rtol, atol)
                far = _integrate_pieces(lambda w: t(w) / (w * w - x * x), [x + d, math.inf], rtol, atol)
                re = near + far
                return complex(re, math.pi * x * float(self.re_gamma(x)) / 2.0)
        if zeta.imag > 0 and abs(zeta.real) > wm:
            # near pole at w = Re s: subtract t there over [wm, 2x] and add back the log
            sp = zeta if zeta.real > 0 else -zeta
            x = sp.real
            tx = t(x)

            def cquad(g, pieces):
                re = _integrate_pieces(lambda w: g(w).real, pieces, rtol, atol)
                im = _integrate_pieces(lambda w: g(w).imag, pieces, rtol, atol)
                return complex(re, im)

            sing = (cquad(lambda w: (t(w) - tx) / (w - sp), [wm, x, 2 * x])
                    + tx * (cmath.log(2 * x - sp) - cmath.log(wm - sp))
                    + cquad(lambda w: t(w) / (w - sp), [2 * x, math.inf]))
            reg = cquad(lambda w: t(w) / (w + sp), [wm, x, 2 * x, math.inf])
            # 1/(w^2 - s^2) = (1/(w - s) - 1/(w + s)) / (2 s) and s^2 = zeta^2
            return (sing - reg) / (2 * sp)
        edges = [wm] + sorted({v for v in (abs(zeta), 2 * wm) if v > wm}) + [math.inf]
        re = _integrate_pieces(lambda w: (t(w) / (w * w - z2)).real, edges, rtol, atol)
        if z2.imag == 0 and (zeta.real == 0 or zeta.imag == 0):
            return complex(re)
        im = _integrate_pieces(lambda w: (t(w) / (w * w - z2)).imag, edges, rtol, atol)
        return complex(re, im)


def load_damping_table(path) -> Tabulated:
    """Read a ``omega,re_gamma`` CSV with a ``# p=<exponent>`` header line."""
    p = None
    rows = []
    header_seen = False
    for line in Path(path).read_text().splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s[1:].strip()
            if body.startswith("p="):
                p = float(body[2:])
            continue
        if not header_seen:
            if [h.strip() for h in s.split(",")] != ["omega", "re_gamma"]:
                raise DomainError(f"expected header 'omega,re_gamma', got {s!r}")
            header_seen = True
            continue
        try:
            rows.append([float(v) for v in s.split(",")])
        except ValueError:
            raise DomainError(f"malformed damping-table row {s!r}") from None
    if p is None:
        raise DomainError("missing '# p=<decay exponent>' header")
    table = np.asarray(rows, dtype=float)
    if table.ndim != 2 or table.shape[1] != 2:
        raise DomainError("damping table must have two columns")
    return Tabulated(table[:, 0], table[:, 1], p)


def _quad(f, a, b, rtol, atol, points=None):
    if math.isinf(b) and a > 0:
        # w = a/u keeps the scale of the piece; the built-in map does not
        pts = None if points is None else [a / p for p in points if p > a]
        return _quad(lambda u: f(a / u) * a / (u * u), 0.0, 1.0, rtol, atol, pts)
    kwargs = dict(epsabs=atol, epsrel=rtol, limit=_QUAD_LIMIT, full_output=1)
    if points is not None and math.isfinite(b):
        pts = [p for p in points if a < p < b]
        if pts:
            kwargs["points"] = pts[: _QUAD_LIMIT - 1]
    out = integrate.quad(f, a, b, **kwargs)
    value, err = out[0], out[1]
    ok = len(out) == 3
    return value, err, ok


def _integrate_pieces(f, edges, rtol, atol, points=None):
    total = 0.0
    total_err = 0.0
    all_ok = True
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        # an unbounded piece may sit far below atol, so it is controlled relatively
        value, err, ok = _quad(f, a, b, rtol, 0.0 if math.isinf(b) else atol, points)
        total += value
        total_err += err
        all_ok &= ok
    if not all_ok and total_err > max(atol, rtol * abs(total)):
        raise QuadratureFailure(
            f"dispersion integral did not converge: value {total!r}, error estimate {total_err!r}"
        )
    return total


def _edges(model: DampingModel, extra=()):
    pts = sorted({s for s in list(model.scales()) + list(extra) if s > 0 and math.isfinite(s)})
    return [0.0] + pts + [math.inf]


def self_energy(model: DampingModel, zeta, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> complex:
    """Self energy Pi(zeta) for Im(zeta) >= 0 from the dispersion integral.

    On the real axis the imaginary part is read off the model and the real
    part is a principal value, evaluated by folding the interval symmetrically
    about the singular point.
    """
    zeta = complex(zeta)
    if zeta.imag < 0:
        raise DomainError(f"self energy is defined for Im(zeta) >= 0, got {zeta!r}")
    if model.is_zero():
        return 0j
    if isinstance(model, Tabulated):
        if zeta.imag == 0 and zeta.real < 0:
            return self_energy(model, -zeta.real, rtol, atol).conjugate()
        return 2.0 / math.pi * (model.body_integral(zeta) + model.tail_integral(zeta, rtol, atol))
    kinks = model.kinks() or None
    if zeta.imag == 0:
        x = zeta.real
        if x == 0:
            val = _integrate_pieces(lambda w: float(model.re_gamma(w)), _edges(model), rtol, atol, kinks)
            return complex(2.0 / math.pi * val)
        pi_val = _principal_value(model, abs(x), rtol, atol)
        return pi_val if x > 0 else pi_val.conjugate()

    z2 = zeta * zeta
    if zeta.real == 0:
        y2 = zeta.imag**2

        def f(w):
            return w * w * float(model.re_gamma(w)) / (w * w + y2)

        val = _integrate_pieces(f, _edges(model, [zeta.imag]), rtol, atol, kinks)
        return complex(2.0 / math.pi * val)

    def g(w):
        return w * w * float(model.re_gamma(w)) / (w * w - z2)

    edges = _edges(model, [abs(zeta), abs(zeta.real)])
    re = _integrate_pieces(lambda w: g(w).real, edges, rtol, atol, kinks)
    im = _integrate_pieces(lambda w: g(w).imag, edges, rtol, atol, kinks)
    return 2.0 / math.pi * complex(re, im)


def _principal_value(model: DampingModel, x: float, rtol: float, atol: float) -> complex:
    def h(w):
        return w * w * float(model.re_gamma(w)) / (w + x)

    def folded(s):
        return (h(x + s) - h(x - s)) / s

    kinks = model.kinks()
    fold_points = sorted({abs(k - x) for k in kinks if 0 < abs(k - x) < x}) or None
    near = _integrate_pieces(folded, [0.0, x], rtol, atol, fold_points)

    def far(w):
        return w * w * float(model.re_gamma(w)) / (w * w - x * x)

    edges = [2.0 * x] + sorted(s for s in model.scales() if s > 2.0 * x) + [math.inf]
    rest = _integrate_pieces(far, edges, rtol, atol, kinks or None)
    re = 2.0 / math.pi * (near + rest)
    return complex(re, float(model.im_self_energy(x)))


def self_energy_imag_axis(model: DampingModel, y, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """Pi(i y) for an array of y >= 0, closed form where the model has one."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("y must be >= 0")
    if isinstance(model, Drude):
        return model.gamma0 / (model.tau_c * (1.0 + y * model.tau_c))
    flat = np.array([self_energy(model, 1j * v, rtol, atol).real for v in y.ravel()])
    return flat.reshape(y.shape)


def propagator(mode: CavityMode, model: DampingModel, zeta, rtol: float = DEFAULT_RTOL) -> complex:
    """Retarded propagator D(zeta) of the mode coordinate.

    A :class:`PoleProximityWarning` is emitted when the denominator is below
    ``1e-12 * Omega_inf**2``.
    """
    zeta = complex(zeta)
    w2 = mode.bare_frequency**2
    pi_val = self_energy(model, zeta, rtol, DEFAULT_ATOL * w2)
    den = w2 - zeta * zeta - pi_val
    if abs(den) < 1e-12 * w2:
        warnings.warn(
            f"propagator evaluated at the pole (|denominator| = {abs(den):.3g})",
            PoleProximityWarning,
            stacklevel=2,
        )
        if den == 0:
            return complex(math.inf, 0.0)
    return mode.inductance / mode.c * w2 / den


def dielectric(mode: CavityMode, model: DampingModel, zeta, rtol: float = DEFAULT_RTOL) -> complex:
    """Mode dielectric function eps(zeta) = 1 + Pi(zeta) / zeta**2."""
    zeta = complex(zeta)
    if zeta == 0:
        raise DomainError("dielectric function is singular at zeta = 0")
    pi_val = self_energy(model, zeta, rtol, DEFAULT_ATOL * mode.bare_frequency**2)
    return 1.0 + pi_val / (zeta * zeta)


def admittance(mode: CavityMode, model: DampingModel, zeta, rtol: float = DEFAULT_RTOL) -> complex:
    """Wall admittance Y(zeta) = -i C Pi(zeta) / zeta."""
    zeta = complex(zeta)
    if zeta == 0:
        raise DomainError("admittance is singular at zeta = 0")
    pi_val = self_energy(model, zeta, rtol, DEFAULT_ATOL * mode.bare_frequency**2)
    return -1j * mode.capacitance * pi_val / zeta


@dataclass(frozen=True)
class Renormalization:
    shifted_frequency: float
    pi_at_zero: float
    quality_factor: float
    sum_rule_residual: float
    weak_damping: bool
    shifted_frequency_squared: float  # Omega_inf**2 - Pi(0) before the square root

    @property
    def q_unbounded(self) -> bool:
        return math.isinf(self.quality_factor)


def renormalize(mode: CavityMode, model: DampingModel, rtol: float = DEFAULT_RTOL) -> Renormalization:
    """Shifted frequency, sum-rule residual and quality factor.

    Raises
    ------
    UnstableStatic
        If Pi(0) >= Omega_inf**2.  See :mod:`casimir_stability.thermo`.
    """
    w2 = mode.bare_frequency**2
    pi0 = model.static_self_energy()
    if pi0 is None:
        pi0 = self_energy(model, 0.0, rtol, DEFAULT_ATOL * w2).real
    if pi0 >= w2:
        raise UnstableStatic(
            f"Pi(0) = {pi0!r} >= Omega_inf^2 = {w2!r}; the mode is statically unstable"
        )
    omega0_sq = w2 - pi0
    omega0 = math.sqrt(omega0_sq)
    residual = 0.0 if model.is_zero() else abs(w2 - omega0_sq - model.sum_rule_integral()) / w2
    damping = float(model.re_gamma(omega0))
    if damping > 0:
        q = omega0 / damping
    else:
        q = math.inf
    return Renormalization(omega0, pi0, q, residual, q > 10, omega0_sq)
