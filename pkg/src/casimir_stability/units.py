"""Unit system, the cavity-mode record and mode constants from sampled fields.

Internally everything runs in natural units with hbar = k_B = c = 1 and the
second as the unit of time.  Frequencies are angular (rad/s), temperatures are
stored as energies k_B*T/hbar, lengths as c*t.  The SI helpers below are the
only place where physical constants enter.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import constants as _const

from .errors import DomainError, ZeroCurl, ZeroField

__all__ = [
    "UnitSystem",
    "NATURAL",
    "SI",
    "to_natural",
    "from_natural",
    "CavityMode",
    "ModeFunctionSamples",
    "mode_constants",
    "sinusoidal_test_mode",
    "load_mode_samples",
    "save_mode_samples",
]


@dataclass(frozen=True)
class UnitSystem:
    """Values of hbar, k_B and c used by the formulas."""

    hbar: float = 1.0
    k_B: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "k_B", "c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")


NATURAL = UnitSystem()
SI = UnitSystem(hbar=_const.hbar, k_B=_const.k, c=_const.c)

# multiply an SI value by the factor to get the natural-unit value
_SI_FACTORS = {
    "frequency": 1.0,
    "rate": 1.0,
    "time": 1.0,
    "dimensionless": 1.0,
    "temperature": _const.k / _const.hbar,
    "energy": 1.0 / _const.hbar,
    "length": 1.0 / _const.c,
}


def _factor(quantity: str) -> float:
    try:
        return _SI_FACTORS[quantity]
    except KeyError:
        raise DomainError(
            f"unknown quantity {quantity!r}; expected one of {sorted(_SI_FACTORS)}"
        ) from None


def to_natural(value, quantity: str):
    """Convert an SI value (rad/s, s, K, J, m) to natural units."""
    return value * _factor(quantity)


def from_natural(value, quantity: str):
    """Inverse of :func:`to_natural`."""
    return value / _factor(quantity)


@dataclass(frozen=True)
class CavityMode:
    """Single-mode LC oscillator.

    Only ``capacitance`` and ``inverse_inductance`` are stored; the bare
    frequency is always derived from them.
    """

    capacitance: float
    inverse_inductance: float
    c: float = 1.0

    def __post_init__(self):
        if not self.capacitance > 0:
            raise DomainError(f"capacitance must be > 0, got {self.capacitance!r}")
        if not self.inverse_inductance > 0:
            raise DomainError(
                f"inverse_inductance must be > 0, got {self.inverse_inductance!r}"
            )
        if not self.c > 0:
            raise DomainError(f"c must be > 0, got {self.c!r}")

    @classmethod
    def from_frequency(cls, bare_frequency: float, capacitance: float = 1.0, c: float = 1.0):
        """Build the mode whose bare frequency is ``bare_frequency``."""
        if not bare_frequency > 0:
            raise DomainError(f"bare_frequency must be > 0, got {bare_frequency!r}")
        return cls(capacitance, bare_frequency**2 * capacitance / c**2, c)

    @property
    def inductance(self) -> float:
        return 1.0 / self.inverse_inductance

    @property
    def bare_frequency(self) -> float:
        return self.c * math.sqrt(self.inverse_inductance / self.capacitance)


@dataclass(frozen=True)
class ModeFunctionSamples:
    """Mode function K and its curl sampled on a uniform rectilinear grid.

    ``K`` and ``curl_K`` have shape ``(nx, ny, nz, 3)``.  Each sample stands
    for the cell of volume ``dx*dy*dz`` centred on it.
    """

    K: np.ndarray
    curl_K: np.ndarray
    spacing: tuple[float, float, float]
    origin: tuple[float, float, float] = field(default=(0.0, 0.0, 0.0))

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float)
        curl_K = np.asarray(self.curl_K, dtype=float)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "curl_K", curl_K)
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        if K.ndim != 4 or K.shape[-1] != 3:
            raise DomainError(f"K must have shape (nx, ny, nz, 3), got {K.shape}")
        if K.shape != curl_K.shape:
            raise DomainError(
                f"K and curl_K grid shapes differ: {K.shape} vs {curl_K.shape}"
            )
        if len(self.spacing) != 3 or not all(s > 0 for s in self.spacing):
            raise DomainError(f"grid spacings must be three positive numbers, got {self.spacing}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.K.shape[:3]

    @property
    def cell_volume(self) -> float:
        dx, dy, dz = self.spacing
        return dx * dy * dz

    def coordinates(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(
            o + s * np.arange(n) for o, s, n in zip(self.origin, self.spacing, self.shape)
        )


def mode_constants(samples: ModeFunctionSamples, units: UnitSystem = NATURAL) -> CavityMode:
    """Capacitance, inverse inductance and bare frequency of a sampled mode.

    Both volume integrals are evaluated with the composite midpoint rule on
    the sample grid.

    Raises
    ------
    ZeroField
        If the integral of ``|K|**2`` is zero.
    ZeroCurl
        If the integral of ``|curl K|**2`` is zero.
    """
    if min(samples.shape) < 2:
        raise DomainError(f"need at least 2 points per axis, got grid {samples.shape}")
    dV = samples.cell_volume
    capacitance = float(np.sum(samples.K**2)) * dV / (4.0 * math.pi)
    inverse_inductance = float(np.sum(samples.curl_K**2)) * dV / (4.0 * math.pi)
    if not capacitance > 0:
        raise ZeroField("integral of |K|^2 vanishes; capacitance is degenerate")
    if not inverse_inductance > 0:
        raise ZeroCurl("integral of |curl K|^2 vanishes; mode does not oscillate")
    return CavityMode(capacitance, inverse_inductance, units.c)


def sinusoidal_test_mode(n: int, L: float = 1.0) -> ModeFunctionSamples:
    """Cube mode K = z*sqrt(2)*sin(pi x/L) with its curl, at cell centres.

    The exact constants are C = L**3/(4 pi) and 1/Lambda = pi L/4, so the
    bare frequency is pi*c/L.
    """
    if n < 2:
        raise DomainError("need at least 2 points per axis")
    h = L / n
    x = (np.arange(n) + 0.5) * h
    K = np.zeros((n, n, n, 3))
    curl_K = np.zeros((n, n, n, 3))
    K[..., 2] = (math.sqrt(2.0) * np.sin(math.pi * x / L))[:, None, None]
    # curl(z f(x)) = -y f'(x); sign is irrelevant for |curl K|^2
    curl_K[..., 1] = (math.sqrt(2.0) * math.pi / L * np.cos(math.pi * x / L))[:, None, None]
    return ModeFunctionSamples(K, curl_K, (h, h, h), origin=(h / 2, h / 2, h / 2))


_COLUMNS = ["x", "y", "z", "Kx", "Ky", "Kz", "cKx", "cKy", "cKz"]
_KEYVAL = re.compile(r"([A-Za-z_]\w*)\s*=\s*([^\s,;]+)")


def load_mode_samples(path) -> ModeFunctionSamples:
    """Read samples from CSV with a ``# nx=.. dx=..`` sidecar header.

    Rows are in row-major order of the ``(nx, ny, nz)`` grid.  Spacings that
    are missing from the header are inferred from the coordinate columns.
    """
    meta: dict[str, str] = {}
    header = None
    data_lines = []
    for line in Path(path).read_text().splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            meta.update(_KEYVAL.findall(stripped[1:]))
        elif header is None:
            header = [h.strip() for h in stripped.split(",")]
        else:
            data_lines.append(stripped)
    if header != _COLUMNS:
        raise DomainError(f"expected CSV header {','.join(_COLUMNS)}, got {header}")
    try:
        nx, ny, nz = (int(meta[k]) for k in ("nx", "ny", "nz"))
        table = np.loadtxt(data_lines, delimiter=",", ndmin=2)
    except KeyError as exc:
        raise DomainError(f"missing grid size {exc.args[0]!r} in '#' header") from None
    except ValueError as exc:
        raise DomainError(f"malformed mode-sample file: {exc}") from None
    if table.shape != (nx * ny * nz, 9):
        raise DomainError(
            f"expected {nx * ny * nz} rows of 9 columns, got {table.shape}"
        )
    grid = table.reshape(nx, ny, nz, 9)
    coords = (grid[:, 0, 0, 0], grid[0, :, 0, 1], grid[0, 0, :, 2])
    spacing = []
    for key, axis in zip(("dx", "dy", "dz"), coords):
        if key in meta:
            try:
                spacing.append(float(meta[key]))
            except ValueError:
                raise DomainError(f"malformed {key} in '#' header: {meta[key]!r}") from None
        elif axis.size >= 2:
            spacing.append(float(axis[1] - axis[0]))
        else:
            raise DomainError(f"cannot infer {key} from a single grid point")
    origin = tuple(float(a[0]) for a in coords)
    return ModeFunctionSamples(grid[..., 3:6], grid[..., 6:9], tuple(spacing), origin)


def save_mode_samples(samples: ModeFunctionSamples, path) -> None:
    nx, ny, nz = samples.shape
    dx, dy, dz = samples.spacing
    X, Y, Z = np.meshgrid(*samples.coordinates(), indexing="ij")
    table = np.column_stack(
        [X.ravel(), Y.ravel(), Z.ravel(), samples.K.reshape(-1, 3), samples.curl_K.reshape(-1, 3)]
    )
    with open(path, "w") as fh:
        fh.write(f"# nx={nx} ny={ny} nz={nz}\n")
        fh.write(f"# dx={dx!r} dy={dy!r} dz={dz!r}\n")
        fh.write(",".join(_COLUMNS) + "\n")
        for row in table:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
