"""Static and dynamic Casimir-effect stability analysis of a damped cavity mode."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CasimirError,
    DomainError,
    NumericalFailure,
    PhysicalInstability,
    UnstableStatic,
    ZeroNonlinearity,
)
from .units import NATURAL, SI, CavityMode, UnitSystem, mode_constants  # noqa: E402
from .response import Drude, Tabulated, propagator, renormalize, self_energy  # noqa: E402
from .thermo import casimir_shift, free_energy_bare, stability_verdict  # noqa: E402
from .floquet import PulseTrain, monodromy, scatter_pulse  # noqa: E402
from .photon_stats import heat_cavity, noise_temperature  # noqa: E402
from .saturation import braggio_estimate, saturation_report  # noqa: E402

__all__ = [
    "__version__",
    "CasimirError",
    "DomainError",
    "NumericalFailure",
    "PhysicalInstability",
    "UnstableStatic",
    "ZeroNonlinearity",
    "NATURAL",
    "SI",
    "CavityMode",
    "UnitSystem",
    "mode_constants",
    "Drude",
    "Tabulated",
    "propagator",
    "renormalize",
    "self_energy",
    "casimir_shift",
    "free_energy_bare",
    "stability_verdict",
    "PulseTrain",
    "monodromy",
    "scatter_pulse",
    "heat_cavity",
    "noise_temperature",
    "braggio_estimate",
    "saturation_report",
]
