"""Command-line front end.

Every subcommand writes one artifact (CSV or a flat JSON object) to ``-o`` or
to standard output.  Exit codes: 0 success, 2 invalid input, 3 numerical
failure, 4 physically unstable outcome.
"""

from __future__ import annotations

import functools
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import DomainError, NumericalFailure, UnstableStatic, ZeroNonlinearity
from .floquet import (
    GaussianPulse,
    RectangularPulse,
    TabulatedPulse,
    net_production_rate,
    scatter_pulse,
    stability_chart,
)
from .photon_stats import enhancement_curve, heat_cavity
from .response import Drude, load_damping_table, renormalize
from .saturation import (
    DebyePump,
    DirectPump,
    braggio_estimate,
    evolve_occupation,
    saturation_report,
)
from .thermo import casimir_shift, stability_verdict
from .units import CavityMode, from_natural, load_mode_samples, mode_constants, sinusoidal_test_mode, to_natural

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_UNSTABLE = 0, 2, 3, 4

COMMANDS = (
    "mode", "response", "free-energy", "scatter", "stability-chart",
    "heat", "enhancement", "saturate", "example-braggio",
)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _to_json(obj: dict) -> str:
    return json.dumps({k: _json_value(v) for k, v in obj.items()}) + "\n"


def _to_csv(ctx: click.Context, header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"# command={ctx.info_name}\n")
    params = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(ctx.params.items())
                      if k not in ("output", "config") and v is not None)
    buf.write(f"# parameters: {params}\n")
    buf.write(f"# version={__version__}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(ctx: click.Context, text: str, summary: str) -> None:
    output = ctx.params.get("output")
    if output:
        Path(output).write_text(text)
        click.echo(summary)
    else:
        click.echo(text, nl=False)
        click.echo(summary, err=True)


def _read_config(ctx, param, value):
    if value is None:
        return None
    known = {p.name for p in ctx.command.params}
    entries = {}
    for lineno, line in enumerate(Path(value).read_text().splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise click.BadParameter(f"line {lineno}: expected key=value, got {s!r}", ctx, param)
        key, val = (p.strip() for p in s.split("=", 1))
        key = key.replace("-", "_")
        if key not in known or key == "config":
            raise click.BadParameter(f"line {lineno}: unknown parameter {key!r}", ctx, param)
        entries[key] = val
    ctx.default_map = {**(ctx.default_map or {}), **entries}
    return value


def _common(func):
    """Options shared by every subcommand, plus error-to-exit-code mapping."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except DomainError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_INVALID)
        except NumericalFailure as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            ctx.exit(EXIT_NUMERICAL)

    wrapper = click.option("-o", "--output", type=click.Path(dir_okay=False),
                           help="Artifact path (default: standard output).")(wrapper)
    wrapper = click.option("--units", type=click.Choice(["natural", "si"]), default="natural",
                           show_default=True,
                           help="natural: hbar=k_B=c=1; si: temperatures in K, energies in J, "
                                "frequencies in rad/s.")(wrapper)
    wrapper = click.option("--config", type=click.Path(exists=True, dir_okay=False),
                           is_eager=True, expose_value=False, callback=_read_config,
                           help="key=value file supplying option defaults.")(wrapper)
    return wrapper


def _temperature_in(value, units):
    return to_natural(value, "temperature") if units == "si" else value


def _temperature_out(value, units):
    return from_natural(value, "temperature") if units == "si" else value


def _energy_out(value, units):
    return from_natural(value, "energy") if units == "si" else value


def _damping_model(gamma0, tau_c, table):
    if table is not None:
        if gamma0 is not None:
            raise click.UsageError("give either --table or --gamma0/--tau-c, not both")
        return load_damping_table(table)
    if gamma0 is None:
        raise click.UsageError("a damping model is required: --gamma0 (and --tau-c) or --table")
    return Drude(gamma0, tau_c)


def _damping_options(func):
    func = click.option("--table", type=click.Path(exists=True, dir_okay=False),
                        help="Tabulated Re Gamma CSV (omega,re_gamma with '# p=').")(func)
    func = click.option("--tau-c", type=float, default=1.0, show_default=True,
                        help="Drude relaxation time.")(func)
    func = click.option("--gamma0", type=float, help="Drude damping strength.")(func)
    return func


@click.group()
@click.version_option(__version__)
def main():
    """Casimir-effect stability analysis of a damped cavity mode."""


@main.command("mode")
@click.option("--samples", type=click.Path(exists=True, dir_okay=False),
              help="Mode-function CSV (x,y,z,Kx,Ky,Kz,cKx,cKy,cKz).")
@click.option("--test-mode-n", type=click.IntRange(min=2),
              help="Use the built-in sinusoidal cube mode at this resolution.")
@click.option("--length", type=float, default=1.0, show_default=True,
              help="Cube side for the built-in mode.")
@_common
def mode_cmd(samples, test_mode_n, length, units, output):
    """Capacitance, inductance and bare frequency of a sampled mode."""
    if (samples is None) == (test_mode_n is None):
        raise click.UsageError("give exactly one of --samples or --test-mode-n")
    if samples is not None:
        data = load_mode_samples(samples)
    else:
        if not length > 0:
            raise click.BadParameter("must be > 0", param_hint="--length")
        data = sinusoidal_test_mode(test_mode_n, length)
    mode = mode_constants(data)
    out = {
        "capacitance": mode.capacitance,
        "inverse_inductance": mode.inverse_inductance,
        "bare_frequency": mode.bare_frequency,
    }
    _emit(click.get_current_context(), _to_json(out), f"bare_frequency = {mode.bare_frequency!r}")


@main.command("response")
@click.option("--omega-inf", type=float, required=True, help="Bare mode frequency.")
@click.option("--capacitance", type=float, default=1.0, show_default=True)
@_damping_options
@_common
def response_cmd(omega_inf, capacitance, gamma0, tau_c, table, units, output):
    """Shifted frequency, sum-rule residual and quality factor."""
    ctx = click.get_current_context()
    mode = CavityMode.from_frequency(omega_inf, capacitance)
    model = _damping_model(gamma0, tau_c, table)
    try:
        ren = renormalize(mode, model)
    except UnstableStatic:
        verdict = stability_verdict(mode, model)
        out = {"verdict": verdict.kind.value, "omega0": verdict.omega0}
        _emit(ctx, _to_json(out), f"statically unstable: omega0 = {verdict.omega0!r}")
        ctx.exit(EXIT_UNSTABLE)
    out = {
        "shifted_frequency": ren.shifted_frequency,
        "pi_at_zero": ren.pi_at_zero,
        "quality_factor": ren.quality_factor,
        "q_unbounded": ren.q_unbounded,
        "weak_damping": ren.weak_damping,
        "sum_rule_residual": ren.sum_rule_residual,
    }
    _emit(ctx, _to_json(out), f"Omega0 = {ren.shifted_frequency!r}, Q = {ren.quality_factor!r}")


@main.command("free-energy")
@click.option("--omega-inf", type=float, required=True, help="Bare mode frequency.")
@_damping_options
@click.option("--t-min", type=float, required=True, help="Lowest temperature.")
@click.option("--t-max", type=float, help="Highest temperature (default: --t-min).")
@click.option("--n-t", type=click.IntRange(min=1), default=1, show_default=True,
              help="Number of temperatures.")
@click.option("--rel-tol", type=float, default=1e-8, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@_common
def free_energy_cmd(omega_inf, gamma0, tau_c, table, t_min, t_max, n_t, rel_tol, fmt, units, output):
    """Bare and Casimir-shifted free energies over a temperature range."""
    ctx = click.get_current_context()
    t_max = t_min if t_max is None else t_max
    if not 0 < t_min <= t_max:
        raise click.BadParameter("need 0 < t-min <= t-max", param_hint="--t-min/--t-max")
    if fmt == "json" and n_t != 1:
        raise click.UsageError("--format json describes a single temperature; use --n-t 1")
    if not 0 < rel_tol < 1:
        raise click.BadParameter("must be in (0, 1)", param_hint="--rel-tol")
    mode = CavityMode.from_frequency(omega_inf)
    model = _damping_model(gamma0, tau_c, table)
    verdict = stability_verdict(mode, model)
    temps = np.linspace(t_min, t_max, n_t)
    rows = []
    for T in temps:
        res = casimir_shift(mode, model, _temperature_in(float(T), units), rel_tol)
        rows.append((float(T), _energy_out(res.f_bare, units), _energy_out(res.f_shift, units),
                     res.is_stable, res.matsubara_terms_used))
    unstable = not all(r[3] for r in rows)
    if fmt == "json":
        T, fb, fs, st, nt = rows[0]
        out = {"T": T, "f_bare": fb, "f_shift": fs, "is_stable": st, "terms_used": nt,
               "verdict": verdict.kind.value, "omega0": verdict.omega0}
        text = _to_json(out)
    else:
        text = _to_csv(ctx, ["T", "f_bare", "f_shift", "is_stable", "terms_used"], rows)
    _emit(ctx, text, f"{len(rows)} temperatures, verdict {verdict.kind.value}")
    if unstable:
        ctx.exit(EXIT_UNSTABLE)


def _load_pulse_table(path):
    lines = [l for l in Path(path).read_text().splitlines() if l.strip() and not l.lstrip().startswith("#")]
    if not lines or [h.strip() for h in lines[0].split(",")] != ["t", "nu2"]:
        raise DomainError(f"expected pulse CSV header 't,nu2', got {lines[:1]!r}")
    try:
        table = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    except ValueError as exc:
        raise DomainError(f"malformed pulse table: {exc}") from None
    if table.shape[1] != 2:
        raise DomainError("pulse table must have two columns")
    t = table[:, 0]
    dt = np.diff(t)
    if dt.size == 0 or np.any(np.abs(dt - dt[0]) > 1e-9 * abs(dt[0])):
        raise DomainError("pulse samples must lie on a uniform time grid")
    return TabulatedPulse(table[:, 1], float(dt[0]), float(t[0]))


@main.command("scatter")
@click.option("--omega0", type=float, required=True, help="Unmodulated frequency.")
@click.option("--shape", type=click.Choice(["rectangular", "gaussian", "tabulated"]),
              default="rectangular", show_default=True)
@click.option("--alpha", type=float, default=0.0, show_default=True,
              help="Rectangular: fractional frequency step.")
@click.option("--width", type=float, default=1.0, show_default=True,
              help="Rectangular duration or Gaussian width.")
@click.option("--start", type=float, default=0.0, show_default=True,
              help="Rectangular start time or Gaussian centre.")
@click.option("--amplitude", type=float, default=0.0, show_default=True,
              help="Gaussian peak of nu^2.")
@click.option("--table", type=click.Path(exists=True, dir_okay=False),
              help="Tabulated pulse CSV with header t,nu2.")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@_common
def scatter_cmd(omega0, shape, alpha, width, start, amplitude, table, tol, units, output):
    """Pair-creation amplitudes of a single pulse."""
    if shape == "rectangular":
        pulse = RectangularPulse(alpha, width, start)
    elif shape == "gaussian":
        pulse = GaussianPulse(amplitude, width, start)
    else:
        if table is None:
            raise click.UsageError("--shape tabulated needs --table")
        pulse = _load_pulse_table(table)
    if not 0 < tol < 1:
        raise click.BadParameter("must be in (0, 1)", param_hint="--tol")
    pulse.check_positive(omega0)
    res = scatter_pulse(omega0, pulse, tol)
    _emit(click.get_current_context(), _to_json(res.as_dict()), f"R = {res.R!r}")


@main.command("stability-chart")
@click.option("--omega0", type=float, default=1.0, show_default=True)
@click.option("--alpha-min", type=float, default=0.0, show_default=True)
@click.option("--alpha-max", type=float, default=0.3, show_default=True)
@click.option("--n-alpha", type=click.IntRange(min=2), default=50, show_default=True)
@click.option("--ot-min", type=float, default=1.0, show_default=True, help="Lowest Omega0*tau.")
@click.option("--ot-max", type=float, default=7.0, show_default=True, help="Highest Omega0*tau.")
@click.option("--n-ot", type=click.IntRange(min=2), default=50, show_default=True)
@click.option("--duty", type=float, default=0.5, show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
@_common
def stability_chart_cmd(omega0, alpha_min, alpha_max, n_alpha, ot_min, ot_max, n_ot, duty, tol,
                        units, output):
    """Floquet classification of the rectangular pulse train on a grid."""
    if not omega0 > 0:
        raise click.BadParameter("must be > 0", param_hint="--omega0")
    if not 0 < duty <= 1:
        raise click.BadParameter("must be in (0, 1]", param_hint="--duty")
    if not (alpha_min > -1 and ot_min > 0):
        raise click.BadParameter("need alpha > -1 and Omega0*tau > 0")
    cells = stability_chart(omega0, (alpha_min, alpha_max), (ot_min, ot_max), (n_alpha, n_ot), duty, tol)
    ctx = click.get_current_context()
    rows = [(c.alpha, c.omega0_tau, c.mu, c.kind, c.rate) for c in cells]
    n_unstable = sum(c.kind == "unstable" for c in cells)
    _emit(ctx, _to_csv(ctx, ["alpha", "omega0_tau", "mu", "class", "rate"], rows),
          f"{len(cells)} cells, {n_unstable} unstable")


@main.command("heat")
@click.option("--reflection", type=float, required=True, help="Pair-creation probability R.")
@click.option("--omega0", type=float, required=True)
@click.option("--t-initial", type=float, default=0.0, show_default=True)
@_common
def heat_cmd(reflection, omega0, t_initial, units, output):
    """Occupations and temperatures after pulsing a thermal mode."""
    res = heat_cavity(reflection, omega0, _temperature_in(t_initial, units))
    out = res.as_dict()
    for key in ("T_star", "T_i", "T_f", "T_f_approx"):
        out[key] = _temperature_out(out[key], units)
    _emit(click.get_current_context(), _to_json(out), f"T_f = {out['T_f']!r}")


@main.command("enhancement")
@click.option("--omega0", type=float, default=1.0, show_default=True)
@click.option("--t-star", type=float, required=True, help="Pair-creation noise temperature.")
@click.option("--kti-min", type=float, default=0.0, show_default=True)
@click.option("--kti-max", type=float, default=5.0, show_default=True)
@click.option("--n", "n_points", type=click.IntRange(min=2), default=101, show_default=True)
@_common
def enhancement_cmd(omega0, t_star, kti_min, kti_max, n_points, units, output):
    """Final-to-noise temperature ratio versus initial temperature."""
    if not omega0 > 0:
        raise click.BadParameter("must be > 0", param_hint="--omega0")
    ctx = click.get_current_context()
    table = enhancement_curve(omega0, _temperature_in(t_star, units), (kti_min, kti_max), n_points)
    _emit(ctx, _to_csv(ctx, ["kTi_over_E", "T_ratio_approx", "T_ratio_exact"], table.tolist()),
          f"{len(table)} points")


@main.command("saturate")
@click.option("--gamma", type=float, required=True, help="Linear parametric gain.")
@click.option("--omega0", type=float, required=True)
@click.option("--t-eta", type=float, required=True, help="Pump noise temperature.")
@click.option("--s-bar", type=float, help="Pump spectral density at 2*Omega0.")
@click.option("--chi0", type=float, help="Debye pump: static response.")
@click.option("--tau-dagger", type=float, help="Debye pump: relaxation time.")
@click.option("--q", "quality", type=float, help="Cavity quality factor (for --use-net-gain).")
@click.option("--use-net-gain/--literal-gain", default=False, show_default=True,
              help="Replace gamma by gamma - Omega0/(2Q).")
@click.option("--trajectory", type=click.Path(dir_okay=False), help="Also write a t,n CSV.")
@click.option("--n0", type=float, default=1.0, show_default=True)
@click.option("--t-max", type=float, help="Trajectory end time (default 10/gamma).")
@click.option("--n-points", type=click.IntRange(min=2), default=101, show_default=True)
@_common
def saturate_cmd(gamma, omega0, t_eta, s_bar, chi0, tau_dagger, quality, use_net_gain,
                 trajectory, n0, t_max, n_points, units, output):
    """Saturated photon number under pump-noise two-photon absorption."""
    ctx = click.get_current_context()
    t_eta = _temperature_in(t_eta, units)
    if s_bar is not None:
        if chi0 is not None or tau_dagger is not None:
            raise click.UsageError("give either --s-bar or --chi0/--tau-dagger")
        pump = DirectPump(s_bar, t_eta)
    elif chi0 is not None and tau_dagger is not None:
        pump = DebyePump(chi0, tau_dagger, t_eta)
    else:
        raise click.UsageError("a pump model is required: --s-bar or --chi0 with --tau-dagger")
    gain = gamma
    if use_net_gain:
        if quality is None:
            raise click.UsageError("--use-net-gain needs --q")
        gain = 0.5 * net_production_rate(gamma, omega0, quality)
    if not gain > 0:
        raise click.BadParameter(f"effective gain must be > 0, got {gain!r}", param_hint="--gamma")
    try:
        report = saturation_report(gain, omega0, pump)
    except ZeroNonlinearity:
        _emit(ctx, _to_json({"outcome": "zero_nonlinearity", "gamma": gain}),
              "no saturation: gamma_tilde = 0")
        ctx.exit(EXIT_UNSTABLE)
    out = {"outcome": "saturates", **report.as_dict()}
    _emit(ctx, _to_json(out), f"n_saturate = {report.n_sat_ms11!r}")
    if trajectory:
        t_end = 10.0 / gain if t_max is None else t_max
        t = np.linspace(0.0, t_end, n_points)
        n = evolve_occupation(n0, gain, report.gamma_tilde, t)
        traj = _to_csv(ctx, ["t", "n"], zip(t.tolist(), n.tolist()))
        Path(trajectory).write_text(traj)


@main.command("example-braggio")
@click.option("--gamma-over-omega", type=float, default=0.05, show_default=True)
@click.option("--inv-omega-tau-r", type=float, default=10.0, show_default=True)
@click.option("--omegal-over-omega", type=float, default=2e5, show_default=True)
@_common
def example_braggio_cmd(gamma_over_omega, inv_omega_tau_r, omegal_over_omega, units, output):
    """Order-of-magnitude saturated photon number for a laser-pumped plate."""
    n = braggio_estimate(gamma_over_omega, inv_omega_tau_r, omegal_over_omega)
    _emit(click.get_current_context(), _to_json({"n_saturate": n}), f"n_saturate = {n!r}")


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str | None = None
    units: str = "natural"

    def argv(self) -> list[str]:
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        args = [self.command, "--units", self.units]
        if self.output_path:
            args += ["-o", str(self.output_path)]
        if self.format:
            args += ["--format", self.format]
        for key, value in self.parameters.items():
            flag = "--" + key.replace("_", "-")
            if value is True:
                args.append(flag)
            elif value is False or value is None:
                continue
            else:
                args += [flag, _fmt(value)]
        return args


def run(config: RunConfig) -> int:
    """Execute one configured command and return its exit code."""
    try:
        # without standalone mode click returns the ctx.exit code instead of raising it
        rv = main.main(config.argv(), prog_name="casimir-stability", standalone_mode=False)
        if isinstance(rv, int):
            return rv
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except DomainError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
