import json
import math
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from casimir_stability import __version__
from casimir_stability.cli import COMMANDS, RunConfig, main, run
from casimir_stability.units import SI, save_mode_samples, sinusoidal_test_mode

GOLDEN = Path(__file__).parent / "golden"

# one artifact per command; regenerate with `pytest --regen-golden`
GOLDEN_CASES = {
    "mode": (["mode", "--test-mode-n", "8", "--length", "2.0"], "json"),
    "response": (["response", "--omega-inf", "2.0", "--gamma0", "0.2", "--tau-c", "1.0"], "json"),
    "free-energy": (["free-energy", "--omega-inf", "1.0", "--gamma0", "0.3", "--tau-c", "0.5",
                     "--t-min", "0.1", "--t-max", "2.0", "--n-t", "5"], "csv"),
    "scatter": (["scatter", "--omega0", "1.0", "--shape", "gaussian", "--amplitude", "0.8",
                 "--width", "0.5"], "json"),
    "stability-chart": (["stability-chart", "--n-alpha", "4", "--n-ot", "6"], "csv"),
    "heat": (["heat", "--reflection", "0.3", "--omega0", "1.0", "--t-initial", "1.0"], "json"),
    "enhancement": (["enhancement", "--t-star", "100", "--n", "11"], "csv"),
    "saturate": (["saturate", "--gamma", "0.05", "--omega0", "1.0", "--t-eta", "2.0",
                  "--chi0", "0.01", "--tau-dagger", "0.02"], "json"),
    "example-braggio": (["example-braggio"], "json"),
}


def _invoke(args, **kw):
    return CliRunner().invoke(main, args, catch_exceptions=False, **kw)


def test_every_command_has_a_golden_case():
    assert set(GOLDEN_CASES) == set(COMMANDS)


@pytest.mark.parametrize("command", sorted(GOLDEN_CASES))
def test_golden_artifacts(command, tmp_path, regen_golden):
    args, ext = GOLDEN_CASES[command]
    out = tmp_path / f"artifact.{ext}"
    result = _invoke(args + ["-o", str(out)])
    assert result.exit_code == 0, result.output
    golden = GOLDEN / f"{command}.{ext}"
    if regen_golden:
        GOLDEN.mkdir(exist_ok=True)
        golden.write_bytes(out.read_bytes())
    assert out.read_bytes() == golden.read_bytes()


@pytest.mark.parametrize("command", ["free-energy", "stability-chart", "saturate"])
def test_repeated_runs_are_byte_identical(command, tmp_path):
    args, ext = GOLDEN_CASES[command]
    a, b = tmp_path / f"a.{ext}", tmp_path / f"b.{ext}"
    _invoke(args + ["-o", str(a)])
    _invoke(args + ["-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_example_braggio_default():
    result = _invoke(["example-braggio"])
    assert result.exit_code == 0
    body = json.loads(result.stdout)
    assert body == {"n_saturate": 100000.0}


def test_scatter_zero_pulse():
    result = _invoke(["scatter", "--omega0", "1.0", "--shape", "rectangular", "--alpha", "0"])
    assert result.exit_code == 0
    body = json.loads(result.stdout)
    assert body["R"] == 0.0
    assert set(body) == {"rho_re", "rho_im", "sigma_re", "sigma_im", "R", "P", "Theta", "unitarity_defect"}


def test_free_energy_unstable_exit_code():
    result = _invoke(["free-energy", "--omega-inf", "1.0", "--gamma0", "2.0", "--tau-c", "1.0",
                      "--t-min", "0.5", "--format", "json"])
    assert result.exit_code == 4
    body = json.loads(result.stdout)
    assert body["verdict"] == "unstable"
    assert body["is_stable"] is False
    assert body["omega0"] == pytest.approx(1.0)


def test_response_unstable_exit_code():
    result = _invoke(["response", "--omega-inf", "1.0", "--gamma0", "3.0"])
    assert result.exit_code == 4
    assert json.loads(result.stdout)["verdict"] == "unstable"


def test_saturate_zero_nonlinearity_exit_code():
    result = _invoke(["saturate", "--gamma", "0.1", "--omega0", "1.0", "--t-eta", "1.0", "--s-bar", "0"])
    assert result.exit_code == 4
    assert json.loads(result.stdout)["outcome"] == "zero_nonlinearity"


@pytest.mark.parametrize("args", [
    ["heat", "--reflection", "1.5", "--omega0", "1.0"],
    ["heat", "--reflection", "0.5"],
    ["scatter", "--omega0", "-1.0"],
    ["scatter", "--omega0", "1.0", "--shape", "gaussian", "--amplitude", "-2.0"],
    ["free-energy", "--omega-inf", "1.0", "--gamma0", "0.1", "--t-min", "0"],
    ["free-energy", "--omega-inf", "1.0", "--t-min", "1"],
    ["stability-chart", "--n-alpha", "1"],
    ["enhancement", "--t-star", "0"],
    ["saturate", "--gamma", "0.1", "--omega0", "1.0", "--t-eta", "1.0"],
    ["mode"],
    ["example-braggio", "--gamma-over-omega", "0"],
])
def test_validation_errors_exit_2(args):
    result = CliRunner().invoke(main, args)
    assert result.exit_code == 2, result.output


def test_numerical_failure_exit_3(monkeypatch):
    from casimir_stability import cli
    from casimir_stability.errors import IntegratorFailure

    def boom(*a, **k):
        raise IntegratorFailure("step size underflow")

    monkeypatch.setattr(cli, "scatter_pulse", boom)
    result = CliRunner().invoke(main, ["scatter", "--omega0", "1.0", "--alpha", "0.2"])
    assert result.exit_code == 3


def test_csv_provenance_header():
    result = _invoke(["enhancement", "--t-star", "50", "--n", "3"])
    lines = result.stdout.splitlines()
    assert lines[0] == "# command=enhancement"
    assert lines[1].startswith("# parameters: ")
    assert "t_star=50.0" in lines[1]
    assert lines[2] == f"# version={__version__}"
    assert lines[3] == "kTi_over_E,T_ratio_approx,T_ratio_exact"
    assert len(lines) == 7


def test_floats_round_trip():
    result = _invoke(["enhancement", "--t-star", "7", "--n", "5"])
    rows = [l.split(",") for l in result.stdout.splitlines()[4:]]
    from casimir_stability.photon_stats import enhancement_curve

    table = enhancement_curve(1.0, 7.0, (0.0, 5.0), 5)
    assert [[float(v) for v in r] for r in rows] == table.tolist()


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# heating run\nreflection = 0.3\nomega0=1.0\nt-initial = 1.0\n")
    args, _ = GOLDEN_CASES["heat"]
    direct = _invoke(args).stdout
    via_config = _invoke(["heat", "--config", str(cfg)]).stdout
    assert via_config == direct
    # flags override the file
    override = json.loads(_invoke(["heat", "--config", str(cfg), "--t-initial", "0"]).stdout)
    assert override["T_i"] == 0.0


def test_config_file_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("reflection=0.3\nomega0=1\nbogus=4\n")
    assert CliRunner().invoke(main, ["heat", "--config", str(cfg)]).exit_code == 2
    cfg.write_text("reflection 0.3\n")
    assert CliRunner().invoke(main, ["heat", "--config", str(cfg)]).exit_code == 2


def test_run_config(tmp_path, capsys):
    out = tmp_path / "b.json"
    code = run(RunConfig("example-braggio", {"gamma_over_omega": 0.05}, output_path=str(out)))
    assert code == 0
    assert json.loads(out.read_text()) == {"n_saturate": 100000.0}
    assert run(RunConfig("heat", {"reflection": 1.5, "omega0": 1.0})) == 2
    unstable = RunConfig("free-energy", {"omega_inf": 1.0, "gamma0": 2.0, "t_min": 0.5}, format="json")
    assert run(unstable) == 4
    assert run(RunConfig("nonsense")) == 2
    assert RunConfig("saturate", {"use_net_gain": True, "q": 10.0}).argv() == [
        "saturate", "--units", "natural", "--use-net-gain", "--q", "10.0"]


def test_saturate_gain_choice_and_trajectory(tmp_path):
    traj = tmp_path / "traj.csv"
    base = ["saturate", "--gamma", "0.05", "--omega0", "1.0", "--t-eta", "2.0", "--s-bar", "1e-6"]
    literal = json.loads(_invoke(base).stdout)
    net = json.loads(_invoke(base + ["--use-net-gain", "--q", "100", "--trajectory", str(traj)]).stdout)
    assert net["gamma"] == pytest.approx(0.5 * (2 * 0.05 - 0.01))
    assert literal["gamma"] == 0.05
    assert net["n_sat_ms11"] < literal["n_sat_ms11"]
    lines = traj.read_text().splitlines()
    assert lines[3] == "t,n"
    assert len(lines) == 4 + 101
    assert CliRunner().invoke(main, base + ["--use-net-gain"]).exit_code == 2


def test_mode_from_samples_file(tmp_path):
    path = tmp_path / "mode.csv"
    save_mode_samples(sinusoidal_test_mode(6, 1.0), path)
    body = json.loads(_invoke(["mode", "--samples", str(path)]).stdout)
    assert body["bare_frequency"] == pytest.approx(math.pi, rel=1e-3)


def test_response_from_table(tmp_path):
    path = tmp_path / "gamma.csv"
    w = np.linspace(0, 20, 201)
    lines = ["# p=2", "omega,re_gamma"] + [f"{a!r},{b!r}" for a, b in zip(w.tolist(), (0.2 / (1 + w**2)).tolist())]
    path.write_text("\n".join(lines) + "\n")
    body = json.loads(_invoke(["response", "--omega-inf", "2.0", "--table", str(path)]).stdout)
    assert body["pi_at_zero"] == pytest.approx(0.2, rel=1e-2)
    assert CliRunner().invoke(main, ["response", "--omega-inf", "2", "--table", str(path),
                                     "--gamma0", "1"]).exit_code == 2


def test_scatter_tabulated_pulse(tmp_path):
    path = tmp_path / "pulse.csv"
    t = np.linspace(0, 3, 31)
    nu2 = 0.5 * np.sin(np.pi * t / 3) ** 2
    path.write_text("t,nu2\n" + "".join(f"{a!r},{b!r}\n" for a, b in zip(t.tolist(), nu2.tolist())))
    result = _invoke(["scatter", "--omega0", "1.0", "--shape", "tabulated", "--table", str(path)])
    body = json.loads(result.stdout)
    assert body["unitarity_defect"] <= 1e-9
    for bad in ("time,value\n0,0\n1,0\n2,0\n3,0\n", "t,nu2\n0,0\n1,x\n2,0\n3,0\n",
                "t,nu2\n0,0\n1,0\n2.5,0\n3,0\n"):
        path.write_text(bad)
        assert CliRunner().invoke(main, ["scatter", "--omega0", "1", "--shape", "tabulated",
                                         "--table", str(path)]).exit_code == 2


def test_stability_chart_columns():
    result = _invoke(["stability-chart", "--n-alpha", "2", "--n-ot", "2"])
    lines = result.stdout.splitlines()
    assert lines[3] == "alpha,omega0_tau,mu,class,rate"
    assert len(lines) == 8
    assert all(l.split(",")[3] in {"stable", "unstable", "marginal", "error"} for l in lines[4:])


def test_si_units():
    omega0 = 2 * math.pi * 5e9
    si = json.loads(_invoke(["heat", "--units", "si", "--reflection", "0.3", "--omega0", repr(omega0),
                             "--t-initial", "0.05"]).stdout)
    x = SI.hbar * omega0 / (SI.k_B * 0.05)
    assert si["N_i"] == pytest.approx(1 / math.expm1(x), rel=1e-12)
    assert si["T_i"] == pytest.approx(0.05, rel=1e-14)
    assert si["T_star"] == pytest.approx(SI.hbar * omega0 / (SI.k_B * -math.log(0.3)), rel=1e-12)
    fe = _invoke(["free-energy", "--units", "si", "--omega-inf", repr(omega0), "--gamma0", "0",
                  "--t-min", "0.01"]).stdout.splitlines()[-1].split(",")
    expected = 0.5 * SI.hbar * omega0 + SI.k_B * 0.01 * math.log1p(-math.exp(-SI.hbar * omega0 / (SI.k_B * 0.01)))
    assert float(fe[1]) == pytest.approx(expected, rel=1e-12)


def test_summary_goes_to_stdout_when_writing_a_file(tmp_path):
    out = tmp_path / "x.json"
    result = _invoke(["example-braggio", "-o", str(out)])
    assert result.stdout.strip() == "n_saturate = 100000.0"


def test_version_option():
    assert __version__ in _invoke(["--version"]).stdout
