"""End-to-end command-line checks: every subcommand through main(argv)."""

import json
import math
import warnings

import numpy as np
import pytest

from gpdisc import (
    FixedRegime,
    load_field,
    make_field,
    make_grid,
    normalize,
    save_field,
    tf_solve,
)
from gpdisc.cli import main


def run_cli(capsys, argv):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def saved_constant_field(path, n_r=32, n_theta=64):
    grid = make_grid(n_r, n_theta)
    fld = normalize(make_field(grid, np.ones((n_r, n_theta))))
    save_field(fld, path)
    return fld


# ---------------------------------------------------------------------- tf


def test_tf_fixed_json(capsys):
    code, out, _ = run_cli(capsys, ["tf", "--regime", "fixed", "--omega", "4.0"])
    assert code == 0
    rec = json.loads(out)
    sol = tf_solve(FixedRegime(4.0))
    assert rec["energy"] == sol.energy
    assert rec["hole_radius"] == sol.hole_radius
    assert abs(rec["normalization"] - 1.0) < 1e-8
    assert abs(rec["energy_quadrature"] - rec["energy"]) < 1e-9


def test_tf_fast_json_and_density_csv(capsys, tmp_path):
    dens = tmp_path / "rho.csv"
    code, out, _ = run_cli(capsys, [
        "tf", "--regime", "fast", "--omega", "1.0", "--alpha", "1.0",
        "--eps", "0.05", "--emit-density", str(dens), "--samples", "40",
    ])
    assert code == 0
    rec = json.loads(out)
    assert rec["hole_radius"] is None
    assert 0.0 < rec["boundary_radius"] < 1.0
    lines = dens.read_text().splitlines()
    assert lines[0] == "r,density"
    assert len(lines) == 41
    assert float(lines[1].split(",")[1]) == 0.0  # origin sits outside the annulus


def test_tf_fast_requires_alpha_and_eps(capsys):
    code, _, err = run_cli(capsys, ["tf", "--regime", "fast", "--omega", "1.0"])
    assert code == 2
    assert "alpha" in err


# ------------------------------------------------------------------- field


def test_field_energy_of_saved_field(capsys, tmp_path):
    path = tmp_path / "flat.fld"
    saved_constant_field(path)
    code, out, _ = run_cli(capsys, [
        "field", "energy", "--in", str(path), "--omega", "2.0", "--eps", "0.1",
    ])
    assert code == 0
    rec = json.loads(out)
    assert rec["form_agreement"] < 1e-10
    assert abs(rec["norm"] - 1.0) < 1e-12
    assert abs(rec["angular"]["total"] - 100.0 / math.pi) < 1e-9
    assert abs(rec["angular_momentum"]) < 1e-12


def test_field_energy_single_form(capsys, tmp_path):
    path = tmp_path / "flat.fld"
    saved_constant_field(path)
    code, out, _ = run_cli(capsys, [
        "field", "energy", "--in", str(path), "--omega", "0.0", "--eps", "0.1",
        "--form", "angular",
    ])
    assert code == 0
    rec = json.loads(out)
    assert abs(rec["total"] - 100.0 / math.pi) < 1e-9
    assert rec["rotation"] == 0.0


def test_missing_field_file_is_reported(capsys, tmp_path):
    code, _, err = run_cli(capsys, [
        "field", "energy", "--in", str(tmp_path / "nope.fld"),
        "--omega", "1.0", "--eps", "0.1",
    ])
    assert code == 1
    assert err.startswith("error:")


# ------------------------------------------------------------------- trial


def test_trial_energy_lattice(capsys, tmp_path):
    out_path = tmp_path / "trial.json"
    code, out, _ = run_cli(capsys, [
        "trial-energy", "--family", "lattice", "--eps", "0.04", "--omega", "1.0",
        "--delta", "1.25", "--out", str(out_path),
    ])
    assert code == 0
    rec = json.loads(out)
    assert rec["lattice_count"] == 5
    assert rec["c_sq"] > 1.0
    assert rec["residual"] > 0.0
    assert rec["omega_eff"] == 25.0
    assert json.loads(out_path.read_text()) == rec


def test_trial_energy_giant(capsys):
    code, out, _ = run_cli(capsys, [
        "trial-energy", "--family", "giant", "--eps", "0.1", "--omega", "1.0",
        "--alpha", "0.5",
    ])
    assert code == 0
    rec = json.loads(out)
    assert rec["winding"] == 15  # floor(1 / (2 * 0.1^1.5))
    assert rec["c_sq"] > 1.0
    assert rec["residual"] > 0.0


def test_trial_energy_giant_requires_alpha(capsys):
    code, _, err = run_cli(capsys, [
        "trial-energy", "--family", "giant", "--eps", "0.1", "--omega", "1.0",
    ])
    assert code == 2
    assert "alpha" in err


# ---------------------------------------------------------------- minimize


def test_minimize_trial_init_and_save(capsys, tmp_path):
    out_path = tmp_path / "min.json"
    fld_path = tmp_path / "min.fld"
    code, out, _ = run_cli(capsys, [
        "minimize", "--eps", "0.1", "--omega", "2.0", "--nr", "32",
        "--ntheta", "64", "--max-iters", "60", "--out", str(out_path),
        "--save-field", str(fld_path),
    ])
    assert code == 0
    rec = json.loads(out)
    assert rec["energy"] <= 100.0 / math.pi + 1e-9
    assert rec["form_agreement"] < 1e-10
    assert rec["mu"] >= rec["energy"]
    assert isinstance(rec["converged"], bool)
    assert out_path.exists()
    reloaded = load_field(fld_path)
    assert reloaded.grid.n_r == 32


def test_minimize_file_init_grid_check(capsys, tmp_path):
    path = tmp_path / "flat.fld"
    saved_constant_field(path)
    code, out, _ = run_cli(capsys, [
        "minimize", "--eps", "0.1", "--omega", "0.0", "--nr", "32",
        "--ntheta", "64", "--max-iters", "5", "--init", f"file:{path}",
    ])
    assert code == 0
    assert json.loads(out)["init"].startswith("file:")
    code, _, err = run_cli(capsys, [
        "minimize", "--eps", "0.1", "--omega", "0.0", "--nr", "48",
        "--ntheta", "64", "--max-iters", "5", "--init", f"file:{path}",
    ])
    assert code == 2
    assert "grid" in err


def test_minimize_unknown_init(capsys):
    code, _, err = run_cli(capsys, [
        "minimize", "--eps", "0.1", "--omega", "0.0", "--init", "oracle",
    ])
    assert code == 2
    assert "oracle" in err


# ---------------------------------------------------------------- symmetry


def test_symmetry_table(capsys, tmp_path):
    out_path = tmp_path / "branch.json"
    code, out, _ = run_cli(capsys, [
        "symmetry", "--eps", "0.1", "--omega", "1.0", "--nmax", "1",
        "--out", str(out_path),
    ])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,E_n,E_restricted"
    assert len(lines) == 3
    assert lines[1].split(",")[0] == "0"
    assert lines[2].split(",")[0] == "1"
    rec = json.loads(out_path.read_text())
    assert rec["best_n"] == 0  # slow rotation keeps the vortex-free branch
    assert rec["window_warning"] is False


# ------------------------------------------------------------------- sweep


def test_sweep_roundtrip(capsys, tmp_path):
    cfg = tmp_path / "sweep.yaml"
    out_dir = tmp_path / "runs"
    cfg.write_text(
        "regime: fixed\nomega: 4.0\neps_list: [0.1, 0.05]\n"
        f"nr: 48\nntheta: 96\nmode: trial-only\nout_dir: {out_dir}\n"
    )
    code, out, _ = run_cli(capsys, ["sweep", "--config", str(cfg)])
    assert code == 0
    assert "wrote 2 records" in out
    assert (out_dir / "sweep.csv").exists()


def test_sweep_with_failed_run_exits_nonzero(capsys, tmp_path):
    cfg = tmp_path / "sweep.yaml"
    cfg.write_text(
        "regime: fast\nomega: 1.0\nalpha: 1.0\neps_list: [0.04]\n"
        f"nr: 48\nntheta: 128\nmode: trial-only\nout_dir: {tmp_path / 'runs'}\n"
    )
    code, out, _ = run_cli(capsys, ["sweep", "--config", str(cfg)])
    assert code == 1
    assert "error" in out


def test_sweep_bad_config_reports_error(capsys, tmp_path):
    cfg = tmp_path / "sweep.yaml"
    cfg.write_text("regime: warp\nomega: 4.0\neps_list: [0.1]\n")
    code, _, err = run_cli(capsys, ["sweep", "--config", str(cfg)])
    assert code == 1
    assert err.startswith("error:")


# ----------------------------------------------------------------- parser


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    out, _ = capsys.readouterr()
    assert out.startswith("gpdisc ")
