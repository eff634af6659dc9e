import json
import math
from pathlib import Path

import numpy as np
import pytest

from ringcav import cli
from ringcav.io import format_float, read_csv, write_csv, write_json

CONFIGS = Path(cli.__file__).parent / "configs"


def test_csv_round_trip(tmp_path):
    cols = {"t": np.array([0.0, 0.1, 1 / 3]), "y": np.array([math.pi, float("nan"), -1e-300])}
    write_csv(tmp_path / "a.csv", cols, {"seed": 3, "params": {"u0": 0.1}})
    header, back = read_csv(tmp_path / "a.csv")
    assert header == {"seed": 3, "params": {"u0": 0.1}}
    assert np.array_equal(back["t"], cols["t"])
    assert back["y"][0] == math.pi and math.isnan(back["y"][1])


def test_format_float():
    assert format_float(0.1) == "0.1"
    assert float(format_float(1 / 3)) == 1 / 3
    assert format_float(float("-inf")) == "-inf"


def test_json_handles_numpy(tmp_path):
    write_json(tmp_path / "a.json", {"a": np.arange(3), "b": np.float64(0.5), "c": float("nan")})
    assert json.loads((tmp_path / "a.json").read_text()) == {"a": [0, 1, 2], "b": 0.5, "c": "nan"}


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


LINEAR = {"schema_version": 1, "tier": "linear",
          "params": {"omega_m": 6.0, "delta": -6.0, "u0": 0.01, "omega_rec": 0.01}}


def test_linear_tier(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["--config", write_cfg(tmp_path, LINEAR), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n_at"] == pytest.approx(1 / 144, rel=1e-14)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["params"]["omega_m"] == 6.0
    assert manifest["config"]["output"] == str(out)
    assert (out / "linear.csv").exists()


def test_unknown_key_is_config_error(tmp_path):
    bad = {**LINEAR, "params": {**LINEAR["params"], "mass": 77}}
    out = tmp_path / "out"
    assert cli.main(["--config", write_cfg(tmp_path, bad), "--out", str(out)]) == cli.EXIT_CONFIG
    assert sorted(p.name for p in out.iterdir()) == ["summary.json"]
    report = json.loads((out / "summary.json").read_text())
    assert report["status"] == "error" and "mass" in report["message"]


@pytest.mark.parametrize("cfg", [
    {"tier": "linear", "params": {"eta": 1.0}},
    {**LINEAR, "tier": "plot"},
    {**LINEAR, "params": {"eta": 1.0, "omega_m": 2.0, "delta": -1.0}},
    {**LINEAR, "params": {"omega_rec": -1.0, "eta": 1.0}},
    {**LINEAR, "tier": "sweep"},
])
def test_config_errors(tmp_path, cfg):
    assert cli.main(["--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")]) == cli.EXIT_CONFIG


def test_unreadable_config(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert cli.main(["--config", str(p), "--out", str(tmp_path / "o")]) == cli.EXIT_CONFIG


def test_numeric_failure_exit(tmp_path):
    cfg = {"schema_version": 1, "tier": "moments",
           "params": {"eta": 10.0, "delta": 1.0, "u0": 0.01, "omega_rec": 0.01}}
    out = tmp_path / "o"
    assert cli.main(["--config", write_cfg(tmp_path, cfg), "--out", str(out)]) == cli.EXIT_NUMERIC
    assert json.loads((out / "summary.json").read_text())["error_type"] == "NoSteadyStateError"


def test_guard_exit(tmp_path):
    cfg = {"schema_version": 1, "tier": "lindblad",
           "params": {"omega_m": 6.0, "delta": -6.0, "u0": 0.01, "omega_rec": 0.25},
           "quantum": {"n_mom": 40, "n_fock_sine": 12, "t_max": 1.0}}
    assert cli.main(["--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")]) == cli.EXIT_GUARD


MCWF = {"schema_version": 1, "tier": "mcwf",
        "params": {"omega_m": 3.0, "delta": -3.0, "u0": 0.3, "omega_rec": 0.25},
        "quantum": {"n_mom": 6, "n_fock_sine": 3, "t_max": 10.0, "n_samples": 11, "n_traj": 12,
                    "initial": {"kind": "momentum", "n": 4}, "jump_statistics": True},
        "seed": 5}


def test_mcwf_byte_identical_across_runs_and_threads(tmp_path):
    path = write_cfg(tmp_path, MCWF)
    outs = []
    for i, threads in enumerate((1, 1, 4)):
        out = tmp_path / f"run{i}"
        assert cli.main(["--config", path, "--out", str(out), "--threads", str(threads)]) == 0
        outs.append(out)
    for name in ("mcwf.csv", "jumps.csv", "trajectory0.csv"):
        data = [(o / name).read_bytes() for o in outs]
        assert data[0] == data[1] == data[2]


def test_seed_and_tier_overrides(tmp_path):
    path = write_cfg(tmp_path, MCWF)
    cli.main(["--config", path, "--out", str(tmp_path / "a"), "--seed", "6"])
    cli.main(["--config", path, "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "mcwf.csv").read_bytes() != (tmp_path / "b" / "mcwf.csv").read_bytes()
    assert cli.main(["--config", path, "--out", str(tmp_path / "c"), "--tier", "lindblad"]) == 0
    assert (tmp_path / "c" / "lindblad.csv").exists()


def test_manifest_regenerates_artifacts(tmp_path):
    out = tmp_path / "a"
    cli.main(["--config", write_cfg(tmp_path, MCWF), "--out", str(out), "--seed", "9"])
    manifest = json.loads((out / "manifest.json").read_text())
    out2 = tmp_path / "b"
    code, _ = cli.run(manifest["config"], out=str(out2))
    assert code == 0
    assert (out / "mcwf.csv").read_bytes() == (out2 / "mcwf.csv").read_bytes()


@pytest.mark.parametrize("name", ["fig2_classical", "fig3_fixed_delta", "fig4_scaling", "linear_optimal"])
def test_shipped_configs_run(tmp_path, name):
    assert cli.main(["--config", str(CONFIGS / f"{name}.json"), "--out", str(tmp_path / name)]) == 0


@pytest.mark.parametrize("name", ["fig5_detuning", "fig6_power", "fig7_jumps"])
def test_shipped_quantum_configs_validate(name):
    raw = cli.load_config(CONFIGS / f"{name}.json")
    cfg = cli.resolve_config(raw)
    cli.params_from_config(cfg["params"])


def test_fig3_minimum_at_sideband(tmp_path):
    out = tmp_path / "f3"
    cli.main(["--config", str(CONFIGS / "fig3_fixed_delta.json"), "--out", str(out)])
    header, cols = read_csv(out / "sweep.csv")
    assert header["provenance"]["n_at_moments"] == "moments"
    for u0 in (0.01, 0.05, 0.1):
        sel = cols["u0"] == u0
        k = np.argmin(cols["n_at_moments"][sel])
        assert cols["omega_m"][sel][k] == pytest.approx(2.0)
