"""Command-line front end.

Usage::

    ringcav --config run.json [--out DIR] [--seed N] [--threads N] [--tier NAME]

Exit codes
----------
0  success
1  unexpected internal error
2  configuration error (unreadable file, schema violation, unknown key)
3  numeric failure (integration failure, no steady state, heating regime, ...)
4  refusal by a truncation or dimension guard

A successful run writes ``manifest.json`` (the fully resolved config),
``summary.json`` and one or more CSV files.  A failed run writes only
``summary.json`` with ``status: "error"``.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
import warnings
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DimensionGuardError,
    RingCavError,
    TruncationError,
)
from .io import SCHEMA_VERSION, write_csv, write_json
from .params import SystemParams, derive_params, optimal_trap_frequency, validity_report

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_GUARD = 4

TIERS = ("classical", "linear", "moments", "mcwf", "lindblad", "sweep")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_int_pos = {"type": "integer", "minimum": 1}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


CONFIG_SCHEMA = _obj({
    "schema_version": {"const": SCHEMA_VERSION},
    "tier": {"enum": list(TIERS)},
    "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
    "threads": _int_pos,
    "output": {"type": "string"},
    "params": _obj({
        "kappa": _pos, "delta": _num, "u0": {"type": "number", "minimum": 0},
        "eta": {"type": "number", "minimum": 0}, "omega_m": _pos, "omega_rec": _pos,
        "optimal_detuning": {"type": "boolean"},
    }),
    "classical": _obj({
        "x0": _num, "p0": _num, "t_max": _pos, "tol": _pos, "n_samples": {"type": "integer", "minimum": 2},
        "geometry": {"enum": ["ring", "standing", "both"]}, "window": {"type": "number", "minimum": 0},
    }),
    "moments": _obj({
        "t_max": _pos, "tol": _pos, "n_samples": {"type": "integer", "minimum": 2},
        "initial_n_at": {"type": "number", "minimum": 0}, "fit_transient": {"type": "number", "minimum": 0},
    }),
    "quantum": _obj({
        "n_mom": {"type": "integer", "minimum": 4}, "n_fock_sine": {"type": "integer", "minimum": 2},
        "n_fock_cos": {"type": ["integer", "null"], "minimum": 2},
        "parity": {"enum": ["even", "odd", None]},
        "treatment": {"enum": ["coherent", "full"]},
        "t_max": _pos, "n_samples": {"type": "integer", "minimum": 2}, "n_traj": _int_pos,
        "max_step": _pos,
        "initial": _obj({
            "kind": {"enum": ["momentum", "trap", "harmonic"]},
            "e_kin": {"type": "number", "minimum": 0}, "n": {"type": "integer"},
            "level": {"type": "integer", "minimum": 0},
        }),
        "jump_statistics": {"type": "boolean"},
        "threshold": _num,
        "average_window": {"type": "number", "minimum": 0},
    }),
    "sweep": _obj({
        "axis": {"enum": ["eta", "delta", "u0", "omega_rec", "kappa", "omega_m"]},
        "values": {"type": "array", "items": _num, "minItems": 1},
        "grid": _obj({"start": _num, "stop": _num, "num": _int_pos, "log": {"type": "boolean"}},
                     required=("start", "stop", "num")),
        "quantities": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "optimal_detuning": {"type": "boolean"},
        "series": _obj({"name": {"enum": ["eta", "delta", "u0", "omega_rec", "kappa"]},
                        "values": {"type": "array", "items": _num, "minItems": 1}},
                       required=("name", "values")),
    }, required=("axis", "quantities")),
}, required=("schema_version", "tier", "params"))

DEFAULTS = {
    "seed": 0,
    "output": "ringcav-out",
    "params": {"kappa": 1.0, "delta": -1.0, "u0": 0.01, "omega_rec": 0.01, "optimal_detuning": False},
    "classical": {"x0": 0.0, "p0": 5.0, "t_max": 500.0, "tol": 1e-8, "n_samples": 5001,
                  "geometry": "both", "window": None},
    "moments": {"t_max": 200.0, "tol": 1e-10, "n_samples": 401, "initial_n_at": 10.0,
                "fit_transient": 5.0},
    "quantum": {"n_mom": 16, "n_fock_sine": 6, "n_fock_cos": None, "parity": "even",
                "treatment": "coherent", "t_max": 100.0, "n_samples": 101, "n_traj": 20,
                "max_step": 1.0, "initial": {"kind": "momentum", "e_kin": 25.0},
                "jump_statistics": False, "threshold": 0.5, "average_window": 20.0},
    "sweep": {"optimal_detuning": False, "series": None},
}

# blocks each tier reads; other tier blocks are accepted but ignored
TIER_BLOCKS = {
    "classical": ("classical",), "linear": (), "moments": ("moments",),
    "mcwf": ("quantum",), "lindblad": ("quantum",), "sweep": ("sweep", "quantum"),
}


def _merge(base, override):
    out = copy.deepcopy(base)
    for k, v in (override or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_config(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return raw


def validate_config(raw: dict) -> None:
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from exc
    p = raw["params"]
    if ("eta" in p) == ("omega_m" in p):
        raise ConfigError("params must give exactly one of 'eta' and 'omega_m'")
    if "sweep" in raw and ("values" in raw["sweep"]) == ("grid" in raw["sweep"]):
        raise ConfigError("sweep must give exactly one of 'values' and 'grid'")


def resolve_config(raw: dict, seed=None, threads=None, tier=None, out=None) -> dict:
    """Validate, apply command-line overrides and fill in every default."""
    validate_config(raw)
    cfg = copy.deepcopy(raw)
    if tier is not None:
        if tier not in TIERS:
            raise ConfigError(f"unknown tier {tier!r}")
        cfg["tier"] = tier
    if seed is not None:
        cfg["seed"] = seed
    if threads is not None:
        cfg["threads"] = threads
    if out is not None:
        cfg["output"] = str(out)
    blocks = {"params"} | set(TIER_BLOCKS[cfg["tier"]])
    if cfg["tier"] == "sweep" and "sweep" not in cfg:
        raise ConfigError("tier 'sweep' needs a 'sweep' block")
    for key in ("seed", "output"):
        cfg.setdefault(key, DEFAULTS[key])
    for b in blocks:
        cfg[b] = _merge(DEFAULTS.get(b, {}), cfg.get(b))
    return cfg


def params_from_config(block: dict) -> SystemParams:
    b = dict(block)
    opt = b.pop("optimal_detuning", False)
    try:
        if "omega_m" in b:
            wm = b.pop("omega_m")
            delta = -wm if opt else b["delta"]
            return SystemParams.from_trap_frequency(wm, delta, b["u0"], b["omega_rec"], b["kappa"])
        p = SystemParams(**b)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid params: {exc}") from exc
    if opt:
        p = p.replace(delta=-optimal_trap_frequency(p))
    return p


def _manifest(cfg: dict, p: SystemParams) -> dict:
    from .kernel import BACKEND
    return {
        "package": "ringcav", "version": __version__, "schema_version": SCHEMA_VERSION,
        "config": cfg, "resolved_params": p.to_dict(), "kernel": BACKEND,
        "numpy": np.__version__,
    }


def _csv_header(cfg: dict, p: SystemParams, extra=None) -> dict:
    h = {"schema_version": SCHEMA_VERSION, "tier": cfg["tier"], "params": p.to_dict(),
         "seed": cfg["seed"]}
    h.update(extra or {})
    return h


# --------------------------------------------------------------------------
# tiers: each returns (summary, {filename: (columns, header)})

def _run_linear(cfg, p):
    from .linear import cooling_summary
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = cooling_summary(p)
    d = derive_params(p)
    summary = {
        "n_at": res.n_at, "n_a": res.n_a, "gamma_cool": res.gamma_cool,
        "a_plus": res.a_plus, "a_minus": res.a_minus,
        "derived": {"alpha": d.alpha, "omega_m": d.omega_m, "lamb_dicke": d.lamb_dicke,
                    "u0_bar": d.u0_bar},
        "validity": _validity(p),
        "warnings": [str(w.message) for w in caught],
    }
    cols = {k: [summary[k]] for k in ("n_at", "n_a", "gamma_cool", "a_plus", "a_minus")}
    return summary, {"linear.csv": (cols, _csv_header(cfg, p))}


def _validity(p):
    v = validity_report(p)
    return {"localization_ok": v.localization_ok, "detuning_ok": v.detuning_ok,
            "perturbative_ok": v.perturbative_ok, "sidebands_resolved": v.sidebands_resolved,
            "ratios": v.ratios}


def _run_classical(cfg, p):
    from .classical import ClassicalState, Geometry, compare_geometries, integrate_classical
    c = cfg["classical"]
    s0 = ClassicalState.adiabatic(p, c["x0"], c["p0"])
    files = {}
    if c["geometry"] == "both":
        cmp = compare_geometries(p, s0, c["t_max"], c["tol"], c["n_samples"], c["window"])
        summary = {"window": cmp.window}
        for name, run in (("ring", cmp.ring), ("standing", cmp.standing)):
            cols = run.series.columns()
            cols["e_kin_envelope"] = run.envelope
            e0 = float(run.series.e_kin[0])
            summary[name] = {"e_kin_initial": e0, "e_kin_final": float(run.series.e_kin[-1]),
                             "envelope_final": float(run.envelope[-1]),
                             "envelope_ratio": float(run.envelope[-1] / e0) if e0 else None,
                             "half_energy_time": run.half_energy_time,
                             "x_excursion": run.x_excursion}
            files[f"classical_{name}.csv"] = (cols, _csv_header(cfg, p, {"geometry": name}))
        return summary, files
    g = Geometry.RING if c["geometry"] == "ring" else Geometry.STANDING_WAVE
    s0 = ClassicalState.adiabatic(p, c["x0"], c["p0"], g)
    series = integrate_classical(s0, p, g, c["t_max"], c["tol"], n_samples=c["n_samples"])
    summary = {c["geometry"]: {"e_kin_initial": float(series.e_kin[0]),
                               "e_kin_final": float(series.e_kin[-1])}}
    files[f"classical_{c['geometry']}.csv"] = (series.columns(),
                                               _csv_header(cfg, p, {"geometry": c["geometry"]}))
    return summary, files


def _run_moments(cfg, p):
    from .analysis import fit_exponential
    from .linear import cooling_summary
    from .moments import (MomentState, integrate_moments, moment_decay_rate,
                          occupancy_from_moments, steady_state_moments)
    c = cfg["moments"]
    ss = steady_state_moments(p)
    series = integrate_moments(MomentState.thermal(c["initial_n_at"]), p, c["t_max"],
                               c["tol"], n_samples=c["n_samples"])
    fit = fit_exponential(series.t, series.n_at, c["fit_transient"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        lin = cooling_summary(p)
    summary = {
        "steady_state": {k: float(v) for k, v in zip(
            ("n_a", "q2", "p2", "acorr", "re_aq", "im_aq", "re_ap", "im_ap", "re_a2", "im_a2"),
            ss.to_vector())},
        "n_at_steady": occupancy_from_moments(ss), "decay_rate": moment_decay_rate(p),
        "fit": fit.to_dict(), "linear_gamma": lin.gamma_cool, "linear_n_at": lin.n_at,
        "validity": _validity(p),
    }
    return summary, {"moments.csv": (series.columns(), _csv_header(cfg, p))}


def _quantum_setup(cfg, p):
    from .quantum import (HilbertSpace, Treatment, build_model, harmonic_state, hot_momentum,
                          momentum_state, trap_level_state)
    q = cfg["quantum"]
    try:
        space = HilbertSpace(q["n_mom"], q["n_fock_sine"], q["n_fock_cos"], q["parity"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    treatment = Treatment(q["treatment"])
    model = build_model(p, space, treatment)
    init = q["initial"]
    kind = init.get("kind", "momentum")
    if kind == "momentum":
        n = init["n"] if "n" in init else hot_momentum(space, p.omega_rec, init.get("e_kin", 25.0))
        psi0 = momentum_state(model, n)
    elif kind == "trap":
        psi0 = trap_level_state(model, init.get("level", 0))
    else:
        motion = harmonic_state(space, init.get("level", 0), model.derived.lamb_dicke)
        psi0 = space.product_state(motion)
    return model, psi0


def _series_columns(times, mean, sem=None):
    cols = {"t": times}
    for k in sorted(mean):
        cols[k] = mean[k]
        if sem is not None:
            cols[f"{k}_sem"] = sem[k]
    return cols


def _run_mcwf(cfg, p):
    from .analysis import fit_exponential, trajectory_jump_statistics
    from .errors import DegenerateFitError
    from .quantum import run_ensemble
    q = cfg["quantum"]
    model, psi0 = _quantum_setup(cfg, p)
    stats, records = run_ensemble(model, psi0, q["n_traj"], cfg["seed"], q["t_max"],
                                  q["n_samples"], workers=cfg.get("threads"),
                                  max_step=q["max_step"], keep_records=True)
    late = stats.times >= stats.times[-1] - q["average_window"]
    summary = {
        "n_traj": stats.n_traj, "master_seed": stats.master_seed, "seeds": stats.seeds,
        "dim": model.dim, "energy_offset": model.energy_offset,
        "final_mean": {k: float(v[-1]) for k, v in stats.mean.items()},
        "final_sem": {k: float(v[-1]) for k, v in stats.sem.items()},
        "window_mean": {k: float(v[late].mean()) for k, v in stats.mean.items()},
        "n_jumps": stats.n_jumps, "truncation": stats.truncation,
        "ground_state_e_kin": (model.derived.omega_m / 4 if model.derived else None),
    }
    try:
        summary["e_kin_fit"] = fit_exponential(stats.times, stats.mean["e_kin"]).to_dict()
    except DegenerateFitError as exc:
        summary["e_kin_fit"] = {"error": str(exc)}
    header = _csv_header(cfg, p, {"space": model.space.to_dict(), "treatment": q["treatment"],
                                  "n_traj": stats.n_traj, "seeds": stats.seeds})
    files = {"mcwf.csv": (_series_columns(stats.times, stats.mean, stats.sem), header)}
    jump_cols = {"trajectory": [], "t": [], "channel": []}
    for i, r in enumerate(records):
        for t, ch in r.jumps:
            jump_cols["trajectory"].append(float(i))
            jump_cols["t"].append(t)
            jump_cols["channel"].append(ch)
    files["jumps.csv"] = (jump_cols, header)
    if q["jump_statistics"]:
        js = [trajectory_jump_statistics(r, q["threshold"]) for r in records]
        summary["jump_statistics"] = [j.to_dict() for j in js]
        files["trajectory0.csv"] = (_series_columns(records[0].times, records[0].observables),
                                    _csv_header(cfg, p, {"seed": records[0].seed}))
    return summary, files


def _run_lindblad(cfg, p):
    from .quantum import lindblad_evolve
    q = cfg["quantum"]
    model, psi0 = _quantum_setup(cfg, p)
    res = lindblad_evolve(model, psi0, q["t_max"], q["n_samples"])
    summary = {"dim": model.dim, "final": {k: float(v[-1]) for k, v in res.observables.items()},
               "max_trace_error": float(np.max(np.abs(res.trace - 1.0)))}
    cols = _series_columns(res.times, res.observables)
    cols["trace"] = res.trace
    header = _csv_header(cfg, p, {"space": model.space.to_dict(), "treatment": q["treatment"]})
    return summary, {"lindblad.csv": (cols, header)}


def _run_sweep(cfg, p):
    from .analysis import QuantumSweepSettings, SweepSpec, sweep
    s = cfg["sweep"]
    if "values" in s:
        grid = np.asarray(s["values"], float)
    else:
        g = s["grid"]
        grid = (np.geomspace if g.get("log") else np.linspace)(g["start"], g["stop"], g["num"])
    q = cfg.get("quantum") or DEFAULTS["quantum"]
    qs = QuantumSweepSettings(
        n_mom=q["n_mom"], n_fock_sine=q["n_fock_sine"], parity=q["parity"], n_traj=q["n_traj"],
        t_max=q["t_max"], n_samples=q["n_samples"],
        initial_e_kin=q["initial"].get("e_kin", 25.0), average_window=q["average_window"],
        master_seed=cfg["seed"], workers=cfg.get("threads"))
    series = s.get("series") or {}
    spec = SweepSpec(base=p, axis=s["axis"], grid=grid, quantities=tuple(s["quantities"]),
                     optimal_detuning=s["optimal_detuning"],
                     series_name=series.get("name"), series_values=tuple(series.get("values", ())),
                     quantum=qs)
    try:
        table = sweep(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    summary = {"rows": len(table.columns[table.axis]), "provenance": table.provenance,
               "errors": table.errors}
    header = _csv_header(cfg, p, {"provenance": table.provenance})
    return summary, {"sweep.csv": (table.columns, header)}


RUNNERS = {"classical": _run_classical, "linear": _run_linear, "moments": _run_moments,
           "mcwf": _run_mcwf, "lindblad": _run_lindblad, "sweep": _run_sweep}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (TruncationError, DimensionGuardError)):
        return EXIT_GUARD
    if isinstance(exc, (RingCavError, ArithmeticError)):
        return EXIT_NUMERIC
    return EXIT_INTERNAL


def run(cfg_raw: dict, seed=None, threads=None, tier=None, out=None) -> tuple[int, Path]:
    """Execute one config; returns ``(exit_code, output_dir)``."""
    out_dir = Path(out or cfg_raw.get("output") or DEFAULTS["output"]) if isinstance(cfg_raw, dict) \
        else Path(out or DEFAULTS["output"])
    try:
        if not isinstance(cfg_raw, dict):
            raise ConfigError("config must be a JSON object")
        cfg = resolve_config(cfg_raw, seed, threads, tier, out)
        out_dir = Path(cfg["output"])
        p = params_from_config(cfg["params"])
        if threads is not None:
            os.environ["RINGCAV_THREADS"] = str(threads)
        summary, files = RUNNERS[cfg["tier"]](cfg, p)
    except Exception as exc:  # noqa: BLE001 - every failure becomes a report
        code = exit_code_for(exc)
        out_dir.mkdir(parents=True, exist_ok=True)
        report = {"status": "error", "exit_code": code, "error_type": type(exc).__name__,
                  "message": str(exc)}
        if getattr(exc, "t_fail", None) is not None:
            report["t_fail"] = exc.t_fail
        write_json(out_dir / "summary.json", report)
        return code, out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, (cols, header) in files.items():
        write_csv(out_dir / name, cols, header)
    summary = {"status": "ok", "exit_code": EXIT_OK, "tier": cfg["tier"],
               "files": sorted(files), **summary}
    write_json(out_dir / "summary.json", summary)
    write_json(out_dir / "manifest.json", _manifest(cfg, p))
    return EXIT_OK, out_dir


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ringcav", description="Ring-cavity cooling simulations.")
    ap.add_argument("--config", required=True, help="JSON run config")
    ap.add_argument("--out", help="output directory (overrides config 'output')")
    ap.add_argument("--seed", type=int, help="master seed (overrides config)")
    ap.add_argument("--threads", type=int, help="trajectory workers (overrides RINGCAV_THREADS)")
    ap.add_argument("--tier", choices=TIERS, help="tier to run (overrides config)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out
    try:
        raw = load_config(args.config)
    except ConfigError as exc:
        out_dir = Path(out or DEFAULTS["output"])
        out_dir.mkdir(parents=True, exist_ok=True)
        write_json(out_dir / "summary.json", {"status": "error", "exit_code": EXIT_CONFIG,
                                              "error_type": "ConfigError", "message": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, out_dir = run(raw, args.seed, args.threads, args.tier, out)
    if code:
        print(f"error: see {out_dir / 'summary.json'}", file=sys.stderr)
    else:
        print(f"wrote {out_dir}")
    return code


if __name__ == "__main__":
    sys.exit(main())
