"""Experiment driver: ``spectralfe <subcommand> config.json [key=value ...]``.

Exit status is 0 on success, 1 on invalid configuration and 2 when a
computed acceptance flag is false.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import lattice
from .estimate import estimate_report, reconstruct_dos, write_dos_csv
from .noise import monte_carlo_study
from .plan import ErrorBudget, SamplingPlan, plan_deterministic, scaling_study
from .sampler import noise_from_dict, read_samples_csv, sample_series, write_samples_csv
from .spectrum import exact_spectrum
from .window import lemma_table

OUTPUT_ENV = "SPECTRALFE_OUTPUT_DIR"
SUBCOMMANDS = ("plan", "sample", "estimate", "verify-lemmas", "noise-mc", "sweep", "pipeline")

_SCHEMA = {
    "model": {"model": str, "n": int, "boundary": str, "lattice": str, "Lx": int, "Ly": int,
              "Jz": float, "Jx": float, "h": float, "levels": list, "dimension": int},
    "budget": {"beta": float, "gamma": float, "epsilon": float},
    "noise": {"kind": str, "R": int, "sigma_g": float},
    "run": {"seed": int, "trials": int, "output_dir": str, "use_bandwidth_bound": bool,
            "include_l0_variance": bool, "force_large_N": bool, "guard_band": bool,
            "grid_points": int, "thetas": list, "n_range": list, "delta_E_per_spin": float},
}
_DEFAULTS = {
    "model": {"boundary": "periodic", "lattice": "chain", "Jz": 1.0, "Jx": 0.0, "h": 0.0},
    "budget": {"epsilon": 0.1},
    "noise": {"kind": "exact"},
    "run": {"seed": 0, "trials": 1000, "use_bandwidth_bound": False,
            "include_l0_variance": True, "force_large_N": False, "guard_band": True,
            "grid_points": 2048, "thetas": list(range(2, 61, 2)), "n_range": [4, 8, 16, 32, 64],
            "delta_E_per_spin": 1.0},
}


class ConfigError(ValueError):
    """Invalid experiment configuration; the message starts with the field path."""


def _coerce(path: str, value, kind):
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind in (str, bool, list) and isinstance(value, kind):
        return value
    raise ConfigError(f"{path}: expected {kind.__name__}, got {value!r}")


def apply_overrides(config: dict, overrides) -> dict:
    """Apply ``block.key=value`` overrides; values are parsed as JSON when possible."""
    config = copy.deepcopy(config)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"{item}: override must look like block.key=value")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        parts = key.split(".")
        if len(parts) != 2:
            raise ConfigError(f"{key}: override key must be block.key")
        config.setdefault(parts[0], {})[parts[1]] = value
    return config


def validate_config(raw: dict) -> dict:
    """Check every block and key before any computation; fill defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    out = {}
    for block in raw:
        if block not in _SCHEMA:
            raise ConfigError(f"{block}: unknown block")
    for block, fields in _SCHEMA.items():
        given = raw.get(block, {})
        if not isinstance(given, dict):
            raise ConfigError(f"{block}: must be an object")
        for key in given:
            if key not in fields:
                raise ConfigError(f"{block}.{key}: unknown key")
        merged = {**_DEFAULTS.get(block, {}), **given}
        out[block] = {k: _coerce(f"{block}.{k}", v, fields[k]) for k, v in merged.items()}

    m, b, nz, run = out["model"], out["budget"], out["noise"], out["run"]
    if m.get("model") not in ("ising", "xxz", "free", "synthetic"):
        raise ConfigError(f"model.model: expected ising|xxz|free|synthetic, got {m.get('model')!r}")
    if m["boundary"] not in ("open", "periodic"):
        raise ConfigError(f"model.boundary: expected open|periodic, got {m['boundary']!r}")
    if m["lattice"] not in ("chain", "grid"):
        raise ConfigError(f"model.lattice: expected chain|grid, got {m['lattice']!r}")
    if m["model"] == "synthetic":
        if "levels" not in m:
            raise ConfigError("model.levels: required for synthetic spectra")
    elif m["lattice"] == "grid":
        for k in ("Lx", "Ly"):
            if m.get(k, 0) < 1:
                raise ConfigError(f"model.{k}: positive integer required for a grid")
    elif m.get("n", 0) < 1:
        raise ConfigError("model.n: positive integer required")
    for key in ("beta", "gamma"):
        if key not in b:
            raise ConfigError(f"budget.{key}: required")
        if not b[key] > 0:
            raise ConfigError(f"budget.{key}: must be > 0, got {b[key]}")
    if not 0 < b["epsilon"] < 1:
        raise ConfigError(f"budget.epsilon: must lie in (0, 1), got {b['epsilon']}")
    try:
        noise_from_dict(nz)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"noise: {exc}") from None
    if run["trials"] < 100:
        raise ConfigError(f"run.trials: must be >= 100, got {run['trials']}")
    if run["grid_points"] < 2:
        raise ConfigError("run.grid_points: must be >= 2")
    return out


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()


def build_model(m: dict) -> lattice.Hamiltonian:
    kind = m["model"]
    if kind == "synthetic":
        spec = lattice.Synthetic(tuple(tuple(lv) for lv in m["levels"]), m.get("dimension"))
        graph = lattice.open_chain(m["n"]) if "n" in m else None
        return lattice.build_hamiltonian(graph, spec)
    periodic = m["boundary"] == "periodic"
    if m["lattice"] == "grid":
        graph = lattice.grid(m["Lx"], m["Ly"], periodic=periodic)
    else:
        graph = lattice.ring(m["n"]) if periodic else lattice.open_chain(m["n"])
    if kind == "ising":
        spec = lattice.IsingLongitudinal(m["Jz"], m["h"])
    elif kind == "xxz":
        spec = lattice.XXZ(m["Jx"], m["Jz"])
    else:
        spec = lattice.FreeSpins(m["h"])
    return lattice.build_hamiltonian(graph, spec)


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _clean(obj.item())
    return obj


def emit_report(report, fmt: str = "json", path=None) -> str:
    """Render a report (object with ``to_dict`` or a dict) as JSON or aligned text.

    Floats are written with ``repr`` precision so they round-trip exactly.
    """
    data = report.to_dict() if hasattr(report, "to_dict") else dict(report)
    if fmt == "json":
        text = json.dumps(_clean(data), indent=2, sort_keys=True) + "\n"
    elif fmt == "text":
        width = max(len(k) for k in data)
        text = "".join(f"{k:<{width}}  {v!r}\n" for k, v in _clean(data).items())
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


class _Context:
    def __init__(self, config: dict, out_dir: Path, threads: int):
        self.config = config
        self.out = out_dir
        self.threads = threads
        self.hash = config_hash(config)
        self.seed = config["run"]["seed"]
        self.provenance = {"config_hash": self.hash, "seed": self.seed}
        self.budget_block = config["budget"]

    def hamiltonian(self):
        return build_model(self.config["model"])

    def budget(self, n: int) -> ErrorBudget:
        b = self.budget_block
        return ErrorBudget(n, b["beta"], b["gamma"], b["epsilon"])

    def spread(self, h, spectrum) -> float:
        if self.config["run"]["use_bandwidth_bound"]:
            return lattice.bandwidth_bound(h)
        return spectrum.bandwidth

    def plan(self, h, spectrum) -> SamplingPlan:
        run = self.config["run"]
        n = spectrum.n if spectrum.n >= 1 else self.config["model"].get("n", 1)
        return plan_deterministic(self.budget(n), self.spread(h, spectrum),
                                  guard_band=run["guard_band"], force=run["force_large_N"])

    def write_json(self, name: str, data: dict) -> Path:
        path = self.out / name
        emit_report({**data, "provenance": self.provenance}, "json", path)
        return path


def _cmd_plan(ctx: _Context, args) -> int:
    h = ctx.hamiltonian()
    s = exact_spectrum(h)
    plan = ctx.plan(h, s)
    ctx.write_json("plan.json", plan.to_dict())
    return 0


def _estimate(ctx: _Context, samples, h, s) -> int:
    n = s.n if s.n >= 1 else ctx.config["model"].get("n", 1)
    report = estimate_report(samples, s, ctx.budget(n))
    ctx.write_json("estimate.json", report.to_dict())
    curve = reconstruct_dos(samples, ctx.config["run"]["grid_points"])
    write_dos_csv(curve, ctx.out / "dos.csv", json.dumps(ctx.provenance))
    return 0 if report.passed else 2


def _cmd_sample(ctx: _Context, args) -> int:
    h = ctx.hamiltonian()
    s = exact_spectrum(h)
    plan = _load_plan(args.plan) if args.plan else ctx.plan(h, s)
    samples = sample_series(s, plan, noise_from_dict(ctx.config["noise"]), ctx.seed)
    write_samples_csv(samples, ctx.out / "samples.csv", ctx.provenance)
    return 0


def _load_plan(path) -> SamplingPlan:
    data = json.loads(Path(path).read_text())
    return SamplingPlan.from_dict(data)


def _cmd_estimate(ctx: _Context, args) -> int:
    if not args.samples:
        raise ConfigError("--samples: required for estimate")
    plan = _load_plan(args.plan) if args.plan else None
    samples = read_samples_csv(args.samples, plan)
    h = ctx.hamiltonian()
    return _estimate(ctx, samples, h, exact_spectrum(h))


def _cmd_pipeline(ctx: _Context, args) -> int:
    h = ctx.hamiltonian()
    s = exact_spectrum(h)
    plan = ctx.plan(h, s)
    ctx.write_json("plan.json", plan.to_dict())
    samples = sample_series(s, plan, noise_from_dict(ctx.config["noise"]), ctx.seed)
    write_samples_csv(samples, ctx.out / "samples.csv", ctx.provenance)
    return _estimate(ctx, samples, h, s)


def _write_csv(path: Path, rows: list[dict], comment: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(_clean(comment)) + "\n")
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def _cmd_verify_lemmas(ctx: _Context, args) -> int:
    rows = lemma_table(ctx.config["run"]["thetas"])
    _write_csv(ctx.out / "lemmas.csv", rows, ctx.provenance)
    return 0 if all(r["margin"] > 0 for r in rows) else 2


def _cmd_noise_mc(ctx: _Context, args) -> int:
    h = ctx.hamiltonian()
    s = exact_spectrum(h)
    run = ctx.config["run"]
    result = monte_carlo_study(h, ctx.budget(s.n), noise_from_dict(ctx.config["noise"]),
                               run["trials"], ctx.seed, threads=ctx.threads,
                               use_bandwidth_bound=run["use_bandwidth_bound"],
                               includes_l0=run["include_l0_variance"], plan=ctx.plan(h, s))
    ctx.write_json("noise_mc.json", result.to_dict())
    rows = [dict(trial=k, Z_tilde=float(z), F_tilde=float(f), passed=bool(p))
            for k, (z, f, p) in enumerate(zip(result.Z_tilde, result.F_tilde, result.passed))]
    _write_csv(ctx.out / "noise_mc_trials.csv", rows, ctx.provenance)
    return 0


def _cmd_sweep(ctx: _Context, args) -> int:
    run = ctx.config["run"]
    b = ctx.budget_block
    c = run["delta_E_per_spin"]
    table = scaling_study(dict(beta=b["beta"], gamma=b["gamma"], epsilon=b["epsilon"]),
                          run["n_range"], lambda n: c * n, guard_band=run["guard_band"])
    _write_csv(ctx.out / "sweep.csv", table.rows(),
               {**ctx.provenance, "exponent": table.exponent})
    return 0


_COMMANDS = {"plan": _cmd_plan, "sample": _cmd_sample, "estimate": _cmd_estimate,
             "verify-lemmas": _cmd_verify_lemmas, "noise-mc": _cmd_noise_mc,
             "sweep": _cmd_sweep, "pipeline": _cmd_pipeline}


def run(subcommand: str, config_path, overrides=(), *, out_dir=None, threads: int = 1,
        samples=None, plan=None) -> int:
    """Execute one subcommand; returns the process exit status."""
    try:
        raw = json.loads(Path(config_path).read_text())
        config = validate_config(apply_overrides(raw, overrides))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {config_path}: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(out_dir or config["run"].get("output_dir") or os.environ.get(OUTPUT_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    ctx = _Context(config, out, max(1, int(threads)))
    args = argparse.Namespace(samples=samples, plan=plan)
    try:
        return _COMMANDS[subcommand](ctx, args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="spectralfe", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("config", help="experiment JSON config")
    parser.add_argument("overrides", nargs="*", help="block.key=value overrides")
    parser.add_argument("--out", help=f"output directory (default: run.output_dir, ${OUTPUT_ENV}, .)")
    parser.add_argument("--threads", type=int, default=1, help="cap on worker threads")
    parser.add_argument("--samples", help="sample CSV for the estimate subcommand")
    parser.add_argument("--plan", help="plan JSON overriding the planner")
    args = parser.parse_args(argv)
    return run(args.subcommand, args.config, args.overrides, out_dir=args.out,
               threads=args.threads, samples=args.samples, plan=args.plan)


if __name__ == "__main__":
    sys.exit(main())
