"""Command-line experiment runner.

    bspf diff-bench --sizes 1000,2000 --seed 1 --out results/diff
    bspf burgers --config configs/burgers.yaml

Every run writes its CSV output and a ``manifest.json`` holding the fully
resolved configuration, the library version and the seed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import BspfError, ConfigError
from .experiments import METHODS, ExperimentConfig, run_convergence, run_timing
from .pde import burgers as burgers_mod
from .pde import swe as swe_mod
from .pde.state import SweConfig

EXPERIMENTS = ("diff-bench", "int-bench", "map-bench", "timing", "burgers", "swe")
PDE_DEFAULT_METHOD = {"burgers": "bspf", "swe": "bspf"}


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a mapping")
    return data


def resolve_config(experiment: str, file_values: dict, args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, then the config file, then command-line flags."""
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    values = dict(file_values)
    if "lambda" in values:
        values["lam"] = values.pop("lambda")
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if values.get("experiment", experiment) != experiment:
        raise ConfigError(f"config is for {values['experiment']!r}, not {experiment!r}")
    values["experiment"] = experiment
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        values["out"] = args.out
    if getattr(args, "sizes", None):
        values["sizes"] = args.sizes
    if getattr(args, "method", None) is not None:
        values["method"] = args.method
    cfg = ExperimentConfig(**values)
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}")
    if cfg.method not in METHODS:
        raise ConfigError(f"unknown method {cfg.method!r}")
    if cfg.n < 2 * cfg.p:
        raise ConfigError(f"n={cfg.n} < 2p={2 * cfg.p}")
    if cfg.m < cfg.p:
        raise ConfigError(f"m={cfg.m} < p={cfg.p}")
    if cfg.lam < 0:
        raise ConfigError("lambda must be non-negative")
    if cfg.experiment in ("burgers", "swe"):
        pde_cls = burgers_mod.BurgersConfig if cfg.experiment == "burgers" else SweConfig
        _pde_config(pde_cls, cfg.pde)
        return
    if not cfg.sizes:
        raise ConfigError("sizes must not be empty")
    for N in cfg.sizes:
        if int(N) != N or N < 3:
            raise ConfigError(f"grid size {N} must be an integer >= 3")
        if cfg.method == "bspf" and cfg.m > N:
            raise ConfigError(f"m={cfg.m} exceeds grid size N={N}")


def _pde_config(cls, values: dict):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    try:
        pde = cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if pde.n_basis < 2 * pde.p or pde.m < pde.p or pde.m > pde.n:
        raise ConfigError(f"invalid spline parameters p={pde.p}, n={pde.n_basis}, m={pde.m} for N={pde.n}")
    return pde


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10e}"
    return str(v)


def write_rows(path: Path, rows: list, columns: list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])


def write_manifest(out: Path, cfg: ExperimentConfig, extra: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"experiment": cfg.experiment, "library_version": __version__, "seed": cfg.seed, **extra, "config": cfg.to_dict()}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=float) + "\n")


def run_experiment(cfg: ExperimentConfig) -> dict:
    out = Path(cfg.out)
    exp = cfg.experiment
    if exp in ("diff-bench", "int-bench", "map-bench"):
        res = run_convergence(cfg)
        write_rows(out / f"{exp}.csv", res["rows"], ["N", "method", "error", "wall_time"])
        summary = {"slopes": res["slopes"], "partial": res["partial"]}
        if res.get("error"):
            summary["error"] = res["error"]
        write_manifest(out, cfg, summary)
        return res
    if exp == "timing":
        res = run_timing(cfg)
        write_rows(out / "timing.csv", res["rows"], ["N", "method", "wall_time"])
        write_manifest(out, cfg, {"nlogn_exponent": res["nlogn_exponent"]})
        return res
    if exp == "burgers":
        return _run_burgers(cfg, out)
    if exp == "swe":
        pde = _pde_config(SweConfig, cfg.pde)
        res = swe_mod.run(pde, out_dir=out)
        return {"mass_drift": res.mass_drift}
    raise ConfigError(f"unknown experiment {exp!r}")


def _run_burgers(cfg: ExperimentConfig, out: Path) -> dict:
    pde = _pde_config(burgers_mod.BurgersConfig, cfg.pde)
    res = burgers_mod.run(pde)
    out.mkdir(parents=True, exist_ok=True)
    header = "t," + ",".join(f"{x:.10e}" for x in res.x)
    np.savetxt(out / "burgers_error.csv", np.column_stack([res.times, res.errors]), delimiter=",", header=header, comments="", fmt="%.10e")
    np.savetxt(out / "burgers_solution.csv", np.column_stack([res.times, res.u]), delimiter=",", header=header, comments="", fmt="%.17e")
    summary = {
        "max_error": res.max_error,
        "nfev": res.trajectory.nfev,
        "accepted_steps": res.trajectory.n_accepted,
        "rejected_steps": res.trajectory.n_rejected,
        "pde_config": dataclasses.asdict(pde),
    }
    write_manifest(out, cfg, summary)
    return summary


def _sizes(text: str) -> list:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bspf", description="B-spline-periodized Fourier experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="YAML config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--sizes", type=_sizes, help="comma-separated grid sizes")
        sp.add_argument("--method", choices=METHODS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.experiment, load_config(args.config), args)
        res = run_experiment(cfg)
    except BspfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    summary = {k: v for k, v in res.items() if k != "rows"} if isinstance(res, dict) else {}
    print(json.dumps(summary, default=float))
    return 0


if __name__ == "__main__":
    sys.exit(main())
