"""Command-line front end: one subcommand per experiment, driven by a TOML file.

    fqhlab scatter --config run.toml --out results/
    fqhlab --print-defaults > run.toml

Every result file carries the resolved configuration and the package
version.  Files are written to a temporary name and renamed into place.
Exit status: 0 success, 2 invalid configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli
import tomli_w

from . import __version__
from .confinement import ConfinementGrid, NoBoundStateError, confinement_ground_state
from .lllspace import (build_basis, dim_b_ell, kernel_dimension, laughlin_vector,
                       pseudo_hamiltonian, spectrum, yrast_scan)
from .potentials import potential_from_dict
from .scattering import GridSpec, ScatteringError, born_scattering_length, scattering_length
from .twobody import (EigensolveError, GridResolutionError, TwoBodyGrid, convergence_study)

SUBCOMMANDS = ("scatter", "pseudopot", "laughlin", "yrast", "converge", "confine")

DEFAULTS = {
    "potential": {"kind": "hardcore", "radius": 1.0},
    "scatter": {"channels": [0, 1, 2], "dim": 2},
    "pseudopot": {"N": 3, "L": 6, "statistics": "bose", "ell": 0, "count": 6},
    "laughlin": {"N": 3, "m": 2, "ell": 1, "statistics": "bose"},
    "yrast": {"N": 3, "ell": 0, "statistics": "bose", "L_min": 0, "L_max": 9,
              "lam": 1e-3, "gamma": 1.0},
    "converge": {"ell": 1, "a_list": [0.1, 0.05, 0.025, 0.0125], "n_points": 2000},
    "confine": {"kind": "harmonic", "width": 1.0, "n_points": 20000},
    "tolerances": {"fit_residual": 1e-9, "kernel": 1e-10},
}


class ConfigError(ValueError):
    pass


NUMERICAL_ERRORS = (ScatteringError, EigensolveError, GridResolutionError, NoBoundStateError,
                    np.linalg.LinAlgError, ArithmeticError)


@dataclass
class RunConfig:
    subcommand: str
    tables: dict
    out: Path = Path(".")
    threads: int = 1
    seed: int = 0
    partial: bool = field(default=False, compare=False)

    def resolved(self) -> dict:
        return {"subcommand": self.subcommand, "seed": self.seed, **self.tables}


def _merge(base: dict, over: dict) -> dict:
    """Table-wise merge; a user potential table replaces the default one whole."""
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict) and key != "potential":
            out[key] = {**out[key], **val}
        else:
            out[key] = val
    return out


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def validate(cfg: RunConfig) -> RunConfig:
    t = cfg.tables
    _require(cfg.subcommand in SUBCOMMANDS, f"unknown subcommand {cfg.subcommand!r}")
    unknown = set(t) - set(DEFAULTS)
    _require(not unknown, f"unknown config tables: {sorted(unknown)}")
    for name, val in t["tolerances"].items():
        _require(isinstance(val, (int, float)) and val > 0, f"tolerance {name} must be positive")
    _require(cfg.threads >= 1, "threads must be at least 1")
    try:
        potential_from_dict(t["potential"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"potential: {exc}") from exc

    sc = t["scatter"]
    _require(isinstance(sc["channels"], list) and len(sc["channels"]) > 0, "channel list is empty")
    _require(all(isinstance(c, int) and c >= 0 for c in sc["channels"]),
             "channels must be non-negative integers")
    _require(sc["dim"] in (2, 3), "dim must be 2 or 3")

    for name in ("pseudopot", "laughlin", "yrast"):
        tab = t[name]
        _require(isinstance(tab["N"], int) and tab["N"] >= 2, f"{name}.N must be an integer >= 2")
        _require(tab["statistics"] in ("bose", "fermi", "none"), f"{name}.statistics invalid")
        _require(isinstance(tab["ell"], int) and tab["ell"] >= 0, f"{name}.ell must be >= 0")
    _require(t["pseudopot"]["L"] >= 0 and t["pseudopot"]["count"] >= 1, "pseudopot.L or count invalid")
    _require(t["laughlin"]["m"] >= 1, "laughlin.m must be >= 1")
    y = t["yrast"]
    _require(0 <= y["L_min"] <= y["L_max"], "yrast needs 0 <= L_min <= L_max")
    _require(y["lam"] > 0 and y["gamma"] >= 0, "yrast needs lam > 0 and gamma >= 0")

    cv = t["converge"]
    a_list = cv["a_list"]
    _require(isinstance(a_list, list) and len(a_list) > 0, "converge.a_list is empty")
    _require(all(isinstance(a, (int, float)) and 0 < a <= 1 for a in a_list),
             "a_list entries must lie in (0, 1]")
    _require(all(y < x for x, y in zip(a_list, a_list[1:])), "a_list must be decreasing")
    _require(max(a_list) <= 0.25, "convergence studies need a <= 0.25")
    _require(cv["ell"] >= 0 and cv["n_points"] >= 64, "converge.ell or n_points invalid")

    cf = t["confine"]
    _require(cf["kind"] in ("harmonic", "box"), "confine.kind must be harmonic or box")
    _require(cf["width"] > 0 and cf["n_points"] >= 8, "confine.width or n_points invalid")
    return cfg


# -- output -------------------------------------------------------------------------

def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%.17g" % x
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else _fmt(x)
    return x


def write_csv(cfg: RunConfig, name: str, header: list[str], rows) -> Path:
    buf = io.StringIO()
    buf.write(f"# fqhlab {__version__}\n")
    buf.write(f"# config: {json.dumps(_jsonable(cfg.resolved()), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    path = cfg.out / name
    _atomic_write(path, buf.getvalue())
    return path


def write_json(cfg: RunConfig, name: str, payload: dict) -> Path:
    doc = {"version": __version__, "config": cfg.resolved(), **payload}
    path = cfg.out / name
    _atomic_write(path, json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    return path


# -- subcommands --------------------------------------------------------------------

def run_scatter(cfg: RunConfig) -> dict:
    t = cfg.tables
    p = potential_from_dict(t["potential"])
    dim = t["scatter"]["dim"]
    grid = GridSpec(residual_tol=t["tolerances"]["fit_residual"])

    def one(ell):
        res = scattering_length(p, ell, dim, grid)
        born = math.nan if (dim == 2 and ell == 0) else born_scattering_length(p, ell, dim)
        return [dim, ell, res.b, born, res.variational_energy, res.fit_residual]

    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        rows = list(pool.map(one, t["scatter"]["channels"]))
    path = write_csv(cfg, "scatter.csv",
                     ["dim", "ell", "b", "b_born", "variational_energy", "fit_residual"], rows)
    return {"files": [path.name], "channels": len(rows)}


def run_pseudopot(cfg: RunConfig) -> dict:
    t = cfg.tables["pseudopot"]
    basis = build_basis(t["N"], t["L"], t["statistics"])
    H = pseudo_hamiltonian(basis, t["ell"])
    vals, _ = spectrum(H, t["count"], seed=cfg.seed)
    kern = kernel_dimension(H, rel_tol=cfg.tables["tolerances"]["kernel"])
    return {"dimension": len(basis), "nnz": int(H.matrix.nnz),
            "lowest_eigenvalues": [float(v) for v in vals], "kernel_dimension": kern,
            "expected_kernel_dimension": dim_b_ell(t["N"], t["L"], t["ell"] + 1, t["statistics"])
            if t["statistics"] != "none" else None}


def run_laughlin(cfg: RunConfig) -> dict:
    t = cfg.tables["laughlin"]
    N, m = t["N"], t["m"]
    basis = build_basis(N, m * N * (N - 1) // 2, t["statistics"])
    psi = laughlin_vector(N, m, basis)
    H = pseudo_hamiltonian(basis, t["ell"])
    residual = float(np.linalg.norm(H @ psi) / np.linalg.norm(psi))
    return {"dimension": len(basis), "L": basis.L, "residual": residual}


def run_yrast(cfg: RunConfig) -> dict:
    t = cfg.tables["yrast"]
    curve = yrast_scan(t["N"], t["ell"], t["statistics"], range(t["L_min"], t["L_max"] + 1),
                       t["lam"], t["gamma"])
    path = write_csv(cfg, "yrast.csv", ["L", "E_min", "interaction", "overlap"],
                     [[pt.L, pt.energy, pt.interaction, pt.overlap] for pt in curve.points])
    return {"files": [path.name], "ground_L": curve.ground_L,
            "overlap_with_laughlin": curve.overlap_with_laughlin, "laughlin_L": curve.laughlin_L,
            "lambda_lower": curve.lambda_lower, "lambda_upper": curve.lambda_upper}


def run_converge(cfg: RunConfig) -> dict:
    t = cfg.tables["converge"]
    p = potential_from_dict(cfg.tables["potential"])
    study = convergence_study(p, t["ell"], t["a_list"], TwoBodyGrid(n_points=t["n_points"]),
                              threads=cfg.threads)
    path = write_csv(cfg, "converge.csv", ["a", "E", "scaled", "predicted_limit", "relative_gap"],
                     [[r.a, r.energy, r.scaled, study.predicted_limit, r.relative_gap]
                      for r in study.rows])
    cfg.partial = not study.complete
    return {"files": [path.name], "predicted_limit": study.predicted_limit,
            "extrapolated": study.extrapolated, "method": study.method,
            "fit": list(study.fit) if study.fit else None, "monotone": study.monotone,
            "complete": study.complete, "error": study.error}


def run_confine(cfg: RunConfig) -> dict:
    t = cfg.tables["confine"]
    if t["kind"] == "harmonic":
        prof = confinement_ground_state(lambda u: u * u, ConfinementGrid(n_points=t["n_points"]))
        exact_e, exact_q = 1.0, 1.0 / math.sqrt(2 * math.pi)
    else:
        w = t["width"]
        prof = confinement_ground_state(lambda u: 0.0 * u, ConfinementGrid(
            -w / 2, w / 2, n_points=t["n_points"], walls=True))
        exact_e, exact_q = (math.pi / w) ** 2, 1.5 / w
    return {"energy": prof.energy, "quartic_integral": prof.quartic_integral,
            "closed_form_energy": exact_e, "closed_form_quartic_integral": exact_q}


RUNNERS = {"scatter": run_scatter, "pseudopot": run_pseudopot, "laughlin": run_laughlin,
           "yrast": run_yrast, "converge": run_converge, "confine": run_confine}


def run(cfg: RunConfig) -> int:
    """Execute one validated configuration; returns the exit status."""
    try:
        result = RUNNERS[cfg.subcommand](cfg)
    except NUMERICAL_ERRORS as exc:
        write_json(cfg, "summary.json", {"status": "error", "kind": "numerical",
                                         "message": str(exc)})
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    status = "partial" if cfg.partial else "ok"
    write_json(cfg, "summary.json", {"status": status, "result": result})
    return 3 if cfg.partial else 0


def load_config(path: str | None) -> dict:
    if path is None:
        return copy.deepcopy(DEFAULTS)
    with open(path, "rb") as fh:
        user = tomli.load(fh)
    return _merge(DEFAULTS, user)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fqhlab", description=__doc__.split("\n\n")[0])
    ap.add_argument("subcommand", nargs="?", choices=SUBCOMMANDS)
    ap.add_argument("--config", help="TOML file; missing keys take the defaults")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--seed", type=int, default=0, help="seed for iterative-solver start vectors")
    ap.add_argument("--print-defaults", action="store_true", help="print the default config and exit")
    ap.add_argument("--version", action="version", version=f"fqhlab {__version__}")
    return ap


def _config_error(out: Path, msg: str) -> int:
    print(f"invalid configuration: {msg}", file=sys.stderr)
    try:
        _atomic_write(out / "error.json", json.dumps(
            {"version": __version__, "status": "error", "kind": "config", "message": msg},
            indent=2, sort_keys=True) + "\n")
    except OSError:
        pass
    return 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.print_defaults:
        sys.stdout.write(tomli_w.dumps(DEFAULTS))
        return 0
    out = Path(args.out)
    if args.subcommand is None:
        return _config_error(out, "a subcommand is required")
    try:
        tables = load_config(args.config)
        cfg = validate(RunConfig(args.subcommand, tables, out, args.threads, args.seed))
    except (OSError, tomli.TOMLDecodeError, ConfigError) as exc:
        return _config_error(out, str(exc))
    try:
        return run(cfg)
    except ValueError as exc:  # inconsistent settings only caught by the solvers
        return _config_error(out, str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
