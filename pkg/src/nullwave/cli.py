"""Command-line front end.

    nullwave verify   --config c.json [--out report.csv] [--format csv|json]
    nullwave classify --config c.json [--out verdict.json]
    nullwave generate --config c.json [--out field.csv] [--format csv|json]

The config is a JSON object:

    {
      "schema": 1,
      "input": "q" | {"kerr": {...}} | {"surface": {...}},
      "grid": {"t": [min, max, n], "x1": [...], "x2": [...], "x3": [...]},
      "scheme": "auto" | "analytic" | "fd",
      "h": 1e-4,
      "tolerances": {"null_solution": 1e-6, "sfr": 1e-5},
      "point": [t, x1, x2, x3],          # classify only
      "direction": [t, x1, x2, x3],      # classify only
      "seed": [re, im] | [[re, im], [re, im]],
      "out": "path", "format": "csv" | "json"
    }

Exit codes: 0 pass, 2 parse/config error, 3 verdict failure, 4 numeric
failure.  Reports are byte-identical across runs and worker counts; the
NULLWAVE_THREADS environment variable caps the worker pool.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dfield
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    ConfigError,
    DegenerateConstantRatio,
    NotNull,
    NotSFR,
    NullwaveError,
    ZeroGradient,
    ZeroVector,
)
from .fields import Box, ScalarField, Scheme
from .kerr import MeromorphicTriple, kerr_field
from .registry import get_builtin
from .report import GridSpec, Report, worker_count
from .sfr import (
    DEFAULT_SFR_TOL_FD,
    NULL_SOLUTION_TOL,
    classify_kernel_direction,
    verify_theorem2,
)
from .spinor import MinkVec
from .twistor import TwistorSurface, surface_field

EXIT_PASS = 0
EXIT_PARSE = 2
EXIT_VERDICT = 3
EXIT_NUMERIC = 4

GENERATE_PASS_FRACTION = 0.95


@dataclass
class RunConfig:
    input: object
    grid: Optional[GridSpec] = None
    scheme: str = "auto"
    h: Optional[float] = None
    tolerances: dict = dfield(default_factory=dict)
    out: Optional[str] = None
    format: str = "csv"
    point: Optional[MinkVec] = None
    direction: Optional[MinkVec] = None
    seed: object = None
    workers: Optional[int] = None

    def scheme_obj(self) -> Scheme:
        kind = {"auto": "auto", "analytic": "analytic", "fd": "central"}.get(self.scheme)
        if kind is None:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        return Scheme(kind, self.h)

    def tol(self, name: str, default: float) -> float:
        value = float(self.tolerances.get(name, default))
        if value <= 0.0:
            raise ConfigError(f"tolerance {name!r} must be positive")
        return value


def load_config(path: str) -> RunConfig:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    if "input" not in obj:
        raise ConfigError("config needs an 'input' field")
    cfg = RunConfig(input=obj["input"])
    if "grid" in obj:
        cfg.grid = GridSpec.from_json(obj["grid"])
    cfg.scheme = obj.get("scheme", "auto")
    if "h" in obj and obj["h"] is not None:
        cfg.h = float(obj["h"])
        if cfg.h <= 0.0:
            raise ConfigError("h must be positive")
    tolerances = obj.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("'tolerances' must be an object")
    cfg.tolerances = tolerances
    cfg.out = obj.get("out")
    cfg.format = obj.get("format", "csv")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    for key in ("point", "direction"):
        if key in obj:
            value = obj[key]
            if not isinstance(value, (list, tuple)) or len(value) != 4:
                raise ConfigError(f"{key!r} must be a list of four numbers")
            setattr(cfg, key, MinkVec.of(value))
    cfg.seed = obj.get("seed")
    if "workers" in obj:
        cfg.workers = int(obj["workers"])
    return cfg


def _complex_from_json(value, what: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"{what} must be a number or an [re, im] pair")


def _grid_box(grid: GridSpec, pad_fraction: float = 0.5) -> Box:
    lo, hi = [], []
    for a, (axis_lo, axis_hi, _) in enumerate(grid.axes):
        pad = max(0.1, pad_fraction * (axis_hi - axis_lo))
        lo.append(axis_lo - pad)
        hi.append(axis_hi + pad)
    return Box(tuple(lo), tuple(hi))


@dataclass
class ResolvedInput:
    field: Optional[ScalarField]
    grid: GridSpec
    kind: str  # "builtin" | "kerr" | "surface"
    triple: Optional[MeromorphicTriple] = None
    surface: Optional[TwistorSurface] = None
    seed: object = None
    label: str = ""


def resolve_input(cfg: RunConfig) -> ResolvedInput:
    spec = cfg.input
    if isinstance(spec, str):
        try:
            b = get_builtin(spec)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        grid = cfg.grid if cfg.grid is not None else b.default_grid
        kind = "builtin"
        triple = surface = None
        seed = None
        if spec == "kerr-basic":
            from .registry import KERR_BASIC_SEED, kerr_basic_triple

            kind, triple, seed = "kerr", kerr_basic_triple(), KERR_BASIC_SEED
        elif spec == "surface-basic":
            from .registry import SURFACE_BASIC_SEED, surface_basic_surface

            kind, surface, seed = "surface", surface_basic_surface(), SURFACE_BASIC_SEED
        return ResolvedInput(b.field, grid, kind, triple, surface, seed, b.name)
    if not isinstance(spec, dict):
        raise ConfigError("'input' must be a builtin name or an object")
    if cfg.grid is None:
        raise ConfigError("custom inputs need an explicit 'grid'")
    if "kerr" in spec:
        try:
            triple = MeromorphicTriple.from_json(spec["kerr"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad kerr spec: {exc}") from exc
        seed = _complex_from_json(cfg.seed, "seed") if cfg.seed is not None else 0j
        f = kerr_field(triple, "kerr", _grid_box(cfg.grid), seed)
        return ResolvedInput(f, cfg.grid, "kerr", triple=triple, seed=seed, label="kerr")
    if "surface" in spec:
        try:
            surface = TwistorSurface.from_json(spec["surface"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad surface spec: {exc}") from exc
        seed = None
        if cfg.seed is not None:
            if not isinstance(cfg.seed, (list, tuple)) or len(cfg.seed) != 2:
                raise ConfigError("surface seed must be [z, w]")
            seed = (
                _complex_from_json(cfg.seed[0], "seed z"),
                _complex_from_json(cfg.seed[1], "seed w"),
            )
        f = surface_field(surface, "surface", _grid_box(cfg.grid), seed)
        return ResolvedInput(f, cfg.grid, "surface", surface=surface, seed=seed,
                             label="surface")
    raise ConfigError("input object must contain 'kerr' or 'surface'")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_verify(cfg: RunConfig) -> int:
    resolved = resolve_input(cfg)
    if cfg.scheme == "fd" and resolved.grid.min_count() < 3:
        raise ConfigError("finite-difference runs need grid counts >= 3 per axis")
    report = verify_theorem2(
        resolved.field,
        resolved.grid,
        scheme=cfg.scheme_obj(),
        null_solution_tol=cfg.tol("null_solution", NULL_SOLUTION_TOL),
        sfr_tol=cfg.tol("sfr", DEFAULT_SFR_TOL_FD),
        workers=cfg.workers,
    )
    _emit(report.render(cfg.format), cfg.out)
    return EXIT_PASS if report.verdicts.get("overall") else EXIT_VERDICT


def cmd_classify(cfg: RunConfig) -> int:
    resolved = resolve_input(cfg)
    if cfg.point is None or cfg.direction is None:
        raise ConfigError("classify needs 'point' and 'direction'")
    result = classify_kernel_direction(
        resolved.field, cfg.point, cfg.direction, scheme=cfg.scheme_obj()
    )
    payload = {
        "schema": 1,
        "input": resolved.label,
        "point": list(cfg.point.as_tuple()),
        "direction": list(cfg.direction.as_tuple()),
        "branch": result.branch.value,
        "kernel_residual": result.kernel_residual,
        "xi_mismatch": None if np.isinf(result.xi_mismatch) else result.xi_mismatch,
        "eta_mismatch": None if np.isinf(result.eta_mismatch) else result.eta_mismatch,
        "factor": None
        if result.factor is None
        else [result.factor.real, result.factor.imag],
    }
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", cfg.out)
    return EXIT_PASS


GENERATE_COLUMNS = (
    ["t", "x1", "x2", "x3", "flag", "z_re", "z_im"]
    + [f"dz_d{a}_{p}" for a in ("t", "x1", "x2", "x3") for p in ("re", "im")]
    + ["semiconformality", "wave"]
)


def cmd_generate(cfg: RunConfig) -> int:
    resolved = resolve_input(cfg)
    if resolved.kind not in ("kerr", "surface"):
        raise ConfigError("generate needs a kerr or surface input")
    scheme = cfg.scheme_obj()
    tol = cfg.tol("null_solution", NULL_SOLUTION_TOL)
    f = resolved.field
    from .fields import semiconformality_residual, wave_residual
    from .report import ordered_map

    def record(x: MinkVec) -> dict:
        row: dict = {"t": x.t, "x1": x.x1, "x2": x.x2, "x3": x.x3, "flag": ""}
        try:
            z = f.evaluate(x)
            grad = np.asarray(f.analytic_gradient(x), dtype=complex)
            row["z_re"], row["z_im"] = z.real, z.imag
            for a, name in enumerate(("t", "x1", "x2", "x3")):
                row[f"dz_d{name}_re"] = grad[a].real
                row[f"dz_d{name}_im"] = grad[a].imag
            row["semiconformality"] = abs(semiconformality_residual(f, x, scheme))
            row["wave"] = abs(wave_residual(f, x, scheme))
        except NullwaveError as exc:
            row["flag"] = f"singular:{type(exc).__name__}"
        return row

    rows = ordered_map(record, resolved.grid.points(), worker_count(cfg.workers))
    report = Report(
        command="generate",
        label=resolved.label,
        columns=list(GENERATE_COLUMNS),
        rows=rows,
        meta={"grid": resolved.grid.to_json(), "scheme": cfg.scheme,
              "tolerances": {"null_solution": tol}},
    )
    clean = [r for r in rows if not r["flag"]]
    passing = [
        r
        for r in clean
        if r["semiconformality"] <= tol and r["wave"] <= tol
    ]
    fraction = (len(passing) / len(clean)) if clean else 0.0
    report.verdicts = {
        "points": len(rows),
        "singular": len(rows) - len(clean),
        "passing_fraction": fraction,
        "overall": bool(clean) and fraction >= GENERATE_PASS_FRACTION,
    }
    _emit(report.render(cfg.format), cfg.out)
    if not clean:
        return EXIT_NUMERIC
    return EXIT_PASS if report.verdicts["overall"] else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nullwave",
        description="Verify, classify and generate null wave-equation solutions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify", "run the null-solution and shear-free verification suite"),
        ("classify", "classify a null direction against the gradient kernel"),
        ("generate", "sample a generated solution over a grid"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a JSON run config")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--h", type=float, default=None, help="difference step")
        p.add_argument("--tol", type=float, default=None,
                       help="override verdict tolerances")
        p.add_argument("--scheme", choices=("auto", "analytic", "fd"), default=None)
        p.add_argument("--workers", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg.out = args.out
        if args.format is not None:
            cfg.format = args.format
        if args.h is not None:
            if args.h <= 0.0:
                raise ConfigError("h must be positive")
            cfg.h = args.h
        if args.scheme is not None:
            cfg.scheme = args.scheme
        if args.workers is not None:
            cfg.workers = args.workers
        if args.tol is not None:
            if args.tol <= 0.0:
                raise ConfigError("tol must be positive")
            cfg.tolerances = dict(cfg.tolerances)
            cfg.tolerances["sfr"] = args.tol
            cfg.tolerances["null_solution"] = args.tol
        handler = {"verify": cmd_verify, "classify": cmd_classify,
                   "generate": cmd_generate}[args.command]
        return handler(cfg)
    except ConfigError as exc:
        print(f"nullwave: config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NotNull, ZeroVector, ZeroGradient, NotSFR, DegenerateConstantRatio) as exc:
        print(f"nullwave: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except NullwaveError as exc:
        print(f"nullwave: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
