"""Command-line interface: ``bsdim <command> --system spec.json [options]``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 failed
verification. Reports go to ``--output`` (written atomically) or stdout; on
error a JSON error report is still written to ``--output`` when one is given.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import io as bio
from .caratheodory import (
    SetSpec,
    build_tree,
    capacity_sum,
    cover_sum,
    critical_exponent,
    pack_sum,
)
from .errors import BSDimError, NumericalError, ValidationError
from .shift_space import Potential, Sft
from .thermo import (
    bowen_root_report,
    equilibrium_markov,
    pressure_curve,
    restrict_system,
)
from .variational import maximize_ratio, random_measure_certificate
from .verify import run_suite
from .weighted_frostman import frostman_measure, weighted_cover_value

COMMANDS = ("dim", "pressure-curve", "cover", "pack", "capacity", "weighted", "frostman", "variational", "verify")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_VERIFY = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    command: str
    system_path: str
    set_path: str | None
    depth: int
    min_depth: int
    alpha: float | None
    tol: float
    seed: int
    output: str | None
    format: str
    s_min: float = 0.0
    s_max: float = 1.0
    s_step: float = 0.1
    draws: int = 500
    level: int | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if self.depth < 1:
            raise ValidationError(f"--depth must be >= 1, got {self.depth}")
        if not 1 <= self.min_depth <= self.depth:
            raise ValidationError(f"--min-depth must lie in [1, {self.depth}], got {self.min_depth}")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ValidationError(f"--tol must be > 0, got {self.tol}")
        if self.format == "csv" and self.command != "pressure-curve":
            raise ValidationError("csv output is only available for pressure-curve")
        if self.command in ("cover", "pack", "capacity", "weighted", "frostman") and self.alpha is None:
            raise ValidationError(f"{self.command} needs --alpha/--s")
        if self.command == "pressure-curve" and not (self.s_step > 0 and self.s_max >= self.s_min):
            raise ValidationError("pressure-curve needs --s-step > 0 and --s-max >= --s-min")
        if self.draws < 1:
            raise ValidationError(f"--draws must be >= 1, got {self.draws}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bsdim", description="BS dimensions, pressure and variational certificates for SFTs.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--system", required=True, help="system spec JSON")
    p.add_argument("--set", dest="set_path", help="set spec JSON (default: the whole shift)")
    p.add_argument("--depth", type=int, default=12, help="tree depth D (default 12)")
    p.add_argument("--min-depth", type=int, help="window start N (default max(1, D // 2))")
    p.add_argument("--alpha", "--s", dest="alpha", type=float, help="exponent for single-value commands")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--s-min", type=float, default=0.0, help="pressure-curve grid start")
    p.add_argument("--s-max", type=float, default=1.0, help="pressure-curve grid end")
    p.add_argument("--s-step", type=float, default=0.1, help="pressure-curve grid step")
    p.add_argument("--draws", type=int, default=500, help="random measures for variational")
    p.add_argument("--level", type=int, help="capacity depth (default D)")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    n = args.min_depth if args.min_depth is not None else max(1, args.depth // 2)
    return RunConfig(
        args.command, args.system, args.set_path, args.depth, n, args.alpha, args.tol, args.seed,
        args.output, args.format, args.s_min, args.s_max, args.s_step, args.draws, args.level,
    )


def grid(s_min: float, s_max: float, step: float) -> list[float]:
    count = int(math.floor((s_max - s_min) / step + 1e-9)) + 1
    return [round(s_min + i * step, 12) for i in range(count)]


def _thermo_system(sft: Sft, u: Potential, z: SetSpec | None) -> tuple[Sft, Potential]:
    if z is not None and z.sub_adjacency is not None:
        sub, usub, _ = restrict_system(sft, u, z.sub_adjacency)
        return sub, usub
    return sft, u


def _dim(cfg: RunConfig, sft, u, z) -> dict:
    tree = build_tree(sft, z, cfg.depth)
    tsft, tu = _thermo_system(sft, u, z)
    root = bowen_root_report(tsft, tu, cfg.tol)
    opt = maximize_ratio(tsft, tu, cfg.tol)
    n, D = cfg.min_depth, cfg.depth
    cover = critical_exponent("cover", tree, u, n, cfg.tol)
    pack = critical_exponent("pack", tree, u, n, cfg.tol)
    weighted = critical_exponent("weighted", tree, u, n, cfg.tol)
    capacity = critical_exponent("capacity", tree, u, n, cfg.tol, depth=D)
    return {
        "depth": D,
        "min_depth": n,
        "bowen_root": root.s_star,
        "pressure_at_root": root.pressure_at_root,
        "cover_exponent": cover,
        "pack_exponent": pack,
        "capacity_exponent": capacity,
        "weighted_exponent": weighted,
        "variational_optimum": opt.ratio,
        "checks": {
            "cover<=pack": cover <= pack + cfg.tol,
            "weighted==cover": abs(weighted - cover) <= 10 * cfg.tol,
            "variational==root": opt.gap <= 1e-6,
        },
    }


def execute(cfg: RunConfig) -> tuple[int, str]:
    """Run one command; returns the exit code and the report text."""
    cfg.validate()
    sft, u = bio.load_system(cfg.system_path)
    z = bio.load_set(cfg.set_path) if cfg.set_path else None
    if z is not None:
        z.validate(sft, cfg.depth)
    code = EXIT_OK
    cmd = cfg.command
    if cmd == "dim":
        report = _dim(cfg, sft, u, z)
    elif cmd == "pressure-curve":
        tsft, tu = _thermo_system(sft, u, z)
        curve = pressure_curve(tsft, tu, grid(cfg.s_min, cfg.s_max, cfg.s_step), cfg.tol)
        if cfg.format == "csv":
            return code, bio.pressure_curve_csv(curve)
        report = bio.pressure_curve_json(curve)
    elif cmd in ("cover", "pack"):
        tree = build_tree(sft, z, cfg.depth)
        fn = cover_sum if cmd == "cover" else pack_sum
        report = fn(tree, u, cfg.alpha, cfg.min_depth).to_json()
    elif cmd == "capacity":
        tree = build_tree(sft, z, cfg.depth)
        report = capacity_sum(tree, u, cfg.alpha, cfg.level or cfg.depth).to_json()
    elif cmd == "weighted":
        tree = build_tree(sft, z, cfg.depth)
        report = weighted_cover_value(tree, u, cfg.alpha, cfg.min_depth).to_json()
    elif cmd == "frostman":
        tree = build_tree(sft, z, cfg.depth)
        report = frostman_measure(tree, u, cfg.alpha, cfg.min_depth).to_json()
    elif cmd == "variational":
        tsft, tu = _thermo_system(sft, u, z)
        root = bowen_root_report(tsft, tu, cfg.tol)
        opt = maximize_ratio(tsft, tu, cfg.tol)
        cert = random_measure_certificate(tsft, tu, cfg.draws, cfg.seed, s_star=root.s_star)
        report = {
            "s_star": root.s_star,
            "pressure_at_root": root.pressure_at_root,
            "iterations": root.iterations,
            "equilibrium": equilibrium_markov(tsft, tu, root.s_star).to_json(),
            "optimum": opt.to_json(),
            "certificate": cert.to_json(),
        }
    else:
        result = run_suite(sft, u, cfg.depth, cfg.seed, z, cfg.min_depth, cfg.tol)
        report = result.to_json()
        if not result.passed:
            code = EXIT_VERIFY
    return code, bio.dumps_json(_plain(report))


def _plain(obj):
    """Convert numpy scalars and tuples so the report serializes identically everywhere."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _emit(cfg_output: str | None, text: str) -> None:
    if cfg_output:
        bio.atomic_write(cfg_output, text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    try:
        code, text = execute(cfg)
    except BSDimError as exc:
        code = EXIT_NUMERICAL if isinstance(exc, NumericalError) else EXIT_INVALID
        name = type(exc).__name__
        print(f"bsdim: {name}: {exc}", file=sys.stderr)
        if cfg.output:
            bio.write_json(cfg.output, {"error": name, "message": str(exc), "exit_code": code})
        return code
    if code == EXIT_VERIFY:
        failed = [c["name"] for c in json.loads(text)["checks"] if c["verdict"] == "fail"]
        print(f"bsdim: verification failed: {', '.join(failed)}", file=sys.stderr)
    _emit(cfg.output, text)
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
