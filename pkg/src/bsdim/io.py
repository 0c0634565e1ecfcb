"""Readers and writers for system specs, set specs and reports.

Reports are written atomically: the payload goes to a temporary file in the
target directory, which is then renamed over the destination.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any

from .caratheodory import SetSpec
from .errors import ValidationError
from .shift_space import Potential, Sft, validate_sft
from .thermo import PressureCurve


def _read_json(path: str | os.PathLike) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def system_from_json(data: dict) -> tuple[Sft, Potential]:
    """``{"alphabet": L, "adjacency": [[...]], "potential": {"depth": k, "table": {...}}}``."""
    if not isinstance(data, dict):
        raise ValidationError("system spec must be a JSON object")
    for key in ("alphabet", "adjacency"):
        if key not in data:
            raise ValidationError(f"system spec misses {key!r}")
    L = data["alphabet"]
    if isinstance(L, bool) or not isinstance(L, int):
        raise ValidationError(f"alphabet must be an integer, got {L!r}")
    sft = validate_sft(L, data["adjacency"])
    pot = data.get("potential")
    if pot is None:
        return sft, Potential.constant(sft)
    if not isinstance(pot, dict) or "depth" not in pot or "table" not in pot:
        raise ValidationError("potential needs 'depth' and 'table'")
    return sft, Potential.from_table(sft, pot["depth"], pot["table"])


def system_to_json(sft: Sft, u: Potential) -> dict:
    return {
        "alphabet": sft.alphabet_size,
        "adjacency": [list(r) for r in sft.adjacency],
        "potential": u.to_json(),
    }


def load_system(path: str | os.PathLike) -> tuple[Sft, Potential]:
    return system_from_json(_read_json(path))


def load_set(path: str | os.PathLike) -> SetSpec:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ValidationError("set spec must be a JSON object")
    return SetSpec.from_json(data)


def dumps_json(report: Any) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def atomic_write(path: str | os.PathLike, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str | os.PathLike, report: Any) -> None:
    atomic_write(path, dumps_json(report))


def read_report(path: str | os.PathLike) -> Any:
    return _read_json(path)


def pressure_curve_csv(curve: PressureCurve) -> str:
    """Columns ``s, pressure, root``; ``root`` holds the Bowen root on the row
    whose interval ``[s_i, s_{i+1})`` contains it, and is empty elsewhere."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "pressure", "root"])
    for i, (s, p) in enumerate(curve.samples):
        writer.writerow([repr(s), repr(p), repr(curve.root) if i == curve.root_row else ""])
    return buf.getvalue()


def pressure_curve_json(curve: PressureCurve) -> dict:
    return {
        "samples": [{"s": s, "pressure": p} for s, p in curve.samples],
        "root": curve.root,
        "root_row": curve.root_row,
    }


def read_pressure_csv(text: str) -> PressureCurve:
    rows = list(csv.DictReader(io.StringIO(text)))
    samples = [(float(r["s"]), float(r["pressure"])) for r in rows]
    root = root_row = None
    for i, r in enumerate(rows):
        if r.get("root"):
            root, root_row = float(r["root"]), i
    return PressureCurve(samples, root, root_row)


def pressure_curve_from_json(data: dict) -> PressureCurve:
    samples = [(float(d["s"]), float(d["pressure"])) for d in data["samples"]]
    return PressureCurve(samples, data.get("root"), data.get("root_row"))
