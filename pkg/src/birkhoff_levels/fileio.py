"""JSON loaders and writers for system, observable, measure, schedule and word files.

All structured files are JSON objects. Word files are plain text: one digit
per symbol when the alphabet has at most ten symbols, space-separated
integers otherwise.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .gluer import GluingSchedule
from .measures import AnyMeasure, measure_from_dict, measure_to_dict
from .observables import Observable, observable_from_dict, observable_to_dict
from .suspension import check_roof
from .systems import SymbolicSystem, system_to_dict, validate_system


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def digest(path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


def load_system(path) -> SymbolicSystem:
    return validate_system(read_json(path))


def save_system(path, system: SymbolicSystem) -> None:
    write_json(path, system_to_dict(system))


def load_observable(system: SymbolicSystem, path) -> Observable:
    return observable_from_dict(system, read_json(path))


def load_roof(system: SymbolicSystem, path) -> Observable:
    return check_roof(load_observable(system, path))


def save_observable(path, f: Observable) -> None:
    write_json(path, observable_to_dict(f))


def load_measure(path) -> AnyMeasure:
    return measure_from_dict(read_json(path))


def save_measure(path, m: AnyMeasure) -> None:
    write_json(path, measure_to_dict(m))


def load_schedule(path) -> dict:
    """Schedule file fields: ``targets`` (measure file paths, relative to the
    schedule file), ``growth_ratio``, ``seed``, ``N`` and optionally explicit
    ``block_lengths`` with ``assignment``.

    Returns the raw fields with ``targets`` replaced by loaded measures.
    """
    raw = read_json(path)
    base = Path(path).parent
    try:
        targets = [load_measure(base / t) for t in raw["targets"]]
        out = {
            "targets": targets,
            "target_files": list(raw["targets"]),
            "growth_ratio": Fraction(str(raw.get("growth_ratio", 4))),
            "seed": int(raw.get("seed", 0)),
            "N": int(raw["N"]),
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad schedule file {path}: {exc}") from exc
    if not targets:
        raise InvalidInput("schedule needs at least one target")
    if "block_lengths" in raw:
        lengths = raw["block_lengths"]
        assignment = raw.get("assignment", [k % len(targets) for k in range(len(lengths))])
        out["schedule"] = GluingSchedule(
            tuple(targets), tuple(lengths), tuple(assignment), out["growth_ratio"], out["seed"]
        )
    return out


def save_schedule(path, schedule: GluingSchedule, target_files, total_length: int) -> None:
    write_json(
        path,
        {
            "targets": list(target_files),
            "growth_ratio": str(schedule.growth_ratio),
            "seed": schedule.seed,
            "N": int(total_length),
            "block_lengths": list(schedule.block_lengths),
            "assignment": list(schedule.assignment),
        },
    )


def load_word(path) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8").strip()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    if not text:
        return np.zeros(0, dtype=np.int64)
    if " " in text or "," in text or "\n" in text:
        try:
            return np.array([int(t) for t in text.replace(",", " ").split()], dtype=np.int64)
        except ValueError as exc:
            raise InvalidInput(f"bad word file {path}") from exc
    arr = np.frombuffer(text.encode("ascii", errors="replace"), dtype=np.uint8).astype(np.int64) - ord("0")
    if arr.min() < 0 or arr.max() > 9:
        raise InvalidInput(f"bad word file {path}")
    return arr


def save_word(path, w) -> None:
    arr = np.asarray(w, dtype=np.int64)
    if arr.size and arr.max() >= 10:
        text = " ".join(map(str, arr.tolist()))
    else:
        text = (arr.astype(np.uint8) + ord("0")).tobytes().decode("ascii")
    Path(path).write_text(text + "\n", encoding="utf-8")
