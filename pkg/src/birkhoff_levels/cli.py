"""Command-line entry point.

Every subcommand writes CSV (to ``--out`` or stdout) and, with ``--record``,
a JSON run record holding input digests, parameters and results. Exit
status: 0 on success (an empty level set is a result), 2 on invalid input,
3 when a numerical routine fails to converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import fileio
from .errors import Infeasible, InvalidInput, NumericalError
from .gluer import glue_orbit, plan_schedule, verify_oscillation
from .observables import Observable
from .oracle import Window, count_level_words, count_words, log_weighted_count
from .spectra import SpectrumResult, level_value, reg_irreg_value, spectrum_curve
from .suspension import suspension_level_value
from .thermo import average_range, pressure

EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def fmt(x) -> str:
    """12 significant digits for reals, decimal strings for ints and fractions."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, (Fraction, str)):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"not a rational number: {text!r}") from exc


def _grid(text: str) -> list[Fraction]:
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidInput("grid must be start:stop:step")
    start, stop, step = (_rational(p) for p in parts)
    if step <= 0 or stop < start:
        raise InvalidInput("grid needs step > 0 and stop >= start")
    count = int((stop - start) / step) + 1
    return [start + k * step for k in range(count)]


class Run:
    """Collects inputs and results for the run record."""

    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}
        self.results: list[dict] = []
        self.header: list[str] = []
        self.seed: int | None = None

    def load(self, key: str, path: str):
        self.inputs[key] = fileio.digest(path)
        return path

    def system(self):
        return fileio.load_system(self.load("system", self.args.system))

    def observable(self, system, path: str, key: str) -> Observable:
        return fileio.load_observable(system, self.load(key, path))

    def emit(self, header: list[str], rows: list[dict]) -> None:
        self.header = header
        self.results = rows


def _level_rows(res: SpectrumResult, extra: dict) -> list[dict]:
    row = dict(extra)
    row["empty"] = res.empty
    row["value"] = res.value
    row["value_c"], row["value_d"] = res.endpoint_values
    qs = [";".join(fmt(q) for q in cert.q) for cert in res.certificates]
    row["q_c"] = qs[0] if qs else ""
    row["q_d"] = qs[-1] if qs else ""
    row["reason"] = res.reason
    return [row]


LEVEL_HEADER = ["c", "d", "empty", "value", "value_c", "value_d", "q_c", "q_d", "reason"]


def cmd_level(run: Run) -> None:
    a = run.args
    system = run.system()
    phi = run.observable(system, a.obs, "obs")
    pot = run.observable(system, a.potential, "potential") if a.potential else None
    pins = []
    for k, spec in enumerate(a.pin or []):
        path, _, value = spec.rpartition("=")
        if not path:
            raise InvalidInput("--pin expects FILE=VALUE")
        pins.append((run.observable(system, path, f"pin{k}"), _rational(value)))
    c, d = _rational(a.c), _rational(a.d)
    if c > d:
        raise InvalidInput("need c <= d")
    res = level_value(system, phi, c, d, pot, pins)
    run.emit(LEVEL_HEADER, _level_rows(res, {"c": c, "d": d}))


def cmd_joint(run: Run) -> None:
    if not run.args.pin:
        raise InvalidInput("joint needs at least one --pin FILE=VALUE")
    cmd_level(run)


def cmd_spectrum(run: Run) -> None:
    a = run.args
    system = run.system()
    phi = run.observable(system, a.obs, "obs")
    pot = run.observable(system, a.potential, "potential") if a.potential else None
    rows = []
    for alpha in _grid(a.grid):
        try:
            p = spectrum_curve(system, phi, [alpha], pot)[0]
            rows.append({"alpha": float(alpha), "value": p.value, "q_star": p.q, "converged": p.converged})
        except Infeasible:
            rows.append({"alpha": float(alpha), "value": float("nan"), "q_star": float("nan"), "converged": False})
    run.emit(["alpha", "value", "q_star", "converged"], rows)


def cmd_regirr(run: Run) -> None:
    a = run.args
    system = run.system()
    phi1 = run.observable(system, a.obs1, "obs1")
    phi2 = run.observable(system, a.obs2, "obs2")
    pot = run.observable(system, a.potential, "potential") if a.potential else None
    aval = _rational(a.a) if a.a is not None else None
    res = reg_irreg_value(system, phi1, phi2, pot, aval)
    run.emit(["a", "empty", "value", "reason"], [{"a": aval, "empty": res.empty, "value": res.value, "reason": res.reason}])


def cmd_pressure(run: Run) -> None:
    system = run.system()
    pot = run.observable(system, run.args.potential, "potential")
    run.emit(["pressure"], [{"pressure": pressure(system, pot)}])


def cmd_range(run: Run) -> None:
    system = run.system()
    phi = run.observable(system, run.args.obs, "obs")
    r = average_range(system, phi)
    row = {"lo": r.lo, "hi": r.hi, "lo_float": float(r.lo), "hi_float": float(r.hi)}
    run.emit(list(row), [row])


def cmd_suspend(run: Run) -> None:
    a = run.args
    system = run.system()
    phi = run.observable(system, a.obs, "obs")
    run.load("roof", a.roof)
    roof = fileio.load_roof(system, a.roof)
    c, d = _rational(a.c), _rational(a.d)
    res = suspension_level_value(system, phi, roof, c, d)
    row = {"c": c, "d": d, "empty": res.empty, "value": res.value, "reason": res.reason}
    run.emit(["c", "d", "empty", "value", "reason"], [row])


def cmd_count(run: Run) -> None:
    a = run.args
    system = run.system()
    if a.n < 1:
        raise InvalidInput("n must be positive")
    if a.obs is None:
        count = count_words(system, a.n)
        run.emit(["n", "count", "growth"], [{"n": a.n, "count": count, "growth": math.log(count) / a.n}])
        return
    phi = run.observable(system, a.obs, "obs")
    lo, hi = _rational(a.lo), _rational(a.hi)
    if a.potential:
        pot = run.observable(system, a.potential, "potential")
        lw = log_weighted_count(system, [phi], [Window(0, lo, hi)], a.n, pot)
        run.emit(["n", "log_weighted_count", "growth"], [{"n": a.n, "log_weighted_count": lw, "growth": lw / a.n}])
        return
    count = count_level_words(system, phi, lo, hi, a.n)
    growth = math.log(count) / a.n if count else float("-inf")
    run.emit(["n", "lo", "hi", "count", "growth"], [{"n": a.n, "lo": lo, "hi": hi, "count": count, "growth": growth}])


def cmd_glue(run: Run) -> None:
    a = run.args
    system = run.system()
    sched = fileio.load_schedule(run.load("schedule", a.schedule))
    n = a.length if a.length is not None else sched["N"]
    schedule = sched.get("schedule")
    if schedule is None:
        if not a.obs:
            raise InvalidInput("schedule has no block_lengths; pass --obs to plan them")
        phi = run.observable(system, a.obs, "obs")
        schedule = plan_schedule(sched["targets"], phi, n, a.tol, sched["growth_ratio"], seed=sched["seed"])
    run.seed = schedule.seed
    w = glue_orbit(system, schedule, n)
    if a.word_out:
        fileio.save_word(a.word_out, w)
    if a.schedule_out:
        base = Path(a.schedule).parent
        files = [str((base / t).resolve()) for t in sched["target_files"]]
        fileio.save_schedule(a.schedule_out, schedule, files, n)
    row = {"length": int(w.size), "blocks": len(schedule.block_lengths), "seed": schedule.seed}
    run.emit(["length", "blocks", "seed"], [row])


def cmd_verify(run: Run) -> None:
    a = run.args
    system = run.system()
    phi = run.observable(system, a.obs, "obs")
    w = fileio.load_word(run.load("word", a.word))
    rep = verify_oscillation(w, phi, _rational(a.c), _rational(a.d), a.tol)
    row = {
        "c": _rational(a.c),
        "d": _rational(a.d),
        "tol": a.tol,
        "liminf_estimate": rep.liminf_estimate,
        "limsup_estimate": rep.limsup_estimate,
        "passed": rep.passed,
    }
    run.emit(list(row), [row])


COMMANDS = {
    "spectrum": cmd_spectrum,
    "level": cmd_level,
    "joint": cmd_joint,
    "regirr": cmd_regirr,
    "pressure": cmd_pressure,
    "suspend": cmd_suspend,
    "glue": cmd_glue,
    "verify": cmd_verify,
    "count": cmd_count,
    "range": cmd_range,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="birkhoff-levels", description="Entropy and pressure of Birkhoff level sets on symbolic systems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--system", required=True, help="system JSON file")
        sp.add_argument("--out", help="CSV output path (default stdout)")
        sp.add_argument("--record", help="write a JSON run record here")
        sp.add_argument("--wall-time", action="store_true", help="include wall time in the run record")
        return sp

    sp = common(sub.add_parser("spectrum", help="alpha -> constrained value on a grid"))
    sp.add_argument("--obs", required=True)
    sp.add_argument("--grid", required=True, help="start:stop:step (rationals allowed)")
    sp.add_argument("--potential")

    for name in ("level", "joint"):
        sp = common(sub.add_parser(name, help="pressure of the level set X_phi(c, d)"))
        sp.add_argument("--obs", required=True)
        sp.add_argument("--c", required=True)
        sp.add_argument("--d", required=True)
        sp.add_argument("--potential")
        sp.add_argument("--pin", action="append", help="FILE=VALUE pinning another average (repeatable)")

    sp = common(sub.add_parser("regirr", help="phi1-regular and phi2-irregular points"))
    sp.add_argument("--obs1", required=True)
    sp.add_argument("--obs2", required=True)
    sp.add_argument("--a")
    sp.add_argument("--potential")

    sp = common(sub.add_parser("pressure", help="topological pressure"))
    sp.add_argument("--potential", required=True)

    sp = common(sub.add_parser("range", help="achievable averages of an observable"))
    sp.add_argument("--obs", required=True)

    sp = common(sub.add_parser("suspend", help="flow entropy of a suspension level set"))
    sp.add_argument("--obs", required=True)
    sp.add_argument("--roof", required=True)
    sp.add_argument("--c", required=True)
    sp.add_argument("--d", required=True)

    sp = common(sub.add_parser("count", help="exact word counts"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--obs")
    sp.add_argument("--lo", default="0")
    sp.add_argument("--hi", default="0")
    sp.add_argument("--potential")

    sp = common(sub.add_parser("glue", help="build an oscillating orbit word"))
    sp.add_argument("--schedule", required=True)
    sp.add_argument("--obs", help="observable used to plan block lengths")
    sp.add_argument("--tol", type=float, default=0.01)
    sp.add_argument("--length", type=int, help="override N from the schedule")
    sp.add_argument("--word-out", help="write the word here")
    sp.add_argument("--schedule-out", help="write the planned schedule here")

    sp = common(sub.add_parser("verify", help="check liminf/limsup of a word"))
    sp.add_argument("--word", required=True)
    sp.add_argument("--obs", required=True)
    sp.add_argument("--c", required=True)
    sp.add_argument("--d", required=True)
    sp.add_argument("--tol", type=float, default=0.01)
    return p


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(row.get(h)) for h in header])
    return buf.getvalue()


def _params(args) -> dict:
    skip = {"out", "record", "wall_time", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    run = Run(args)
    start = time.perf_counter()
    try:
        COMMANDS[args.command](run)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Infeasible as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = _csv_text(run.header, run.results)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.record:
        record = {
            "command": args.command,
            "inputs": run.inputs,
            "parameters": _params(args),
            "results": [{h: fmt(r.get(h)) for h in run.header} for r in run.results],
            "seed": run.seed,
        }
        if args.wall_time:
            record["wall_time_s"] = time.perf_counter() - start
        fileio.write_json(args.record, record)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
