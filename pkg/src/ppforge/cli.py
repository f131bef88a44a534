"""Command-line surface: field inspection, grid verification, census output.

Exit codes: 0 when every checked instance agrees with brute force, 1 when
a disagreement is found, 2 on usage or schema errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .agw import NotCommutingError, check_fiber_criterion, wrap_family_instance
from .families import (
    DEFAULT_GRIDS,
    FAMILY_BUILDERS,
    PARAM_ORDER,
    SkippedInstance,
    describe_value,
    instantiate_grid,
)
from .gf import FieldError, FieldSpecError, parse_field_spec
from .oracle import DEFAULT_CAP, FieldTooLargeError, check_iff, format_cycle_type

SCHEMA_VERSION = 1


class SchemaError(Exception):
    """Malformed family spec document."""


@dataclass
class RunReport:
    family_id: str
    field_spec: str
    grid_size: int = 0
    agreements: int = 0
    disagreements: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "family": self.family_id,
            "field": self.field_spec,
            "grid_size": self.grid_size,
            "agreements": self.agreements,
            "disagreements": self.disagreements,
            "skipped": self.skipped,
            "wall_time": self.wall_time,
        }


def _load_spec(arg: str) -> dict:
    text = arg
    if not arg.lstrip().startswith("{"):
        try:
            with open(arg, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SchemaError(f"cannot read spec file: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}")
    if not isinstance(doc, dict):
        raise SchemaError("spec must be a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version}")
    family = doc.get("family")
    if family not in FAMILY_BUILDERS:
        raise SchemaError(f"unknown or missing family {family!r}")
    if "field" not in doc:
        raise SchemaError("missing 'field'")
    params = doc.get("params", DEFAULT_GRIDS[family])
    if not isinstance(params, dict):
        raise SchemaError("'params' must be an object")
    return {"schema_version": SCHEMA_VERSION, "family": family,
            "field": doc["field"], "params": params}


def _resolve_cap(args) -> int:
    if getattr(args, "cap", None):
        return args.cap
    env = os.environ.get("PPFORGE_CAP")
    if env:
        return int(env)
    return DEFAULT_CAP


def _run_items(items, worker, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, items))
    return [worker(item) for item in items]


def _run_grid(spec: dict, cap: int, threads: int, seed: int):
    ctx = parse_field_spec(spec["field"])
    items = list(instantiate_grid(spec["family"], [ctx], spec["params"], seed=seed))

    def worker(item):
        if isinstance(item, SkippedInstance):
            return item, None
        return item, check_iff(item, cap=cap)

    return _run_items(items, worker, threads)


def _report_from_results(spec: dict, results, wall: float) -> RunReport:
    report = RunReport(family_id=spec["family"], field_spec=spec["field"])
    report.grid_size = len(results)
    report.wall_time = wall
    for item, record in results:
        if record is None:
            report.skipped.append(
                {"params": item.describe_params(), "reason": item.reason})
        elif record.agree:
            report.agreements += 1
        else:
            report.disagreements.append(
                {"params": item.describe_params(),
                 "predicted": record.predicted,
                 "observed": record.observed})
    return report


def _write_rows(results, family_id: str, out) -> None:
    names = PARAM_ORDER[family_id]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(names) + ["predicted", "observed", "status", "cycle_type"])
    for item, record in results:
        values = [describe_value(item.params[name]) for name in names]
        if record is None:
            writer.writerow(values + ["", "", f"skipped:{item.reason}", ""])
            continue
        status = "agree" if record.agree else "disagree"
        cycles = ""
        if record.verdict.cycle_type is not None:
            cycles = format_cycle_type(record.verdict.cycle_type)
        writer.writerow(values + [str(record.predicted).lower(),
                                  str(record.observed).lower(), status, cycles])


def _print_report(report: RunReport) -> None:
    print(f"family       {report.family_id}")
    print(f"field        {report.field_spec}")
    print(f"grid size    {report.grid_size}")
    print(f"agreements   {report.agreements}")
    print(f"disagreements {len(report.disagreements)}")
    print(f"skipped      {len(report.skipped)}")
    print(f"wall time    {report.wall_time:.2f}s")
    for dis in report.disagreements:
        print(f"  DISAGREE predicted={dis['predicted']} observed={dis['observed']} {dis['params']}")
    reasons: dict[str, int] = {}
    for sk in report.skipped:
        reasons[sk["reason"]] = reasons.get(sk["reason"], 0) + 1
    for reason, count in reasons.items():
        print(f"  skipped {count} x {reason}")


# ---------------------------------------------------------------------------
# subcommands


def do_field_info(args) -> int:
    ctx = parse_field_spec(args.spec)
    print(f"field          {ctx.label}")
    print(f"p              {ctx.p}")
    print(f"e              {ctx.e}")
    print(f"n              {ctx.n}")
    print(f"q = p^e        {ctx.q}")
    print(f"order q^n      {ctx.order}")
    print(f"modulus        {ctx.modulus}")
    print(f"generator      {ctx.generator}")
    if ctx.p != 2:
        print(f"|D0|           {(ctx.order - 1) // 2}")
    else:
        print("|D0|           - (even characteristic)")
    print(f"base subfield  {' '.join(str(x) for x in ctx.subfield_elements())}")
    return 0


def do_verify(args) -> int:
    spec = _load_spec(args.spec)
    cap = _resolve_cap(args)
    start = time.perf_counter()
    results = _run_grid(spec, cap, args.threads, args.seed)
    report = _report_from_results(spec, results, time.perf_counter() - start)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            _write_rows(results, spec["family"], fh)
    if args.json:
        doc = report.to_dict()
        doc["spec"] = spec
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        _print_report(report)
    return 0 if not report.disagreements else 1


def do_census(args) -> int:
    spec = {"schema_version": SCHEMA_VERSION, "family": args.family,
            "field": args.field, "params": DEFAULT_GRIDS[args.family]}
    if args.params:
        loaded = json.loads(args.params)
        if not isinstance(loaded, dict):
            raise SchemaError("'--params' must be a JSON object")
        spec["params"] = loaded
    cap = _resolve_cap(args)
    start = time.perf_counter()
    results = _run_grid(spec, cap, args.threads, args.seed)
    report = _report_from_results(spec, results, time.perf_counter() - start)
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        _write_rows(results, args.family, fh)
    print(f"wrote {report.grid_size} rows to {args.output} "
          f"({report.agreements} agree, {len(report.disagreements)} disagree, "
          f"{len(report.skipped)} skipped)")
    return 0 if not report.disagreements else 1


def do_agw_check(args) -> int:
    spec = _load_spec(args.spec)
    cap = _resolve_cap(args)
    ctx = parse_field_spec(spec["field"])
    if ctx.order > cap:
        raise FieldTooLargeError(f"field order {ctx.order} exceeds cap {cap}")
    items = list(instantiate_grid(spec["family"], [ctx], spec["params"],
                                  seed=args.seed))

    def worker(item):
        if isinstance(item, SkippedInstance):
            return item, "skipped", item.reason
        try:
            report = check_fiber_criterion(wrap_family_instance(item))
        except NotCommutingError as exc:
            return item, "no_diagram", str(exc)
        return item, ("ok" if report.equivalence_holds else "violated"), report

    results = _run_items(items, worker, args.threads)
    ok = sum(1 for _, status, _ in results if status == "ok")
    skipped = sum(1 for _, status, _ in results if status == "skipped")
    broken = [(item, status, info) for item, status, info in results
              if status in ("violated", "no_diagram")]
    print(f"checked {len(results)} instances: {ok} satisfy the fiber criterion, "
          f"{skipped} skipped, {len(broken)} problems")
    for item, status, info in broken:
        print(f"  {status}: {item.describe_params()} ({info})")
    return 0 if not broken else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppforge",
        description="Construct permutation-polynomial families and verify their "
                    "predicted bijectivity conditions against brute force.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_info = sub.add_parser("field-info", help="describe a finite field")
    p_info.add_argument("spec", help="field spec, e.g. 3^1:2 or 2^2:3:mod=1,1,0,0,1,0,1")
    p_info.set_defaults(func=do_field_info)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=None,
                        help="field-size cap (default 2^20, env PPFORGE_CAP)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0,
                        help="seed for 'random_pp' grid entries")

    p_verify = sub.add_parser("verify", parents=[common],
                              help="run a family grid against brute force")
    p_verify.add_argument("spec", help="family spec JSON (inline or a file path)")
    p_verify.add_argument("--json", action="store_true", help="emit the report as JSON")
    p_verify.add_argument("--csv", metavar="PATH", help="write per-instance rows as CSV")
    p_verify.set_defaults(func=do_verify)

    p_census = sub.add_parser("census", parents=[common],
                              help="tabulate a family grid to CSV")
    p_census.add_argument("family", choices=sorted(FAMILY_BUILDERS))
    p_census.add_argument("field", help="field spec, e.g. 3^1:2")
    p_census.add_argument("-o", "--output", required=True, help="output CSV path")
    p_census.add_argument("--params", help="JSON object overriding the default grid")
    p_census.set_defaults(func=do_census)

    p_agw = sub.add_parser("agw-check", parents=[common],
                           help="audit a family grid through its commuting square")
    p_agw.add_argument("spec", help="family spec JSON (inline or a file path)")
    p_agw.set_defaults(func=do_agw_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (SchemaError, FieldSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FieldError, FieldTooLargeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
