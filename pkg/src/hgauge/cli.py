"""Scenario runner.

    hgauge run --scenario FILE [--out REPORT] [--seed N] [--grid K] [--suite NAME]... [--verbose]
    hgauge list-builtins

Exit codes: 0 all suites pass, 1 a suite failed, 2 schema error, 3 build error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path
from typing import List, Optional

import jsonschema
import numpy as np

from . import registry
from .errors import BuildError, SchemaError, SuiteFailure

SCHEMA_VERSION = 1

_num = {"type": "number"}
_vec = {"type": "array", "items": _num}
_named_map = {
    "anyOf": [
        {"type": "string"},
        {
            "type": "object",
            "properties": {"name": {"type": "string"}, "params": {"type": "object"}},
            "required": ["name"],
            "additionalProperties": False,
        },
    ]
}
_path_piece = {
    "type": "object",
    "properties": {
        "grid": {"type": "integer", "minimum": 8},
        "plateau": {"type": "integer", "minimum": 1},
        "waypoints": {"type": "array", "items": _vec, "minItems": 2},
    },
    "required": ["waypoints"],
    "additionalProperties": False,
}
_lazy_path = {
    "anyOf": [
        {
            "type": "object",
            "properties": {"arrows": {"type": "array", "items": _vec}, "paths": {"type": "array", "items": _path_piece}},
            "required": ["arrows", "paths"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "random": {
                    "type": "object",
                    "properties": {
                        "seed": {"type": "integer"},
                        "order": {"type": "integer", "minimum": 1},
                        "x0": _vec,
                        "spread": _num,
                    },
                    "additionalProperties": False,
                }
            },
            "required": ["random"],
            "additionalProperties": False,
        },
    ]
}

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "grid": {"type": "integer", "minimum": 8},
        "crossed_module": {"type": "string"},
        "base": {
            "type": "object",
            "properties": {"kind": {"type": "string"}, "dim": {"type": "integer", "minimum": 1}},
            "required": ["kind"],
            "additionalProperties": False,
        },
        "bundle": {
            "type": "object",
            "properties": {
                "mode": {"enum": ["decorate", "quasi_decorate"]},
                "cocycle": _named_map,
                "Hu": _named_map,
                "Hm": _named_map,
                "Ch": {
                    "type": "object",
                    "properties": {"h": _vec},
                    "required": ["h"],
                    "additionalProperties": False,
                },
                "connection_class_expected": {"enum": ["categorical", "unital", "quasi"]},
            },
            "additionalProperties": False,
        },
        "connection": {
            "type": "object",
            "properties": {"A0": _named_map},
            "required": ["A0"],
            "additionalProperties": False,
        },
        "paths": {"type": "array", "items": _lazy_path},
        "action": {"type": "string"},
        "V": {
            "type": "object",
            "properties": {
                "V0_dim": {"type": "integer", "minimum": 1},
                "V1_dim": {"type": "integer", "minimum": 1},
                "structure": {"type": "string"},
            },
            "additionalProperties": False,
        },
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"suite": {"type": "string"}, "params": {"type": "object"}},
                "required": ["suite"],
                "additionalProperties": False,
            },
        },
        "tolerances": {"type": "object", "additionalProperties": _num},
    },
    "required": ["schema", "name", "crossed_module", "base", "checks"],
    "additionalProperties": False,
}


def bundled_scenarios() -> List[str]:
    return sorted(p.name for p in resources.files("hgauge").joinpath("scenarios").iterdir() if p.name.endswith(".json"))


def _resolve(path: str):
    p = Path(path)
    if p.exists():
        return p.read_text()
    bundled = resources.files("hgauge").joinpath("scenarios", p.name)
    if bundled.is_file():
        return bundled.read_text()
    raise SchemaError(f"scenario file {path!r} not found")


def load_scenario(path: str) -> dict:
    """Parse and validate; every problem with the file itself is a SchemaError."""
    text = _resolve(path)
    try:
        sc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from e
    validate_scenario(sc)
    return sc


def validate_scenario(sc) -> None:
    try:
        jsonschema.validate(sc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(k) for k in e.absolute_path) or "<root>"
        raise SchemaError(f"{where}: {e.message}") from e


def _clean(obj):
    """JSON-safe copy: arrays to lists, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return repr(x)
        # repr is the shortest string that round-trips, at most 17 digits
        return x
    return obj


def run_scenario(sc: dict, seed: Optional[int] = None, grid: Optional[int] = None,
                 only: Optional[List[str]] = None) -> dict:
    ctx = registry.build(sc, seed, grid)
    suites = []
    for check in sc["checks"]:
        name = check["suite"]
        if only and name not in only:
            continue
        r = registry.run_suite(ctx, name, dict(check.get("params", {})))
        suites.append({"name": r.name, "pass": bool(r.passed), "residuals": r.residuals, "details": r.details})
    report = {"scenario": sc["name"], "suites": suites, "pass": all(s["pass"] for s in suites)}
    return _clean(report)


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def summary_lines(report: dict, verbose: bool = False) -> List[str]:
    lines = []
    for s in report["suites"]:
        mark = "PASS" if s["pass"] else "FAIL"
        worst = max((v for v in s["residuals"].values() if isinstance(v, float)), default=0.0)
        extra = ""
        if "error" in s["details"]:
            extra = f"  [{s['details']['error']}: {s['details'].get('message', '')}]"
        elif s["details"].get("first_failure"):
            extra = f"  [first failure ({s['details']['first_failure']})]"
        lines.append(f"{mark} {s['name']:<20} max residual {worst:.3e}{extra}")
        if verbose:
            for k, v in s["residuals"].items():
                lines.append(f"      {k:<28} {v}")
    lines.append(f"{'PASS' if report['pass'] else 'FAIL'} scenario {report['scenario']}")
    return lines


def _cmd_run(args) -> int:
    try:
        sc = load_scenario(args.scenario)
        report = run_scenario(sc, args.seed, args.grid, args.suite)
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 2
    except BuildError as e:
        print(f"build error: {e}", file=sys.stderr)
        return 3
    text = dump_report(report)
    if args.out:
        Path(args.out).write_text(text)
        out = sys.stdout
    else:
        sys.stdout.write(text)
        out = sys.stderr
    for line in summary_lines(report, args.verbose):
        print(line, file=out)
    if not report["pass"]:
        failed = [s["name"] for s in report["suites"] if not s["pass"]]
        print(str(SuiteFailure(f"failed suites: {', '.join(failed)}")), file=sys.stderr)
        return 1
    return 0


def _cmd_list(args) -> int:
    lines = registry.builtin_listing()
    lines.append("scenarios:")
    lines.extend(f"  {n}" for n in bundled_scenarios())
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hgauge", description="Parallel transport checks on principal 2-bundles.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("--scenario", required=True, help="scenario JSON file or bundled scenario name")
    r.add_argument("--out", help="write the JSON report here instead of stdout")
    r.add_argument("--seed", type=int, help="override the scenario seed")
    r.add_argument("--grid", type=int, help="override the scenario grid")
    r.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    r.add_argument("--verbose", action="store_true", help="print every residual")
    r.set_defaults(func=_cmd_run)
    ls = sub.add_parser("list-builtins", help="list registered names")
    ls.set_defaults(func=_cmd_list)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
