"""Command dispatch and deterministic report emission.

Exit codes: 0 on completion, 2 when any certificate reports a violation
(so shell pipelines can branch on it), 1 on errors. Reports are JSON and
byte-identical across runs with the same config, seed and tool version;
wall-clock timing goes to stderr, the report carries work counters only.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from .certificates import (
    TOOL_VERSION,
    certify_not_quasi_hermitian,
    check_interpolation,
    coamenability_index,
    finite_index_spectrum,
    sigma_bound_check,
)
from .config import ConfigError, RunConfig, emit_config, generating_set_elements, parse_config
from .errors import PfstarError
from .groupring import class_is_zero
from .opnorms import pf_star_bounds
from .radius import radius_bounds, radius_csv

COMMANDS = ("norm", "radius", "certify-qh", "certify-coamen", "interp-check",
            "spectrum", "class-zero")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pfstar",
        description="Certified norm/radius bounds and decision certificates "
                    "for group-ring elements acting on coset spaces.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="run configuration file")
    parser.add_argument("--out", help="write the JSON report here")
    parser.add_argument("--csv", help="write power/radius rows as CSV here")
    parser.add_argument("--radius", type=int, help="override ball radius")
    parser.add_argument("--power", type=int, help="override max power N")
    parser.add_argument("--p", type=float, action="append",
                        help="exponent in [1,2]; repeatable, overrides p_grid")
    parser.add_argument("--seed", type=int, help="override RNG seed")
    parser.add_argument("--budget-vertices", type=int, help="override vertex budget")
    parser.add_argument("--budget-terms", type=int, help="override term budget")
    return parser


def _apply_overrides(config: RunConfig, args):
    if args.radius is not None:
        config.params["radius"] = args.radius
    if args.power is not None:
        config.params["max_power"] = args.power
    if args.p:
        for p in args.p:
            if not 1.0 <= p <= 2.0:
                raise ConfigError(f"--p {p} outside [1,2]")
        config.params["p_grid"] = tuple(args.p)
    if args.seed is not None:
        config.params["seed"] = args.seed
    if args.budget_vertices is not None:
        config.params["budget_vertices"] = args.budget_vertices
    if args.budget_terms is not None:
        config.params["budget_terms"] = args.budget_terms


def _common_kwargs(config: RunConfig):
    p = config.params
    return dict(
        radius=p["radius"],
        iterations=p["iterations"],
        rng_seed=p["seed"],
        margin=p["margin"],
        vertex_budget=p["budget_vertices"],
    )


def run(command: str, config: RunConfig) -> dict:
    """Execute a command against a parsed config; returns the report dict."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    params = config.params
    group, subgroup = config.group, config.subgroup
    common = _common_kwargs(config)
    report = {
        "command": command,
        "config": emit_config(config),
        "seed": params["seed"],
        "versions": {"tool": TOOL_VERSION},
        "certificates": [],
        "results": {},
        "timing": {
            "elements": len(config.elements),
            "p_grid": ["inf" if p == math.inf else p for p in params["p_grid"]],
            "max_power": params["max_power"],
            "radius": params["radius"],
        },
    }
    estimates_for_csv = []

    if command == "norm":
        for name, f in config.elements.items():
            per_p = {}
            for p in params["p_grid"]:
                interval = pf_star_bounds(f, group, subgroup, p, **common)
                per_p[_p_key(p)] = interval.to_dict()
            report["results"][name] = per_p
    elif command == "radius":
        for name, f in config.elements.items():
            per_p = {}
            for p in params["p_grid"]:
                est = radius_bounds(f, group, subgroup, p,
                                    n_max=params["max_power"],
                                    term_budget=params["budget_terms"], **common)
                per_p[_p_key(p)] = est.to_dict()
                estimates_for_csv.append(est)
            report["results"][name] = per_p
    elif command == "certify-qh":
        for name, f in config.elements.items():
            cert = certify_not_quasi_hermitian(
                f, group, subgroup, n_max=params["max_power"],
                tol=params["tol"], term_budget=params["budget_terms"], **common)
            report["certificates"].append({"element": name, **cert.to_dict()})
    elif command == "certify-coamen":
        generating_set = generating_set_elements(config)
        cert = coamenability_index(
            group, subgroup, generating_set, band=params["band"],
            n_max=min(params["max_power"], 8),
            term_budget=params["budget_terms"], **common)
        report["certificates"].append(cert.to_dict())
    elif command == "interp-check":
        grid = sorted(params["p_grid"])
        if len(grid) < 3:
            grid = [1.0, 1.5, 2.0]
        p1, p2, p3 = grid[0], grid[len(grid) // 2], grid[-1]
        for name, f in config.elements.items():
            cert = check_interpolation(
                f, group, subgroup, p1, p2, p3, mode="norm",
                n_max=params["max_power"], **common)
            report["certificates"].append({"element": name, **cert.to_dict()})
    elif command == "spectrum":
        for name, f in config.elements.items():
            cert = finite_index_spectrum(f, group, subgroup,
                                         rng_seed=params["seed"])
            report["certificates"].append({"element": name, **cert.to_dict()})
    elif command == "class-zero":
        for name, f in config.elements.items():
            result = class_is_zero(f, subgroup, margin=params["margin"],
                                   vertex_budget=params["budget_vertices"])
            entry = {
                "verdict": result.verdict,
                "exact": result.exact,
                "stabilized_at": result.stabilized_at,
                "assumptions": list(result.assumptions),
            }
            if result.witness is not None:
                entry["witness"] = [str(w) for w in result.witness]
            report["results"][name] = entry

    if estimates_for_csv:
        report["csv"] = radius_csv(estimates_for_csv)
    return report


def render_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def exit_code_for(report: dict) -> int:
    for cert in report.get("certificates", []):
        if cert.get("verdict") == "violation":
            return 2
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.time()
    try:
        path = Path(args.config)
        config = parse_config(path.read_text(), base_dir=path.parent)
        _apply_overrides(config, args)
        report = run(args.command, config)
    except (PfstarError, ConfigError, ValueError, OSError) as err:
        error_report = {
            "command": args.command,
            "error": {"type": type(err).__name__, "message": str(err)},
            "versions": {"tool": TOOL_VERSION},
        }
        text = render_report(error_report)
        if args.out:
            Path(args.out).write_text(text)
        sys.stdout.write(text)
        print(f"error after {time.time() - started:.1f}s", file=sys.stderr)
        return 1

    text = render_report(report)
    if args.out:
        Path(args.out).write_text(text)
    if args.csv and "csv" in report:
        Path(args.csv).write_text(report["csv"])
    sys.stdout.write(text)
    print(f"completed in {time.time() - started:.1f}s", file=sys.stderr)
    return exit_code_for(report)


def _p_key(p):
    return "inf" if p == math.inf else (str(int(p)) if float(p).is_integer() else repr(float(p)))


if __name__ == "__main__":
    sys.exit(main())
