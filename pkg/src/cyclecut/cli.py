"""Command-line interface: decompose, check, gen, oracle, bench.

Exit codes: 0 success / yes, 2 not decomposable / no, 1 usage, I/O or
format errors.
"""
from __future__ import annotations

import argparse
import gc
import json
import os
import sys
import time
from typing import Optional

from .construction import (
    EarScript,
    ScriptError,
    ear_script_from_trace,
    instance_for_size,
    lift_cycles,
    random_script,
    apply_script,
)
from .multigraph import GraphFormatError, connected_components, read_graph, serialize
from .oracle import DEFAULT_MAX_EDGES, brute_force_c
from .recognizer import is_double_ear_decomposable
from .reduction import _globalize, run

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO = 2

ORACLE_ENV = "CYCLECUT_MAX_ORACLE_EDGES"


class _Fail(Exception):
    """Raised inside a command to exit with status 1 and a message."""


def _emit(text: str = "") -> None:
    sys.stdout.write(text + "\n")


def _load(path: str):
    try:
        return read_graph(path)
    except GraphFormatError as exc:
        raise _Fail(f"{path}: {exc}") from None
    except OSError as exc:
        raise _Fail(f"{path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise _Fail(f"{path}: not a UTF-8 text file") from None


# -- decompose -----------------------------------------------------------------

def decompose_report(g, cycles: bool = False, ears: bool = False) -> dict:
    """Report for ``g``, summing over connected components."""
    report: dict = {"status": "decomposable", "c": 0}
    if g.node_count == 0:
        return {"status": "not-decomposable", "reason": "empty graph"}
    comps = connected_components(g)
    report["components"] = len(comps)
    all_cycles = []
    scripts = []
    for piece, nodes, edge_map in comps:
        result = run(piece)
        if not result:
            return {
                "status": "not-decomposable",
                "components": len(comps),
                "reason": _globalize(result.witness, nodes),
            }
        report["c"] += result.c
        if cycles:
            for cyc in lift_cycles(piece, result.trace).cycles:
                all_cycles.append([edge_map[e] for e, _, _ in cyc])
        if ears:
            scripts.append(ear_script_from_trace(piece, result.trace).to_dict())
    if cycles:
        report["cycles"] = all_cycles
    if ears:
        report["ears"] = scripts
    return report


def cmd_decompose(args) -> int:
    g = _load(args.file)
    report = decompose_report(g, cycles=args.cycles, ears=args.ears)
    if args.json:
        _emit(json.dumps(report))
    else:
        _emit(f"status: {report['status']}")
        if report["status"] == "decomposable":
            _emit(f"c: {report['c']}")
            for cyc in report.get("cycles", ()):
                _emit("cycle: " + " ".join(map(str, cyc)))
            for script in report.get("ears", ()):
                _emit("ears: " + json.dumps(script, separators=(",", ":")))
        else:
            _emit(f"reason: {report['reason']}")
    return EXIT_OK if report["status"] == "decomposable" else EXIT_NO


# -- check -----------------------------------------------------------------------

def cmd_check(args) -> int:
    g = _load(args.file)
    rep = is_double_ear_decomposable(g)
    if args.json:
        _emit(json.dumps(rep.to_dict()))
    else:
        _emit("yes" if rep.verdict else f"no: {rep.reason()}")
    return EXIT_OK if rep.verdict else EXIT_NO


# -- gen -------------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.ears < 0 or args.subdivisions < 0:
        raise _Fail("--ears and --subdivisions must be non-negative")
    if args.cycle_length is not None and args.cycle_length < 1:
        raise _Fail("--cycle-length must be at least 1")
    script = random_script(
        args.seed,
        args.ears,
        args.subdivisions,
        cycle_length=args.cycle_length,
        max_extend=args.max_extend,
    )
    g, expected = apply_script(script)
    text = f"# expected_c={expected}\n" + serialize(g)
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            _emit(f"expected_c: {expected}")
        else:
            sys.stdout.write(text)
        if args.script:
            with open(args.script, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(script.to_json())
    except OSError as exc:
        raise _Fail(f"cannot write output: {exc.strerror or exc}") from None
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        with open(args.script, encoding="utf-8") as fh:
            script = EarScript.from_json(fh.read())
        g, expected = apply_script(script)
    except OSError as exc:
        raise _Fail(f"{args.script}: {exc.strerror or exc}") from None
    except (ScriptError, json.JSONDecodeError) as exc:
        raise _Fail(f"{args.script}: {exc}") from None
    sys.stdout.write(f"# expected_c={expected}\n" + serialize(g))
    return EXIT_OK


# -- oracle ----------------------------------------------------------------------

def _oracle_bound(flag: Optional[int]) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(ORACLE_ENV)
    if env is None or env.strip() == "":
        return DEFAULT_MAX_EDGES
    try:
        return int(env)
    except ValueError:
        raise _Fail(f"{ORACLE_ENV} must be an integer, got {env!r}") from None


def cmd_oracle(args) -> int:
    bound = _oracle_bound(args.max_edges)
    g = _load(args.file)
    if g.edge_count > bound:
        raise _Fail(f"graph has {g.edge_count} edges, exceeds max-edges {bound}")
    try:
        res = brute_force_c(g, max_edges=bound)
    except ValueError as exc:
        # only odd degrees remain: such a graph has no cycle decomposition
        if args.json:
            _emit(json.dumps({"c_min": None, "reason": str(exc)}))
        else:
            _emit(f"no cycle decomposition: {exc}")
        return EXIT_NO
    if args.json:
        _emit(json.dumps({"c_min": res.c_min, "cycles": res.witness.edge_lists()}))
    else:
        _emit(f"c_min: {res.c_min}")
    return EXIT_OK


# -- bench -----------------------------------------------------------------------

def _sizes(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            value = int(float(part)) if "e" in part.lower() else int(part)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad size {part!r}") from None
        if value < 1:
            raise argparse.ArgumentTypeError("sizes must be positive")
        out.append(value)
    if not out:
        raise argparse.ArgumentTypeError("no sizes given")
    return out


def time_run(g, repeats: int = 1) -> float:
    """Smallest wall time of ``repeats`` calls to :func:`run` on ``g``."""
    best = float("inf")
    for _ in range(repeats):
        gc.collect()
        t0 = time.perf_counter()
        result = run(g)
        elapsed = time.perf_counter() - t0
        if not result:
            raise RuntimeError(f"generated instance rejected: {result.witness}")
        del result
        best = min(best, elapsed)
    return best


def cmd_bench(args) -> int:
    _emit("edges,nodes,seconds")
    for size in args.sizes:
        g, _ = instance_for_size(args.seed, size)
        seconds = time_run(g, args.repeats)
        _emit(f"{g.edge_count},{g.node_count},{seconds:.6f}")
        del g
    return EXIT_OK


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cyclecut",
        description="Cycle numbers of double ear decomposable multigraphs.",
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    d = sub.add_parser("decompose", help="compute c(G), optionally with cycles and ear scripts")
    d.add_argument("file")
    d.add_argument("--json", action="store_true", help="print a JSON report")
    d.add_argument("--cycles", action="store_true", help="include a minimum cycle decomposition")
    d.add_argument("--ears", action="store_true", help="include a double ear script per component")
    d.set_defaults(func=cmd_decompose)

    c = sub.add_parser("check", help="independent membership test (degrees, treewidth, connectivity)")
    c.add_argument("file")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("gen", help="generate a random double ear decomposable graph")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--ears", type=int, default=0)
    g.add_argument("--subdivisions", type=int, default=0)
    g.add_argument("--cycle-length", type=int, default=None,
                   help="length of the initial cycle (default: random 1-6)")
    g.add_argument("--max-extend", type=int, default=3,
                   help="an ear path grows up to this many nodes each way")
    g.add_argument("--out", help="write the graph here instead of stdout")
    g.add_argument("--script", help="also write the ear script as JSON")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("replay", help="rebuild the graph of an ear script")
    r.add_argument("script")
    r.set_defaults(func=cmd_replay)

    o = sub.add_parser("oracle", help="exact minimum by exhaustive search (small graphs)")
    o.add_argument("file")
    o.add_argument("--max-edges", type=int, default=None,
                   help=f"refuse larger graphs (default ${ORACLE_ENV} or {DEFAULT_MAX_EDGES})")
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="time the reduction on generated instances (CSV)")
    b.add_argument("--sizes", type=_sizes, default=[10_000, 100_000, 1_000_000],
                   help="comma-separated edge counts (default 1e4,1e5,1e6)")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeats", type=int, default=1, help="report the best of this many runs")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[list] = None) -> int:
    for stream in (sys.stdout, sys.stderr):
        try:
            stream.reconfigure(encoding="utf-8", line_buffering=True)
        except (AttributeError, ValueError):
            pass
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        if getattr(args, "json", False):
            _emit(json.dumps({"status": "error", "reason": str(exc)}))
        sys.stderr.write(f"cyclecut: error: {exc}\n")
        return EXIT_ERROR
