"""Command-line front end.

    softspr distance T1 T2 [--method fpt|approx|oracle] [--k-max N] [--json]
    softspr validate FOREST T1 T2 [--json]
    softspr oracle T1 T2 [--json]
    softspr selftest [--leaves N] [--samples M] [--seed S]

Trees are Newick files or inline Newick strings.  A forest file holds one
component per line, the rho component first (written as the subtree below rho,
or as `ρ;` when rho is alone).

Exit codes: 0 success, 1 usage or input error (or an invalid forest for
`validate`), 2 search budget or oracle size bound exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import random
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .approx import approx_distance
from .checks import run_suites, sampled_pairs
from .forest import RHO, LabelMismatchError, LabelSpace
from .fpt_search import DEFAULT_K_MAX, BudgetExhausted, maf_distance
from .generate import all_trees
from .newick import NewickError, NewickNode, NewickTree, parse_newick, write_newick
from .oracle import OracleBoundError, OracleTable, oracle_ecut, oracle_spr_bfs
from .structure import check_agreement_forest

SCHEMA = 1
EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2
SELFTEST_MAX_LEAVES = 6

log = logging.getLogger("softspr")


class InputError(Exception):
    """Unreadable or malformed input."""


@dataclass
class RunReport:
    method: str
    distance: int
    components: list[str]
    cuts: int
    invocations: int
    elapsed_ms: int
    bounds: dict | None = None

    def to_json(self) -> str:
        return json.dumps({"schema": SCHEMA, **asdict(self)}, ensure_ascii=False)

    def to_text(self) -> str:
        lines = [f"method      {self.method}", f"distance    {self.distance}"]
        if self.bounds:
            lines.append(f"bounds      {self.bounds['lower']}..{self.bounds['upper']}")
        lines += [f"cuts        {self.cuts}", f"invocations {self.invocations}",
                  f"elapsed_ms  {self.elapsed_ms}"]
        if self.components:
            lines.append("components")
            lines += [f"  {c}" for c in self.components]
        return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def read_tree(arg: str) -> NewickTree:
    """A Newick file path, or the Newick text itself."""
    path = Path(arg)
    if path.is_file():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {arg}: {exc}") from exc
    elif "(" in arg or arg.rstrip().endswith(";"):
        text = arg
    else:
        raise InputError(f"no such file: {arg}")
    try:
        return parse_newick(text)
    except NewickError as exc:
        raise InputError(f"{arg}: {exc}") from exc


def read_forest(arg: str) -> list[NewickTree]:
    path = Path(arg)
    try:
        text = sys.stdin.read() if arg == "-" else path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {arg}: {exc}") from exc
    comps = []
    for i, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line == f"{RHO};":
            comps.append(NewickTree(NewickNode(RHO)))
            continue
        try:
            comps.append(parse_newick(line))
        except NewickError as exc:
            raise InputError(f"{arg}:{i}: {exc}") from exc
    if not comps:
        raise InputError(f"{arg}: no components")
    return comps


def _lines(components: list[NewickTree]) -> list[str]:
    return [write_newick(c) for c in components]


def cmd_distance(args) -> int:
    t1, t2 = read_tree(args.t1), read_tree(args.t2)
    LabelSpace.from_trees(t1, t2)
    start = time.perf_counter()
    if args.method == "fpt":
        res = maf_distance(t1, t2, k_max=args.k_max, threads=args.threads)
        for cut in res.cut_trace:
            log.info("cut %s", ",".join(cut))
        report = RunReport("fpt", res.distance, res.newick_lines(), len(res.cut_trace),
                           res.total_invocations, 0)
    elif args.method == "approx":
        res = approx_distance(t1, t2)
        for cut in res.cuts:
            log.info("cut %s", ",".join(cut))
        report = RunReport("approx", res.distance, _lines(res.components), res.cuts_made, 0, 0,
                           bounds={"lower": math.ceil(res.distance / 3), "upper": res.distance})
    else:
        report = RunReport("oracle", oracle_ecut(t1, t2), [], 0, 0, 0)
    report.elapsed_ms = round((time.perf_counter() - start) * 1000)
    print(report.to_json() if args.json else report.to_text())
    if args.forest:
        Path(args.forest).write_text("\n".join(report.components) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_validate(args) -> int:
    comps = read_forest(args.forest)
    t1, t2 = read_tree(args.t1), read_tree(args.t2)
    LabelSpace.from_trees(t1, t2)
    reason = check_agreement_forest(comps, t1, t2)
    if args.json:
        print(json.dumps({"schema": SCHEMA, "valid": reason is None, "reason": reason,
                          "components": len(comps)}))
    else:
        print("valid" if reason is None else f"invalid: {reason}")
    return EXIT_OK if reason is None else EXIT_INPUT


def cmd_oracle(args) -> int:
    t1, t2 = read_tree(args.t1), read_tree(args.t2)
    table = OracleTable(max_leaves=args.max_leaves)
    out = {"ecut": table.ecut(t1, t2), "spr_bfs": None}
    if t1.is_binary() and t2.is_binary():
        out["spr_bfs"] = oracle_spr_bfs(t1, t2, max_leaves=args.max_leaves)
    if args.json:
        print(json.dumps({"schema": SCHEMA, **out}))
    else:
        print(f"ecut    {out['ecut']}")
        if out["spr_bfs"] is not None:
            print(f"spr_bfs {out['spr_bfs']}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    if not 2 <= args.leaves <= SELFTEST_MAX_LEAVES:
        raise InputError(f"--leaves must lie in 2..{SELFTEST_MAX_LEAVES}")
    trees = all_trees(args.leaves)
    if args.samples:
        pairs = list(sampled_pairs(trees, args.samples, random.Random(args.seed)))
    else:
        pairs = [(a, b) for a in trees for b in trees]
    suites = run_suites(pairs, OracleTable(), monotone=True)
    print(f"selftest leaves={args.leaves} pairs={len(pairs)} seed={args.seed}")
    print(f"{'suite':<20} {'cases':>7} {'failures':>8}  result")
    for s in suites:
        print(f"{s.name:<20} {s.cases:>7} {s.failures:>8}  {'PASS' if s.passed else 'FAIL'}")
        for ex in s.examples:
            print(f"    {ex}")
    return EXIT_OK if all(s.passed for s in suites) else EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="softspr", description="Soft SPR distance between rooted multifurcating trees.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("distance", help="distance and maximum agreement forest")
    d.add_argument("t1")
    d.add_argument("t2")
    d.add_argument("--method", choices=("fpt", "approx", "oracle"), default="fpt")
    d.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    d.add_argument("--threads", type=int, default=1)
    d.add_argument("--seed", type=int, default=0, help="accepted for pipeline symmetry; runs are deterministic")
    d.add_argument("--json", action="store_true")
    d.add_argument("--trace", action="store_true", help="log the cut edges to stderr")
    d.add_argument("--forest", help="also write the components to this file")
    d.set_defaults(func=cmd_distance)

    v = sub.add_parser("validate", help="check a candidate agreement forest")
    v.add_argument("forest", help="forest file, one component per line ('-' for stdin)")
    v.add_argument("t1")
    v.add_argument("t2")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_validate)

    o = sub.add_parser("oracle", help="brute-force distance for small trees")
    o.add_argument("t1")
    o.add_argument("t2")
    o.add_argument("--max-leaves", type=int, default=7)
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("selftest", help="cross-check search, approximation and oracles")
    s.add_argument("--leaves", type=int, default=5)
    s.add_argument("--samples", type=int, default=0, help="random pairs instead of all pairs")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    trace = getattr(args, "trace", False)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.INFO if (args.verbose or trace) else logging.WARNING)
    try:
        return args.func(args)
    except (InputError, LabelMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExhausted as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OracleBoundError as exc:
        print(f"bound exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
