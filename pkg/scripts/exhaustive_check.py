"""Compare the bounded search with the oracles on every pair of trees over a
fixed leaf set, or on every binary pair with the SPR breadth-first search."""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from softspr.checks import binary_pairs, exhaustive_pairs, run_suites
from softspr.oracle import OracleTable


@dataclass
class Config:
    leaves: int = 4
    binary: bool = False
    monotone: bool = False


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--leaves", type=int, default=Config.leaves)
    ap.add_argument("--binary", action="store_true", help="binary pairs only, with the SPR search")
    ap.add_argument("--monotone", action="store_true", help="also check decisions at k - 1 and k + 1")
    cfg = Config(**vars(ap.parse_args()))

    start = time.perf_counter()
    pairs = binary_pairs(cfg.leaves) if cfg.binary else exhaustive_pairs(cfg.leaves)
    suites = run_suites(pairs, OracleTable(), bfs=cfg.binary, monotone=cfg.monotone)
    print(f"leaves={cfg.leaves} binary={cfg.binary} elapsed={time.perf_counter() - start:.1f}s")
    for s in suites:
        print(f"{s.name:<20} {s.cases:>7} {s.failures:>6}  {'PASS' if s.passed else 'FAIL'}")
        for ex in s.examples:
            print(f"    {ex}")
    return 0 if all(s.passed for s in suites) else 1


if __name__ == "__main__":
    raise SystemExit(main())
