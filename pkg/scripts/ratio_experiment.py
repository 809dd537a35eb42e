"""Approximation quality on random pairs: the distribution of approx / fpt by
the number of SPR moves used to perturb the second tree."""
from __future__ import annotations

import argparse
import random
from collections import Counter, defaultdict
from dataclasses import dataclass

from softspr.approx import approx_distance
from softspr.fpt_search import maf_distance
from softspr.generate import random_pair


@dataclass
class Config:
    pairs: int = 1000
    max_leaves: int = 10
    max_moves: int = 5
    contract: float = 0.3
    seed: int = 0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    cfg = Config(**vars(ap.parse_args()))

    rng = random.Random(cfg.seed)
    ratios: dict[int, list[float]] = defaultdict(list)
    hist: Counter = Counter()
    violations = 0
    for _ in range(cfg.pairs):
        moves = rng.randint(0, cfg.max_moves)
        t1, t2 = random_pair(rng.randint(2, cfg.max_leaves), rng, moves, cfg.contract)
        e = maf_distance(t1, t2).distance
        a = approx_distance(t1, t2).distance
        violations += not (e <= a <= 3 * e)
        if e:
            ratios[moves].append(a / e)
            hist[round(a / e, 2)] += 1
    print(f"{'moves':>5} {'pairs':>6} {'mean':>6} {'max':>6}")
    for moves in sorted(ratios):
        r = ratios[moves]
        print(f"{moves:>5} {len(r):>6} {sum(r) / len(r):>6.3f} {max(r):>6.3f}")
    print("ratio histogram:", dict(sorted(hist.items())))
    print(f"violations of e <= approx <= 3e: {violations}")
    return 1 if violations else 0


if __name__ == "__main__":
    raise SystemExit(main())
