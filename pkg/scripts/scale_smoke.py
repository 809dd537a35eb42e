"""Running time and queue operations of the approximation on large random
pairs, to check near-linear growth."""
from __future__ import annotations

import argparse
import random
import time
from dataclasses import dataclass, field

from softspr.approx import approx_distance
from softspr.generate import random_pair


@dataclass
class Config:
    sizes: list[int] = field(default_factory=lambda: [1000, 3000, 10000, 30000])
    move_fraction: float = 0.05
    contract: float = 0.3
    seed: int = 0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=Config().sizes)
    ap.add_argument("--move-fraction", type=float, default=Config.move_fraction)
    ap.add_argument("--contract", type=float, default=Config.contract)
    ap.add_argument("--seed", type=int, default=Config.seed)
    cfg = Config(**vars(ap.parse_args()))

    rng = random.Random(cfg.seed)
    print(f"{'n':>7} {'moves':>6} {'k':>6} {'ops':>8} {'ops/n':>6} {'seconds':>8}")
    for n in cfg.sizes:
        moves = max(1, int(n * cfg.move_fraction))
        t1, t2 = random_pair(n, rng, moves, cfg.contract)
        start = time.perf_counter()
        res = approx_distance(t1, t2)
        sec = time.perf_counter() - start
        print(f"{n:>7} {moves:>6} {res.distance:>6} {res.queue_ops:>8} {res.queue_ops / n:>6.2f} {sec:>8.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
