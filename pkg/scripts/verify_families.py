"""Run every self-check suite over a handful of named families."""
import argparse
import time
from dataclasses import dataclass

from realdcp.checks import run_suite
from realdcp.families import boolean, braid, graphic, product, projective, realify


@dataclass(frozen=True)
class Config:
    suite: str = "all"
    seed: int = 0


FAMILIES = {
    "braid4": lambda: braid(4),
    "braid5": lambda: braid(5),
    "boolean3": lambda: boolean(3),
    "rp4": lambda: projective(4),
    "cycle4": lambda: graphic([[1, 2], [2, 3], [3, 4], [1, 4]]),
    "complex_braid3": lambda: realify(braid(3)),
    "rp2_x_circle": lambda: product(projective(2), braid(3)),
}


def main(cfg: Config) -> int:
    failed = 0
    for name, make in FAMILIES.items():
        t0 = time.perf_counter()
        results = run_suite(make().building_set(), cfg.suite, cfg.seed)
        bad = [r for r in results if not r.ok]
        failed += len(bad)
        print(f"{name:16s} {len(results) - len(bad)}/{len(results)} passed  "
              f"{time.perf_counter() - t0:.1f} s")
        for r in bad:
            print("   ", r.line())
    return 1 if failed else 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--suite", default="all")
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    raise SystemExit(main(Config(a.suite, a.seed)))
