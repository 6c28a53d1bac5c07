"""Integral homology of RP^n from the one-element building set {V*}.

Prints each table next to the cellular answer and the wall time.
"""
import argparse
import time
from dataclasses import dataclass

from realdcp.dcphom import integral_synthesis
from realdcp.exactlinalg import HomologyGroup
from realdcp.families import projective


@dataclass(frozen=True)
class Config:
    max_n: int = 6


def cellular(n: int) -> dict:
    out = {0: HomologyGroup(1)}
    for k in range(1, n + 1):
        if k % 2:
            out[k] = HomologyGroup(1) if k == n else HomologyGroup(0, (2,))
    return out


def main(cfg: Config) -> int:
    bad = 0
    for n in range(1, cfg.max_n + 1):
        t0 = time.perf_counter()
        got = integral_synthesis(projective(n).building_set()).total
        dt = time.perf_counter() - t0
        ok = got == cellular(n)
        bad += not ok
        row = ", ".join(str(got.get(k, HomologyGroup())) for k in range(n + 1))
        print(f"RP^{n}: ({row})  {'ok' if ok else 'MISMATCH'}  {dt * 1000:.1f} ms")
    return 1 if bad else 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-n", type=int, default=Config.max_n)
    raise SystemExit(main(Config(p.parse_args().max_n)))
