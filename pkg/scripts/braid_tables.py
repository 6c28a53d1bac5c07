"""2H, mod-2 Betti numbers and integral homology of real moduli spaces.

braid(n) (n points on a line, diagonal not quotiented) has the real moduli
space M_0,(n+1)-bar as its model, a closed manifold of dimension n - 2.
"""
import argparse
import time
from dataclasses import dataclass

from realdcp.dcphom import graded_homology, integral_synthesis, mod2_betti
from realdcp.exactlinalg import HomologyGroup
from realdcp.families import braid


@dataclass(frozen=True)
class Config:
    n_min: int = 3
    n_max: int = 6
    jobs: int = 1
    full: bool = True


def fmt(total: dict, top: int) -> str:
    return "(" + ", ".join(str(total.get(k, HomologyGroup())) for k in range(top + 1)) + ")"


def main(cfg: Config) -> None:
    for n in range(cfg.n_min, cfg.n_max + 1):
        t0 = time.perf_counter()
        g = braid(n).building_set()
        top = n - 2
        two_h = graded_homology(g, cfg.jobs)
        print(f"n={n} (M_0,{n + 1})  lattice {len(g.lattice)}  building set {len(g.elements)}")
        print(f"  2H     {fmt(two_h.total, top)}")
        print(f"  mod 2  {mod2_betti(g).betti()}")
        if cfg.full:
            full = integral_synthesis(g, cfg.jobs, two_h=two_h)
            print(f"  H      {fmt(full.total, top)}")
        print(f"  {time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-min", type=int, default=Config.n_min)
    p.add_argument("--n-max", type=int, default=Config.n_max)
    p.add_argument("--jobs", type=int, default=Config.jobs)
    p.add_argument("--no-full", action="store_true", help="skip the integral synthesis")
    a = p.parse_args()
    main(Config(a.n_min, a.n_max, a.jobs, not a.no_full))
