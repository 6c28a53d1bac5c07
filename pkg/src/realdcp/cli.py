"""Command-line entry point: ``python3 -m realdcp COMMAND FILE [options]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass

from .buildcore import DEFAULT_MAX_LATTICE, BuildingSet
from .cache import DiskCache, arrangement_key, building_set_for
from .checks import SUITES, run_suite
from .dcphom import GradedHomologyTable, graded_homology, integral_synthesis, mod2_betti
from .errors import InputError, RealDCPError
from .exactlinalg import HomologyGroup, complex_cohomology
from .families import load_arrangement, subspace_to_json
from .posetcx import interval_complex, pi_m_members

log = logging.getLogger("realdcp")

COMMANDS = ("closure", "lattice", "poset", "homology", "mod2", "full", "gm", "verify")


@dataclass(frozen=True)
class RunConfig:
    command: str
    file: str
    m: int = 2
    suite: str = "all"
    format: str = "text"
    jobs: int = 1
    max_lattice: int = DEFAULT_MAX_LATTICE
    cache: str | None = None
    seed: int = 0
    verbose: bool = False

    def validate(self) -> None:
        if self.jobs < 1 or self.max_lattice < 1 or self.m < 1:
            raise InputError("--jobs, --max-lattice and --m must be positive")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="realdcp", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", help="arrangement JSON file")
    p.add_argument("--m", type=int, default=2, help="divisibility for the poset command")
    p.add_argument("--suite", default="all", choices=("all",) + SUITES)
    p.add_argument("--format", default="text", choices=("text", "json"))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-lattice", type=int, default=DEFAULT_MAX_LATTICE)
    p.add_argument("--cache", default=None, help="cache directory (default: $REALDCP_CACHE)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


# ---------------------------------------------------------------------------
# formatting


def _skey(s) -> str:
    return s.key.decode()


def _dims(row: dict) -> list[int]:
    """Ranks (or plain counts) per degree, 0 up to the top degree."""
    vals = [row.get(k) for k in range(max(row, default=-1) + 1)]
    return [v.rank if isinstance(v, HomologyGroup) else (v or 0) for v in vals]


def _groups(row: dict) -> list[dict]:
    return [h.as_dict(k) for k, h in sorted(row.items())]


def _row_text(row: dict) -> str:
    return ", ".join(f"H_{k} = {h}" for k, h in sorted(row.items())) or "0"


def table_json(table: GradedHomologyTable, key: str) -> dict:
    return {
        "arrangement_key": key,
        "graded": [{"subspace": _skey(a), "dim": a.dim, "dims": _dims(row), "groups": _groups(row)}
                   for a, row in table.entries.items()],
        "total": _groups(table.total),
    }


def table_text(table: GradedHomologyTable, key: str, title: str, top: int = -1) -> str:
    """``top``: print total degrees at least up to here (the model's dimension)."""
    lines = [f"# {title}", f"arrangement {key}"]
    for a, row in table.entries.items():
        if row:
            lines.append(f"[{_skey(a)}]  dim {a.dim}: {_row_text(row)}")
    top = max(max(table.total, default=-1), top)
    lines.append("total:")
    for k in range(top + 1):
        lines.append(f"  H_{k} = {table.total.get(k, HomologyGroup())}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def model_dim(g: BuildingSet) -> int:
    """dim rt(𝒢) minus the number of components of rt(𝒢)."""
    lat = g.lattice
    return g.root.dim - len(lat.components(lat.root))


def cmd_closure(g: BuildingSet, key: str, args) -> tuple[dict, str]:
    data = {"arrangement_key": key,
            "building_set": [{"subspace": _skey(e), "dim": e.dim, "basis": subspace_to_json(e)}
                             for e in g.elements]}
    text = "\n".join([f"arrangement {key}", f"{len(g.elements)} building elements"]
                     + [f"  dim {e.dim}: {_skey(e)}" for e in g.elements])
    return data, text


def cmd_lattice(g: BuildingSet, key: str, args) -> tuple[dict, str]:
    lat = g.lattice
    rows = [{"subspace": _skey(s), "dim": s.dim,
             "components": [_skey(lat.elements[c]) for c in lat.components(i)]}
            for i, s in enumerate(lat.elements)]
    text = "\n".join([f"arrangement {key}", f"{len(lat)} lattice elements"]
                     + [f"  dim {r['dim']}: {r['subspace']}  components {len(r['components'])}"
                        for r in rows])
    return {"arrangement_key": key, "lattice": rows}, text


def cmd_poset(g: BuildingSet, key: str, args) -> tuple[dict, str]:
    view = pi_m_members(g, args.m)
    lat = g.lattice
    members = [{"subspace": _skey(lat.elements[a]), "dim": lat.dims[a]} for a in view.sorted_members()]
    text = "\n".join([f"arrangement {key}", f"Pi^({args.m}): {len(members)} elements"]
                     + [f"  dim {r['dim']}: {r['subspace']}" for r in members])
    return {"arrangement_key": key, "m": args.m, "members": members}, text


def cmd_homology(g, key, args):
    t = graded_homology(g, args.jobs)
    return table_json(t, key), table_text(t, key, "2H (image of multiplication by 2)", model_dim(g))


def cmd_full(g, key, args):
    t = integral_synthesis(g, args.jobs)
    return table_json(t, key), table_text(t, key, "integral homology", model_dim(g))


def cmd_mod2(g, key, args):
    t = mod2_betti(g)
    data = {"arrangement_key": key,
            "graded": [{"subspace": _skey(a), "dim": a.dim, "dims": _dims(row)}
                       for a, row in t.entries.items()],
            "total": t.betti()}
    lines = ["# mod-2 Betti numbers", f"arrangement {key}"]
    lines += [f"[{_skey(a)}]  dim {a.dim}: {_dims(row)}" for a, row in t.entries.items()]
    lines.append(f"total: {t.betti()}")
    return data, "\n".join(lines)


def cmd_gm(g, key, args):
    view = pi_m_members(g, 1)
    lat = g.lattice
    entries = {}
    for a in view.sorted_members():
        cx = interval_complex(a, view)
        row = {}
        for k in cx.degrees:
            h = complex_cohomology(cx, k)
            if not h.is_zero:
                row[lat.dims[a] - k] = h
        entries[lat.elements[a]] = row
    t = GradedHomologyTable(g, entries)
    return table_json(t, key), table_text(t, key, "complement homology")


def cmd_verify(g, key, args):
    results = run_suite(g, args.suite, seed=args.seed)
    data = {"arrangement_key": key, "suite": args.suite,
            "results": [{"name": r.name, "ok": r.ok, "detail": r.detail} for r in results]}
    text = "\n".join([f"arrangement {key}"] + [r.line() for r in results])
    return data, text


HANDLERS = {"closure": cmd_closure, "lattice": cmd_lattice, "poset": cmd_poset,
            "homology": cmd_homology, "mod2": cmd_mod2, "full": cmd_full, "gm": cmd_gm,
            "verify": cmd_verify}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = RunConfig(**vars(parser.parse_args(argv)))
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.validate()
        arr = load_arrangement(args.file)
        cache = DiskCache.from_env(args.cache)
        g = building_set_for(arr, args.max_lattice, cache)
        key = arrangement_key(arr)
        data, text = HANDLERS[args.command](g, key, args)
        cache.store(arr, g)
    except RealDCPError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    if args.format == "json":
        out.write(json.dumps(data, indent=2) + "\n")
    else:
        out.write(text + "\n")
    if args.command == "verify" and not all(r["ok"] for r in data["results"]):
        return 4
    return 0


def main() -> None:
    sys.exit(run())
