"""Arrangement families and the JSON arrangement format.

Raw form:     {"ambient_dim": d, "generators": [[[q, ...], ...], ...]}
Family form:  {"family": {"name": "braid", "n": 4}}
              {"family": {"name": "boolean", "n": 3}}
              {"family": {"name": "graphic", "edges": [[1, 2], [2, 3]], "n": 3}}
              {"family": {"name": "realify", "of": <arrangement>}}
              {"family": {"name": "product", "factors": [<arrangement>, ...]}}

Rationals are "p/q" strings or integers.  Inside "realify", an entry may
also be a two-element list [re, im].  Vertices of graphic arrangements are
1-based; braid and graphic arrangements live in the full R^n (the diagonal
is not quotiented out).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .buildcore import BuildingSet, closure, embed
from .errors import InputError
from .exactlinalg import Subspace, format_rational, parse_rational, rref


@dataclass(frozen=True)
class Arrangement:
    ambient_dim: int
    generators: tuple

    def building_set(self, max_lattice: int | None = None) -> BuildingSet:
        kw = {} if max_lattice is None else {"max_lattice": max_lattice}
        return closure(list(self.generators), self.ambient_dim, **kw)


def _unit(n: int, i: int) -> list[int]:
    v = [0] * n
    v[i] = 1
    return v


def _diff(n: int, i: int, j: int) -> list[int]:
    v = [0] * n
    v[i], v[j] = 1, -1
    return v


def braid(n: int) -> Arrangement:
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise InputError("braid needs an integer n >= 2")
    gens = tuple(rref([_diff(n, i, j)], n) for i in range(n) for j in range(i + 1, n))
    return Arrangement(n, gens)


def boolean(n: int) -> Arrangement:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError("boolean needs an integer n >= 1")
    return Arrangement(n, tuple(rref([_unit(n, i)], n) for i in range(n)))


def graphic(edges, n: int | None = None) -> Arrangement:
    pairs = []
    for e in edges:
        if (not isinstance(e, (list, tuple)) or len(e) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
            raise InputError(f"malformed edge {e!r}")
        i, j = e
        if i < 1 or j < 1 or i == j:
            raise InputError(f"malformed edge {e!r}")
        pairs.append((min(i, j), max(i, j)))
    top = max((j for _, j in pairs), default=0)
    n = top if n is None else n
    if n < max(top, 1):
        raise InputError("vertex count smaller than the largest vertex label")
    gens = tuple(sorted({rref([_diff(n, i - 1, j - 1)], n) for i, j in pairs},
                        key=lambda s: s.sort_key))
    return Arrangement(n, gens)


def _complex_entry(x) -> tuple[Fraction, Fraction]:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InputError(f"complex entry must be [re, im], got {x!r}")
        return parse_rational(x[0]), parse_rational(x[1])
    if isinstance(x, complex):
        raise InputError("use [re, im] pairs for complex entries")
    return parse_rational(x), Fraction(0)


def realify_generators(n: int, generators) -> Arrangement:
    """Complex subspaces of (C^n)* as real subspaces of (R^2n)*.

    Coordinates on R^2n are (x_1..x_n, y_1..y_n) with z = x + iy; a complex
    covector a + ib contributes the real functionals Re and Im of its value,
    i.e. rows [a, -b] and [b, a].
    """
    out = []
    for gen in generators:
        rows = []
        for vec in gen:
            if len(vec) != n:
                raise InputError("complex generator width mismatch")
            ab = [_complex_entry(x) for x in vec]
            a = [p for p, _ in ab]
            b = [q for _, q in ab]
            rows.append(a + [-q for q in b])
            rows.append(b + a)
        out.append(rref(rows, 2 * n))
    return Arrangement(2 * n, tuple(out))


def realify(arr: Arrangement) -> Arrangement:
    """Treat a rational arrangement as complex and take its underlying real one."""
    return realify_generators(arr.ambient_dim, [s.rows for s in arr.generators])


def product(*arrs: Arrangement) -> Arrangement:
    n = sum(a.ambient_dim for a in arrs)
    gens, off = [], 0
    for a in arrs:
        gens.extend(embed(s, n, off) for s in a.generators)
        off += a.ambient_dim
    return Arrangement(n, tuple(gens))


def projective(n: int) -> Arrangement:
    """𝒢 = {V*} with dim V = n + 1; the model is real projective n-space."""
    return Arrangement(n + 1, (rref([_unit(n + 1, i) for i in range(n + 1)], n + 1),))


# ---------------------------------------------------------------------------
# JSON


def _fields(obj: dict, required: set, optional: set = frozenset(), where: str = "") -> None:
    if not isinstance(obj, dict):
        raise InputError(f"expected an object{where}")
    keys = set(obj)
    missing = required - keys
    extra = keys - required - set(optional)
    if missing:
        raise InputError(f"missing field(s) {sorted(missing)}{where}")
    if extra:
        raise InputError(f"unknown field(s) {sorted(extra)}{where}")


def parse_arrangement(obj) -> Arrangement:
    if isinstance(obj, dict) and "family" in obj:
        _fields(obj, {"family"})
        return _parse_family(obj["family"])
    _fields(obj, {"ambient_dim", "generators"})
    n = obj["ambient_dim"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError("ambient_dim must be a positive integer")
    gens = obj["generators"]
    if not isinstance(gens, list):
        raise InputError("generators must be a list")
    out = []
    for g in gens:
        if not isinstance(g, list) or not all(isinstance(r, list) for r in g):
            raise InputError("each generator is a list of row vectors")
        s = rref([[parse_rational(x) for x in r] for r in g], n)
        if s.dim == 0:
            raise InputError("generators must be nonzero subspaces")
        out.append(s)
    return Arrangement(n, tuple(out))


def _parse_family(fam) -> Arrangement:
    if not isinstance(fam, dict) or "name" not in fam:
        raise InputError("family needs a name")
    name = fam["name"]
    where = f" in family {name!r}"
    if name == "braid":
        _fields(fam, {"name", "n"}, where=where)
        return braid(fam["n"])
    if name == "boolean":
        _fields(fam, {"name", "n"}, where=where)
        return boolean(fam["n"])
    if name == "graphic":
        _fields(fam, {"name", "edges"}, {"n"}, where=where)
        if not isinstance(fam["edges"], list):
            raise InputError("edges must be a list")
        return graphic(fam["edges"], fam.get("n"))
    if name == "realify":
        _fields(fam, {"name", "of"}, where=where)
        inner = fam["of"]
        if isinstance(inner, dict) and "generators" in inner and "family" not in inner:
            _fields(inner, {"ambient_dim", "generators"}, where=where)
            return realify_generators(inner["ambient_dim"], inner["generators"])
        return realify(parse_arrangement(inner))
    if name == "product":
        _fields(fam, {"name", "factors"}, where=where)
        facs = fam["factors"]
        if not isinstance(facs, list) or not facs:
            raise InputError("product needs a nonempty factor list")
        return product(*[parse_arrangement(f) for f in facs])
    raise InputError(f"unknown family {name!r}")


def serialize_arrangement(arr: Arrangement) -> dict:
    return {"ambient_dim": arr.ambient_dim,
            "generators": [[[format_rational(x) for x in r] for r in s.rows]
                           for s in arr.generators]}


def subspace_to_json(s: Subspace) -> list:
    return [[format_rational(x) for x in r] for r in s.rows]


def load_arrangement(path) -> Arrangement:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read arrangement {path}: {e}") from None
    return parse_arrangement(obj)
