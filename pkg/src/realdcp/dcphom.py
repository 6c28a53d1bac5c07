"""Graded homology of the real wonderful model.

Pipeline per lattice element A:
  * 2H[A]  = 2 · (doubled forest cohomology of 𝒢|_A, m = 2), degree-reversed;
  * mod-2 Betti numbers from counting decorated forests (F, d);
  * the Bockstein complex on those classes, whose homology B² must match
    r_k + p_k + p_{k-1} read off from 2H;
  * integral homology rebuilt from the three by universal coefficients.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

from .buildcore import BuildingSet
from .errors import ConsistencyError
from .exactlinalg import HomologyGroup, Subspace, rank_f2
from .forestcx import children_sum, forest_set, forests_with_root, forest_cohomology, parent
from .posetcx import is_pi_m

Degrees = dict  # degree -> HomologyGroup


def _clean(d: dict) -> dict:
    return {k: v for k, v in sorted(d.items()) if not v.is_zero}


def _sum_tables(rows) -> dict:
    total: dict = {}
    for row in rows:
        for k, h in row.items():
            total[k] = total.get(k, HomologyGroup()) + h
    return _clean(total)


@dataclass
class GradedHomologyTable:
    building: BuildingSet
    entries: dict  # Subspace -> {degree: HomologyGroup}, canonical order
    total: dict = field(default=None)

    def __post_init__(self):
        if self.total is None:
            self.total = _sum_tables(self.entries.values())

    def __getitem__(self, a: Subspace) -> dict:
        return self.entries.get(a, {})

    def betti(self) -> list[int]:
        top = max(self.total, default=-1)
        return [self.total.get(k, HomologyGroup()).rank for k in range(top + 1)]


@dataclass
class Mod2Table:
    building: BuildingSet
    entries: dict  # Subspace -> {degree: count}
    total: dict = field(default=None)

    def __post_init__(self):
        if self.total is None:
            tot: dict = {}
            for row in self.entries.values():
                for k, c in row.items():
                    tot[k] = tot.get(k, 0) + c
            self.total = dict(sorted(tot.items()))

    def betti(self) -> list[int]:
        top = max(self.total, default=-1)
        return [self.total.get(k, 0) for k in range(top + 1)]


# ---------------------------------------------------------------------------
# parallel helper

_WORKER_G: BuildingSet | None = None


def _init_worker(g: BuildingSet) -> None:
    global _WORKER_G
    _WORKER_G = g


def _call(args):
    fn, a = args
    return fn(_WORKER_G, a)


def map_pieces(g: BuildingSet, fn, items: list, jobs: int = 1) -> list:
    """fn(g, a) for each a, optionally in a process pool; order preserved."""
    if jobs <= 1 or len(items) < 2:
        return [fn(g, a) for a in items]
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(g,)) as ex:
        return list(ex.map(_call, [(fn, a) for a in items], chunksize=max(1, len(items) // (4 * jobs))))


# ---------------------------------------------------------------------------
# 2H from the doubled forest complex


def _piece_2h(g: BuildingSet, a: int) -> dict:
    if not is_pi_m(g, a, 2):
        return {}
    return _clean({k: h.halved() for k, h in forest_cohomology(g, a, 2, doubled=True).items()})


def _piece_doubled(g: BuildingSet, a: int) -> dict:
    if not is_pi_m(g, a, 2):
        return {}
    return forest_cohomology(g, a, 2, doubled=True)


def graded_homology(g: BuildingSet, jobs: int = 1) -> GradedHomologyTable:
    """2H_*(Ȳ(ℝ)) graded by the lattice."""
    lat = g.lattice
    idx = list(range(len(lat)))
    rows = map_pieces(g, _piece_2h, idx, jobs)
    return GradedHomologyTable(g, {lat.elements[a]: r for a, r in zip(idx, rows)})


def doubled_table(g: BuildingSet, jobs: int = 1) -> GradedHomologyTable:
    """Unhalved doubled-forest cohomology per piece (before applying 2·)."""
    lat = g.lattice
    idx = list(range(len(lat)))
    rows = map_pieces(g, _piece_doubled, idx, jobs)
    return GradedHomologyTable(g, {lat.elements[a]: r for a, r in zip(idx, rows)})


# ---------------------------------------------------------------------------
# mod-2 classes


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for i, a in p.items():
        for j, b in q.items():
            out[i + j] = out.get(i + j, 0) + a * b
    return out


def _window(e: int) -> dict:
    """t + t^2 + ... + t^(e-1)."""
    return {d: 1 for d in range(1, e)}


def mod2_polynomial(g: BuildingSet, a: int) -> dict:
    """Count of classes (F, d) with root a, by degree κ, via the tree recursion."""
    memo = g.cache.setdefault("mod2poly", {})
    if a in memo:
        return memo[a]
    lat = g.lattice
    if a == 0:
        out = {0: 1}
    else:
        out = {0: 1}
        for k in lat.components(a):
            tree: dict = {}
            for c in lat.below(k):
                if c == k:
                    continue
                for deg, n in _poly_mul(_window(lat.dims[k] - lat.dims[c]), mod2_polynomial(g, c)).items():
                    tree[deg] = tree.get(deg, 0) + n
            out = _poly_mul(out, tree)
        out = {k: v for k, v in out.items() if v}
    memo[a] = dict(sorted(out.items()))
    return memo[a]


def forest_classes(g: BuildingSet, a: int) -> list[tuple]:
    """Explicit basis labels (F, d): d is a tuple aligned with F's node order."""
    lat = g.lattice
    out = []
    for f in forests_with_root(g, a, 1):
        ranges = [range(1, lat.dims[n] - lat.dims[children_sum(g, f, n)]) for n in f]
        out.extend((f, d) for d in product(*ranges))
    return out


def mod2_betti(g: BuildingSet) -> Mod2Table:
    lat = g.lattice
    return Mod2Table(g, {lat.elements[a]: mod2_polynomial(g, a) for a in range(len(lat))})


# ---------------------------------------------------------------------------
# Bockstein complex


def kappa(cls: tuple) -> int:
    return sum(cls[1])


def defect(cls: tuple) -> int:
    return sum(1 for x in cls[1] if x % 2 == 0)


def bockstein_d1(cls: tuple) -> list[tuple]:
    f, d = cls
    return [(f, d[:i] + (x - 1,) + d[i + 1:]) for i, x in enumerate(d) if x % 2 == 0]


def beta_g(g: BuildingSet, cls: tuple, node: int, root: int):
    """β_G on one class with the given root; None when it vanishes."""
    f, d = cls
    lat = g.lattice
    if node in f:
        return None
    new = tuple(sorted(f + (node,)))
    if new not in forest_set(g, root):
        return None
    e = lat.dims[node] - lat.dims[children_sum(g, new, node)]
    if e % 2:
        return None
    dn = dict(zip(f, d))
    dn[node] = e - 1
    p = parent(g, new, node)
    if p is not None:
        dn[p] -= e
        if dn[p] < 1:
            return None
    return new, tuple(dn[n] for n in new)


def bockstein_d2(g: BuildingSet, cls: tuple, root: int) -> list[tuple]:
    out = []
    for node in g.elements_below(root):
        r = beta_g(g, cls, node, root)
        if r is not None:
            out.append(r)
    return out


@dataclass
class BocksteinComplex:
    root: int
    basis: list
    index: dict
    d1: list  # per basis element: bitmask of images
    d2: list

    @property
    def beta(self) -> list:
        return [x ^ y for x, y in zip(self.d1, self.d2)]


def _mask(index: dict, images: list) -> int:
    m = 0
    for c in images:
        m ^= 1 << index[c]
    return m


def bockstein_complex(g: BuildingSet, a: int) -> BocksteinComplex:
    basis = sorted(forest_classes(g, a), key=lambda c: (kappa(c), c))
    index = {c: i for i, c in enumerate(basis)}
    d1 = [_mask(index, bockstein_d1(c)) for c in basis]
    d2 = [_mask(index, bockstein_d2(g, c, a)) for c in basis]
    return BocksteinComplex(a, basis, index, d1, d2)


def _apply(mat: list, vec: int) -> int:
    out = 0
    i = 0
    while vec:
        if vec & 1:
            out ^= mat[i]
        vec >>= 1
        i += 1
    return out


def bockstein_relations(bc: BocksteinComplex) -> dict:
    """∂₁², ∂₂², ∂₁∂₂+∂₂∂₁ all vanish over F₂."""
    n = len(bc.basis)
    ok = {"d1d1": True, "d2d2": True, "anticommute": True}
    for i in range(n):
        if _apply(bc.d1, bc.d1[i]):
            ok["d1d1"] = False
        if _apply(bc.d2, bc.d2[i]):
            ok["d2d2"] = False
        if _apply(bc.d1, bc.d2[i]) ^ _apply(bc.d2, bc.d1[i]):
            ok["anticommute"] = False
    return ok


def bockstein_homology(bc: BocksteinComplex) -> dict[int, int]:
    """F₂ dimensions of H(classes, β) per degree κ."""
    beta = bc.beta
    by_deg: dict = {}
    for i, c in enumerate(bc.basis):
        by_deg.setdefault(kappa(c), []).append(i)
    rank = {k: rank_f2(beta[i] for i in ids) for k, ids in by_deg.items()}
    out = {}
    for k, ids in by_deg.items():
        dim = len(ids) - rank[k] - rank.get(k + 1, 0)
        if dim:
            out[k] = dim
    return dict(sorted(out.items()))


def _piece_b2(g: BuildingSet, a: int) -> dict:
    return bockstein_homology(bockstein_complex(g, a))


def bockstein_b2(g: BuildingSet, jobs: int = 1) -> dict:
    """Total B² dimensions per degree, plus the per-piece breakdown under 'pieces'."""
    lat = g.lattice
    idx = list(range(len(lat)))
    rows = map_pieces(g, _piece_b2, idx, jobs)
    total: dict = {}
    for r in rows:
        for k, v in r.items():
            total[k] = total.get(k, 0) + v
    return {"total": dict(sorted(total.items())),
            "pieces": {lat.elements[a]: r for a, r in zip(idx, rows)}}


def expected_b2(row: dict) -> dict:
    """r_k + p_k + p_{k-1} from a 2H row."""
    top = max(row, default=-1)
    out = {}
    for k in range(top + 2):
        h = row.get(k, HomologyGroup())
        prev = row.get(k - 1, HomologyGroup())
        v = h.rank + h.two_power_count() + prev.two_power_count()
        if v:
            out[k] = v
    return out


# ---------------------------------------------------------------------------
# integral synthesis


def _lift(h: HomologyGroup) -> HomologyGroup:
    """Each Z/2^j summand of 2H comes from Z/2^(j+1) in H."""
    return HomologyGroup(h.rank, tuple(2 * t if t % 2 == 0 else t for t in h.torsion))


def synthesize_row(two_h: dict, mod2: dict, label: str = "") -> dict:
    """Integral homology of one piece; raises ConsistencyError if s_k < 0."""
    top = max(list(two_h) + list(mod2), default=-1)
    out = {}
    s_prev = 0
    for k in range(top + 2):
        h = two_h.get(k, HomologyGroup())
        p_prev = two_h.get(k - 1, HomologyGroup()).two_power_count()
        s = mod2.get(k, 0) - h.rank - h.two_power_count() - p_prev - s_prev
        if s < 0:
            raise ConsistencyError(f"negative Z/2 count {s} in degree {k} {label}".strip())
        g = _lift(h) + HomologyGroup(0, (2,) * s)
        if not g.is_zero:
            out[k] = g
        s_prev = s
    if s_prev:
        raise ConsistencyError(f"unbalanced universal-coefficient count {label}".strip())
    return out


def integral_synthesis(g: BuildingSet, jobs: int = 1, check_bockstein: bool = True,
                       two_h: GradedHomologyTable | None = None) -> GradedHomologyTable:
    two_h = two_h or graded_homology(g, jobs)
    mod2 = mod2_betti(g)
    b2 = bockstein_b2(g, jobs)["pieces"] if check_bockstein else None
    entries = {}
    for a, row in two_h.entries.items():
        if check_bockstein and b2[a] != expected_b2(row):
            raise ConsistencyError(
                f"Bockstein page {b2[a]} disagrees with {expected_b2(row)} at {a!r}")
        entries[a] = synthesize_row(row, mod2.entries[a], repr(a))
    return GradedHomologyTable(g, entries)
