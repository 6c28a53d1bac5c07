"""Nested-set forests, the forest complex and its comparison map to chains.

A forest is a frozenset of lattice indices of building elements.  Nodes are
always listed in ascending index order, which is a linear extension of
containment (smaller subspaces come first).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import product

from .buildcore import BuildingSet
from .errors import InputError
from .exactlinalg import ChainComplex, HomologyGroup, Subspace, complex_cohomology
from .posetcx import is_pi_m


@dataclass(frozen=True)
class Forest:
    nodes: tuple  # ascending lattice indices
    root: int

    def __len__(self):
        return len(self.nodes)

    @property
    def nodeset(self) -> frozenset:
        return frozenset(self.nodes)


def _tag(g: BuildingSet, name: str) -> dict:
    return g.cache.setdefault(name, {})


def _resolve(g: BuildingSet, a) -> int:
    if isinstance(a, Subspace):
        if a not in g.lattice:
            raise InputError(f"{a!r} is not in the lattice")
        return g.lattice.index(a)
    if not 0 <= a < len(g.lattice):
        raise InputError(f"lattice index {a} out of range")
    return a


def forests_with_root(g: BuildingSet, a: int, m: int = 1) -> list[tuple]:
    """All m-divisible forests with root a, as ascending node tuples."""
    memo = _tag(g, "forests")
    key = (a, m)
    if key in memo:
        return memo[key]
    lat = g.lattice
    if a == 0:
        out = [()]
    elif not is_pi_m(g, a, m):
        out = []
    else:
        per_comp = [_trees(g, k, m) for k in lat.components(a)]
        out = sorted(tuple(sorted(sum(parts, ()))) for parts in product(*per_comp))
    memo[key] = out
    return out


def _trees(g: BuildingSet, k: int, m: int) -> list[tuple]:
    memo = _tag(g, "trees")
    key = (k, m)
    if key not in memo:
        out = []
        for c in g.lattice.below(k):
            if c != k:
                out.extend(f + (k,) for f in forests_with_root(g, c, m))
        memo[key] = out
    return memo[key]


def forest_set(g: BuildingSet, a: int, m: int = 1) -> frozenset:
    memo = _tag(g, "forest_sets")
    if (a, m) not in memo:
        memo[(a, m)] = frozenset(forests_with_root(g, a, m))
    return memo[(a, m)]


def enumerate_forests(g: BuildingSet, a, m: int = 1) -> list[Forest]:
    a = _resolve(g, a)
    return [Forest(f, a) for f in forests_with_root(g, a, m)]


def is_forest(g: BuildingSet, nodes) -> bool:
    """Direct check: every antichain of size >= 2 is a decomposition of its sum."""
    from itertools import combinations
    lat = g.lattice
    nodes = sorted(nodes)
    if not all(g.is_element[n] for n in nodes):
        return False
    for r in range(2, len(nodes) + 1):
        for sub in combinations(nodes, r):
            if any(lat.leq(x, y) for x in sub for y in sub if x != y):
                continue
            s = lat.join_all(sub)
            if tuple(sorted(sub)) != lat.components(s):
                return False
    return True


def children_sum(g: BuildingSet, nodes, node: int) -> int:
    """child_F(G): the lattice element summing the nodes strictly below G."""
    lat = g.lattice
    return lat.join_all(n for n in nodes if n != node and lat.leq(n, node))


def parent(g: BuildingSet, nodes, node: int):
    lat = g.lattice
    above = [n for n in nodes if n != node and lat.leq(node, n)]
    return min(above) if above else None


def forest_boundary(g: BuildingSet, root: int):
    """∂F = Σ (-1)^(i-1) F∖G_i over nodes that are not components of the root."""
    comps = set(g.lattice.components(root))

    def bd(f: tuple) -> dict:
        out = {}
        for i, node in enumerate(f):
            if node not in comps:
                out[f[:i] + f[i + 1:]] = 1 if i % 2 == 0 else -1
        return out
    return bd


def forest_complex(g: BuildingSet, a, m: int = 1, doubled: bool = False) -> ChainComplex:
    a = _resolve(g, a)
    if a != 0 and not is_pi_m(g, a, m):
        raise InputError(f"element {a} is not in Π^({m})")
    bases = defaultdict(list)
    for f in forests_with_root(g, a, m):
        bases[len(f)].append(f)
    cx = ChainComplex.from_boundary(bases, forest_boundary(g, a))
    return cx.scaled(2) if doubled else cx


def linear_extensions(g: BuildingSet, nodes: tuple):
    """Yield (permutation of positions, parity) for every linear extension."""
    lat = g.lattice
    k = len(nodes)
    below = [[j for j in range(k) if j != i and lat.leq(nodes[j], nodes[i])] for i in range(k)]

    def rec(prefix: list, used: int):
        if len(prefix) == k:
            inv = sum(1 for x in range(k) for y in range(x + 1, k) if prefix[x] > prefix[y])
            yield tuple(prefix), inv % 2
            return
        for i in range(k):
            if not used >> i & 1 and all(used >> j & 1 for j in below[i]):
                prefix.append(i)
                yield from rec(prefix, used | 1 << i)
                prefix.pop()
    yield from rec([], 0)


def sigma(g: BuildingSet, nodes: tuple) -> dict:
    """σ(F) = (-1)^(k-1) Σ_π sign(π) (0 < F_π(1) < F_π(1)+F_π(2) < ... < A)."""
    lat = g.lattice
    nodes = tuple(sorted(nodes))
    if not nodes:
        return {(): 1}
    glob = -1 if (len(nodes) - 1) % 2 else 1
    out: dict = {}
    for perm, par in linear_extensions(g, nodes):
        acc, chain = 0, []
        for i in perm:
            acc = lat.join(acc, nodes[i])
            chain.append(acc)
        c = tuple(chain)
        out[c] = out.get(c, 0) + (-glob if par else glob)
    return {c: v for c, v in out.items() if v}


def forest_preimage(g: BuildingSet, chain: tuple):
    """The forest whose σ-image contains ``chain`` (with its coefficient), else None."""
    lat = g.lattice
    nodes = []
    prev = 0
    for a in chain:
        if not lat.lt(prev, a):
            return None
        new = [c for c in lat.components(a) if not lat.leq(c, prev)]
        if len(new) != 1:
            return None
        nodes.append(new[0])
        prev = a
    f = tuple(sorted(nodes))
    if len(set(f)) != len(f):
        return None
    if chain and f not in forest_set(g, chain[-1]):
        return None
    coeff = sigma(g, f).get(tuple(chain))
    return (f, coeff) if coeff else None


def is_forest_chain(g: BuildingSet, chain: tuple) -> bool:
    return forest_preimage(g, chain) is not None


def forest_cohomology(g: BuildingSet, a, m: int = 1, doubled: bool = False) -> dict[int, HomologyGroup]:
    """Cohomology of the forest complex at forest degree k, reported at dim A - k."""
    a = _resolve(g, a)
    cx = forest_complex(g, a, m, doubled)
    dim = g.lattice.dims[a]
    out = {}
    for k in cx.degrees:
        h = complex_cohomology(cx, k)
        if not h.is_zero:
            out[dim - k] = h
    return dict(sorted(out.items()))


def doubled_forest_cohomology(g: BuildingSet, a) -> dict[int, HomologyGroup]:
    a = _resolve(g, a)
    if not is_pi_m(g, a, 2):
        raise InputError(f"element {a} is not in Π^(2)")
    return forest_cohomology(g, a, 2, doubled=True)
