"""Divisibility subposets Π^(m) of the lattice and their interval chain complexes.

A chain in [0, A] is a tuple of lattice indices (A_1, ..., A_k) with
0 < A_1 < ... < A_k = A; it sits in degree k.  The lone chain of [0, 0] is
the empty tuple in degree 0.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .buildcore import BuildingSet
from .errors import InputError
from .exactlinalg import ChainComplex, HomologyGroup, Subspace, complex_cohomology

Chain = tuple


@dataclass(frozen=True, eq=False)
class PosetView:
    building: BuildingSet
    m: int
    members: frozenset
    _chains: dict = field(default_factory=dict, repr=False)

    @property
    def lattice(self):
        return self.building.lattice

    def __contains__(self, a) -> bool:
        if isinstance(a, Subspace):
            return a in self.lattice and self.lattice.index(a) in self.members
        return a in self.members

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def below(self, a: int) -> list[int]:
        """Members strictly between 0 and a, ascending."""
        return [b for b in self.lattice.below(a) if b != 0 and b != a and b in self.members]

    def chains_to(self, a: int) -> list[Chain]:
        """All chains of the interval [0, a]; memoised per top element."""
        if a not in self._chains:
            if a == 0:
                out = [()]
            else:
                out = [(a,)]
                for b in self.below(a):
                    out.extend(c + (a,) for c in self.chains_to(b))
            self._chains[a] = out
        return self._chains[a]


def is_pi_m(g: BuildingSet, a: int, m: int) -> bool:
    """A ∈ Π^(m) iff every component of A has dimension divisible by m."""
    lat = g.lattice
    return all(lat.dims[c] % m == 0 for c in lat.components(a))


def pi_m_members(g: BuildingSet, m: int) -> PosetView:
    if m < 1:
        raise InputError("m must be a positive integer")
    lat = g.lattice
    members = frozenset(a for a in range(len(lat)) if is_pi_m(g, a, m))
    return PosetView(g, m, members)


def chain_boundary(chain: Chain) -> dict:
    """Delete interior entries A_i (1 <= i < k) with sign (-1)^i."""
    out = {}
    for i in range(1, len(chain)):
        out[chain[:i - 1] + chain[i:]] = -1 if i % 2 else 1
    return out


def _resolve(view: PosetView, a) -> int:
    if isinstance(a, Subspace):
        if a not in view.lattice:
            raise InputError(f"{a!r} is not in the lattice")
        a = view.lattice.index(a)
    if a not in view.members:
        raise InputError(f"element {a} is not in Π^({view.m})")
    return a


def interval_complex(a, view: PosetView) -> ChainComplex:
    a = _resolve(view, a)
    bases = defaultdict(list)
    for c in sorted(view.chains_to(a), key=lambda c: (len(c), c)):
        bases[len(c)].append(c)
    return ChainComplex.from_boundary(bases, chain_boundary)


def interval_homology(a, view: PosetView) -> dict[int, HomologyGroup]:
    return {k: h for k, h in interval_complex(a, view).homology().items() if not h.is_zero}


def whitney_homology(g: BuildingSet, m: int) -> dict[Subspace, dict[int, HomologyGroup]]:
    view = pi_m_members(g, m)
    lat = g.lattice
    return {lat.elements[a]: interval_homology(a, view) for a in view.sorted_members()}


def gm_complement_homology(g: BuildingSet) -> dict[int, HomologyGroup]:
    """Homology of V minus the union of the annihilators of 𝒢.

    Sum over A in the full lattice of the interval cohomology of [0, A],
    placed in degree dim A - (cochain degree).
    """
    view = pi_m_members(g, 1)
    lat = g.lattice
    total: dict[int, HomologyGroup] = {}
    for a in view.sorted_members():
        cx = interval_complex(a, view)
        for k in cx.degrees:
            h = complex_cohomology(cx, k)
            if not h.is_zero:
                deg = lat.dims[a] - k
                total[deg] = total.get(deg, HomologyGroup()) + h
    return dict(sorted(total.items()))
