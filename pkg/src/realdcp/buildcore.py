"""Building sets, their lattices of sums, decompositions and maps between them.

Lattice elements are addressed by integer index; indices follow the
canonical order (dimension, then RREF key), so containment implies a
smaller-or-equal index.  Each element also carries the bitmask of the
generators it contains, which makes the order relation and meets cheap.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InputError, ResourceError
from .exactlinalg import (
    Subspace, _from_fractions, contains, full_space, kernel_dual, pullback,
    span_sum, zero_subspace,
)

DEFAULT_MAX_LATTICE = 20_000


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Lattice:
    """The lattice of all sums of subsets of ``generators``.

    ``building=True`` asserts the generators form a building set, which lets
    decompositions be read off as maximal generators below an element.
    """

    def __init__(self, generators: Sequence[Subspace], ambient_dim: int,
                 max_size: int = DEFAULT_MAX_LATTICE, building: bool = False,
                 elements: Sequence[Subspace] | None = None):
        gens = sorted(set(generators), key=lambda s: s.sort_key)
        for g in gens:
            if g.ambient_dim != ambient_dim:
                raise InputError("generator ambient dimension mismatch")
        gens = [g for g in gens if g.dim > 0]
        self.ambient_dim = ambient_dim
        self.generators = gens
        self.building = building
        self.max_size = max_size
        if elements is None:
            elements = self._generate()
        self.elements: list[Subspace] = sorted(elements, key=lambda s: s.sort_key)
        if len(self.elements) > max_size:
            raise ResourceError(f"lattice has more than {max_size} elements")
        self._index = {s: i for i, s in enumerate(self.elements)}
        self.dims = [s.dim for s in self.elements]
        self.masks = [self._mask_of(s) for s in self.elements]
        self._by_mask = {m: i for i, m in enumerate(self.masks)}
        self._join: dict = {}
        self._components: dict = {}
        self._below: dict = {}

    def _generate(self) -> list[Subspace]:
        zero = zero_subspace(self.ambient_dim)
        seen = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    if contains(x, g):
                        continue
                    y = span_sum(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > self.max_size:
                            raise ResourceError(
                                f"lattice exceeds {self.max_size} elements")
            frontier = nxt
        return list(seen)

    def _mask_of(self, s: Subspace) -> int:
        m = 0
        for i, g in enumerate(self.generators):
            if g.dim <= s.dim and contains(s, g):
                m |= 1 << i
        return m

    def __len__(self):
        return len(self.elements)

    def index(self, s: Subspace) -> int:
        try:
            return self._index[s]
        except KeyError:
            raise InputError(f"{s!r} is not in the lattice") from None

    def __contains__(self, s: Subspace) -> bool:
        return s in self._index

    @property
    def zero(self) -> int:
        return 0

    @property
    def root(self) -> int:
        return len(self.elements) - 1

    def leq(self, i: int, j: int) -> bool:
        return self.masks[i] & ~self.masks[j] == 0

    def lt(self, i: int, j: int) -> bool:
        return i != j and self.masks[i] & ~self.masks[j] == 0

    def below(self, i: int) -> list[int]:
        """Indices j with j <= i, ascending."""
        if i not in self._below:
            mi = self.masks[i]
            self._below[i] = [j for j in range(i + 1) if self.masks[j] & ~mi == 0]
        return self._below[i]

    def meet(self, i: int, j: int) -> int:
        return self._by_mask[self.masks[i] & self.masks[j]]

    def join(self, i: int, j: int) -> int:
        if self.leq(i, j):
            return j
        if self.leq(j, i):
            return i
        key = (i, j) if i < j else (j, i)
        if key not in self._join:
            self._join[key] = self.index(span_sum(self.elements[i], self.elements[j]))
        return self._join[key]

    def join_all(self, idxs: Iterable[int]) -> int:
        acc = 0
        for i in idxs:
            acc = self.join(acc, i)
        return acc

    def generators_below(self, i: int) -> list[int]:
        return list(_bits(self.masks[i]))

    def components(self, i: int) -> tuple:
        """Lattice indices of the components of the finest decomposition."""
        if i not in self._components:
            if self.building:
                self._components[i] = self._components_building(i)
            else:
                self._components[i] = self._components_merge(i)
        return self._components[i]

    def _components_building(self, i: int) -> tuple:
        inside = [self.index(self.generators[g]) for g in _bits(self.masks[i])]
        maximal = [a for a in inside if not any(self.lt(a, b) for b in inside)]
        return tuple(sorted(maximal))

    def _components_merge(self, i: int) -> tuple:
        """Block merging: fuse minimal dependent families until the sum is direct."""
        target = self.dims[i]
        blocks = [[g] for g in _bits(self.masks[i])]
        spans = [self.generators[b[0]] for b in blocks]
        while sum(s.dim for s in spans) != target:
            acc = zero_subspace(self.ambient_dim)
            stop = None
            for j, s in enumerate(spans):
                nxt = span_sum(acc, s)
                if nxt.dim < acc.dim + s.dim:
                    stop = j
                    break
                acc = nxt
            group = list(range(stop + 1))
            for j in range(stop):
                trial = [g for g in group if g != j]
                tot = span_sum(*[spans[g] for g in trial])
                if tot.dim < sum(spans[g].dim for g in trial):
                    group = trial
            merged = [g for j in group for g in blocks[j]]
            merged_span = span_sum(*[spans[j] for j in group])
            keep = [j for j in range(len(blocks)) if j not in group]
            blocks = [blocks[j] for j in keep] + [merged]
            spans = [spans[j] for j in keep] + [merged_span]
        return tuple(sorted(self.index(s) for s in spans))

    def is_indecomposable(self, i: int) -> bool:
        return i != 0 and len(self.components(i)) == 1


def generate_lattice(generators: Sequence[Subspace], ambient_dim: int | None = None,
                     max_size: int = DEFAULT_MAX_LATTICE) -> Lattice:
    if ambient_dim is None:
        if not generators:
            raise InputError("ambient_dim is required for an empty generator list")
        ambient_dim = generators[0].ambient_dim
    return Lattice(generators, ambient_dim, max_size=max_size)


@dataclass(frozen=True)
class Decomposition:
    parent: Subspace
    components: tuple


@dataclass(frozen=True, eq=False)
class BuildingSet:
    """A building set on V (ambient_dim = dim V); elements in canonical order.

    Construct with :func:`closure` unless the input is known to be closed.
    """

    ambient_dim: int
    elements: tuple
    max_lattice: int = DEFAULT_MAX_LATTICE
    _prebuilt: Lattice | None = field(default=None, repr=False)
    cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        els = tuple(sorted(set(self.elements), key=lambda s: s.sort_key))
        if any(e.dim == 0 for e in els):
            raise InputError("building sets cannot contain the zero subspace")
        object.__setattr__(self, "elements", els)

    def __eq__(self, other):
        return isinstance(other, BuildingSet) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __len__(self):
        return len(self.elements)

    def __reduce__(self):
        return (BuildingSet, (self.ambient_dim, self.elements, self.max_lattice))

    @cached_property
    def key(self) -> bytes:
        return b"#".join([str(self.ambient_dim).encode()] + [e.key for e in self.elements])

    @cached_property
    def hexkey(self) -> str:
        return hashlib.sha256(self.key).hexdigest()

    @cached_property
    def lattice(self) -> Lattice:
        if self._prebuilt is not None:
            lat = self._prebuilt
            lat.building = True
            return lat
        return Lattice(self.elements, self.ambient_dim, self.max_lattice, building=True)

    @cached_property
    def element_indices(self) -> tuple:
        return tuple(self.lattice.index(e) for e in self.elements)

    @cached_property
    def is_element(self) -> list:
        flags = [False] * len(self.lattice)
        for i in self.element_indices:
            flags[i] = True
        return flags

    @property
    def root(self) -> Subspace:
        return self.lattice.elements[self.lattice.root]

    def elements_below(self, i: int) -> list[int]:
        """Lattice indices of building elements contained in lattice element i."""
        lat = self.lattice
        return [j for j in lat.below(i) if self.is_element[j]]

    def is_building_set(self) -> bool:
        """Check 𝒢 = 𝒢̄ directly with the general decomposition routine."""
        lat = Lattice(self.elements, self.ambient_dim, self.max_lattice,
                      elements=self.lattice.elements)
        indec = {lat.elements[i] for i in range(1, len(lat)) if lat.is_indecomposable(i)}
        return indec == set(self.elements)


def decompose(u: Subspace, gens) -> Decomposition:
    """Finest decomposition of ``u`` w.r.t. a building set or generator list."""
    if isinstance(gens, BuildingSet):
        lat = gens.lattice
    else:
        gens = list(gens)
        lat = Lattice(gens, u.ambient_dim)
    if u not in lat:
        raise InputError(f"{u!r} is not a sum of generators")
    comps = lat.components(lat.index(u))
    return Decomposition(u, tuple(lat.elements[c] for c in comps))


def closure(arrangement: Sequence[Subspace], ambient_dim: int | None = None,
            max_lattice: int = DEFAULT_MAX_LATTICE) -> BuildingSet:
    """The building set of indecomposable lattice elements."""
    arrangement = list(arrangement)
    if ambient_dim is None:
        if not arrangement:
            raise InputError("ambient_dim is required for an empty arrangement")
        ambient_dim = arrangement[0].ambient_dim
    lat = Lattice(arrangement, ambient_dim, max_lattice)
    els = tuple(lat.elements[i] for i in range(1, len(lat)) if lat.is_indecomposable(i))
    pre = Lattice(els, ambient_dim, max_lattice, building=True, elements=lat.elements)
    return BuildingSet(ambient_dim, els, max_lattice, _prebuilt=pre)


def restrict(g: BuildingSet, w: Subspace) -> BuildingSet:
    """𝒢|_W, kept in the ambient coordinates of 𝒢."""
    els = tuple(e for e in g.elements if contains(w, e))
    return BuildingSet(g.ambient_dim, els, g.max_lattice)


def quotient_map(c: Subspace) -> list[list[Fraction]]:
    """Projection V* -> V*/C as a matrix acting on row vectors (v @ P).

    Coordinates on the quotient are the non-pivot coordinates of C's RREF.
    """
    n = c.ambient_dim
    free = [j for j in range(n) if j not in set(c.pivots)]
    mat = []
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        red = c.reduce(e)
        mat.append([red[j] for j in free])
    return mat


def project(s: Subspace, c: Subspace) -> Subspace:
    """(S + C)/C in quotient coordinates."""
    p = quotient_map(c)
    m = len(p[0]) if p else 0
    rows = [[sum((r[i] * p[i][j] for i in range(len(r))), Fraction(0)) for j in range(m)]
            for r in s.rows]
    return _from_fractions(rows, m)


@dataclass(frozen=True)
class QuotientResult:
    building_set: BuildingSet
    closure_changed: bool


def quotient(g: BuildingSet, c: Subspace, report: bool = False):
    """𝒢/C = closure of {(G+C)/C : G ⊄ C} inside V*/C."""
    if c not in g.lattice:
        raise InputError(f"{c!r} is not in the lattice of the building set")
    m = c.ambient_dim - c.dim
    images = sorted({project(e, c) for e in g.elements if not contains(c, e)},
                    key=lambda s: s.sort_key)
    images = [s for s in images if s.dim]
    bs = closure(images, m, g.max_lattice)
    res = QuotientResult(bs, set(bs.elements) != set(images))
    return res if report else res.building_set


def direct_sum(g1: BuildingSet, g2: BuildingSet) -> BuildingSet:
    n1, n2 = g1.ambient_dim, g2.ambient_dim
    els = [embed(e, n1 + n2, 0) for e in g1.elements]
    els += [embed(e, n1 + n2, n1) for e in g2.elements]
    return BuildingSet(n1 + n2, tuple(els), max(g1.max_lattice, g2.max_lattice))


def embed(s: Subspace, ambient: int, offset: int) -> Subspace:
    """Place ``s`` in coordinates offset..offset+n of a larger ambient space."""
    z = Fraction(0)
    rows = tuple(tuple([z] * offset + list(r) + [z] * (ambient - offset - s.ambient_dim))
                 for r in s.rows)
    return Subspace(ambient, rows, tuple(p + offset for p in s.pivots))


def direct_sum_space(x: Subspace, y: Subspace) -> Subspace:
    """X ⊕ Y inside the concatenated ambient space (already in RREF)."""
    n = x.ambient_dim + y.ambient_dim
    return Subspace(n, embed(x, n, 0).rows + embed(y, n, x.ambient_dim).rows,
                    x.pivots + tuple(p + x.ambient_dim for p in y.pivots))


# ---------------------------------------------------------------------------
# maps between building sets


MORPHISM = "morphism"
PURELY_OPERADIC = "purely-operadic"
WEAK = "weak"
INVALID = "invalid"


@dataclass(frozen=True, eq=False)
class WeakMorphism:
    """A linear map f: V -> V' (matrix of shape dim V' x dim V) between building sets."""

    matrix: tuple
    source: BuildingSet
    target: BuildingSet
    classification: str

    @cached_property
    def kernel(self) -> Subspace:
        return kernel_dual(self.matrix)

    def pull(self, s: Subspace) -> Subspace:
        return pullback(self.matrix, s)


def _freeze(matrix) -> tuple:
    from .exactlinalg import parse_rational
    return tuple(tuple(parse_rational(x) for x in row) for row in matrix)


def classify_map(f, source: BuildingSet, target: BuildingSet) -> WeakMorphism:
    mat = _freeze(f)
    if len(mat) != target.ambient_dim or (mat and len(mat[0]) != source.ambient_dim):
        raise InputError("map shape does not match the building sets")
    src = set(source.elements)
    pulled = [pullback(mat, g) for g in target.elements]
    weak = all(p.dim == 0 or p in src for p in pulled)
    if not weak:
        kind = INVALID
    elif all(p.dim > 0 for p in pulled):
        kind = MORPHISM
    else:
        ker = kernel_dual(mat)
        induced = {p for p in pulled if p.dim}
        kind = PURELY_OPERADIC if (ker in target.lattice and induced == src) else WEAK
    return WeakMorphism(mat, source, target, kind)


def is_purely_operadic(w: WeakMorphism) -> bool:
    return (w.classification != INVALID and w.kernel in w.target.lattice
            and {p for p in map(w.pull, w.target.elements) if p.dim} == set(w.source.elements))


def hyperplane_adjoinable(v: Sequence, g: BuildingSet) -> bool:
    """Whether 𝒢 ∪ {<v>} is guaranteed to be a building set."""
    from .exactlinalg import rref
    line = rref([v], g.ambient_dim)
    if line.dim == 0:
        raise InputError("v must be nonzero")
    lat = g.lattice
    for ci, c in enumerate(lat.elements):
        if not contains(c, line):
            continue
        if not any(contains(e, line) for e in (lat.elements[j] for j in g.elements_below(ci))):
            return False
    return True


def identity_matrix(n: int) -> tuple:
    return tuple(full_space(n).rows) if n else ()
