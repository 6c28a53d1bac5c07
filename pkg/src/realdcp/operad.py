"""Chain-level cooperad maps on interval complexes.

Chains here are tuples of Subspace values (A_1 < ... < A_k = A), the
implicit bottom being 0, so the same code serves building sets on
different ambient spaces.  Formal sums are dicts from labels to integers.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .buildcore import (
    INVALID, BuildingSet, WeakMorphism, classify_map, direct_sum_space, restrict,
)
from .errors import InputError
from .exactlinalg import Subspace, intersect, rref, zero_subspace
from .posetcx import chain_boundary, interval_complex, is_pi_m, pi_m_members


def _add(acc: dict, key, c: int) -> None:
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def linear_combination(terms) -> dict:
    out: dict = {}
    for key, c in terms:
        _add(out, key, c)
    return out


def boundary_sum(x: dict) -> dict:
    return linear_combination((c2, a * b) for c, a in x.items()
                              for c2, b in chain_boundary(c).items())


def tensor_boundary(t: dict) -> dict:
    """∂(x⊗y) = ∂x⊗y + (-1)^|x| x⊗∂y on formal sums keyed by (x, y)."""
    out: dict = {}
    for (x, y), c in t.items():
        for x2, b in chain_boundary(x).items():
            _add(out, (x2, y), c * b)
        s = -1 if len(x) % 2 else 1
        for y2, b in chain_boundary(y).items():
            _add(out, (x, y2), c * b * s)
    return out


@dataclass(frozen=True)
class TensorChain:
    left: tuple
    right: tuple
    sign: int


def _require_weak(f: WeakMorphism) -> None:
    if f.classification == INVALID:
        raise InputError("map is not a weak morphism")


def pullback_chain(f: WeakMorphism, chain: tuple, m: int = 1):
    """Split a chain of the target building set along ker f*; None means zero."""
    _require_weak(f)
    if not chain:
        return TensorChain((), (), 1)
    ker = f.kernel
    cut = intersect(chain[-1], ker)
    if cut.dim == 0:
        l = 0
    else:
        try:
            l = chain.index(cut) + 1
        except ValueError:
            return None
    left = chain[:l]
    right = tuple(f.pull(a) for a in chain[l:])
    if m > 1:
        tl, src = f.target.lattice, f.source.lattice
        if not all(is_pi_m(f.target, tl.index(a), m) for a in left):
            return None
        if not all(r in src and is_pi_m(f.source, src.index(r), m) for r in right):
            return None
    return TensorChain(left, right, 1)


def pullback_sum(f: WeakMorphism, x: dict, m: int = 1) -> dict:
    out: dict = {}
    for c, v in x.items():
        t = pullback_chain(f, c, m)
        if t is not None:
            _add(out, (t.left, t.right), v * t.sign)
    return out


def _step_sequences(a: int, b: int):
    for pos in combinations(range(a + b), a):
        seq = [1] * (a + b)
        for p in pos:
            seq[p] = 0
        yield seq


def shuffle(x: tuple, y: tuple, nx: int, ny: int) -> dict:
    """Signed interleavings of x (ambient nx) and y (ambient ny) into nx + ny.

    Sign: (-1)^(number of y-steps taken before an x-step).
    """
    zx, zy = zero_subspace(nx), zero_subspace(ny)
    out: dict = {}
    for seq in _step_sequences(len(x), len(y)):
        i = j = inv = 0
        chain = []
        for s in seq:
            if s == 0:
                inv += j
                i += 1
            else:
                j += 1
            chain.append(direct_sum_space(x[i - 1] if i else zx, y[j - 1] if j else zy))
        _add(out, tuple(chain), -1 if inv % 2 else 1)
    return out


def shuffle_sum(t: dict, nx: int, ny: int) -> dict:
    out: dict = {}
    for (x, y), c in t.items():
        for ch, s in shuffle(x, y, nx, ny).items():
            _add(out, ch, c * s)
    return out


def phi(f: WeakMorphism, x: dict, m: int = 1) -> dict:
    """φ_f^* followed by the shuffle product into 𝒢'|_ker ⊕ 𝒢."""
    return shuffle_sum(pullback_sum(f, x, m), f.target.ambient_dim, f.source.ambient_dim)


def diagonal(g: BuildingSet) -> WeakMorphism:
    from .buildcore import direct_sum
    n = g.ambient_dim
    mat = [[1 if i % n == j else 0 for j in range(n)] for i in range(2 * n)]
    return classify_map(mat, g, direct_sum(g, g))


# ---------------------------------------------------------------------------
# Whitney classes and the product


@dataclass(frozen=True, eq=False)
class WhitneyClass:
    building: BuildingSet
    support: Subspace
    chains: dict  # chain (tuple of Subspace) -> coefficient

    @property
    def degree(self) -> int:
        return len(next(iter(self.chains))) if self.chains else 0

    @property
    def is_zero_chain(self) -> bool:
        return not self.chains


def whitney_product(a: WhitneyClass, b: WhitneyClass, m: int = 1,
                    diag: WeakMorphism | None = None) -> WhitneyClass:
    if a.building != b.building:
        raise InputError("classes live on different building sets")
    g = a.building
    n = g.ambient_dim
    top = intersect(a.support, b.support)
    if top.dim:
        return WhitneyClass(g, zero_subspace(n), {})
    diag = diag or diagonal(g)
    sh = linear_combination((ch, x * y * s)
                            for cx, x in a.chains.items()
                            for cy, y in b.chains.items()
                            for ch, s in shuffle(cx, cy, n, n).items())
    pulled = pullback_sum(diag, sh, m)
    out = linear_combination((right, c) for (left, right), c in pulled.items())
    from .exactlinalg import span_sum
    return WhitneyClass(g, span_sum(a.support, b.support), out)


def class_is_nonzero(w: WhitneyClass, m: int = 1) -> bool:
    """Whether a cycle representative is rationally nonzero in H_*([0, A])."""
    if not w.chains:
        return False
    g = w.building
    lat = g.lattice
    view = pi_m_members(g, m)
    top = lat.index(w.support)
    cx = interval_complex(top, view)
    k = w.degree
    idx = {c: i for i, c in enumerate(cx.bases.get(k, ()))}
    vec = [0] * len(idx)
    for ch, c in w.chains.items():
        vec[idx[tuple(lat.index(s) for s in ch)]] += c
    if any(boundary_sum({ch: c for ch, c in w.chains.items()}).values()):
        raise InputError("representative is not a cycle")
    cols = [[Fraction(v) for v in col_vec] for col_vec in _dense_columns(cx, k + 1)]
    base = rref(cols, len(idx)) if cols else zero_subspace(len(idx))
    return any(base.reduce([Fraction(v) for v in vec]))


def _dense_columns(cx, k: int) -> list[list[int]]:
    if k not in cx.boundaries:
        return []
    d = cx.boundaries[k]
    out = []
    for col in d.columns:
        v = [0] * d.nrows
        for i, x in col.items():
            v[i] = x
        out.append(v)
    return out


def whitney_cycles(g: BuildingSet, a: Subspace, m: int = 1) -> list[WhitneyClass]:
    """A basis of cycles of top degree in C_*([0, A]) (rational kernel basis)."""
    lat = g.lattice
    view = pi_m_members(g, m)
    top = lat.index(a)
    cx = interval_complex(top, view)
    k = max(cx.degrees)
    basis = cx.bases[k]
    if k == 0:
        return [WhitneyClass(g, a, {(): 1})]
    d = cx.boundaries.get(k)
    rows = [[0] * len(basis) for _ in range(d.nrows)] if d else []
    if d:
        for j, col in enumerate(d.columns):
            for i, x in col.items():
                rows[i][j] = x
    kernel = _integer_kernel(rows, len(basis))
    return [WhitneyClass(g, a, {tuple(lat.elements[s] for s in basis[j]): v
                                for j, v in enumerate(vec) if v})
            for vec in kernel]


def _integer_kernel(rows: list[list[int]], n: int) -> list[list[int]]:
    from math import lcm
    s = rref(rows, n) if rows else zero_subspace(n)
    free = [j for j in range(n) if j not in s.pivots]
    out = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for r, p in zip(s.rows, s.pivots):
            v[p] = -r[fcol]
        den = lcm(*[x.denominator for x in v])
        out.append([int(x * den) for x in v])
    return out


# ---------------------------------------------------------------------------
# composition law


@dataclass(frozen=True)
class CompositionReport:
    samples: int
    nonzero_samples: int
    max_discrepancy: int


def compose_maps(f: WeakMorphism, g: WeakMorphism) -> WeakMorphism:
    """g ∘ f as a weak morphism from f's source to g's target."""
    if f.target != g.source:
        raise InputError("maps are not composable")
    mf, mg = f.matrix, g.matrix
    mat = [[sum((mg[i][k] * mf[k][j] for k in range(len(mf))), Fraction(0))
            for j in range(len(mf[0]) if mf else 0)] for i in range(len(mg))]
    return classify_map(mat, f.source, g.target)


def restricted_map(f: WeakMorphism, g: WeakMorphism) -> WeakMorphism:
    """g|im(f): 𝒢'|ker f* -> 𝒢''|ker (gf)*, same matrix as g."""
    gf = compose_maps(f, g)
    return classify_map(g.matrix, restrict(f.target, f.kernel), restrict(g.target, gf.kernel))


def composition_sides(f: WeakMorphism, g: WeakMorphism, chain: tuple, m: int = 1):
    """Both sides of the composition law on one chain, as triple tensors (x, u, v)."""
    gf = compose_maps(f, g)
    gr = restricted_map(f, g)
    lhs: dict = {}
    t = pullback_chain(g, chain, m)
    if t is not None:
        for (u, v), c in pullback_sum(f, {t.right: t.sign}, m).items():
            _add(lhs, (t.left, u, v), c)
    rhs: dict = {}
    t = pullback_chain(gf, chain, m)
    if t is not None:
        for (x, u), c in pullback_sum(gr, {t.left: t.sign}, m).items():
            _add(rhs, (x, u, t.right), c)
    return lhs, rhs


def sample_chains(g: BuildingSet, count: int, rng: random.Random, m: int = 1) -> list[tuple]:
    view = pi_m_members(g, m)
    lat = g.lattice
    members = view.sorted_members()
    out = []
    for _ in range(count):
        a = rng.choice(members)
        chains = view.chains_to(a)
        out.append(tuple(lat.elements[i] for i in rng.choice(chains)))
    return out


def verify_composition(f: WeakMorphism, g: WeakMorphism, samples: int = 20,
                       seed: int = 0, m: int = 1) -> CompositionReport:
    if f.target != g.source:
        raise InputError("maps are not composable")
    _require_weak(f)
    _require_weak(g)
    rng = random.Random(seed)
    worst = nonzero = 0
    for chain in sample_chains(g.target, samples, rng, m):
        lhs, rhs = composition_sides(f, g, chain, m)
        if lhs:
            nonzero += 1
        diff = dict(lhs)
        for k, v in rhs.items():
            _add(diff, k, -v)
        worst = max([worst] + [abs(v) for v in diff.values()])
    return CompositionReport(samples, nonzero, worst)


# ---------------------------------------------------------------------------
# orientations


def orientation_sign(parts, whole: Subspace) -> int:
    """Sign of the determinant taking the concatenated RREF bases of ``parts``
    to the RREF basis of ``whole``; 0 if they do not form a basis of it."""
    vecs = [list(r) for p in parts for r in p.rows]
    if len(vecs) != whole.dim:
        return 0
    piv = whole.pivots
    mat = [[v[p] for p in piv] for v in vecs]
    for v, row in zip(vecs, mat):
        recon = [sum((row[i] * whole.rows[i][j] for i in range(len(piv))), Fraction(0))
                 for j in range(whole.ambient_dim)]
        if recon != v:
            return 0
    return _det_sign(mat)


def _det_sign(mat) -> int:
    a = [row[:] for row in mat]
    n = len(a)
    sign = 1
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        if a[c][c] < 0:
            sign = -sign
        for r in range(c + 1, n):
            if a[r][c]:
                q = a[r][c] / a[c][c]
                a[r] = [x - q * y for x, y in zip(a[r], a[c])]
    return sign
