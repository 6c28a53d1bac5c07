"""Exact rational subspace algebra and integer normal forms.

Subspaces of a dual space V* are stored by their reduced row-echelon basis,
so equality of spans is equality of canonical keys.  Everything is exact:
rationals are :class:`fractions.Fraction`, integers are Python ints.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import InputError, StructuralError

__all__ = [
    "Subspace", "parse_rational", "format_rational", "rref", "zero_subspace",
    "full_space", "span_sum", "contains", "intersect", "is_direct",
    "annihilator", "pullback", "kernel_dual", "SparseIntMatrix", "SNFResult",
    "smith_normal_form", "rank_f2", "HomologyGroup", "ChainComplex",
    "complex_homology", "complex_cohomology",
]


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {x!r}") from exc
    raise InputError(f"not a rational: {x!r}")


def format_rational(q: Fraction) -> str:
    return str(q)


class Subspace:
    """A subspace of the dual space, as a canonical RREF basis.

    Build with :func:`rref`; the constructor trusts its input.
    """

    __slots__ = ("ambient_dim", "rows", "pivots", "key", "_hash")

    def __init__(self, ambient_dim: int, rows: tuple, pivots: tuple):
        self.ambient_dim = ambient_dim
        self.rows = rows
        self.pivots = pivots
        text = f"{ambient_dim}|" + ";".join(",".join(str(x) for x in r) for r in rows)
        self.key = text.encode()
        self._hash = hash(self.key)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def sort_key(self) -> tuple:
        return (len(self.rows), self.key)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Subspace"):
        return self.sort_key < other.sort_key

    def __repr__(self):
        return f"Subspace({self.key.decode()})"

    def __reduce__(self):
        return (Subspace, (self.ambient_dim, self.rows, self.pivots))

    def reduce(self, vec: Sequence[Fraction]) -> list[Fraction]:
        """Reduce ``vec`` modulo this subspace (zero iff ``vec`` lies in it)."""
        v = list(vec)
        for p, row in zip(self.pivots, self.rows):
            c = v[p]
            if c:
                for j in range(p, self.ambient_dim):
                    if row[j]:
                        v[j] -= c * row[j]
        return v


def _rref_rows(rows: list[list[Fraction]], width: int):
    rows = [r[:] for r in rows if any(r)]
    pivots = []
    r = 0
    for col in range(width):
        if r == len(rows):
            break
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        inv = 1 / prow[col]
        if inv != 1:
            prow = [x * inv for x in prow]
            rows[r] = prow
        for i in range(len(rows)):
            if i != r:
                c = rows[i][col]
                if c:
                    ri = rows[i]
                    rows[i] = [a - c * b for a, b in zip(ri, prow)]
        pivots.append(col)
        r += 1
    return tuple(tuple(x) for x in rows[:r]), tuple(pivots)


def rref(rows: Iterable[Sequence], ambient_dim: int | None = None) -> Subspace:
    """Canonical subspace spanned by ``rows``."""
    parsed = [[parse_rational(x) for x in row] for row in rows]
    if ambient_dim is None:
        if not parsed:
            raise InputError("ambient_dim is required for an empty row list")
        ambient_dim = len(parsed[0])
    for row in parsed:
        if len(row) != ambient_dim:
            raise InputError(f"row width {len(row)} != ambient_dim {ambient_dim}")
    basis, pivots = _rref_rows(parsed, ambient_dim)
    return Subspace(ambient_dim, basis, pivots)


def _from_fractions(rows: list[list[Fraction]], ambient_dim: int) -> Subspace:
    basis, pivots = _rref_rows(rows, ambient_dim)
    return Subspace(ambient_dim, basis, pivots)


def zero_subspace(n: int) -> Subspace:
    return Subspace(n, (), ())


def full_space(n: int) -> Subspace:
    one, zero = Fraction(1), Fraction(0)
    rows = tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))
    return Subspace(n, rows, tuple(range(n)))


def _check_ambient(*spaces: Subspace) -> int:
    dims = {s.ambient_dim for s in spaces}
    if len(dims) > 1:
        raise InputError(f"ambient dimension mismatch: {sorted(dims)}")
    return dims.pop()


def span_sum(*spaces: Subspace) -> Subspace:
    n = _check_ambient(*spaces)
    rows = [list(r) for s in spaces for r in s.rows]
    return _from_fractions(rows, n)


def contains(big: Subspace, small: Subspace) -> bool:
    """True iff ``small`` ⊆ ``big``."""
    _check_ambient(big, small)
    if small.dim > big.dim:
        return False
    return all(not any(big.reduce(r)) for r in small.rows)


def annihilator(s: Subspace) -> Subspace:
    """{x : <row, x> = 0 for every basis row}, in the same coordinates."""
    n = s.ambient_dim
    piv = set(s.pivots)
    out = []
    for f in range(n):
        if f in piv:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for p, row in zip(s.pivots, s.rows):
            v[p] = -row[f]
        out.append(v)
    return _from_fractions(out, n)


def intersect(s: Subspace, t: Subspace) -> Subspace:
    _check_ambient(s, t)
    return annihilator(span_sum(annihilator(s), annihilator(t)))


def is_direct(spaces: Sequence[Subspace]) -> bool:
    if not spaces:
        return True
    return sum(s.dim for s in spaces) == span_sum(*spaces).dim


def _as_matrix(m) -> list[list[Fraction]]:
    mat = [[parse_rational(x) for x in row] for row in m]
    if mat and len({len(r) for r in mat}) != 1:
        raise InputError("ragged matrix")
    return mat


def pullback(f, g: Subspace) -> Subspace:
    """f*(G) for a linear map f: V -> V' given as a dim V' x dim V matrix.

    Covectors are row vectors, so f*(phi) = phi @ f.
    """
    mat = _as_matrix(f)
    if len(mat) != g.ambient_dim:
        raise InputError(f"map has {len(mat)} rows but G lives in dimension {g.ambient_dim}")
    n = len(mat[0]) if mat else 0
    rows = [[sum((r[i] * mat[i][j] for i in range(len(r))), Fraction(0)) for j in range(n)]
            for r in g.rows]
    return _from_fractions(rows, n)


def kernel_dual(f) -> Subspace:
    """ker(f*) = Ann(im f) inside (V')*."""
    mat = _as_matrix(f)
    m = len(mat)
    if m == 0:
        raise InputError("empty matrix")
    cols = [[mat[i][j] for i in range(m)] for j in range(len(mat[0]))]
    return annihilator(_from_fractions(cols, m))


# ---------------------------------------------------------------------------
# integer matrices


@dataclass(frozen=True)
class SparseIntMatrix:
    """Column-sparse integer matrix; ``columns[j]`` maps row -> nonzero entry."""

    nrows: int
    ncols: int
    columns: tuple

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> "SparseIntMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        cols = tuple({i: int(rows[i][j]) for i in range(nrows) if rows[i][j]}
                     for j in range(ncols))
        return cls(nrows, ncols, cols)

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseIntMatrix":
        return cls(nrows, ncols, tuple({} for _ in range(ncols)))

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i][j] = v
        return out

    def scaled(self, k: int) -> "SparseIntMatrix":
        return SparseIntMatrix(self.nrows, self.ncols,
                               tuple({i: k * v for i, v in c.items()} for c in self.columns))

    def transpose(self) -> "SparseIntMatrix":
        cols = [dict() for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                cols[i][j] = v
        return SparseIntMatrix(self.ncols, self.nrows, tuple(cols))

    def compose(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        """self @ other."""
        if self.ncols != other.nrows:
            raise InputError("shape mismatch in compose")
        cols = []
        for col in other.columns:
            acc: dict[int, int] = {}
            for k, v in col.items():
                for i, w in self.columns[k].items():
                    acc[i] = acc.get(i, 0) + v * w
            cols.append({i: v for i, v in acc.items() if v})
        return SparseIntMatrix(self.nrows, other.ncols, tuple(cols))

    def is_zero(self) -> bool:
        return not any(self.columns)


@dataclass(frozen=True)
class SNFResult:
    factors: tuple  # nonzero invariant factors, s1 | s2 | ...

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def torsion(self) -> tuple:
        return tuple(f for f in self.factors if f > 1)


def _normalize_diagonal(diag: list[int]) -> tuple:
    d = sorted(abs(x) for x in diag if x)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            if g != d[i]:
                d[i], d[j] = g, d[i] * d[j] // g
    return tuple(sorted(d))


def smith_normal_form(m) -> SNFResult:
    """Invariant factors of an integer matrix (dense list-of-lists or sparse).

    Unit pivots are eliminated sparsely first, then the leftover block is
    diagonalised with smallest-absolute-value pivots.
    """
    if not isinstance(m, SparseIntMatrix):
        m = SparseIntMatrix.from_dense([[int(x) for x in row] for row in m])
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for j, col in enumerate(m.columns):
        for i, v in col.items():
            if v:
                rows.setdefault(i, {})[j] = v
                cols.setdefault(j, set()).add(i)
    diag: list[int] = []

    def drop(r: int, c: int) -> None:
        for cc in rows[r]:
            s = cols[cc]
            s.discard(r)
            if not s:
                del cols[cc]
        del rows[r]
        cols.pop(c, None)

    def row_op(i: int, factor: int, r: int) -> None:
        # row_i -= factor * row_r
        ri = rows[i]
        for cc, vv in rows[r].items():
            nv = ri.get(cc, 0) - factor * vv
            if nv:
                if cc not in ri:
                    cols.setdefault(cc, set()).add(i)
                ri[cc] = nv
            elif cc in ri:
                del ri[cc]
                s = cols[cc]
                s.discard(i)
                if not s:
                    del cols[cc]
        if not ri:
            del rows[i]

    progress = True
    while progress and cols:
        progress = False
        for c in sorted(cols):
            if c not in cols:
                continue
            best = None
            for r in cols[c]:
                if rows[r][c] in (1, -1):
                    cand = (len(rows[r]), r)
                    if best is None or cand < best:
                        best = cand
            if best is None:
                continue
            r = best[1]
            u = rows[r][c]
            for i in sorted(cols[c] - {r}):
                row_op(i, rows[i][c] * u, r)
            drop(r, c)
            diag.append(1)
            progress = True

    while rows:
        r, c, v = min(((i, j, x) for i, row in rows.items() for j, x in row.items()),
                      key=lambda t: (abs(t[2]), t[0], t[1]))
        clean = True
        for i in sorted(cols[c] - {r}):
            q = rows[i][c] // v
            if q:
                row_op(i, q, r)
            if i in rows and c in rows[i]:
                clean = False
        for j in sorted(set(rows[r]) - {c}):
            q = rows[r][j] // v
            if q:
                # column op: col_j -= q * col_c
                for k in list(cols[c]):
                    rk = rows[k]
                    nv = rk.get(j, 0) - q * rk[c]
                    if nv:
                        if j not in rk:
                            cols.setdefault(j, set()).add(k)
                        rk[j] = nv
                    elif j in rk:
                        del rk[j]
                        s = cols[j]
                        s.discard(k)
                        if not s:
                            del cols[j]
            if j in rows[r]:
                clean = False
        if clean:
            drop(r, c)
            diag.append(v)
    return SNFResult(_normalize_diagonal(diag))


def rank_f2(vectors: Iterable[int]) -> int:
    """Rank over F2 of vectors encoded as int bitsets."""
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            h = v.bit_length() - 1
            if h in basis:
                v ^= basis[h]
            else:
                basis[h] = v
                break
    return len(basis)


# ---------------------------------------------------------------------------
# homology


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def primary_parts(torsion: Iterable[int]) -> list[int]:
    """Prime-power cyclic summands of a torsion group, sorted."""
    out = []
    for t in torsion:
        out.extend(p ** e for p, e in _factor(t).items())
    return sorted(out)


def invariant_factors(prime_powers: Iterable[int]) -> tuple:
    by_prime: dict[int, list[int]] = {}
    for q in prime_powers:
        if q > 1:
            p = min(_factor(q))
            by_prime.setdefault(p, []).append(q)
    for lst in by_prime.values():
        lst.sort(reverse=True)
    n = max((len(v) for v in by_prime.values()), default=0)
    out = []
    for i in range(n):
        t = 1
        for lst in by_prime.values():
            if i < len(lst):
                t *= lst[i]
        out.append(t)
    return tuple(sorted(out))


@dataclass(frozen=True)
class HomologyGroup:
    """Z^rank + sum of Z/t over the torsion invariant factors."""

    rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        tors = tuple(self.torsion)
        if self.rank < 0 or any(t <= 1 for t in tors):
            raise InputError(f"bad homology group {self.rank}, {tors}")
        if any(tors[i + 1] % tors[i] for i in range(len(tors) - 1)):
            tors = invariant_factors(primary_parts(tors))
        object.__setattr__(self, "torsion", tors)

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __add__(self, other: "HomologyGroup") -> "HomologyGroup":
        return HomologyGroup(self.rank + other.rank,
                             invariant_factors(primary_parts(self.torsion + other.torsion)))

    def two_power_count(self) -> int:
        """Number of Z/2^j summands in the primary decomposition."""
        return sum(1 for t in self.torsion if t % 2 == 0)

    def halved(self) -> "HomologyGroup":
        """The subgroup 2·H."""
        return HomologyGroup(self.rank, tuple(t // 2 if t % 2 == 0 else t
                                              for t in self.torsion if t != 2))

    def __str__(self):
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        counts: dict = {}
        for t in self.torsion:
            counts[t] = counts.get(t, 0) + 1
        parts += [f"Z/{t}" if c == 1 else f"(Z/{t})^{c}" for t, c in counts.items()]
        return " + ".join(parts) if parts else "0"

    def as_dict(self, degree: int) -> dict:
        return {"degree": degree, "rank": self.rank, "torsion": list(self.torsion)}


@dataclass
class ChainComplex:
    """Free Z-complex: ``bases[k]`` labels C_k, ``boundaries[k]``: C_k -> C_{k-1}.

    d∘d = 0 is checked on construction.
    """

    bases: dict
    boundaries: dict
    _snf: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for k, d in self.boundaries.items():
            if d.ncols != len(self.bases.get(k, ())) or d.nrows != len(self.bases.get(k - 1, ())):
                raise StructuralError(f"boundary {k} has the wrong shape")
        for k in self.boundaries:
            if k - 1 in self.boundaries:
                if not self.boundaries[k - 1].compose(self.boundaries[k]).is_zero():
                    raise StructuralError(f"d∘d != 0 at degree {k}")

    @classmethod
    def from_boundary(cls, bases: Mapping[int, Sequence[Hashable]],
                      boundary: Callable[[Hashable], Mapping[Hashable, int]]) -> "ChainComplex":
        bases = {k: tuple(v) for k, v in bases.items() if len(v)}
        index = {k: {b: i for i, b in enumerate(v)} for k, v in bases.items()}
        mats = {}
        for k, basis in bases.items():
            if k - 1 not in bases:
                continue
            tgt = index[k - 1]
            cols = []
            for b in basis:
                col = {}
                for lab, c in boundary(b).items():
                    if c:
                        col[tgt[lab]] = col.get(tgt[lab], 0) + c
                cols.append({i: v for i, v in col.items() if v})
            mats[k] = SparseIntMatrix(len(bases[k - 1]), len(basis), tuple(cols))
        return cls(bases, mats)

    @property
    def degrees(self) -> list[int]:
        return sorted(self.bases)

    def rank_of(self, k: int) -> int:
        return len(self.bases.get(k, ()))

    def boundary(self, k: int) -> SparseIntMatrix:
        if k in self.boundaries:
            return self.boundaries[k]
        return SparseIntMatrix.zero(self.rank_of(k - 1), self.rank_of(k))

    def snf(self, k: int) -> SNFResult:
        if k not in self._snf:
            self._snf[k] = smith_normal_form(self.boundary(k)) if k in self.boundaries else SNFResult(())
        return self._snf[k]

    def scaled(self, factor: int) -> "ChainComplex":
        return ChainComplex(dict(self.bases),
                            {k: d.scaled(factor) for k, d in self.boundaries.items()})

    def homology(self) -> dict[int, HomologyGroup]:
        return {k: complex_homology(self, k) for k in self.degrees}

    def cohomology(self) -> dict[int, HomologyGroup]:
        return {k: complex_cohomology(self, k) for k in self.degrees}


def complex_homology(c: ChainComplex, k: int) -> HomologyGroup:
    free = c.rank_of(k) - c.snf(k).rank - c.snf(k + 1).rank
    return HomologyGroup(free, c.snf(k + 1).torsion)


def complex_cohomology(c: ChainComplex, k: int) -> HomologyGroup:
    free = c.rank_of(k) - c.snf(k).rank - c.snf(k + 1).rank
    return HomologyGroup(free, c.snf(k).torsion)
