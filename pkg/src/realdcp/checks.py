"""Self-checks shared by the ``verify`` command, the experiment scripts and tests.

Each check returns a list of CheckResult; nothing here raises on a failed
check, so callers decide how loud to be.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd

from .buildcore import BuildingSet, classify_map, direct_sum, quotient
from .dcphom import (
    bockstein_b2, bockstein_complex, bockstein_relations, expected_b2,
    forest_classes, graded_homology, integral_synthesis, mod2_betti, mod2_polynomial,
)
from .errors import RealDCPError
from .exactlinalg import HomologyGroup, contains, full_space, primary_parts
from .forestcx import forest_boundary, forest_complex, sigma
from .operad import (
    boundary_sum, diagonal, linear_combination, phi,
    pullback_sum, sample_chains, tensor_boundary, verify_composition,
    whitney_cycles, whitney_product,
)
from .posetcx import chain_boundary, interval_complex, pi_m_members


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def _nonzero(h: dict) -> dict:
    return {k: v for k, v in h.items() if not v.is_zero}


# ---------------------------------------------------------------------------
# chain level


def sigma_chain_map_failures(g: BuildingSet, a: int, m: int) -> int:
    cx = forest_complex(g, a, m)
    bd = forest_boundary(g, a)
    bad = 0
    for k in cx.degrees:
        for f in cx.bases[k]:
            lhs = linear_combination((c2, x * y) for c, x in sigma(g, f).items()
                                     for c2, y in chain_boundary(c).items())
            rhs = linear_combination((c2, x * y) for f2, x in bd(f).items()
                                     for c2, y in sigma(g, f2).items())
            if lhs != rhs:
                bad += 1
    return bad


def quasi_iso_failures(g: BuildingSet, m: int) -> list[int]:
    view = pi_m_members(g, m)
    bad = []
    for a in view.sorted_members():
        hf = _nonzero(forest_complex(g, a, m).homology())
        hi = _nonzero(interval_complex(a, view).homology())
        if hf != hi:
            bad.append(a)
    return bad


def check_chain(g: BuildingSet, ms=(1, 2)) -> list[CheckResult]:
    out = []
    for m in ms:
        members = pi_m_members(g, m).sorted_members()
        nbad = sum(sigma_chain_map_failures(g, a, m) for a in members)
        out.append(CheckResult(f"sigma is a chain map (m={m})", nbad == 0,
                               f"{nbad} failing generators over {len(members)} intervals"))
        qbad = quasi_iso_failures(g, m)
        out.append(CheckResult(f"forest and interval homology agree (m={m})", not qbad,
                               f"{len(qbad)} mismatching elements"))
    return out


# ---------------------------------------------------------------------------
# operad


def phi_chain_map_failures(f, chains, m: int = 1) -> int:
    bad = 0
    for ch in chains:
        if tensor_boundary(pullback_sum(f, {ch: 1}, m)) != pullback_sum(f, boundary_sum({ch: 1}), m):
            bad += 1
        elif boundary_sum(phi(f, {ch: 1}, m)) != phi(f, boundary_sum({ch: 1}), m):
            bad += 1
    return bad


def identity_map(g: BuildingSet):
    n = g.ambient_dim
    return classify_map([[int(i == j) for j in range(n)] for i in range(n)], g, g)


def check_operad(g: BuildingSet, samples: int = 30, seed: int = 0) -> list[CheckResult]:
    rng = random.Random(seed)
    out = []
    ident = identity_map(g)
    diag = diagonal(g)
    out.append(CheckResult("identity and diagonal are morphisms",
                           ident.classification == diag.classification == "morphism"))
    chains = sample_chains(g, samples, rng)
    bad = phi_chain_map_failures(ident, chains)
    big = diag.target
    if len(big.lattice) <= 400:
        bad += phi_chain_map_failures(diag, sample_chains(big, samples, rng))
    out.append(CheckResult("phi_f commutes with boundaries", bad == 0, f"{bad} failures"))
    rep = verify_composition(ident, ident, samples, seed)
    out.append(CheckResult("composition law (identity, identity)", rep.max_discrepancy == 0,
                           f"max discrepancy {rep.max_discrepancy} over {rep.samples}"))
    if len(big.lattice) <= 400:
        rep = verify_composition(ident, diag, samples, seed)
        out.append(CheckResult("composition law (identity, diagonal)", rep.max_discrepancy == 0,
                               f"max discrepancy {rep.max_discrepancy} over {rep.samples}"))
        out.extend(check_whitney_ring(g, rng, diag=diag))
    return out


def check_whitney_ring(g: BuildingSet, rng: random.Random, trials: int = 10,
                       diag=None) -> list[CheckResult]:
    lat = g.lattice
    diag = diag or diagonal(g)
    classes = [c for a in range(len(lat)) for c in whitney_cycles(g, lat.elements[a])]
    comm = assoc = 0
    for _ in range(trials):
        x, y, z = (rng.choice(classes) for _ in range(3))
        xy = whitney_product(x, y, diag=diag)
        yx = whitney_product(y, x, diag=diag)
        s = -1 if (x.degree * y.degree) % 2 else 1
        if xy.chains != {c: s * v for c, v in yx.chains.items()}:
            comm += 1
        left = whitney_product(xy, z, diag=diag)
        right = whitney_product(x, whitney_product(y, z, diag=diag), diag=diag)
        if left.chains != right.chains:
            assoc += 1
    unit = whitney_cycles(g, lat.elements[0])[0]
    unit_bad = sum(whitney_product(unit, c, diag=diag).chains != c.chains for c in classes)
    return [CheckResult("Whitney product graded-commutative", comm == 0, f"{comm} failures"),
            CheckResult("Whitney product associative", assoc == 0, f"{assoc} failures"),
            CheckResult("Whitney unit", unit_bad == 0, f"{unit_bad} failures")]


# ---------------------------------------------------------------------------
# Künneth


def tensor_groups(a: HomologyGroup, b: HomologyGroup) -> HomologyGroup:
    tors = [t for t in a.torsion for _ in range(b.rank)]
    tors += [t for t in b.torsion for _ in range(a.rank)]
    tors += [gcd(s, t) for s in a.torsion for t in b.torsion]
    return HomologyGroup(a.rank * b.rank, tuple(primary_parts([t for t in tors if t > 1])))


def tor_groups(a: HomologyGroup, b: HomologyGroup) -> HomologyGroup:
    tors = [gcd(s, t) for s in a.torsion for t in b.torsion]
    return HomologyGroup(0, tuple(primary_parts([t for t in tors if t > 1])))


def kunneth(r1: dict, r2: dict) -> dict:
    out: dict = {}
    for i, a in r1.items():
        for j, b in r2.items():
            out[i + j] = out.get(i + j, HomologyGroup()) + tensor_groups(a, b)
            t = tor_groups(a, b)
            if not t.is_zero:
                out[i + j + 1] = out.get(i + j + 1, HomologyGroup()) + t
    return {k: v for k, v in sorted(out.items()) if not v.is_zero}


def odd_part(row: dict) -> dict:
    out = {}
    for k, h in row.items():
        g = HomologyGroup(h.rank, tuple(p for p in primary_parts(h.torsion) if p % 2))
        if not g.is_zero:
            out[k] = g
    return out


def poly_product(p: dict, q: dict) -> dict:
    out: dict = {}
    for i, a in p.items():
        for j, b in q.items():
            out[i + j] = out.get(i + j, 0) + a * b
    return dict(sorted(out.items()))


def check_kunneth(g1: BuildingSet, g2: BuildingSet) -> list[CheckResult]:
    from .buildcore import direct_sum_space
    g = direct_sum(g1, g2)
    h1, h2, h = graded_homology(g1), graded_homology(g2), graded_homology(g)
    bad_2h = 0
    for a, ra in h1.entries.items():
        for b, rb in h2.entries.items():
            if odd_part(h[direct_sum_space(a, b)]) != odd_part(kunneth(ra, rb)):
                bad_2h += 1
    p1, p2, p = mod2_betti(g1), mod2_betti(g2), mod2_betti(g)
    bad_mod2 = 0
    for a, ra in p1.entries.items():
        for b, rb in p2.entries.items():
            if p.entries[direct_sum_space(a, b)] != poly_product(ra, rb):
                bad_mod2 += 1
    f1, f2, f = integral_synthesis(g1), integral_synthesis(g2), integral_synthesis(g)
    full_ok = f.total == kunneth(f1.total, f2.total)
    return [CheckResult("2H factors (free and odd part, per piece)", bad_2h == 0, f"{bad_2h} mismatches"),
            CheckResult("mod-2 Poincare polynomials multiply", bad_mod2 == 0, f"{bad_mod2} mismatches"),
            CheckResult("integral homology obeys the Kunneth formula", full_ok)]


def circle() -> BuildingSet:
    return BuildingSet(2, (full_space(2),))


# ---------------------------------------------------------------------------
# Bockstein


def check_bockstein(g: BuildingSet) -> list[CheckResult]:
    lat = g.lattice
    rel_bad = [a for a in range(len(lat))
               if not all(bockstein_relations(bockstein_complex(g, a)).values())]
    count_bad = [a for a in range(len(lat))
                 if len(bockstein_complex(g, a).basis) != sum(mod2_polynomial(g, a).values())]
    two_h = graded_homology(g)
    b2 = bockstein_b2(g)["pieces"]
    page_bad = [a for a, row in two_h.entries.items() if b2[a] != expected_b2(row)]
    try:
        integral_synthesis(g, two_h=two_h, check_bockstein=False)
        synth = CheckResult("integral synthesis balances", True)
    except RealDCPError as e:
        synth = CheckResult("integral synthesis balances", False, str(e))
    return [CheckResult("double complex relations over F2", not rel_bad, f"{len(rel_bad)} pieces fail"),
            CheckResult("explicit class count matches recursion", not count_bad, f"{len(count_bad)} pieces"),
            CheckResult("B2 page equals r_k + p_k + p_(k-1)", not page_bad, f"{len(page_bad)} pieces"),
            synth]


# ---------------------------------------------------------------------------
# deletion recursion


def deletion_pairs(g: BuildingSet) -> list:
    """Minimal G whose removal leaves a building set not spanning G."""
    out = []
    for e in g.elements:
        if any(x != e and contains(e, x) for x in g.elements):
            continue
        rest = BuildingSet(g.ambient_dim, tuple(x for x in g.elements if x != e), g.max_lattice)
        if rest.is_building_set() and e not in rest.lattice:
            out.append((e, rest))
    return out


def _nonzero_counts(p: dict) -> dict:
    return {k: v for k, v in sorted(p.items()) if v}


def deletion_failures(g: BuildingSet) -> tuple[int, int]:
    """(pairs checked, failures) for count_G(A) = count_G'(A) + classes through G,
    with the classes through G also matched against (t + ... + t^(g-1)) * P(G/G)."""
    lat = g.lattice
    full = mod2_betti(g)
    pairs = deletion_pairs(g)
    bad = 0
    for e, rest in pairs:
        ei = lat.index(e)
        small = mod2_betti(rest)
        through: dict = {}
        ok = True
        for a in range(len(lat)):
            a_sp = lat.elements[a]
            here: dict = {}
            for f, d in forest_classes(g, a):
                if ei in f:
                    here[sum(d)] = here.get(sum(d), 0) + 1
            base = small.entries.get(a_sp, {})
            want = dict(base)
            for k, v in here.items():
                want[k] = want.get(k, 0) + v
                through[k] = through.get(k, 0) + v
            if _nonzero_counts(full.entries[a_sp]) != _nonzero_counts(want):
                ok = False
        window = {d: 1 for d in range(1, e.dim)}
        q = mod2_betti(quotient(g, e))
        if _nonzero_counts(poly_product(window, q.total)) != _nonzero_counts(through):
            ok = False
        bad += not ok
    return len(pairs), bad


def check_deletion(g: BuildingSet) -> list[CheckResult]:
    n, bad = deletion_failures(g)
    return [CheckResult("mod-2 deletion recursion", bad == 0, f"{bad} of {n} pairs fail")]


SUITES = ("chain", "operad", "kunneth", "bockstein", "deletion")


def run_suite(g: BuildingSet, suite: str, seed: int = 0) -> list[CheckResult]:
    names = SUITES if suite == "all" else (suite,)
    out = []
    for name in names:
        if name == "chain":
            out += check_chain(g)
        elif name == "operad":
            out += check_operad(g, seed=seed)
        elif name == "kunneth":
            other = g if len(g.lattice) <= 16 else circle()
            out += check_kunneth(g, other)
        elif name == "bockstein":
            out += check_bockstein(g)
        elif name == "deletion":
            out += check_deletion(g)
    return out
