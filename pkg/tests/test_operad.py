import random

import pytest
from hypothesis import given, settings, strategies as st

from realdcp.buildcore import MORPHISM, PURELY_OPERADIC, WEAK, BuildingSet, classify_map, direct_sum
from realdcp.checks import check_whitney_ring, identity_map, phi_chain_map_failures
from realdcp.errors import InputError
from realdcp.exactlinalg import full_space, intersect, rref, span_sum, zero_subspace
from realdcp.families import boolean, braid
from realdcp.buildcore import direct_sum_space
from realdcp.operad import (
    boundary_sum, class_is_nonzero, compose_maps, composition_sides, diagonal, orientation_sign,
    phi, pullback_chain, pullback_sum, sample_chains, shuffle, tensor_boundary, verify_composition,
    whitney_cycles, whitney_product,
)

from corpus import braid_forget, braid_merge, corpus


def G(n, s):
    rows = [[1 if k == i - 1 else -1 if k == j - 1 else 0 for k in range(n)]
            for i in s for j in s if i < j]
    return rref(rows, n)


def test_map_classes():
    assert braid_merge(2).classification == PURELY_OPERADIC
    assert braid_merge(3).classification == PURELY_OPERADIC
    assert braid_forget(3).classification == MORPHISM
    assert diagonal(braid(3).building_set()).classification == MORPHISM


def test_pullback_identity_keeps_chain():
    g = braid(4).building_set()
    ident = identity_map(g)
    for ch in sample_chains(g, 20, random.Random(0)):
        t = pullback_chain(ident, ch)
        assert t.left == () and t.right == ch


def test_pullback_along_diagonal():
    b = boolean(2).building_set()
    diag = diagonal(b)
    x, y = rref([[1, 0]]), rref([[0, 1]])
    t = pullback_chain(diag, (direct_sum_space(x, y),))
    assert t.left == () and t.right == (full_space(2),)
    assert pullback_chain(diag, (direct_sum_space(x, x),)) is None


def test_pullback_kills_chain_missing_kernel_piece():
    f = braid_merge(2)
    g12, g123 = G(3, (1, 2)), G(3, (1, 2, 3))
    assert f.kernel == g12
    t = pullback_chain(f, (g12, g123))
    assert t.left == (g12,) and t.right == (G(2, (1, 2)),)
    assert pullback_chain(f, (g123,)) is None
    t = pullback_chain(f, (G(3, (1, 3)), g123))
    assert t is None


def test_shuffle_examples():
    y = (rref([[1, 0]]), full_space(2))
    out = shuffle((), y, 1, 2)
    assert out == {tuple(direct_sum_space(zero_subspace(1), s) for s in y): 1}
    a, b = full_space(1), full_space(1)
    out = shuffle((a,), (b,), 1, 1)
    ab = full_space(2)
    first = (direct_sum_space(a, zero_subspace(1)), ab)
    second = (direct_sum_space(zero_subspace(1), b), ab)
    assert out == {first: 1, second: -1}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_shuffle_is_chain_map(seed):
    rng = random.Random(seed)
    g = braid(3).building_set()
    x, y = sample_chains(g, 2, rng)
    lhs = boundary_sum(shuffle(x, y, 3, 3))
    rhs = {}
    for (x2, y2), c in tensor_boundary({(x, y): 1}).items():
        for ch, s in shuffle(x2, y2, 3, 3).items():
            rhs[ch] = rhs.get(ch, 0) + c * s
    assert lhs == {k: v for k, v in rhs.items() if v}


def _maps():
    b3 = braid(3).building_set()
    bool2 = boolean(2).building_set()
    return {
        "identity": identity_map(b3),
        "diagonal": diagonal(b3),
        "merge": braid_merge(3),
        "forget": braid_forget(3),
        "weak": classify_map([[1, 0], [0, 0]], bool2, bool2),
    }


@pytest.mark.parametrize("name", ["identity", "diagonal", "merge", "forget", "weak"])
@pytest.mark.parametrize("m", [1, 2])
def test_phi_commutes_with_boundary(name, m):
    f = _maps()[name]
    chains = sample_chains(f.target, 40, random.Random(7), m)
    assert phi_chain_map_failures(f, chains, m) == 0


@pytest.mark.parametrize("name", ["diagonal", "merge", "forget", "weak"])
def test_support_grading(name):
    f = _maps()[name]
    for ch in sample_chains(f.target, 60, random.Random(3)):
        if not ch:
            continue
        for (left, right), c in pullback_sum(f, {ch: 1}).items():
            a = ch[-1]
            cut = intersect(a, f.kernel)
            assert (left[-1] if left else zero_subspace(a.ambient_dim)) == cut
            assert (right[-1] if right else zero_subspace(f.source.ambient_dim)) == f.pull(a)


@pytest.mark.parametrize("pair", [("id", "id"), ("merge", "forget"), ("merge", "merge"),
                                  ("forget", "forget"), ("id", "diag")])
def test_composition_law(pair):
    if pair == ("id", "id"):
        f = g = identity_map(braid(4).building_set())
    elif pair == ("merge", "forget"):
        f, g = braid_merge(3), braid_forget(3)
    elif pair == ("merge", "merge"):
        f, g = braid_merge(2), braid_merge(3)
    elif pair == ("forget", "forget"):
        f, g = braid_forget(4), braid_forget(3)
    else:
        b = braid(3).building_set()
        f, g = identity_map(b), diagonal(b)
    for m in (1, 2):
        rep = verify_composition(f, g, samples=40, seed=11, m=m)
        assert rep.max_discrepancy == 0
    assert verify_composition(f, g, samples=40, seed=11).nonzero_samples > 0


def test_composition_sides_example():
    f, g = braid_merge(2), braid_merge(3)
    chain = (G(4, (1, 2)), G(4, (1, 2, 3)), G(4, (1, 2, 3, 4)))
    lhs, rhs = composition_sides(f, g, chain)
    assert lhs == rhs and lhs


def test_non_composable_rejected():
    with pytest.raises(InputError):
        verify_composition(braid_merge(2), braid_merge(2))
    with pytest.raises(InputError):
        compose_maps(braid_merge(3), braid_merge(2))


def test_whitney_unit_and_disjointness():
    g = braid(4).building_set()
    unit = whitney_cycles(g, zero_subspace(4))[0]
    x = whitney_cycles(g, G(4, (1, 2)))[0]
    assert whitney_product(unit, x).chains == x.chains
    y = whitney_cycles(g, G(4, (1, 3)))[0]
    assert whitney_product(x, x).is_zero_chain
    assert not whitney_product(x, y).is_zero_chain or intersect(x.support, y.support).dim
    z = whitney_cycles(g, G(4, (1, 2, 3)))[0]
    assert whitney_product(x, z).is_zero_chain
    with pytest.raises(InputError):
        whitney_product(x, whitney_cycles(braid(3).building_set(), G(3, (1, 2)))[0])


def test_whitney_product_of_disjoint_blocks_is_nonzero():
    g = braid(5).building_set()
    x = whitney_cycles(g, G(5, (1, 2)))[0]
    y = whitney_cycles(g, G(5, (3, 4)))[0]
    p = whitney_product(x, y)
    assert p.support == span_sum(G(5, (1, 2)), G(5, (3, 4)))
    assert class_is_nonzero(p)
    # m = 2: two even blocks of a product of circles
    a, b = rref([[1, 0, 0, 0], [0, 1, 0, 0]]), rref([[0, 0, 1, 0], [0, 0, 0, 1]])
    h = BuildingSet(4, (a, b))
    p = whitney_product(whitney_cycles(h, a, 2)[0], whitney_cycles(h, b, 2)[0], 2)
    assert p.support == full_space(4) and class_is_nonzero(p, 2)


@pytest.mark.parametrize("name", ["braid4", "boolean3", "G2inV4"])
def test_whitney_ring_laws(name):
    for r in check_whitney_ring(corpus()[name], random.Random(5), trials=15):
        assert r.ok, r.line()


def test_orientation_sign():
    e1, e2 = rref([[1, 0]]), rref([[0, 1]])
    v = full_space(2)
    assert orientation_sign([e1, e2], v) == 1
    assert orientation_sign([e2, e1], v) == -1
    assert orientation_sign([e1, e1], v) == 0
    assert orientation_sign([rref([[1, 1]]), e2], v) == 1
    assert orientation_sign([rref([[1, 1]]), e1], v) == -1


def test_phi_lands_in_direct_sum():
    f = braid_merge(3)
    n = f.target.ambient_dim + f.source.ambient_dim
    for ch in sample_chains(f.target, 20, random.Random(2)):
        for out in phi(f, {ch: 1}):
            assert all(s.ambient_dim == n for s in out)
    big = direct_sum(f.target, f.source)
    assert big.ambient_dim == n
