import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftsym.errors import InvalidModel, PreconditionError
from shiftsym.ssets import (
    SimplicialShape,
    boundary,
    check_kan_set,
    group_as_groupoid,
    horn,
    monotone_maps,
    nerve_groupoid,
    pair_groupoid,
    skeleton,
    standard_simplex,
    unit_groupoid,
)


def nondeg(shape, level):
    return sorted(shape.levels[level][i] for i in shape.nondegenerate(level))


def test_standard_simplex_counts():
    assert nondeg(standard_simplex(1, 2), 1) == [(0, 1)]
    assert standard_simplex(1, 2).count(1) == 3
    assert standard_simplex(2, 2).count(1) == 6
    for lvl in range(4):
        assert standard_simplex(0, 3).count(lvl) == 1


@pytest.mark.parametrize("m", range(5))
def test_nondegenerate_counts_are_binomial(m):
    S = standard_simplex(m, m + 1)
    for k in range(m + 2):
        assert len(S.nondegenerate(k)) == comb(m + 1, k + 1)


def test_monotone_maps_brute_force():
    for k, m in itertools.product(range(3), range(3)):
        brute = [f for f in itertools.product(range(m + 1), repeat=k + 1) if list(f) == sorted(f)]
        assert monotone_maps(k, m) == brute


def test_horns():
    L = horn(2, 1, 2)
    assert len(L.nondegenerate(0)) == 3
    assert nondeg(L, 1) == [(0, 1), (1, 2)]
    assert L.nondegenerate(2) == []
    # Λ^1_0 keeps only the face d_1 = vertex 0
    L10 = horn(1, 0, 1)
    assert nondeg(L10, 0) == [(0,)]
    with pytest.raises(PreconditionError):
        horn(2, 3)


def test_horn_is_subshape_of_simplex():
    for m in range(1, 4):
        full = standard_simplex(m, m)
        for j in range(m + 1):
            H = horn(m, j, m)
            for k in range(m + 1):
                assert set(H.levels[k]) <= set(full.levels[k])


def test_boundary_and_skeleton():
    assert len(boundary(1, 1).nondegenerate(0)) == 2
    assert boundary(1, 1).nondegenerate(1) == []
    B2 = boundary(2, 2)
    assert len(B2.nondegenerate(0)) == 3 and len(B2.nondegenerate(1)) == 3
    D2 = standard_simplex(2, 3)
    assert skeleton(D2, 2).levels == D2.levels
    assert skeleton(D2, 1).levels == boundary(2, 3).levels


@pytest.mark.parametrize("make", [lambda: standard_simplex(3, 4), lambda: horn(3, 1, 4), lambda: boundary(3, 4),
                                  lambda: nerve_groupoid(pair_groupoid("ab"), 3)])
def test_identities_hold_and_mutations_are_detected(make):
    S = make()
    assert S.is_valid()
    for (m, i), table in S.faces.items():
        if S.count(m - 1) < 2:
            continue
        for x in range(0, len(table), max(1, len(table) // 3)):
            T = make()
            y = (table[x] + 1) % S.count(m - 1)
            T.faces[(m, i)] = table[:x] + (y,) + table[x + 1:]
            assert not T.is_valid(), f"mutating d{i} at simplex {x} of level {m} went unnoticed"


def test_decompose_is_canonical():
    S = standard_simplex(2, 3)
    for lvl in range(4):
        for idx in range(S.count(lvl)):
            ops, base_lvl, base = S.decompose(lvl, idx)
            assert not S.is_degenerate(base_lvl, base)
            assert S.is_degenerate(lvl, idx) == bool(ops)


def test_json_round_trip():
    S = horn(2, 0, 3)
    T = SimplicialShape.from_json(S.to_json())
    assert T.faces == S.faces and T.degens == S.degens
    assert T.to_json() == S.to_json()


def test_nerve_counts():
    P = nerve_groupoid(pair_groupoid("ab"), 3)
    assert P.count(1) == 4
    assert P.count(2) == 8
    G = group_as_groupoid([0], lambda a, b: 0, 0, lambda a: 0)
    N = nerve_groupoid(G, 3)
    assert all(N.count(k) == 1 for k in range(4))
    U = nerve_groupoid(unit_groupoid("xyz"), 3)
    for (m, i), table in U.faces.items():
        assert sorted(table) == list(range(U.count(m - 1)))


def test_groupoid_validation():
    g = pair_groupoid("ab")
    g.compose[(("a", "b"), ("b", "a"))] = ("b", "b")
    with pytest.raises(InvalidModel):
        g.validate()


z3 = group_as_groupoid([0, 1, 2], lambda a, b: (a + b) % 3, 0, lambda a: (-a) % 3)


@pytest.mark.parametrize("G", [pair_groupoid("abc"), z3, unit_groupoid("xy")])
def test_nerves_are_lie_1_groupoids(G):
    N = nerve_groupoid(G, 3)
    for m in range(1, 4):
        for j in range(m + 1):
            assert check_kan_set(N, m, j, strict=m >= 2).passed


def test_nerve_of_group_kan_1_0():
    assert check_kan_set(nerve_groupoid(z3, 2), 1, 0).passed


def test_simplex_fails_outer_horn():
    # the horn (d_1, d_2) = (00, 01) of Δ^1 has no filler: a 2-simplex x
    # with d_2 x = 01 and d_1 x = 00 would need x(2) = 0 < x(1) = 1
    rep = check_kan_set(standard_simplex(1, 2), 2, 0)
    assert not rep.passed and rep.witness is not None
    assert rep.witness[1] == 0
    # inner horns of Δ^1 do fill
    assert check_kan_set(standard_simplex(1, 2), 2, 1).passed


def test_brute_force_filler_count_matches():
    # compare the filler count for Λ^2_1 in the pair groupoid nerve with a
    # direct enumeration of composable pairs
    G = pair_groupoid("ab")
    N = nerve_groupoid(G, 2)
    pairs = [(g, h) for g in G.arrows for h in G.arrows if G.source(g) == G.target(h)]
    assert N.count(2) == len(pairs)
    rep = check_kan_set(N, 2, 1, strict=True)
    assert rep.horns_checked == len(pairs)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.data())
def test_random_groupoid_nerves(nobj, data):
    objs = list(range(nobj))
    G = pair_groupoid(objs)
    N = nerve_groupoid(G, 3)
    assert N.is_valid()
    m = data.draw(st.integers(2, 3))
    j = data.draw(st.integers(0, m))
    assert check_kan_set(N, m, j, strict=True).passed
