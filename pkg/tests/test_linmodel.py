import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftsym.errors import DimensionMismatch, InsufficientLevels, InvalidModel, PreconditionError
from shiftsym.exactla import ChainComplexQ, RatMatrix, rank
from shiftsym.generators import (
    acyclic_complex,
    direct_sum,
    hypercover_from,
    random_complex,
    random_hypercover,
    standard_complex,
)
from shiftsym.linmodel import (
    BisimplicialSpace,
    LinSimpSpace,
    SimpLinMap,
    cech_of_surjection,
    check_hypercover,
    check_kan_fibration,
    check_lie_n_groupoid,
    constant_space,
    coskeleton_tower,
    dold_kan,
    dold_kan_map,
    fiber_product,
    hom_from_shape,
    horn_map,
    identity_map,
    is_levelwise_iso,
    matching_map,
    normalize,
    pair_space,
    relative_coskeleton,
    to_point,
    zero_map,
)
from shiftsym.ssets import boundary, horn, standard_simplex


def two_term(d):
    return ChainComplexQ({0: 1, 1: 1}, {1: RatMatrix.from_rows([[d]])})


def test_constant_and_pair_models_validate():
    assert constant_space(3, 4).is_valid()
    assert pair_space(2, 4).is_valid()


def test_mutation_is_detected():
    X = pair_space(1, 3)
    for (m, i) in list(X.faces)[:8]:
        mat = X.faces[(m, i)]
        bumped = mat + RatMatrix.from_sparse(mat.rows, mat.cols, {(0, 0): 1})
        faces = dict(X.faces)
        faces[(m, i)] = bumped
        assert not LinSimpSpace(X.dims, faces, X.degens).is_valid()


def test_json_round_trip_and_errors():
    X = dold_kan(two_term(0), 3)
    Y = LinSimpSpace.from_json(X.to_json())
    assert Y.to_json() == X.to_json()
    bad = X.to_json()
    bad["face"]["1,0"] = [["1"]]
    with pytest.raises(DimensionMismatch):
        LinSimpSpace.from_json(bad)
    bad = X.to_json()
    bad["face"]["2,1"][0][0] = "5"
    with pytest.raises(InvalidModel):
        LinSimpSpace.from_json(bad)
    assert not LinSimpSpace.from_json(bad, validate=False).is_valid()


def test_hom_from_shape_dimensions():
    X = dold_kan(two_term(0), 3)
    for m in range(3):
        assert hom_from_shape(standard_simplex(m), X).dim == X.dims[m]
    assert hom_from_shape(boundary(1), X).dim == 2 * X.dims[0]
    # X_1 ×_{X_0} X_1 = 2 + 2 - 1
    assert hom_from_shape(horn(2, 1), X).dim == 3


def test_horn_maps():
    V = constant_space(2, 3)
    mat, hdim = horn_map(V, 1, 0)
    assert rank(mat) == hdim == mat.cols
    X = dold_kan(two_term(1), 3)
    for j in range(3):
        mat, hdim = horn_map(X, 2, j)
        assert rank(mat) == hdim == mat.cols


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_simplicial_vector_spaces_are_kan(seed, n):
    X = dold_kan(random_complex(random.Random(seed), n, 2), n + 2)
    for m in range(1, X.max_level + 1):
        for j in range(m + 1):
            mat, hdim = horn_map(X, m, j)
            assert rank(mat) == hdim


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_horn_map_routes_agree(seed):
    X = dold_kan(random_complex(random.Random(seed), 2, 2), 3)
    for m in range(1, 4):
        for j in range(m + 1):
            a, da = horn_map(X, m, j, route="faces")
            b, db = horn_map(X, m, j, route="hom")
            assert da == db and rank(a) == rank(b)


def test_lie_groupoid_checks():
    assert check_lie_n_groupoid(constant_space(2, 2), 0).passed
    assert check_lie_n_groupoid(pair_space(2, 4), 1).passed
    C = standard_complex([1, 1, 1], [0, 0, 0])
    assert check_lie_n_groupoid(dold_kan(C, 4), 2).passed
    rep = check_lie_n_groupoid(dold_kan(C, 4), 1)
    assert not rep.passed
    assert any(e["m"] == 2 and not e["ok"] for e in rep.entries)
    with pytest.raises(InsufficientLevels):
        check_lie_n_groupoid(pair_space(1, 2), 1)


def test_dold_kan_dims_and_moore_round_trip():
    assert dold_kan(ChainComplexQ({0: 1}), 3).dims == (1, 1, 1, 1)
    assert dold_kan(two_term(0), 4).dims == (1, 2, 3, 4, 5)
    rng = random.Random(3)
    for _ in range(10):
        C = random_complex(rng, 2, 3)
        N = normalize(dold_kan(C, 3)).complex
        assert all(N.dim(l) == C.dim(l) for l in range(3)) and N.dim(3) == 0
        for l in (1, 2):
            assert N.diff(l) == C.diff(l)


def test_matching_maps():
    X = dold_kan(two_term(0), 3)
    f = identity_map(X)
    assert matching_map(f, 0)[0] == f[0]
    for m in range(4):
        mat, dim = matching_map(f, m)
        assert rank(mat) == dim == mat.cols


def projection(C, D, levels):
    S = direct_sum(C, D)
    phi = {l: RatMatrix.identity(C.dim(l)).hstack(RatMatrix.zeros(C.dim(l), D.dim(l))) for l in C.degrees}
    return dold_kan_map(phi, S, C, levels)


def test_hypercover_examples():
    X = dold_kan(two_term(0), 3)
    for n in range(2):
        assert check_hypercover(identity_map(X), n).passed
    D = two_term(1)
    f = projection(two_term(0), D, 3)
    rep = check_hypercover(f, 1)
    assert rep.passed
    # oracle: q_m ranks against direct dimension counts
    for e in rep.entries:
        mat, dim = matching_map(f, e["m"])
        assert e["rank"] == rank(mat) and e["target_dim"] == dim
    g = zero_map(X, X)
    rep = check_hypercover(g, 1)
    assert not rep.passed and rep.entries[0]["m"] == 0 and not rep.entries[0]["ok"]


def test_matching_routes_agree():
    inst = random_hypercover(random.Random(5), 1)
    for m in range(3):
        a, da = matching_map(inst.f, m, route="faces")
        b, db = matching_map(inst.f, m, route="hom")
        assert da == db and rank(a) == rank(b)


@pytest.mark.parametrize("seed", range(8))
def test_hypercovers_are_levelwise_surjective_and_kan_fibrations(seed):
    inst = random_hypercover(random.Random(seed), 1 + seed % 2)
    f = inst.f
    assert check_hypercover(f, inst.n).passed
    assert all(rank(a) == a.rows for a in f.mats)
    assert check_kan_fibration(f).passed


def test_kan_fibration_to_point():
    X = pair_space(1, 3)
    assert check_kan_fibration(to_point(X), 1).passed
    Y = dold_kan(standard_complex([1, 1, 1], [0, 0, 0]), 3)
    assert not check_kan_fibration(to_point(Y), 1).passed
    assert check_kan_fibration(identity_map(Y)).passed


def test_fiber_products():
    rng = random.Random(2)
    inst = random_hypercover(rng, 1)
    f = inst.f
    X = f.target
    fp = fiber_product(f, identity_map(X))
    assert fp.space.dims == f.source.dims
    assert is_levelwise_iso(fp.to_left)
    A, B = f.source, X
    fp = fiber_product(to_point(A), to_point(B))
    assert fp.space.dims == tuple(a + b for a, b in zip(A.dims, B.dims))
    # pullback of a hypercover along a hypercover is a hypercover
    other = hypercover_from(rng, inst.target_complex, acyclic_complex(rng, 1), 1, f.max_level)
    fp = fiber_product(f, SimpLinMap(other.f.source, f.target, other.f.mats))
    assert check_hypercover(fp.to_right, 1).passed
    assert check_hypercover(fp.to_left, 1).passed


def test_relative_coskeleta():
    inst = random_hypercover(random.Random(7), 1, levels=3)
    f = inst.f
    high = relative_coskeleton(f, 3)
    assert is_levelwise_iso(high.from_source())
    low = relative_coskeleton(f, -1)
    assert is_levelwise_iso(low.to_target())
    tower = coskeleton_tower(f)
    assert tower.composite().equals(f)
    for step in tower.steps:
        assert check_hypercover(step, 1).passed


def test_cech_nerves():
    f = RatMatrix.from_rows([[1, 0]])
    nerve = cech_of_surjection(f, 3)
    assert nerve.model.dims == (2, 3, 4, 5)
    assert nerve.model.is_valid()
    idn = cech_of_surjection(RatMatrix.identity(2), 3)
    assert idn.model.dims == (2, 2, 2, 2)
    with pytest.raises(PreconditionError):
        cech_of_surjection(RatMatrix.from_rows([[0, 0]]), 2)


def test_bisimplicial_identities():
    inst = random_hypercover(random.Random(11), 1, levels=3)
    B = BisimplicialSpace(inst.f, 2)
    assert B.violations() == []
    assert B.diagonal().is_valid()
