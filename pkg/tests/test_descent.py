import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftsym.descent import (
    check_homotopy_rows,
    coskeleton_retract,
    extra_codegeneracy,
    ez_route,
    nerve_augmentation,
    verify_hypercover_descent,
    verify_nerve_descent,
    verify_retract_lemma,
    verify_triple_lemma,
)
from shiftsym.errors import PreconditionError
from shiftsym.exactla import RatMatrix, rank
from shiftsym.forms import compare_pullback, derham_matrix, truncated_total_cohomology
from shiftsym.generators import random_hypercover
from shiftsym.linmodel import constant_space, identity_map, to_point, zero_map


def surjections():
    return st.integers(1, 2).flatmap(
        lambda b: st.integers(b, b + 2).flatmap(
            lambda a: st.lists(st.lists(st.integers(-1, 1), min_size=a, max_size=a), min_size=b, max_size=b)
        )
    ).map(lambda rows: RatMatrix.from_rows(rows)).filter(lambda f: rank(f) == f.rows)


# --- extra codegeneracies ------------------------------------------------

def test_extra_codegeneracy_on_a_projection():
    f = RatMatrix.from_rows([[1, 0, 1]])
    h = extra_codegeneracy(f, q=1, w=1)
    assert h.axioms.passed and h.identity.passed
    # N_i = (i+1)-fold fiber power of Q^3 over Q: dim 2(i+1) + 1
    assert h.dims == {-1: 1, 0: 3, 1: 5, 2: 7, 3: 9}


def test_bad_section_rejected():
    f = RatMatrix.from_rows([[1, 0]])
    with pytest.raises(PreconditionError):
        extra_codegeneracy(f, RatMatrix.from_rows([[0], [1]]))


@settings(max_examples=15, deadline=None)
@given(surjections())
def test_homotopy_identity_on_all_rows(f):
    rep = check_homotopy_rows(f, up_to=2, W=2)
    assert rep.passed, rep.message


def test_other_sections_also_work():
    f = RatMatrix.from_rows([[1, 1, 0]])
    for sigma in ([[1], [0], [5]], [[0], [1], [-2]]):
        h = extra_codegeneracy(f, RatMatrix.from_rows(sigma), up_to=2, q=2, w=3)
        assert h.axioms.passed and h.identity.passed


# --- descent along Čech nerves and hypercovers ---------------------------

def closed_forms_count(b, k, W):
    # closed = exact for positive weight (polynomial Poincaré lemma)
    return sum(rank(derham_matrix(b, k - 1, w)) for w in range(k, W + 1))


@pytest.mark.parametrize("rows", [[[1, 0]], [[1, 0, 1]], [[1, 0, 0], [0, 1, 1]]])
def test_nerve_descent(rows):
    f = RatMatrix.from_rows(rows)
    rep = verify_nerve_descent(f, k=2, W=3, N=3)
    assert rep.passed, rep.message
    # oracle: the nerve's total cohomology is that of F^2 Ω(Q^b)
    aug = nerve_augmentation(f, 2)
    b = f.rows
    assert truncated_total_cohomology(aug.source, 2, 2, 3).dim(2) == closed_forms_count(b, 2, 3)
    assert truncated_total_cohomology(aug.source, 2, 3, 3).dim(3) == 0
    assert aug.target.dims == constant_space(b, 2).dims


@pytest.mark.parametrize("seed", range(6))
def test_hypercover_descent_and_unnormalized_route(seed):
    n = 1 + seed % 2
    inst = random_hypercover(random.Random(seed), n, levels=n + 2)
    rep = verify_hypercover_descent(inst.f, inst.n, N=3)
    assert rep.passed, rep.message
    full = compare_pullback(inst.f, 2, 3, 3, normalized=False)
    for e in rep.entries:
        other = full[e["degree"]]
        assert (other["dim_source"], other["dim_target"], other["induced_rank"]) == \
            (e["dim_source"], e["dim_target"], e["induced_rank"])


def test_descent_fails_for_non_hypercovers():
    X = constant_space(2, 3)
    with pytest.raises(PreconditionError):
        verify_hypercover_descent(zero_map(X, X), 0)
    # to_point is not a hypercover: closed 2-forms on Q^2 do not come from a point
    rep = verify_hypercover_descent(to_point(X), 0, check=False)
    assert not rep.passed
    assert verify_hypercover_descent(identity_map(X), 0).passed


# --- triple complex, Eilenberg–Zilber, coskeleton retract ----------------

@pytest.mark.parametrize("seed", range(4))
def test_triple_lemma_and_ez_route(seed):
    inst = random_hypercover(random.Random(seed), 1, levels=3)
    tri = verify_triple_lemma(inst.f)
    assert tri.passed, tri.message
    assert any(e.get("check") == "rows exact" for e in tri.entries)
    ez = ez_route(inst.f)
    assert ez.passed, ez.message
    for e in ez.entries:
        assert e["dim_target"] == e["dim_diagonal"]


@pytest.mark.parametrize("seed", range(3))
def test_coskeleton_retract_every_step(seed):
    inst = random_hypercover(random.Random(seed), 1, levels=3)
    f = inst.f
    for m in range(f.max_level + 1):
        R = coskeleton_retract(f, m)
        assert R.verification.passed, R.verification.message
        rep = verify_retract_lemma(R.phi, R.ftilde, R.g, R.s)
        assert rep.passed, rep.message
        assert all(e["f_iso_inferred"] == e["f_iso_direct"] for e in rep.entries)


def test_retract_g_need_not_be_levelwise_iso():
    # above the tower index the diagonal is strictly bigger than U
    inst = random_hypercover(random.Random(0), 1, levels=3)
    R = coskeleton_retract(inst.f, 0)
    assert R.ranks[0]["g_iso"]
    assert not all(r["g_iso"] for r in R.ranks.values())
    assert all(r["rank_g"] == r["dim_U"] for r in R.ranks.values())


def test_retract_preconditions():
    inst = random_hypercover(random.Random(1), 1, levels=3)
    R = coskeleton_retract(inst.f, 1)
    with pytest.raises(PreconditionError):
        verify_retract_lemma(R.phi, R.ftilde, R.g, zero_map(R.U, R.diagonal))
    with pytest.raises(PreconditionError):
        coskeleton_retract(inst.f, 9)
