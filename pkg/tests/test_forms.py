import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftsym.errors import DimensionMismatch
from shiftsym.exactla import RatMatrix, rank
from shiftsym.forms import (
    FormBicomplex,
    PolyForm,
    TripleComplex,
    de_rham_d,
    derham_matrix,
    ez_diagonal,
    form_basis,
    normalized_basis,
    pullback,
    simplicial_delta,
    truncated_total_cohomology,
)
from shiftsym.generators import random_complex, random_hypercover
from shiftsym.linmodel import BisimplicialSpace, constant_space, dold_kan, pair_space, point_space


# --- an independent sympy implementation of polynomial forms -----------

def to_dict(form: PolyForm, xs):
    out = {}
    for (mono, idx), c in form.terms.items():
        poly = sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[x ** e for x, e in zip(xs, mono)])
        out[idx] = sympy.expand(out.get(idx, 0) + poly)
    return {k: v for k, v in out.items() if v != 0}


def sort_sign(idx):
    """(sign, sorted) for an index sequence, or (0, None) on repeats."""
    if len(set(idx)) < len(idx):
        return 0, None
    sign = 1
    arr = list(idx)
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


def oracle_d(forms: dict, xs):
    out = {}
    for idx, f in forms.items():
        for j, x in enumerate(xs):
            g = sympy.diff(f, x)
            if g == 0:
                continue
            sign, key = sort_sign((j,) + idx)
            if sign:
                out[key] = sympy.expand(out.get(key, 0) + sign * g)
    return {k: v for k, v in out.items() if v != 0}


def oracle_pullback(forms: dict, A: RatMatrix, ys):
    """x = A y; dx_I pulls back to Σ_J det A[I, J] dy_J."""
    SA = sympy.Matrix(A.rows, A.cols, lambda i, j: sympy.Rational(A[i, j].numerator, A[i, j].denominator))
    xs_of_y = SA * sympy.Matrix(ys)
    out = {}
    for idx, f in forms.items():
        sub = f.subs({sympy.Symbol(f"x{i}"): xs_of_y[i] for i in range(A.rows)}, simultaneous=True)
        for J in itertools.combinations(range(A.cols), len(idx)):
            det = SA.extract(list(idx), list(J)).det() if idx else 1
            if det != 0:
                out[J] = sympy.expand(out.get(J, 0) + det * sub)
    return {k: v for k, v in out.items() if v != 0}


@st.composite
def poly_forms(draw, dim=None, degree=None, max_weight=4):
    d = draw(st.integers(1, 3)) if dim is None else dim
    q = draw(st.integers(0, d)) if degree is None else degree
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        w = draw(st.integers(q, max_weight))
        basis = form_basis(d, q, w)
        if basis:
            t = basis[draw(st.integers(0, len(basis) - 1))]
            terms[t] = Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 2)))
    return PolyForm(d, q, terms)


def xs_for(d, name="x"):
    return sympy.symbols(f"{name}0:{d}")


# --- PolyForm ----------------------------------------------------------

def test_d_of_x_dx():
    w = PolyForm(2, 1, {((1, 0), (1,)): 1})
    assert de_rham_d(w) == PolyForm(2, 2, {((0, 0), (0, 1)): 1})
    c = PolyForm.constant(RatMatrix.from_rows([[0, 1], [-1, 0]]))
    assert de_rham_d(c).is_zero()


def test_rejects_bad_terms():
    with pytest.raises(DimensionMismatch):
        PolyForm(2, 2, {((0, 0), (1, 0)): 1})


@settings(max_examples=50, deadline=None)
@given(poly_forms())
def test_d_matches_sympy_and_squares_to_zero(form):
    xs = xs_for(form.dim)
    assert to_dict(de_rham_d(form), xs) == oracle_d(to_dict(form, xs), xs)
    assert de_rham_d(de_rham_d(form)).is_zero()
    assert de_rham_d(form).weights() == [w for w in form.weights() if de_rham_d(form.part(w)).terms]


@settings(max_examples=40, deadline=None)
@given(poly_forms(max_weight=3), st.data())
def test_pullback_matches_sympy(form, data):
    k = data.draw(st.integers(1, 3))
    A = RatMatrix(form.dim, k, [[data.draw(st.integers(-2, 2)) for _ in range(k)] for _ in range(form.dim)])
    xs, ys = xs_for(form.dim), xs_for(k, "y")
    got = to_dict(pullback(A, form), ys)
    assert got == oracle_pullback(to_dict(form, xs), A, ys)
    # d commutes with pullback
    assert pullback(A, de_rham_d(form)) == de_rham_d(pullback(A, form))


def test_pullback_examples():
    G = RatMatrix.from_rows([[0, 1], [-1, 0]])
    w = PolyForm.constant(G)
    assert pullback(RatMatrix.identity(2), w) == w
    A = RatMatrix.from_rows([[1, 2, 0], [0, 1, 1]])
    assert pullback(A, w).gram() == A.T @ G @ A
    assert pullback(RatMatrix.zeros(2, 3), w).is_zero()


def test_json_round_trip():
    form = PolyForm(2, 1, {((1, 0), (1,)): Fraction(1, 3), ((0, 2), (0,)): -2})
    assert PolyForm.from_json(form.to_json()) == form
    assert PolyForm.from_json(PolyForm.zero(3, 2).to_json()).dim == 3


# --- bicomplex ---------------------------------------------------------

def test_delta_on_level_one():
    X = pair_space(1, 2)
    w = PolyForm(1, 1, {((1,), (0,)): 1})
    expected = pullback(X.face(1, 0), w) - pullback(X.face(1, 1), w)
    assert simplicial_delta(X, 1, w) == expected


def test_delta_on_constant_space_alternates():
    X = constant_space(2, 4)
    w = PolyForm(2, 2, {((1, 0), (0, 1)): 1})
    for p in range(1, 5):
        out = simplicial_delta(X, p, w)
        assert out.is_zero() if p % 2 else out == w


@pytest.mark.parametrize("seed", range(4))
def test_D_squares_to_zero_and_preserves_weight(seed):
    X = dold_kan(random_complex(random.Random(seed), 1, 2), 3)
    for normalized in (True, False):
        fb = FormBicomplex(X, 2, normalized)
        for w in (2, 3):
            for n in range(2, 4):
                assert (fb.D(n + 1, w) @ fb.D(n, w)).is_zero()


def test_triple_complex_D_squares_to_zero():
    inst = random_hypercover(random.Random(2), 1, levels=3)
    T = TripleComplex(BisimplicialSpace(inst.f, 2), 2)
    for w in (2, 3):
        for n in range(2, 4):
            assert (T.D(n + 1, w) @ T.D(n, w)).is_zero()


def test_point_model_cohomology():
    pt = point_space(3)
    assert truncated_total_cohomology(pt, 0, 0, 2).dim(0) == 1
    for n in range(3):
        assert truncated_total_cohomology(pt, 2, n, 3).dim(n) == 0


def test_constant_model_cohomology():
    # simplicial cohomology of a constant space vanishes, so the total
    # cohomology is that of F^2 Ω(V): closed 2-forms in degree 2 and
    # nothing above (polynomial Poincaré lemma)
    V = constant_space(2, 3)
    W = 3
    closed2 = sum(rank(derham_matrix(2, 1, w)) for w in range(2, W + 1))
    assert truncated_total_cohomology(V, 2, 2, W).dim(2) == closed2
    assert truncated_total_cohomology(V, 2, 3, W).dim(3) == 0


def test_normalized_basis():
    X = constant_space(2, 3)
    assert all(len(v) == len(form_basis(2, 1, w)) for w, v in normalized_basis(X, 0, 1, 3).items())
    assert all(not v for v in normalized_basis(X, 1, 1, 3).values())
    Y = pair_space(1, 3)
    for form in normalized_basis(Y, 2, 1, 2)[2]:
        for i in range(2):
            assert pullback(Y.degen(1, i), form).is_zero()


@pytest.mark.parametrize("seed", range(3))
def test_normalized_and_full_cohomology_agree(seed):
    X = dold_kan(random_complex(random.Random(seed), 1, 2), 3)
    for n in range(2, 4):
        a = FormBicomplex(X, 2, True).cohomology(n, 3)[0]
        b = FormBicomplex(X, 2, False).cohomology(n, 3)[0]
        assert a == b


def test_cohomology_is_stable_in_levels():
    X = dold_kan(random_complex(random.Random(9), 1, 2), 4)
    for n in range(2, 4):
        a = truncated_total_cohomology(X.truncate(n + 1 - 2), 2, n, 3).dim(n)
        b = truncated_total_cohomology(X.truncate(n + 2 - 2), 2, n, 3).dim(n)
        assert a == b


def test_ez_diagonal_examples():
    inst = random_hypercover(random.Random(3), 1, levels=3)
    B = BisimplicialSpace(inst.f, 2)
    T = TripleComplex(B)
    d = B.dims[(0, 0)]
    form = PolyForm(d, 1, {((1,) + (0,) * (d - 1), (0,)): 1}) if d else PolyForm.zero(0, 0)
    assert ez_diagonal(B, 0, 0, form) == form
    assert T.ez_matrix(1, 0) == B.hface[(1, 1, 0)]


def test_ez_is_a_chain_map():
    inst = random_hypercover(random.Random(4), 1, levels=3)
    B = BisimplicialSpace(inst.f, 2)
    T = TripleComplex(B, 2)
    diag = FormBicomplex(B.diagonal(), 2)
    for w in (2, 3):
        maps = T.ez_map(diag, w, 2)
        for n in range(2, 3):
            assert diag.D(n, w) @ maps[n] == maps[n + 1] @ T.D(n, w)
