"""The ten acceptance criteria.  Every check is exact; each test prints a
single ``criterion N: PASS|FAIL`` line with its timing and budget."""
import random
import time

import pytest
import sympy

from shiftsym.descent import (
    check_homotopy_rows,
    coskeleton_retract,
    ez_route,
    verify_hypercover_descent,
    verify_nerve_descent,
    verify_retract_lemma,
    verify_triple_lemma,
)
from shiftsym.errors import Infeasible
from shiftsym.exactla import RatMatrix, homology, rank
from shiftsym.forms import PolyForm
from shiftsym.generators import (
    linear_pair_model,
    random_complex,
    random_hypercover,
    random_invertible,
    scramble,
    standard_complex,
    zigzag_from,
)
from shiftsym.linmodel import (
    BisimplicialSpace,
    LinSimpSpace,
    RelativeCoskeleton,
    cech_of_surjection,
    check_hypercover,
    check_lie_n_groupoid,
    constant_space,
    dold_kan,
    horn_map,
    pair_space,
    point_space,
)
from shiftsym.ssets import boundary, horn, nerve_groupoid, pair_groupoid, standard_simplex
from shiftsym.symplectic import (
    ShiftedForm,
    check_graded_antisymmetry,
    check_im_multiplicative,
    check_morita,
    check_shifted_symplectic,
    compose_morita,
    gauge_transform,
    im_pairing,
    one_shifted_criterion,
    pullback_shifted,
    random_closed_form,
    random_gauge,
    random_symplectic,
    standard_symplectic_gram,
    transfer_symplectic,
)
from shiftsym.tangent import check_quasi_iso, tangent_complex, tangent_homology

pytestmark = pytest.mark.acceptance


class Criterion:
    def __init__(self, number: int, budget: float, record):
        self.number, self.budget, self.record = number, budget, record
        self.failures: list[str] = []
        self.start = time.perf_counter()

    def check(self, ok: bool, what: str) -> bool:
        if not ok:
            self.failures.append(what)
        return ok

    def finish(self, summary: str) -> None:
        elapsed = time.perf_counter() - self.start
        self.check(elapsed < self.budget, f"took {elapsed:.1f} s, budget {self.budget:g} s")
        verdict = "PASS" if not self.failures else "FAIL"
        detail = summary if not self.failures else f"{summary}; first failure: {self.failures[0]}"
        self.record(f"criterion {self.number}: {verdict} ({detail}; {elapsed:.2f} s of {self.budget:g} s)")
        assert not self.failures, self.failures[:5]


def sympy_rank(m: RatMatrix) -> int:
    if not m.rows or not m.cols:
        return 0
    return sympy.Matrix(m.rows, m.cols, lambda i, j: sympy.Rational(m[i, j].numerator, m[i, j].denominator)).rank()


# --- 1 ------------------------------------------------------------------

def shapes():
    yield "Δ^3", standard_simplex(3, 4)
    yield "Λ^3_1", horn(3, 1, 4)
    yield "Λ^2_0", horn(2, 0, 3)
    yield "∂Δ^3", boundary(3, 4)
    yield "N(pair groupoid on 3 objects)", nerve_groupoid(pair_groupoid("abc"), 3)


def linear_models():
    rng = random.Random(1)
    yield "point", point_space(4)
    yield "constant Q^3", constant_space(3, 4)
    yield "pair groupoid of Q^2", pair_space(2, 4)
    yield "linear pair model", linear_pair_model(RatMatrix.from_rows([[1, 0], [0, 0]]), 4)
    for i in range(4):
        yield f"Dold-Kan model {i}", dold_kan(random_complex(rng, 2, 3), 4)
    yield "Čech nerve", cech_of_surjection(RatMatrix.from_rows([[1, 0, 1], [0, 1, 1]]), 3).model
    inst = random_hypercover(rng, 1, levels=3)
    yield "bisimplicial diagonal", BisimplicialSpace(inst.f, 2).diagonal()
    yield "relative 0-coskeleton", RelativeCoskeleton(inst.f, 0).space


def mutated_shapes(make):
    S = make()
    for (m, i), table in S.faces.items():
        if S.count(m - 1) < 2:
            continue
        T = make()
        T.faces[(m, i)] = ((table[0] + 1) % S.count(m - 1),) + table[1:]
        yield f"d_{i} at level {m}", T


def mutated_models(X: LinSimpSpace):
    for kind, table in (("face", X.faces), ("degen", X.degens)):
        for key, mat in table.items():
            if not mat.rows or not mat.cols:
                continue
            faces, degens = dict(X.faces), dict(X.degens)
            bumped = mat + RatMatrix.from_sparse(mat.rows, mat.cols, {(0, 0): 1})
            (faces if kind == "face" else degens)[key] = bumped
            yield f"{kind} {key}", LinSimpSpace(X.dims, faces, degens)


def test_criterion_1_simplicial_identities(record):
    c = Criterion(1, 60, record)
    mutants = 0
    slowest = 0.0
    shape_list = list(shapes())
    for name, S in shape_list:
        t = time.perf_counter()
        c.check(S.is_valid(), f"shape {name} fails its identities")
        slowest = max(slowest, time.perf_counter() - t)

        def make(name=name):
            return dict(shapes())[name]
        for what, T in mutated_shapes(make):
            mutants += 1
            c.check(not T.is_valid(), f"mutation of {what} in {name} undetected")
    models = list(linear_models())
    for name, X in models:
        t = time.perf_counter()
        c.check(X.is_valid(), f"model {name} fails its identities")
        dt = time.perf_counter() - t
        slowest = max(slowest, dt)
        c.check(dt < 1.0, f"model {name} took {dt:.2f} s")
        for what, Y in mutated_models(X):
            mutants += 1
            c.check(not Y.is_valid(), f"mutation of {what} in {name} undetected")
    c.finish(f"{len(shape_list)} shapes, {len(models)} linear models, {mutants} mutants all detected, "
             f"slowest model {slowest:.2f} s")


# --- 2 ------------------------------------------------------------------

def test_criterion_2_lie_groupoid_recovery(record):
    c = Criterion(2, 1, record)
    X = pair_space(2, 5)
    rep = check_lie_n_groupoid(X, 1)
    c.check(rep.passed, f"check_lie_n_groupoid: {rep.message}")
    unique = 0
    for m in range(2, 5):
        for j in range(m + 1):
            mat, hdim = horn_map(X, m, j)
            # Kan!(m, j): the horn restriction is bijective
            c.check(rank(mat) == hdim == mat.cols == X.dims[m], f"Kan!({m},{j}) fails")
            unique += 1
    c.finish(f"pair groupoid of Q^2 is a Lie 1-groupoid, Kan! holds for {unique} horns with 2 <= m <= 4")


# --- 3 ------------------------------------------------------------------

def test_criterion_3_hypercovers(record):
    c = Criterion(3, 60, record)
    rng = random.Random(3)
    count = 0
    for i in range(100):
        n = 1 + i % 2
        inst = random_hypercover(rng, n, max_dim=4)
        f = inst.f
        c.check(check_hypercover(f, n).passed, f"instance {i} is not a hypercover")
        for lvl, mat in enumerate(f.mats):
            c.check(sympy_rank(mat) == mat.rows, f"instance {i}: f_{lvl} not surjective")
        q = check_quasi_iso(f, n)
        c.check(q.passed, f"instance {i}: {q.message}")
        # the tangent homology is the homology of the underlying complexes
        for model, C in ((f.source, inst.source_complex), (f.target, inst.target_complex)):
            dims = tangent_homology(tangent_complex(model, n)).dims
            hs = homology(C)
            c.check(all(dims[l] == hs[l].dim for l in range(n + 1)), f"instance {i}: tangent homology mismatch")
        count += 1
    c.finish(f"{count} random hypercovers (n <= 2, dims <= 4) levelwise surjective and tangent quasi-isomorphisms")


# --- 4 ------------------------------------------------------------------

def test_criterion_4_zero_shifted(record):
    c = Criterion(4, 1, record)
    rng = random.Random(4)
    for d in (1, 2, 3):
        X = constant_space(2 * d, 2)
        rep = check_shifted_symplectic(ShiftedForm(X, 0, {0: PolyForm.constant(standard_symplectic_gram(d))}), 0)
        c.check(rep.passed, f"standard form on Q^{2 * d}: {rep.message}")
    deficient = 0
    for d in (1, 2, 3):
        for r in range(d):
            # rank 2r form in a random basis
            P, _ = random_invertible(rng, 2 * d)
            G = RatMatrix.zeros(2 * d, 2 * d)
            if r:
                G = standard_symplectic_gram(r).hstack(RatMatrix.zeros(2 * r, 2 * d - 2 * r))
                G = G.vstack(RatMatrix.zeros(2 * d - 2 * r, 2 * d))
            G = P.T @ G @ P
            X = constant_space(2 * d, 2)
            rep = check_shifted_symplectic(ShiftedForm(X, 0, {0: PolyForm.constant(G)}), 0)
            entry = [e for e in rep.entries if "rank_deficit" in e][0]
            c.check(not rep.passed and entry["rank_deficit"] == 2 * d - sympy_rank(G) == 2 * (d - r),
                    f"rank {2 * r} form on Q^{2 * d}: reported deficit {entry['rank_deficit']}")
            deficient += 1
    c.finish(f"standard forms pass for d = 1, 2, 3; {deficient} rank-deficient forms fail with the right deficit")


# --- 5 ------------------------------------------------------------------

def rho_sweep(rng):
    kinds = []
    for v in (1, 2, 3):
        kinds.append(("zero", RatMatrix.zeros(v, v)))
        kinds.append(("zero", RatMatrix.zeros(v, v + 1)))
    for v in (1, 2, 3):
        P, _ = random_invertible(rng, v)
        kinds.append(("iso", P))
        kinds.append(("injective", P.vstack(RatMatrix.zeros(1, v))))
        kinds.append(("surjective", P.hstack(RatMatrix.zeros(v, 1))))
    out = []
    while len(out) < 50:
        for kind, rho in kinds:
            out.append((kind, rho))
        v, a = rng.randint(1, 3), rng.randint(1, 3)
        out.append(("random", RatMatrix(v, a, [[rng.choice([0, 0, 1, -1]) for _ in range(a)] for _ in range(v)])))
    return out[:50]


def test_criterion_5_one_shifted_criterion(record):
    c = Criterion(5, 30, record)
    rng = random.Random(5)
    verdicts = {True: 0, False: 0}
    kinds = set()
    for i, (kind, rho) in enumerate(rho_sweep(rng)):
        X = linear_pair_model(rho, 3)
        alpha = random_closed_form(rng, X, 1)
        if i % 2 and rho.rows == rho.cols:
            try:
                alpha = random_symplectic(rng, X, 1, 1, gauge_weights=())
            except Infeasible:
                pass
        omega = alpha.top().gram()
        computed = check_shifted_symplectic(alpha, 1).passed
        expected = one_shifted_criterion(rho, omega)
        c.check(computed == expected, f"instance {i} ({kind}): check says {computed}, criterion says {expected}")
        verdicts[computed] += 1
        kinds.add(kind)
    c.check({"zero", "injective", "surjective"} <= kinds, "sweep misses a requested kind of ρ")
    c.finish(f"50 instances ({', '.join(sorted(kinds))} ρ) agree; {verdicts[True]} symplectic, {verdicts[False]} not")


# --- 6 ------------------------------------------------------------------

def gauge_instances(rng):
    for i in range(50):
        if i % 5 == 4:
            X = dold_kan(scramble(rng, standard_complex([1, 0, 1], [0, 0, 0]))[0], 4)
            m, n = 2, 2
        elif i % 5 == 3:
            X = dold_kan(scramble(rng, standard_complex([1, 1], [0, 1]))[0], 3)
            m, n = 1, 1
        else:
            X = linear_pair_model(RatMatrix.from_rows([[rng.choice([0, 1])] * 2] * 2), 3) if i % 2 else \
                linear_pair_model(RatMatrix.zeros(rng.randint(1, 2), rng.randint(1, 2)), 3)
            m, n = 1, 1
        yield X, m, n


def test_criterion_6_gauge_invariance(record):
    c = Criterion(6, 30, record)
    rng = random.Random(6)
    raw_equal = 0
    total = 0
    for i, (X, m, n) in enumerate(gauge_instances(rng)):
        alpha = random_closed_form(rng, X, m)
        beta = gauge_transform(alpha, random_gauge(rng, X, m))
        T = tangent_complex(X, n)
        la, lb = im_pairing(alpha, n, T), im_pairing(beta, n, T)
        for l in range(m + 1):
            c.check(la.descended[l] == lb.descended[l], f"instance {i}: descended Gram differs at l = {l}")
        c.check(check_im_multiplicative(lb, T).passed and check_graded_antisymmetry(lb).passed,
                f"instance {i}: gauge-transformed pairing is not an IM form")
        c.check(check_shifted_symplectic(alpha, n).passed == check_shifted_symplectic(beta, n).passed,
                f"instance {i}: gauge changed non-degeneracy")
        raw_equal += all(la.grams[l] == lb.grams[l] for l in range(m + 1))
        total += 1
    c.finish(f"{total} (α, φ) pairs: Grams on homology agree entrywise "
             f"(chain-level Grams agree in {raw_equal} of {total})")


# --- 7 ------------------------------------------------------------------

def test_criterion_7_descent(record):
    c = Criterion(7, 300, record)
    rng = random.Random(7)
    hyper = []
    for i in range(50):
        n = 1 + i % 2
        inst = random_hypercover(rng, n, max_dim=3 if n == 2 else 4, levels=n + 2)
        rep = verify_hypercover_descent(inst.f, n, k=2, W=3, N=3)
        c.check(rep.passed, f"hypercover {i}: {rep.message}")
        hyper.append(inst)
    surjections = [RatMatrix.from_rows(r) for r in
                   ([[1, 0]], [[1, 1]], [[1, 0, 1]], [[1, 0, 0], [0, 1, 1]], [[2, 1]], [[0, 1, 1], [1, 0, -1]])]
    for f in surjections:
        rep = verify_nerve_descent(f, k=2, W=3, N=3)
        c.check(rep.passed, f"nerve of {f}: {rep.message}")
        rows = check_homotopy_rows(f, up_to=3, W=3)
        c.check(rows.passed, f"nerve of {f}: {rows.message}")
    ez = 0
    for inst in hyper[:20:2]:
        if inst.n != 1:
            continue
        rep = ez_route(inst.f, k=2, W=3, N=2)
        c.check(rep.passed, f"EZ route: {rep.message}")
        ez += 1
    c.finish(f"{len(hyper)} hypercovers induce isomorphisms in degrees <= 3; homotopy identity exact on "
             f"{len(surjections)} Čech nerves; EZ and direct routes agree on {ez} instances")


# --- 8 ------------------------------------------------------------------

ZIGZAG_SHAPES = [
    # (m, n, homology dims of the base complex, extra disks)
    (0, 1, [2, 0], [0, 1]),
    (1, 1, [1, 1], [0, 1]),
    (1, 1, [2, 2], [0, 0]),
    (1, 2, [1, 1, 0], [0, 0, 1]),
    (2, 2, [1, 0, 1], [0, 0, 1]),
]


def random_zigzag(rng, i):
    m, n, h, disks = ZIGZAG_SHAPES[i % len(ZIGZAG_SHAPES)]
    B = scramble(rng, standard_complex(h, disks))[0]
    zz = zigzag_from(rng, B, n, n + 2)
    alpha = random_symplectic(rng, zz.g.target, m, n)
    return zz, alpha, m, n


def test_criterion_8_transfer(record):
    c = Criterion(8, 300, record)
    rng = random.Random(8)
    shifts = set()
    for i in range(20):
        zz, alpha, m, n = random_zigzag(rng, i)
        res = transfer_symplectic(zz.g, zz.h, alpha, n)  # Infeasible would fail the test
        c.check(res.verification.passed, f"zig-zag {i}: {res.verification.message}")
        c.check(check_shifted_symplectic(res.beta, n).passed, f"zig-zag {i}: β is not symplectic")
        # recheck g*α - h*β = Dφ straight from the definitions
        lhs = pullback_shifted(zz.g, alpha) - pullback_shifted(zz.h, res.beta)
        if m >= 1:
            D = res.phi.D()
            c.check(all(lhs.component(p) == D[p] for p in range(m + 1)), f"zig-zag {i}: gauge identity fails")
        else:
            c.check(lhs.is_zero(), f"zig-zag {i}: g*α != h*β")
        shifts.add((m, n))
    c.finish(f"20 zig-zags with (m, n) in {sorted(shifts)}: every transfer solved within weight(α) and verified")


# --- 9 ------------------------------------------------------------------

def test_criterion_9_transitivity(record):
    c = Criterion(9, 60, record)
    rng = random.Random(9)
    composed = 0
    for i in range(6):
        zz, alpha, m, n = random_zigzag(rng, [1, 2, 3, 0][i % 4])
        first = transfer_symplectic(zz.g, zz.h, alpha, n)
        # the zig-zag read backwards carries β on Y to γ on X
        second = transfer_symplectic(zz.h, zz.g, first.beta, n)
        a = first.morita(alpha, zz.g, zz.h, n)
        b = second.morita(first.beta, zz.h, zz.g, n)
        both = compose_morita(a, b)
        rep = check_morita(both)
        c.check(rep.passed, f"composite {i}: {rep.message}")
        if m >= 1:
            # the composite gauge form is p1*φ + p2*ψ on the fiber product
            U = both.f.source
            c.check(both.phi.model is U, f"composite {i}: gauge form lives on the wrong model")
        composed += 1
    c.finish(f"{composed} composites of two transfers pass the symplectic Morita check")


# --- 10 -----------------------------------------------------------------

def test_criterion_10_appendix_lemmas(record):
    c = Criterion(10, 120, record)
    rng = random.Random(10)
    triples = retracts = 0
    for i in range(10):
        inst = random_hypercover(rng, 1, max_dim=3, levels=3)
        rep = verify_triple_lemma(inst.f, k=2, W=3, N=2)
        c.check(rep.passed, f"triple lemma {i}: {rep.message}")
        triples += 1
        R = coskeleton_retract(inst.f, i % (inst.f.max_level + 1))
        c.check(R.verification.passed, f"retract {i}: {R.verification.message}")
        rep = verify_retract_lemma(R.phi, R.ftilde, R.g, R.s, k=2, W=3, N=3)
        c.check(rep.passed, f"retract lemma {i}: {rep.message}")
        retracts += 1
    c.finish(f"triple-complex lemma on {triples} instances, retract lemma on {retracts} coskeleton steps")
