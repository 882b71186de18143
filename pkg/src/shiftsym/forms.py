"""Polynomial differential forms and the de Rham simplicial double complex.

A form on Q^d is a sum of terms ``c * x^e dx_I``.  Its weight is the form
degree plus the polynomial degree; linear pullbacks, d and δ all preserve
weight, so every complex below splits into finite weight blocks and is
handled one block at a time.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import DimensionMismatch, InsufficientLevels, PreconditionError
from .exactla import (
    ChainComplexQ,
    RatMatrix,
    Subspace,
    block_matrix,
    compare_homology,
    homology,
    kernel_subspace,
    rat,
    rat_str,
    vstack,
)
from .linmodel import BisimplicialSpace, LinSimpSpace, SimpLinMap
from .reports import CohomologyReport

Term = tuple  # (mono, idx)


# ---------------------------------------------------------------------
# bases


@lru_cache(maxsize=None)
def monomials(d: int, deg: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of total degree ``deg`` in graded-lex order
    (x_0 > x_1 > ...)."""
    if deg < 0:
        return ()
    out = []
    for combo in itertools.combinations_with_replacement(range(d), deg):
        e = [0] * d
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    out.sort(key=lambda e: tuple(-x for x in e))
    return tuple(out)


@lru_cache(maxsize=None)
def form_basis(d: int, q: int, w: int) -> tuple[Term, ...]:
    """Basis of q-forms of weight exactly w on Q^d."""
    if q < 0 or q > d or w < q:
        return ()
    idxs = tuple(itertools.combinations(range(d), q))
    return tuple((e, I) for e in monomials(d, w - q) for I in idxs)


@lru_cache(maxsize=None)
def _basis_index(d: int, q: int, w: int) -> dict:
    return {t: i for i, t in enumerate(form_basis(d, q, w))}


def block_size(d: int, q: int, w: int) -> int:
    return len(form_basis(d, q, w))


# ---------------------------------------------------------------------
# forms


class PolyForm:
    """Polynomial q-form on Q^d; ``terms`` maps (mono, idx) to a nonzero rational."""

    __slots__ = ("dim", "degree", "terms")

    def __init__(self, dim: int, degree: int, terms: dict | None = None):
        self.dim = dim
        self.degree = degree
        clean = {}
        for (mono, idx), c in (terms or {}).items():
            mono, idx = tuple(mono), tuple(idx)
            if len(mono) != dim or len(idx) != degree:
                raise DimensionMismatch(f"term {mono, idx} does not fit a {degree}-form on Q^{dim}")
            if any(a >= b for a, b in zip(idx, idx[1:])) or any(i < 0 or i >= dim for i in idx):
                raise DimensionMismatch(f"index tuple {idx} is not strictly increasing in range")
            c = rat(c) if not isinstance(c, Fraction) else c
            if c:
                clean[(mono, idx)] = clean.get((mono, idx), 0) + c
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def zero(cls, dim: int, degree: int) -> PolyForm:
        return cls(dim, degree)

    @classmethod
    def constant(cls, gram: RatMatrix) -> PolyForm:
        """Constant 2-form from an antisymmetric Gram matrix: Σ_{i<j} G_ij dx_i∧dx_j."""
        d = gram.rows
        if gram.T != -gram:
            raise PreconditionError("Gram matrix is not antisymmetric")
        z = (0,) * d
        return cls(d, 2, {(z, (i, j)): gram[i, j] for i in range(d) for j in range(i + 1, d) if gram[i, j]})

    @classmethod
    def from_vector(cls, dim: int, degree: int, w: int, vec: Sequence) -> PolyForm:
        basis = form_basis(dim, degree, w)
        return cls(dim, degree, {t: c for t, c in zip(basis, vec) if c})

    def weights(self) -> list[int]:
        return sorted({self.degree + sum(m) for m, _ in self.terms})

    def max_weight(self) -> int:
        return max(self.weights(), default=self.degree)

    def part(self, w: int) -> PolyForm:
        return PolyForm(self.dim, self.degree, {k: v for k, v in self.terms.items() if self.degree + sum(k[0]) == w})

    def vector(self, w: int) -> tuple:
        index = _basis_index(self.dim, self.degree, w)
        vec = [Fraction(0)] * len(index)
        for t, c in self.terms.items():
            if self.degree + sum(t[0]) == w:
                vec[index[t]] = c
        return tuple(vec)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: PolyForm):
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise DimensionMismatch("forms live in different spaces")

    def __add__(self, other: PolyForm) -> PolyForm:
        self._check(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return PolyForm(self.dim, self.degree, t)

    def __neg__(self) -> PolyForm:
        return PolyForm(self.dim, self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: PolyForm) -> PolyForm:
        return self + (-other)

    def scale(self, c) -> PolyForm:
        c = rat(c)
        return PolyForm(self.dim, self.degree, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyForm) and (self.dim, self.degree) == (other.dim, other.degree) and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, self.degree, frozenset(self.terms.items())))

    def gram(self) -> RatMatrix:
        """Gram matrix at the origin of the constant part of a 2-form."""
        if self.degree != 2:
            raise PreconditionError("Gram matrix only defined for 2-forms")
        d = self.dim
        z = (0,) * d
        entries = {}
        for (mono, (i, j)), c in self.terms.items():
            if mono == z:
                entries[(i, j)] = c
                entries[(j, i)] = -c
        return RatMatrix.from_sparse(d, d, entries)

    def d(self) -> PolyForm:
        return de_rham_d(self)

    def pullback(self, a: RatMatrix) -> PolyForm:
        return pullback(a, self)

    def to_json(self, level: int | None = None) -> dict:
        terms = sorted(self.terms.items(), key=lambda kv: (sum(kv[0][0]), tuple(-x for x in kv[0][0]), kv[0][1]))
        out = {"degree": self.degree, "dim": self.dim,
               "terms": [{"mono": list(m), "idx": list(i), "coef": rat_str(c)} for (m, i), c in terms]}
        if level is not None:
            out = {"level": level, **out}
        return out

    @classmethod
    def from_json(cls, obj: dict, dim: int | None = None) -> PolyForm:
        terms = obj.get("terms", [])
        d = obj.get("dim", dim)
        if d is None:
            if not terms:
                raise DimensionMismatch("cannot infer the ambient dimension of an empty form")
            d = len(terms[0]["mono"])
        out = {}
        for t in terms:
            key = (tuple(int(x) for x in t["mono"]), tuple(int(x) for x in t["idx"]))
            out[key] = out.get(key, 0) + rat(t["coef"])
        return cls(int(d), int(obj["degree"]), out)

    def __repr__(self) -> str:
        return f"PolyForm(Q^{self.dim}, degree {self.degree}, {len(self.terms)} terms)"


# ---------------------------------------------------------------------
# d and pullbacks on single forms


def de_rham_d(form: PolyForm) -> PolyForm:
    out: dict = {}
    for (mono, idx), c in form.terms.items():
        for j, e in enumerate(mono):
            if e == 0 or j in idx:
                continue
            sign = -1 if sum(1 for i in idx if i < j) % 2 else 1
            new_mono = mono[:j] + (e - 1,) + mono[j + 1 :]
            new_idx = tuple(sorted(idx + (j,)))
            key = (new_mono, new_idx)
            out[key] = out.get(key, 0) + sign * e * c
    return PolyForm(form.dim, form.degree + 1, out)


class _Pullback:
    """Cached expansion of x^e dx_I along a linear map y -> A y."""

    def __init__(self, a: RatMatrix):
        self.a = a
        self.s = a.cols
        self.rows = a.sparse_rows()
        self._pow: dict = {}
        self._wedge: dict = {(): {(): Fraction(1)}}

    def _unit(self):
        return {(0,) * self.s: Fraction(1)}

    def _linear(self, j: int) -> dict:
        out = {}
        for c, v in self.rows[j].items():
            e = [0] * self.s
            e[c] = 1
            out[tuple(e)] = v
        return out

    def power(self, j: int, k: int) -> dict:
        key = (j, k)
        hit = self._pow.get(key)
        if hit is None:
            hit = self._unit() if k == 0 else _poly_mul(self.power(j, k - 1), self._linear(j))
            self._pow[key] = hit
        return hit

    def poly(self, mono: tuple) -> dict:
        out = self._unit()
        for j, k in enumerate(mono):
            if k:
                out = _poly_mul(out, self.power(j, k))
        return out

    def wedge(self, idx: tuple) -> dict:
        """(A^T dx_{i1}) ∧ ... as {J: coefficient}, i.e. the minors det A[I, J]."""
        hit = self._wedge.get(idx)
        if hit is not None:
            return hit
        prev = self.wedge(idx[:-1])
        last = self.rows[idx[-1]]
        out: dict = {}
        for J, c in prev.items():
            for col, v in last.items():
                if col in J:
                    continue
                pos = sum(1 for t in J if t > col)  # move dy_col left past larger indices
                sign = -1 if pos % 2 else 1
                K = tuple(sorted(J + (col,)))
                out[K] = out.get(K, 0) + sign * c * v
        out = {k: v for k, v in out.items() if v}
        self._wedge[idx] = out
        return out

    def term(self, mono: tuple, idx: tuple) -> dict:
        w = self.wedge(idx)
        if not w:
            return {}
        p = self.poly(mono)
        out = {}
        for m, c in p.items():
            for J, v in w.items():
                out[(m, J)] = out.get((m, J), 0) + c * v
        return out


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def pullback(a: RatMatrix, form: PolyForm) -> PolyForm:
    """Pull a form on Q^t back along ``a: Q^s -> Q^t``."""
    if a.rows != form.dim:
        raise DimensionMismatch(f"map has {a.rows} rows, form lives on Q^{form.dim}")
    pb = _Pullback(a)
    out: dict = {}
    for (mono, idx), c in form.terms.items():
        for k, v in pb.term(mono, idx).items():
            out[k] = out.get(k, 0) + c * v
    return PolyForm(a.cols, form.degree, out)


# ---------------------------------------------------------------------
# block matrices


_PB_CACHE: dict = {}
_D_CACHE: dict = {}


def pullback_matrix(a: RatMatrix, q: int, w: int) -> RatMatrix:
    """Matrix of a^* on the weight-w block of q-forms."""
    key = (a, q, w)
    hit = _PB_CACHE.get(key)
    if hit is not None:
        return hit
    t, s = a.rows, a.cols
    src = form_basis(t, q, w)
    tgt_index = _basis_index(s, q, w)
    pb = _Pullback(a)
    entries = {}
    for col, (mono, idx) in enumerate(src):
        for k, v in pb.term(mono, idx).items():
            if v:
                entries[(tgt_index[k], col)] = entries.get((tgt_index[k], col), 0) + v
    out = RatMatrix.from_sparse(len(tgt_index), len(src), entries)
    if len(_PB_CACHE) > 20000:
        _PB_CACHE.clear()
    _PB_CACHE[key] = out
    return out


def derham_matrix(dim: int, q: int, w: int) -> RatMatrix:
    key = (dim, q, w)
    hit = _D_CACHE.get(key)
    if hit is not None:
        return hit
    src = form_basis(dim, q, w)
    tgt_index = _basis_index(dim, q + 1, w)
    entries = {}
    for col, t in enumerate(src):
        for k, v in de_rham_d(PolyForm(dim, q, {t: 1})).terms.items():
            entries[(tgt_index[k], col)] = v
    out = RatMatrix.from_sparse(len(tgt_index), len(src), entries)
    _D_CACHE[key] = out
    return out


def simplicial_delta(X: LinSimpSpace, p: int, form: PolyForm) -> PolyForm:
    """δ = Σ_i (-1)^i d_i^* from forms on X_{p-1} to forms on X_p."""
    if not 1 <= p <= X.max_level:
        raise InsufficientLevels(f"δ into level {p} needs levels through {p}")
    if form.dim != X.dims[p - 1]:
        raise DimensionMismatch("form does not live on X_{p-1}")
    out = PolyForm.zero(X.dims[p], form.degree)
    for i in range(p + 1):
        term = pullback(X.face(p, i), form)
        out = out - term if i % 2 else out + term
    return out


# ---------------------------------------------------------------------
# the double complex


class FormBicomplex:
    """Normalized (or full), k-truncated, weight-graded de Rham double
    complex of a linear model.  Blocks are built on demand."""

    def __init__(self, model: LinSimpSpace, k: int = 2, normalized: bool = True):
        self.model = model
        self.k = k
        self.normalized = normalized
        self._blocks: dict = {}

    def block(self, p: int, q: int, w: int) -> Subspace:
        """Normalized q-forms of weight w on X_p, inside the full block."""
        key = (p, q, w)
        hit = self._blocks.get(key)
        if hit is not None:
            return hit
        n = block_size(self.model.dims[p], q, w) if q >= self.k else 0
        if not self.normalized or p == 0 or n == 0:
            sp = Subspace.whole(n)
        else:
            mats = [pullback_matrix(self.model.degen(p - 1, i), q, w) for i in range(p)]
            sp = kernel_subspace(vstack(mats, cols=n))
        self._blocks[key] = sp
        return sp

    def dim(self, p: int, q: int, w: int) -> int:
        return self.block(p, q, w).dim

    def components(self, n: int, w: int) -> list[tuple[int, int]]:
        """(p, q) with p + q = n, q >= k, stored level p, nonzero block."""
        out = []
        for p in range(0, n + 1):
            q = n - p
            if q < self.k or p > self.model.max_level:
                continue
            if self.dim(p, q, w):
                out.append((p, q))
        return out

    def needs_level(self, n: int) -> int:
        return n + 1 - self.k

    def delta(self, p: int, q: int, w: int) -> RatMatrix:
        """δ: block (p-1, q) -> block (p, q) in normalized coordinates."""
        X = self.model
        src, tgt = self.block(p - 1, q, w), self.block(p, q, w)
        full = None
        for i in range(p + 1):
            m = pullback_matrix(X.face(p, i), q, w) @ src.basis
            m = m if i % 2 == 0 else -m
            full = m if full is None else full + m
        return tgt.coords(full, check=False)

    def dr(self, p: int, q: int, w: int) -> RatMatrix:
        """d: block (p, q) -> block (p, q+1)."""
        src, tgt = self.block(p, q, w), self.block(p, q + 1, w)
        return tgt.coords(derham_matrix(self.model.dims[p], q, w) @ src.basis, check=False)

    def total_dim(self, n: int, w: int) -> int:
        return sum(self.dim(p, q, w) for p, q in self.components(n, w))

    def D(self, n: int, w: int) -> RatMatrix:
        """Total differential D = δ + (-1)^p d from degree n to n+1."""
        src = self.components(n, w)
        tgt = self.components(n + 1, w)
        sdims = [self.dim(p, q, w) for p, q in src]
        tdims = [self.dim(p, q, w) for p, q in tgt]
        grid = []
        for tp, tq in tgt:
            row = []
            for sp, sq in src:
                if (tp, tq) == (sp + 1, sq):
                    row.append(self.delta(tp, tq, w))
                elif (tp, tq) == (sp, sq + 1):
                    m = self.dr(sp, sq, w)
                    row.append(-m if sp % 2 else m)
                else:
                    row.append(None)
            grid.append(row)
        return block_matrix(grid, tdims, sdims)

    def complex(self, w: int, top: int) -> ChainComplexQ:
        """Cochain complex in degrees 0..top+1 for weight w."""
        if self.needs_level(top) > self.model.max_level:
            raise InsufficientLevels(f"degree {top} needs levels through {self.needs_level(top)}")
        dims = {n: self.total_dim(n, w) for n in range(top + 2)}
        diffs = {n: self.D(n, w) for n in range(top + 1)}
        return ChainComplexQ(dims, diffs, cochain=True)

    def vector(self, comps: dict, n: int, w: int) -> tuple:
        """Coordinates of {p: PolyForm on X_p} (total degree n) in the
        weight-w block; raises if a component is not normalized."""
        out = []
        for p, q in self.components(n, w):
            form = comps.get(p)
            full = form.vector(w) if form is not None else (0,) * block_size(self.model.dims[p], q, w)
            col = RatMatrix(len(full), 1, [[x] for x in full])
            out.extend(self.block(p, q, w).coords(col).column(0) if col.rows else ())
        return tuple(out)

    def forms_from_vector(self, vec: Sequence, n: int, w: int) -> dict:
        """Inverse of :meth:`vector`: {p: PolyForm}."""
        out = {}
        pos = 0
        for p, q in self.components(n, w):
            sp = self.block(p, q, w)
            part = RatMatrix(sp.dim, 1, [[x] for x in vec[pos:pos + sp.dim]])
            pos += sp.dim
            full = (sp.basis @ part).column(0) if sp.dim else ()
            out[p] = PolyForm.from_vector(self.model.dims[p], q, w, full)
        return out

    def cohomology(self, n: int, W: int) -> tuple[int, dict]:
        """dim H^n summed over weights k..W, and the per-weight dims."""
        per = {}
        for w in range(self.k, W + 1):
            per[w] = homology(self.complex(w, n), [n])[n].dim
        return sum(per.values()), per


def truncated_total_cohomology(X: LinSimpSpace, k: int, n: int, W: int, normalized: bool = True) -> CohomologyReport:
    """Cohomology in degree n of the k-truncated weight-<=W total complex."""
    total, per = FormBicomplex(X, k, normalized).cohomology(n, W)
    return CohomologyReport({n: total}, per_weight=per)


def normalized_basis(X: LinSimpSpace, p: int, q: int, W: int) -> dict:
    """Normalized q-forms on X_p, per weight w <= W (no truncation)."""
    fb = FormBicomplex(X, k=0)
    return {w: [PolyForm.from_vector(X.dims[p], q, w, c) for c in fb.block(p, q, w).basis.columns()]
            for w in range(q, W + 1)}


def pullback_chain_map(fb_target: FormBicomplex, fb_source: FormBicomplex, f: SimpLinMap, w: int, top: int) -> dict:
    """f^*: total complex of f.target -> total complex of f.source (weight w)."""
    out = {}
    for n in range(top + 2):
        src = fb_target.components(n, w)
        tgt = fb_source.components(n, w)
        grid = []
        for tp, tq in tgt:
            row = []
            for sp, sq in src:
                if (tp, tq) == (sp, sq):
                    A = fb_target.block(sp, sq, w)
                    B = fb_source.block(tp, tq, w)
                    row.append(B.coords(pullback_matrix(f[sp], sq, w) @ A.basis, check=False))
                else:
                    row.append(None)
            grid.append(row)
        out[n] = block_matrix(grid, [fb_source.dim(p, q, w) for p, q in tgt], [fb_target.dim(p, q, w) for p, q in src])
    return out


def compare_pullback(f: SimpLinMap, k: int, W: int, top: int, normalized: bool = True) -> dict:
    """Per degree n <= top: dims of H^n on target and source and the rank of
    the induced map f^*, summed over weights."""
    fy = FormBicomplex(f.target, k, normalized)
    fx = FormBicomplex(f.source, k, normalized)
    agg: dict = {}
    for w in range(k, W + 1):
        cy, cx = fy.complex(w, top), fx.complex(w, top)
        maps = pullback_chain_map(fy, fx, f, w, top)
        for n, im in compare_homology(cy, cx, maps, range(top + 1)).items():
            a = agg.setdefault(n, [0, 0, 0])
            a[0] += im.dim_source
            a[1] += im.dim_target
            a[2] += im.induced_rank
    return {n: {"dim_source": a, "dim_target": b, "induced_rank": r, "iso": a == b == r} for n, (a, b, r) in agg.items()}


# ---------------------------------------------------------------------
# the triple complex of a Čech bisimplicial space


class TripleComplex:
    """K^{r,p,q} = normalized, k-truncated q-forms on Z_{r,p} with
    D = δ_1 + (-1)^r δ_2 + (-1)^{r+p} d; r is the Čech index."""

    def __init__(self, B: BisimplicialSpace, k: int = 2):
        self.B = B
        self.k = k
        self._blocks: dict = {}

    def block(self, r: int, p: int, q: int, w: int) -> Subspace:
        key = (r, p, q, w)
        hit = self._blocks.get(key)
        if hit is not None:
            return hit
        d = self.B.dims[(r, p)]
        n = block_size(d, q, w) if q >= self.k else 0
        mats = [pullback_matrix(self.B.vdegen[(r - 1, p, i)], q, w) for i in range(r)]
        mats += [pullback_matrix(self.B.hdegen[(r, p - 1, j)], q, w) for j in range(p)]
        sp = kernel_subspace(vstack(mats, cols=n)) if mats and n else Subspace.whole(n)
        self._blocks[key] = sp
        return sp

    def components(self, n: int, w: int) -> list[tuple[int, int, int]]:
        out = []
        for r in range(n + 1):
            for p in range(n + 1 - r):
                q = n - r - p
                if q < self.k or r > self.B.I or p > self.B.J:
                    continue
                if self.block(r, p, q, w).dim:
                    out.append((r, p, q))
        return out

    def _alt(self, faces: list, q: int, w: int, basis: RatMatrix) -> RatMatrix:
        full = None
        for i, f in enumerate(faces):
            m = pullback_matrix(f, q, w) @ basis
            m = -m if i % 2 else m
            full = m if full is None else full + m
        return full

    def D(self, n: int, w: int) -> RatMatrix:
        src = self.components(n, w)
        tgt = self.components(n + 1, w)
        grid = []
        for tr, tp, tq in tgt:
            row = []
            T = self.block(tr, tp, tq, w)
            for sr, sp, sq in src:
                S = self.block(sr, sp, sq, w)
                if (tr, tp, tq) == (sr + 1, sp, sq):
                    full = self._alt([self.B.vface[(tr, tp, i)] for i in range(tr + 1)], sq, w, S.basis)
                    row.append(T.coords(full, check=False))
                elif (tr, tp, tq) == (sr, sp + 1, sq):
                    full = self._alt([self.B.hface[(tr, tp, j)] for j in range(tp + 1)], sq, w, S.basis)
                    m = T.coords(full, check=False)
                    row.append(-m if sr % 2 else m)
                elif (tr, tp, tq) == (sr, sp, sq + 1):
                    full = derham_matrix(self.B.dims[(sr, sp)], sq, w)
                    m = T.coords(full @ S.basis, check=False)
                    row.append(-m if (sr + sp) % 2 else m)
                else:
                    row.append(None)
            grid.append(row)
        return block_matrix(grid, [self.block(*c, w).dim for c in tgt], [self.block(*c, w).dim for c in src])

    def complex(self, w: int, top: int) -> ChainComplexQ:
        dims = {n: sum(self.block(*c, w).dim for c in self.components(n, w)) for n in range(top + 2)}
        return ChainComplexQ(dims, {n: self.D(n, w) for n in range(top + 1)}, cochain=True)

    def augmentation(self, fy: FormBicomplex, w: int, top: int) -> dict:
        """f^*: total complex of Y -> total triple complex, landing in r = 0."""
        out = {}
        for n in range(top + 2):
            src = fy.components(n, w)
            tgt = self.components(n, w)
            grid = []
            for tr, tp, tq in tgt:
                row = []
                for sp, sq in src:
                    if (tr, tp, tq) == (0, sp, sq):
                        A = fy.block(sp, sq, w)
                        T = self.block(0, sp, sq, w)
                        row.append(T.coords(pullback_matrix(self.B.augmentation(sp), sq, w) @ A.basis, check=False))
                    else:
                        row.append(None)
                grid.append(row)
            out[n] = block_matrix(grid, [self.block(*c, w).dim for c in tgt], [fy.dim(p, q, w) for p, q in src])
        return out

    def ez_matrix(self, i: int, j: int) -> RatMatrix:
        """Point map Z_{nn} -> Z_{ij} (n = i + j) whose pullback is
        (d_{i+1}^*)^j (d̄_0^*)^i: vertical d_{i+1} j times, then horizontal d̄_0 i times."""
        n = i + j
        B = self.B
        m = RatMatrix.identity(B.dims[(n, n)])
        for r in range(n, i, -1):
            m = B.vface[(r, n, i + 1)] @ m
        for p in range(n, j, -1):
            m = B.hface[(i, p, 0)] @ m
        return m

    def ez_map(self, diag: FormBicomplex, w: int, top: int) -> dict:
        """Chain map from the triple total complex to the diagonal total complex."""
        out = {}
        for N in range(top + 2):
            src = self.components(N, w)
            tgt = diag.components(N, w)
            grid = []
            for tn, tq in tgt:
                row = []
                for r, p, q in src:
                    if r + p == tn and q == tq:
                        S = self.block(r, p, q, w)
                        T = diag.block(tn, tq, w)
                        row.append(T.coords(pullback_matrix(self.ez_matrix(r, p), q, w) @ S.basis, check=False))
                    else:
                        row.append(None)
                grid.append(row)
            out[N] = block_matrix(grid, [diag.dim(n, q, w) for n, q in tgt], [self.block(*c, w).dim for c in src])
        return out


def ez_diagonal(B: BisimplicialSpace, i: int, j: int, form: PolyForm) -> PolyForm:
    """(d_{i+1}^*)^j (d̄_0^*)^i applied to a form on Z_{ij}."""
    return pullback(TripleComplex(B).ez_matrix(i, j), form)
