"""Simplicial vector spaces over Q as linear models of Lie n-groupoids.

A model stores its level dimensions and the face and degeneracy matrices
through a top level ``L``.  Limits over finite shapes (horns, boundaries,
skeleta) are computed as kernels: one unknown vector per nondegenerate
simplex of the shape, one block equation per face relation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from .errors import DimensionMismatch, InsufficientLevels, InvalidModel, PreconditionError
from .exactla import (
    ChainComplexQ,
    RatMatrix,
    Subspace,
    block_diag,
    hstack,
    kernel_subspace,
    rank,
    rat,
    vstack,
)
from .reports import CheckReport, matrix_json
from .ssets import SimplicialShape, boundary, horn, skeleton_of_simplex


# ---------------------------------------------------------------------
# models and maps


class LinSimpSpace:
    """Simplicial Q-vector space through level ``max_level``.

    ``faces[(m, i)]`` is the matrix of ``d_i: X_m -> X_{m-1}`` and
    ``degens[(m, i)]`` that of ``s_i: X_m -> X_{m+1}``.
    """

    def __init__(self, dims: Sequence[int], faces: dict, degens: dict, name: str = ""):
        self.dims = tuple(int(d) for d in dims)
        self.max_level = len(self.dims) - 1
        self.faces = dict(faces)
        self.degens = dict(degens)
        self.name = name
        self._ops: dict = {}
        for m in range(1, self.max_level + 1):
            for i in range(m + 1):
                mat = self.faces.get((m, i))
                if mat is None or mat.shape != (self.dims[m - 1], self.dims[m]):
                    raise DimensionMismatch(f"face d{i} on level {m} missing or of wrong shape")
        for m in range(self.max_level):
            for i in range(m + 1):
                mat = self.degens.get((m, i))
                if mat is None or mat.shape != (self.dims[m + 1], self.dims[m]):
                    raise DimensionMismatch(f"degeneracy s{i} on level {m} missing or of wrong shape")

    def face(self, m: int, i: int) -> RatMatrix:
        return self.faces[(m, i)]

    def degen(self, m: int, i: int) -> RatMatrix:
        return self.degens[(m, i)]

    def identity(self, m: int) -> RatMatrix:
        return RatMatrix.identity(self.dims[m])

    def operator(self, f: Sequence[int], m: int) -> RatMatrix:
        """Matrix of ``X(f): X_m -> X_k`` for a monotone ``f: [k] -> [m]``."""
        f = tuple(f)
        key = (f, m)
        hit = self._ops.get(key)
        if hit is not None:
            return hit
        k = len(f) - 1
        if f == tuple(range(m + 1)):
            out = self.identity(m)
        else:
            rep = next((i for i in range(k) if f[i] == f[i + 1]), None)
            if rep is not None:
                # f = g ∘ σ^rep, so X(f) = s_rep ∘ X(g)
                g = f[: rep + 1] + f[rep + 2 :]
                out = self.degen(k - 1, rep) @ self.operator(g, m)
            else:
                v = next(t for t in range(m + 1) if t not in f)
                # f = δ^v ∘ g, so X(f) = X(g) ∘ d_v
                g = tuple(t - (t > v) for t in f)
                out = self.operator(g, m - 1) @ self.face(m, v)
        self._ops[key] = out
        return out

    def truncate(self, level: int) -> LinSimpSpace:
        if level > self.max_level:
            raise InsufficientLevels(f"model has {self.max_level} levels, asked for {level}")
        return LinSimpSpace(
            self.dims[: level + 1],
            {k: v for k, v in self.faces.items() if k[0] <= level},
            {k: v for k, v in self.degens.items() if k[0] < level},
            self.name,
        )

    # -- validation ----------------------------------------------------
    def identity_violations(self, limit: int = 10) -> list[str]:
        """The five simplicial identities as exact matrix equations."""
        bad: list[str] = []
        F, S, L = self.faces, self.degens, self.max_level
        for n in range(2, L + 1):
            for j in range(n + 1):
                for i in range(j):
                    if F[(n - 1, i)] @ F[(n, j)] != F[(n - 1, j - 1)] @ F[(n, i)]:
                        bad.append(f"d{i} d{j} != d{j-1} d{i} on level {n}")
        for n in range(L - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    if S[(n + 1, i)] @ S[(n, j)] != S[(n + 1, j + 1)] @ S[(n, i)]:
                        bad.append(f"s{i} s{j} != s{j+1} s{i} on level {n}")
        for n in range(L):
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = F[(n + 1, i)] @ S[(n, j)]
                    if i < j:
                        rhs = S[(n - 1, j - 1)] @ F[(n, i)]
                    elif i in (j, j + 1):
                        rhs = self.identity(n)
                    else:
                        rhs = S[(n - 1, j)] @ F[(n, i - 1)]
                    if lhs != rhs:
                        bad.append(f"d{i} s{j} identity fails on level {n}")
            if len(bad) >= limit:
                break
        return bad[:limit]

    def validate(self) -> None:
        bad = self.identity_violations(limit=1)
        if bad:
            raise InvalidModel(bad[0])

    def is_valid(self) -> bool:
        return not self.identity_violations(limit=1)

    # -- serialisation -------------------------------------------------
    def to_json(self) -> dict:
        return {
            "levels": list(self.dims),
            "face": {f"{m},{i}": matrix_json(v) for (m, i), v in sorted(self.faces.items())},
            "degen": {f"{m},{i}": matrix_json(v) for (m, i), v in sorted(self.degens.items())},
        }

    @classmethod
    def from_json(cls, obj: dict, name: str = "", validate: bool = True) -> LinSimpSpace:
        dims = [int(d) for d in obj["levels"]]

        def parse(table, shift):
            out = {}
            for key, rows in table.items():
                m, i = (int(t) for t in key.strip("()").split(","))
                if not 0 <= m + shift < len(dims) or not 0 <= m < len(dims):
                    raise DimensionMismatch(f"structure map {key} outside the stored levels")
                out[(m, i)] = _parse_matrix(rows, dims[m + shift], dims[m], key)
            return out

        model = cls(dims, parse(obj.get("face", {}), -1), parse(obj.get("degen", {}), 1), name)
        if validate:
            model.validate()
        return model

    def __repr__(self) -> str:
        return f"LinSimpSpace({self.name or 'unnamed'}: dims {list(self.dims)})"


def _parse_matrix(rows, nrows: int, ncols: int, where: str = "") -> RatMatrix:
    if nrows == 0:
        if rows not in ([], None) and any(rows):
            raise DimensionMismatch(f"matrix {where}: expected 0 rows")
        return RatMatrix.zeros(0, ncols)
    mat = RatMatrix(len(rows), len(rows[0]) if rows else 0, [[rat(x) for x in r] for r in rows])
    if mat.shape != (nrows, ncols):
        raise DimensionMismatch(f"matrix {where}: shape {mat.shape}, expected {(nrows, ncols)}")
    return mat


class SimpLinMap:
    """Levelwise matrices ``f_m: X_m -> Y_m`` commuting with the structure."""

    def __init__(self, source: LinSimpSpace, target: LinSimpSpace, mats: Sequence[RatMatrix], name: str = ""):
        if source.max_level != target.max_level:
            raise DimensionMismatch("source and target store different numbers of levels")
        if len(mats) != source.max_level + 1:
            raise DimensionMismatch("need one matrix per level")
        for m, a in enumerate(mats):
            if a.shape != (target.dims[m], source.dims[m]):
                raise DimensionMismatch(f"level {m} matrix has shape {a.shape}")
        self.source = source
        self.target = target
        self.mats = tuple(mats)
        self.name = name

    @property
    def max_level(self) -> int:
        return self.source.max_level

    def __getitem__(self, m: int) -> RatMatrix:
        return self.mats[m]

    def violations(self, limit: int = 10) -> list[str]:
        bad = []
        X, Y = self.source, self.target
        for (m, i), d in X.faces.items():
            if self.mats[m - 1] @ d != Y.face(m, i) @ self.mats[m]:
                bad.append(f"map does not commute with d{i} on level {m}")
        for (m, i), s in X.degens.items():
            if self.mats[m + 1] @ s != Y.degen(m, i) @ self.mats[m]:
                bad.append(f"map does not commute with s{i} on level {m}")
        return bad[:limit]

    def validate(self) -> None:
        bad = self.violations(limit=1)
        if bad:
            raise InvalidModel(bad[0])

    def compose(self, other: SimpLinMap) -> SimpLinMap:
        """``self ∘ other``."""
        if other.target is not self.source and other.target.dims != self.source.dims:
            raise DimensionMismatch("maps do not compose")
        return SimpLinMap(other.source, self.target, [a @ b for a, b in zip(self.mats, other.mats)])

    def __matmul__(self, other: SimpLinMap) -> SimpLinMap:
        return self.compose(other)

    def equals(self, other: SimpLinMap) -> bool:
        return all(a == b for a, b in zip(self.mats, other.mats))

    def to_json(self) -> dict:
        return {"level_mats": {str(m): matrix_json(a) for m, a in enumerate(self.mats)}}

    @classmethod
    def from_json(cls, obj: dict, source: LinSimpSpace, target: LinSimpSpace, validate: bool = True) -> SimpLinMap:
        mats = []
        for m in range(source.max_level + 1):
            if str(m) not in obj["level_mats"]:
                raise DimensionMismatch(f"map is missing level {m}")
            mats.append(_parse_matrix(obj["level_mats"][str(m)], target.dims[m], source.dims[m], f"level {m}"))
        f = cls(source, target, mats)
        if validate:
            f.validate()
        return f


def identity_map(X: LinSimpSpace) -> SimpLinMap:
    return SimpLinMap(X, X, [X.identity(m) for m in range(X.max_level + 1)])


def zero_map(X: LinSimpSpace, Y: LinSimpSpace) -> SimpLinMap:
    return SimpLinMap(X, Y, [RatMatrix.zeros(Y.dims[m], X.dims[m]) for m in range(X.max_level + 1)])


# ---------------------------------------------------------------------
# standard models


def constant_space(dim: int, up_to: int) -> LinSimpSpace:
    """Every level equal to Q^dim, all structure maps the identity."""
    idm = RatMatrix.identity(dim)
    faces = {(m, i): idm for m in range(1, up_to + 1) for i in range(m + 1)}
    degens = {(m, i): idm for m in range(up_to) for i in range(m + 1)}
    return LinSimpSpace([dim] * (up_to + 1), faces, degens, name=f"const(Q^{dim})")


def point_space(up_to: int) -> LinSimpSpace:
    out = constant_space(0, up_to)
    out.name = "pt"
    return out


def to_point(X: LinSimpSpace) -> SimpLinMap:
    return zero_map(X, point_space(X.max_level))


def pair_space(dim: int, up_to: int) -> LinSimpSpace:
    """Linear pair groupoid of Q^dim: level k is (Q^dim)^{k+1}, d_i deletes
    the i-th block and s_i repeats it."""

    def select(blocks: Sequence[int], k: int) -> RatMatrix:
        entries = {}
        for row_block, col_block in enumerate(blocks):
            for t in range(dim):
                entries[(row_block * dim + t, col_block * dim + t)] = 1
        return RatMatrix.from_sparse(len(blocks) * dim, (k + 1) * dim, entries)

    faces = {}
    degens = {}
    for m in range(1, up_to + 1):
        for i in range(m + 1):
            faces[(m, i)] = select([b for b in range(m + 1) if b != i], m)
    for m in range(up_to):
        for i in range(m + 1):
            degens[(m, i)] = select(list(range(i + 1)) + list(range(i, m + 1)), m)
    return LinSimpSpace([dim * (k + 1) for k in range(up_to + 1)], faces, degens, name=f"pair(Q^{dim})")


# ---------------------------------------------------------------------
# Dold–Kan


@lru_cache(maxsize=None)
def surjections(p: int) -> tuple[tuple[int, ...], ...]:
    """All surjections ``[p] ->> [k]`` for ``k = 0..p``, by ``k`` then lexicographically."""
    out = []
    for k in range(p + 1):
        for steps in itertools.combinations(range(1, p + 1), k):
            eta, cur = [], 0
            for t in range(p + 1):
                if t in steps:
                    cur += 1
                eta.append(cur)
            out.append(tuple(eta))
    return tuple(sorted(out, key=lambda e: (e[-1], e)))


def _dk_layout(C: ChainComplexQ, p: int):
    offsets, pos = {}, 0
    for eta in surjections(p):
        offsets[eta] = pos
        pos += C.dim(eta[-1])
    return offsets, pos


def _dk_operator(C: ChainComplexQ, theta: Sequence[int], p: int) -> RatMatrix:
    """θ^*: X_p -> X_{p'} for monotone θ: [p'] -> [p]."""
    q = len(theta) - 1
    src_off, src_dim = _dk_layout(C, p)
    tgt_off, tgt_dim = _dk_layout(C, q)
    entries = {}
    for eta, off in src_off.items():
        k = eta[-1]
        comp = [eta[t] for t in theta]
        image = sorted(set(comp))
        eps = tuple(image.index(c) for c in comp)
        if len(image) == k + 1:
            block = RatMatrix.identity(C.dim(k))
        elif image == list(range(1, k + 1)):
            block = C.diff(k)
        else:
            continue
        toff = tgt_off[eps]
        for r, row in enumerate(block.sparse_rows()):
            for c, v in row.items():
                entries[(toff + r, off + c)] = v
    return RatMatrix.from_sparse(tgt_dim, src_dim, entries)


def dold_kan(C: ChainComplexQ, up_to: int) -> LinSimpSpace:
    """Γ(C): X_p is the sum over surjections [p] ->> [k] of C_k."""
    if C.cochain or any(l < 0 for l in C.degrees if C.dim(l)):
        raise PreconditionError("Dold–Kan needs a chain complex in degrees >= 0")
    C.validate()
    dims = [_dk_layout(C, p)[1] for p in range(up_to + 1)]
    faces, degens = {}, {}
    for m in range(1, up_to + 1):
        for i in range(m + 1):
            theta = tuple(t for t in range(m + 1) if t != i)
            faces[(m, i)] = _dk_operator(C, theta, m)
    for m in range(up_to):
        for i in range(m + 1):
            theta = tuple(range(i + 1)) + tuple(range(i, m + 1))
            degens[(m, i)] = _dk_operator(C, theta, m)
    return LinSimpSpace(dims, faces, degens, name="DK")


def dold_kan_map(phi: dict, C: ChainComplexQ, D: ChainComplexQ, up_to: int,
                 source: LinSimpSpace | None = None, target: LinSimpSpace | None = None) -> SimpLinMap:
    """Γ(φ) for a chain map given as ``{degree: matrix C_l -> D_l}``."""
    X = source or dold_kan(C, up_to)
    Y = target or dold_kan(D, up_to)
    mats = []
    for p in range(up_to + 1):
        blocks = []
        for eta in surjections(p):
            k = eta[-1]
            blocks.append(phi.get(k, RatMatrix.zeros(D.dim(k), C.dim(k))))
        mats.append(block_diag(blocks) if blocks else RatMatrix.zeros(0, 0))
    f = SimpLinMap(X, Y, mats)
    return f


@dataclass
class MooreComplex:
    complex: ChainComplexQ
    inclusions: dict  # degree -> matrix N_p -> X_p


def normalize(X: LinSimpSpace) -> MooreComplex:
    """Moore complex: N_p = ∩_{i>=1} ker d_i with differential d_0."""
    subs = {}
    for p in range(X.max_level + 1):
        if p == 0:
            subs[0] = Subspace.whole(X.dims[0])
        else:
            subs[p] = kernel_subspace(vstack([X.face(p, i) for i in range(1, p + 1)], cols=X.dims[p]))
    dims = {p: subs[p].dim for p in subs}
    diffs = {}
    for p in range(1, X.max_level + 1):
        diffs[p] = subs[p - 1].coords(X.face(p, 0) @ subs[p].basis)
    return MooreComplex(ChainComplexQ(dims, diffs), {p: s.basis for p, s in subs.items()})


# ---------------------------------------------------------------------
# limits over shapes


class HomSpace:
    """Hom(S, X) for a shape ``S`` (optionally fibred over ``Y_m`` via ``f``).

    Ambient coordinates: one block of ``X_{dim σ}`` per nondegenerate
    simplex σ of ``S`` (in the shape's order), then ``Y_m`` when relative.
    ``space`` is the solution subspace; ``evaluation`` gives the value at
    any simplex of ``S`` as a matrix on ambient coordinates.
    """

    def __init__(self, shape: SimplicialShape, model: LinSimpSpace, over: tuple | None = None):
        if shape.dimension() > model.max_level:
            raise InsufficientLevels(f"shape has dimension {shape.dimension()}, model stores {model.max_level} levels")
        self.shape = shape
        self.model = model
        self.nondeg = shape.nondegenerate_simplices()
        self.offsets = {}
        pos = 0
        for lv, idx in self.nondeg:
            self.offsets[(lv, idx)] = pos
            pos += model.dims[lv]
        self.x_dim = pos
        self.over = over  # (f: SimpLinMap, m, operator(g) on Y for each nondeg g)
        self.y_dim = over[0].target.dims[over[1]] if over else 0
        self.ambient = self.x_dim + self.y_dim
        rows = []
        for lv, idx in self.nondeg:
            if lv == 0:
                continue
            for i in range(lv + 1):
                tgt = shape.faces[(lv, i)][idx]
                rows.append(self._block(lv - 1, lv, idx, model.face(lv, i)) - self.evaluation(lv - 1, tgt))
        if over:
            f, m, _ = over
            Y = f.target
            for lv, idx in self.nondeg:
                val = self._block(lv, lv, idx, f[lv])
                yop = Y.operator(shape.levels[lv][idx], m)
                rows.append(val - self._y_part(yop))
        self.constraints = vstack(rows, cols=self.ambient) if rows else RatMatrix.zeros(0, self.ambient)
        self.space = kernel_subspace(self.constraints)

    @property
    def dim(self) -> int:
        return self.space.dim

    def _block(self, out_level: int, lv: int, idx: int, mat: RatMatrix) -> RatMatrix:
        """``mat`` applied to the block of nondegenerate simplex (lv, idx)."""
        off = self.offsets[(lv, idx)]
        entries = {}
        for r, row in enumerate(mat.sparse_rows()):
            for c, v in row.items():
                entries[(r, off + c)] = v
        return RatMatrix.from_sparse(mat.rows, self.ambient, entries)

    def _y_part(self, mat: RatMatrix) -> RatMatrix:
        entries = {}
        for r, row in enumerate(mat.sparse_rows()):
            for c, v in row.items():
                entries[(r, self.x_dim + c)] = v
        return RatMatrix.from_sparse(mat.rows, self.ambient, entries)

    def evaluation(self, level: int, idx: int) -> RatMatrix:
        """Value at simplex ``idx`` of ``level`` (degenerate ones included)."""
        ops, bl, bi = self.shape.decompose(level, idx)
        mat = RatMatrix.identity(self.model.dims[bl])
        lv = bl
        for i in ops:
            mat = self.model.degen(lv, i) @ mat
            lv += 1
        return self._block(level, bl, bi, mat)

    def evaluation_at(self, name) -> RatMatrix:
        lv = next(l for l in range(self.shape.max_level + 1) if name in self.shape._index[l])
        return self.evaluation(lv, self.shape.index(lv, name))

    def coords(self, ambient_vectors: RatMatrix) -> RatMatrix:
        return self.space.coords(ambient_vectors)


def hom_from_shape(shape: SimplicialShape, X: LinSimpSpace) -> HomSpace:
    return HomSpace(shape, X)


def restriction_ambient(hs: HomSpace, m: int) -> RatMatrix:
    """X_m -> ambient of Hom(S, X) for a sub-shape S of Δ^m (names are
    monotone maps into [m]); the Y-part is ``f_m`` when relative."""
    X = hs.model
    blocks = [X.operator(hs.shape.levels[lv][idx], m) for lv, idx in hs.nondeg]
    if hs.over:
        blocks.append(hs.over[0][m])
    return vstack(blocks, cols=X.dims[m]) if blocks else RatMatrix.zeros(0, X.dims[m])


def restriction_map(hs: HomSpace, m: int) -> RatMatrix:
    """Restriction X_m -> Hom(S, X) in the basis of ``hs.space``."""
    return hs.coords(restriction_ambient(hs, m))


def relative_hom(f: SimpLinMap, shape: SimplicialShape, m: int) -> HomSpace:
    """Hom(S, X) ×_{Hom(S, Y)} Y_m for a sub-shape S of Δ^m."""
    return HomSpace(shape, f.source, over=(f, m, None))


def _face_family(X: LinSimpSpace, m: int, keep: Sequence[int], f: SimpLinMap | None = None):
    """Compatible families (y_i)_{i in keep} in X_{m-1} (fibred over Y_m).

    Returns (subspace, restriction matrix X_m -> subspace coordinates).
    This is the classical description of horn and boundary spaces and is
    used as a second, independent route next to :class:`HomSpace`.
    """
    keep = list(keep)
    nb = X.dims[m - 1]
    k = len(keep)
    ydim = f.target.dims[m] if f else 0
    ambient = k * nb + ydim
    rows = []

    def place(mat, slot):
        entries = {}
        base = slot * nb if slot is not None else k * nb
        for r, row in enumerate(mat.sparse_rows()):
            for c, v in row.items():
                entries[(r, base + c)] = v
        return RatMatrix.from_sparse(mat.rows, ambient, entries)

    if m >= 2:
        for a, i in enumerate(keep):
            for b, j in enumerate(keep):
                if i < j:  # d_i y_j = d_{j-1} y_i
                    rows.append(place(X.face(m - 1, i), b) - place(X.face(m - 1, j - 1), a))
    if f is not None:
        Y = f.target
        for a, i in enumerate(keep):
            rows.append(place(f[m - 1], a) - place(Y.face(m, i), None))
    cons = vstack(rows, cols=ambient) if rows else RatMatrix.zeros(0, ambient)
    space = kernel_subspace(cons)
    blocks = [X.face(m, i) for i in keep]
    if f is not None:
        blocks.append(f[m])
    restr = vstack(blocks, cols=X.dims[m]) if blocks else RatMatrix.zeros(0, X.dims[m])
    return space, space.coords(restr)


def horn_map(X: LinSimpSpace, m: int, j: int, route: str = "faces") -> tuple[RatMatrix, int]:
    """Horn projection p^m_j: returns (matrix X_m -> Hom(Λ^m_j, X), dim of the horn space)."""
    if m > X.max_level:
        raise InsufficientLevels(f"horn map at level {m} needs {m} levels")
    if route == "faces":
        space, mat = _face_family(X, m, [i for i in range(m + 1) if i != j])
        return mat, space.dim
    hs = hom_from_shape(horn(m, j), X)
    return restriction_map(hs, m), hs.dim


def relative_horn_map(f: SimpLinMap, m: int, j: int, route: str = "faces") -> tuple[RatMatrix, int]:
    if route == "faces":
        space, mat = _face_family(f.source, m, [i for i in range(m + 1) if i != j], f)
        return mat, space.dim
    hs = relative_hom(f, horn(m, j), m)
    return restriction_map(hs, m), hs.dim


def matching_map(f: SimpLinMap, m: int, route: str = "faces") -> tuple[RatMatrix, int]:
    """q_m = ((d_0, ..., d_m), f_m): X_m -> Hom(∂Δ^m, X) ×_{Hom(∂Δ^m, Y)} Y_m."""
    if m > f.max_level:
        raise InsufficientLevels(f"matching map at level {m} needs {m} levels")
    if m == 0:
        return f[0], f.target.dims[0]
    if route == "faces":
        space, mat = _face_family(f.source, m, list(range(m + 1)), f)
        return mat, space.dim
    hs = relative_hom(f, boundary(m), m)
    return restriction_map(hs, m), hs.dim


def _status(mat: RatMatrix, target_dim: int) -> dict:
    r = rank(mat)
    return {"rank": r, "source_dim": mat.cols, "target_dim": target_dim,
            "surjective": r == target_dim, "injective": r == mat.cols}


def check_lie_n_groupoid(X: LinSimpSpace, n: int, route: str = "faces") -> CheckReport:
    """Kan(m, j) for 1 <= m <= L and Kan!(m, j) for m >= n+1."""
    if X.max_level < n + 2:
        raise InsufficientLevels(f"Lie {n}-groupoid check needs levels through {n + 2}")
    entries = []
    for m in range(1, X.max_level + 1):
        for j in range(m + 1):
            mat, hdim = horn_map(X, m, j, route)
            st = _status(mat, hdim)
            strict = m >= n + 1
            ok = st["surjective"] and (st["injective"] or not strict)
            entries.append({"m": m, "j": j, "condition": "Kan!" if strict else "Kan", **st, "ok": ok})
    bad = [e for e in entries if not e["ok"]]
    msg = "" if not bad else f"{bad[0]['condition']}({bad[0]['m']},{bad[0]['j']}) fails: horn map rank {bad[0]['rank']}, source {bad[0]['source_dim']}, horn space {bad[0]['target_dim']}"
    return CheckReport(f"lie-{n}-groupoid", not bad, entries, msg)


def check_hypercover(f: SimpLinMap, n: int, route: str = "faces") -> CheckReport:
    """q_m surjective for m <= n-1 and bijective for m = n; bijectivity for
    n < m <= L is recorded as a consistency check (entries with
    ``condition == 'bijective (consistency)'``) and is part of ``passed``."""
    if f.max_level < n + 2:
        raise InsufficientLevels(f"hypercover check needs levels through {n + 2}")
    entries = []
    for m in range(f.max_level + 1):
        mat, mdim = matching_map(f, m, route)
        st = _status(mat, mdim)
        if m < n:
            cond, ok = "surjective", st["surjective"]
        else:
            cond = "bijective" if m == n else "bijective (consistency)"
            ok = st["surjective"] and st["injective"]
        entries.append({"m": m, "condition": cond, **st, "ok": ok})
    bad = [e for e in entries if not e["ok"]]
    msg = "" if not bad else f"q_{bad[0]['m']} not {bad[0]['condition']}: rank {bad[0]['rank']}, source {bad[0]['source_dim']}, target {bad[0]['target_dim']}"
    return CheckReport(f"hypercover-{n}", not bad, entries, msg)


def check_kan_fibration(f: SimpLinMap, n: int | None = None, route: str = "faces", strict_from: int | None = None) -> CheckReport:
    """Relative horn maps surjective for all m >= 1; with ``n`` given, also
    bijective for m >= ``strict_from`` (default n+1, so that X -> pt passes
    exactly when X is a Lie n-groupoid)."""
    if n is not None and strict_from is None:
        strict_from = n + 1
    entries = []
    for m in range(1, f.max_level + 1):
        for j in range(m + 1):
            mat, hdim = relative_horn_map(f, m, j, route)
            st = _status(mat, hdim)
            strict = strict_from is not None and m >= strict_from
            ok = st["surjective"] and (st["injective"] or not strict)
            entries.append({"m": m, "j": j, "condition": "Kan!" if strict else "Kan", **st, "ok": ok})
    bad = [e for e in entries if not e["ok"]]
    msg = "" if not bad else f"relative {bad[0]['condition']}({bad[0]['m']},{bad[0]['j']}) fails"
    return CheckReport("kan-fibration", not bad, entries, msg)


# ---------------------------------------------------------------------
# sub-models cut out by subspaces


def submodel(ambient: LinSimpSpace | None, spaces: Sequence[Subspace],
             amb_face: Callable[[int, int], RatMatrix], amb_degen: Callable[[int, int], RatMatrix], name: str = "") -> LinSimpSpace:
    """Model on the subspaces ``spaces[m]``, with structure maps given on
    ambient coordinates (which must preserve the subspaces)."""
    L = len(spaces) - 1
    faces = {(m, i): spaces[m - 1].coords(amb_face(m, i) @ spaces[m].basis) for m in range(1, L + 1) for i in range(m + 1)}
    degens = {(m, i): spaces[m + 1].coords(amb_degen(m, i) @ spaces[m].basis) for m in range(L) for i in range(m + 1)}
    return LinSimpSpace([s.dim for s in spaces], faces, degens, name)


@dataclass
class FiberProduct:
    space: LinSimpSpace
    to_left: SimpLinMap   # U -> V
    to_right: SimpLinMap  # U -> Z
    spaces: list          # ambient subspaces inside V_m ⊕ Z_m


def fiber_product(f: SimpLinMap, g: SimpLinMap) -> FiberProduct:
    """U = V ×_X Z for f: V -> X and g: Z -> X (levelwise kernels)."""
    V, Z = f.source, g.source
    if f.target.dims != g.target.dims or f.max_level != g.max_level:
        raise DimensionMismatch("maps do not share a target")
    L = f.max_level
    spaces = [kernel_subspace(hstack([f[m], -g[m]], rows=f.target.dims[m])) for m in range(L + 1)]
    U = submodel(None, spaces,
                 lambda m, i: block_diag([V.face(m, i), Z.face(m, i)]),
                 lambda m, i: block_diag([V.degen(m, i), Z.degen(m, i)]), name="fiber product")
    left = SimpLinMap(U, V, [s.basis.select_rows(range(V.dims[m])) for m, s in enumerate(spaces)])
    right = SimpLinMap(U, Z, [s.basis.select_rows(range(V.dims[m], V.dims[m] + Z.dims[m])) for m, s in enumerate(spaces)])
    return FiberProduct(U, left, right, spaces)


# ---------------------------------------------------------------------
# relative coskeleta


class RelativeCoskeleton:
    """cosk_m(X/Y) with its maps from X and to Y.

    Level k is Hom(sk_m Δ^k, X) ×_{Hom(sk_m Δ^k, Y)} Y_k, held as a
    subspace of the ambient coordinates of a :class:`HomSpace`.
    """

    def __init__(self, f: SimpLinMap, m: int):
        if m < -1:
            raise PreconditionError("coskeleton index must be >= -1")
        self.f = f
        self.m = m
        L = f.max_level
        self.homs: list = []
        for k in range(L + 1):
            if m < 0:
                self.homs.append(None)
                continue
            # one level above k so that degeneracies of the top simplex resolve
            shape = skeleton_of_simplex(k, m, up_to=min(k + 1, m, L))
            self.homs.append(relative_hom(f, shape, k))
        spaces = [self._space(k) for k in range(L + 1)]
        self.spaces = spaces
        self.space = submodel(None, spaces, lambda k, i: self._ambient_op(tuple(t for t in range(k + 1) if t != i), k),
                              lambda k, i: self._ambient_op(tuple(range(i + 1)) + tuple(range(i, k + 1)), k),
                              name=f"cosk_{m}")

    def _space(self, k: int) -> Subspace:
        hs = self.homs[k]
        if hs is None:
            return Subspace.whole(self.f.target.dims[k])
        return hs.space

    def ambient_dim(self, k: int) -> int:
        hs = self.homs[k]
        return self.f.target.dims[k] if hs is None else hs.ambient

    def _ambient_op(self, theta: tuple, k: int) -> RatMatrix:
        """θ^*: ambient_k -> ambient_{k'} for monotone θ: [k'] -> [k]."""
        kk = len(theta) - 1
        Y = self.f.target
        ytheta = Y.operator(theta, k)
        src, tgt = self.homs[k], self.homs[kk]
        if tgt is None:
            if src is None:
                return ytheta
            return ytheta @ _y_select(src)
        blocks = []
        for lv, idx in tgt.nondeg:
            g = tgt.shape.levels[lv][idx]
            composite = tuple(theta[t] for t in g)
            blocks.append(src.evaluation_at(composite))
        blocks.append(ytheta @ _y_select(src))
        return vstack(blocks, cols=src.ambient)

    def from_source(self) -> SimpLinMap:
        """X -> cosk_m(X/Y)."""
        mats = []
        for k in range(self.f.max_level + 1):
            hs = self.homs[k]
            amb = self.f[k] if hs is None else restriction_ambient(hs, k)
            mats.append(self.spaces[k].coords(amb))
        return SimpLinMap(self.f.source, self.space, mats)

    def to_target(self) -> SimpLinMap:
        """cosk_m(X/Y) -> Y."""
        mats = []
        for k in range(self.f.max_level + 1):
            hs = self.homs[k]
            amb = RatMatrix.identity(self.f.target.dims[k]) if hs is None else _y_select(hs)
            mats.append(amb @ self.spaces[k].basis)
        return SimpLinMap(self.space, self.f.target, mats)


def _y_select(hs: HomSpace) -> RatMatrix:
    return RatMatrix.from_sparse(hs.y_dim, hs.ambient, {(t, hs.x_dim + t): 1 for t in range(hs.y_dim)})


def relative_coskeleton(f: SimpLinMap, m: int) -> RelativeCoskeleton:
    return RelativeCoskeleton(f, m)


def tower_map(upper: RelativeCoskeleton, lower: RelativeCoskeleton) -> SimpLinMap:
    """cosk_m(X/Y) -> cosk_{m'}(X/Y) for m' < m (restriction of skeleta)."""
    mats = []
    for k in range(upper.f.max_level + 1):
        hu, hl = upper.homs[k], lower.homs[k]
        if hl is None:
            amb = RatMatrix.identity(upper.f.target.dims[k]) if hu is None else _y_select(hu)
        else:
            blocks = [hu.evaluation_at(hl.shape.levels[lv][idx]) for lv, idx in hl.nondeg]
            blocks.append(_y_select(hu))
            amb = vstack(blocks, cols=hu.ambient)
        mats.append(lower.spaces[k].coords(amb @ upper.spaces[k].basis))
    return SimpLinMap(upper.space, lower.space, mats)


@dataclass
class CoskeletonTower:
    stages: list   # RelativeCoskeleton for m = top, top-1, ..., -1
    start: SimpLinMap       # X -> cosk_top
    steps: list    # tower maps cosk_m -> cosk_{m-1}
    end: SimpLinMap         # cosk_{-1} -> Y

    def composite(self) -> SimpLinMap:
        out = self.start
        for step in self.steps:
            out = step @ out
        return self.end @ out


def coskeleton_tower(f: SimpLinMap, top: int | None = None) -> CoskeletonTower:
    top = f.max_level if top is None else top
    stages = [RelativeCoskeleton(f, m) for m in range(top, -2, -1)]
    steps = [tower_map(a, b) for a, b in zip(stages, stages[1:])]
    return CoskeletonTower(stages, stages[0].from_source(), steps, stages[-1].to_target())


def is_levelwise_iso(f: SimpLinMap) -> bool:
    return all(a.rows == a.cols and rank(a) == a.rows for a in f.mats)


# ---------------------------------------------------------------------
# Čech nerves


def section(f: RatMatrix) -> RatMatrix:
    """Right inverse of a surjective matrix, free variables set to zero."""
    from .exactla import solve_matrix

    if rank(f) != f.rows:
        raise PreconditionError("map is not surjective")
    return solve_matrix(f, RatMatrix.identity(f.rows))


def fiber_power(f: RatMatrix, i: int) -> Subspace:
    """(i+1)-fold fiber power of f: A -> B inside A^{i+1}."""
    a = f.cols
    if i == 0:
        return Subspace.whole(a)
    rows = []
    for t in range(1, i + 1):
        blocks = [RatMatrix.zeros(f.rows, a)] * (i + 1)
        blocks = list(blocks)
        blocks[0] = f
        blocks[t] = -f
        rows.append(hstack(blocks, rows=f.rows))
    return kernel_subspace(vstack(rows, cols=a * (i + 1)))


def _select_blocks(blocks: Sequence[int], width: int, nsrc: int) -> RatMatrix:
    entries = {}
    for rb, cb in enumerate(blocks):
        for t in range(width):
            entries[(rb * width + t, cb * width + t)] = 1
    return RatMatrix.from_sparse(len(blocks) * width, nsrc * width, entries)


@dataclass
class AugmentedNerve:
    """Čech nerve of a single surjection f: A -> B as an augmented
    simplicial space: ``levels[i]`` is the (i+1)-fold fiber power."""

    f: RatMatrix
    spaces: list
    model: LinSimpSpace
    augmentation: RatMatrix  # level 0 -> B, i.e. f


def cech_of_surjection(f: RatMatrix, up_to: int) -> AugmentedNerve:
    if rank(f) != f.rows:
        raise PreconditionError("Čech nerve needs a surjective map")
    a = f.cols
    spaces = [fiber_power(f, i) for i in range(up_to + 1)]
    model = submodel(None, spaces,
                     lambda m, p: _select_blocks([b for b in range(m + 1) if b != p], a, m + 1),
                     lambda m, p: _select_blocks(list(range(p + 1)) + list(range(p, m + 1)), a, m + 1),
                     name="cech")
    return AugmentedNerve(f, spaces, model, f)


class BisimplicialSpace:
    """Z_{ij} = N_i(X_j/Y_j) for a levelwise surjective f: X -> Y.

    ``i`` is the Čech (vertical) index, ``j`` the simplicial (horizontal)
    level.  Vertical faces ``vface[(i, j, p)]`` delete factor ``p``;
    horizontal faces ``hface[(i, j, q)]`` apply ``d_q`` of X factorwise.
    """

    def __init__(self, f: SimpLinMap, rows_up_to: int):
        self.f = f
        X, Y = f.source, f.target
        self.I = rows_up_to
        self.J = f.max_level
        for j in range(self.J + 1):
            if rank(f[j]) != Y.dims[j]:
                raise PreconditionError(f"f_{j} is not surjective")
        self.spaces = {(i, j): fiber_power(f[j], i) for i in range(self.I + 1) for j in range(self.J + 1)}
        self.dims = {k: s.dim for k, s in self.spaces.items()}
        self.vface, self.vdegen, self.hface, self.hdegen = {}, {}, {}, {}
        for (i, j), sp in self.spaces.items():
            a = X.dims[j]
            if i >= 1:
                for p in range(i + 1):
                    amb = _select_blocks([b for b in range(i + 1) if b != p], a, i + 1)
                    self.vface[(i, j, p)] = self.spaces[(i - 1, j)].coords(amb @ sp.basis)
            if i < self.I:
                for p in range(i + 1):
                    amb = _select_blocks(list(range(p + 1)) + list(range(p, i + 1)), a, i + 1)
                    self.vdegen[(i, j, p)] = self.spaces[(i + 1, j)].coords(amb @ sp.basis)
            if j >= 1:
                for q in range(j + 1):
                    amb = block_diag([X.face(j, q)] * (i + 1))
                    self.hface[(i, j, q)] = self.spaces[(i, j - 1)].coords(amb @ sp.basis)
            if j < self.J:
                for q in range(j + 1):
                    amb = block_diag([X.degen(j, q)] * (i + 1))
                    self.hdegen[(i, j, q)] = self.spaces[(i, j + 1)].coords(amb @ sp.basis)

    def augmentation(self, j: int) -> RatMatrix:
        """Z_{0j} = X_j -> Y_j."""
        return self.f[j] @ self.spaces[(0, j)].basis

    def column(self, j: int) -> LinSimpSpace:
        """Vertical simplicial space i -> Z_{ij}."""
        dims = [self.dims[(i, j)] for i in range(self.I + 1)]
        faces = {(i, p): self.vface[(i, j, p)] for i in range(1, self.I + 1) for p in range(i + 1)}
        degens = {(i, p): self.vdegen[(i, j, p)] for i in range(self.I) for p in range(i + 1)}
        return LinSimpSpace(dims, faces, degens, name=f"cech column {j}")

    def row(self, i: int) -> LinSimpSpace:
        """Horizontal simplicial space j -> Z_{ij}."""
        dims = [self.dims[(i, j)] for j in range(self.J + 1)]
        faces = {(j, q): self.hface[(i, j, q)] for j in range(1, self.J + 1) for q in range(j + 1)}
        degens = {(j, q): self.hdegen[(i, j, q)] for j in range(self.J) for q in range(j + 1)}
        return LinSimpSpace(dims, faces, degens, name=f"cech row {i}")

    def diagonal(self, up_to: int | None = None) -> LinSimpSpace:
        """Diagonal simplicial space l -> Z_{ll} with faces d_k d̄_k."""
        top = min(self.I, self.J) if up_to is None else up_to
        dims = [self.dims[(l, l)] for l in range(top + 1)]
        faces = {(l, k): self.vface[(l, l - 1, k)] @ self.hface[(l, l, k)] for l in range(1, top + 1) for k in range(l + 1)}
        degens = {(l, k): self.vdegen[(l, l + 1, k)] @ self.hdegen[(l, l, k)] for l in range(top) for k in range(l + 1)}
        return LinSimpSpace(dims, faces, degens, name="diagonal")

    def violations(self) -> list[str]:
        bad = []
        for j in range(self.J + 1):
            bad += [f"column {j}: {v}" for v in self.column(j).identity_violations()]
        for i in range(self.I + 1):
            bad += [f"row {i}: {v}" for v in self.row(i).identity_violations()]
        # horizontal and vertical structure maps commute
        for (i, j, p), v in self.vface.items():
            for q in range(j + 1) if j >= 1 else []:
                if self.hface[(i - 1, j, q)] @ v != self.vface[(i, j - 1, p)] @ self.hface[(i, j, q)]:
                    bad.append(f"vertical d{p} and horizontal d{q} do not commute at ({i},{j})")
        return bad
