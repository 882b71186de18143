"""Exact rational linear algebra.

Dense matrices of :class:`fractions.Fraction` with a row-reduction that
skips zero entries, so the structured 0/±1 matrices produced by simplicial
models reduce quickly. Everything downstream (horn maps, hom spaces, form
complexes, cohomology) is phrased in terms of :func:`rref`, kernels and
:func:`homology`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, Infeasible, InvalidComplex

__all__ = [
    "RatMatrix",
    "Subspace",
    "ChainComplexQ",
    "HomologyGroup",
    "rat",
    "rat_str",
    "rank",
    "rref",
    "kernel",
    "solve",
    "homology",
    "block_diag",
    "compare_homology",
]


def rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("floating point entries are not accepted; pass 'p/q' strings")
    # flint/sympy rationals and the like
    return Fraction(str(value))


def rat_str(value: Fraction) -> str:
    value = rat(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class RatMatrix:
    """Immutable rational matrix.

    ``RatMatrix(rows, cols, data)`` where ``data`` is a row-major nested
    sequence. Entries are stored as one ``{column: value}`` dict per row,
    so zero entries cost nothing. Shapes with zero rows or zero columns
    are legal.
    """

    __slots__ = ("rows", "cols", "_rows", "_hash")

    def __init__(self, rows: int, cols: int, data: Iterable[Iterable] | None = None):
        if rows < 0 or cols < 0:
            raise DimensionMismatch(f"negative shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        if data is None:
            self._rows = tuple({} for _ in range(rows))
        else:
            out = []
            for row in data:
                row = [rat(x) for x in row]
                if len(row) != cols:
                    raise DimensionMismatch(f"entry data does not have shape {rows}x{cols}")
                out.append({j: v for j, v in enumerate(row) if v})
            if len(out) != rows:
                raise DimensionMismatch(f"entry data does not have shape {rows}x{cols}")
            self._rows = tuple(out)
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, data: Sequence[Sequence], cols: int | None = None) -> RatMatrix:
        data = list(data)
        if cols is None:
            if not data:
                raise DimensionMismatch("column count needed for a matrix with no rows")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def _trusted(cls, rows: int, cols: int, srows) -> RatMatrix:
        # srows: sequence of dicts without zero values, never mutated afterwards
        m = cls.__new__(cls)
        m.rows, m.cols, m._rows = rows, cols, tuple(srows)
        m._hash = None
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        one = Fraction(1)
        return cls._trusted(n, n, ({i: one} for i in range(n)))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> RatMatrix:
        columns = [tuple(rat(x) for x in c) for c in columns]
        if any(len(c) != rows for c in columns):
            raise DimensionMismatch("column length mismatch")
        out = [{} for _ in range(rows)]
        for j, c in enumerate(columns):
            for i, v in enumerate(c):
                if v:
                    out[i][j] = v
        return cls._trusted(rows, len(columns), out)

    @classmethod
    def from_sparse(cls, rows: int, cols: int, entries: dict) -> RatMatrix:
        """Build from ``{(i, j): value}``."""
        out = [{} for _ in range(rows)]
        for (i, j), v in entries.items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionMismatch(f"entry ({i},{j}) outside {rows}x{cols}")
            v = rat(v)
            if v:
                r = out[i]
                s = r.get(j, 0) + v
                if s:
                    r[j] = s
                else:
                    r.pop(j, None)
        return cls._trusted(rows, cols, out)

    # -- access -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        if not (0 <= j < self.cols):
            raise IndexError(j)
        return self._rows[i].get(j, _ZERO)

    def tolist(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def row(self, i: int) -> tuple[Fraction, ...]:
        r = self._rows[i]
        return tuple(r.get(j, _ZERO) for j in range(self.cols))

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r.get(j, _ZERO) for r in self._rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        cols = [[_ZERO] * self.rows for _ in range(self.cols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                cols[j][i] = v
        return [tuple(c) for c in cols]

    def sparse_rows(self) -> tuple[dict[int, Fraction], ...]:
        """Row dicts (shared, do not mutate)."""
        return self._rows

    def nonzero_count(self) -> int:
        return sum(len(r) for r in self._rows)

    def is_zero(self) -> bool:
        return all(not r for r in self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, tuple(tuple(sorted(r.items())) for r in self._rows)))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(rat_str(x) for x in self.row(i)) for i in range(self.rows))
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"

    # -- arithmetic ---------------------------------------------------
    @property
    def T(self) -> RatMatrix:
        out = [{} for _ in range(self.cols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                out[j][i] = v
        return RatMatrix._trusted(self.cols, self.rows, out)

    def _combine(self, other: RatMatrix, c: Fraction) -> RatMatrix:
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        out = []
        for r, s in zip(self._rows, other._rows):
            if not s:
                out.append(r)
                continue
            acc = dict(r)
            for j, v in s.items():
                nv = acc.get(j, 0) + c * v
                if nv:
                    acc[j] = nv
                else:
                    acc.pop(j, None)
            out.append(acc)
        return RatMatrix._trusted(self.rows, self.cols, out)

    def __add__(self, other: RatMatrix) -> RatMatrix:
        return self._combine(other, _ONE)

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        return self._combine(other, -_ONE)

    def __neg__(self) -> RatMatrix:
        return self.scale(-1)

    def scale(self, c) -> RatMatrix:
        c = rat(c)
        if not c:
            return RatMatrix.zeros(self.rows, self.cols)
        return RatMatrix._trusted(self.rows, self.cols, ({j: c * v for j, v in r.items()} for r in self._rows))

    def __rmul__(self, c) -> RatMatrix:
        return self.scale(c)

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        right = other._rows
        out = []
        for srow in self._rows:
            acc: dict[int, Fraction] = {}
            for k, a in srow.items():
                for j, b in right[k].items():
                    acc[j] = acc.get(j, 0) + a * b
            out.append({j: v for j, v in acc.items() if v})
        return RatMatrix._trusted(self.rows, other.cols, out)

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        vec = [rat(x) for x in vec]
        return tuple(sum((a * vec[k] for k, a in r.items()), _ZERO) for r in self._rows)

    def select_rows(self, idx: Sequence[int]) -> RatMatrix:
        idx = list(idx)
        return RatMatrix._trusted(len(idx), self.cols, (self._rows[i] for i in idx))

    def select_cols(self, idx: Sequence[int]) -> RatMatrix:
        idx = list(idx)
        pos: dict[int, list[int]] = {}
        for t, j in enumerate(idx):
            if not (0 <= j < self.cols):
                raise IndexError(j)
            pos.setdefault(j, []).append(t)
        out = []
        for r in self._rows:
            new = {}
            for j, v in r.items():
                for t in pos.get(j, ()):
                    new[t] = v
            out.append(new)
        return RatMatrix._trusted(self.rows, len(idx), out)

    def hstack(self, *others: RatMatrix) -> RatMatrix:
        return hstack([self, *others], rows=self.rows)

    def vstack(self, *others: RatMatrix) -> RatMatrix:
        return vstack([self, *others], cols=self.cols)

    # -- linear algebra shortcuts -------------------------------------
    def rank(self) -> int:
        return rank(self)

    def kernel(self) -> RatMatrix:
        return kernel(self)

    def inverse(self) -> RatMatrix:
        if self.rows != self.cols:
            raise DimensionMismatch("inverse of a non-square matrix")
        red, piv = rref(self.hstack(RatMatrix.identity(self.rows)))
        if piv[: self.rows] != list(range(self.rows)):
            raise Infeasible("matrix is singular")
        return red.select_cols(range(self.cols, 2 * self.cols))

    def is_injective(self) -> bool:
        return rank(self) == self.cols

    def is_surjective(self) -> bool:
        return rank(self) == self.rows

    def is_bijective(self) -> bool:
        return self.rows == self.cols and rank(self) == self.rows


_ZERO = Fraction(0)
_ONE = Fraction(1)


def hstack(blocks: Sequence[RatMatrix], rows: int | None = None) -> RatMatrix:
    blocks = list(blocks)
    if rows is None:
        if not blocks:
            raise DimensionMismatch("row count needed to stack nothing")
        rows = blocks[0].rows
    if any(b.rows != rows for b in blocks):
        raise DimensionMismatch("hstack row mismatch")
    out = [{} for _ in range(rows)]
    c0 = 0
    for b in blocks:
        for i, r in enumerate(b._rows):
            if r:
                tgt = out[i]
                for j, v in r.items():
                    tgt[c0 + j] = v
        c0 += b.cols
    return RatMatrix._trusted(rows, c0, out)


def vstack(blocks: Sequence[RatMatrix], cols: int | None = None) -> RatMatrix:
    blocks = list(blocks)
    if cols is None:
        if not blocks:
            raise DimensionMismatch("column count needed to stack nothing")
        cols = blocks[0].cols
    if any(b.cols != cols for b in blocks):
        raise DimensionMismatch("vstack column mismatch")
    data = [r for b in blocks for r in b._rows]
    return RatMatrix._trusted(len(data), cols, data)


def block_diag(blocks: Sequence[RatMatrix]) -> RatMatrix:
    blocks = list(blocks)
    cols = sum(b.cols for b in blocks)
    out = []
    c0 = 0
    for b in blocks:
        for r in b._rows:
            out.append({c0 + j: v for j, v in r.items()})
        c0 += b.cols
    return RatMatrix._trusted(len(out), cols, out)


def block_matrix(grid: Sequence[Sequence[RatMatrix | None]], row_dims: Sequence[int], col_dims: Sequence[int]) -> RatMatrix:
    """Assemble a block matrix; ``None`` blocks are zero."""
    out = [{} for _ in range(sum(row_dims))]
    r0 = 0
    for bi, brow in enumerate(grid):
        c0 = 0
        for bj, blk in enumerate(brow):
            if blk is not None:
                if blk.shape != (row_dims[bi], col_dims[bj]):
                    raise DimensionMismatch(f"block ({bi},{bj}) has shape {blk.shape}")
                for i, srow in enumerate(blk._rows):
                    tgt = out[r0 + i]
                    for j, v in srow.items():
                        tgt[c0 + j] = v
            c0 += col_dims[bj]
        r0 += row_dims[bi]
    return RatMatrix._trusted(len(out), sum(col_dims), out)


# ---------------------------------------------------------------------
# row reduction

def _reduce(rows: list[dict[int, Fraction]], ncols: int, stop_col: int | None = None):
    """Reduced row echelon form of sparse rows, pivots in column order.

    Returns ``(pivot_rows, pivots)`` where ``pivot_rows[r]`` has a 1 in
    column ``pivots[r]`` and zeros in every other pivot column.
    Columns ``>= stop_col`` are never used as pivots.
    """
    limit = ncols if stop_col is None else stop_col
    rows = [dict(r) for r in rows if r]
    colmap: dict[int, set[int]] = {}
    for idx, r in enumerate(rows):
        for c in r:
            colmap.setdefault(c, set()).add(idx)
    alive = set(range(len(rows)))
    pivot_of: dict[int, int] = {}
    for c in range(limit):
        cands = colmap.get(c)
        if not cands:
            continue
        cands = cands & alive
        if not cands:
            continue
        # sparsest candidate keeps fill-in down; ties broken by index for determinism
        p = min(cands, key=lambda i: (len(rows[i]), i))
        alive.discard(p)
        prow = rows[p]
        inv = 1 / prow[c]
        if inv != 1:
            for k in prow:
                prow[k] *= inv
        for i in list(colmap[c]):
            if i == p:
                continue
            row = rows[i]
            f = row.get(c)
            if not f:
                continue
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    if k not in row:
                        colmap.setdefault(k, set()).add(i)
                    row[k] = nv
                else:
                    if k in row:
                        del row[k]
                        colmap[k].discard(i)
        pivot_of[c] = p
    pivots = sorted(pivot_of)
    return [rows[pivot_of[c]] for c in pivots], pivots


def rref(m: RatMatrix) -> tuple[RatMatrix, list[int]]:
    """Reduced row echelon form (zero rows dropped) and pivot columns."""
    prows, pivots = _reduce(m.sparse_rows(), m.cols)
    return RatMatrix._trusted(len(prows), m.cols, prows), pivots


def rank(m: RatMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    # reduce along the short side
    if m.rows > m.cols:
        return len(_reduce(m.T.sparse_rows(), m.rows)[1])
    return len(_reduce(m.sparse_rows(), m.cols)[1])


def _kernel_from_reduced(prows, pivots, ncols) -> tuple[RatMatrix, list[int]]:
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    pos = {c: i for i, c in enumerate(free)}
    entries = {}
    for c in free:
        entries[(c, pos[c])] = Fraction(1)
    for r, p in zip(prows, pivots):
        for k, v in r.items():
            if k != p:
                entries[(p, pos[k])] = -v
    return RatMatrix.from_sparse(ncols, len(free), entries), free


def kernel(m: RatMatrix) -> RatMatrix:
    """Kernel basis as columns; column ``t`` has a 1 at the t-th free column."""
    prows, pivots = _reduce(m.sparse_rows(), m.cols)
    return _kernel_from_reduced(prows, pivots, m.cols)[0]


def kernel_subspace(m: RatMatrix) -> Subspace:
    prows, pivots = _reduce(m.sparse_rows(), m.cols)
    basis, free = _kernel_from_reduced(prows, pivots, m.cols)
    return Subspace(basis, tuple(free))


@dataclass(frozen=True)
class Solution:
    particular: tuple[Fraction, ...]
    kernel: RatMatrix


def solve(m: RatMatrix, b: Sequence) -> Solution:
    """Solve ``m x = b`` exactly.

    Returns the particular solution with all free variables zero and a
    kernel basis. Raises :class:`Infeasible` carrying a certificate ``y``
    with ``y m = 0`` and ``y b != 0``.
    """
    b = tuple(rat(x) for x in b)
    if len(b) != m.rows:
        raise DimensionMismatch(f"right-hand side has {len(b)} entries, matrix has {m.rows} rows")
    rows = [dict(r) for r in m.sparse_rows()]
    for r, v in zip(rows, b):
        if v:
            r[m.cols] = v
    prows, pivots = _reduce(rows, m.cols + 1, stop_col=m.cols)
    # a reduced row with no pivot but a nonzero rhs would have been dropped
    # unless it still carries the rhs column; detect inconsistency directly
    x = [Fraction(0)] * m.cols
    for r, p in zip(prows, pivots):
        x[p] = r.get(m.cols, Fraction(0))
    x = tuple(x)
    if m.apply(x) != b:
        cert = _certificate(m, b)
        raise Infeasible("system has no solution", certificate=cert)
    basis, _ = _kernel_from_reduced(
        [{k: v for k, v in r.items() if k < m.cols} for r in prows], pivots, m.cols
    )
    return Solution(x, basis)


def _certificate(m: RatMatrix, b: tuple) -> tuple[Fraction, ...]:
    left = kernel(m.T)
    for j in range(left.cols):
        y = left.column(j)
        if sum((yi * bi for yi, bi in zip(y, b)), Fraction(0)):
            return y
    raise AssertionError("inconsistent system without certificate")


def solve_matrix(m: RatMatrix, rhs: RatMatrix) -> RatMatrix:
    """Solve ``m X = rhs`` column by column (raises on infeasibility)."""
    if rhs.rows != m.rows:
        raise DimensionMismatch("right-hand side row mismatch")
    cols = [solve(m, rhs.column(j)).particular for j in range(rhs.cols)]
    return RatMatrix.from_columns(cols, m.cols) if cols else RatMatrix.zeros(m.cols, 0)


def image_basis(m: RatMatrix) -> RatMatrix:
    """Columns of ``m`` at pivot positions (a basis of the column space)."""
    if m.rows == 0:
        return RatMatrix.zeros(0, 0)
    _, pivots = _reduce(m.sparse_rows(), m.cols)
    return m.select_cols(pivots)


# ---------------------------------------------------------------------
# subspaces


class Subspace:
    """A subspace of Q^n with a basis that restricts to the identity on
    ``coord_rows``, so coordinates of a member are read off directly."""

    __slots__ = ("basis", "coord_rows")

    def __init__(self, basis: RatMatrix, coord_rows: tuple[int, ...]):
        self.basis = basis
        self.coord_rows = coord_rows

    @classmethod
    def span(cls, m: RatMatrix) -> Subspace:
        """Canonical echelon basis of the column span of ``m``."""
        if m.cols == 0 or m.rows == 0:
            return cls(RatMatrix.zeros(m.rows, 0), ())
        red, piv = rref(m.T)
        return cls(red.T, tuple(piv))

    @classmethod
    def whole(cls, n: int) -> Subspace:
        return cls(RatMatrix.identity(n), tuple(range(n)))

    @property
    def ambient(self) -> int:
        return self.basis.rows

    @property
    def dim(self) -> int:
        return self.basis.cols

    def coords(self, m: RatMatrix, check: bool = True) -> RatMatrix:
        """Coordinates of the columns of ``m`` (which must lie in the span)."""
        c = m.select_rows(self.coord_rows)
        if check and self.basis @ c != m:
            raise DimensionMismatch("vectors do not lie in the subspace")
        return c

    def contains(self, m: RatMatrix) -> bool:
        return self.basis @ m.select_rows(self.coord_rows) == m


# ---------------------------------------------------------------------
# chain complexes


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    dim: int
    representatives: RatMatrix  # columns: cycles completing an image basis


@dataclass(frozen=True)
class ChainComplexQ:
    """Finite complex of Q-vector spaces.

    ``differentials[l]`` is the matrix of the map out of degree ``l``: to
    ``l - 1`` when ``cochain`` is false, to ``l + 1`` otherwise. Missing
    entries are zero maps.
    """

    dims: dict[int, int]
    differentials: dict[int, RatMatrix] = field(default_factory=dict)
    cochain: bool = False

    def __post_init__(self):
        step = 1 if self.cochain else -1
        for l, dmat in self.differentials.items():
            src = self.dims.get(l, 0)
            tgt = self.dims.get(l + step, 0)
            if dmat.shape != (tgt, src):
                raise DimensionMismatch(f"differential out of degree {l} has shape {dmat.shape}, expected {(tgt, src)}")

    @property
    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def dim(self, l: int) -> int:
        return self.dims.get(l, 0)

    def diff(self, l: int) -> RatMatrix:
        """Differential leaving degree ``l``."""
        step = 1 if self.cochain else -1
        d = self.differentials.get(l)
        if d is None:
            return RatMatrix.zeros(self.dim(l + step), self.dim(l))
        return d

    def incoming(self, l: int) -> RatMatrix:
        step = 1 if self.cochain else -1
        return self.diff(l - step)

    def validate(self) -> None:
        step = 1 if self.cochain else -1
        for l in self.degrees:
            if not (self.diff(l + step) @ self.diff(l)).is_zero():
                raise InvalidComplex(f"d∘d != 0 at degree {l}")

    def euler_characteristic(self) -> int:
        return sum((-1) ** (l % 2) * d for l, d in self.dims.items())


def homology(c: ChainComplexQ, degrees: Iterable[int] | None = None) -> dict[int, HomologyGroup]:
    """Homology (or cohomology, for cochain complexes) in each degree.

    Representatives are kernel vectors chosen in pivot order after an
    image basis, so they are reproducible.
    """
    c.validate()
    out = {}
    for l in (c.degrees if degrees is None else degrees):
        out[l] = homology_at(c.diff(l), c.incoming(l))
        out[l] = HomologyGroup(l, out[l].dim, out[l].representatives)
    return out


def homology_at(outgoing: RatMatrix, incoming: RatMatrix) -> HomologyGroup:
    """Homology of ``incoming`` followed by ``outgoing`` at the middle term."""
    z = kernel(outgoing)
    n = outgoing.cols
    if incoming.rows != n:
        raise DimensionMismatch("incoming/outgoing differentials do not meet")
    img = incoming
    stacked = hstack([img, z], rows=n) if n else RatMatrix.zeros(0, img.cols + z.cols)
    _, piv = rref(stacked) if n else (None, [])
    reps = [j - img.cols for j in piv if j >= img.cols]
    return HomologyGroup(0, len(reps), z.select_cols(reps))


def induced_rank(cycles: RatMatrix, boundaries: RatMatrix) -> int:
    """Rank of the span of ``cycles`` modulo the column span of ``boundaries``."""
    n = cycles.rows
    if n == 0:
        return 0
    return rank(hstack([boundaries, cycles], rows=n)) - rank(boundaries)


@dataclass(frozen=True)
class InducedMap:
    degree: int
    dim_source: int
    dim_target: int
    induced_rank: int

    @property
    def iso(self) -> bool:
        return self.dim_source == self.dim_target == self.induced_rank

    def to_dict(self) -> dict:
        return {"dim_source": self.dim_source, "dim_target": self.dim_target,
                "induced_rank": self.induced_rank, "iso": self.iso}


def compare_homology(a: ChainComplexQ, b: ChainComplexQ, maps: dict, degrees: Iterable[int]) -> dict[int, InducedMap]:
    """Effect on (co)homology of a chain map ``maps[l]: a_l -> b_l``.

    The chain-map property is checked first; a violation raises
    :class:`InvalidComplex`.
    """
    out = {}
    degrees = list(degrees)
    step = 1 if a.cochain else -1
    for l in degrees:
        f = maps.get(l, RatMatrix.zeros(b.dim(l), a.dim(l)))
        g = maps.get(l + step, RatMatrix.zeros(b.dim(l + step), a.dim(l + step)))
        if g @ a.diff(l) != b.diff(l) @ f:
            raise InvalidComplex(f"map does not commute with the differentials at degree {l}")
    for l in degrees:
        f = maps.get(l, RatMatrix.zeros(b.dim(l), a.dim(l)))
        ha = homology_at(a.diff(l), a.incoming(l))
        hb = homology_at(b.diff(l), b.incoming(l))
        r = induced_rank(f @ ha.representatives, b.incoming(l)) if b.dim(l) else 0
        out[l] = InducedMap(l, ha.dim, hb.dim, r)
    return out
