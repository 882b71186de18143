"""Finite simplicial sets truncated at a top level.

Shapes of the form Δ^m, Λ^m_j, ∂Δ^m and sk_k Δ^m name their simplices by
the monotone map ``(f(0), ..., f(k))``; nerves of finite groupoids name
level-0 simplices by object and level-k simplices by the chain
``(g_1, ..., g_k)`` with ``source(g_i) == target(g_{i+1})``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .errors import InvalidModel, PreconditionError

__all__ = [
    "SimplicialShape",
    "FiniteGroupoid",
    "KanSetReport",
    "standard_simplex",
    "horn",
    "boundary",
    "skeleton",
    "nerve_groupoid",
    "pair_groupoid",
    "group_as_groupoid",
    "unit_groupoid",
    "check_kan_set",
    "monotone_maps",
]


def monotone_maps(k: int, m: int) -> list[tuple[int, ...]]:
    """All monotone maps [k] -> [m], lexicographically ordered."""
    return list(itertools.combinations_with_replacement(range(m + 1), k + 1))


class SimplicialShape:
    """A simplicial set stored through ``max_level``.

    Faces ``d_i`` exist on levels ``1..L`` and degeneracies ``s_i`` on
    levels ``0..L-1``; both are kept as index tables.
    """

    def __init__(
        self,
        levels: Sequence[Sequence[Hashable]],
        face: Callable[[int, int, Hashable], Hashable],
        degeneracy: Callable[[int, int, Hashable], Hashable],
        name: str = "",
    ):
        self.name = name
        self.levels = tuple(tuple(lv) for lv in levels)
        self.max_level = len(self.levels) - 1
        self._index = [{s: i for i, s in enumerate(lv)} for lv in self.levels]
        for m, lv in enumerate(self.levels):
            if len(self._index[m]) != len(lv):
                raise InvalidModel(f"duplicate simplex names at level {m}")
        self.faces: dict[tuple[int, int], tuple[int, ...]] = {}
        self.degens: dict[tuple[int, int], tuple[int, ...]] = {}
        for m in range(1, self.max_level + 1):
            for i in range(m + 1):
                self.faces[(m, i)] = tuple(self._lookup(m - 1, face(m, i, x)) for x in self.levels[m])
        for m in range(self.max_level):
            for i in range(m + 1):
                self.degens[(m, i)] = tuple(self._lookup(m + 1, degeneracy(m, i, x)) for x in self.levels[m])
        self._decomp: dict[tuple[int, int], tuple[tuple[int, ...], int, int]] = {}

    @classmethod
    def from_tables(cls, levels, faces, degens, name: str = "") -> SimplicialShape:
        """Build directly from index tables (used by deserialisation and tests)."""
        obj = cls.__new__(cls)
        obj.name = name
        obj.levels = tuple(tuple(lv) for lv in levels)
        obj.max_level = len(obj.levels) - 1
        obj._index = [{s: i for i, s in enumerate(lv)} for lv in obj.levels]
        obj.faces = {k: tuple(v) for k, v in faces.items()}
        obj.degens = {k: tuple(v) for k, v in degens.items()}
        obj._decomp = {}
        return obj

    def _lookup(self, level: int, name: Hashable) -> int:
        try:
            return self._index[level][name]
        except KeyError:
            raise InvalidModel(f"simplex {name!r} missing from level {level}") from None

    # -- queries -------------------------------------------------------
    def count(self, level: int) -> int:
        return len(self.levels[level])

    def index(self, level: int, name: Hashable) -> int:
        return self._lookup(level, name)

    def face(self, m: int, i: int, name: Hashable) -> Hashable:
        return self.levels[m - 1][self.faces[(m, i)][self._lookup(m, name)]]

    def degeneracy(self, m: int, i: int, name: Hashable) -> Hashable:
        return self.levels[m + 1][self.degens[(m, i)][self._lookup(m, name)]]

    def decompose(self, level: int, idx: int) -> tuple[tuple[int, ...], int, int]:
        """Write simplex ``idx`` as degeneracies applied to a nondegenerate one.

        Returns ``(ops, base_level, base_idx)``: applying ``s_{ops[0]}``,
        then ``s_{ops[1]}``, ... to the base simplex gives the simplex.
        """
        key = (level, idx)
        hit = self._decomp.get(key)
        if hit is not None:
            return hit
        result = ((), level, idx)
        if level > 0:
            for i in range(level):
                below = self.faces[(level, i)][idx]
                if self.degens[(level - 1, i)][below] == idx:
                    ops, bl, bi = self.decompose(level - 1, below)
                    result = (ops + (i,), bl, bi)
                    break
        self._decomp[key] = result
        return result

    def is_degenerate(self, level: int, idx: int) -> bool:
        return bool(self.decompose(level, idx)[0])

    def nondegenerate(self, level: int) -> list[int]:
        if level > self.max_level:
            return []
        return [i for i in range(self.count(level)) if not self.is_degenerate(level, i)]

    def nondegenerate_simplices(self) -> list[tuple[int, int]]:
        """All nondegenerate ``(level, idx)`` pairs, ordered by level then name."""
        out = []
        for lv in range(self.max_level + 1):
            out.extend((lv, i) for i in self.nondegenerate(lv))
        return out

    def dimension(self) -> int:
        nd = self.nondegenerate_simplices()
        return max((lv for lv, _ in nd), default=-1)

    # -- validation ----------------------------------------------------
    def identity_violations(self, limit: int = 10) -> list[str]:
        """Check the five simplicial identities on every composable pair."""
        bad: list[str] = []
        F, S, L = self.faces, self.degens, self.max_level

        def note(msg):
            bad.append(msg)
            return len(bad) >= limit

        for n in range(2, L + 1):  # d_i d_j = d_{j-1} d_i, i < j
            for j in range(n + 1):
                for i in range(j):
                    for x in range(self.count(n)):
                        if F[(n - 1, i)][F[(n, j)][x]] != F[(n - 1, j - 1)][F[(n, i)][x]]:
                            if note(f"d{i} d{j} != d{j-1} d{i} at level {n} simplex {self.levels[n][x]!r}"):
                                return bad
        for n in range(L - 1):  # s_i s_j = s_{j+1} s_i, i <= j, on level n
            for j in range(n + 1):
                for i in range(j + 1):
                    for x in range(self.count(n)):
                        if S[(n + 1, i)][S[(n, j)][x]] != S[(n + 1, j + 1)][S[(n, i)][x]]:
                            if note(f"s{i} s{j} != s{j+1} s{i} at level {n}"):
                                return bad
        for n in range(1, L):  # d_i s_j on level n  (s_j: n -> n+1, d_i: n+1 -> n)
            for j in range(n + 1):
                for i in range(n + 2):
                    for x in range(self.count(n)):
                        lhs = F[(n + 1, i)][S[(n, j)][x]]
                        if i < j:
                            rhs = S[(n - 1, j - 1)][F[(n, i)][x]]
                        elif i in (j, j + 1):
                            rhs = x
                        else:
                            rhs = S[(n - 1, j)][F[(n, i - 1)][x]]
                        if lhs != rhs:
                            if note(f"d{i} s{j} identity fails at level {n} simplex {self.levels[n][x]!r}"):
                                return bad
        if L >= 1:  # level 0: d_0 s_0 = d_1 s_0 = id
            for x in range(self.count(0)):
                for i in (0, 1):
                    if F[(1, i)][S[(0, 0)][x]] != x:
                        if note(f"d{i} s0 != id on vertex {self.levels[0][x]!r}"):
                            return bad
        return bad

    def validate(self) -> None:
        bad = self.identity_violations(limit=1)
        if bad:
            raise InvalidModel(bad[0])

    def is_valid(self) -> bool:
        return not self.identity_violations(limit=1)

    # -- serialisation -------------------------------------------------
    def to_json(self) -> dict:
        names = [[_name_str(s) for s in lv] for lv in self.levels]
        return {
            "levels": names,
            "face": {f"({m},{i})": [names[m - 1][t] for t in tab] for (m, i), tab in sorted(self.faces.items())},
            "degen": {f"({m},{i})": [names[m + 1][t] for t in tab] for (m, i), tab in sorted(self.degens.items())},
        }

    @classmethod
    def from_json(cls, obj: dict, name: str = "") -> SimplicialShape:
        levels = [list(lv) for lv in obj["levels"]]
        index = [{s: i for i, s in enumerate(lv)} for lv in levels]

        def parse(table, shift):
            out = {}
            for key, targets in table.items():
                m, i = (int(t) for t in key.strip("()").split(","))
                out[(m, i)] = [index[m + shift][t] for t in targets]
            return out

        shape = cls.from_tables(levels, parse(obj.get("face", {}), -1), parse(obj.get("degen", {}), 1), name)
        shape.validate()
        return shape

    def __repr__(self) -> str:
        counts = ", ".join(str(self.count(m)) for m in range(self.max_level + 1))
        return f"SimplicialShape({self.name or 'unnamed'}: [{counts}])"


def _name_str(s) -> str:
    if isinstance(s, tuple):
        return "(" + ",".join(str(x) for x in s) + ")"
    return str(s)


# ---------------------------------------------------------------------
# sub-shapes of Δ^m


def _delete(x: tuple, i: int) -> tuple:
    return x[:i] + x[i + 1 :]


def _repeat(x: tuple, i: int) -> tuple:
    return x[: i + 1] + x[i:]


def _sub_simplex(m: int, up_to: int, keep: Callable[[tuple], bool], name: str) -> SimplicialShape:
    levels = [[f for f in monotone_maps(k, m) if keep(f)] for k in range(up_to + 1)]
    return SimplicialShape(levels, lambda lv, i, x: _delete(x, i), lambda lv, i, x: _repeat(x, i), name)


def standard_simplex(m: int, up_to: int | None = None) -> SimplicialShape:
    """Δ^m: level k holds every monotone map [k] -> [m]."""
    up_to = m if up_to is None else up_to
    return _sub_simplex(m, up_to, lambda f: True, f"Delta^{m}")


def horn(m: int, j: int, up_to: int | None = None) -> SimplicialShape:
    """Λ^m_j: maps whose image misses some vertex other than ``j``."""
    if m < 1 or not 0 <= j <= m:
        raise PreconditionError(f"horn index out of range: m={m}, j={j}")
    others = frozenset(range(m + 1)) - {j}
    up_to = m if up_to is None else up_to
    return _sub_simplex(m, up_to, lambda f: not others <= set(f), f"Lambda^{m}_{j}")


def boundary(m: int, up_to: int | None = None) -> SimplicialShape:
    """∂Δ^m = sk_{m-1} Δ^m."""
    return skeleton_of_simplex(m, m - 1, up_to, name=f"dDelta^{m}")


def skeleton_of_simplex(n: int, m: int, up_to: int | None = None, name: str | None = None) -> SimplicialShape:
    """sk_m Δ^n: maps whose image has at most m+1 vertices."""
    up_to = n if up_to is None else up_to
    return _sub_simplex(n, up_to, lambda f: len(set(f)) <= m + 1, name or f"sk_{m} Delta^{n}")


def skeleton(shape: SimplicialShape, m: int) -> SimplicialShape:
    """Sub-shape generated by nondegenerate simplices of dimension <= m."""
    keep = []
    for lv in range(shape.max_level + 1):
        keep.append([x for i, x in enumerate(shape.levels[lv]) if shape.decompose(lv, i)[1] <= m])
    return SimplicialShape(
        keep, shape.face, shape.degeneracy, name=f"sk_{m}({shape.name})"
    )


# ---------------------------------------------------------------------
# groupoids and nerves


@dataclass
class FiniteGroupoid:
    """Finite groupoid given by tables.

    ``arrows`` maps an arrow name to ``(source, target)``;
    ``compose[(g, h)]`` is ``g ∘ h`` (defined when ``source(g) == target(h)``).
    """

    objects: list
    arrows: dict
    compose: dict
    identities: dict
    inverses: dict = field(default_factory=dict)

    def source(self, g):
        return self.arrows[g][0]

    def target(self, g):
        return self.arrows[g][1]

    def violations(self) -> list[str]:
        bad = []
        objs = set(self.objects)
        for g, (s, t) in self.arrows.items():
            if s not in objs or t not in objs:
                bad.append(f"arrow {g!r} has unknown endpoints")
        for x in self.objects:
            e = self.identities.get(x)
            if e is None or self.arrows.get(e) != (x, x):
                bad.append(f"identity at {x!r} missing or misplaced")
        if bad:
            return bad
        for g in self.arrows:
            for h in self.arrows:
                if self.source(g) == self.target(h):
                    gh = self.compose.get((g, h))
                    if gh is None or self.arrows.get(gh) != (self.source(h), self.target(g)):
                        bad.append(f"composite {g!r}∘{h!r} missing or with wrong endpoints")
        if bad:
            return bad
        for g in self.arrows:
            if self.compose[(g, self.identities[self.source(g)])] != g or self.compose[(self.identities[self.target(g)], g)] != g:
                bad.append(f"unit law fails for {g!r}")
            inv = self.inverses.get(g)
            if inv is None or self.compose.get((g, inv)) != self.identities[self.target(g)] or self.compose.get((inv, g)) != self.identities[self.source(g)]:
                bad.append(f"inverse law fails for {g!r}")
        for f, g, h in itertools.product(self.arrows, repeat=3):
            if self.source(f) == self.target(g) and self.source(g) == self.target(h):
                if self.compose[(f, self.compose[(g, h)])] != self.compose[(self.compose[(f, g)], h)]:
                    bad.append(f"associativity fails for {f!r},{g!r},{h!r}")
                    break
        return bad

    def validate(self) -> None:
        bad = self.violations()
        if bad:
            raise InvalidModel(bad[0])


def pair_groupoid(objects: Sequence) -> FiniteGroupoid:
    """Exactly one arrow ``(y, x): x -> y`` between any two objects."""
    arrows = {(y, x): (x, y) for x in objects for y in objects}
    compose = {((z, y), (y2, x)): (z, x) for (z, y) in arrows for (y2, x) in arrows if y == y2}
    return FiniteGroupoid(
        list(objects), arrows, compose, {x: (x, x) for x in objects}, {(y, x): (x, y) for (y, x) in arrows}
    )


def group_as_groupoid(elements: Sequence, mul: Callable, unit, inv: Callable) -> FiniteGroupoid:
    arrows = {g: ("*", "*") for g in elements}
    compose = {(g, h): mul(g, h) for g in elements for h in elements}
    return FiniteGroupoid(["*"], arrows, compose, {"*": unit}, {g: inv(g) for g in elements})


def unit_groupoid(objects: Sequence) -> FiniteGroupoid:
    arrows = {("id", x): (x, x) for x in objects}
    compose = {(("id", x), ("id", x)): ("id", x) for x in objects}
    return FiniteGroupoid(list(objects), arrows, compose, {x: ("id", x) for x in objects}, {a: a for a in arrows})


def nerve_groupoid(g: FiniteGroupoid, up_to: int) -> SimplicialShape:
    """Nerve of a finite groupoid through level ``up_to``.

    ``d_0`` drops the first arrow, ``d_k`` the last, and ``d_i`` composes
    ``g_i ∘ g_{i+1}``; on level 1, ``d_0 g = source(g)`` and
    ``d_1 g = target(g)``. ``s_i`` inserts the identity at vertex ``i``.
    """
    g.validate()
    levels: list[list] = [list(g.objects)]
    if up_to >= 1:
        levels.append([(a,) for a in g.arrows])
    for k in range(2, up_to + 1):
        nxt = []
        for chain in levels[-1]:
            for a in g.arrows:
                if g.source(chain[-1]) == g.target(a):
                    nxt.append(chain + (a,))
        levels.append(nxt)

    def vertex(chain, i):
        return g.target(chain[0]) if i == 0 else g.source(chain[i - 1])

    def face(m, i, x):
        if m == 1:
            return g.source(x[0]) if i == 0 else g.target(x[0])
        if i == 0:
            return x[1:]
        if i == m:
            return x[:-1]
        return x[: i - 1] + (g.compose[(x[i - 1], x[i])],) + x[i + 1 :]

    def degeneracy(m, i, x):
        if m == 0:
            return (g.identities[x],)
        e = g.identities[vertex(x, i)]
        return x[:i] + (e,) + x[i:]

    return SimplicialShape(levels, face, degeneracy, name="nerve")


# ---------------------------------------------------------------------
# Kan conditions for simplicial sets


@dataclass(frozen=True)
class KanSetReport:
    m: int
    j: int
    strict: bool
    passed: bool
    horns_checked: int
    witness: tuple | None = None  # (faces by index, number of fillers)

    def to_dict(self) -> dict:
        out = {"m": self.m, "j": self.j, "strict": self.strict, "passed": self.passed, "horns_checked": self.horns_checked}
        if self.witness is not None:
            faces, fillers = self.witness
            out["witness"] = {"faces": {str(i): _name_str(f) for i, f in faces}, "fillers": fillers}
        return out


def _horn_families(shape: SimplicialShape, m: int, j: int) -> Iterable[tuple[int, ...]]:
    """Compatible families ``(y_i)_{i != j}`` of (m-1)-simplices, as index tuples."""
    idx = [i for i in range(m + 1) if i != j]
    pool = range(shape.count(m - 1))
    F = shape.faces

    def extend(prefix):
        if len(prefix) == len(idx):
            yield tuple(prefix)
            return
        i = idx[len(prefix)]
        for y in pool:
            ok = True
            for k, yk in zip(idx, prefix):
                # d_k d_i = d_{i-1} d_k for k < i
                if m - 1 >= 1 and F[(m - 1, k)][y] != F[(m - 1, i - 1)][yk]:
                    ok = False
                    break
            if ok:
                prefix.append(y)
                yield from extend(prefix)
                prefix.pop()

    yield from extend([])


def check_kan_set(shape: SimplicialShape, m: int, j: int, strict: bool = False) -> KanSetReport:
    """Brute-force horn filling: every Λ^m_j horn fills (uniquely if ``strict``)."""
    if m < 1 or not 0 <= j <= m:
        raise PreconditionError(f"horn index out of range: m={m}, j={j}")
    if shape.max_level < m:
        raise PreconditionError(f"shape stored through level {shape.max_level}, need {m}")
    idx = [i for i in range(m + 1) if i != j]
    fillers: dict[tuple, int] = {}
    for x in range(shape.count(m)):
        key = tuple(shape.faces[(m, i)][x] for i in idx)
        fillers[key] = fillers.get(key, 0) + 1
    checked = 0
    for fam in _horn_families(shape, m, j):
        checked += 1
        n = fillers.get(fam, 0)
        if n == 0 or (strict and n > 1):
            faces = tuple((i, shape.levels[m - 1][y]) for i, y in zip(idx, fam))
            return KanSetReport(m, j, strict, False, checked, (faces, n))
    return KanSetReport(m, j, strict, True, checked)
