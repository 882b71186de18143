"""Tangent complexes of linear models at the base point 0.

Two descriptions are computed: the kernel route, where 𝒯_l is the kernel
of the horn projection p^l_l (faces d_0..d_{l-1}) with ∂ = (-1)^l d_l, and
the quotient route X_l / Σ im s_i with the alternating face sum.  The
inclusion-then-projection map between them is checked to be a chain
isomorphism.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidModel, PreconditionError
from .exactla import (
    ChainComplexQ,
    RatMatrix,
    Subspace,
    compare_homology,
    hstack,
    homology,
    kernel,
    kernel_subspace,
    rank,
    solve_matrix,
    vstack,
)
from .linmodel import LinSimpSpace, SimpLinMap, check_lie_n_groupoid
from .reports import CheckReport, CohomologyReport


@dataclass
class TangentComplexData:
    complex: ChainComplexQ
    inclusions: dict          # l -> matrix 𝒯_l -> X_l
    route: str = "kernel"
    spaces: dict = field(default_factory=dict)  # l -> Subspace of X_l
    vanishing: dict = field(default_factory=dict)  # l > n -> dim 𝒯_l (expected 0)

    @property
    def n(self) -> int:
        return max(self.complex.degrees)

    def dim(self, l: int) -> int:
        return self.complex.dim(l)

    def diff(self, l: int) -> RatMatrix:
        return self.complex.diff(l)


def _kernel_space(X: LinSimpSpace, l: int) -> Subspace:
    if l == 0:
        return Subspace.whole(X.dims[0])
    return kernel_subspace(vstack([X.face(l, i) for i in range(l)], cols=X.dims[l]))


def tangent_complex(X: LinSimpSpace, n: int, check: bool = True) -> TangentComplexData:
    """𝒯_l X = ker p^l_l for l = 0..n with ∂ = (-1)^l d_l."""
    if check:
        rep = check_lie_n_groupoid(X, n)
        if not rep.passed:
            raise PreconditionError(f"model is not a Lie {n}-groupoid: {rep.message}")
    top = min(n, X.max_level)
    spaces = {l: _kernel_space(X, l) for l in range(top + 1)}
    diffs = {}
    for l in range(1, top + 1):
        sign = -1 if l % 2 else 1
        diffs[l] = spaces[l - 1].coords((X.face(l, l) @ spaces[l].basis).scale(sign))
    vanishing = {l: _kernel_space(X, l).dim for l in range(top + 1, min(X.max_level, n + 2) + 1)}
    cx = ChainComplexQ({l: s.dim for l, s in spaces.items()}, diffs)
    cx.validate()
    return TangentComplexData(cx, {l: s.basis for l, s in spaces.items()}, "kernel", spaces, vanishing)


@dataclass
class QuotientComplex:
    complex: ChainComplexQ
    projections: dict  # l -> matrix X_l -> Q_l
    sections: dict     # l -> right inverse of the projection


def quotient_complex(X: LinSimpSpace, n: int) -> QuotientComplex:
    """Q_l = X_l / Σ_i im s_i with ∂ = Σ_i (-1)^i d_i."""
    top = min(n, X.max_level)
    proj, sect = {}, {}
    for l in range(top + 1):
        if l == 0:
            p = RatMatrix.identity(X.dims[0])
        else:
            degs = hstack([X.degen(l - 1, i) for i in range(l)], rows=X.dims[l])
            p = kernel(degs.T).T  # rows annihilate every degenerate vector
        proj[l] = p
        sect[l] = solve_matrix(p, RatMatrix.identity(p.rows)) if p.rows else RatMatrix.zeros(X.dims[l], 0)
    diffs = {}
    for l in range(1, top + 1):
        alt = X.face(l, 0)
        for i in range(1, l + 1):
            term = X.face(l, i)
            alt = alt - term if i % 2 else alt + term
        diffs[l] = proj[l - 1] @ alt @ sect[l]
    cx = ChainComplexQ({l: proj[l].rows for l in proj}, diffs)
    cx.validate()
    return QuotientComplex(cx, proj, sect)


def compare_routes(X: LinSimpSpace, n: int, T: TangentComplexData | None = None) -> CheckReport:
    """The map 𝒯_l -> X_l -> Q_l is a chain map, an isomorphism in each
    degree, and both complexes have the same homology dimensions."""
    T = T or tangent_complex(X, n, check=False)
    Q = quotient_complex(X, n)
    maps = {l: Q.projections[l] @ T.inclusions[l] for l in T.inclusions}
    entries = []
    try:
        cmp = compare_homology(T.complex, Q.complex, maps, T.complex.degrees)
    except Exception as exc:  # not a chain map
        return CheckReport("tangent-routes", False, [], str(exc))
    for l in T.complex.degrees:
        m = maps[l]
        iso = m.rows == m.cols and rank(m) == m.rows
        entries.append({"l": l, "dim_kernel_route": T.dim(l), "dim_quotient_route": Q.complex.dim(l),
                        "levelwise_iso": iso, **cmp[l].to_dict(), "ok": iso and cmp[l].iso})
    ok = all(e["ok"] for e in entries)
    return CheckReport("tangent-routes", ok, entries, "" if ok else "kernel and quotient descriptions disagree")


def tangent_homology(T: TangentComplexData) -> CohomologyReport:
    hs = homology(T.complex)
    return CohomologyReport({l: h.dim for l, h in hs.items()}, {l: h.representatives for l, h in hs.items()})


def induced_tangent_map(f: SimpLinMap, n: int, TX: TangentComplexData | None = None,
                        TY: TangentComplexData | None = None) -> dict:
    """f_l restricted to 𝒯_l X -> 𝒯_l Y, in the kernel bases."""
    TX = TX or tangent_complex(f.source, n)
    TY = TY or tangent_complex(f.target, n)
    out = {}
    for l in TX.complex.degrees:
        image = f[l] @ TX.inclusions[l]
        sp = TY.spaces[l]
        if not sp.contains(image):
            raise InvalidModel(f"f_{l} does not map 𝒯_{l} into 𝒯_{l}")
        out[l] = sp.coords(image, check=False)
    for l in range(1, max(TX.complex.degrees) + 1):
        if out[l - 1] @ TX.diff(l) != TY.diff(l) @ out[l]:
            raise InvalidModel(f"induced map does not commute with ∂ at degree {l}")
    return out


def check_quasi_iso(f: SimpLinMap, n: int) -> CheckReport:
    TX = tangent_complex(f.source, n)
    TY = tangent_complex(f.target, n)
    maps = induced_tangent_map(f, n, TX, TY)
    cmp = compare_homology(TX.complex, TY.complex, maps, range(n + 1))
    entries = [{"l": l, **c.to_dict(), "ok": c.iso} for l, c in cmp.items()]
    bad = [e for e in entries if not e["ok"]]
    msg = "" if not bad else f"H_{bad[0]['l']}: source dim {bad[0]['dim_source']}, target dim {bad[0]['dim_target']}, induced rank {bad[0]['induced_rank']}"
    return CheckReport("tangent-quasi-iso", not bad, entries, msg)
