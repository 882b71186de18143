"""Shifted 2-forms on linear models: closedness, the IM pairing on the
tangent complex, non-degeneracy, gauge transformations, pullbacks,
symplectic Morita equivalences and the transfer of a symplectic form
along a zig-zag of hypercovers.

An m-shifted k-form has components α_i, a (k+m-i)-form on X_i, for
0 <= i <= m.  All pointwise quantities are evaluated at the base point 0,
where only the constant part of α_m contributes.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .errors import DimensionMismatch, Infeasible, PreconditionError
from .exactla import RatMatrix, block_matrix, rank, solve
from .forms import FormBicomplex, PolyForm, de_rham_d, pullback, pullback_chain_map, simplicial_delta
from .linmodel import LinSimpSpace, SimpLinMap, check_hypercover, check_lie_n_groupoid, fiber_product
from .reports import CheckReport, matrix_json
from .tangent import TangentComplexData, tangent_complex, tangent_homology


class ShiftedForm:
    """m-shifted k-form ``{i: α_i}`` on a linear model.  Missing
    components are zero."""

    def __init__(self, model: LinSimpSpace, m: int, components: dict | None = None, k: int = 2):
        if m < 0:
            raise PreconditionError("shift must be non-negative")
        if model.max_level < m:
            raise DimensionMismatch(f"an {m}-shifted form needs levels through {m}")
        self.model = model
        self.m = m
        self.k = k
        comps = {}
        for i, form in (components or {}).items():
            i = int(i)
            if not 0 <= i <= m:
                raise DimensionMismatch(f"component index {i} outside 0..{m}")
            if form.dim != model.dims[i] or form.degree != k + m - i:
                raise DimensionMismatch(
                    f"component {i} must be a {k + m - i}-form on Q^{model.dims[i]}, got {form.degree}-form on Q^{form.dim}")
            comps[i] = form
        self.components = comps

    @classmethod
    def zero(cls, model: LinSimpSpace, m: int, k: int = 2) -> ShiftedForm:
        return cls(model, m, {}, k)

    def component(self, i: int) -> PolyForm:
        c = self.components.get(i)
        return c if c is not None else PolyForm.zero(self.model.dims[i], self.k + self.m - i)

    def top(self) -> PolyForm:
        return self.component(self.m)

    def max_weight(self) -> int:
        return max((c.max_weight() for c in self.components.values() if not c.is_zero()), default=self.k)

    def _compatible(self, other: ShiftedForm):
        if (self.m, self.k) != (other.m, other.k) or self.model.dims[: self.m + 1] != other.model.dims[: other.m + 1]:
            raise DimensionMismatch("shifted forms of different shape")

    def __add__(self, other: ShiftedForm) -> ShiftedForm:
        self._compatible(other)
        return ShiftedForm(self.model, self.m, {i: self.component(i) + other.component(i) for i in range(self.m + 1)}, self.k)

    def __neg__(self) -> ShiftedForm:
        return ShiftedForm(self.model, self.m, {i: -c for i, c in self.components.items()}, self.k)

    def __sub__(self, other: ShiftedForm) -> ShiftedForm:
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShiftedForm) or (self.m, self.k) != (other.m, other.k):
            return False
        return all(self.component(i) == other.component(i) for i in range(self.m + 1))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components.values())

    def D(self) -> dict:
        """Total differential, as ``{p: form of degree k+m+1-p on X_p}`` for
        p = 0..m+1 (D = δ + (-1)^p d)."""
        X = self.model
        if X.max_level < self.m + 1:
            raise DimensionMismatch(f"Dα needs levels through {self.m + 1}")
        out = {}
        for p in range(self.m + 2):
            q = self.k + self.m + 1 - p
            acc = PolyForm.zero(X.dims[p], q)
            if p >= 1:
                acc = acc + simplicial_delta(X, p, self.component(p - 1))
            if p <= self.m:
                dp = de_rham_d(self.component(p))
                acc = acc - dp if p % 2 else acc + dp
            out[p] = acc
        return out

    def pullback(self, f: SimpLinMap) -> ShiftedForm:
        return pullback_shifted(f, self)

    def to_json(self) -> dict:
        return {"shift": self.m, "k": self.k,
                "components": [self.component(i).to_json(level=i) for i in range(self.m + 1)]}

    @classmethod
    def from_json(cls, obj: dict, model: LinSimpSpace) -> ShiftedForm:
        m, k = int(obj["shift"]), int(obj.get("k", 2))
        comps = {}
        for c in obj.get("components", []):
            lvl = int(c["level"])
            if not 0 <= lvl <= m:
                raise DimensionMismatch(f"component level {lvl} outside 0..{m}")
            comps[lvl] = PolyForm.from_json(c, dim=model.dims[lvl])
        return cls(model, m, comps, k)

    def __repr__(self) -> str:
        return f"ShiftedForm(shift {self.m}, k {self.k}, components {sorted(self.components)})"


def shifted_from_total(fb: FormBicomplex, vec, m: int, w: int) -> ShiftedForm:
    """The weight-w shifted form whose coordinates in degree k+m are ``vec``."""
    comps = fb.forms_from_vector(vec, fb.k + m, w)
    return ShiftedForm(fb.model, m, comps, fb.k)


def total_vector(fb: FormBicomplex, alpha: ShiftedForm, w: int) -> tuple:
    return fb.vector(alpha.components, alpha.k + alpha.m, w)


# ---------------------------------------------------------------------
# closedness


def _normalization_defects(alpha: ShiftedForm) -> list:
    X = alpha.model
    bad = []
    for i, c in alpha.components.items():
        for j in range(i):
            if not pullback(X.degen(i - 1, j), c).is_zero():
                bad.append((i, j))
    return bad


def check_presymplectic(alpha: ShiftedForm) -> CheckReport:
    """Dα = 0 exactly and every component normalized."""
    if alpha.k != 2:
        raise PreconditionError("presymplectic forms are 2-forms (k = 2)")
    entries = []
    for p, comp in alpha.D().items():
        what = "multiplicative (δα_m = 0)" if p == alpha.m + 1 else f"closed at level {p}"
        entries.append({"component": p, "condition": what, "ok": comp.is_zero()})
    for i, j in _normalization_defects(alpha):
        entries.append({"component": i, "condition": f"s_{j}^* α_{i} = 0", "ok": False})
    bad = [e for e in entries if not e["ok"]]
    msg = "" if not bad else f"component {bad[0]['component']}: {bad[0]['condition']} fails"
    return CheckReport("presymplectic", not bad, entries, msg)


# ---------------------------------------------------------------------
# the IM pairing


def shuffles(l: int, m: int) -> list[tuple[tuple[int, ...], int]]:
    """(l, m-l)-shuffles σ of {0..m-1} as tuples (σ(0), ..., σ(m-1)) with sign."""
    out = []
    for first in itertools.combinations(range(m), l):
        rest = tuple(x for x in range(m) if x not in first)
        perm = first + rest
        inv = sum(1 for a in range(m) for b in range(a + 1, m) if perm[a] > perm[b])
        out.append((perm, -1 if inv % 2 else 1))
    return out


def _degeneracy_chain(X: LinSimpSpace, start: int, indices) -> RatMatrix:
    """s_{indices[-1]} ... s_{indices[0]} starting on X_start."""
    mat = X.identity(start)
    lvl = start
    for i in indices:
        mat = X.degen(lvl, i) @ mat
        lvl += 1
    return mat


@dataclass
class IMForMatrix:
    """Gram blocks Λ_l: 𝒯_l × 𝒯_{m-l} -> Q and the descended Grams on homology."""

    m: int
    grams: dict                       # l -> RatMatrix (dim 𝒯_l x dim 𝒯_{m-l})
    descended: dict                   # l -> RatMatrix (dim H_l x dim H_{m-l})
    homology_dims: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"shift": self.m,
                "grams": {str(l): matrix_json(g) for l, g in sorted(self.grams.items())},
                "descended": {str(l): matrix_json(g) for l, g in sorted(self.descended.items())},
                "homology_dims": {str(l): d for l, d in sorted(self.homology_dims.items())}}


def _tangent_basis(X: LinSimpSpace, T: TangentComplexData, l: int) -> RatMatrix:
    if l in T.inclusions:
        return T.inclusions[l]
    return RatMatrix.zeros(X.dims[l], 0)


def im_gram(alpha: ShiftedForm, T: TangentComplexData, l: int) -> RatMatrix:
    """λ(v, w) = Σ_σ sgn σ ω_m(s_σ(m-1)..s_σ(l) v, s_σ(l-1)..s_σ(0) w)
    on the kernel bases of 𝒯_l and 𝒯_{m-l}."""
    X, m = alpha.model, alpha.m
    G = alpha.top().gram()
    V = _tangent_basis(X, T, l)
    W = _tangent_basis(X, T, m - l)
    total = RatMatrix.zeros(V.cols, W.cols)
    if V.cols == 0 or W.cols == 0:
        return total
    for perm, sign in shuffles(l, m):
        up_v = _degeneracy_chain(X, l, perm[l:]) @ V
        up_w = _degeneracy_chain(X, m - l, perm[:l]) @ W
        term = up_v.T @ G @ up_w
        total = total + term if sign > 0 else total - term
    return total


def im_pairing(alpha: ShiftedForm, n: int, T: TangentComplexData | None = None) -> IMForMatrix:
    """Gram blocks for l = 0..m and their restriction to homology
    representatives."""
    T = T or tangent_complex(alpha.model, n)
    hom = tangent_homology(T)
    grams, desc, hd = {}, {}, {}
    for l in range(alpha.m + 1):
        grams[l] = im_gram(alpha, T, l)
        Rl = _reps(T, hom, l)
        Rr = _reps(T, hom, alpha.m - l)
        desc[l] = Rl.T @ grams[l] @ Rr
        hd[l] = Rl.cols
    return IMForMatrix(alpha.m, grams, desc, hd)


def _reps(T: TangentComplexData, hom, l: int) -> RatMatrix:
    if l in hom.representatives:
        return hom.representatives[l]
    return RatMatrix.zeros(T.dim(l) if l in T.complex.dims else 0, 0)


def _tdiff(T: TangentComplexData, l: int) -> RatMatrix:
    """∂_l: 𝒯_l -> 𝒯_{l-1}, zero outside the stored range."""
    lo = T.dim(l - 1) if l - 1 in T.complex.dims else 0
    hi = T.dim(l) if l in T.complex.dims else 0
    if l in T.complex.dims and l - 1 in T.complex.dims and l >= 1:
        return T.diff(l)
    return RatMatrix.zeros(lo, hi)


def check_im_multiplicative(lam: IMForMatrix, T: TangentComplexData) -> CheckReport:
    """λ(∂u, w) + (-1)^{l+1} λ(u, ∂w) = 0 for u ∈ 𝒯_{l+1}, w ∈ 𝒯_{m-l}."""
    entries = []
    m = lam.m
    for l in range(m):
        a = _tdiff(T, l + 1).T @ lam.grams[l]
        b = lam.grams[l + 1] @ _tdiff(T, m - l)
        lhs = a + b if (l + 1) % 2 == 0 else a - b
        entries.append({"l": l, "ok": lhs.is_zero()})
    bad = [e for e in entries if not e["ok"]]
    msg = "" if not bad else f"chain-map identity fails between degrees {bad[0]['l']} and {bad[0]['l'] + 1}"
    return CheckReport("im-multiplicative", not bad, entries, msg)


def check_graded_antisymmetry(lam: IMForMatrix) -> CheckReport:
    """block(m-l, l) = -(-1)^{l(m-l)} block(l, m-l)^T."""
    m = lam.m
    entries = []
    for l in range(m + 1):
        sign = -1 if (l * (m - l)) % 2 else 1
        expect = lam.grams[l].T.scale(-sign)
        entries.append({"l": l, "ok": lam.grams[m - l] == expect})
    bad = [e for e in entries if not e["ok"]]
    return CheckReport("im-antisymmetry", not bad, entries, "" if not bad else f"antisymmetry fails at l = {bad[0]['l']}")


def check_shifted_symplectic(alpha: ShiftedForm, n: int, check_groupoid: bool = True) -> CheckReport:
    """Closed, normalized, and the descended pairing H_l × H_{m-l} -> Q
    perfect for every l."""
    entries = []
    if check_groupoid:
        g = check_lie_n_groupoid(alpha.model, n)
        entries.append({"check": g.name, "ok": g.passed, "message": g.message})
        if not g.passed:
            return CheckReport("shifted-symplectic", False, entries, f"model is not a Lie {n}-groupoid: {g.message}")
    pre = check_presymplectic(alpha)
    entries.append({"check": "presymplectic", "ok": pre.passed, "message": pre.message})
    if not pre.passed:
        return CheckReport("shifted-symplectic", False, entries, pre.message)
    T = tangent_complex(alpha.model, n, check=False)
    lam = im_pairing(alpha, n, T)
    mult = check_im_multiplicative(lam, T)
    entries.append({"check": "im-multiplicative", "ok": mult.passed, "message": mult.message})
    msg = "" if mult.passed else mult.message
    for l in range(alpha.m + 1):
        g = lam.descended[l]
        a, b = lam.homology_dims[l], lam.homology_dims[alpha.m - l]
        r = rank(g)
        full = max(a, b)
        ok = a == b and r == a
        entries.append({"l": l, "dim_H_l": a, "dim_H_m_minus_l": b, "rank": r, "rank_deficit": full - r, "ok": ok})
        if not ok and not msg:
            msg = f"degenerate pairing at l = {l}, rank {r} of {full}"
            if a != b:
                msg += f" (dim H_{l} = {a}, dim H_{alpha.m - l} = {b})"
    ok = all(e["ok"] for e in entries)
    return CheckReport("shifted-symplectic", ok, entries, msg)


def one_shifted_criterion(rho: RatMatrix, omega: RatMatrix) -> bool:
    """The groupoid-level criterion on Γ(A --rho--> V) with a constant
    2-form of Gram ``omega`` on X_1 = V ⊕ A: the arrow space has twice the
    dimension of the object space, and no nonzero a ∈ ker rho gives an
    isotropic direction (0, a) ∈ ker ω."""
    v, a = rho.rows, rho.cols
    if a != v:
        return False
    from .exactla import kernel

    K = kernel(rho)  # a-coordinates of ker rho
    U = RatMatrix.zeros(v, K.cols).vstack(K)  # (0, a) inside V ⊕ A
    return rank(omega @ U) == K.cols


# ---------------------------------------------------------------------
# pullbacks, gauge transformations, Morita equivalences


def pullback_shifted(f: SimpLinMap, alpha: ShiftedForm) -> ShiftedForm:
    if f.target.dims[: alpha.m + 1] != alpha.model.dims[: alpha.m + 1]:
        raise DimensionMismatch("map does not target the form's model")
    comps = {i: pullback(f[i], c) for i, c in alpha.components.items()}
    return ShiftedForm(f.source, alpha.m, comps, alpha.k)


def exact_part(phi: ShiftedForm) -> ShiftedForm:
    """Dφ for a (m-1)-shifted form φ, as an m-shifted form (the component
    beyond level m is dropped: it is δφ_m = 0)."""
    m = phi.m + 1
    D = phi.D()
    return ShiftedForm(phi.model, m, {p: D[p] for p in range(m + 1)}, phi.k)


def gauge_transform(alpha: ShiftedForm, phi: ShiftedForm) -> ShiftedForm:
    """α + Dφ for φ of shift m-1."""
    if phi.m != alpha.m - 1 or phi.k != alpha.k:
        raise DimensionMismatch(f"gauge form must have shift {alpha.m - 1} and k = {alpha.k}")
    if phi.model.dims[: alpha.m + 1] != alpha.model.dims[: alpha.m + 1]:
        raise DimensionMismatch("gauge form lives on a different model")
    return alpha + ShiftedForm(alpha.model, alpha.m, exact_part(phi).components, alpha.k)


@dataclass
class MoritaData:
    """(X, α) <-f- (Z, φ) -g-> (Y, β) with f*α - g*β = Dφ."""

    alpha: ShiftedForm
    beta: ShiftedForm
    phi: ShiftedForm | None
    f: SimpLinMap
    g: SimpLinMap
    n: int


def _gauge_or_zero(phi: ShiftedForm | None, Z: LinSimpSpace, m: int) -> ShiftedForm:
    if phi is None or m == 0:
        return ShiftedForm.zero(Z, m)
    return exact_part(phi)


def check_symplectic_morita(alpha: ShiftedForm, beta: ShiftedForm, phi: ShiftedForm | None,
                            f: SimpLinMap, g: SimpLinMap, n: int) -> CheckReport:
    """f, g hypercovers, α and β shifted symplectic, f*α - g*β = Dφ exactly."""
    entries = []
    for name, h in (("f", f), ("g", g)):
        rep = check_hypercover(h, n)
        entries.append({"check": f"{name} hypercover", "ok": rep.passed, "message": rep.message})
    for name, form in (("alpha", alpha), ("beta", beta)):
        rep = check_shifted_symplectic(form, n)
        entries.append({"check": f"{name} shifted symplectic", "ok": rep.passed, "message": rep.message})
    m = alpha.m
    if beta.m != m or (phi is not None and phi.m != m - 1):
        raise DimensionMismatch("shifts of α, β, φ do not match")
    lhs = pullback_shifted(f, alpha) - pullback_shifted(g, beta)
    rhs = _gauge_or_zero(phi, f.source, m)
    ok = all(lhs.component(i) == rhs.component(i) for i in range(m + 1))
    entries.append({"check": "f*α - g*β = Dφ", "ok": ok})
    bad = [e for e in entries if not e["ok"]]
    msg = "" if not bad else f"{bad[0]['check']} fails" + (f": {bad[0]['message']}" if bad[0].get("message") else "")
    return CheckReport("symplectic-morita", not bad, entries, msg)


def check_morita(data: MoritaData) -> CheckReport:
    return check_symplectic_morita(data.alpha, data.beta, data.phi, data.f, data.g, data.n)


@dataclass
class TransferResult:
    beta: ShiftedForm
    phi: ShiftedForm         # satisfies g*α - h*β = Dφ
    weights: tuple
    verification: CheckReport | None = None

    def morita(self, alpha: ShiftedForm, g: SimpLinMap, h: SimpLinMap, n: int) -> MoritaData:
        return MoritaData(alpha, self.beta, self.phi, g, h, n)

    def to_json(self) -> dict:
        out = {"beta": self.beta.to_json(), "phi": self.phi.to_json() if self.phi is not None else None}
        if self.verification is not None:
            out["verification"] = self.verification.to_dict()
        return out


def transfer_symplectic(g: SimpLinMap, h: SimpLinMap, alpha: ShiftedForm, n: int,
                        W: int | None = None, verify: bool = True, check_inputs: bool = True) -> TransferResult:
    """Given hypercovers g: Z -> X, h: Z -> Y and α on X, find β on Y and
    φ on Z with Dβ = 0 and h*β - D(φ0) = g*α, weight block by weight block.
    The returned φ = -φ0 satisfies g*α - h*β = Dφ."""
    X, Z, Y = g.target, g.source, h.target
    m = alpha.m
    if h.source is not Z and h.source.dims != Z.dims:
        raise DimensionMismatch("the two hypercovers do not share a source")
    if alpha.model.dims != X.dims:
        raise DimensionMismatch("α does not live on the target of g")
    if check_inputs:
        for name, rep in (("g", check_hypercover(g, n)), ("h", check_hypercover(h, n)),
                          ("α", check_shifted_symplectic(alpha, n))):
            if not rep.passed:
                raise PreconditionError(f"{name}: {rep.message}")
    W = alpha.max_weight() if W is None else W
    fy, fz = FormBicomplex(Y, 2), FormBicomplex(Z, 2)
    galpha = pullback_shifted(g, alpha)
    beta = ShiftedForm.zero(Y, m)
    phi0 = ShiftedForm.zero(Z, m - 1) if m >= 1 else None
    top = m + 2
    for w in range(2, W + 1):
        bdim = fy.total_dim(top, w)
        pdim = fz.total_dim(top - 1, w) if m >= 1 else 0
        rows_b = fy.total_dim(top + 1, w)
        rows_z = fz.total_dim(top, w)
        DY = fy.D(top, w)
        hstar = pullback_chain_map(fy, fz, h, w, top)[top]
        DZ = fz.D(top - 1, w) if m >= 1 else RatMatrix.zeros(rows_z, 0)
        A = block_matrix([[DY, None], [hstar, -DZ]], [rows_b, rows_z], [bdim, pdim])
        rhs = (0,) * rows_b + total_vector(fz, galpha, w)
        try:
            sol = solve(A, rhs)
        except Infeasible as exc:
            raise Infeasible(f"no transfer within weight {w}; try a larger weight bound",
                             certificate=exc.certificate, weight=w) from None
        x = sol.particular
        beta = beta + shifted_from_total(fy, x[:bdim], m, w)
        if m >= 1:
            phi0 = phi0 + shifted_from_total(fz, x[bdim:], m - 1, w)
    phi = -phi0 if phi0 is not None else None
    result = TransferResult(beta, phi, tuple(range(2, W + 1)))
    if verify:
        result.verification = check_symplectic_morita(alpha, beta, phi, g, h, n)
    return result


def compose_morita(first: MoritaData, second: MoritaData) -> MoritaData:
    """(X, α) <- Z1 -> (Y, β) and (Y, β) <- Z2 -> (W, γ) compose through
    U = Z1 ×_Y Z2 with gauge form p1*φ + p2*ψ."""
    if first.g.target.dims != second.f.target.dims:
        raise DimensionMismatch("middle models differ")
    if first.beta != ShiftedForm(first.g.target, second.alpha.m, second.alpha.components, second.alpha.k):
        raise PreconditionError("middle forms differ")
    fp = fiber_product(first.g, second.f)
    U, p1, p2 = fp.space, fp.to_left, fp.to_right
    m = first.alpha.m
    phi = None
    if m >= 1:
        a = pullback_shifted(p1, first.phi) if first.phi is not None else ShiftedForm.zero(U, m - 1)
        b = pullback_shifted(p2, second.phi) if second.phi is not None else ShiftedForm.zero(U, m - 1)
        phi = a + b
    return MoritaData(first.alpha, second.beta, phi, first.f @ p1, second.g @ p2, first.n)


def identity_morita(alpha: ShiftedForm, n: int) -> MoritaData:
    from .linmodel import identity_map

    idm = identity_map(alpha.model)
    phi = ShiftedForm.zero(alpha.model, alpha.m - 1) if alpha.m >= 1 else None
    return MoritaData(alpha, alpha, phi, idm, idm, n)


def strict_morita(f: SimpLinMap, alpha: ShiftedForm, n: int) -> MoritaData:
    """(Y, f*α) <-id- (Y, 0) -f-> (X, α)."""
    from .linmodel import identity_map

    Y = f.source
    phi = ShiftedForm.zero(Y, alpha.m - 1) if alpha.m >= 1 else None
    return MoritaData(pullback_shifted(f, alpha), alpha, phi, identity_map(Y), f, n)


def gauge_morita(alpha: ShiftedForm, phi: ShiftedForm, n: int) -> MoritaData:
    """(X, α + Dφ) <-id- (X, -φ) -id-> (X, α): (α + Dφ) - α = Dφ."""
    from .linmodel import identity_map

    idm = identity_map(alpha.model)
    return MoritaData(gauge_transform(alpha, phi), alpha, phi, idm, idm, n)


# ---------------------------------------------------------------------
# random instances


def multiplicative_constant_forms(X: LinSimpSpace, m: int) -> RatMatrix:
    """Basis (columns, in normalized weight-2 coordinates on X_m) of the
    weight-2 m-shifted cocycles: normalized constant 2-forms on X_m with δ = 0."""
    fb = FormBicomplex(X, 2)
    from .exactla import kernel

    return kernel(fb.D(m + 2, 2))


def random_closed_form(rng: random.Random, X: LinSimpSpace, m: int, coeffs=(-2, -1, 0, 1, 2)) -> ShiftedForm:
    fb = FormBicomplex(X, 2)
    K = multiplicative_constant_forms(X, m)
    vec = [0] * K.rows
    for j in range(K.cols):
        c = rng.choice(coeffs)
        if c:
            col = K.column(j)
            vec = [a + c * b for a, b in zip(vec, col)]
    return shifted_from_total(fb, vec, m, 2)


def random_gauge(rng: random.Random, X: LinSimpSpace, m: int, weights=(2, 3), coeffs=(-1, 0, 1)) -> ShiftedForm:
    """Random normalized (m-1)-shifted 2-form with the given weights."""
    fb = FormBicomplex(X, 2)
    total = ShiftedForm.zero(X, m - 1)
    for w in weights:
        dim = fb.total_dim(m + 1, w)
        vec = [rng.choice(coeffs) for _ in range(dim)]
        total = total + shifted_from_total(fb, vec, m - 1, w)
    return total


def random_symplectic(rng: random.Random, X: LinSimpSpace, m: int, n: int, tries: int = 50,
                      gauge_weights=(2, 3)) -> ShiftedForm:
    """A random m-shifted symplectic form: a non-degenerate weight-2
    cocycle, then a random gauge term when m >= 1."""
    T = tangent_complex(X, n)
    for _ in range(tries):
        alpha = random_closed_form(rng, X, m)
        if check_shifted_symplectic(alpha, n, check_groupoid=False).passed:
            if m >= 1 and gauge_weights:
                alpha = gauge_transform(alpha, random_gauge(rng, X, m, gauge_weights))
            return alpha
    raise Infeasible(f"no non-degenerate {m}-shifted form found in {tries} tries", homology=tangent_homology(T).dims)


def standard_symplectic_gram(d: int) -> RatMatrix:
    """[[0, I], [-I, 0]] on Q^{2d}."""
    entries = {}
    for i in range(d):
        entries[(i, d + i)] = 1
        entries[(d + i, i)] = -1
    return RatMatrix.from_sparse(2 * d, 2 * d, entries)
