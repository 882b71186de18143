"""Random and named test instances: chain complexes, Dold–Kan models,
hypercovers and zig-zags.  Every generator takes a ``random.Random`` so
runs are reproducible."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .exactla import ChainComplexQ, RatMatrix, block_diag, hstack, vstack
from .linmodel import LinSimpSpace, SimpLinMap, dold_kan, dold_kan_map


def random_invertible(rng: random.Random, n: int) -> tuple[RatMatrix, RatMatrix]:
    """(P, P^{-1}) with small integer entries (unit triangular factors)."""
    if n == 0:
        z = RatMatrix.zeros(0, 0)
        return z, z
    lower = [[1 if i == j else (rng.choice([-1, 0, 0, 1, 2]) if j < i else 0) for j in range(n)] for i in range(n)]
    upper = [[1 if i == j else (rng.choice([-1, 0, 0, 1]) if j > i else 0) for j in range(n)] for i in range(n)]
    p = RatMatrix.from_rows(lower) @ RatMatrix.from_rows(upper)
    return p, p.inverse()


def conjugate(C: ChainComplexQ, P: dict, Pinv: dict) -> ChainComplexQ:
    """The complex with differentials P_{l-1} ∂_l P_l^{-1}."""
    return ChainComplexQ(dict(C.dims), {l: P[l - 1] @ C.diff(l) @ Pinv[l] for l in C.degrees if l >= 1 and l - 1 in C.dims})


def standard_complex(homology_dims: list[int], disks: list[int]) -> ChainComplexQ:
    """Spheres ``homology_dims[l]`` in degree l plus ``disks[l]`` copies of
    Q -> Q in degrees (l, l-1) (``disks[0]`` unused).  Basis order in
    degree l: spheres, disk tops, disk bottoms."""
    n = len(homology_dims) - 1
    disks = list(disks) + [0] * (n + 2 - len(disks))
    dims, diffs = {}, {}
    for l in range(n + 1):
        dims[l] = homology_dims[l] + disks[l] + (disks[l + 1] if l + 1 <= n else 0)
    for l in range(1, n + 1):
        entries = {}
        h_lo, tops_lo = homology_dims[l - 1], disks[l - 1] if l - 1 >= 1 else 0
        for t in range(disks[l]):
            entries[(h_lo + tops_lo + t, homology_dims[l] + t)] = 1
        diffs[l] = RatMatrix.from_sparse(dims[l - 1], dims[l], entries)
    return ChainComplexQ(dims, diffs)


def scramble(rng: random.Random, C: ChainComplexQ) -> tuple[ChainComplexQ, dict, dict]:
    """Random levelwise basis change; returns (C', P, P^{-1}) with C' = P C P^{-1}."""
    P, Pinv = {}, {}
    for l in C.degrees:
        P[l], Pinv[l] = random_invertible(rng, C.dim(l))
    return conjugate(C, P, Pinv), P, Pinv


def random_complex(rng: random.Random, n: int, max_dim: int = 3) -> ChainComplexQ:
    while True:
        h = [rng.randint(0, 2) for _ in range(n + 1)]
        b = [0] + [rng.randint(0, 1) for _ in range(n)]
        C = standard_complex(h, b)
        if all(C.dim(l) <= max_dim for l in range(n + 1)):
            return scramble(rng, C)[0]


def acyclic_complex(rng: random.Random, n: int, max_disks: int = 1) -> ChainComplexQ:
    """Sum of disks in degrees (j, j-1), 1 <= j <= n, in a random basis."""
    b = [0] + [rng.randint(0, max_disks) for _ in range(n)]
    return scramble(rng, standard_complex([0] * (n + 1), b))[0]


def direct_sum(A: ChainComplexQ, B: ChainComplexQ) -> ChainComplexQ:
    degs = sorted(set(A.degrees) | set(B.degrees))
    return ChainComplexQ({l: A.dim(l) + B.dim(l) for l in degs},
                         {l: block_diag([A.diff(l), B.diff(l)]) for l in degs if l >= 1})


def random_chain_map(rng: random.Random, K: ChainComplexQ, C: ChainComplexQ) -> dict:
    """A chain map K -> C of the form ∂s + s∂ for a random degree-raising s.
    For contractible K every chain map has this form."""
    n = max(K.degrees)
    s = {l: RatMatrix.from_rows([[rng.choice([-1, 0, 0, 1]) for _ in range(K.dim(l))] for _ in range(C.dim(l + 1))],
                                cols=K.dim(l))
         for l in range(n + 1)}
    out = {}
    for l in range(n + 1):
        a = C.diff(l + 1) @ s[l] if C.dim(l + 1) else RatMatrix.zeros(C.dim(l), K.dim(l))
        b = s[l - 1] @ K.diff(l) if l >= 1 else RatMatrix.zeros(C.dim(l), K.dim(l))
        out[l] = a + b
    return out


@dataclass
class HypercoverInstance:
    f: SimpLinMap
    source_complex: ChainComplexQ
    target_complex: ChainComplexQ
    chain_map: dict
    n: int


def hypercover_from(rng: random.Random, C: ChainComplexQ, K: ChainComplexQ, n: int, levels: int) -> HypercoverInstance:
    """Γ([id, h]): Γ(C ⊕ K) -> Γ(C) for acyclic K, in a scrambled source basis."""
    h = random_chain_map(rng, K, C)
    Z = direct_sum(C, K)
    fmap = {l: hstack([RatMatrix.identity(C.dim(l)), h[l]], rows=C.dim(l)) for l in range(n + 1)}
    Zs, P, Pinv = scramble(rng, Z)
    fmap = {l: fmap[l] @ Pinv[l] for l in fmap}
    X, Y = dold_kan(Zs, levels), dold_kan(C, levels)
    f = dold_kan_map(fmap, Zs, C, levels, X, Y)
    return HypercoverInstance(f, Zs, C, fmap, n)


def random_hypercover(rng: random.Random, n: int, max_dim: int = 4, levels: int | None = None) -> HypercoverInstance:
    """Random hypercover of Lie n-groupoids between Dold–Kan models whose
    chain complexes have at most ``max_dim`` in each degree."""
    levels = n + 2 if levels is None else levels
    while True:
        C = random_complex(rng, n, max_dim=max(1, max_dim - 1))
        K = acyclic_complex(rng, n)
        if all(C.dim(l) + K.dim(l) <= max_dim for l in range(n + 1)):
            return hypercover_from(rng, C, K, n, levels)


@dataclass
class ZigZag:
    g: SimpLinMap  # Z -> X
    h: SimpLinMap  # Z -> Y
    n: int


def zigzag_from(rng: random.Random, B: ChainComplexQ, n: int, levels: int,
                K1: ChainComplexQ | None = None, K2: ChainComplexQ | None = None) -> ZigZag:
    """X = Γ(B ⊕ K1) <- Z = Γ(B ⊕ K1 ⊕ K2) -> Y = Γ(B ⊕ K2), all scrambled."""
    K1 = K1 if K1 is not None else acyclic_complex(rng, n)
    K2 = K2 if K2 is not None else acyclic_complex(rng, n)
    XB = direct_sum(B, K1)
    YB = direct_sum(B, K2)
    ZB = direct_sum(XB, K2)
    h2 = random_chain_map(rng, K2, B)
    h1 = random_chain_map(rng, K1, B)
    gmap, hmap = {}, {}
    for l in range(n + 1):
        b, k1, k2 = B.dim(l), K1.dim(l), K2.dim(l)
        gmap[l] = vstack([hstack([RatMatrix.identity(b), RatMatrix.zeros(b, k1), h2[l]], rows=b),
                          hstack([RatMatrix.zeros(k1, b), RatMatrix.identity(k1), RatMatrix.zeros(k1, k2)], rows=k1)],
                         cols=b + k1 + k2)
        hmap[l] = vstack([hstack([RatMatrix.identity(b), h1[l], RatMatrix.zeros(b, k2)], rows=b),
                          hstack([RatMatrix.zeros(k2, b), RatMatrix.zeros(k2, k1), RatMatrix.identity(k2)], rows=k2)],
                         cols=b + k1 + k2)
    Xs, PX, _ = scramble(rng, XB)
    Ys, PY, _ = scramble(rng, YB)
    Zs, _, PZinv = scramble(rng, ZB)
    gmap = {l: PX[l] @ gmap[l] @ PZinv[l] for l in gmap}
    hmap = {l: PY[l] @ hmap[l] @ PZinv[l] for l in hmap}
    X, Y, Z = dold_kan(Xs, levels), dold_kan(Ys, levels), dold_kan(Zs, levels)
    return ZigZag(dold_kan_map(gmap, Zs, Xs, levels, Z, X), dold_kan_map(hmap, Zs, Ys, levels, Z, Y), n)


def linear_pair_model(rho: RatMatrix, levels: int) -> LinSimpSpace:
    """Γ(A --rho--> V): X_0 = V, X_1 = V ⊕ A with d_0(v, a) = v + rho a, d_1(v, a) = v."""
    return dold_kan(ChainComplexQ({0: rho.rows, 1: rho.cols}, {1: rho}), levels)
