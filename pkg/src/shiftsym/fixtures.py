"""Built-in example bundles used by ``selftest`` and the README.

A bundle is the JSON document the command line reads::

    {"models": {name: model},
     "maps":   {name: {"source": name, "target": name, "level_mats": ...}},
     "forms":  {name: {"model": name, "shift": m, "k": k, "components": [...]}}}

Everything here is deterministic: random constructions use fixed seeds.
"""
from __future__ import annotations

import json
import random
import sys
from pathlib import Path

from .exactla import RatMatrix
from .forms import PolyForm
from .generators import hypercover_from, linear_pair_model, scramble, standard_complex
from .linmodel import constant_space, identity_map, pair_space
from .symplectic import ShiftedForm, random_symplectic, standard_symplectic_gram


def bundle(models: dict, maps: dict | None = None, forms: dict | None = None) -> dict:
    """Serialise named objects.  Map and form owners are found by identity
    among ``models``."""
    names = {id(X): name for name, X in models.items()}
    out: dict = {"models": {name: X.to_json() for name, X in models.items()}}
    if maps:
        out["maps"] = {name: {"source": names[id(f.source)], "target": names[id(f.target)], **f.to_json()}
                       for name, f in maps.items()}
    if forms:
        out["forms"] = {name: {"model": names[id(a.model)], **a.to_json()} for name, a in forms.items()}
    return out


def pair_groupoid(dim: int = 2, levels: int = 4) -> dict:
    return bundle({"X": pair_space(dim, levels)})


def symplectic_vector_space(d: int = 1, levels: int = 2, degenerate: bool = False) -> dict:
    """(Q^{2d}, ω) as a 0-shifted form on the constant simplicial space;
    ``degenerate`` replaces ω by zero."""
    X = constant_space(2 * d, levels)
    comps = {} if degenerate else {0: PolyForm.constant(standard_symplectic_gram(d))}
    return bundle({"X": X}, forms={"omega": ShiftedForm(X, 0, comps)})


def one_shifted_model(seed: int = 0, levels: int = 3) -> dict:
    """Γ(A --0--> V) with dim A = dim V = 1 and a random 1-shifted
    symplectic form."""
    X = linear_pair_model(RatMatrix.from_rows([[0]]), levels)
    alpha = random_symplectic(random.Random(seed), X, 1, 1)
    return bundle({"X": X}, forms={"alpha": alpha})


def acyclic_hypercover(seed: int = 0, n: int = 1, levels: int = 3) -> dict:
    """f: Γ(C ⊕ K) -> Γ(C) with K acyclic, source basis scrambled."""
    rng = random.Random(seed)
    inst = hypercover_from(rng, standard_complex([1, 1], [0, 1]), standard_complex([0, 0], [0, 1]), n, levels)
    return bundle({"Z": inst.f.source, "X": inst.f.target}, maps={"f": inst.f})


def strict_zigzag(seed: int = 0, levels: int = 3) -> dict:
    """A hypercover g: Z -> X with a 1-shifted symplectic α on X, and
    h = id_Z, so transferring α along the zig-zag recovers g*α up to gauge."""
    rng = random.Random(seed)
    C, _, _ = scramble(rng, standard_complex([1, 1], [0, 0]))
    inst = hypercover_from(rng, C, standard_complex([0, 0], [0, 1]), 1, levels)
    g = inst.f
    alpha = random_symplectic(rng, g.target, 1, 1)
    return bundle({"Z": g.source, "X": g.target}, maps={"g": g, "h": identity_map(g.source)},
                  forms={"alpha": alpha})


FIXTURES = {
    "pair_groupoid": pair_groupoid,
    "symplectic_vector_space": symplectic_vector_space,
    "degenerate_vector_space": lambda: symplectic_vector_space(degenerate=True),
    "one_shifted_model": one_shifted_model,
    "acyclic_hypercover": acyclic_hypercover,
    "strict_zigzag": strict_zigzag,
}


def write_all(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, make in FIXTURES.items():
        path = directory / f"{name}.json"
        path.write_text(json.dumps(make(), indent=2, sort_keys=True) + "\n")
        paths.append(path)
    return paths


if __name__ == "__main__":
    for p in write_all(sys.argv[1] if len(sys.argv) > 1 else "fixtures"):
        print(p)
