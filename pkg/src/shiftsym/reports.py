"""Plain report containers shared by the checks and the command line."""
from __future__ import annotations

from dataclasses import dataclass, field

from .exactla import RatMatrix, rat_str


@dataclass
class CheckReport:
    """Outcome of a verification: ``entries`` holds one dict per sub-check."""

    name: str
    passed: bool
    entries: list = field(default_factory=list)
    message: str = ""

    def to_dict(self) -> dict:
        out = {"check": self.name, "passed": self.passed}
        if self.message:
            out["message"] = self.message
        out["entries"] = [_plain(e) for e in self.entries]
        return out

    def failures(self) -> list:
        return [e for e in self.entries if not e.get("ok", True)]

    def __bool__(self) -> bool:
        return self.passed


@dataclass
class CohomologyReport:
    """Degree-indexed (co)homology dimensions with representative bases."""

    dims: dict
    representatives: dict = field(default_factory=dict)
    per_weight: dict = field(default_factory=dict)

    def dim(self, degree: int) -> int:
        return self.dims.get(degree, 0)

    def to_dict(self, with_reps: bool = False) -> dict:
        out = {str(d): self.dims[d] for d in sorted(self.dims)}
        if with_reps:
            out = {"dims": out, "representatives": {str(d): matrix_json(r) for d, r in sorted(self.representatives.items())}}
        return out


def matrix_json(m: RatMatrix) -> list:
    return [[rat_str(x) for x in row] for row in m.tolist()]


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, RatMatrix):
        return matrix_json(value)
    if hasattr(value, "numerator") and not isinstance(value, (bool, int)):
        return rat_str(value)
    return value
