"""Command line front end.

Exit codes: 0 every check passed, 1 a mathematical check failed (the
report names it), 2 bad input or parameters.  Reports are serialised with
sorted keys so identical inputs give byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import DimensionMismatch, Infeasible, InsufficientLevels, InvalidModel, PreconditionError, ShiftsymError
from .linmodel import LinSimpSpace, SimpLinMap, check_hypercover, check_lie_n_groupoid
from .reports import CheckReport
from .symplectic import ShiftedForm, check_shifted_symplectic, check_symplectic_morita, transfer_symplectic

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# ---------------------------------------------------------------------
# loading


@dataclass
class Bundle:
    models: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    forms: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)
    problems: list = field(default_factory=list)  # identity violations (validate mode)

    def pick(self, kind: str, name: str | None):
        table = getattr(self, kind)
        if name is not None:
            if name not in table:
                raise InputError(f"no {kind[:-1]} named {name!r} (have {sorted(table) or 'none'})")
            return table[name]
        if len(table) != 1:
            raise InputError(f"{len(table)} {kind} in the input; choose one by name")
        return next(iter(table.values()))


def read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise InputError(f"{path}: top level must be an object")
    return obj


def merge_raw(docs: list[tuple[str, dict]]) -> dict:
    """A document holding a bare model (it has "levels") counts as a bundle
    with one model called X."""
    merged: dict = {"models": {}, "maps": {}, "forms": {}}
    for path, obj in docs:
        if "levels" in obj:
            obj = {"models": {"X": obj}}
        unknown = set(obj) - set(merged)
        if unknown:
            raise InputError(f"{path}: unknown top-level keys {sorted(unknown)}")
        for kind in merged:
            for name, val in obj.get(kind, {}).items():
                if name in merged[kind]:
                    raise InputError(f"{path}: {kind[:-1]} {name!r} defined twice")
                merged[kind][name] = val
    return merged


def build(raw: dict, strict: bool = True) -> Bundle:
    """Parse every object.  With ``strict=False`` identity violations are
    collected in ``problems`` instead of raised."""
    out = Bundle(raw=raw)
    where = ""
    try:
        for name, obj in raw["models"].items():
            where = f"model {name!r}"
            X = LinSimpSpace.from_json(obj, name=name, validate=strict)
            out.problems += [f"{where}: {v}" for v in ([] if strict else X.identity_violations(limit=5))]
            out.models[name] = X
        for name, obj in raw["maps"].items():
            where = f"map {name!r}"
            src, tgt = _owner(out, obj, "source", where), _owner(out, obj, "target", where)
            f = SimpLinMap.from_json(obj, src, tgt, validate=strict)
            f.name = name
            out.problems += [f"{where}: {v}" for v in ([] if strict else f.violations(limit=5))]
            out.maps[name] = f
        for name, obj in raw["forms"].items():
            where = f"form {name!r}"
            out.forms[name] = ShiftedForm.from_json(obj, _owner(out, obj, "model", where))
    except InputError:
        raise
    except InvalidModel as exc:
        raise InputError(f"{where}: {exc}") from None
    except (KeyError, TypeError, ValueError, AttributeError, IndexError, ShiftsymError) as exc:
        detail = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        raise InputError(f"{where}: {detail}") from None
    return out


def _owner(b: Bundle, obj: dict, key: str, where: str) -> LinSimpSpace:
    name = obj.get(key)
    if name not in b.models:
        raise InputError(f"{where}: {key} {name!r} is not a model in the input")
    return b.models[name]


def load(paths: list[str], strict: bool = True) -> Bundle:
    return build(merge_raw([(p, read_json(p)) for p in paths]), strict)


# ---------------------------------------------------------------------
# commands; each returns (report dict, passed)


def _report(rep: CheckReport, **extra) -> tuple[dict, bool]:
    out = rep.to_dict()
    out.update(extra)
    return out, rep.passed


def cmd_validate(args, b: Bundle):
    entries = [{"object": f"model {k!r}", "levels": list(X.dims)} for k, X in sorted(b.models.items())]
    entries += [{"object": f"map {k!r}", "source": f.source.name, "target": f.target.name} for k, f in sorted(b.maps.items())]
    entries += [{"object": f"form {k!r}", "shift": a.m, "k": a.k} for k, a in sorted(b.forms.items())]
    ok = not b.problems
    out = {"check": "validate", "passed": ok, "entries": entries}
    if not ok:
        out["message"] = b.problems[0]
        out["violations"] = b.problems
    return out, ok


def cmd_check_ngpd(args, b: Bundle):
    X = b.pick("models", args.model)
    return _report(check_lie_n_groupoid(X, args.n))


def cmd_check_hypercover(args, b: Bundle):
    f = b.pick("maps", args.map)
    return _report(check_hypercover(f, args.n))


def cmd_tangent(args, b: Bundle):
    from .tangent import compare_routes, tangent_complex, tangent_homology

    X = b.pick("models", args.model)
    rep = check_lie_n_groupoid(X, args.n)
    if not rep.passed:
        return _report(rep)
    T = tangent_complex(X, args.n, check=False)
    routes = compare_routes(X, args.n, T)
    out = routes.to_dict()
    out["check"] = "tangent"
    out["dims"] = {str(l): T.dim(l) for l in T.complex.degrees}
    out["homology"] = tangent_homology(T).to_dict()
    out["differentials"] = {str(l): T.diff(l) for l in range(1, T.n + 1)}
    from .reports import _plain

    return _plain(out), routes.passed


def cmd_cohomology(args, b: Bundle):
    from .forms import truncated_total_cohomology

    X = b.pick("models", args.model)
    if X.max_level < args.degrees + 1 - args.k:
        raise InsufficientLevels(f"degree {args.degrees} needs levels through {args.degrees + 1 - args.k}")
    rep = truncated_total_cohomology(X, args.k, args.degrees, args.weight)
    out = {"check": "cohomology", "passed": True, "k": args.k, "degree": args.degrees, "weight": args.weight,
           "dim": rep.dim(args.degrees), "per_weight": {str(w): d for w, d in sorted(rep.per_weight.items())}}
    return out, True


def cmd_check_symplectic(args, b: Bundle):
    alpha = b.pick("forms", args.form)
    _check_shift(args, alpha)
    return _report(check_shifted_symplectic(alpha, args.n))


def _check_shift(args, alpha: ShiftedForm) -> None:
    if args.m is not None and args.m != alpha.m:
        raise InputError(f"--m {args.m} but the form has shift {alpha.m}")
    if alpha.k != args.k:
        raise InputError(f"--k {args.k} but the form has k = {alpha.k}")


def cmd_transfer(args, b: Bundle):
    g, h = b.pick("maps", args.g), b.pick("maps", args.h)
    alpha = b.pick("forms", args.form)
    _check_shift(args, alpha)
    try:
        res = transfer_symplectic(g, h, alpha, args.n, W=args.weight)
    except PreconditionError as exc:
        return {"check": "transfer", "passed": False, "message": f"precondition failed: {exc}"}, False
    except Infeasible as exc:
        out = {"check": "transfer", "passed": False, "message": str(exc), "weight": exc.info.get("weight")}
        if exc.certificate is not None:
            from .exactla import rat_str

            out["certificate"] = [rat_str(x) for x in exc.certificate]
        return out, False
    names = {id(X): k for k, X in b.models.items()}
    out = {"check": "transfer", "passed": res.verification.passed, "weights": list(res.weights),
           "beta": {"model": names[id(h.target)], **res.beta.to_json()},
           "phi": None if res.phi is None else {"model": names[id(g.source)], **res.phi.to_json()},
           "verification": res.verification.to_dict()}
    if not res.verification.passed:
        out["message"] = res.verification.message
    return out, res.verification.passed


def cmd_verify_sme(args, b: Bundle):
    f, g = b.pick("maps", args.f), b.pick("maps", args.g)
    alpha, beta = b.pick("forms", args.alpha), b.pick("forms", args.beta)
    phi = b.forms[args.phi] if args.phi else None
    if args.phi and args.phi not in b.forms:
        raise InputError(f"no form named {args.phi!r}")
    return _report(check_symplectic_morita(alpha, beta, phi, f, g, args.n))


def cmd_descent(args, b: Bundle):
    from .descent import verify_hypercover_descent

    f = b.pick("maps", args.map)
    rep = check_hypercover(f, args.n)
    if not rep.passed:
        return _report(rep)
    if f.max_level < args.degrees + 1 - args.k:
        raise InsufficientLevels(f"degree {args.degrees} needs levels through {args.degrees + 1 - args.k}")
    return _report(verify_hypercover_descent(f, args.n, args.k, args.weight, args.degrees, check=False))


# ---------------------------------------------------------------------
# selftest


def _selftest_cases(corrupt: bool):
    from . import fixtures
    from .descent import check_homotopy_rows, verify_hypercover_descent, verify_nerve_descent
    from .exactla import RatMatrix
    from .symplectic import one_shifted_criterion
    from .tangent import check_quasi_iso

    def parsed(raw: dict) -> Bundle:
        # every case goes through the same JSON round trip as the command line
        return build(merge_raw([("<fixture>", json.loads(json.dumps(raw)))]))

    def pair():
        raw = fixtures.pair_groupoid()
        if corrupt:
            raw["models"]["X"]["face"]["2,1"][0][0] = "7"
        return check_lie_n_groupoid(parsed(raw).models["X"], 1).passed

    def vector_spaces():
        for d in (1, 2, 3):
            b = parsed(fixtures.symplectic_vector_space(d))
            if not check_shifted_symplectic(b.forms["omega"], 0).passed:
                return False
        rep = check_shifted_symplectic(parsed(fixtures.symplectic_vector_space(degenerate=True)).forms["omega"], 0)
        return not rep.passed and rep.message == "degenerate pairing at l = 0, rank 0 of 2"

    def one_shifted():
        b = parsed(fixtures.one_shifted_model())
        alpha = b.forms["alpha"]
        rep = check_shifted_symplectic(alpha, 1)
        return rep.passed and one_shifted_criterion(RatMatrix.from_rows([[0]]), alpha.top().gram())

    def hypercover():
        f = parsed(fixtures.acyclic_hypercover()).maps["f"]
        return check_hypercover(f, 1).passed and check_quasi_iso(f, 1).passed

    def descent():
        f = parsed(fixtures.acyclic_hypercover()).maps["f"]
        surj = RatMatrix.from_rows([[1, 0]])
        return (verify_hypercover_descent(f, 1, k=2, W=2, N=2).passed
                and verify_nerve_descent(surj, k=0, W=2, N=2).passed
                and check_homotopy_rows(surj, up_to=2, W=2).passed)

    def transfer():
        b = parsed(fixtures.strict_zigzag())
        res = transfer_symplectic(b.maps["g"], b.maps["h"], b.forms["alpha"], 1)
        return res.verification.passed

    return [("pair groupoid is a Lie 1-groupoid", pair),
            ("symplectic vector spaces", vector_spaces),
            ("1-shifted linear model", one_shifted),
            ("acyclic-factor hypercover", hypercover),
            ("descent suite", descent),
            ("strict zig-zag transfer", transfer)]


def run_selftest(corrupt: bool = False) -> tuple[dict, bool]:
    results = []
    for name, case in _selftest_cases(corrupt):
        try:
            ok, msg = bool(case()), ""
        except (ShiftsymError, InputError) as exc:
            ok, msg = False, f"{type(exc).__name__}: {exc}"
        entry = {"case": name, "ok": ok}
        if msg:
            entry["message"] = msg
        results.append(entry)
    passed = sum(e["ok"] for e in results)
    out = {"check": "selftest", "passed": passed == len(results), "cases": results,
           "counts": {"passed": passed, "total": len(results)}}
    return out, out["passed"]


# ---------------------------------------------------------------------
# rendering and dispatch


def render_text(report: dict) -> str:
    lines = [f"{report.get('check', '?')}: {'PASS' if report.get('passed') else 'FAIL'}"]
    if report.get("message"):
        lines.append(f"  {report['message']}")
    for e in report.get("entries", []) + report.get("cases", []):
        lines.append("  - " + ", ".join(f"{k}={_short(v)}" for k, v in e.items()))
    if "counts" in report:
        c = report["counts"]
        lines.append(f"{c['passed']}/{c['total']} cases passed")
    for key in ("dims", "homology", "dim", "per_weight", "weights"):
        if key in report:
            lines.append(f"  {key}: {_short(report[key])}")
    return "\n".join(lines) + "\n"


def _short(v) -> str:
    return json.dumps(v, sort_keys=True, separators=(",", ":")) if isinstance(v, (dict, list)) else str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return render_text(report)


COMMANDS = {
    "validate": (cmd_validate, "parse models, maps and forms and check the simplicial identities"),
    "check-ngpd": (cmd_check_ngpd, "Kan and unique-filling conditions of a Lie n-groupoid"),
    "check-hypercover": (cmd_check_hypercover, "matching-map conditions of a hypercover"),
    "tangent": (cmd_tangent, "tangent complex, its homology and the two-route comparison"),
    "cohomology": (cmd_cohomology, "truncated total cohomology of the form complex"),
    "check-symplectic": (cmd_check_symplectic, "closed, normalized and non-degenerate"),
    "transfer": (cmd_transfer, "transfer a symplectic form along a zig-zag of hypercovers"),
    "verify-sme": (cmd_verify_sme, "check a symplectic Morita equivalence"),
    "descent": (cmd_descent, "compare truncated cohomology along a hypercover"),
    "selftest": (None, "run the built-in example battery"),
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--output", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="shiftsym", description="Exact checks for shifted symplectic linear models.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, parents=[common])
        if name == "selftest":
            sp.add_argument("--json", action="store_true", help="same as --format json")
            sp.add_argument("--corrupt-fixture", action="store_true", help=argparse.SUPPRESS)
            continue
        sp.add_argument("inputs", nargs="+", help="JSON files; their models, maps and forms share one namespace")
        if name != "validate":
            sp.add_argument("--n", type=int, required=name not in ("cohomology",), help="groupoid level n")
            sp.add_argument("--k", type=int, default=2, help="form truncation (default 2)")
        if name in ("check-symplectic", "transfer"):
            sp.add_argument("--m", type=int, help="expected shift of the form")
        if name in ("cohomology", "descent", "transfer"):
            sp.add_argument("--weight", type=int, default=None if name == "transfer" else 3,
                            help="polynomial weight bound W")
        if name in ("cohomology", "descent"):
            sp.add_argument("--degrees", type=int, default=3, help="top total degree N")
        if name in ("check-ngpd", "tangent", "cohomology"):
            sp.add_argument("--model")
        if name in ("check-hypercover", "descent"):
            sp.add_argument("--map")
        if name in ("check-symplectic", "transfer"):
            sp.add_argument("--form")
        if name == "transfer":
            sp.add_argument("--g", help="hypercover Z -> X carrying the form")
            sp.add_argument("--h", help="hypercover Z -> Y receiving the form")
        if name == "verify-sme":
            for flag in ("f", "g", "alpha", "beta", "phi"):
                sp.add_argument(f"--{flag}")
    return p


def _check_params(args) -> None:
    for key in ("n", "k", "weight", "degrees", "m"):
        v = getattr(args, key, None)
        if v is not None and v < 0:
            raise InputError(f"--{key} must be non-negative")
    if getattr(args, "weight", None) is not None and args.weight < getattr(args, "k", 0):
        raise InputError("--weight must be at least --k")
    if args.command == "verify-sme":
        missing = [f for f in ("f", "g", "alpha", "beta") if getattr(args, f) is None]
        if missing:
            raise InputError(f"verify-sme needs --{', --'.join(missing)}")


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit_forms(report: dict, output: str | None) -> None:
    """Write β and φ next to the report as loadable form bundles."""
    if output is None or not report.get("beta"):
        return
    stem = Path(output).with_suffix("")
    for key in ("beta", "phi"):
        if report.get(key) is not None:
            doc = {"forms": {key: report[key]}}
            Path(f"{stem}.{key}.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def run(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    fmt = "json" if getattr(args, "json", False) else args.format
    try:
        _check_params(args)
        if args.command == "selftest":
            report, ok = run_selftest(corrupt=args.corrupt_fixture)
        else:
            bundle = load(args.inputs, strict=args.command != "validate")
            report, ok = COMMANDS[args.command][0](args, bundle)
    except (InputError, DimensionMismatch, InsufficientLevels, PreconditionError) as exc:
        sys.stderr.write(f"shiftsym {args.command}: error: {exc}\n")
        return EXIT_INPUT
    text = render(report, fmt)
    _write(text, args.output)
    if args.command == "transfer":
        _emit_forms(report, args.output)
    return EXIT_OK if ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
