"""Command line entry point: ``spweyl <command> [options]``.

Every command prints one JSON report (sorted keys).  Exit status is 0 when
all checks pass, 1 when a check fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Callable

from . import sp2n
from .linalg import rank
from .polyalg import MultiPoly, parse_poly
from .repmodules import (
    PolyModule,
    check_module_axioms,
    mb_module,
    nilsson_module,
    simplicity_closure,
    weil_module,
)
from .scalars import ScalarParseError, format_scalar, parse_scalar_list
from .thetamap import (
    ClassificationError,
    GeneratorImages,
    ShapeViolation,
    build_theta,
    check_homomorphism,
    classify,
    verify_power_identities,
)
from .weighting import NotRankOne, check_eq33_compatibility, weighting_support
from .whittaker import NotNilpotentError, TruncationError, WhittakerType, local_nilpotency, whittaker_vectors

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


class Report:
    def __init__(self, command: str, parameters: dict) -> None:
        self.command = command
        self.parameters = parameters
        self.checks: list[dict] = []
        self.data: dict = {}

    def check(self, name: str, ok: bool, counterexample=None) -> None:
        entry = {"name": name, "status": "pass" if ok else "fail"}
        if not ok:
            entry["counterexample"] = counterexample
        self.checks.append(entry)

    @property
    def status(self) -> str:
        if any(c["status"] == "error" for c in self.checks):
            return "error"
        return "fail" if any(c["status"] == "fail" for c in self.checks) else "pass"

    def to_dict(self) -> dict:
        out = {"command": self.command, "parameters": self.parameters, "checks": self.checks, "status": self.status}
        out.update(self.data)
        return out


# ---------------------------------------------------------------------------
# argument helpers


def _rank(n: int) -> int:
    if n < 2:
        raise UsageError("n must be at least 2")
    return n


def _poly(text: str | None, n: int) -> MultiPoly:
    return MultiPoly.zero(n) if text in (None, "") else parse_poly(text, n)


def _module(args) -> PolyModule:
    n = _rank(args.n)
    if args.module == "nilsson":
        return nilsson_module(n)
    if args.module == "mb":
        b = parse_scalar_list(args.b) if args.b else [1] * n
        if len(b) != n:
            raise UsageError(f"--b needs {n} values")
        return mb_module(n, b)
    return weil_module(n, _poly(args.f, n))


def _module_params(args) -> dict:
    p = {"module": args.module, "n": args.n}
    if args.module == "mb":
        p["b"] = args.b or ",".join(["1"] * args.n)
    if args.module == "weil":
        p["f"] = args.f or "0"
    return p


# ---------------------------------------------------------------------------
# commands


def cmd_verify_brackets(args) -> Report:
    n = args.n
    if not 2 <= n <= 4:
        raise UsageError("verify-brackets needs 2 <= n <= 4")
    rep = Report("verify-brackets", {"n": n})
    eq1 = sp2n.verify_eq1_suite(n)
    rep.check("eq1", eq1.passed, [list(m) for m in eq1.mismatches[:5]])
    triples = None if n == 2 else sp2n.sample_triples(n, 400, seed=args.seed)
    bad = sp2n.jacobi_violations(n, triples)
    rep.check("jacobi", not bad, [[b.label for b in t] for t in bad[:5]])
    nonsym = [b.label for b in sp2n.basis(n) if not sp2n.realize(b, n).is_symplectic()]
    rep.check("symplectic", not nonsym, nonsym)
    flat = [sp2n.realize(b, n).dense() for b in sp2n.basis(n)]
    r = rank([[x for row in m for x in row] for m in flat])
    rep.check("independent", r == sp2n.dimension(n), {"rank": r})
    rep.data.update({"dim": sp2n.dimension(n), "eq1_instances": eq1.checked, "jacobi_triples": "all" if n == 2 else 400})
    return rep


def _load_images(path: str) -> GeneratorImages:
    try:
        with open(path) as fh:
            data = json.load(fh)
        return GeneratorImages.from_dict(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read generator images from {path}: {exc}") from None


def cmd_check_hom(args) -> Report:
    if args.input:
        g = _load_images(args.input)
        params = {"input": args.input}
    else:
        n = _rank(args.n)
        g = build_theta(n, _poly(args.f, n))
        params = {"n": n, "f": args.f or "0"}
    rep = Report("check-hom", params)
    r = check_homomorphism(g)
    rep.check("homomorphism", r.passed, [{"x": x.label, "y": y.label, "expected": e, "got": o} for x, y, e, o in r.failures[:5]])
    rep.data.update({"pairs_checked": r.pairs_checked, "failures": len(r.failures)})
    return rep


def cmd_classify(args) -> Report:
    g = _load_images(args.input)
    rep = Report("classify", {"input": args.input, "bound": args.bound})
    try:
        c = classify(g, args.bound)
    except ShapeViolation as exc:
        rep.check("shape", False, str(exc))
        return rep
    except ClassificationError as exc:
        rep.check("classification", False, {"reason": exc.reason, "detail": str(exc)})
        return rep
    rep.check("classification", True)
    rep.data.update({"f": str(c.f), "b": format_scalar(c.b)})
    return rep


def cmd_module_axioms(args) -> Report:
    M = _module(args)
    rep = Report("module-axioms", {**_module_params(args), "deg": args.deg})
    r = check_module_axioms(M, args.deg)
    rep.check("axioms", r.passed, r.failures[:5])
    rep.data.update(r.to_dict())
    rep.data["failures"] = r.failures[:20]
    return rep


def cmd_whittaker(args) -> Report:
    M = _module(args)
    if args.a:
        a = WhittakerType.parse(args.a)
    elif M.natural_type is not None:
        a = WhittakerType(M.natural_type)
    else:
        raise UsageError("--a is required for this module")
    rep = Report("whittaker", {**_module_params(args), "a": str(a), "deg": args.deg})
    try:
        wh = whittaker_vectors(M, a, args.deg)
    except TruncationError as exc:
        rep.check("truncation", False, str(exc))
        return rep
    rep.data.update({"dim": wh.dim, "basis": [str(v) for v in wh.basis]})
    try:
        nil = local_nilpotency(M, a, args.deg)
    except NotNilpotentError as exc:
        rep.check("nilpotency", False, str(exc))
        return rep
    rep.check("nilpotency", nil.certified, "index above deg_i(v) + 1")
    rep.data["nilpotency_table"] = nil.to_dict()
    return rep


def cmd_weighting(args) -> Report:
    M = _module(args)
    rep = Report("weighting", {**_module_params(args), "radius": args.radius, "samples": args.samples, "seed": args.seed})
    try:
        support = weighting_support(M, args.radius)
    except NotRankOne as exc:
        raise UsageError(str(exc)) from None
    keys = sorted(support, key=lambda g: tuple((x.re, x.im) for x in g))
    rep.data["support"] = [[format_scalar(x) for x in g] for g in keys]
    rep.data["dims"] = [support[g] for g in keys]
    rep.check("fiber_dims", set(support.values()) <= {1} and len(support) == (2 * args.radius + 1) ** M.n)
    r = check_eq33_compatibility(M, args.samples, seed=args.seed)
    rep.check("eq33", r.passed, r.failures[:5])
    rep.data["eq33"] = "pass" if r.passed else "fail"
    return rep


def cmd_lemma42(args) -> Report:
    n = _rank(args.n)
    if n > 3:
        raise UsageError("lemma42 runs for n <= 3")
    rep = Report("lemma42", {"n": n, "f": args.f or "0", "kmax": args.kmax})
    r = verify_power_identities(n, _poly(args.f, n), args.kmax)
    rep.check("power_identities", r.passed, [list(map(str, x)) for x in r.failures[:5]])
    rep.data["instances"] = r.checked
    return rep


def cmd_simplicity(args) -> Report:
    M = _module(args)
    rep = Report("simplicity", {**_module_params(args), "deg": args.deg})
    r = simplicity_closure(M, args.deg)
    rep.check("lowering", not r.stuck, r.stuck[:5])
    rep.check("generation", not r.missing, r.missing[:5])
    rep.data.update(r.to_dict())
    return rep


COMMANDS: dict[str, Callable] = {
    "verify-brackets": cmd_verify_brackets,
    "check-hom": cmd_check_hom,
    "classify": cmd_classify,
    "module-axioms": cmd_module_axioms,
    "whittaker": cmd_whittaker,
    "weighting": cmd_weighting,
    "lemma42": cmd_lemma42,
    "simplicity": cmd_simplicity,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spweyl", description="Exact checks for sp(2n) inside the Weyl algebra.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
    common.add_argument("--timing", action="store_true", help="add wall_time to the report")
    sub = parser.add_subparsers(dest="command", required=True)

    def module_opts(p: argparse.ArgumentParser, default: str = "mb") -> None:
        p.add_argument("--module", choices=["nilsson", "mb", "weil"], default=default)
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--b", help='comma-separated scalars, e.g. "i,i"')
        p.add_argument("--f", help='polynomial in t1..tn, e.g. "t1*t2"')

    p = sub.add_parser("verify-brackets", parents=[common], help="bracket table, Jacobi and symplectic checks")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("check-hom", parents=[common], help="bracket preservation of theta_f or of an images file")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--f")
    p.add_argument("--input")

    p = sub.add_parser("classify", parents=[common], help="recover f from generator images")
    p.add_argument("--input", required=True)
    p.add_argument("--bound", type=int, default=4)

    p = sub.add_parser("module-axioms", parents=[common], help="representation axioms on a truncation")
    module_opts(p)
    p.add_argument("--deg", type=int, default=5)

    p = sub.add_parser("whittaker", parents=[common], help="Whittaker vectors and local nilpotency")
    module_opts(p)
    p.add_argument("--a", help="Whittaker type, comma-separated")
    p.add_argument("--deg", type=int, default=5)

    p = sub.add_parser("weighting", parents=[common], help="evaluation fibers and bracket compatibility")
    module_opts(p)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("lemma42", parents=[common], help="power-commutator identities under theta_f")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--f")
    p.add_argument("--kmax", type=int, default=4)

    p = sub.add_parser("simplicity", parents=[common], help="desk-scale simplicity certificate")
    module_opts(p)
    p.add_argument("--deg", type=int, default=5)
    return parser


def _pretty(d: dict) -> str:
    lines = [f"{d['command']}: {d['status']}"]
    for k, v in sorted(d["parameters"].items()):
        lines.append(f"  {k} = {v}")
    for c in d["checks"]:
        line = f"  [{c['status']}] {c['name']}"
        if "counterexample" in c:
            line += f"  {json.dumps(c['counterexample'], sort_keys=True)}"
        lines.append(line)
    for k in sorted(d):
        if k not in ("command", "parameters", "checks", "status"):
            lines.append(f"  {k}: {json.dumps(d[k], sort_keys=True)}")
    return "\n".join(lines)


def _emit(d: dict, pretty: bool) -> None:
    print(_pretty(d) if pretty else json.dumps(d, sort_keys=True))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        rep = COMMANDS[args.command](args)
    except (UsageError, ScalarParseError, sp2n.LabelError, ValueError) as exc:
        _emit({"command": args.command, "parameters": {}, "checks": [{"name": "input", "status": "error"}],
               "status": "error", "error": str(exc)}, args.pretty)
        print(f"spweyl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = rep.to_dict()
    if args.timing:
        out["wall_time"] = round(time.perf_counter() - start, 3)
    _emit(out, args.pretty)
    return EXIT_OK if rep.status == "pass" else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
