"""The ``tdk`` command line.

Exit codes: 0 when every check passes (or the command only computes),
1 when a check fails (the report is still written), 2 for bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .diffcochain import (
    NotTrivialisable,
    curvature,
    dcheck,
    diff_cohomology,
    exact_sequences,
    geometric_trivialisation,
    is_cocycle,
    pair_check,
    topological_trivialisation,
)
from .expr import ExpressionError
from .fixtures import (
    FIXTURES,
    ComplexData,
    PairData,
    SchemaError,
    emit_fixture,
    load_document,
    validate_document,
)
from .fourier import is_geometrically_invariant
from .hori import ModelError, TDualityModel, hori_transform
from .poincare import (
    EquivariantLineBundle,
    check_equivariance,
    cs_difference,
    curvature as bundle_curvature,
    fixed_obstruction_check,
    holonomy,
    random_rectilinear_loop,
    stokes_check,
)
from .rng import LCG
from .serialize import SCHEMA_ID, encode_number, lattice_from_rank
from .simplicial import LATTICE, cohomology
from .suite import FAIL, INFEASIBLE, MEASURED, PASS, Check, run_suite

__all__ = ["main", "build_parser", "InputError"]


class InputError(Exception):
    """Bad command line input; reported on stderr with exit code 2."""


# -- input --------------------------------------------------------------------


def _read_input(args):
    if args.input and args.fixture:
        raise InputError("give either --in or --fixture, not both")
    if args.fixture:
        if args.fixture not in FIXTURES:
            raise InputError(f"unknown fixture {args.fixture!r}; known: {', '.join(FIXTURES)}")
        return emit_fixture(args.fixture)
    if args.input:
        try:
            text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.input}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    return None


def _load(doc, kinds):
    if doc is None:
        raise InputError("this command needs --in FILE or --fixture NAME")
    value = load_document(doc)
    if doc["kind"] not in kinds:
        raise InputError(f"expected a document of kind {' or '.join(kinds)}, got {doc['kind']!r}")
    return value


# -- commands -----------------------------------------------------------------


def _cmd_complex(args, doc):
    value = _load(doc, ("complex", "diff"))
    checks: list[Check] = []
    results: dict = {}
    if isinstance(value, ComplexData):
        X = value.complex
        L = lattice_from_rank(value.lattice_rank)
        results["dimension"] = X.dimension
        results["f_vector"] = [X.count(p) for p in range(X.dimension + 1)]
        results["cohomology"] = {f"H{p}": str(cohomology(X, p, LATTICE, L)) for p in range(X.dimension + 1)}
        diff = {}
        for p in range(1, X.dimension + 2):
            r = exact_sequences(X, p, L)
            diff[f"H{p}"] = r["direct"].to_json()
            checks.append(Check(f"exact-sequences.H{p}", PASS if r["consistent"] else FAIL, {
                "direct": str(r["direct"]),
                "via_curvature_sequence": str(r["via_curvature_sequence"]),
                "via_characteristic_sequence": str(r["via_characteristic_sequence"]),
            }))
        results["differential_cohomology"] = diff
        return checks, results
    x = value.cochain
    X = value.complex
    results["bidegree"] = [x.p, x.q]
    results["cocycle"] = is_cocycle(x)
    dd = dcheck(dcheck(x))
    checks.append(Check("dd-zero", PASS if dd.is_zero() else FAIL, {}))
    if results["cocycle"] and x.p == x.q:
        results["curvature"] = [encode_number(v) for v in curvature(x).values]
        results["characteristic"] = [encode_number(v) for v in x.c.values]
        try:
            g = geometric_trivialisation(x)
            results["geometric_trivialisation"] = {"c": [encode_number(v) for v in g.witness.c.values],
                                                   "h": [encode_number(v) for v in g.witness.h.values]}
        except NotTrivialisable as exc:
            results["geometric_trivialisation"] = {"reason": exc.reason}
        try:
            w = topological_trivialisation(x)
            results["topological_trivialisation"] = {"c": [encode_number(v) for v in w.c.values],
                                                     "h": [encode_number(v) for v in w.h.values]}
        except NotTrivialisable as exc:
            results["topological_trivialisation"] = {
                "reason": exc.reason,
                "certificate": [encode_number(v) for v in (exc.certificate or ())]}
        results["group"] = str(diff_cohomology(X, x.p, x.lattice))
    return checks, results


def _cmd_pair(args, doc):
    d: PairData = _load(doc, ("pair",))
    rep = pair_check(d.P, d.Phat, d.sigma)
    w = {"char_cup_vanishes": rep.char_cup_vanishes}
    if rep.reason:
        w["reason"] = rep.reason
    results = {"sigma_supplied": d.sigma is not None}
    if rep.sigma is not None:
        results["sigma"] = {"c": [encode_number(v) for v in rep.sigma.c.values],
                            "h": [encode_number(v) for v in rep.sigma.h.values]}
    return [Check("pair-valid", PASS if rep.valid else FAIL, w)], results


def _cmd_hori(args, doc):
    M: TDualityModel = _load(doc, ("model",))
    forms = list(args.form or [])
    if not forms:
        if "forms" in doc:
            forms = list(doc["forms"])
        elif "form" in doc:
            forms = [doc["form"]]
        else:
            forms = ["1"]
    out = []
    for f in forms:
        try:
            out.append({"input": f, "output": str(hori_transform(M, f))})
        except (ExpressionError, ValueError, KeyError) as exc:
            raise InputError(f"cannot transform {f!r}: {exc}") from None
    res = M.lemma_identity_residual()
    checks = [Check("lemma-identity", PASS if res.is_zero() else FAIL, {"residual": str(res)})]
    return checks, {"model": M.name or "", "k": M.k, "transforms": out}


def _cmd_poincare(args, doc):
    L: EquivariantLineBundle = _load(doc, ("bundle",))
    checks = []
    rep = L.cocycle_report()
    checks.append(Check("cocycle", PASS if rep["cocycle"] and rep["generators_commute"] else FAIL, rep))
    eq = check_equivariance(L)
    checks.append(Check("equivariance", PASS if eq.passed else FAIL, eq.to_json()))
    F = bundle_curvature(L)
    checks.append(Check("curvature-invariant", PASS if is_geometrically_invariant(F) else FAIL, {"curvature": str(F)}))
    constant_curvature = is_geometrically_invariant(F)
    if constant_curvature:
        rng = LCG(args.seed)
        bad = None
        loops = args.reps if args.reps is not None else 20
        for _ in range(loops):
            loop = random_rectilinear_loop(rng)
            r = stokes_check(L, loop)
            if not r["passed"]:
                bad = {"loop": [[encode_number(a), encode_number(b)] for a, b in loop],
                       "holonomy": encode_number(r["holonomy"]), "expected": encode_number(r["expected"])}
                break
        w = {"loops": loops}
        if bad:
            w["counterexample"] = bad
        checks.append(Check("stokes", PASS if bad is None else FAIL, w))
    cutoff = args.cutoff if args.cutoff is not None else int(doc.get("cutoff", 3))
    Ns = [int(doc["N"])] if "N" in doc else [2, 3, 4]
    for N in Ns:
        r = fixed_obstruction_check(L, N, cutoff)
        status = PASS if r.feasible else INFEASIBLE
        checks.append(Check(f"obstruction.N{N}", status, {
            "cutoff": cutoff, "feasible": r.feasible, "certificate": r.certificate, "solution": r.solution}))
    results = {"curvature": str(F), "connection": str(L.A), "phase_exponent": L.phase_text}
    if eq.passed:
        third = Fraction(1, 3)
        results["holonomy"] = {
            "theta2-loop at theta1=0": str(holonomy(L, [(0, 0), (0, 1)])),
            "theta2-loop at theta1=1/3": str(holonomy(L, [(third, 0), (third, 1)])),
            "unit square": str(holonomy(L, [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)])),
        }
    results["cs_difference"] = {"t=1/2": str(cs_difference(L, Fraction(1, 2))), "t=1": str(cs_difference(L, 1))}
    return checks, results


def _cmd_verify(args, doc):
    seed, reps, cutoff = 7, 200, 3
    if doc is not None:
        validate_document(doc)
        if doc["kind"] != "verify-all":
            raise InputError("verify takes a document of kind verify-all")
        seed, reps, cutoff = doc.get("seed", seed), doc.get("reps", reps), doc.get("cutoff", cutoff)
    seed = args.seed if args.seed is not None else seed
    reps = args.reps if args.reps is not None else reps
    cutoff = args.cutoff if args.cutoff is not None else cutoff
    if reps < 1:
        raise InputError("--reps must be positive")
    args.seed, args.reps, args.cutoff = seed, reps, cutoff
    return run_suite(seed, reps, cutoff), {}


COMMANDS = {
    "complex": _cmd_complex,
    "pair": _cmd_pair,
    "hori": _cmd_hori,
    "poincare": _cmd_poincare,
    "verify": _cmd_verify,
}


# -- reports ------------------------------------------------------------------


def _report_paths(args, scenario: str):
    if args.out:
        json_path = Path(args.out)
    else:
        json_path = Path(f"{scenario}.report.json")
    env = os.environ.get("TDK_REPORT_DIR")
    if env:
        json_path = Path(env) / json_path.name
    txt_path = json_path.with_name(json_path.name[:-5] + ".txt") if json_path.name.endswith(".json") \
        else json_path.with_name(json_path.name + ".txt")
    return json_path, txt_path


def _short(w: dict) -> str:
    text = json.dumps(w, sort_keys=True, ensure_ascii=False)
    return text if len(text) <= 100 else text[:97] + "..."


def _text_report(report: dict) -> str:
    lines = [f"tdk {report['command']}: {report['scenario']}  [{report['status']}]"]
    for key in ("seed", "reps", "cutoff"):
        if report.get(key) is not None:
            lines.append(f"  {key}: {report[key]}")
    for c in report["checks"]:
        lines.append(f"  {c['status'].upper():<10} {c['name']}  {_short(c['witness'])}")
    for key, value in report.get("results", {}).items():
        lines.append(f"  {key}: {json.dumps(value, sort_keys=True, ensure_ascii=False)}")
    counts = report["summary"]
    lines.append("  summary: " + ", ".join(f"{k} {counts[k]}" for k in sorted(counts)))
    return "\n".join(lines) + "\n"


def _write_report(args, scenario: str, checks, results, elapsed=None) -> dict:
    checks = sorted(checks, key=lambda c: c.name)
    summary = {s: sum(1 for c in checks if c.status == s) for s in (PASS, FAIL, INFEASIBLE, MEASURED)}
    report = {
        "schema": SCHEMA_ID,
        "command": args.command,
        "scenario": scenario,
        "status": FAIL if summary[FAIL] else PASS,
        "checks": [c.to_json() for c in checks],
        "summary": summary,
    }
    if args.command in ("verify", "poincare"):
        report["seed"] = args.seed
    if args.command == "verify":
        report["reps"], report["cutoff"] = args.reps, args.cutoff
    if results:
        report["results"] = results
    if elapsed is not None:
        report["timing_seconds"] = round(elapsed, 3)
    json_path, txt_path = _report_paths(args, scenario)
    json_path.parent.mkdir(parents=True, exist_ok=True)
    json_path.write_text(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    text = _text_report(report)
    txt_path.write_text(text, encoding="utf-8")
    if not args.quiet:
        sys.stdout.write(text)
    return report


def _cmd_fixture(args) -> int:
    if not args.fixture:
        raise InputError("fixture needs --fixture NAME (known: " + ", ".join(FIXTURES) + ")")
    if args.fixture not in FIXTURES:
        raise InputError(f"unknown fixture {args.fixture!r}; known: {', '.join(FIXTURES)}")
    text = json.dumps(emit_fixture(args.fixture), indent=2, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tdk", description="Exact checks for differential T-duality on simplicial and "
                                                       "invariant-form models.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "complex": "cohomology and differential cohomology of a complex, or one differential cochain",
        "pair": "validate a T-duality pair",
        "hori": "apply the Hori transform to forms of a model",
        "verify": "run the full property suite on the built-in fixtures",
        "poincare": "curvature, holonomy, Chern-Simons and obstruction reports for a line bundle",
        "fixture": "print a built-in fixture document",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text, description=text)
        s.add_argument("--in", dest="input", metavar="FILE", help="JSON document ('-' for stdin)")
        s.add_argument("--out", metavar="FILE", help="report path (fixture: output path)")
        s.add_argument("--seed", type=int, default=None, help="seed for randomised sweeps")
        s.add_argument("--reps", type=int, default=None, help="repetitions for randomised sweeps")
        s.add_argument("--cutoff", type=int, default=None, help="Fourier mode cutoff")
        s.add_argument("--fixture", metavar="NAME", help="use a built-in fixture as input")
        s.add_argument("--form", action="append", help="form to transform (hori; repeatable)")
        s.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
        s.add_argument("--quiet", "-q", action="store_true", help="do not echo the text report")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fixture":
            return _cmd_fixture(args)
        if args.command == "poincare" and args.seed is None:
            args.seed = 7
        doc = _read_input(args)
        start = time.perf_counter()
        checks, results = COMMANDS[args.command](args, doc)
        elapsed = time.perf_counter() - start if args.timing else None
        scenario = (doc or {}).get("name") or args.fixture or args.command
        report = _write_report(args, scenario, checks, results, elapsed)
    except (InputError, SchemaError, ModelError, ExpressionError) as exc:
        print(f"tdk: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"tdk: error: {exc}", file=sys.stderr)
        return 2
    return 1 if report["status"] == FAIL else 0


if __name__ == "__main__":
    sys.exit(main())
