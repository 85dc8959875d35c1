"""Command-line interface.

Exit codes: 0 every identity held, 1 a residual was nonzero (or an entity
failed validation), 2 the input file did not parse, 3 invalid usage.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from itertools import combinations
from typing import List, Optional, Sequence

from .algebroid import ChartAlgebroid, prolongation_of, validate, validate_morphism
from .cohomology import CEComplex
from .dsl import DSLError, SpecFile, load, parse_section
from .errors import (
    AlgebroidKitError,
    EndpointError,
    InvalidAlgebroid,
    InvalidMorphism,
)
from .forms import Dr, RLinearForm, TensorForm, d, pullback, wedge
from .fuzz import SUITES, TrialConfig, report_json, report_text, run_suite
from .homotopy import Homotopy, chain_operator, verify_chain
from .simplex import fiber_integrate, stokes_residual

OK, RESIDUAL, PARSE, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def form_text(w) -> str:
    if isinstance(w, TensorForm):
        return "0" if w.is_zero() else str(w)
    if isinstance(w, RLinearForm):
        return w.to_text()
    return str(w)


class Output:
    def __init__(self, as_json: bool, command: str, stream):
        self.as_json = as_json
        self.stream = stream
        self.data = {"schema": 1, "command": command}
        self.lines: List[str] = []

    def say(self, line: str = ""):
        self.lines.append(line)

    def put(self, **kw):
        self.data.update(kw)

    def flush(self):
        if self.as_json:
            self.stream.write(json.dumps(self.data, indent=2, sort_keys=True) + "\n")
        else:
            self.stream.write("".join(l + "\n" for l in self.lines))


def _load(path: str) -> SpecFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    try:
        return load(text)
    except DSLError as exc:
        exc.filename = path
        raise


def _entity(spec: SpecFile, name: str, *kinds: str):
    try:
        return spec.get(name, kinds or None).value
    except KeyError as exc:
        msg = exc.args[0] if exc.args and exc.args[0] != name else f"no entity named {name!r}"
        raise UsageError(msg)


def _form(spec: SpecFile, name: str):
    return _entity(spec, name, "form", "rform")


# -- commands ------------------------------------------------------------------

def cmd_check(args, out: Output) -> int:
    spec = _load(args.file)
    status = OK
    items = []
    for e in spec.entries:
        if e.kind == "algebroid":
            rep = validate(e.value)
        elif e.kind in ("morphism", "homotopy"):
            rep = validate_morphism(e.value)
            if rep.ok and e.kind == "homotopy":
                try:
                    Homotopy(e.value)
                except EndpointError as exc:
                    out.say(f"{e.kind} {e.name} ({e.span}): endpoint failure: {exc}")
                    items.append({"name": e.name, "kind": e.kind, "ok": False,
                                  "violations": [str(exc)]})
                    status = RESIDUAL
                    continue
        else:
            out.say(f"{e.kind} {e.name}: ok")
            items.append({"name": e.name, "kind": e.kind, "ok": True, "violations": []})
            continue
        if rep.ok:
            out.say(f"{e.kind} {e.name}: ok")
        else:
            status = RESIDUAL
            out.say(f"{e.kind} {e.name} ({e.span}): {len(rep)} violation(s)")
            for v in rep:
                out.say(f"  {v}")
        items.append({"name": e.name, "kind": e.kind, "ok": rep.ok,
                      "violations": [{"kind": v.kind, "indices": list(v.indices),
                                      "residual": str(v.residual)} for v in rep]})
    out.put(ok=status == OK, entities=items)
    return status


def cmd_d(args, out: Output) -> int:
    spec = _load(args.file)
    w = _form(spec, args.form)
    res = Dr(w) if isinstance(w, RLinearForm) else d(w)
    out.say(form_text(res))
    out.put(ok=True, degree=res.degree, result=form_text(res))
    return OK


def cmd_wedge(args, out: Output) -> int:
    spec = _load(args.file)
    a, b = _entity(spec, args.f, "form"), _entity(spec, args.g, "form")
    res = wedge(a, b)
    out.say(form_text(res))
    out.put(ok=True, degree=res.degree, result=form_text(res))
    return OK


def cmd_pullback(args, out: Output) -> int:
    spec = _load(args.file)
    phi = _entity(spec, args.morphism, "morphism", "homotopy")
    eta = _entity(spec, args.form, "form")
    res = pullback(phi, eta)
    # Phi^* commutes with d
    gap = pullback(phi, d(eta)) - d(res)
    out.say(form_text(res))
    out.say(f"commutes with d: {'yes' if gap.is_zero() else 'NO, residual ' + form_text(gap)}")
    out.put(ok=gap.is_zero(), degree=res.degree, result=form_text(res), residual=form_text(gap))
    return OK if gap.is_zero() else RESIDUAL


def cmd_integrate(args, out: Output) -> int:
    spec = _load(args.file)
    w = _form(spec, args.form)
    res = fiber_integrate(args.k, w, _quiet=True)
    out.say(form_text(res))
    out.put(ok=True, degree=res.degree, result=form_text(res))
    return OK


def _section_tuples(A: ChartAlgebroid, m: int, given: Optional[Sequence[str]]):
    if given is not None:
        if len(given) != m:
            raise UsageError(f"need {m} sections, got {len(given)}")
        try:
            return [tuple(parse_section(s, A) for s in given)]
        except DSLError as exc:
            raise UsageError(f"bad section: {exc.message} at column {exc.span.col}")
    return [tuple(A.frame_section(i) for i in idx) for idx in combinations(range(A.rank), m)]


def cmd_stokes(args, out: Output) -> int:
    spec = _load(args.file)
    w = _form(spec, args.form)
    if isinstance(w, TensorForm):
        rep = stokes_residual(args.k, w)
        out.say(f"stokes k={args.k} form={args.form} degree={w.degree}")
        for key in ("integral_of_d", "d_of_integral", "face_sum", "residual"):
            out.say(f"{key}: {form_text(getattr(rep, key))}")
        out.put(ok=rep.ok, k=args.k, form=args.form,
                **{key: form_text(getattr(rep, key))
                   for key in ("integral_of_d", "d_of_integral", "face_sum", "residual")})
        return OK if rep.ok else RESIDUAL
    _, A = prolongation_of(w.owner)
    m = w.degree - args.k + 1
    if m < 0:
        raise UsageError(f"degree {w.degree} is below k - 1 = {args.k - 1}")
    ok = True
    checks = []
    out.say(f"stokes k={args.k} rform={args.form} degree={w.degree}")
    for secs in _section_tuples(A, m, args.sections):
        rep = stokes_residual(args.k, w, secs)
        ok &= rep.ok
        label = "(" + ", ".join(str(s) for s in secs) + ")"
        out.say(f"on {label}: residual {rep.residual}")
        checks.append({"sections": [str(s) for s in secs], "residual": str(rep.residual),
                       "integral_of_d": str(rep.integral_of_d),
                       "d_of_integral": str(rep.d_of_integral), "face_sum": str(rep.face_sum)})
    out.say(f"residual: {'0' if ok else 'nonzero'}")
    out.put(ok=ok, k=args.k, form=args.form, checks=checks)
    return OK if ok else RESIDUAL


def cmd_homotopy(args, out: Output) -> int:
    spec = _load(args.file)
    phi = _entity(spec, args.homotopy, "homotopy", "morphism")
    H = Homotopy(phi, name=args.homotopy)
    B = H.target
    if args.form:
        forms = [(args.form, _entity(spec, args.form, "form"))]
    else:
        forms = [(e.name, e.value) for e in spec.entries
                 if e.kind == "form" and e.value.owner == B]
        for n in range(B.rank + 1):
            for idx in combinations(range(B.rank), n):
                label = "eps(" + ",".join(B.frames[i] for i in idx) + ")"
                forms.append((label, TensorForm(B, n, {idx: 1})))
    out.say(f"homotopy {args.homotopy}: {H.source.label} -> {B.label}")
    out.say(f"  Phi_0 fiber: {_matrix_text(H.phi0)}")
    out.say(f"  Phi_1 fiber: {_matrix_text(H.phi1)}")
    ok = True
    checks = []
    for label, eta in forms:
        res = verify_chain(H, eta)
        h = chain_operator(H, eta)
        ok &= res.is_zero()
        out.say(f"{label}: h = {form_text(h)}; residual {form_text(res)}")
        checks.append({"form": label, "h": form_text(h), "residual": form_text(res)})
    out.put(ok=ok, homotopy=args.homotopy, checks=checks)
    return OK if ok else RESIDUAL


def _matrix_text(phi) -> str:
    return "[" + "; ".join(", ".join(str(p) for p in row) for row in phi.fiber) + "]"


def cmd_betti(args, out: Output) -> int:
    spec = _load(args.file)
    g = _entity(spec, args.algebroid, "algebroid")
    cx = CEComplex.of(g)
    b = cx.betti()
    out.say(str(b))
    out.put(ok=True, algebroid=args.algebroid, betti=list(b), matrices=cx.to_json())
    return OK


def cmd_fuzz(args, out: Output) -> int:
    try:
        cfg = TrialConfig(seed=args.seed, trials=args.trials, max_poly_degree=args.max_degree,
                          max_form_degree=args.max_form_degree, max_depth=args.depth,
                          k_min=args.k_min, k_max=args.k_max)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.threads < 1:
        raise UsageError("--threads must be positive")
    results = run_suite(args.suite, cfg, threads=args.threads)
    if out.as_json:
        out.data = report_json(args.suite, cfg, results)
    else:
        out.lines.extend(report_text(args.suite, cfg, results).splitlines())
    return OK if all(r.ok for r in results) else RESIDUAL


# -- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    p = _Parser(prog="algebroidkit", parents=[common],
                description="Exact calculus on Lie algebroids over polynomial charts.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    def add(name, fn, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("check", cmd_check, "validate every declaration of a file")
    sp.add_argument("file")
    sp = add("d", cmd_d, "exterior derivative of a form")
    sp.add_argument("file")
    sp.add_argument("form")
    sp = add("wedge", cmd_wedge, "wedge product of two forms")
    sp.add_argument("file")
    sp.add_argument("f")
    sp.add_argument("g")
    sp = add("pullback", cmd_pullback, "pull a form back along a morphism")
    sp.add_argument("file")
    sp.add_argument("morphism")
    sp.add_argument("form")
    sp = add("integrate", cmd_integrate, "fiber integral over the standard k-simplex")
    sp.add_argument("file")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("form")
    sp = add("stokes", cmd_stokes, "check the Stokes identity for a form on prolong(k, A)")
    sp.add_argument("file")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("form")
    sp.add_argument("--sections", nargs="+", metavar="SECTION",
                    help="sections of A such as 'x*e1 - e2' (R-linear forms only)")
    sp = add("homotopy-check", cmd_homotopy, "check the chain homotopy identity")
    sp.add_argument("file")
    sp.add_argument("homotopy")
    sp.add_argument("form", nargs="?")
    sp = add("betti", cmd_betti, "Betti numbers of an algebroid over a point")
    sp.add_argument("file")
    sp.add_argument("algebroid")
    sp = add("fuzz", cmd_fuzz, "seeded randomized identity checks over bundled algebroids")
    sp.add_argument("--suite", choices=SUITES, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--max-degree", type=int, default=3, help="polynomial degree bound")
    sp.add_argument("--max-form-degree", type=int, default=4)
    sp.add_argument("--depth", type=int, default=3, help="R-linear tree depth bound")
    sp.add_argument("--k-min", type=int, default=1)
    sp.add_argument("--k-max", type=int, default=3)
    return p


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return USAGE
    except SystemExit as exc:          # --help
        return OK if not exc.code else USAGE
    if not getattr(args, "fn", None):
        stderr.write(parser.format_usage())
        return USAGE
    as_json = getattr(args, "json", False)
    out = Output(as_json, args.command, stdout)
    try:
        code = args.fn(args, out)
    except DSLError as exc:
        stderr.write(exc.render(getattr(exc, "filename", "<input>")) + "\n")
        if as_json:
            stdout.write(json.dumps({"schema": 1, "command": args.command, "ok": False,
                                     "error": {"message": exc.message, "line": exc.span.line,
                                               "column": exc.span.col,
                                               "expected": list(exc.expected)}},
                                    indent=2, sort_keys=True) + "\n")
        return PARSE
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return USAGE
    except (InvalidAlgebroid, InvalidMorphism, EndpointError) as exc:
        out.say(f"invalid: {exc}")
        out.put(ok=False, error=str(exc))
        out.flush()
        return RESIDUAL
    except AlgebroidKitError as exc:
        stderr.write(f"usage error: {type(exc).__name__}: {exc}\n")
        return USAGE
    out.flush()
    return code


def run_command(argv: Sequence[str]) -> tuple:
    """(exit code, stdout text, stderr text) of one invocation."""
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
