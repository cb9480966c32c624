"""Command-line front end: ``gaussex eval | check | compose``.

Exit codes: 0 success, 1 user error (diagnostics on stderr), 2 internal
invariant failure or Monte-Carlo disagreement.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import category, dsl, quadratic, serialize, willems
from .category import GaussExMorphism
from .errors import GaussExError, InternalInconsistency
from .extgauss import ExtendedGaussian
from .linalg import default_tolerance

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 1, 2

# Event check threshold, in standard errors.
MC_SIGMAS = 4.0


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_model(path: str, strict: bool = False) -> dsl.Elaborated:
    return dsl.elaborate(dsl.parse(_read(path)), strict_interconnect=strict)


def _report_diagnostics(path: str, diags, stream) -> None:
    for d in diags:
        print(f"{path}:{d}", file=stream)


def model_result(el: dsl.Elaborated, form: str | None = None) -> dict:
    """JSON-ready summary of an elaborated model and its queries."""
    doc = {
        "type": "model_result",
        "inputs": [{"name": n, "dim": el.dim_of(n)} for n in el.inputs],
        "outputs": [{"name": n, "dim": el.dim_of(n)} for n in el.outputs],
        "result": serialize.to_jsonable(el.result),
        "queries": [dsl.run_query(el, q) for q in el.model.queries],
    }
    if form is not None:
        conv = quadratic.precision_form if form == "precision" else quadratic.covariance_form
        doc["form"] = serialize.to_jsonable(conv(el.result.noise))
    if el.diagnostics:
        doc["diagnostics"] = [d.to_dict() for d in el.diagnostics]
    return doc


def _fmt(x) -> str:
    return f"{x:.6g}"


def _pretty_dist(chi: ExtendedGaussian, indent: str = "  ") -> list[str]:
    lines = [f"{indent}dim {chi.dim}, fibre dim {chi.fibre_dim}"]
    if chi.fibre_dim:
        for v in chi.fibre.canonical_basis().T:
            lines.append(f"{indent}fibre   [{', '.join(_fmt(x) for x in v)}]")
    lines.append(f"{indent}mean    [{', '.join(_fmt(x) for x in chi.mean)}]")
    for i, row in enumerate(chi.cov):
        lines.append(f"{indent}{'cov' if i == 0 else '':<8}[{', '.join(_fmt(x) for x in row)}]")
    return lines


def _pretty(el: dsl.Elaborated, doc: dict) -> str:
    out = []
    ins = ", ".join(el.inputs) or "()"
    outs = ", ".join(el.outputs) or "()"
    out.append(f"{ins} -> {outs}")
    if el.inputs:
        for row in el.result.matrix:
            out.append(f"  matrix  [{', '.join(_fmt(x) for x in row)}]")
    out.extend(_pretty_dist(el.result.noise))
    for q in doc["queries"]:
        out.append(q["query"])
        if "probability" in q:
            out.append(f"  P = {q['probability']:.10g}")
        else:
            res = serialize.from_jsonable(q["result"])
            if isinstance(res, ExtendedGaussian):
                out.extend(_pretty_dist(res))
            else:
                out.append(f"  {res!r}")
    if "form" in doc:
        out.append(f"form: {serialize.from_jsonable(doc['form'])!r}")
    return "\n".join(out)


def cmd_eval(args) -> int:
    el = _load_model(args.file, args.strict_interconnect)
    _report_diagnostics(args.file, el.diagnostics, sys.stderr)
    doc = model_result(el, args.form)
    if args.pretty:
        print(_pretty(el, doc))
    else:
        print(serialize.export_json(doc))
    return EXIT_OK


def cmd_check(args) -> int:
    el = _load_model(args.file)
    _report_diagnostics(args.file, el.diagnostics, sys.stderr)
    events = [q for q in el.model.queries if isinstance(q, dsl.Event)]
    if not events:
        print(f"{args.file}: error: model has no event queries to check", file=sys.stderr)
        return EXIT_USER
    if el.inputs:
        print(f"{args.file}: error: check needs a model without inputs", file=sys.stderr)
        return EXIT_USER
    system = willems.GaussianSystem(el.joint.noise)
    rows, worst = [], 0.0
    for q in events:
        ev = dsl.event_of(el, q)
        p = willems.cylinder_probability(system, ev)
        est, _ = willems.mc_estimate(system, ev, args.mc, args.seed, workers=args.workers)
        # analytic SE, floored so exact 0/1 events do not demand exact agreement
        se = max(math.sqrt(p * (1.0 - p) / args.mc), 1.0 / args.mc)
        z = abs(est - p) / se
        worst = max(worst, z)
        rows.append({"event": q.label or dsl.print_expr(q.expr), "analytic": p, "estimate": est, "se": se, "z": z})
    ok = worst <= MC_SIGMAS
    if args.json:
        print(serialize.dumps({"schema": serialize.SCHEMA, "type": "mc_check", "samples": args.mc,
                               "seed": args.seed, "events": rows, "agree": ok}))
    else:
        for r in rows:
            flag = "ok " if r["z"] <= MC_SIGMAS else "BAD"
            print(f"{flag} {r['event']:<30} analytic {r['analytic']:.6f}  mc {r['estimate']:.6f}  z {r['z']:.2f}")
        print(f"{'agree' if ok else 'DISAGREE'}: max |z| = {worst:.2f} over {len(rows)} events")
    return EXIT_OK if ok else EXIT_INTERNAL


def load_morphism(path: str) -> GaussExMorphism:
    """A morphism from a gaussex/1 JSON file or from a model file."""
    if path.endswith(".json"):
        text = _read(path)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise GaussExError(f"{path}: invalid JSON: {err}") from None
        if isinstance(data, dict) and data.get("type") == "model_result":
            data = data["result"]
        else:
            data = serialize.import_json(text)
        value = data if not isinstance(data, dict) else serialize.from_jsonable(data)
        if isinstance(value, ExtendedGaussian):
            return category.state(value)
        if isinstance(value, GaussExMorphism):
            return value
        raise GaussExError(f"{path}: expected a morphism or distribution")
    try:
        return _load_model(path).result
    except GaussExError as err:
        err.path = path
        raise


def cmd_compose(args) -> int:
    f, g = load_morphism(args.f), load_morphism(args.g)
    if f.cod_dim != g.dom_dim:
        raise GaussExError(f"cannot compose {f.dom_dim}->{f.cod_dim} with {g.dom_dim}->{g.cod_dim}")
    direct = category.compose(g, f)
    doc = {"schema": serialize.SCHEMA, "type": "composition", "composite": serialize.to_jsonable(direct)}
    status = EXIT_OK
    if args.via_interconnection:
        tol = default_tolerance().eq
        rep = willems.theorem_check(f, g)
        agree = rep.joint_distance < tol and rep.composite_distance < tol
        doc.update(
            complementary=rep.complementary,
            joint_distance=rep.joint_distance,
            composite_distance=rep.composite_distance,
            tolerance=tol,
            agree=agree,
        )
        if not agree:
            status = EXIT_INTERNAL
        if not args.json:
            print(
                f"{'agree' if agree else 'DISAGREE'}: joint {rep.joint_distance:.3e}, "
                f"composite {rep.composite_distance:.3e} (tol {tol:.1e})"
            )
            return status
    print(serialize.dumps(doc))
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaussex", description="Extended Gaussian models from the command line.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="elaborate a model and run its queries")
    e.add_argument("file")
    fmt = e.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--pretty", action="store_true", help="human-readable output")
    e.add_argument("--form", choices=["precision", "covariance"])
    e.add_argument("--strict-interconnect", action="store_true",
                   help="observe by Willems interconnection; non-complementary observations are errors")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check", help="compare event probabilities against Monte Carlo")
    c.add_argument("file")
    c.add_argument("--mc", type=int, required=True, metavar="N")
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("compose", help="compose two morphisms (f then g)")
    k.add_argument("f")
    k.add_argument("g")
    k.add_argument("--via-interconnection", action="store_true",
                   help="also compose by interconnecting names and report agreement")
    k.add_argument("--json", action="store_true")
    k.set_defaults(func=cmd_compose)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USER
    if getattr(args, "mc", 1) is not None and getattr(args, "mc", 1) <= 0:
        print("gaussex: error: --mc must be positive", file=sys.stderr)
        return EXIT_USER
    try:
        return args.func(args)
    except InternalInconsistency as err:
        print(f"gaussex: internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except GaussExError as err:
        diags = getattr(err, "diagnostics", None)
        path = getattr(err, "path", None) or getattr(args, "file", None) or getattr(args, "f", "")
        if diags:
            _report_diagnostics(path, diags, sys.stderr)
        else:
            print(f"gaussex: error: {err}", file=sys.stderr)
        return EXIT_USER
    except OSError as err:
        print(f"gaussex: error: {err}", file=sys.stderr)
        return EXIT_USER
    except Exception as err:  # anything else is a bug, not bad input
        print(f"gaussex: internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
