"""Command-line interface.

Subcommands consume presentation files (JSON records with base_vars, d, e and
the polynomial strings P, Q) and emit human-readable lines or, with --json,
a versioned structured report.  Exit codes: 0 for pass/success, 1 for failed
checks, 2 for input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .cancellation import PIPELINE_BUDGET, cancellation_certificate
from .derivations import (
    CAP_EXCEEDED,
    DEFAULT_CAP,
    canonical_lnd,
    check_derivation_well_defined,
    check_exp_axioms,
    exp_map,
    ml_report,
    nilpotency_index,
)
from .elements import AlgebraContext, UnsupportedBaseRing, membership_with_witness
from .groebner import BudgetExceeded, DEFAULT_BUDGET, MonomialOrder, elimination_ideal


def _order_from_args(args):
    return MonomialOrder.lex() if args.order == "lex" else MonomialOrder.grevlex()
from .laurent import LaurentForm
from .isomorphisms import (
    IsoData,
    TransportError,
    build_hom,
    distinguish_by_invariants,
    transport_presentation,
    verify_hom,
    verify_iso_pair,
)
from .poly import Context, ParseError, parse_poly
from .presentations import (
    InvalidPresentation,
    cond_class,
    invariant_tuple,
    load_presentation,
    omega3_check,
    reduce_to_danielewski,
    validate_presentation,
)

SCHEMA = "dd-lab/1"

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _load_presentation(path: str):
    try:
        return load_presentation(_read_json(path))
    except (InvalidPresentation, ParseError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _report_payload(kind: str, path: str, body: dict) -> dict:
    return {"schema": SCHEMA, "kind": kind, "input": path, **body}


def _emit(payload: dict, lines: list[str], args) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=False))
    else:
        for line in lines:
            print(line)


# -- subcommand handlers: each returns (exit_code, payload, lines) ----------------


def _run_validate(path: str, args):
    p = _load_presentation(path)
    report = validate_presentation(p)
    payload = _report_payload("validation", path, {"report": report.to_json()})
    lines = [f"{path}: {'PASS' if report.passed else 'FAIL'}"]
    lines += [f"  [{'ok' if c.passed else 'FAIL'}] {c.name}: {c.detail}" for c in report.items]
    return (EXIT_PASS if report.passed else EXIT_FAIL), payload, lines


def _run_invariants(path: str, args):
    p = _load_presentation(path)
    try:
        tup = invariant_tuple(p)
    except InvalidPresentation as exc:
        raise InputError(f"{path}: {exc}") from exc
    cls = cond_class(p)
    payload = _report_payload(
        "invariants", path, {"tuple": list(tup.as_tuple()), "condition_class": cls}
    )
    return EXIT_PASS, payload, [f"(d,e,r,s) = {tup}", f"condition class: {cls}"]


def _run_omega3(path: str, args):
    p = _load_presentation(path)
    report = omega3_check(p, budget=args.budget or DEFAULT_BUDGET, order=_order_from_args(args))
    payload = _report_payload("omega3", path, {"report": report.to_json()})
    lines = [f"{path}: {'PASS' if report.passed else 'FAIL'}"]
    lines += [f"  [{'ok' if c.passed else 'FAIL'}] {c.name}: {c.detail}" for c in report.items]
    return (EXIT_PASS if report.passed else EXIT_FAIL), payload, lines


def _run_lnd(path: str, args):
    p = _load_presentation(path)
    p.require_valid()
    actx = AlgebraContext(p)
    d = canonical_lnd(actx)
    ok = check_derivation_well_defined(d)
    indices = {}
    for name in actx.generator_names():
        idx = nilpotency_index(d, actx.gen(name), args.cap)
        indices[name] = None if idx is CAP_EXCEEDED else idx
    ml = ml_report(p)
    payload = _report_payload(
        "lnd",
        path,
        {
            "images": d.to_json(),
            "well_defined": ok,
            "nilpotency_indices": indices,
            "ml_report": ml.to_json(),
        },
    )
    lines = [f"derivation images: {d.to_json()}", f"well defined: {ok}"]
    lines += [f"nilpotency index of {k}: {v if v is not None else 'cap exceeded'}"
              for k, v in indices.items()]
    if ml.conclusion:
        lines.append(ml.conclusion)
    passed = ok and all(v is not None for v in indices.values())
    return (EXIT_PASS if passed else EXIT_FAIL), payload, lines


def _run_exp(path: str, args):
    p = _load_presentation(path)
    p.require_valid()
    actx = AlgebraContext(p)
    d = canonical_lnd(actx)
    phi = exp_map(d, args.cap)
    report = check_exp_axioms(phi)
    payload = _report_payload(
        "exp", path, {"coefficients": phi.to_json(), "axioms": report.to_json()}
    )
    lines = [f"{name}: {coeffs}" for name, coeffs in phi.to_json().items()]
    lines.append(f"axioms: {'PASS' if report.passed else 'FAIL'}")
    return (EXIT_PASS if report.passed else EXIT_FAIL), payload, lines


def _run_fiber(path: str, args):
    p = _load_presentation(path)
    p.require_valid()
    base = p.base.variables
    ctx = Context(("X", "Y", "T", "Z") + base)
    x = ctx.var("X")
    rel1 = x ** p.d * ctx.var("Y") - p.P.transfer(ctx)
    rel2 = x ** p.e * ctx.var("T") - p.Q.transfer(ctx)
    keep = {"Z"} | set(base)
    gens = elimination_ideal([x, rel1, rel2], keep, budget=args.budget or DEFAULT_BUDGET)
    payload = _report_payload("fiber", path, {"generators": [str(g) for g in gens]})
    named = ", ".join(str(g) for g in gens) if gens else "0"
    return EXIT_PASS, payload, [f"x*B intersected with R[z] is generated by: {named}"]


def _run_member(path: str, args):
    p = _load_presentation(path)
    p.require_valid()
    adjoined = tuple(n for n in (args.adjoin or "").split(",") if n)
    actx = AlgebraContext(p, adjoined)
    if args.element is None:
        raise InputError("member requires --element with a JSON map exponent -> polynomial")
    try:
        raw = json.loads(args.element)
        coeffs = {int(k): parse_poly(v, actx.coeff_ctx) for k, v in raw.items()}
    except (json.JSONDecodeError, ValueError, ParseError) as exc:
        raise InputError(f"bad --element: {exc}") from exc
    form = LaurentForm(actx.coeff_ctx, coeffs)
    try:
        result = membership_with_witness(form, actx, args.budget or DEFAULT_BUDGET)
    except UnsupportedBaseRing as exc:
        raise InputError(str(exc)) from exc
    payload = _report_payload(
        "membership",
        path,
        {
            "element": form.to_json(),
            "member": result.member,
            "witness": str(result.witness) if result.witness is not None else None,
            "certificate_basis": result.certificate,
        },
    )
    if result.member:
        lines = [f"member: witness {result.witness}"]
    else:
        lines = ["not a member", f"certificate basis: {result.certificate}"]
    return (EXIT_PASS if result.member else EXIT_FAIL), payload, lines


def _parse_iso_data(data, ctx) -> IsoData:
    try:
        return IsoData(
            Fraction(data["lambda1"]),
            Fraction(data["mu1"]),
            Fraction(data["beta1_tilde"]),
            Fraction(data["g2_prime"]),
            parse_poly(data.get("delta1", "0"), ctx),
            parse_poly(data.get("alpha1_tilde", "0"), ctx),
            parse_poly(data.get("g1_prime", "0"), ctx),
        )
    except (KeyError, ValueError, ParseError) as exc:
        raise InputError(f"bad isomorphism data: {exc}") from exc


def _run_iso_transport(path: str, args):
    p = _load_presentation(path)
    data = _parse_iso_data(_read_json(args.data), p.poly_ctx)
    try:
        result = transport_presentation(p, data)
    except TransportError as exc:
        payload = _report_payload("iso-transport", path, {"error": str(exc)})
        return EXIT_FAIL, payload, [f"transport failed: {exc}"]
    payload = _report_payload("iso-transport", path, result.to_json())
    lines = [
        f"target: d={result.target.d}, e={result.target.e}, P = {result.target.P}, Q = {result.target.Q}",
        f"forward images: {result.forward.to_json()}",
        f"backward images: {result.backward.to_json()}",
        "pair verified: True",
    ]
    return EXIT_PASS, payload, lines


def _load_hom(path: str, source: AlgebraContext, target: AlgebraContext):
    data = _read_json(path)
    images_raw = data.get("images", data)
    try:
        images = {
            name: target.element(parse_poly(text, target.gen_ctx))
            for name, text in images_raw.items()
        }
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return build_hom(source, target, images)


def _run_iso_verify(path: str, args):
    src = _load_presentation(path)
    tgt = _load_presentation(args.target)
    src_ctx = AlgebraContext(src)
    tgt_ctx = AlgebraContext(tgt)
    fwd = _load_hom(args.forward, src_ctx, tgt_ctx)
    ok_f = verify_hom(fwd)
    body = {"forward_verified": ok_f}
    lines = [f"forward homomorphism: {'PASS' if ok_f else 'FAIL'}"]
    ok = ok_f
    if args.backward:
        bwd = _load_hom(args.backward, tgt_ctx, src_ctx)
        ok_b = verify_hom(bwd)
        pair = ok_f and ok_b and verify_iso_pair(fwd, bwd)
        body.update({"backward_verified": ok_b, "pair_verified": pair})
        lines.append(f"backward homomorphism: {'PASS' if ok_b else 'FAIL'}")
        lines.append(f"mutually inverse pair: {'PASS' if pair else 'FAIL'}")
        ok = pair
    payload = _report_payload("iso-verify", path, body)
    return (EXIT_PASS if ok else EXIT_FAIL), payload, lines


def _run_distinguish(path: str, args):
    p1 = _load_presentation(path)
    p2 = _load_presentation(args.other)
    cert = distinguish_by_invariants(p1, p2)
    payload = _report_payload("distinguish", path, cert.to_json())
    lines = [f"tuple 1: {cert.tuple1}", f"tuple 2: {cert.tuple2}", f"verdict: {cert.verdict}"]
    return (EXIT_PASS if cert.not_isomorphic else EXIT_FAIL), payload, lines


def _run_cancel_cert(path: str, args):
    p = _load_presentation(path)
    cert = cancellation_certificate(p, budget=args.budget or PIPELINE_BUDGET, cap=args.cap)
    payload = cert.to_json()
    payload["input"] = path
    lines = [f"{'ok' if c.passed else 'FAIL'}: {c.name}" + (f" ({c.detail})" if c.detail and not c.passed else "")
             for c in cert.steps]
    lines.append(f"verdict: {cert.verdict}")
    if cert.f is not None:
        lines.insert(0, f"f = {cert.f.gen}")
        lines.insert(1, f"g = {cert.g.gen}")
        lines.insert(2, f"h = {cert.h.gen}")
    return (EXIT_PASS if cert.certified else EXIT_FAIL), payload, lines


def _run_danielewski_reduce(path: str, args):
    p = _load_presentation(path)
    try:
        red = reduce_to_danielewski(p)
    except InvalidPresentation as exc:
        raise InputError(f"{path}: {exc}") from exc
    payload = _report_payload("danielewski-reduce", path, red.to_json())
    lines = [
        f"target: {red.target}",
        f"generator map: {{x -> X, z -> Z, y -> {red.forward_images['Y']}, t -> {red.forward_images['T']}}}",
    ]
    return EXIT_PASS, payload, lines


_HANDLERS = {
    "validate": _run_validate,
    "invariants": _run_invariants,
    "omega3": _run_omega3,
    "lnd": _run_lnd,
    "exp": _run_exp,
    "fiber": _run_fiber,
    "member": _run_member,
    "iso-transport": _run_iso_transport,
    "iso-verify": _run_iso_verify,
    "distinguish": _run_distinguish,
    "cancel-cert": _run_cancel_cert,
    "danielewski-reduce": _run_danielewski_reduce,
}


def _worker(item):
    command, path, args_dict = item
    ns = argparse.Namespace(**args_dict)
    try:
        code, payload, lines = _HANDLERS[command](path, ns)
        return code, payload, lines
    except InputError as exc:
        return EXIT_INPUT, {"schema": SCHEMA, "kind": "error", "input": path, "error": str(exc)}, [f"error: {exc}"]
    except (InvalidPresentation, ParseError, BudgetExceeded) as exc:
        return EXIT_INPUT, {"schema": SCHEMA, "kind": "error", "input": path, "error": str(exc)}, [f"error: {exc}"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddlab",
        description="Exact symbolic toolkit for double Danielewski type algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, multi_input=True):
        if multi_input:
            sp.add_argument("inputs", nargs="+", help="presentation file(s)")
        else:
            sp.add_argument("inputs", nargs=1, help="presentation file")
        sp.add_argument("--order", choices=["grevlex", "lex"], default="grevlex",
                        help="monomial order for reported Groebner bases")
        sp.add_argument("--budget", type=int, default=None,
                        help="Groebner reduction-step budget")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP,
                        help="iteration cap for nilpotency and chains")
        sp.add_argument("--json", action="store_true", help="emit structured JSON")
        sp.add_argument("--out", default=None, help="also write the JSON report to a file")
        sp.add_argument("--jobs", type=int, default=1,
                        help="parallelize across multiple input files")

    common(sub.add_parser("validate", help="check the presentation invariants"))
    common(sub.add_parser("invariants", help="print (d, e, r, s)"))
    common(sub.add_parser("omega3", help="unit-ideal family conditions"))
    common(sub.add_parser("lnd", help="canonical derivation, well-definedness, nilpotency"))
    common(sub.add_parser("exp", help="exponential map of the canonical derivation"))
    common(sub.add_parser("fiber", help="generators of x*B intersected with R[z]"))

    sp = sub.add_parser("member", help="Laurent-form membership with witness")
    common(sp, multi_input=False)
    sp.add_argument("--element", help='JSON map of x-exponent to polynomial, e.g. {"-1": "Z^2 - 1"}')
    sp.add_argument("--adjoin", default="", help="comma-separated adjoined variables")

    sp = sub.add_parser("iso-transport", help="transport a presentation along unit data")
    common(sp, multi_input=False)
    sp.add_argument("--data", required=True, help="isomorphism data file")

    sp = sub.add_parser("iso-verify", help="verify homomorphism files")
    common(sp, multi_input=False)
    sp.add_argument("--target", required=True, help="target presentation file")
    sp.add_argument("--forward", required=True, help="generator-image file source -> target")
    sp.add_argument("--backward", default=None, help="generator-image file target -> source")

    sp = sub.add_parser("distinguish", help="invariant-based non-isomorphism certificate")
    common(sp, multi_input=False)
    sp.add_argument("--other", required=True, help="second presentation file")

    common(sub.add_parser("cancel-cert", help="full stable-isomorphism certificate"))
    common(sub.add_parser("danielewski-reduce", help="eliminate Y when deg_Y Q = 1"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    paths = args.inputs
    args_dict = {k: v for k, v in vars(args).items() if k not in ("inputs", "command")}
    items = [(args.command, path, args_dict) for path in paths]

    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_worker, items))
    else:
        results = [_worker(item) for item in items]

    worst = EXIT_PASS
    payloads = []
    for (code, payload, lines), path in zip(results, paths):
        if len(paths) > 1 and not args.json:
            print(f"== {path} ==")
        _emit(payload, lines, args)
        payloads.append(payload)
        worst = max(worst, code)
    if args.out:
        report = payloads[0] if len(payloads) == 1 else payloads
        Path(args.out).write_text(json.dumps(report, indent=2), encoding="utf-8")
    return worst


if __name__ == "__main__":
    sys.exit(main())
