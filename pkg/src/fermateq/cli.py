"""Command-line interface: evaluation, construction, and verification.

Every invocation emits exactly one UTF-8 JSON document (to stdout, or to
the --out path) and uses the exit-code contract

    0  success (for verify: the sweep passed)
    1  verification ran but failed (the report is still emitted)
    2  usage error (unknown flags, unparseable flag values)
    3  computation error (side condition violated, contour trouble, ...)

Complex-valued flags accept constant expressions in the expression
language, for example --z "0.5+0.5i" or --A "exp(pi*i/3)".  Identical
invocations with identical seeds produce byte-identical JSON.

Subcommands:

    context                       lattice generators, zeros, e1
    eval {wp,wp-prime,sn,sn-prime} --z EXPR
    construct FAMILY [flags]      build a solution family, print certificate
    verify FAMILY [flags]         construct, then sweep its equation
    residue --fn SPEC --center EXPR --radius R [--nodes N]
    order   --fn SPEC --center EXPR --radius R [--nodes N]

FAMILY is one of cubic-pair, pair-2-3, pair-2-4, shift-cubic, exp-scalar,
modulated-shift, exp-family.  --fn takes an expression in z or one of the
built-in selectors wp, wp-prime, wp-log-deriv, sn, sn-prime.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .errors import FermateqError
from .exprdsl import AffineMap, ExprError, contains_var, evaluate, parse
from .jacobi import sn
from .solutions import FAMILIES, SolutionSpec, build_solution
from .verifier import Disk, order_at, residue_at, verify_equation
from .weierstrass import make_context, wp

_NAN = complex(float("nan"), float("nan"))


class _FlagValueError(Exception):
    """Flag value failed to parse; reported as a usage error (exit 2)."""


def _parse_constant(text: str, flag: str) -> complex:
    try:
        expr = parse(text)
    except ExprError as exc:
        raise _FlagValueError(f"{flag}: {exc}") from exc
    if contains_var(expr):
        raise _FlagValueError(f"{flag}: must be a constant expression, got {text!r}")
    value = evaluate(expr, 0j)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise _FlagValueError(f"{flag}: does not evaluate to a finite constant")
    return value


def _parse_expr(text: str, flag: str):
    try:
        return parse(text)
    except ExprError as exc:
        raise _FlagValueError(f"{flag}: {exc}") from exc


def _c_json(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _emit(document: dict, out: str | None) -> None:
    text = json.dumps(document) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="write the JSON document to this path")


def _add_sampling(p: argparse.ArgumentParser) -> None:
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=2.0)
    p.add_argument("--center", default="0")


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--h", help="inner entire function, expression in z")
    p.add_argument("--g", help="exponent function, expression in z")
    p.add_argument("--eta", help="cube root of unity")
    p.add_argument("--A", help="leading constant / rotation factor")
    p.add_argument("--B", help="second constant of the exponential family")
    p.add_argument("--alpha", help="linear exponent coefficient")
    p.add_argument("--beta", help="linear exponent offset")
    p.add_argument("--q", default="1", help="affine map scale (default 1)")
    p.add_argument("--c", default="0", help="affine map shift (default 0)")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--branch", type=int, default=0)
    p.add_argument("--cert-samples", type=int, default=50)
    p.add_argument("--cert-seed", type=int, default=1729)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermateq",
        description="construct and verify meromorphic solutions of Fermat-type functional equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("context", help="print the lattice and zero constants")
    _add_out(p)

    p = sub.add_parser("eval", help="evaluate an elliptic function at a point")
    p.add_argument("kind", choices=("wp", "wp-prime", "sn", "sn-prime"))
    p.add_argument("--z", required=True)
    _add_out(p)

    p = sub.add_parser("construct", help="build a solution family instance")
    _add_family_flags(p)
    _add_out(p)

    p = sub.add_parser("verify", help="build a family instance and sweep its equation")
    _add_family_flags(p)
    _add_sampling(p)
    _add_out(p)

    p = sub.add_parser("residue", help="contour residue of a function")
    p.add_argument("--fn", required=True)
    p.add_argument("--center", required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--nodes", type=int, default=256)
    _add_out(p)

    p = sub.add_parser("order", help="zero/pole order by the argument principle")
    p.add_argument("--fn", required=True)
    p.add_argument("--center", required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--nodes", type=int, default=256)
    _add_out(p)

    return parser


def _cmd_context(args) -> int:
    ctx = make_context()
    _emit(
        {
            "omega1": _c_json(ctx.lat.omega1),
            "omega2": _c_json(ctx.lat.omega2),
            "theta1": _c_json(ctx.theta1),
            "theta2": _c_json(ctx.theta2),
            "e1": ctx.e1,
        },
        args.out,
    )
    return 0


def _cmd_eval(args) -> int:
    z = _parse_constant(args.z, "--z")
    if args.kind in ("wp", "wp-prime"):
        v = wp(z, make_context())
        value, at_pole = (v.p if args.kind == "wp" else v.dp), v.at_pole
    else:
        v = sn(z)
        value, at_pole = (v.s if args.kind == "sn" else v.ds), v.at_pole
    if at_pole:
        _emit({"re": None, "im": None, "at_pole": True}, args.out)
    else:
        _emit({"re": value.real, "im": value.imag, "at_pole": False}, args.out)
    return 0


def _spec_from_args(args) -> SolutionSpec:
    def opt_const(text, flag):
        return None if text is None else _parse_constant(text, flag)

    def opt_expr(text, flag):
        return None if text is None else _parse_expr(text, flag)

    q = _parse_constant(args.q, "--q")
    c = _parse_constant(args.c, "--c")
    if q == 0:
        raise _FlagValueError("--q: must be nonzero")
    return SolutionSpec(
        family=args.family,
        n=args.n,
        m=args.m,
        L=AffineMap(q, c),
        h=opt_expr(args.h, "--h"),
        g=opt_expr(args.g, "--g"),
        A=opt_const(args.A, "--A"),
        B=opt_const(args.B, "--B"),
        eta=opt_const(args.eta, "--eta"),
        alpha=opt_const(args.alpha, "--alpha"),
        beta=opt_const(args.beta, "--beta"),
        branch=args.branch,
    )


def _params_json(parameters: dict) -> dict:
    rendered = {}
    for key, value in parameters.items():
        if isinstance(value, complex):
            rendered[key] = _c_json(value)
        else:
            rendered[key] = value
    return rendered


def _cmd_construct(args) -> int:
    ctx = make_context()
    built = build_solution(
        _spec_from_args(args), ctx, samples=args.cert_samples, seed=args.cert_seed
    )
    certificate = built.certificate.to_json_dict() if built.certificate else None
    _emit(
        {
            "family": built.family,
            "certificate": certificate,
            "parameters": _params_json(built.parameters),
            "side_condition_residuals": built.side_residuals,
        },
        args.out,
    )
    return 0


def _cmd_verify(args) -> int:
    ctx = make_context()
    built = build_solution(
        _spec_from_args(args), ctx, samples=args.cert_samples, seed=args.cert_seed
    )
    center = _parse_constant(args.center, "--center")
    report = verify_equation(
        built.f,
        built.g,
        built.n,
        built.m,
        built.rhs,
        built.L,
        Disk(center, args.radius),
        args.samples,
        args.tol,
        args.seed,
    )
    _emit(report.to_json_dict(), args.out)
    return 0 if report.passed else 1


def _resolve_fn(spec: str):
    ctx_holder: list = []

    def ctx():
        if not ctx_holder:
            ctx_holder.append(make_context())
        return ctx_holder[0]

    if spec == "wp":
        return lambda z: (lambda v: (v.p, v.at_pole))(wp(z, ctx()))
    if spec == "wp-prime":
        return lambda z: (lambda v: (v.dp, v.at_pole))(wp(z, ctx()))
    if spec == "wp-log-deriv":
        def log_deriv(z):
            v = wp(z, ctx())
            if v.at_pole or v.p == 0:
                return _NAN, True
            return v.dp / v.p, False

        return log_deriv
    if spec == "sn":
        return lambda z: (lambda v: (v.s, v.at_pole))(sn(z))
    if spec == "sn-prime":
        return lambda z: (lambda v: (v.ds, v.at_pole))(sn(z))
    expr = _parse_expr(spec, "--fn")

    def from_expr(z):
        value = evaluate(expr, z)
        finite = math.isfinite(value.real) and math.isfinite(value.imag)
        return (value, False) if finite else (_NAN, True)

    return from_expr


def _cmd_residue(args) -> int:
    fn = _resolve_fn(args.fn)
    center = _parse_constant(args.center, "--center")
    value = residue_at(fn, center, args.radius, args.nodes)
    _emit({"re": value.real, "im": value.imag}, args.out)
    return 0


def _cmd_order(args) -> int:
    fn = _resolve_fn(args.fn)
    center = _parse_constant(args.center, "--center")
    value = order_at(fn, center, args.radius, args.nodes)
    _emit({"order": value}, args.out)
    return 0


_DISPATCH = {
    "context": _cmd_context,
    "eval": _cmd_eval,
    "construct": _cmd_construct,
    "verify": _cmd_verify,
    "residue": _cmd_residue,
    "order": _cmd_order,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except _FlagValueError as exc:
        _emit({"error": str(exc), "kind": "usage"}, getattr(args, "out", None))
        return 2
    except FermateqError as exc:
        _emit({"error": str(exc), "kind": type(exc).__name__}, getattr(args, "out", None))
        return 3


if __name__ == "__main__":
    sys.exit(main())
