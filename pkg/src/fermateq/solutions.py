"""Constructors for the explicit meromorphic solution families.

Each constructor validates its side conditions numerically before returning
an evaluable function object, so a constructor doubles as a falsifier: feed
it constants that miss their constraint and it raises instead of building a
non-solution.  Scalar constraints are checked to 1e-10 (or tighter where a
family demands it) and functional relations to 1e-8 over a seeded sample
sweep.

The elliptic families are quotients of p and p' composed with an inner
entire function h; where the inner value lands on the period lattice the
quotient has a simple pole with leading coefficient -1/sqrt(3) (numerator
and denominator blow up at orders 3 and 2), and evaluation reports such
points in-band through the at_pole flag instead of manufacturing a value.
The flag fires inside an evaluation margin wider than the raw pole radius:
quantities like p'(h)^2 grow as the sixth inverse power of the distance to
the lattice, so closer in than a few percent of a period the defining
identities cannot be computed to their tolerances in double precision.
The analogous sn-based guard trips once |sn| exceeds a small cap, since
|sn| is the inverse distance to the nearest pole there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import ClassificationError, NotASolutionError, ParameterError
from .exprdsl import AffineMap, BinOp, Call, Expr, Var, const, contains_var, evaluate
from .jacobi import sn
from .lattice import check_rotation_bijection, reduce_to_cell
from .verifier import Disk, sample_disk
from .weierstrass import SQRT3, EquianharmonicContext, wp

DEFAULT_SEED = 1729
CBRT4 = 4.0 ** (1.0 / 3.0)

# Cube root of unity appearing in the closed form of the shifted companion.
ETA_COMPANION = complex(-0.5, -SQRT3 / 2.0)

_NAN = complex(float("nan"), float("nan"))

SCALAR_TOL = 1e-10
RELATION_TOL = 1e-8

# In-band near-pole evaluation margin for the elliptic quotient families
# (fraction of |omega1|), and the |sn| cap playing the same role for the
# sn-based family.
NEAR_POLE_MARGIN_FACTOR = 0.03
SN_NEAR_POLE_CAP = 4.0


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class MeroFn:
    """Evaluable meromorphic function: call it to get (value, at_pole).

    Immutable after construction; pole flags propagate from the elliptic
    evaluators underneath, so sweeps can skip poles cheaply.
    """

    fn: Callable[[complex], tuple[complex, bool]]
    label: str = ""
    params: dict = field(default_factory=dict)

    def __call__(self, z: complex) -> tuple[complex, bool]:
        return self.fn(z)


def _require_nonconstant(expr: Expr, name: str) -> None:
    if not contains_var(expr):
        raise ParameterError(f"{name} must be a nonconstant function of z")
    probes = [evaluate(expr, complex(0.31 * k, 0.17 * k - 0.4)) for k in range(6)]
    finite = [v for v in probes if _finite(v)]
    if len(finite) >= 2 and max(abs(v - finite[0]) for v in finite) > 1e-12:
        return
    raise ParameterError(f"{name} must be a nonconstant function of z")


def _check_unit_cube(value: complex, name: str, tol: float = 1e-12) -> None:
    if abs(value ** 3 - 1.0) > tol:
        raise ParameterError(f"{name}^3 must equal 1 within {tol:g}, got {value!r}")


def _check_cube_minus_one(value: complex, name: str, tol: float = 1e-12) -> None:
    if abs(value ** 3 + 1.0) > tol:
        raise ParameterError(f"{name}^3 must equal -1 within {tol:g}, got {value!r}")


def _pole_margin(ctx: EquianharmonicContext) -> float:
    return max(ctx.pole_radius, NEAR_POLE_MARGIN_FACTOR * abs(ctx.lat.omega1))


def _wp_at_inner(h: Expr, ctx: EquianharmonicContext, z: complex):
    """wp(h(z)) with the evaluation-margin pole guard; None means flagged."""
    w = evaluate(h, z)
    if not _finite(w):
        return None
    if abs(reduce_to_cell(w, ctx.lat).reduced) <= _pole_margin(ctx):
        return None
    return wp(w, ctx)


def _wp_ratio_fn(h: Expr, ctx: EquianharmonicContext, sign: float, scale: complex):
    """scale * (1 + sign * p'(h(z)) / sqrt(3)) / p(h(z)) with pole propagation."""

    def fn(z: complex) -> tuple[complex, bool]:
        v = _wp_at_inner(h, ctx, z)
        if v is None:
            return _NAN, True
        return scale * (1.0 + sign * v.dp / SQRT3) / v.p, False

    return fn


def cubic_pair(h: Expr, eta: complex, ctx: EquianharmonicContext) -> tuple[MeroFn, MeroFn]:
    """Pair with f^3 + g^3 = 1:

    f = (1/2)(1 + p'(h)/sqrt(3)) / p(h),  g = (eta/2)(1 - p'(h)/sqrt(3)) / p(h).
    """
    _check_unit_cube(eta, "eta")
    _require_nonconstant(h, "h")
    f = MeroFn(_wp_ratio_fn(h, ctx, +1.0, 0.5), "cubic_f", {"eta": eta})
    g = MeroFn(_wp_ratio_fn(h, ctx, -1.0, eta / 2.0), "cubic_g", {"eta": eta})
    return f, g


def pair_2_3(h: Expr, eta: complex, ctx: EquianharmonicContext) -> tuple[MeroFn, MeroFn]:
    """Pair with f^2 + g^3 = 1:  f = i p'(h),  g = eta 4^{1/3} p(h)."""
    _check_unit_cube(eta, "eta")
    _require_nonconstant(h, "h")

    def f_at(z: complex):
        w = evaluate(h, z)
        if not _finite(w):
            return _NAN, True
        v = wp(w, ctx)
        if v.at_pole:
            return _NAN, True
        return 1j * v.dp, False

    def g_at(z: complex):
        w = evaluate(h, z)
        if not _finite(w):
            return _NAN, True
        v = wp(w, ctx)
        if v.at_pole:
            return _NAN, True
        return eta * CBRT4 * v.p, False

    return MeroFn(f_at, "pair23_f", {"eta": eta}), MeroFn(g_at, "pair23_g", {"eta": eta})


def pair_2_4(h: Expr) -> tuple[MeroFn, MeroFn]:
    """Pair with f^2 + g^4 = 1:  f = sn'(h),  g = sn(h)."""
    _require_nonconstant(h, "h")

    def f_at(z: complex):
        w = evaluate(h, z)
        if not _finite(w):
            return _NAN, True
        v = sn(w)
        if v.at_pole:
            return _NAN, True
        return v.ds, False

    def g_at(z: complex):
        w = evaluate(h, z)
        if not _finite(w):
            return _NAN, True
        v = sn(w)
        if v.at_pole:
            return _NAN, True
        return v.s, False

    return MeroFn(f_at, "pair24_f"), MeroFn(g_at, "pair24_g")


@dataclass(frozen=True)
class ShiftCertificate:
    """Evidence that the inner function realizes one of the shift cases.

    case 1: h(L(z)) = A h(z) + theta1 + tau,
    case 2: h(L(z)) = A h(z) + theta2 + tau,
    case 3: h(L(z)) = A h(z) + tau,
    with tau = tau_mu * omega1 + tau_nu * omega2 a lattice point.
    """

    case: int
    tau: complex
    tau_mu: int
    tau_nu: int
    delta: complex
    delta_spread: float
    lattice_residual: float
    samples: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "case": self.case,
            "tau": {"re": self.tau.real, "im": self.tau.imag},
            "tau_mu": self.tau_mu,
            "tau_nu": self.tau_nu,
            "delta": {"re": self.delta.real, "im": self.delta.imag},
            "delta_spread": self.delta_spread,
            "lattice_residual": self.lattice_residual,
            "samples": self.samples,
            "seed": self.seed,
        }


def classify_shift_offset(
    h: Expr,
    L: AffineMap,
    A: complex,
    ctx: EquianharmonicContext,
    samples: int = 50,
    seed: int = DEFAULT_SEED,
) -> ShiftCertificate:
    """Measure delta = h(L(z)) - A h(z), check constancy, and classify it."""
    points = sample_disk(Disk(complex(0.0, 0.0), 2.0), samples, seed)
    deltas = []
    for z in points:
        d = evaluate(h, L(z)) - A * evaluate(h, z)
        if not _finite(d):
            raise NotASolutionError("could not measure the shift offset (overflow)")
        deltas.append(d)
    delta = sum(deltas) / len(deltas)
    spread = max(abs(d - delta) for d in deltas)
    if spread > RELATION_TOL:
        raise NotASolutionError(
            f"h(L(z)) - A h(z) is not constant over the sample sweep (spread {spread:.3e})"
        )
    for case, offset in ((1, ctx.theta1), (2, ctx.theta2), (3, complex(0.0, 0.0))):
        cc = reduce_to_cell(delta - offset, ctx.lat)
        if abs(cc.reduced) <= RELATION_TOL * abs(ctx.lat.omega1):
            tau = (delta - offset) - cc.reduced
            return ShiftCertificate(
                case=case,
                tau=tau,
                tau_mu=cc.mu,
                tau_nu=cc.nu,
                delta=delta,
                delta_spread=spread,
                lattice_residual=abs(cc.reduced),
                samples=samples,
                seed=seed,
            )
    raise ClassificationError(
        f"offset {delta!r} is not a lattice translate of theta1, theta2, or 0"
    )


def shift_solution(
    h: Expr,
    L: AffineMap,
    A: complex,
    ctx: EquianharmonicContext,
    samples: int = 50,
    seed: int = DEFAULT_SEED,
) -> tuple[MeroFn, ShiftCertificate]:
    """Solution of f^3(z) + f^3(L(z)) = 1 built from a certified inner h.

    f = (1/2)(1 + p'(h)/sqrt(3)) / p(h).  The certificate records which
    offset case the pair (h, L) realizes, measured numerically.
    """
    _check_cube_minus_one(A, "A")
    if not check_rotation_bijection(A, ctx.lat, 1e-9):
        raise ParameterError("A does not map the period lattice onto itself")
    _require_nonconstant(h, "h")
    certificate = classify_shift_offset(h, L, A, ctx, samples=samples, seed=seed)
    f = MeroFn(_wp_ratio_fn(h, ctx, +1.0, 0.5), "shift_f", {"A": A})
    return f, certificate


def companion_under_shift(
    h: Expr,
    L: AffineMap,
    A: complex,
    ctx: EquianharmonicContext,
    samples: int = 50,
    seed: int = DEFAULT_SEED,
) -> MeroFn:
    """Closed form of f(L(z)) for the theta1 shift case, without composing L:

        f(L(z)) = (1 / (-A)) (eta / 2) (1 - p'(h(z)) / sqrt(3)) / p(h(z)),

    where eta = (-1 - sqrt(3) i) / 2 is a cube root of unity.
    """
    _check_cube_minus_one(A, "A")
    if not check_rotation_bijection(A, ctx.lat, 1e-9):
        raise ParameterError("A does not map the period lattice onto itself")
    _require_nonconstant(h, "h")
    certificate = classify_shift_offset(h, L, A, ctx, samples=samples, seed=seed)
    if certificate.case != 1:
        raise NotASolutionError(
            f"closed-form companion needs the theta1 case, measured case {certificate.case}"
        )
    scale = (1.0 / (-A)) * (ETA_COMPANION / 2.0)
    return MeroFn(_wp_ratio_fn(h, ctx, -1.0, scale), "shift_companion", {"A": A})


def scalar_exp_solution(
    alpha: complex, beta: complex, c: complex, n: int, branch: int = 0
) -> MeroFn:
    """Pure exponential solution of f^n(z) + f^n(z + c) = e^{alpha z + beta}.

    f = d e^{(alpha z + beta)/n} with d^n (1 + e^{alpha c}) = 1; d is the
    principal n-th root shifted by the requested branch.
    """
    if int(n) != n or n < 2:
        raise ParameterError("exponent n must be an integer >= 2")
    if alpha == 0:
        raise ParameterError("alpha must be nonzero")
    denom = 1.0 + cmath.exp(alpha * c)
    if abs(denom) < 1e-12:
        raise ParameterError("1 + e^{alpha c} = 0: no scaling constant exists")
    d = denom ** (-1.0 / n) * cmath.exp(2j * math.pi * branch / n)
    if abs(d ** n * denom - 1.0) > SCALAR_TOL:
        raise ParameterError("scaling constant failed its defining identity")

    def f_at(z: complex):
        value = d * cmath.exp((alpha * z + beta) / n)
        return (value, False) if _finite(value) else (_NAN, True)

    return MeroFn(
        f_at,
        "scalar_exp",
        {"d": d, "alpha": alpha, "beta": beta, "c": c, "n": n, "branch": branch},
    )


def modulated_shift_solution(
    alpha: complex, beta: complex, ctx: EquianharmonicContext
) -> tuple[MeroFn, complex]:
    """Elliptic-times-exponential solution of f^3(z) + f^3(z + c) = e^{alpha z + beta}.

    Here c = pi i and e^{alpha c} must equal 1 (any even integer alpha
    works).  The inner function is h(z) = e^z, which satisfies
    h(z + c) = -h(z), so the elliptic factor solves the unit equation and
    the exponential factor reproduces the right side.
    """
    c = complex(0.0, math.pi)
    if abs(cmath.exp(alpha * c) - 1.0) > SCALAR_TOL:
        raise ParameterError("e^{alpha pi i} must equal 1 (alpha an even integer works)")

    def f_at(z: complex):
        w = cmath.exp(z) if abs(z.real) < 700.0 else _NAN
        if not _finite(w):
            return _NAN, True
        v = wp(w, ctx)
        if v.at_pole:
            return _NAN, True
        base = 0.5 * (1.0 + v.dp / SQRT3) / v.p
        try:
            value = base * cmath.exp((alpha * z + beta) / 3.0)
        except OverflowError:
            return _NAN, True
        return (value, False) if _finite(value) else (_NAN, True)

    f = MeroFn(f_at, "modulated_shift", {"alpha": alpha, "beta": beta, "c": c})
    return f, c


@dataclass(frozen=True)
class ExpFamilyCertificate:
    """Evidence for g(L(z)) = (n/m) g(z) + n log(B/A) at the chosen branch."""

    n: int
    m: int
    A: complex
    B: complex
    branch: int
    log_ratio: complex
    relation_residual: float
    q: complex
    abs_q: float
    samples: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "A": {"re": self.A.real, "im": self.A.imag},
            "B": {"re": self.B.real, "im": self.B.imag},
            "branch": self.branch,
            "log_ratio": {"re": self.log_ratio.real, "im": self.log_ratio.imag},
            "relation_residual": self.relation_residual,
            "q": {"re": self.q.real, "im": self.q.imag},
            "abs_q": self.abs_q,
            "samples": self.samples,
            "seed": self.seed,
        }


def exp_family(
    n: int,
    m: int,
    A: complex,
    B: complex,
    g: Expr,
    L: AffineMap,
    branch: int = 0,
    samples: int = 50,
    seed: int = DEFAULT_SEED,
) -> tuple[MeroFn, ExpFamilyCertificate]:
    """Solution f = A e^{g(z)/n} of f^n(z) + f^m(L(z)) = e^{g(z)}.

    Requires A^n + B^m = 1 with nonzero A, B, integer exponents n >= 2 and
    m >= 3 with (n, m) != (3, 3), and certifies numerically that

        g(L(z)) = (n/m) g(z) + n log(B/A)

    holds over a seeded sample sweep, with log taken on the principal
    branch shifted by 2 pi i times the requested branch offset.
    """
    if int(n) != n or int(m) != m:
        raise ParameterError("exponents must be integers")
    if n < 2 or m < 3:
        raise ParameterError(
            f"no constructor for exponents ({n}, {m}); the case is open"
        )
    if (n, m) == (3, 3):
        raise ParameterError("(3, 3) belongs to the shift family, not the exponential one")
    if A == 0 or B == 0:
        raise ParameterError("A and B must be nonzero")
    if abs(A ** n + B ** m - 1.0) > SCALAR_TOL:
        raise ParameterError("A^n + B^m must equal 1")
    _require_nonconstant(g, "g")
    log_ratio = cmath.log(B / A) + 2j * math.pi * branch
    worst = 0.0
    for z in sample_disk(Disk(complex(0.0, 0.0), 2.0), samples, seed):
        gz = evaluate(g, z)
        gLz = evaluate(g, L(z))
        if not (_finite(gz) and _finite(gLz)):
            raise NotASolutionError("could not evaluate g over the sample sweep")
        worst = max(worst, abs(gLz - (n / m) * gz - n * log_ratio))
    if worst > RELATION_TOL:
        raise NotASolutionError(
            f"g(L(z)) - (n/m) g(z) - n log(B/A) is not zero (max residual {worst:.3e})"
        )

    def f_at(z: complex):
        gz = evaluate(g, z)
        if not _finite(gz):
            return _NAN, True
        try:
            value = A * cmath.exp(gz / n)
        except OverflowError:
            return _NAN, True
        return (value, False) if _finite(value) else (_NAN, True)

    certificate = ExpFamilyCertificate(
        n=n,
        m=m,
        A=A,
        B=B,
        branch=branch,
        log_ratio=log_ratio,
        relation_residual=worst,
        q=L.q,
        abs_q=abs(L.q),
        samples=samples,
        seed=seed,
    )
    f = MeroFn(f_at, "exp_family", {"A": A, "B": B, "n": n, "m": m, "branch": branch})
    return f, certificate


def exp_modulated_inner(
    a: complex, b: complex, gper: Expr, c: complex, ctx: EquianharmonicContext
) -> Expr:
    """Inner function h(z) = e^{a z} gper(z) + b for a period-c entire gper.

    Such h satisfies h(z + c) = e^{a c} h(z) + (1 - e^{a c}) b, so with
    A = e^{a c} a cube root of -1 it feeds the shift family; choosing b
    places the constant offset (1 - A) b on theta1, theta2, or the lattice.
    """
    A = cmath.exp(a * c)
    _check_cube_minus_one(A, "e^{a c}", tol=SCALAR_TOL)
    _require_nonconstant(gper, "gper")
    for k in range(16):
        z = complex(0.211 * k - 1.3, 0.173 * k - 1.1)
        gap = evaluate(gper, z + c) - evaluate(gper, z)
        if not _finite(gap) or abs(gap) > RELATION_TOL * (1.0 + abs(evaluate(gper, z))):
            raise ParameterError("gper must be entire with period c")
    return BinOp(
        "+",
        BinOp("*", Call("exp", BinOp("*", const(a), Var())), gper),
        const(b),
    )


FAMILIES = (
    "cubic-pair",
    "pair-2-3",
    "pair-2-4",
    "shift-cubic",
    "exp-scalar",
    "modulated-shift",
    "exp-family",
)


@dataclass(frozen=True)
class SolutionSpec:
    """Declarative description of one solution family instance."""

    family: str
    n: int | None = None
    m: int | None = None
    L: AffineMap | None = None
    h: Expr | None = None
    g: Expr | None = None
    A: complex | None = None
    B: complex | None = None
    eta: complex | None = None
    alpha: complex | None = None
    beta: complex | None = None
    branch: int = 0


@dataclass(frozen=True)
class BuiltSolution:
    """A constructed instance together with the equation it satisfies."""

    family: str
    f: MeroFn
    g: MeroFn
    n: int
    m: int
    rhs: Expr
    L: AffineMap
    certificate: ShiftCertificate | ExpFamilyCertificate | None
    parameters: dict
    side_residuals: dict


def _linear_exp_rhs(alpha: complex, beta: complex) -> Expr:
    return Call("exp", BinOp("+", BinOp("*", const(alpha), Var()), const(beta)))


def _need(spec: SolutionSpec, *names: str) -> None:
    for name in names:
        if getattr(spec, name) is None:
            raise ParameterError(f"family {spec.family!r} requires parameter {name!r}")


def build_solution(
    spec: SolutionSpec,
    ctx: EquianharmonicContext,
    samples: int = 50,
    seed: int = DEFAULT_SEED,
) -> BuiltSolution:
    """Construct the family described by spec and package its equation."""
    family = spec.family
    one = const(1.0)
    if family == "cubic-pair":
        _need(spec, "h", "eta")
        f, g = cubic_pair(spec.h, spec.eta, ctx)
        return BuiltSolution(
            family, f, g, 3, 3, one, AffineMap.identity(), None,
            {"eta": spec.eta},
            {"eta_cubed_minus_one": abs(spec.eta ** 3 - 1.0)},
        )
    if family == "pair-2-3":
        _need(spec, "h", "eta")
        f, g = pair_2_3(spec.h, spec.eta, ctx)
        return BuiltSolution(
            family, f, g, 2, 3, one, AffineMap.identity(), None,
            {"eta": spec.eta},
            {"eta_cubed_minus_one": abs(spec.eta ** 3 - 1.0)},
        )
    if family == "pair-2-4":
        _need(spec, "h")
        f, g = pair_2_4(spec.h)
        return BuiltSolution(
            family, f, g, 2, 4, one, AffineMap.identity(), None, {}, {},
        )
    if family == "shift-cubic":
        _need(spec, "h", "L", "A")
        f, cert = shift_solution(spec.h, spec.L, spec.A, ctx, samples=samples, seed=seed)
        return BuiltSolution(
            family, f, f, 3, 3, one, spec.L, cert,
            {"A": spec.A},
            {
                "A_cubed_plus_one": abs(spec.A ** 3 + 1.0),
                "offset_spread": cert.delta_spread,
                "offset_lattice_residual": cert.lattice_residual,
            },
        )
    if family == "exp-scalar":
        _need(spec, "alpha", "beta", "L", "n")
        if abs(spec.L.q - 1.0) > 1e-12:
            raise ParameterError("the pure exponential family needs a unit shift (q = 1)")
        c = spec.L.c
        f = scalar_exp_solution(spec.alpha, spec.beta, c, spec.n, branch=spec.branch)
        d = f.params["d"]
        return BuiltSolution(
            family, f, f, spec.n, spec.n, _linear_exp_rhs(spec.alpha, spec.beta),
            spec.L, None,
            {"d": d, "alpha": spec.alpha, "beta": spec.beta, "c": c, "n": spec.n},
            {"d_power_identity": abs(d ** spec.n * (1.0 + cmath.exp(spec.alpha * c)) - 1.0)},
        )
    if family == "modulated-shift":
        _need(spec, "alpha", "beta")
        f, c = modulated_shift_solution(spec.alpha, spec.beta, ctx)
        return BuiltSolution(
            family, f, f, 3, 3, _linear_exp_rhs(spec.alpha, spec.beta),
            AffineMap.shift(c), None,
            {"alpha": spec.alpha, "beta": spec.beta, "c": c},
            {"exp_alpha_c_minus_one": abs(cmath.exp(spec.alpha * c) - 1.0)},
        )
    if family == "exp-family":
        _need(spec, "n", "m", "A", "B", "g", "L")
        f, cert = exp_family(
            spec.n, spec.m, spec.A, spec.B, spec.g, spec.L,
            branch=spec.branch, samples=samples, seed=seed,
        )
        return BuiltSolution(
            family, f, f, spec.n, spec.m, Call("exp", spec.g), spec.L, cert,
            {"A": spec.A, "B": spec.B, "n": spec.n, "m": spec.m, "branch": spec.branch},
            {
                "power_sum_minus_one": abs(spec.A ** spec.n + spec.B ** spec.m - 1.0),
                "relation_residual": cert.relation_residual,
            },
        )
    raise ParameterError(f"unknown family {family!r}; choose one of {FAMILIES}")
