"""Numerical verification: residual sweeps, residues, and order counting.

verify_equation samples a disk with a seeded generator and reports residual
statistics for f(z)^n + g(L(z))^m = rhs(z), skipping (and counting) points
where any factor sits on a pole.  residue_at integrates over a circle with
the trapezoid rule, which converges geometrically for analytic integrands,
doubling the node count until two successive answers agree.  order_at feeds
the numerical logarithmic derivative through residue_at, so zero and pole
multiplicities come out as integers with sign.
"""

from __future__ import annotations

import cmath
import json
import math
import random
from dataclasses import dataclass

from .errors import ContourError, InconclusiveOrderError, ParameterError
from .exprdsl import AffineMap, Expr, evaluate
from .weierstrass import SQRT3, EquianharmonicContext, wp

_NODE_CAP = 4096
_AGREEMENT = 1e-9


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius) and _finite(self.center)):
            raise ParameterError("disk needs a finite center and positive radius")


def sample_disk(region: Disk, count: int, seed: int) -> list[complex]:
    """count points uniform over the disk, reproducible from the seed."""
    if count < 1:
        raise ParameterError("need at least one sample")
    rng = random.Random(seed)
    points = []
    for _ in range(count):
        r = region.radius * math.sqrt(rng.random())
        t = 2.0 * math.pi * rng.random()
        points.append(region.center + r * cmath.exp(1j * t))
    return points


@dataclass(frozen=True)
class VerificationReport:
    """Residual statistics of one sampling sweep."""

    samples_requested: int
    samples_used: int
    skipped_near_pole: int
    max_residual: float
    mean_residual: float
    worst_point: complex | None
    seed: int
    tolerance: float
    passed: bool

    def to_json_dict(self) -> dict:
        worst = None
        if self.worst_point is not None:
            worst = {"re": self.worst_point.real, "im": self.worst_point.imag}
        return {
            "samples_requested": self.samples_requested,
            "samples_used": self.samples_used,
            "skipped_near_pole": self.skipped_near_pole,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "worst_point": worst,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def verify_equation(
    f,
    g,
    n: int,
    m: int,
    rhs: Expr,
    L: AffineMap,
    region: Disk,
    samples: int,
    tol: float,
    seed: int,
) -> VerificationReport:
    """Sweep f(z)^n + g(L(z))^m - rhs(z) over seeded samples of the region.

    f and g are callables returning (value, at_pole); flagged or non-finite
    evaluations are skipped and counted.  Residuals are normalized by
    1 / (1 + |rhs(z)|) since the right side may swing over many orders of
    magnitude across the disk.  The sweep passes when the maximum residual
    stays within tol and at least half the requested samples were usable.
    """
    if samples < 1:
        raise ParameterError("samples must be at least 1")
    if not tol > 0.0:
        raise ParameterError("tol must be positive")
    used = 0
    skipped = 0
    max_residual = 0.0
    total = 0.0
    worst: complex | None = None
    for z in sample_disk(region, samples, seed):
        fv, f_pole = f(z)
        gv, g_pole = g(L(z))
        rv = evaluate(rhs, z)
        if f_pole or g_pole or not (_finite(fv) and _finite(gv) and _finite(rv)):
            skipped += 1
            continue
        residual = abs(fv ** n + gv ** m - rv) / (1.0 + abs(rv))
        if not math.isfinite(residual):
            skipped += 1
            continue
        used += 1
        total += residual
        if residual >= max_residual:
            max_residual = residual
            worst = z
    mean = total / used if used else 0.0
    passed = used >= (samples + 1) // 2 and used > 0 and max_residual <= tol
    return VerificationReport(
        samples_requested=samples,
        samples_used=used,
        skipped_near_pole=skipped,
        max_residual=max_residual if used else math.inf,
        mean_residual=mean if used else math.inf,
        worst_point=worst,
        seed=seed,
        tolerance=tol,
        passed=passed,
    )


def _contour_value(fn, z: complex) -> complex:
    value, at_pole = fn(z)
    if at_pole or not _finite(value):
        raise ContourError(f"contour touches a singularity near {z!r}")
    return value


def residue_at(fn, center: complex, radius: float, nodes: int = 256) -> complex:
    """(1 / 2 pi i) times the circle integral of fn around center.

    Equispaced trapezoid sums converge geometrically here, so the node
    count doubles until two successive answers agree to 1e-9, capped at
    4096 (the capped answer is returned as a best effort).
    """
    if not (radius > 0.0 and math.isfinite(radius)):
        raise ParameterError("radius must be positive and finite")
    if nodes < 16:
        raise ParameterError("need at least 16 contour nodes")
    n = nodes
    previous: complex | None = None
    while True:
        acc = 0.0j
        for k in range(n):
            offset = radius * cmath.exp(2j * math.pi * k / n)
            acc += _contour_value(fn, center + offset) * offset
        approx = acc / n
        if previous is not None and abs(approx - previous) <= _AGREEMENT:
            return approx
        if n >= _NODE_CAP:
            return approx
        previous = approx
        n *= 2


def _derivative_factory(fn, step: float):
    """Richardson-extrapolated central difference of a (value, pole) callable."""

    def deriv(z: complex) -> complex:
        coarse = (_contour_value(fn, z + step) - _contour_value(fn, z - step)) / (2.0 * step)
        fine = (_contour_value(fn, z + step / 2.0) - _contour_value(fn, z - step / 2.0)) / step
        return (4.0 * fine - coarse) / 3.0

    return deriv


def order_at(fn, center: complex, radius: float, nodes: int = 256) -> int:
    """Zero order (positive) or pole order (negative) of fn at center.

    Integrates fn'/fn around the circle; fn' uses central differences with
    Richardson extrapolation at step 1e-5 * radius, since fn is a black box.
    """
    step = 1e-5 * radius
    deriv = _derivative_factory(fn, step)

    def logderiv(z: complex):
        value = _contour_value(fn, z)
        if value == 0:
            raise ContourError(f"function vanishes on the contour at {z!r}")
        return deriv(z) / value, False

    integral = residue_at(logderiv, center, radius, nodes)
    nearest = round(integral.real)
    if abs(integral - nearest) > 0.1:
        raise InconclusiveOrderError(
            f"argument-principle integral {integral!r} is not near an integer"
        )
    return int(nearest)


def stable_residue(fn, center: complex, radius: float, nodes: int = 256) -> complex:
    """residue_at checked against the half-radius contour.

    Disagreement means the two circles enclose different singularity sets
    (the radius was too large) or the integrand is too rough to trust.
    """
    wide = residue_at(fn, center, radius, nodes)
    narrow = residue_at(fn, center, radius / 2.0, nodes)
    if abs(wide - narrow) > 1e-8 * (1.0 + abs(wide)):
        raise ContourError(
            f"residue changes under radius halving ({wide!r} vs {narrow!r}); "
            "the contour likely encloses extra singularities"
        )
    return narrow


def residue_identity_check(
    h: Expr,
    L: AffineMap,
    A: complex,
    eta: complex,
    b0: complex,
    ctx: EquianharmonicContext,
    radius: float | None = None,
    nodes: int = 256,
) -> tuple[complex, complex]:
    """Residues at b0 of the two sides of the logarithmic-derivative identity

        [h(L(z))]' / p(h(L(z))) + (1/sqrt(3)) [p(h(L(z)))]' / p(h(L(z)))
            = A eta [ h'(z) / p(h(z)) - (1/sqrt(3)) [p(h(z))]' / p(h(z)) ].

    Both sides are integrated independently; the caller compares them
    against the expected pattern in the measured pole orders.  Each side is
    validated by radius halving, so enclosing more than the singularity at
    b0 raises a contour error.
    """
    if radius is None:
        radius = 0.3 * abs(ctx.lat.omega1)
    step = 1e-5 * radius

    def inner(z: complex) -> complex:
        return evaluate(h, z)

    def inner_shifted(z: complex) -> complex:
        return evaluate(h, L(z))

    def p_of(scalar):
        def fn(z: complex):
            v = wp(scalar(z), ctx)
            if v.at_pole:
                return complex(math.nan, math.nan), True
            return v.p, False

        return fn

    def plain(scalar):
        def fn(z: complex):
            value = scalar(z)
            return value, not _finite(value)

        return fn

    p_h = p_of(inner)
    p_hL = p_of(inner_shifted)
    d_h = _derivative_factory(plain(inner), step)
    d_hL = _derivative_factory(plain(inner_shifted), step)
    d_p_h = _derivative_factory(p_h, step)
    d_p_hL = _derivative_factory(p_hL, step)

    def lhs_fn(z: complex):
        denom = _contour_value(p_hL, z)
        if denom == 0:
            raise ContourError(f"p(h(L(z))) vanishes on the contour at {z!r}")
        return d_hL(z) / denom + d_p_hL(z) / (SQRT3 * denom), False

    def rhs_fn(z: complex):
        denom = _contour_value(p_h, z)
        if denom == 0:
            raise ContourError(f"p(h(z)) vanishes on the contour at {z!r}")
        return A * eta * (d_h(z) / denom - d_p_h(z) / (SQRT3 * denom)), False

    lhs = stable_residue(lhs_fn, b0, radius, nodes)
    rhs = stable_residue(rhs_fn, b0, radius, nodes)
    return lhs, rhs
