"""Equianharmonic Weierstrass elliptic function with (p')^2 = 4 p^3 - 1.

The period lattice is hexagonal, omega2 = e^{i pi/3} * omega1, and the real
generator is fixed by the inversion integral

    omega1 = 2 * int_{e1}^{inf} dt / sqrt(4 t^3 - 1),   e1 = 4^{-1/3},

where e1 is the real root of 4 t^3 - 1 and the half-period value satisfies
p(omega1 / 2) = e1.  This normalization makes the invariants of the cubic
(0, 1), so the Laurent expansion about the origin is

    p(z) = z^{-2} + sum_{k >= 2} c_k z^{2k - 2},
    c_2 = 0,  c_3 = 1/28,
    c_k = 3 / ((2k + 1)(k - 3)) * sum_{m=2}^{k-2} c_m c_{k-m}   (k >= 4),

the quadratic recursion obtained by differentiating the defining equation
twice.  Evaluation reduces the argument to the origin-centered fundamental
cell; inside the series radius the expansion above is summed directly, and
beyond it a single argument halving is undone with the duplication formulas

    p(2w)  = -2 p + (1/4) (p'' / p')^2,
    p'(2w) = (1/4) p'' (12 p p'^2 - p''^2) / p'^3 - p',

where p'' = 6 p^2 and p''' = 12 p p' follow from (p')^2 = 4 p^3 - 1.  The
duplication line is the confluent limit of the algebraic addition formula

    p(w + c) = (1/4) [(p'(w) - p'(c)) / (p(w) - p(c))]^2 - p(w) - p(c).

p has two simple zeros per cell, labeled theta1 and theta2 with
p'(theta1) = -i and p'(theta2) = +i; for this hexagonal lattice they sit at
-(omega1 + omega2)/3 and +(omega1 + omega2)/3.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

from scipy import integrate

from .errors import ConstructionError, DegeneratePairError, DomainError, ParameterError
from .lattice import Lattice, reduce_to_cell

SQRT3 = math.sqrt(3.0)

_NAN = complex(float("nan"), float("nan"))

# Reduced arguments up to this fraction of |omega1| go straight to the series;
# the cell corner is at (sqrt(3)/2)|omega1|, so one halving always suffices.
_SERIES_RADIUS_FACTOR = 0.45


@dataclass(frozen=True)
class WpValue:
    """A function/derivative pair, with poles flagged in-band."""

    p: complex
    dp: complex
    at_pole: bool


@dataclass(frozen=True)
class EquianharmonicContext:
    """Immutable evaluation context: lattice, zero locations, tuning constants."""

    lat: Lattice
    theta1: complex
    theta2: complex
    e1: float
    series_terms: int
    pole_radius: float
    coeffs: tuple[float, ...]


def laurent_coefficients(series_terms: int, g2: float = 0.0, g3: float = 1.0) -> tuple[float, ...]:
    """Coefficients c_k, k = 2 .. series_terms + 1, of the expansion about 0."""
    if series_terms < 2:
        raise ParameterError("series_terms must be at least 2")
    c = {2: g2 / 20.0, 3: g3 / 28.0}
    for k in range(4, series_terms + 2):
        acc = 0.0
        for m in range(2, k - 1):
            acc += c[m] * c[k - m]
        c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3))
    return tuple(c[k] for k in range(2, series_terms + 2))


@functools.lru_cache(maxsize=1)
def real_half_period() -> float:
    """int_{e1}^{inf} dt / sqrt(4 t^3 - 1) by quadrature (t = e1 + s^2)."""
    e1 = 4.0 ** (-1.0 / 3.0)

    def integrand(s: float) -> float:
        t = e1 + s * s
        return 2.0 * s / math.sqrt(4.0 * t * t * t - 1.0)

    value, _ = integrate.quad(integrand, 0.0, math.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
    return value


def _series_eval(coeffs: tuple[float, ...], z: complex) -> tuple[complex, complex]:
    z2 = z * z
    p = 1.0 / z2
    dp = -2.0 / (z2 * z)
    zpow = z2  # z^{2k-2} starting at k = 2
    for k in range(2, len(coeffs) + 2):
        ck = coeffs[k - 2]
        p += ck * zpow
        dp += (2 * k - 2) * ck * zpow / z
        zpow *= z2
    return p, dp


def _duplicate(p: complex, dp: complex) -> tuple[complex, complex]:
    ddp = 6.0 * p * p
    p2 = -2.0 * p + 0.25 * (ddp / dp) ** 2
    dp2 = 0.25 * ddp * (12.0 * p * dp * dp - ddp * ddp) / dp ** 3 - dp
    return p2, dp2


def _wp_core(lat: Lattice, coeffs: tuple[float, ...], pole_radius: float, z: complex) -> WpValue:
    reduced = reduce_to_cell(z, lat).reduced
    if abs(reduced) <= pole_radius:
        return WpValue(_NAN, _NAN, True)
    if abs(reduced) <= _SERIES_RADIUS_FACTOR * abs(lat.omega1):
        p, dp = _series_eval(coeffs, reduced)
    else:
        p, dp = _duplicate(*_series_eval(coeffs, reduced / 2.0))
    return WpValue(p, dp, False)


def _locate_zeros(
    lat: Lattice, coeffs: tuple[float, ...], pole_radius: float
) -> tuple[complex, complex]:
    """Grid scan plus Newton iteration for the two zeros in the cell."""
    for grid in (19, 37):
        zeros: list[complex] = []
        steps = [(-0.5 + (j + 0.5) / grid) for j in range(grid)]
        seeds = sorted(
            (a * lat.omega1 + b * lat.omega2 for a in steps for b in steps),
            key=lambda w: _abs_p(lat, coeffs, pole_radius, w),
        )
        for seed in seeds[: 4 * grid]:
            root = _newton_zero(lat, coeffs, pole_radius, seed)
            if root is None:
                continue
            root = reduce_to_cell(root, lat).reduced
            if all(
                abs(reduce_to_cell(root - known, lat).reduced) > 1e-6 * abs(lat.omega1)
                for known in zeros
            ):
                zeros.append(root)
            if len(zeros) == 2:
                break
        if len(zeros) == 2:
            first, second = zeros
            v1 = _wp_core(lat, coeffs, pole_radius, first)
            if v1.dp.imag < 0.0:
                return first, second
            return second, first
    raise ConstructionError("zero search did not find two distinct zeros")


def _abs_p(lat, coeffs, pole_radius, w) -> float:
    v = _wp_core(lat, coeffs, pole_radius, w)
    return abs(v.p) if not v.at_pole else math.inf


def _newton_zero(lat, coeffs, pole_radius, seed: complex) -> complex | None:
    z = seed
    for _ in range(60):
        v = _wp_core(lat, coeffs, pole_radius, z)
        if v.at_pole or abs(v.dp) < 1e-12:
            return None
        step = v.p / v.dp
        z = z - step
        if abs(step) < 1e-14 * abs(lat.omega1):
            check = _wp_core(lat, coeffs, pole_radius, z)
            if not check.at_pole and abs(check.p) < 1e-11:
                return z
            return None
    return None


def make_context(series_terms: int = 24, pole_radius_factor: float = 1e-3) -> EquianharmonicContext:
    """Build the evaluation context for the normalization (p')^2 = 4 p^3 - 1."""
    if not 0.0 < pole_radius_factor <= 0.1:
        raise ParameterError("pole_radius_factor must lie in (0, 0.1]")
    e1 = 4.0 ** (-1.0 / 3.0)
    omega1 = complex(2.0 * real_half_period(), 0.0)
    omega2 = cmath.exp(1j * math.pi / 3.0) * omega1
    lat = Lattice(omega1, omega2)
    coeffs = laurent_coefficients(series_terms)
    pole_radius = pole_radius_factor * abs(omega1)
    theta1, theta2 = _locate_zeros(lat, coeffs, pole_radius)
    ctx = EquianharmonicContext(lat, theta1, theta2, e1, series_terms, pole_radius, coeffs)
    _validate_context(ctx)
    return ctx


def _validate_context(ctx: EquianharmonicContext) -> None:
    lat = ctx.lat
    hex_gap = abs(lat.omega2 - cmath.exp(1j * math.pi / 3.0) * lat.omega1)
    if hex_gap > 1e-12 * abs(lat.omega1):
        raise ConstructionError("lattice is not hexagonal")
    if abs(4.0 * ctx.e1 ** 3 - 1.0) >= 1e-14:
        raise ConstructionError("e1 is not a root of 4 t^3 - 1")
    v1 = wp(ctx.theta1, ctx)
    v2 = wp(ctx.theta2, ctx)
    if abs(v1.p) > 1e-9 or abs(v2.p) > 1e-9:
        raise ConstructionError("zero locations are inaccurate")
    if abs(v1.dp + 1j) > 1e-9 or abs(v2.dp - 1j) > 1e-9:
        raise ConstructionError("zero labeling by the sign of Im p' failed")
    if abs(reduce_to_cell(ctx.theta1 - ctx.theta2, lat).reduced) < 1e-6 * abs(lat.omega1):
        raise ConstructionError("zeros are not distinct")


def wp(z: complex, ctx: EquianharmonicContext) -> WpValue:
    """Evaluate p and p' at z; lattice points are reported via at_pole."""
    return _wp_core(ctx.lat, ctx.coeffs, ctx.pole_radius, z)


def find_zeros(ctx: EquianharmonicContext) -> tuple[complex, complex]:
    """Re-run the zero search on the context lattice (theta1 first)."""
    return _locate_zeros(ctx.lat, ctx.coeffs, ctx.pole_radius)


def _require_away_from_poles(ctx: EquianharmonicContext, *points: complex) -> None:
    for z in points:
        if abs(reduce_to_cell(z, ctx.lat).reduced) <= ctx.pole_radius:
            raise DomainError(f"{z!r} is within the pole exclusion radius of a lattice point")


def _require_cube_root_of_minus_one(A: complex, tol: float = 1e-9) -> None:
    if abs(A ** 3 + 1.0) > tol:
        raise ParameterError(f"A^3 must equal -1 within {tol:g}, got A = {A!r}")


def wp_addition(w: complex, c: complex, ctx: EquianharmonicContext) -> complex:
    """Algebraic addition value for p(w + c) from data at w and c."""
    _require_away_from_poles(ctx, w, c, w + c)
    vw = wp(w, ctx)
    vc = wp(c, ctx)
    den = vw.p - vc.p
    if abs(den) < 1e-10:
        raise DegeneratePairError("p(w) and p(c) coincide; the addition formula degenerates")
    return 0.25 * ((vw.dp - vc.dp) / den) ** 2 - vw.p - vc.p


def rotation_identity(z: complex, A: complex, ctx: EquianharmonicContext) -> tuple[complex, complex]:
    """Return (p(A z), -A p(z)); the two agree when A^3 = -1."""
    _require_cube_root_of_minus_one(A)
    _require_away_from_poles(ctx, z, A * z)
    return wp(A * z, ctx).p, -A * wp(z, ctx).p


def rotation_identity_prime(
    z: complex, A: complex, ctx: EquianharmonicContext
) -> tuple[complex, complex]:
    """Return (p'(A z), -p'(z)); the two agree when A^3 = -1."""
    _require_cube_root_of_minus_one(A)
    _require_away_from_poles(ctx, z, A * z)
    return wp(A * z, ctx).dp, -wp(z, ctx).dp


def translate_theta1(
    w: complex, A: complex, ctx: EquianharmonicContext
) -> tuple[complex, complex]:
    """Closed forms of p(A w + theta1) and p'(A w + theta1).

    With p(theta1) = 0 and p'(theta1) = -i, composing the rotation identity
    with the addition formula collapses to

        p(A w + theta1)  = 2 i A p(w) / (p'(w) + i),
        p'(A w + theta1) = -i (p'(w) - 3 i) / (p'(w) + i).
    """
    _require_cube_root_of_minus_one(A)
    _require_away_from_poles(ctx, w)
    v = wp(w, ctx)
    den = v.dp + 1j
    if abs(den) < 1e-10:
        raise DegeneratePairError("p'(w) is at -i; the translated value degenerates")
    return 2j * A * v.p / den, -1j * (v.dp - 3j) / den


def translate_theta2(
    w: complex, A: complex, ctx: EquianharmonicContext
) -> tuple[complex, complex]:
    """Closed forms of p(A w + theta2) and p'(A w + theta2).

    Mirror of translate_theta1 under i -> -i, since p'(theta2) = +i:

        p(A w + theta2)  = -2 i A p(w) / (p'(w) - i),
        p'(A w + theta2) = i (p'(w) + 3 i) / (p'(w) - i).
    """
    _require_cube_root_of_minus_one(A)
    _require_away_from_poles(ctx, w)
    v = wp(w, ctx)
    den = v.dp - 1j
    if abs(den) < 1e-10:
        raise DegeneratePairError("p'(w) is at +i; the translated value degenerates")
    return -2j * A * v.p / den, 1j * (v.dp + 3j) / den
