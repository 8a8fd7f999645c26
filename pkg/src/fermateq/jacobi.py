"""Degenerate Jacobi elliptic sine normalized by (sn')^2 = 1 - sn^4.

sn is the odd solution of s'' = -2 s^3 with s(0) = 0 and s'(0) = 1, the
inverse of the arclength integral int_0^x dt / sqrt(1 - t^4).  It is
single valued and meromorphic with simple poles, the nearest ones to the
origin sitting at (+-1 +- i) K, where the quarter period is

    K = int_0^1 dt / sqrt(1 - t^4)
      = int_0^{pi/2} dphi / sqrt(1 + sin^2 phi)   (t = sin phi),

and sn(K) = 1.

Values come from eighth-order adaptive integration of the first-order
system (s, v)' = (v, -2 s^3) along a path from the origin, split into real
and imaginary parts.  |s| exceeding 1e8 flags a pole in-band (poles are
simple, so blow-up is sharp).  A path that merely grazes a pole poisons
the downstream accuracy far beyond the local tolerance, so the evaluator
monitors the largest |s| seen along the way and, when that spike dwarfs
the endpoint value, retries the run through fixed perpendicular waypoints
and keeps the quietest path.  All candidate paths are fixed functions of
the target point, so results are deterministic.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

from scipy import integrate

from .errors import ConstructionError, DomainError

BLOWUP_THRESHOLD = 1e8

_RTOL = 1e-13
_ATOL = 1e-13
_NAN = complex(float("nan"), float("nan"))
_Y0 = (0.0, 0.0, 1.0, 0.0)

# A path whose |s| spike stays under this is accepted immediately; larger
# spikes trigger detours unless the endpoint itself is comparably large.
_QUIET_SPIKE = 20.0

# Fraction of the final leg past which a blow-up is read as "the endpoint
# itself sits at a pole" rather than "the path crossed one".
_ENDPOINT_FRACTION = 0.999

# Perpendicular waypoint offsets, in units of |z|, tried in this order.
_DETOUR_OFFSETS = (0.4, -0.4, 0.8, -0.8, 1.2, -1.2)


@dataclass(frozen=True)
class SnValue:
    """sn and its derivative, with poles flagged in-band."""

    s: complex
    ds: complex
    at_pole: bool


@functools.lru_cache(maxsize=1)
def quarter_period() -> float:
    """K computed by quadrature of the smooth substituted integrand."""

    def integrand(phi: float) -> float:
        si = math.sin(phi)
        return 1.0 / math.sqrt(1.0 + si * si)

    value, _ = integrate.quad(integrand, 0.0, math.pi / 2.0, epsabs=1e-15, epsrel=1e-14)
    return value


# An adaptive integrator creeping into a pole can take an unbounded number
# of ever-shrinking steps; past this many the leg is classified as blown.
_STEP_CAP = 20000


def _leg(z0: complex, z1: complex, y0):
    """Integrate one straight segment with a manual stepping loop.

    Returns (state, blew_up, stop_fraction, spike) where spike is the
    largest |s| recorded along the accepted steps.  Blow-up means |s|
    crossed the pole threshold, the step size collapsed, or the step cap
    was exhausted while |s| was climbing; all three happen only when the
    segment runs into a pole.
    """
    dz = z1 - z0

    def rhs(t, y):
        s = complex(y[0], y[1])
        v = complex(y[2], y[3])
        ds = dz * v
        dv = dz * (-2.0 * s * s * s)
        return (ds.real, ds.imag, dv.real, dv.imag)

    solver = integrate.DOP853(rhs, 0.0, y0, 1.0, rtol=_RTOL, atol=_ATOL)
    spike = 0.0
    steps = 0
    while solver.status == "running":
        solver.step()
        steps += 1
        mag = math.hypot(solver.y[0], solver.y[1])
        spike = max(spike, mag)
        if not math.isfinite(mag) or mag >= BLOWUP_THRESHOLD:
            return tuple(solver.y), True, float(solver.t), spike
        if steps >= _STEP_CAP:
            return tuple(solver.y), True, float(solver.t), spike
    if solver.status == "failed":
        return tuple(solver.y), True, float(solver.t), spike
    return tuple(solver.y), False, 1.0, spike


class _EndpointPole(Exception):
    pass


def _run_path(z: complex, waypoints: tuple[complex, ...]) -> tuple[SnValue | None, float]:
    """Integrate through the waypoints; (None, spike) means a mid-path blow-up."""
    y = _Y0
    legs = [complex(0.0, 0.0), *waypoints, z]
    spike = 0.0
    for i in range(len(legs) - 1):
        y, blown, stop, leg_spike = _leg(legs[i], legs[i + 1], y)
        spike = max(spike, leg_spike)
        if blown:
            if i == len(legs) - 2 and stop >= _ENDPOINT_FRACTION:
                raise _EndpointPole
            return None, spike
    return SnValue(complex(y[0], y[1]), complex(y[2], y[3]), False), spike


def _sn_along(z: complex, waypoints: tuple[complex, ...]) -> SnValue | None:
    """Raw path integration (test hook); None when the path crosses a pole."""
    try:
        value, _ = _run_path(z, waypoints)
    except _EndpointPole:
        return SnValue(_NAN, _NAN, True)
    return value


@functools.lru_cache(maxsize=200000)
def _sn_cached(z: complex) -> SnValue:
    if z == 0:
        return SnValue(complex(0.0, 0.0), complex(1.0, 0.0), False)
    perp = 1j * z / abs(z)
    best: SnValue | None = None
    best_spike = math.inf
    try:
        for path in ((), *((0.5 * z + k * abs(z) * perp,) for k in _DETOUR_OFFSETS)):
            value, spike = _run_path(z, path)
            if value is None:
                continue
            if spike <= max(_QUIET_SPIKE, 4.0 * (1.0 + abs(value.s))):
                return value
            if spike < best_spike:
                best, best_spike = value, spike
    except _EndpointPole:
        return SnValue(_NAN, _NAN, True)
    if best is not None:
        # No quiet path exists; return the least-grazing one as a best effort.
        return best
    return SnValue(_NAN, _NAN, True)


def sn(z: complex) -> SnValue:
    """Evaluate sn and sn' at z."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"sn argument must be finite, got {z!r}")
    return _sn_cached(z)


def pole_near(z0: complex, max_iter: int = 16) -> complex:
    """Refine a pole location from a nearby seed.

    Iterates u <- u + sn(u)/sn'(u); near a simple pole the step equals the
    displacement to the pole, so convergence is fast.  Landing close enough
    that evaluation itself blows up counts as converged.
    """
    u = complex(z0)
    for _ in range(max_iter):
        v = sn(u)
        if v.at_pole:
            return u
        step = v.s / v.ds
        u = u + step
        if abs(step) < 1e-12:
            return u
    raise ConstructionError(f"pole refinement did not converge from {z0!r}")
