"""Period-lattice arithmetic for doubly periodic functions.

A lattice is the set of integer combinations mu*omega1 + nu*omega2 of two
generators that are independent over the reals.  This module reduces points
into the fundamental cell centered at the origin, tests membership, and
checks whether multiplication by a unit-modulus constant maps the lattice
onto itself (the symmetry a hexagonal lattice has for sixth roots of unity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ParameterError


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class Lattice:
    """Lattice generators; Im(omega1/omega2) must be nonzero."""

    omega1: complex
    omega2: complex

    def __post_init__(self):
        if not (_finite(self.omega1) and _finite(self.omega2)):
            raise ParameterError("lattice generators must be finite")
        scale = abs(self.omega1) * abs(self.omega2)
        if scale == 0.0 or abs(self._det()) <= 1e-14 * scale:
            raise ParameterError("lattice generators are dependent over the reals")

    def _det(self) -> float:
        return self.omega1.real * self.omega2.imag - self.omega2.real * self.omega1.imag

    def point(self, mu: int, nu: int) -> complex:
        return mu * self.omega1 + nu * self.omega2

    def coords(self, z: complex) -> tuple[float, float]:
        """Real coordinates (a, b) with z = a*omega1 + b*omega2."""
        det = self._det()
        a = (z.real * self.omega2.imag - self.omega2.real * z.imag) / det
        b = (self.omega1.real * z.imag - z.real * self.omega1.imag) / det
        return a, b


@dataclass(frozen=True)
class CellCoords:
    """Decomposition z = reduced + mu*omega1 + nu*omega2.

    The reduced representative has basis coordinates in [-1/2, 1/2), so it
    lies in the fundamental cell centered at the origin.
    """

    reduced: complex
    mu: int
    nu: int


def reduce_to_cell(z: complex, lat: Lattice) -> CellCoords:
    """Reduce z into the origin-centered fundamental cell.

    A basis coordinate at exactly 1/2 rounds toward -1/2, which keeps the
    cell half-open and makes reduction idempotent on its own output.
    """
    if not _finite(z):
        raise DomainError(f"cannot reduce non-finite point {z!r}")
    a, b = lat.coords(z)
    mu = math.floor(a + 0.5)
    nu = math.floor(b + 0.5)
    return CellCoords(z - mu * lat.omega1 - nu * lat.omega2, mu, nu)


def is_lattice_point(z: complex, lat: Lattice, tol: float) -> bool:
    """True when z lies within tol of a lattice point.

    tol is dimensionless: the distance threshold is tol * |omega1|, since
    the lattice spacing sets the natural length scale.
    """
    if not tol > 0.0:
        raise ParameterError("tol must be positive")
    cc = reduce_to_cell(z, lat)
    return abs(cc.reduced) < tol * abs(lat.omega1)


def check_rotation_bijection(A: complex, lat: Lattice, tol: float) -> bool:
    """Whether multiplication by A maps the lattice onto itself.

    Requires |A| = 1.  Both images A*omega1 and A*omega2 landing on lattice
    points gives A*L inside L, and unit modulus then forces a bijection.
    """
    if abs(abs(A) - 1.0) > 1e-9:
        raise ParameterError(f"|A| must equal 1 within 1e-9, got {abs(A)!r}")
    return is_lattice_point(A * lat.omega1, lat, tol) and is_lattice_point(
        A * lat.omega2, lat, tol
    )
