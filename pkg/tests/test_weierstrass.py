import cmath
import math
import random

import numpy as np
import pytest
from scipy import special

from fermateq import (
    DegeneratePairError,
    DomainError,
    ParameterError,
    find_zeros,
    laurent_coefficients,
    make_context,
    real_half_period,
    reduce_to_cell,
    rotation_identity,
    rotation_identity_prime,
    translate_theta1,
    translate_theta2,
    wp,
    wp_addition,
)
from fermateq.weierstrass import _duplicate, _series_eval

A_PLUS = cmath.exp(1j * math.pi / 3.0)
A_MINUS = cmath.exp(-1j * math.pi / 3.0)


def cell_samples(ctx, count, seed, margin=0.05):
    """Random points of the fundamental cell at least margin*|omega1| from the lattice."""
    rng = random.Random(seed)
    lat = ctx.lat
    out = []
    while len(out) < count:
        z = rng.uniform(-0.5, 0.5) * lat.omega1 + rng.uniform(-0.5, 0.5) * lat.omega2
        if abs(reduce_to_cell(z, lat).reduced) >= margin * abs(lat.omega1):
            out.append(z)
    return out


def test_e1_is_the_real_cubic_root(ctx):
    # oracle: numpy root finder on 4 t^3 - 1
    roots = np.roots([4.0, 0.0, 0.0, -1.0])
    real_root = float(roots[np.argmin(np.abs(roots.imag))].real)
    assert abs(ctx.e1 - real_root) < 1e-12
    assert abs(ctx.e1 - 4.0 ** (-1.0 / 3.0)) < 1e-15
    assert abs(4.0 * ctx.e1 ** 3 - 1.0) < 1e-14


def test_half_period_against_gamma_closed_form():
    # oracle: Gamma(1/3)^3 / (4 pi) equals the inversion integral
    expected = float(special.gamma(1.0 / 3.0) ** 3 / (4.0 * math.pi))
    assert abs(real_half_period() - expected) < 1e-12


def test_lattice_normalization_by_eisenstein_sum(ctx):
    # oracle: the weight-6 lattice sum must make the cubic coefficient 1,
    # and hexagonal symmetry kills the weight-4 sum
    lat = ctx.lat
    N = 120
    mu, nu = np.meshgrid(np.arange(-N, N + 1), np.arange(-N, N + 1))
    w = mu * lat.omega1 + nu * lat.omega2
    w = w[(mu != 0) | (nu != 0)]
    g3 = 140.0 * np.sum(w ** -6.0)
    g2 = 60.0 * np.sum(w ** -4.0)
    assert abs(g3 - 1.0) < 1e-8
    assert abs(g2) < 1e-4  # truncated sum; structurally zero by symmetry


def test_laurent_recursion_hand_values():
    coeffs = laurent_coefficients(8)
    # c_2 .. c_9; hand derivation: c_3 = 1/28, c_6 = 3 c_3^2 / (13 * 3)
    assert coeffs[0] == 0.0
    assert coeffs[1] == 1.0 / 28.0
    assert coeffs[2] == 0.0
    assert abs(coeffs[4] - 1.0 / (13.0 * 28.0 ** 2)) < 1e-19
    # only every third coefficient survives when the quartic invariant is 0
    assert coeffs[3] == 0.0 and coeffs[5] == 0.0


def test_series_satisfies_ode_near_origin(ctx):
    rng = random.Random(1)
    for _ in range(50):
        z = cmath.rect(rng.uniform(0.2, 1.2), rng.uniform(0, 2 * math.pi))
        p, dp = _series_eval(ctx.coeffs, z)
        assert abs(dp * dp - (4.0 * p ** 3 - 1.0)) <= 1e-12 * (1.0 + abs(p) ** 3)


def test_half_period_value_and_critical_point(ctx):
    v = wp(ctx.lat.omega1 / 2.0, ctx)
    assert abs(v.p - ctx.e1) < 1e-12
    assert abs(v.dp) < 1e-11


def test_ode_residual_sweep(ctx):
    for z in cell_samples(ctx, 300, seed=2, margin=1e-3):
        v = wp(z, ctx)
        assert not v.at_pole
        assert abs(v.dp ** 2 - (4.0 * v.p ** 3 - 1.0)) <= 1e-9 * (1.0 + abs(v.p) ** 3)


def test_periodicity(ctx):
    lat = ctx.lat
    for z in cell_samples(ctx, 200, seed=3):
        base = wp(z, ctx)
        for period in (lat.omega1, lat.omega2, lat.omega1 + lat.omega2):
            shifted = wp(z + period, ctx)
            assert abs(shifted.p - base.p) <= 1e-9
            assert abs(shifted.dp - base.dp) <= 1e-9


def test_parity(ctx):
    for z in cell_samples(ctx, 100, seed=4):
        v = wp(z, ctx)
        w = wp(-z, ctx)
        assert abs(w.p - v.p) <= 1e-10
        assert abs(w.dp + v.dp) <= 1e-10


def test_pole_flagging(ctx):
    assert wp(0j, ctx).at_pole
    assert wp(ctx.lat.omega1 + ctx.lat.omega2 * 3, ctx).at_pole
    assert wp(0.5 * ctx.pole_radius + 0j, ctx).at_pole
    assert not wp(ctx.lat.omega1 / 2, ctx).at_pole
    with pytest.raises(DomainError):
        wp(complex(math.nan, 0), ctx)


def test_laurent_leading_coefficient_along_rays(ctx):
    # z^2 p(z) -> 1 approaching the pole along 8 rays
    for k in range(8):
        direction = cmath.exp(1j * math.pi * k / 4.0)
        for radius in (1e-2, 5e-3):
            z = radius * direction
            v = wp(z, ctx)
            assert abs(z * z * v.p - 1.0) < 1e-5


def test_cross_oracle_series_vs_duplication(ctx):
    # same point evaluated by the direct series and through halving-plus-
    # duplication; independent arithmetic paths must agree
    rng = random.Random(9)
    for _ in range(50):
        z = cmath.rect(rng.uniform(0.5, 1.3), rng.uniform(0, 2 * math.pi))
        direct = _series_eval(ctx.coeffs, z)
        doubled = _duplicate(*_series_eval(ctx.coeffs, z / 2.0))
        assert abs(direct[0] - doubled[0]) <= 1e-9 * (1 + abs(direct[0]))
        assert abs(direct[1] - doubled[1]) <= 1e-9 * (1 + abs(direct[1]))


def test_addition_formula_matches_direct(ctx):
    rng = random.Random(5)
    pairs = 0
    while pairs < 200:
        w, c = cell_samples(ctx, 2, seed=rng.randrange(10 ** 9))
        if abs(reduce_to_cell(w + c, ctx.lat).reduced) < 0.05 * abs(ctx.lat.omega1):
            continue
        vw, vc = wp(w, ctx), wp(c, ctx)
        if abs(vw.p - vc.p) < 1e-6:
            continue
        predicted = wp_addition(w, c, ctx)
        direct = wp(w + c, ctx).p
        assert abs(predicted - direct) <= 1e-8 * (1.0 + abs(direct))
        pairs += 1


def test_addition_formula_degenerate_pair(ctx):
    w = 0.4 + 0.3j
    with pytest.raises(DegeneratePairError):
        wp_addition(w, w, ctx)


def test_addition_with_theta1_simplifies(ctx):
    # substituting the zero data p(theta1) = 0, p'(theta1) = -i into the
    # addition formula collapses it to 2 i p(w) / (p'(w) - i)
    for w in cell_samples(ctx, 50, seed=6):
        v = wp(w, ctx)
        if abs(v.p) < 1e-3 or abs(v.dp - 1j) < 1e-3:
            continue
        via_formula = wp_addition(w, ctx.theta1, ctx)
        simplified = 2j * v.p / (v.dp - 1j)
        assert abs(via_formula - simplified) <= 1e-8 * (1.0 + abs(simplified))


def test_rotation_identity_all_roots(ctx):
    for A in (A_PLUS, A_MINUS, -1.0 + 0j):
        for z in cell_samples(ctx, 100, seed=7):
            lhs, rhs = rotation_identity(z, A, ctx)
            assert abs(lhs - rhs) <= 1e-8
            dl, dr = rotation_identity_prime(z, A, ctx)
            assert abs(dl - dr) <= 1e-8


def test_rotation_identity_rejects_other_roots(ctx):
    with pytest.raises(ParameterError):
        rotation_identity(0.3 + 0.2j, cmath.exp(1j * math.pi / 4.0), ctx)


def test_translate_theta1_closed_forms(ctx):
    for w in cell_samples(ctx, 100, seed=8):
        v = wp(w, ctx)
        if abs(v.dp + 1j) < 1e-3:
            continue
        p, dp = translate_theta1(w, A_PLUS, ctx)
        direct = wp(A_PLUS * w + ctx.theta1, ctx)
        assert abs(p - direct.p) <= 1e-8 * (1.0 + abs(direct.p))
        assert abs(dp - direct.dp) <= 1e-8 * (1.0 + abs(direct.dp))


def test_translate_theta2_closed_forms(ctx):
    for w in cell_samples(ctx, 60, seed=10):
        v = wp(w, ctx)
        if abs(v.dp - 1j) < 1e-3:
            continue
        p, dp = translate_theta2(w, A_MINUS, ctx)
        direct = wp(A_MINUS * w + ctx.theta2, ctx)
        assert abs(p - direct.p) <= 1e-8 * (1.0 + abs(direct.p))
        assert abs(dp - direct.dp) <= 1e-8 * (1.0 + abs(direct.dp))


def test_translate_theta1_at_theta2_value(ctx):
    # w = theta2 has p'(w) = i, so the closed form gives
    # dp = -i (i - 3i)/(i + i) = -i (-2i)/(2i) = -i * (-1) ... evaluate both ways
    w = ctx.theta2
    p, dp = translate_theta1(w, A_PLUS, ctx)
    expected_dp = -1j * (1j - 3j) / (1j + 1j)
    assert abs(dp - expected_dp) < 1e-9
    direct = wp(A_PLUS * w + ctx.theta1, ctx)
    assert abs(p - direct.p) < 1e-8
    assert abs(dp - direct.dp) < 1e-8
    # the translated point is another zero of p
    assert abs(direct.p) < 1e-8


def test_translate_theta1_degenerate_at_theta1(ctx):
    with pytest.raises(DegeneratePairError):
        translate_theta1(ctx.theta1, A_PLUS, ctx)


def test_zeros_match_cell_centroids(ctx):
    # oracle: for the hexagonal lattice the zeros sit at the two centroids
    # +-(omega1 + omega2)/3 of the fundamental cell
    lat = ctx.lat
    centroid = (lat.omega1 + lat.omega2) / 3.0
    assert abs(ctx.theta2 - centroid) < 1e-9
    assert abs(ctx.theta1 + centroid) < 1e-9


def test_find_zeros_reproduces_context(ctx):
    theta1, theta2 = find_zeros(ctx)
    assert abs(theta1 - ctx.theta1) < 1e-9
    assert abs(theta2 - ctx.theta2) < 1e-9
    v1, v2 = wp(theta1, ctx), wp(theta2, ctx)
    assert abs(v1.p) < 1e-9 and abs(v2.p) < 1e-9
    assert abs(v1.dp + 1j) < 1e-9
    assert abs(v2.dp - 1j) < 1e-9
    assert abs(v1.dp ** 2 + 1.0) < 1e-9


def test_zeros_come_in_opposite_pairs(ctx):
    # p is even, so -theta1 is also a zero; it must be theta2 modulo the lattice
    gap = reduce_to_cell(-ctx.theta1 - ctx.theta2, ctx.lat).reduced
    assert abs(gap) < 1e-9
    assert abs(wp(-ctx.theta1, ctx).p) < 1e-9


def test_context_invariants(ctx):
    ratio = ctx.lat.omega2 / ctx.lat.omega1
    assert abs(ratio - A_PLUS) < 1e-12
    assert ctx.series_terms == 24
    assert abs(ctx.pole_radius - 1e-3 * abs(ctx.lat.omega1)) < 1e-15
    with pytest.raises(ParameterError):
        make_context(pole_radius_factor=0.5)
