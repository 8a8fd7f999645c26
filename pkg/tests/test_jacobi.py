import cmath
import math
import random

import pytest
from scipy import special

from fermateq import DomainError, pole_near, quarter_period, sn
from fermateq.jacobi import _EndpointPole, _run_path, _sn_along


def test_normalization_at_origin():
    v = sn(0j)
    assert v.s == 0j
    assert v.ds == 1 + 0j
    assert not v.at_pole


def test_quarter_period_against_agm_oracle():
    # oracle: the complete elliptic integral at parameter -1 equals
    # int_0^{pi/2} dphi / sqrt(1 + sin^2 phi), evaluated by an AGM routine
    assert abs(quarter_period() - float(special.ellipk(-1.0))) < 1e-12


def test_value_at_quarter_period():
    K = quarter_period()
    v = sn(complex(K, 0.0))
    assert abs(v.s - 1.0) < 1e-10
    assert abs(v.ds) < 1e-10


def test_small_argument_taylor_oracle():
    # hand-derived from s'' = -2 s^3:  s = z - z^5/10 + z^9/120 + O(z^13)
    for z in (0.05 + 0j, 0.03 - 0.04j, -0.02 + 0.05j):
        expected = z - z ** 5 / 10.0 + z ** 9 / 120.0
        assert abs(sn(z).s - expected) < 1e-12


def test_oddness():
    rng = random.Random(12)
    checked = 0
    while checked < 100:
        z = complex(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5))
        v = sn(z)
        w = sn(-z)
        if v.at_pole or w.at_pole:
            continue
        assert abs(w.s + v.s) <= 1e-9 * (1.0 + abs(v.s))
        assert abs(w.ds - v.ds) <= 1e-9 * (1.0 + abs(v.ds))
        checked += 1


def test_ode_residual_disk():
    rng = random.Random(13)
    checked = 0
    while checked < 500:
        z = cmath.rect(3.0 * math.sqrt(rng.random()), 2 * math.pi * rng.random())
        v = sn(z)
        if v.at_pole:
            continue
        # relative form holds everywhere off the poles
        assert abs(v.ds ** 2 + v.s ** 4 - 1.0) <= 1e-8 * (1.0 + abs(v.s) ** 4)
        if abs(v.s) > 3.5:  # pole neighborhood: |s| ~ 1/distance
            continue
        assert abs(v.ds ** 2 + v.s ** 4 - 1.0) <= 1e-8
        checked += 1


def test_rotation_symmetry():
    # sn(i z) = i sn(z): both sides solve the same initial value problem
    rng = random.Random(14)
    checked = 0
    while checked < 20:
        z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        v, w = sn(z), sn(1j * z)
        if v.at_pole or w.at_pole:
            continue
        assert abs(w.s - 1j * v.s) <= 1e-9 * (1 + abs(v.s))
        checked += 1


def test_path_independence():
    # single-valuedness: a straight path and a two-segment path reach the
    # same value; pole-grazing paths are skipped since they are exactly what
    # the evaluator's own planner avoids
    rng = random.Random(15)
    checked = 0
    while checked < 30:
        z = complex(rng.uniform(-2.2, 2.2), rng.uniform(-2.2, 2.2))
        mid = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        try:
            direct, spike_a = _run_path(z, ())
            detour, spike_b = _run_path(z, (mid,))
        except _EndpointPole:
            continue
        if direct is None or detour is None or max(spike_a, spike_b) > 20.0:
            continue
        assert abs(direct.s - detour.s) <= 1e-8 * (1 + abs(direct.s))
        assert abs(direct.ds - detour.ds) <= 1e-8 * (1 + abs(direct.ds))
        checked += 1


def test_poles_sit_at_diagonal_quarter_periods():
    # oracle: blow-up scan; the refined location must be (1 + i) K
    K = quarter_period()
    pole = pole_near(1.2 + 1.4j)
    assert abs(pole - (1 + 1j) * K) < 1e-8
    mirrored = pole_near(-1.2 - 1.4j)
    assert abs(mirrored + (1 + 1j) * K) < 1e-8


def test_pole_flagged_in_band():
    K = quarter_period()
    assert sn((1 + 1j) * K).at_pole
    near = sn((1 + 1j) * K * (1.0 + 1e-12))
    assert near.at_pole


def test_blowup_magnitude_matches_simple_pole():
    # simple pole: |sn| scales like 1/|z - pole|
    K = quarter_period()
    pole = (1 + 1j) * K
    for eps in (1e-3, 1e-4):
        v = sn(pole + eps * cmath.exp(0.3j))
        assert not v.at_pole
        assert 0.1 / eps < abs(v.s) < 10.0 / eps


def test_nonfinite_argument_rejected():
    with pytest.raises(DomainError):
        sn(complex(math.inf, 0.0))
