import cmath
import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from twistlat import specfun
from twistlat.errors import AtPole, OutOfDomain

GAMMA = 0.5772156649015329


def test_identity_suite():
    res = specfun.identity_suite(seed=3)
    assert set(res) == {"digamma_reflection", "digamma_reflection_polylog", "polygamma_reflection", "lerch_shift",
                        "lerch_derivative", "polygamma_zeta", "zeta_generating_function"}
    assert max(res.values()) <= 1e-8


@pytest.mark.parametrize("a, expected", [
    (1, -GAMMA),
    (0.5, -GAMMA - 2 * math.log(2)),
    (3, 1.5 - GAMMA),
])
def test_digamma_values(a, expected):
    assert abs(specfun.digamma(a) - expected) < 1e-14


def test_polygamma_and_zeta_values():
    assert abs(specfun.polygamma(1, 1) - math.pi ** 2 / 6) < 1e-14
    assert abs(specfun.polygamma(2, 1) + 2 * 1.2020569031595942) < 1e-13
    assert abs(specfun.zeta(4) - math.pi ** 4 / 90) < 1e-14
    assert specfun.zeta(0) == -0.5
    assert specfun.zeta(-2) == 0.0


def test_polylog_negative_order():
    z = 0.3 + 0.4j
    assert abs(specfun.polylog(0, z) - z / (1 - z)) < 1e-14
    assert abs(specfun.polylog(-1, z) - z / (1 - z) ** 2) < 1e-14
    assert abs(specfun.polylog(-2, z) - z * (1 + z) / (1 - z) ** 3) < 1e-14


@pytest.mark.parametrize("z", [0.3 + 0.2j, -0.9, 2j, -3 + 1j, 1.5 + 0.5j])
def test_lerch_against_logarithm(z):
    # Phi(z, 1, 1) = -log(1 - z) / z, on the series and integral domains alike
    assert abs(specfun.lerch_phi(z, 1, 1) + cmath.log(1 - z) / z) < 1e-10


def test_lerch_hurwitz_at_one():
    assert abs(specfun.lerch_phi(1, 2, 1) - math.pi ** 2 / 6) < 1e-12


def test_lerch_a_derivatives():
    z, a = -1 + 2j, 0.75
    d = specfun.lerch_a_derivatives(z, a, 2)
    assert abs(d[0] - z ** a * specfun.lerch_phi(z, 1, a)) < 1e-10
    h = 1e-4
    f = lambda t: specfun.lerch_a_derivatives(z, t, 0)[0]
    assert abs((f(a + h) - f(a - h)) / (2 * h) - d[1]) < 1e-6


def test_lerch_reflect_matches_integral():
    for z in (2j, 1 + 1j, -1 + 2j, -2 - 0.5j):
        for a in (0.25, 0.6):
            assert abs(specfun.lerch_reflect(z, a) - specfun.lerch_phi(z, 1, a)) < 1e-9


def test_poles_and_domains():
    with pytest.raises(AtPole):
        specfun.digamma(-2)
    with pytest.raises(AtPole):
        specfun.polygamma(1, 0)
    with pytest.raises(OutOfDomain):
        specfun.zeta(0.5)
    with pytest.raises(OutOfDomain):
        specfun.lerch_phi(2.0, 1, 1)
    with pytest.raises(OutOfDomain):
        specfun.lerch_reflect(0.5j, 0.3)
    with pytest.raises(OutOfDomain):
        specfun.lerch_reflect(2j, 1)


@settings(max_examples=80, deadline=None)
@given(st.floats(-4, 4), st.floats(-0.5, 0.5))
def test_digamma_reflection_property(re, im):
    a = complex(re, im)
    assume(abs(a - round(re)) > 1e-2)
    lhs = specfun.digamma(-a) - specfun.digamma(a + 1)
    assert abs(lhs - math.pi / cmath.tan(math.pi * a)) <= 1e-8 * max(1.0, abs(lhs))


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.8, 0.8), st.floats(-0.5, 0.5), st.floats(0.3, 4), st.integers(1, 3))
def test_lerch_shift_property(zr, zi, a, s):
    z = complex(zr, zi)
    assume(abs(z) < 0.9)
    lhs = specfun.lerch_phi(z, s, a)
    rhs = z * specfun.lerch_phi(z, s, a + 1) + a ** (-s)
    assert abs(lhs - rhs) < 1e-10
