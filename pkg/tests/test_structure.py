import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistlat.errors import BadInput, NotLatticeVector
from twistlat.structure import (
    B_constant, B_oracle, C_constant, a_lambda, b_lambda, c_lambda, pair_constants, tau_argument,
)

from conftest import setup_of

# [DERIVED] B from the 10^4-term mode-sum oracle; the single-vector
# constants below come from exact sympy algebra with N = -log(phi) / 2 pi i.
B_FROZEN = {
    ("example-6.1", "lambda1", "lambda3"): cmath.exp(-1j * math.pi / 12),
    ("example-6.1", "lambda3", "lambda1"): cmath.exp(1j * math.pi / 12),
    ("example-6.1", "lambda1", "lambda2"): 1,
    ("example-6.1", "lambda2", "lambda4"): 1,
    ("example-6.2", "Lambda0", "alpha1"): cmath.exp(1j * math.pi / 6),
    ("example-6.2", "alpha1", "Lambda0"): cmath.exp(-1j * math.pi / 6),
    ("example-6.2", "Lambda0", "Lambda0"): 0.9409202303697242,
    ("example-6.2", "delta", "Lambda0"): 1,
}

# U-commutation scalars of the two presets
C_REFERENCE = {
    "example-6.1": {("lambda1", "lambda2"): 1, ("lambda1", "lambda3"): cmath.exp(1j * math.pi / 6),
                    ("lambda1", "lambda4"): -1, ("lambda2", "lambda3"): -1, ("lambda2", "lambda4"): 1,
                    ("lambda3", "lambda4"): 1},
    "example-6.2": {("Lambda0", "alpha1"): cmath.exp(-1j * math.pi / 3), ("Lambda0", "delta"): -1,
                    ("alpha1", "delta"): 1},
}


@pytest.mark.parametrize("key", sorted(B_FROZEN))
def test_B_frozen(key):
    name, a, b = key
    s = setup_of(name)
    assert abs(B_constant(s.jd, s.lattice.vector(a), s.lattice.vector(b)) - B_FROZEN[key]) < 1e-9


@pytest.mark.parametrize("name", ["example-6.1", "example-6.2"])
def test_C_reference_values(name):
    s = setup_of(name)
    for (a, b), expected in C_REFERENCE[name].items():
        assert abs(C_constant(s.jd, s.lattice, s.lattice.vector(a), s.lattice.vector(b)) - expected) < 1e-10


def test_lambda0_single_constants():
    s = setup_of("example-6.2")
    lam = s.lattice.vector("Lambda0")
    assert abs(b_lambda(s.jd, lam)) < 1e-15
    a = a_lambda(s.jd, lam)
    assert np.allclose(a.coef, [0, 0, 1 / (24 * math.pi ** 2)], atol=1e-15)
    assert abs(c_lambda(s.jd, lam) + 1 / 6) < 1e-14
    for name in ("alpha1", "delta"):
        v = s.lattice.vector(name)
        assert abs(c_lambda(s.jd, v)) < 1e-15 and np.allclose(a_lambda(s.jd, v).coef, 0)


def test_example_a_single_constants_vanish():
    s = setup_of("example-6.1")
    for i in range(4):
        lam = s.lattice.basis(i)
        assert abs(b_lambda(s.jd, lam)) + abs(c_lambda(s.jd, lam)) < 1e-15
        assert np.allclose(a_lambda(s.jd, lam).coef, 0)


def test_tau_argument_unipotent():
    s = setup_of("example-6.2")
    lam = np.array([0, 0, 1.0])
    v = tau_argument(s.jd, lam)
    n = s.jd.nilp
    expected = 2j * math.pi * lam - (2j * math.pi) ** 2 / 2 * n @ lam + (2j * math.pi) ** 3 / 6 * n @ n @ lam
    assert np.allclose(v, expected)


@pytest.mark.parametrize("name", ["example-6.1", "example-6.2"])
def test_B_oracle_agreement(name):
    s = setup_of(name)
    n = s.lattice.rank
    for i in range(n):
        for j in range(n):
            b = B_constant(s.jd, s.lattice.basis(i), s.lattice.basis(j))
            assert abs(b - B_oracle(s.jd, s.lattice.basis(i), s.lattice.basis(j))) <= 1e-6 * abs(b)


def test_B_oracle_needs_terms():
    s = setup_of("example-6.2")
    with pytest.raises(BadInput):
        B_oracle(s.jd, [1, 0, 0], [0, 0, 1], terms=10)


def test_C_needs_lattice_vectors():
    s = setup_of("example-6.2")
    with pytest.raises(NotLatticeVector):
        C_constant(s.jd, s.lattice, [0.5, 0, 0], [1, 0, 0])


vec3 = st.lists(st.integers(-4, 4), min_size=3, max_size=3).map(np.array)


@settings(max_examples=50, deadline=None)
@given(vec3, vec3, vec3)
def test_C_commutator_properties(a, b, c):
    s = setup_of("example-6.2")
    jd, lat = s.jd, s.lattice
    C = lambda x, y: C_constant(jd, lat, x, y)
    assert abs(C(a, b) * C(b, a) - 1) < 1e-9
    assert abs(C(a + b, c) - C(a, c) * C(b, c)) < 1e-9
    sign = (-1) ** int(lat.pair(a, b) + lat.norm(a) * lat.norm(b))
    assert abs(C(a, b) - sign * B_constant(jd, b, a) / B_constant(jd, a, b)) < 1e-9


def test_degenerate_lattice_constants():
    s = setup_of("hyperbolic-identity")
    lat = s.lattice
    for lam in ([1, 0], [0, 1], [2, -3], [1, 1]):
        for mu in ([1, 0], [0, 1], [-1, 4]):
            lam_v, mu_v = np.array(lam), np.array(mu)
            pc = pair_constants(s.jd, lat, lam_v, mu_v)
            assert abs(pc.B - 1) <= 1e-12
            sign = (-1) ** int(lat.pair(lam_v, mu_v) + lat.norm(lam_v) * lat.norm(mu_v))
            assert abs(pc.C - sign) <= 1e-12
        assert np.allclose(a_lambda(s.jd, lam).coef, 0, atol=1e-12)
        assert abs(c_lambda(s.jd, lam) - b_lambda(s.jd, lam)) <= 1e-12
