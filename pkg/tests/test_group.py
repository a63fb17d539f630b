import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistlat.group import (
    adjoint_on_mode, check_central, commutator, g_element, group_battery, inverse, multiply, product,
    random_element, reduce_mod_Nphi, tau_element,
)

from conftest import setup_of

TOLS = {"associativity": 1e-10, "inverse_and_identity": 1e-10, "coboundary_closure": 1e-9,
        "coboundary_central": 1e-9, "quotient_soundness": 1e-9, "tau_commutators_scalar": 1e-10}


@pytest.mark.parametrize("name", ["example-6.1", "example-6.2", "hyperbolic-identity"])
def test_battery(name):
    res = group_battery(setup_of(name).ctx, seed=11, triples=100, pairs=30, central=30, quotient=30)
    for key, tol in TOLS.items():
        assert res[key] <= tol, key


def test_U_commutators_give_C():
    ctx = setup_of("example-6.2").ctx
    lat = ctx.lattice
    a, b = lat.vector("Lambda0"), lat.vector("alpha1")
    com = commutator(ctx.U(a), ctx.U(b), ctx)
    assert np.array_equal(com.lam, [0, 0, 0]) and np.allclose(com.h, 0)
    assert abs(com.c - np.exp(-1j * math.pi / 3)) < 1e-12


def test_g_is_central(setup):
    ctx = setup.ctx
    for i in range(ctx.rank):
        g = g_element(ctx.lattice.basis(i), ctx)
        assert check_central(g, ctx, trials=30)["max_residual"] < 1e-9
        for m in (0, 1):
            assert abs(adjoint_on_mode(g, np.eye(ctx.rank)[i], m, ctx)) < 1e-9


def test_normal_form_is_idempotent_and_class_invariant():
    ctx = setup_of("example-6.2").ctx
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = random_element(ctx, rng)
        nf = reduce_mod_Nphi(x, ctx)
        again = reduce_mod_Nphi(nf.element, ctx)
        assert again.residues == nf.residues
        assert again.element.distance(nf.element) < 1e-9
        lam = rng.integers(-3, 4, size=ctx.rank)
        moved = reduce_mod_Nphi(multiply(g_element(lam, ctx), x, ctx), ctx)
        assert moved.residues == nf.residues and moved.element.distance(nf.element) < 1e-9


def test_identity_lattice_quotient_reduces_h():
    ctx = setup_of("hyperbolic-identity").ctx
    x = multiply(ctx.U([1, 2]), ctx.exp_h([2j * math.pi * 3.25, -2j * math.pi * 1.5]), ctx)
    nf = reduce_mod_Nphi(x, ctx)
    coords = nf.element.h / (2j * math.pi)
    assert np.all(coords.real >= -1e-9) and np.all(coords.real < 1 + 1e-9)


coords = st.lists(st.integers(-3, 3), min_size=3, max_size=3).map(np.array)
phases = st.floats(0, 2 * math.pi)


@settings(max_examples=60, deadline=None)
@given(coords, coords, coords, coords, phases, phases)
def test_associativity_property(l1, l2, l3, t, p1, p2):
    ctx = setup_of("example-6.2").ctx
    x = multiply(ctx.scalar(np.exp(1j * p1)), ctx.U(l1), ctx)
    y = multiply(ctx.U(l2), tau_element(t, ctx), ctx)
    z = multiply(ctx.scalar(np.exp(1j * p2)), ctx.U(l3), ctx)
    lhs = multiply(multiply(x, y, ctx), z, ctx)
    rhs = multiply(x, multiply(y, z, ctx), ctx)
    assert lhs.distance(rhs) <= 1e-9 * max(1.0, abs(lhs.c))
    assert product(ctx, x, inverse(x, ctx)).distance(ctx.identity()) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(coords, coords)
def test_coboundary_closure_property(a, b):
    ctx = setup_of("example-6.2").ctx
    lhs = multiply(g_element(a, ctx), g_element(b, ctx), ctx)
    assert lhs.distance(g_element(a + b, ctx)) <= 1e-8
