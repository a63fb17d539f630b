import functools

import numpy as np
import pytest

from twistlat import load
from twistlat.fock import add_to, apply_keywise

EXAMPLES = ("example-6.1", "example-6.2", "hyperbolic-identity")


@functools.lru_cache(maxsize=None)
def setup_of(name):
    return load(name)


@functools.lru_cache(maxsize=None)
def module_of(name, cutoff=3.0):
    fm = setup_of(name).module(cutoff=cutoff)
    fm.basis()
    return fm


@pytest.fixture(params=EXAMPLES)
def example(request):
    return request.param


@pytest.fixture
def setup(example):
    return setup_of(example)


def unit(n, i, dtype=np.int64):
    e = np.zeros(n, dtype=dtype)
    e[i] = 1
    return e


# -- closed-form L0 on the bundled presets, built from raw key operations

def xd(fm, i, j, n):
    """x_{i,n} d/dx_{j,n} on the first block."""
    vi, vj = fm.var_id(0, i - 1, n), fm.var_id(0, j - 1, n)

    def op(key):
        osc, p = fm._osc_diff(key[0], vj)
        return [((fm._osc_mul(osc, vi),) + key[1:], p)] if p else []
    return op


def zero_ops(fm, *seq):
    """Product of zero-mode primitives, rightmost applied first."""
    def op(key):
        cur = [(key, 1.0)]
        for kind, var, c in reversed(seq):
            cur = [(k2, v * v2) for k, v in cur for k2, v2 in fm._zero_primitive(k, kind, var, c)]
        return cur
    return op


def closed_form_L0(fm, name, log_sign=-1):
    two_pi_i = 2j * np.pi
    rank = 4 if name == "example-6.1" else 3
    ops = [(n, xd(fm, i, i, n)) for n in range(1, 4) for i in range(1, rank + 1)]
    for n in range(1, 4):
        if name == "example-6.1":
            ops += [(1, xd(fm, 4, 3, n)), (-1, xd(fm, 2, 1, n))]
        else:
            ops += [(1, xd(fm, 3, 2, n)), (-1, xd(fm, 2, 1, n))]
    if name == "example-6.1":
        ops += [(1, zero_ops(fm, ("y", 0, 1), ("euler", 1, 1))),
                (log_sign / two_pi_i, zero_ops(fm, ("euler", 0, 1), ("dy", 0, 1)))]
    else:
        ops += [(-np.sqrt(2) / two_pi_i, zero_ops(fm, ("y", 0, 1), ("euler", 0, 1))),
                (0.5, zero_ops(fm, ("dy", 0, 1), ("dy", 0, 1)))]

    def L0(state):
        out = {}
        for c, op in ops:
            for k, v in apply_keywise(op, state).items():
                add_to(out, k, c * v)
        return out
    return L0
