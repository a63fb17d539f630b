"""Structure constants of the twisted vertex operators: the scalars a, b, c
attached to one lattice vector, the pair constants B and C, and the vector
whose zero mode exponentiates to tau.

``B_oracle`` recomputes B from the underlying mode sums without going
through polygamma values, so it can serve as an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from . import specfun
from .decomp import TWO_PI_I, JordanData, apply_P, star_split, one_minus_phi_inverse_off_zero
from .errors import BadInput, NotLatticeVector
from .lattice import as_int_vector

EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class TwistConstants:
    b: complex
    a_poly: Polynomial
    c: complex
    tau_arg: np.ndarray


@dataclass(frozen=True)
class PairConstants:
    B: complex
    C: complex


def _vec(lam):
    return np.asarray(lam, dtype=complex)


def b_lambda(jd: JordanData, lam):
    lam = _vec(lam)
    lam0 = jd.pi0 @ lam
    return (jd.pair(lam0, lam0) - jd.pair(lam, lam)) / 2


def a_lambda(jd: JordanData, lam) -> Polynomial:
    """a_lambda as a polynomial in zeta; its constant term vanishes identically."""
    lam = _vec(lam)
    lam0 = jd.pi0 @ lam
    coeffs = [jd.pair(v, lam) / 2 for v in apply_P(jd, -1, None, lam0)]
    coeffs[0] = 0.0
    return Polynomial(np.array(coeffs, dtype=complex))


def c_lambda(jd: JordanData, lam):
    lam = _vec(lam)
    lam0 = jd.pi0 @ lam
    return (jd.pair(apply_P(jd, -1, TWO_PI_I, lam0), lam) - jd.pair(lam, lam)) / 2


def tau_argument(jd: JordanData, lam):
    """((1 - phi)/N) lambda_0 as the finite series sum_k (-1)^k (2 pi i)^(k+1) N^k / (k+1)!."""
    lam0 = jd.pi0 @ _vec(lam)
    out = np.zeros(jd.dim, dtype=complex)
    v = lam0
    for k in range(jd.nilpotency_index):
        out += (-1) ** k * TWO_PI_I ** (k + 1) / math.factorial(k + 1) * v
        v = jd.nilp @ v
    return out


def twist_constants(jd: JordanData, lam) -> TwistConstants:
    return TwistConstants(b_lambda(jd, lam), a_lambda(jd, lam), c_lambda(jd, lam), tau_argument(jd, lam))


def psi_operator(jd: JordanData):
    """Matrix of Psi(S' + N) + gamma acting on h."""
    out = EULER_GAMMA * np.eye(jd.dim, dtype=complex)
    powers = jd.nilp_powers()
    for b in jd.blocks:
        for j in range(jd.nilpotency_index):
            out += specfun.polygamma(j, b.alpha0_prime) / math.factorial(j) * powers[j] @ b.projector
    return out


def B_exponent_matrix(jd: JordanData):
    """Matrix M with log B_{lam,mu} = lam^T M mu."""
    return psi_operator(jd).T @ jd.gram.astype(complex)


def B_constant(jd: JordanData, lam, mu):
    return complex(np.exp(_vec(lam) @ B_exponent_matrix(jd) @ _vec(mu)))


def _richardson(partials):
    """Extrapolate partial sums taken at M, M/2, M/4, ... (finest first) to M = infinity."""
    table = list(partials)
    for level in range(1, len(table)):
        f = 2.0 ** level
        table = [(f * table[i] - table[i + 1]) / (f - 1) for i in range(len(table) - 1)]
    return table[0]


def _accelerated_sum(terms_array, levels=4):
    cums = np.cumsum(terms_array)
    n = len(terms_array)
    return _richardson([cums[n // 2 ** k - 1] for k in range(levels)])


def B_oracle(jd: JordanData, lam, mu, terms=10_000, levels=4):
    """B from the mode-sum limit: per block, the j = 0 telescoped sum and the
    j >= 1 power sums over the positive modes, each extrapolated in 1/M."""
    if terms < 1000:
        raise BadInput("B_oracle needs at least 1000 terms")
    lam, mu = _vec(lam), _vec(mu)
    m = np.arange(terms, dtype=float)
    powers = jd.nilp_powers()
    exponent = 0j
    for b in jd.blocks:
        pl = b.projector @ lam
        a = b.alpha0_prime
        t = jd.pair(pl, mu)
        if abs(t) > 0:
            exponent += t * _accelerated_sum(1.0 / (m + 1) - 1.0 / (m + a), levels)
        for j in range(1, jd.nilpotency_index):
            w = jd.pair(powers[j] @ pl, mu)
            if abs(w) == 0:
                continue
            exponent += (-1) ** (j + 1) * w * _accelerated_sum((m + a) ** (-(j + 1)), levels)
    return complex(np.exp(exponent))


def _zeta_series_operator(jd: JordanData):
    """-2 sum_j zeta(2j+2) N^(2j+1), the finite form of (pi N cot(pi N) - 1)/N."""
    out = np.zeros((jd.dim, jd.dim), dtype=complex)
    powers = jd.nilp_powers()
    for j in range((jd.nilpotency_index + 1) // 2):
        if 2 * j + 1 < jd.nilpotency_index:
            out += -2 * specfun.zeta(2 * j + 2) * powers[2 * j + 1]
    return out


def _lattice_vector(v, rank):
    try:
        return as_int_vector(v, rank)
    except BadInput as exc:
        raise NotLatticeVector(str(exc)) from exc


def C_constant(jd: JordanData, lattice, lam, mu):
    lam = _lattice_vector(lam, lattice.rank)
    mu = _lattice_vector(mu, lattice.rank)
    sign = -1 if (lattice.norm(lam) * lattice.norm(mu)) % 2 else 1
    split = star_split(jd, lam)
    muc = mu.astype(complex)
    inv = one_minus_phi_inverse_off_zero(jd)
    one_minus_sigma = np.eye(jd.dim) - jd.sigma
    exponent = (1j * math.pi * jd.pair(split.lambda0, muc)
                + TWO_PI_I * jd.pair(one_minus_sigma @ inv @ split.lambda_star, muc)
                + jd.pair(_zeta_series_operator(jd) @ split.lambda0, muc))
    return complex(sign * np.exp(exponent))


def pair_constants(jd: JordanData, lattice, lam, mu) -> PairConstants:
    return PairConstants(B_constant(jd, lam, mu), C_constant(jd, lattice, lam, mu))
