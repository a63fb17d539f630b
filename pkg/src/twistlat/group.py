"""The group of elements c U_lambda e^h, its subgroup of phi-coboundaries
g_lambda, and normal forms in the quotient by that subgroup."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy
from sympy.matrices.normalforms import smith_normal_decomp

from .decomp import TWO_PI_I, JordanData
from .lattice import Cocycle, EtaMap, Lattice, LatticeAutomorphism, as_int_vector
from .structure import B_exponent_matrix, c_lambda, tau_argument


@dataclass(frozen=True)
class GroupElement:
    c: complex
    lam: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("scalar part must be nonzero")

    def distance(self, other):
        """Max residual between two elements; lambda must match exactly."""
        if not np.array_equal(self.lam, other.lam):
            return math.inf
        return max(abs(self.c - other.c), float(np.max(np.abs(self.h - other.h), initial=0.0)))


@dataclass
class GroupContext:
    lattice: Lattice
    phi: LatticeAutomorphism
    jd: JordanData
    eps: Cocycle
    eta: EtaMap
    b_matrix: np.ndarray = field(init=False)
    _snf: tuple = field(init=False, default=None)

    def __post_init__(self):
        # B is bimultiplicative, so one matrix replaces a cache keyed by pairs
        self.b_matrix = B_exponent_matrix(self.jd)

    @property
    def rank(self):
        return self.lattice.rank

    def pair(self, a, b):
        return complex(np.asarray(a) @ self.jd.gram @ np.asarray(b))

    def B(self, lam, mu):
        return complex(np.exp(np.asarray(lam) @ self.b_matrix @ np.asarray(mu)))

    def identity(self):
        return GroupElement(1.0 + 0j, np.zeros(self.rank, dtype=np.int64), np.zeros(self.rank, dtype=complex))

    def scalar(self, c):
        return GroupElement(complex(c), np.zeros(self.rank, dtype=np.int64), np.zeros(self.rank, dtype=complex))

    def U(self, lam):
        return GroupElement(1.0 + 0j, as_int_vector(lam, self.rank), np.zeros(self.rank, dtype=complex))

    def exp_h(self, h):
        h = np.asarray(h, dtype=complex)
        return GroupElement(1.0 + 0j, np.zeros(self.rank, dtype=np.int64), self.jd.pi0 @ h)


def multiply(x: GroupElement, y: GroupElement, ctx: GroupContext) -> GroupElement:
    n_h = ctx.jd.nilp @ y.h
    scal = (x.c * y.c * np.exp(ctx.pair(x.h, y.lam) - 0.5 * ctx.pair(x.h, n_h))
            * ctx.eps(x.lam, y.lam) / ctx.B(x.lam, y.lam))
    return GroupElement(complex(scal), x.lam + y.lam, x.h + y.h)


def inverse(x: GroupElement, ctx: GroupContext) -> GroupElement:
    scal = ctx.eps(x.lam, x.lam) / (x.c * ctx.B(x.lam, x.lam)) * np.exp(ctx.pair(x.h, x.lam))
    return GroupElement(complex(scal), -x.lam, -x.h)


def product(ctx: GroupContext, *elements) -> GroupElement:
    out = ctx.identity()
    for e in elements:
        out = multiply(out, e, ctx)
    return out


def commutator(x, y, ctx):
    return product(ctx, x, y, inverse(x, ctx), inverse(y, ctx))


def tau_element(lam, ctx: GroupContext) -> GroupElement:
    return ctx.exp_h(tau_argument(ctx.jd, np.asarray(lam, dtype=complex)))


def g_element(lam, ctx: GroupContext) -> GroupElement:
    lam = as_int_vector(lam, ctx.rank)
    scal = ctx.eta(lam) * np.exp(TWO_PI_I * c_lambda(ctx.jd, lam))
    g = product(ctx, inverse(ctx.U(ctx.phi(lam)), ctx), ctx.U(lam), tau_element(lam, ctx))
    return GroupElement(complex(scal * g.c), g.lam, g.h)


def _random_vector(rng, rank, bound=3):
    return rng.integers(-bound, bound + 1, size=rank)


def random_element(ctx: GroupContext, rng, bound=3):
    """c U_lambda tau_mu with c on the unit circle."""
    c = np.exp(1j * rng.uniform(0, 2 * math.pi))
    return multiply(GroupElement(complex(c), _random_vector(rng, ctx.rank, bound), np.zeros(ctx.rank, dtype=complex)),
                    tau_element(_random_vector(rng, ctx.rank, bound), ctx), ctx)


def check_central(x: GroupElement, ctx: GroupContext, trials=100, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    one = ctx.identity()
    for k in range(trials):
        kind = k % 3
        if kind == 0:
            y = ctx.U(_random_vector(rng, ctx.rank))
        elif kind == 1:
            y = tau_element(_random_vector(rng, ctx.rank), ctx)
        else:
            y = ctx.scalar(np.exp(1j * rng.uniform(0, 2 * math.pi)))
        worst = max(worst, commutator(x, y, ctx).distance(one))
    return {"max_residual": worst, "trials": trials}


def adjoint_on_mode(x: GroupElement, a, m, ctx: GroupContext):
    """Conjugating a_(m+N) by x adds this multiple of K (nonzero only at m = 0)."""
    if abs(complex(m)) > 1e-12:
        return 0j
    return ctx.pair(np.asarray(a, dtype=complex), ctx.jd.nilp @ x.h - x.lam)


@dataclass(frozen=True)
class GNormalForm:
    element: GroupElement
    residues: tuple


def _smith(ctx: GroupContext):
    if ctx._snf is None:
        a = sympy.Matrix((np.eye(ctx.rank, dtype=np.int64) - ctx.phi.matrix).tolist())
        d, s, t = smith_normal_decomp(a, domain=sympy.ZZ)
        assert s * a * t == d
        diag = [int(d[i, i]) for i in range(ctx.rank)]
        s_np = np.array(s.tolist(), dtype=np.int64)
        s_inv = np.array(s.inv().tolist(), dtype=np.int64)
        t_np = np.array(t.tolist(), dtype=np.int64)
        kernel = t_np[:, [i for i, di in enumerate(diag) if di == 0]]
        ctx._snf = (diag, s_np, s_inv, t_np, kernel)
    return ctx._snf


def reduce_mod_Nphi(x: GroupElement, ctx: GroupContext) -> GNormalForm:
    """Normal form of x modulo the subgroup of g_lambda.

    lambda is brought to a canonical representative of Q/(1-phi)Q through
    the Smith form of 1-phi; what remains is the freedom g_w with
    (1-phi)w = 0, which acts as a scalar times exp(2 pi i w), and h is
    reduced modulo that lattice.
    """
    diag, s, s_inv, t, kernel = _smith(ctx)
    y = s @ x.lam
    y_rep = y.copy()
    z = np.zeros(ctx.rank, dtype=np.int64)
    for i, di in enumerate(diag):
        if di != 0:
            y_rep[i] = y[i] % abs(di)
            z[i] = (y[i] - y_rep[i]) // di
    kappa = t @ z
    out = multiply(x, inverse(g_element(kappa, ctx), ctx), ctx) if np.any(kappa) else x
    if kernel.shape[1]:
        w = TWO_PI_I * kernel.astype(complex)
        coords = np.linalg.lstsq(w, out.h, rcond=None)[0]
        shift = np.floor(coords.real + 1e-9).astype(np.int64)
        if np.any(shift):
            out = multiply(out, inverse(g_element(kernel @ shift, ctx), ctx), ctx)
    residues = tuple(int(v) for v in y_rep)
    return GNormalForm(out, residues)


def build_context(lattice, phi, jd, eps, eta):
    return GroupContext(lattice, phi, jd, eps, eta)


def group_battery(ctx: GroupContext, seed=0, triples=500, pairs=100, central=100, quotient=100):
    """Max residuals of the group axioms and of the coboundary subgroup properties."""
    rng = np.random.default_rng(seed)
    res = {}
    worst = 0.0
    for _ in range(triples):
        x, y, z = (random_element(ctx, rng) for _ in range(3))
        lhs = multiply(multiply(x, y, ctx), z, ctx)
        rhs = multiply(x, multiply(y, z, ctx), ctx)
        worst = max(worst, lhs.distance(rhs) / max(1.0, abs(lhs.c)))
    res["associativity"] = worst
    one = ctx.identity()
    worst = 0.0
    for _ in range(pairs):
        x = random_element(ctx, rng)
        worst = max(worst, multiply(x, inverse(x, ctx), ctx).distance(one),
                    multiply(inverse(x, ctx), x, ctx).distance(one),
                    multiply(x, one, ctx).distance(x), multiply(one, x, ctx).distance(x))
    res["inverse_and_identity"] = worst
    worst = 0.0
    for _ in range(pairs):
        lam, mu = _random_vector(rng, ctx.rank), _random_vector(rng, ctx.rank)
        lhs = multiply(g_element(lam, ctx), g_element(mu, ctx), ctx)
        worst = max(worst, lhs.distance(g_element(lam + mu, ctx)))
    res["coboundary_closure"] = worst
    worst = 0.0
    for k in range(central):
        g = g_element(_random_vector(rng, ctx.rank), ctx)
        y = random_element(ctx, rng)
        worst = max(worst, commutator(g, y, ctx).distance(one))
    res["coboundary_central"] = worst
    worst = 0.0
    exact = True
    for _ in range(quotient):
        x = random_element(ctx, rng)
        lam = _random_vector(rng, ctx.rank)
        a = reduce_mod_Nphi(x, ctx)
        b = reduce_mod_Nphi(multiply(x, g_element(lam, ctx), ctx), ctx)
        exact &= np.array_equal(a.element.lam, b.element.lam) and a.residues == b.residues
        worst = max(worst, abs(a.element.c - b.element.c), float(np.max(np.abs(a.element.h - b.element.h))))
    res["quotient_soundness"] = worst if exact else math.inf
    worst = 0.0
    for _ in range(pairs):
        t1 = tau_element(_random_vector(rng, ctx.rank), ctx)
        t2 = tau_element(_random_vector(rng, ctx.rank), ctx)
        com = commutator(t1, t2, ctx)
        worst = max(worst, float(np.max(np.abs(com.h))), float(np.max(np.abs(com.lam))))
    res["tau_commutators_scalar"] = worst
    return res
