"""Lerch transcendent, digamma/polygamma, polylogarithm and zeta with explicit
domains, plus an identity suite that cross-checks them.

Evaluation is delegated to mpmath; this module adds the domain checks, the
reflection expansion for |z| > 1 and the conventions used elsewhere in the
package (zeta(0) = -1/2, Li_s for s <= 0 as a rational function).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import AtPole, OutOfDomain

POLE_TOL = 1e-12


@dataclass(frozen=True)
class SpecFunConfig:
    series_cutoff: int = 10_000
    abs_tol: float = 1e-12
    richardson_levels: int = 4

    def __post_init__(self):
        if self.series_cutoff < 100:
            raise ValueError("series_cutoff must be at least 100")
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")


DEFAULT = SpecFunConfig()


def _near_nonpositive_integer(a, tol=POLE_TOL):
    a = complex(a)
    return abs(a.imag) < tol and a.real < 0.5 and abs(a.real - round(a.real)) < tol


def digamma(a):
    if _near_nonpositive_integer(a):
        raise AtPole(f"digamma has a pole at {a}")
    return complex(mpmath.digamma(complex(a)))


def polygamma(j, a):
    if j < 0:
        raise ValueError("derivative order must be nonnegative")
    if _near_nonpositive_integer(a):
        raise AtPole(f"polygamma has a pole at {a}")
    return complex(mpmath.psi(j, complex(a)))


def zeta(s):
    s = complex(s)
    if s.real > 1:
        return complex(mpmath.zeta(s))
    if s.imag == 0 and s.real <= 0 and s.real == round(s.real) and int(s.real) % 2 == 0:
        return -0.5 if s.real == 0 else 0.0
    raise OutOfDomain(f"zeta needs Re s > 1 or a nonpositive even integer, got {s}")


def _eulerian_row(n):
    """Eulerian numbers A(n, k), k = 0..n-1."""
    row = [1]
    for m in range(2, n + 1):
        row = [(k + 1) * (row[k] if k < len(row) else 0) + (m - k) * (row[k - 1] if k >= 1 else 0)
               for k in range(m)]
    return row


def polylog(s, z):
    s = complex(s)
    z = complex(z)
    if s.imag == 0 and s.real <= 0 and s.real == round(s.real):
        n = -int(s.real)
        if abs(z - 1) < POLE_TOL:
            raise AtPole("Li_s has a pole at z = 1 for s <= 0")
        if n == 0:
            return z / (1 - z)
        num = sum(c * z ** (k + 1) for k, c in enumerate(_eulerian_row(n)))
        return num / (1 - z) ** (n + 1)
    if abs(z) < 1:
        return complex(mpmath.polylog(s, z))
    raise OutOfDomain(f"polylog needs |z| < 1 or s a nonpositive integer, got s={s}, z={z}")


def _lerch_series(z, s, a):
    terms = int(math.log(1e-18) / math.log(abs(z))) + 2
    k = np.arange(terms)
    return complex(np.sum(np.exp(k * np.log(z) - s * np.log(k + a))))


def _lerch_integral(z, s, a):
    f = lambda t: t ** (s - 1) * mpmath.exp(-a * t) / (1 - z * mpmath.exp(-t))
    return complex(mpmath.quad(f, [0, 1, 10, mpmath.inf]) / mpmath.gamma(s))


def lerch_phi(z, s, a):
    """Phi(z, s, a) on the union of the series and integral domains."""
    z, s, a = complex(z), complex(s), complex(a)
    if abs(z) < 1:
        if _near_nonpositive_integer(a):
            raise OutOfDomain("a must avoid 0, -1, -2, ... for the series")
        if z == 0:
            return a ** (-s)
        if abs(z) <= 0.95:
            return _lerch_series(z, s, a)
        return complex(mpmath.lerchphi(z, s, a))
    if abs(z - 1) < POLE_TOL:
        if s.real > 1 and a.real > 0:
            return complex(mpmath.zeta(s, a))
        raise OutOfDomain("at z = 1 need Re s > 1 and Re a > 0")
    on_cut = abs(z.imag) < POLE_TOL and z.real >= 1
    if a.real > 0 and s.real > 0 and not on_cut:
        return _lerch_integral(z, s, a)
    raise OutOfDomain(f"no convergent representation for z={z}, s={s}, a={a}")


def lerch_a_derivatives(z, a, order):
    """d^j/da^j of z^a Phi(z, 1, a) for j = 0..order, from the integral formula.

    Differentiating under the integral gives the integrand
    (log z - t)^j z^a e^{-a t} / (1 - z e^{-t}).
    """
    z, a = complex(z), complex(a)
    if a.real <= 0:
        raise OutOfDomain("need Re a > 0")
    if abs(z.imag) < POLE_TOL and z.real >= 1:
        raise OutOfDomain("z lies on the branch cut [1, inf)")
    lz = cmath.log(z)
    out = []
    for j in range(order + 1):
        f = lambda t, j=j: (lz - t) ** j * mpmath.exp(a * lz - a * t) / (1 - z * mpmath.exp(-t))
        out.append(complex(mpmath.quad(f, [0, 1, 10, mpmath.inf])))
    return out


def sgn_omega(z):
    w = cmath.phase(cmath.log(complex(z)))
    return (w > 0) - (w < 0)


def lerch_reflect(z, a):
    """Phi(z, 1, a) for |z| > 1 off the real axis, through the 1/z expansion."""
    z, a = complex(z), complex(a)
    if abs(z) <= 1:
        raise OutOfDomain("reflection expansion needs |z| > 1")
    if abs(z.imag) < POLE_TOL:
        raise OutOfDomain("reflection expansion needs z off the real axis")
    if abs(a.imag) < POLE_TOL and abs(a.real - round(a.real)) < POLE_TOL:
        raise OutOfDomain("a must not be an integer")
    za = cmath.exp(-a * cmath.log(z))
    return (1j * math.pi * za * sgn_omega(z) + za * math.pi / cmath.tan(math.pi * a)
            + lerch_phi(1 / z, 1, 1 - a) / z)


def _residual(x, y):
    return abs(complex(x) - complex(y))


def identity_suite(seed=0, samples=20):
    """Max residuals of the reflection, shift, derivative and zeta identities."""
    rng = np.random.default_rng(seed)
    pi = math.pi
    res = {}

    def rand_offint():
        while True:
            a = complex(rng.uniform(-3, 3), rng.uniform(-0.5, 0.5))
            if abs(a - round(a.real)) > 0.05:
                return a

    res["digamma_reflection"] = max(
        _residual(digamma(-a) - digamma(a + 1), pi / cmath.tan(pi * a)) for a in
        (rand_offint() for _ in range(50)))
    res["digamma_reflection_polylog"] = max(
        _residual(digamma(-a) - digamma(a + 1), 2j * pi * polylog(0, cmath.exp(-2j * pi * a)) + 1j * pi)
        for a in (rand_offint() for _ in range(samples)))
    worst = 0.0
    for j in range(1, 5):
        for _ in range(samples):
            a = rand_offint()
            lhs = (-1) ** j * polygamma(j, -a) - polygamma(j, a + 1)
            rhs = -((-2j * pi) ** (j + 1)) * polylog(-j, cmath.exp(-2j * pi * a))
            worst = max(worst, _residual(lhs, rhs) / max(1.0, abs(rhs)))
    res["polygamma_reflection"] = worst
    worst = 0.0
    for n in range(1, 6):
        for _ in range(samples):
            z = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
            s = complex(rng.integers(1, 4))
            a = complex(rng.uniform(0.2, 3), rng.uniform(-1, 1))
            rhs = z ** n * lerch_phi(z, s, a + n) + sum(z ** k / (k + a) ** s for k in range(n))
            worst = max(worst, _residual(lerch_phi(z, s, a), rhs))
    res["lerch_shift"] = worst
    worst = 0.0
    h = 1e-3
    for _ in range(samples):
        z = complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
        s = complex(rng.integers(1, 4))
        a = complex(rng.uniform(0.5, 3), 0)
        d1 = (lerch_phi(z, s, a + h) - lerch_phi(z, s, a - h)) / (2 * h)
        d2 = (lerch_phi(z, s, a + h / 2) - lerch_phi(z, s, a - h / 2)) / h
        fd = (4 * d2 - d1) / 3
        worst = max(worst, _residual(fd, -s * lerch_phi(z, s + 1, a)))
    res["lerch_derivative"] = worst
    res["polygamma_zeta"] = max(
        _residual(zeta(j + 1), (-1) ** (j + 1) / math.factorial(j) * polygamma(j, 1)) for j in range(1, 6))
    x = 0.1
    series = sum(zeta(2 * j) * x ** (2 * j) for j in range(13))
    res["zeta_generating_function"] = _residual(series, -0.5 * pi * x / math.tan(pi * x))
    return res
