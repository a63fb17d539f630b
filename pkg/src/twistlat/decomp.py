"""Multiplicative Jordan-Chevalley splitting phi = sigma exp(-2 pi i N) and the
linear algebra built on it: eigenblock projectors, the zero-block splitting
of a vector, the operators P^+/- and functional calculus f(S' + N).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import sympy
from scipy.linalg import expm

from .errors import (
    DecompositionResidual,
    InsufficientDerivatives,
    NotInvertible,
    SingularRestriction,
    UnknownBlock,
    ZeroEigenvalue,
)

TWO_PI_I = 2j * math.pi
SIGN_TOL = 1e-12


def alpha0_of(eigenvalue, tol=1e-12):
    """The representative alpha0 with -1 < Re alpha0 <= 0 and exp(-2 pi i alpha0) = eigenvalue."""
    ev = complex(eigenvalue)
    if abs(ev) < tol:
        raise ZeroEigenvalue("eigenvalue 0 has no logarithm")
    x = -cmath.phase(ev) / (2 * math.pi)
    y = math.log(abs(ev)) / (2 * math.pi)
    if abs(x) < tol:
        x = 0.0
    elif abs(x + 0.5) < tol or abs(x - 0.5) < tol:
        x = -0.5
    if x > 0:
        x -= 1.0
    if abs(y) < tol:
        y = 0.0
    return complex(x, y)


def sign_class(alpha0, tol=SIGN_TOL):
    a = complex(alpha0)
    if abs(a) <= tol:
        return "zero"
    if a.real > tol or (abs(a.real) <= tol and a.imag > tol):
        return "plus"
    return "minus"


def alpha0_prime(alpha0):
    a = complex(alpha0)
    return a if sign_class(a) == "plus" else a + 1


def mode_sign(m):
    """Which part of the triangular decomposition the mode index m belongs to."""
    return sign_class(m, tol=1e-9)


@dataclass(frozen=True)
class EigenBlock:
    index: int
    eigenvalue: complex
    alpha0: complex
    alpha0_prime: complex
    projector: np.ndarray
    sign_class: str
    basis: np.ndarray  # columns span the block

    @property
    def dim(self):
        return self.basis.shape[1]


@dataclass(frozen=True)
class StarSplit:
    lambda0: np.ndarray
    lambda_star: np.ndarray


@dataclass(frozen=True)
class JordanData:
    phi: np.ndarray
    gram: np.ndarray
    sigma: np.ndarray
    nilp: np.ndarray
    blocks: tuple
    nilpotency_index: int
    tol: float

    @property
    def dim(self):
        return self.phi.shape[0]

    @property
    def zero_block(self):
        for b in self.blocks:
            if b.sign_class == "zero":
                return b
        return None

    @property
    def pi0(self):
        b = self.zero_block
        return b.projector if b is not None else np.zeros((self.dim, self.dim), dtype=complex)

    def pair(self, a, b):
        return complex(np.asarray(a) @ self.gram @ np.asarray(b))

    def nilp_powers(self):
        out = [np.eye(self.dim, dtype=complex)]
        for _ in range(1, max(self.nilpotency_index, 1)):
            out.append(self.nilp @ out[-1])
        return out

    def semisimple_log(self, prime=False):
        """S (or S') as a matrix: alpha0 (or alpha0') on each block."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for b in self.blocks:
            out += (b.alpha0_prime if prime else b.alpha0) * b.projector
        return out

    def block(self, key):
        if isinstance(key, EigenBlock):
            return key
        if isinstance(key, (int, np.integer)) and 0 <= key < len(self.blocks):
            return self.blocks[key]
        if isinstance(key, str) and key == "zero":
            b = self.zero_block
            if b is not None:
                return b
        if isinstance(key, complex):
            for b in self.blocks:
                if abs(b.alpha0 - key) < 1e-9:
                    return b
        raise UnknownBlock(f"no eigenblock {key!r}")

    def block_of_mode(self, m):
        """The block whose coset alpha0 + Z contains m (None if there is none)."""
        for b in self.blocks:
            d = complex(m) - b.alpha0
            if abs(d.imag) < 1e-9 and abs(d.real - round(d.real)) < 1e-9:
                return b
        return None

    def opposite(self, block):
        """The block of -alpha (so that h_alpha pairs with it)."""
        b = self.block(block)
        target = -b.alpha0
        found = self.block_of_mode(target)
        if found is None:
            raise UnknownBlock(f"no block pairs with alpha0 = {b.alpha0}")
        return found


def _kernel(mat, dim):
    _, s, vh = np.linalg.svd(mat)
    return vh[-dim:].conj().T if dim else np.zeros((mat.shape[0], 0), dtype=complex)


def _log_unipotent(u, order):
    x = u - np.eye(u.shape[0])
    term = np.eye(u.shape[0], dtype=complex)
    out = np.zeros_like(term)
    for k in range(1, order + 1):
        term = term @ x
        out += ((-1) ** (k + 1) / k) * term
    return out


def jordan_chevalley(phi, gram=None, tol=1e-10):
    """Split phi into commuting semisimple and unipotent parts.

    The characteristic polynomial is factored exactly over Q; the roots of each
    irreducible factor are located numerically and their generalized
    eigenspaces are taken as kernels of (phi - r)^k of the known dimension k.
    """
    a_int = np.asarray(getattr(phi, "matrix", phi))
    if gram is None:
        gram = phi.lattice.gram
    n = a_int.shape[0]
    sym = sympy.Matrix(a_int.tolist())
    if sym.det() == 0:
        raise NotInvertible("phi is singular")
    a = a_int.astype(complex)
    x = sympy.Symbol("x")
    _, factors = sympy.factor_list(sym.charpoly(x).as_expr(), x)
    roots = []
    for poly, mult in factors:
        coeffs = [complex(c) for c in sympy.Poly(poly, x).all_coeffs()]
        for r in np.roots(coeffs) if len(coeffs) > 1 else []:
            roots.append((complex(r), mult))
    # group roots that give the same alpha0 (only possible for repeated roots)
    cols, labels = [], []
    for r, mult in roots:
        m = np.linalg.matrix_power(a - r * np.eye(n), mult)
        cols.append(_kernel(m, mult))
        labels.append(r)
    basis = np.hstack(cols)
    if abs(np.linalg.det(basis)) < 1e-12:
        raise DecompositionResidual("generalized eigenvectors are not independent")
    inv = np.linalg.inv(basis)
    alphas = [alpha0_of(r) for r in labels]
    keys = []
    for al in alphas:
        for k in keys:
            if abs(k - al) < 1e-9:
                break
        else:
            keys.append(al)
    keys.sort(key=lambda z: (z.real, z.imag))
    blocks = []
    sigma = np.zeros((n, n), dtype=complex)
    start = 0
    spans = []
    for r, c in zip(labels, cols):
        spans.append((r, start, start + c.shape[1]))
        start += c.shape[1]
    for idx, al in enumerate(keys):
        sel = np.zeros(n)
        ev = None
        for r, lo, hi in spans:
            if abs(alpha0_of(r) - al) < 1e-9:
                sel[lo:hi] = 1
                ev = r
        proj = basis @ np.diag(sel) @ inv
        sigma += ev * proj
        bcols = basis[:, sel.astype(bool)]
        blocks.append(EigenBlock(idx, ev, al, alpha0_prime(al), proj, sign_class(al), bcols))
    unip = np.linalg.solve(sigma, a)
    nilp = -_log_unipotent(unip, n) / TWO_PI_I
    nilp[np.abs(nilp) < 1e-14] = 0
    power = np.eye(n, dtype=complex)
    index = 0
    while np.max(np.abs(power)) > tol and index <= n:
        power = nilp @ power
        index += 1
    jd = JordanData(a_int, np.asarray(gram), sigma, nilp, tuple(blocks), max(index, 1), tol)
    residuals = decomposition_residuals(jd)
    worst = max(residuals.values())
    if worst > tol * max(1.0, np.max(np.abs(a))) * 10:
        raise DecompositionResidual(f"decomposition residuals too large: {residuals}")
    return jd


def _expm_nilpotent(x, order):
    out = np.eye(x.shape[0], dtype=complex)
    term = np.eye(x.shape[0], dtype=complex)
    for k in range(1, order + 1):
        term = term @ x / k
        out += term
    return out


def decomposition_residuals(jd: JordanData):
    n = jd.dim
    g = jd.gram.astype(complex)
    s, nn, phi = jd.sigma, jd.nilp, jd.phi.astype(complex)
    recon = s @ _expm_nilpotent(-TWO_PI_I * nn, n)
    proj_sum = sum(b.projector for b in jd.blocks)
    idem = max(np.max(np.abs(b.projector @ b.projector - b.projector)) for b in jd.blocks)
    eig = max(np.max(np.abs(s @ b.projector - b.eigenvalue * b.projector)) for b in jd.blocks)
    full = expm(-TWO_PI_I * (jd.semisimple_log() + nn))
    return {
        "reconstruction": float(np.max(np.abs(recon - phi))),
        "commute": float(np.max(np.abs(s @ nn - nn @ s))),
        "nilpotent": float(np.max(np.abs(np.linalg.matrix_power(nn, n)))),
        "projector_sum": float(np.max(np.abs(proj_sum - np.eye(n)))),
        "projector_idempotent": float(idem),
        "eigenvalue": float(eig),
        "sigma_isometry": float(np.max(np.abs(s.T @ g @ s - g))),
        "nilp_skew": float(np.max(np.abs(nn.T @ g + g @ nn))),
        "log_reconstruction": float(np.max(np.abs(full - phi))),
    }


def project(jd: JordanData, a, block):
    b = jd.block(block)
    return b.projector @ np.asarray(a, dtype=complex)


def _restricted_inverse(jd: JordanData, op):
    """Inverse of op on the complement of h_0, extended by the identity on h_0."""
    mat = op + jd.pi0
    try:
        return np.linalg.inv(mat)
    except np.linalg.LinAlgError as exc:
        raise SingularRestriction("operator is not invertible off h_0") from exc


def star_split(jd: JordanData, lam) -> StarSplit:
    lam = np.asarray(lam, dtype=complex)
    lam0 = jd.pi0 @ lam
    inv = _restricted_inverse(jd, np.eye(jd.dim) - jd.sigma)
    star = inv @ (lam - lam0)
    if np.max(np.abs(jd.pi0 @ star), initial=0) > 1e-8 or np.max(
        np.abs(lam0 + (np.eye(jd.dim) - jd.sigma) @ star - lam), initial=0
    ) > 1e-8:
        raise SingularRestriction("restricted solve for the star component failed")
    return StarSplit(lam0, star)


def one_minus_phi_inverse_off_zero(jd: JordanData):
    return _restricted_inverse(jd, np.eye(jd.dim) - jd.phi.astype(complex))


def apply_P(jd: JordanData, sign, zeta, a):
    """P^+ (sign=+1), P^- (sign=-1) or P (sign=0) applied to a.

    With ``zeta=None`` the result is the list of vector coefficients of
    zeta^0, zeta^1, ...; otherwise the series is evaluated at ``zeta``.
    """
    a = np.asarray(a, dtype=complex)
    coeffs = []
    v = a.copy()
    for k in range(jd.nilpotency_index):
        if sign == 0:
            c = 0.0 if k % 2 == 0 else 1.0
        else:
            c = float(sign) ** k
        coeffs.append(c * v / math.factorial(k + 1))
        v = jd.nilp @ v
    if zeta is None:
        return coeffs
    return sum(c * complex(zeta) ** k for k, c in enumerate(coeffs))


def nilpotent_calculus(jd: JordanData, derivatives, a):
    """f(S' + N) a = sum over blocks and j of f^(j)(alpha0') N^j pi_alpha a / j!.

    ``derivatives`` is either a callable ``(j, point) -> f^(j)(point)`` or a
    sequence holding one list of derivative values per block.
    """
    a = np.asarray(a, dtype=complex)
    out = np.zeros(jd.dim, dtype=complex)
    powers = jd.nilp_powers()
    for b in jd.blocks:
        pa = b.projector @ a
        for j in range(jd.nilpotency_index):
            if callable(derivatives):
                val = derivatives(j, b.alpha0_prime)
            else:
                vals = derivatives[b.index]
                if j >= len(vals):
                    if np.max(np.abs(powers[j] @ pa)) < 1e-14:
                        continue
                    raise InsufficientDerivatives(
                        f"block {b.index} needs derivative order {j}, got {len(vals)} values"
                    )
                val = vals[j]
            out += val * (powers[j] @ pa) / math.factorial(j)
    return out
