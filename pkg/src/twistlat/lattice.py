"""Integral lattices, form-preserving automorphisms, the sign cocycle and the
compatibility map between the cocycle and the automorphism.

All arithmetic here is exact: vectors are integer coordinate arrays and signs
are tracked as parities.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BadInput, EtaInconsistent


def as_int_vector(v, rank=None):
    arr = np.asarray(v)
    if arr.dtype.kind == "c":
        if np.any(np.abs(arr.imag) > 1e-12):
            raise BadInput("lattice vector has a nonzero imaginary part")
        arr = arr.real
    if arr.dtype.kind == "f":
        rounded = np.rint(arr)
        if np.any(np.abs(arr - rounded) > 1e-12):
            raise BadInput("lattice vector has non-integral coordinates")
        arr = rounded
    arr = arr.astype(np.int64)
    if rank is not None and arr.shape != (rank,):
        raise BadInput(f"expected a vector of length {rank}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Lattice:
    gram: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        g = np.asarray(self.gram)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
            raise BadInput("gram must be a nonempty square matrix")
        if g.dtype.kind not in "iu":
            if np.any(g != np.rint(g)):
                raise BadInput("gram entries must be integers")
        g = g.astype(np.int64)
        if not np.array_equal(g, g.T):
            raise BadInput("gram must be symmetric")
        if round(np.linalg.det(g)) == 0:
            raise BadInput("gram must be nondegenerate")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)
        labels = tuple(self.labels) or tuple(f"e{i + 1}" for i in range(g.shape[0]))
        if len(labels) != g.shape[0]:
            raise BadInput("need one label per basis vector")
        object.__setattr__(self, "labels", labels)

    @property
    def rank(self):
        return self.gram.shape[0]

    def pair(self, a, b):
        """The bilinear form; exact for integer input, complex otherwise."""
        a = np.asarray(a)
        b = np.asarray(b)
        if a.dtype.kind in "iu" and b.dtype.kind in "iu":
            return int(a @ self.gram @ b)
        return complex(a @ self.gram @ b)

    def norm(self, a):
        return self.pair(a, a)

    def basis(self, i):
        e = np.zeros(self.rank, dtype=np.int64)
        e[i] = 1
        return e

    def vector(self, spec):
        """Parse a label, a label sum like ``alpha1+2*delta`` or integer coordinates."""
        if isinstance(spec, str):
            text = spec.replace(" ", "")
            if all(ch in "0123456789,-" for ch in text):
                return as_int_vector([int(t) for t in text.split(",")], self.rank)
            out = np.zeros(self.rank, dtype=np.int64)
            for term in text.replace("-", "+-").split("+"):
                if not term:
                    continue
                coef, _, name = term.rpartition("*")
                sign = 1
                if not coef and name.startswith("-"):
                    sign, name = -1, name[1:]
                k = int(coef) if coef not in ("", "-") else (-1 if coef == "-" else sign)
                if name not in self.labels:
                    raise BadInput(f"unknown basis label {name!r}")
                out[self.labels.index(name)] += k
            return out
        return as_int_vector(spec, self.rank)


@dataclass(frozen=True)
class LatticeAutomorphism:
    matrix: np.ndarray
    lattice: Lattice

    def __post_init__(self):
        a = np.asarray(self.matrix)
        n = self.lattice.rank
        if a.shape != (n, n):
            raise BadInput(f"phi must be {n}x{n}")
        if a.dtype.kind not in "iu":
            if np.any(a != np.rint(a)):
                raise BadInput("phi entries must be integers")
        a = a.astype(np.int64)
        if round(abs(np.linalg.det(a))) != 1:
            raise BadInput("phi must be invertible over the integers")
        if not np.array_equal(a.T @ self.lattice.gram @ a, self.lattice.gram):
            raise BadInput("phi does not preserve the bilinear form")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    def __call__(self, v):
        return self.matrix @ np.asarray(v)

    def is_identity(self):
        return np.array_equal(self.matrix, np.eye(self.lattice.rank, dtype=np.int64))


@dataclass(frozen=True)
class Cocycle:
    """Bimultiplicative sign function given by its values on basis pairs.

    ``table[i, j]`` is the sign of the pair ``(e_i, e_j)``.
    """

    table: np.ndarray
    _odd: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if not np.all(np.isin(t, (1, -1))):
            raise BadInput("cocycle table entries must be +1 or -1")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        odd = (t == -1).astype(np.int64)
        odd.setflags(write=False)
        object.__setattr__(self, "_odd", odd)

    def parity(self, lam, mu):
        return int(np.asarray(lam) @ self._odd @ np.asarray(mu)) % 2

    def __call__(self, lam, mu):
        return -1 if self.parity(lam, mu) else 1


def build_epsilon(lattice: Lattice) -> Cocycle:
    g = lattice.gram
    n = lattice.rank
    t = np.ones((n, n), dtype=np.int64)
    for i in range(n):
        gi = int(g[i, i])
        t[i, i] = -1 if (gi * (gi + 1) // 2) % 2 else 1
        for j in range(i):
            if (int(g[i, j]) + gi * int(g[j, j])) % 2:
                t[i, j] = -1
    return Cocycle(t)


def _random_vectors(rng, rank, count, bound=5):
    return rng.integers(-bound, bound + 1, size=(count, rank))


def verify_epsilon(eps: Cocycle, lattice: Lattice, trials=200, seed=0):
    """Check the self-pairing and symmetry conditions of the cocycle.

    Basis pairs are always checked; ``trials`` random vectors with
    coordinates in [-5, 5] are added on top.
    """
    rng = np.random.default_rng(seed)
    n = lattice.rank
    vecs = [lattice.basis(i) for i in range(n)]
    vecs += list(_random_vectors(rng, n, trials))
    failures = []
    for lam in vecs:
        q = lattice.norm(lam)
        if eps.parity(lam, lam) != (q * (q + 1) // 2) % 2:
            failures.append({"check": "self", "lambda": lam.tolist()})
    pairs = [(vecs[i], vecs[j]) for i in range(n) for j in range(n)]
    others = _random_vectors(rng, n, trials)
    pairs += list(zip(vecs[n:], others))
    for lam, mu in pairs:
        expected = (lattice.pair(lam, mu) + lattice.norm(lam) * lattice.norm(mu)) % 2
        if (eps.parity(lam, mu) + eps.parity(mu, lam)) % 2 != expected:
            failures.append({"check": "swap", "lambda": lam.tolist(), "mu": mu.tolist()})
    return {"passed": not failures, "checked": len(vecs) + len(pairs), "failures": failures[:20]}


@dataclass(frozen=True)
class EtaMap:
    """Sign map with eta(l + m) = eta(l) eta(m) eps(l, m) / eps(phi l, phi m).

    The ratio of the two cocycles is a symmetric bimultiplicative sign whose
    parity matrix is ``defect``; eta is the quadratic refinement of that
    bilinear parity, shifted by the linear parity ``basis_parity``.
    """

    defect: np.ndarray
    basis_parity: np.ndarray

    def parity(self, lam):
        lam = np.asarray(lam, dtype=np.int64)
        m = self.defect
        upper = int(lam @ np.triu(m, 1) @ lam)
        diag = int(np.sum(np.diag(m) * (lam * (lam - 1) // 2)))
        return (upper + diag + int(self.basis_parity @ lam)) % 2

    def __call__(self, lam):
        return -1 if self.parity(lam) else 1


def _eta_consistent(eta, eps, phi, pairs):
    for lam, mu in pairs:
        lhs = eta(lam) * eta(mu) * eps(lam, mu)
        rhs = eta(lam + mu) * eps(phi(lam), phi(mu))
        if lhs != rhs:
            return False
    return True


def build_eta(lattice: Lattice, phi: LatticeAutomorphism, eps: Cocycle, trials=200, seed=0,
              basis_signs=None) -> EtaMap:
    """A solution of the eta recursion.

    Solutions differ by characters of Q, so the values on the basis may be
    prescribed with ``basis_signs``; otherwise the first consistent choice
    (all +1 when possible) is returned.
    """
    n = lattice.rank
    a = phi.matrix
    defect = (eps._odd + a.T @ eps._odd @ a) % 2
    if not np.array_equal(defect, defect.T):
        raise EtaInconsistent("cocycle ratio is not symmetric; the cocycle is invalid")
    rng = np.random.default_rng(seed)
    pairs = list(zip(_random_vectors(rng, n, trials), _random_vectors(rng, n, trials)))
    pairs += [(lattice.basis(i), lattice.basis(j)) for i in range(n) for j in range(n)]
    if basis_signs is not None:
        signs = np.asarray(basis_signs)
        if signs.shape != (n,) or not np.all(np.isin(signs, (1, -1))):
            raise BadInput("eta needs one sign (+1 or -1) per basis vector")
        eta = EtaMap(defect, (signs == -1).astype(np.int64))
        if not _eta_consistent(eta, eps, phi, pairs):
            raise EtaInconsistent("the prescribed eta values violate the eta recursion")
        return eta
    for signs in itertools.product((0, 1), repeat=n):
        eta = EtaMap(defect, np.array(signs, dtype=np.int64))
        if _eta_consistent(eta, eps, phi, pairs):
            return eta
    raise EtaInconsistent("no sign assignment on the basis satisfies the eta recursion")


def verify_eta(eta, eps, phi, lattice, trials=200, seed=1):
    rng = np.random.default_rng(seed)
    n = lattice.rank
    bad = 0
    for lam, mu in zip(_random_vectors(rng, n, trials), _random_vectors(rng, n, trials)):
        if eta(lam) * eta(mu) * eps(lam, mu) != eta(lam + mu) * eps(phi(lam), phi(mu)):
            bad += 1
    return {"passed": bad == 0, "checked": trials, "failures": bad}
