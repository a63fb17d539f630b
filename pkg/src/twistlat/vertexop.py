"""Twisted logarithmic fields on a truncated Fock module.

Applying a field to a state gives a :class:`FieldValue`, the finite sum
``sum z^p zeta^j v_{p,j}`` keyed by the complex exponent p and the zeta-degree
j.  Fields are never materialized as infinite series: creation parts are cut
at an oscillator-weight budget and zeta-series at degree J, and every kept
component below those bounds is exact.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .decomp import TWO_PI_I, JordanData, nilpotent_calculus, sign_class
from .errors import BadInput
from .fock import FockModule, add_to, apply_keywise, scale, state_diff
from .structure import B_oracle, C_constant, a_lambda, b_lambda, c_lambda


def _pk(p):
    p = complex(p)
    return complex(round(p.real, 10) + 0.0, round(p.imag, 10) + 0.0)


@dataclass(frozen=True)
class Bounds:
    budget: float = 3.0  # max oscillator weight of kept output states
    J: int = 24  # max zeta-degree kept


class FieldValue:
    """Finite map (p, j) -> state."""

    def __init__(self, coeffs=None):
        self.coeffs = coeffs if coeffs is not None else {}

    @classmethod
    def of(cls, state):
        return cls({(0j, 0): dict(state)} if state else {})

    def add(self, p, j, state, c=1.0):
        if not state:
            return
        key = (_pk(p), j)
        target = self.coeffs.setdefault(key, {})
        for k, v in state.items():
            add_to(target, k, c * v)
        if not target:
            del self.coeffs[key]

    def __iadd__(self, other):
        for (p, j), st in other.coeffs.items():
            self.add(p, j, st)
        return self

    def scaled(self, c):
        return FieldValue({k: scale(st, c) for k, st in self.coeffs.items()})

    def then(self, op):
        """Apply a map state -> FieldValue to every component, adding offsets."""
        out = FieldValue()
        for (p, j), st in self.coeffs.items():
            for (p2, j2), st2 in op(st).coeffs.items():
                out.add(p + p2, j + j2, st2)
        return out

    def map_states(self, fn):
        out = FieldValue()
        for (p, j), st in self.coeffs.items():
            out.add(p, j, fn(st))
        return out

    def zshift(self, c):
        return FieldValue({(_pk(p + c), j): st for (p, j), st in self.coeffs.items()})

    def truncated(self, fm=None, budget=None, J=None):
        out = FieldValue()
        for (p, j), st in self.coeffs.items():
            if J is not None and j > J:
                continue
            if budget is not None:
                st = {k: v for k, v in st.items() if fm.weight(k) <= budget + 1e-9}
            out.add(p, j, st)
        return out

    def times_zeta_series(self, series, J):
        out = FieldValue()
        for (p, j), st in self.coeffs.items():
            for k, c in enumerate(series):
                if j + k > J:
                    break
                if c != 0:
                    out.add(p, j + k, st, c)
        return out

    def D_z(self):
        """D_z = d/dz + z^{-1} d/dzeta applied termwise."""
        out = FieldValue()
        for (p, j), st in self.coeffs.items():
            if p != 0:
                out.add(p - 1, j, st, p)
            if j:
                out.add(p - 1, j - 1, st, j)
        return out

    def evaluate(self, zeta0):
        """The state obtained by substituting zeta = zeta0 and z = e^{zeta0}."""
        out = {}
        for (p, j), st in self.coeffs.items():
            c = cmath.exp(p * zeta0) * zeta0 ** j
            for k, v in st.items():
                add_to(out, k, c * v)
        return out

    def distance(self, other):
        keys = set(self.coeffs) | set(other.coeffs)
        return max((state_diff(self.coeffs.get(k, {}), other.coeffs.get(k, {})) for k in keys), default=0.0)

    def norm_table(self):
        """Rows (m, j, norm) with the exponent written as z^{-m-1}."""
        rows = []
        for (p, j), st in sorted(self.coeffs.items(), key=lambda kv: (kv[0][0].real, kv[0][0].imag, kv[0][1])):
            norm = math.sqrt(sum(abs(v) ** 2 for v in st.values()))
            rows.append((-p - 1, j, norm))
        return rows


def exp_zeta_series(poly_coeffs, J):
    """Coefficients of exp(sum_k g_k zeta^k) up to zeta^J (g_0 must vanish)."""
    g = list(poly_coeffs) + [0] * (J + 1)
    f = [1.0 + 0j] + [0j] * J
    for n in range(1, J + 1):
        f[n] = sum(k * g[k] * f[n - k] for k in range(1, n + 1)) / n
    return f


# ---------------------------------------------------------------- fields

class LogField:
    """Base class: a field is something that can be applied to a state."""

    def apply(self, state, bounds: Bounds) -> FieldValue:
        raise NotImplementedError

    def evaluate(self, state, zeta0, bounds: Bounds):
        return self.apply(state, bounds).evaluate(zeta0)

    def table(self, states, bounds: Bounds):
        total = FieldValue()
        for st in states:
            total += self.apply(st, bounds)
        return total.norm_table()


def _block_modes(fm: FockModule, vec, max_re, sign=None):
    """(block, m) for modes m in the cosets where vec has a component."""
    out = []
    for b in fm.jd.blocks:
        if np.max(np.abs(b.projector @ vec)) < 1e-14:
            continue
        lo = int(math.floor(-max_re - abs(b.alpha0.real) - 1))
        for n in range(lo, -lo + 1):
            m = b.alpha0 + n
            if abs(m.real) > max_re + 1e-9:
                continue
            if sign is not None and sign_class(m, tol=1e-9) != sign:
                continue
            out.append((b, m))
    return out


class CurrentField(LogField):
    """Y(a, z) = sum_alpha sum_{m in alpha} (z^{-m-1-N} a)_(m+N)."""

    def __init__(self, fm: FockModule, a):
        self.fm = fm
        self.a = np.asarray(a, dtype=complex)

    def mode_terms(self, max_re):
        """(m, j, vector) with the coefficient of z^{-m-1} zeta^j being vector_(m+N)."""
        jd = self.fm.jd
        powers = jd.nilp_powers()
        terms = []
        for b, m in _block_modes(self.fm, self.a, max_re):
            pa = b.projector @ self.a
            for j in range(jd.nilpotency_index):
                v = (-1) ** j / math.factorial(j) * (powers[j] @ pa)
                if np.max(np.abs(v)) > 1e-14:
                    terms.append((m, j, v))
        return terms

    def apply(self, state, bounds: Bounds):
        fm = self.fm
        max_re = max(bounds.budget, fm.state_weight(state)) + 1
        out = FieldValue()
        for m, j, v in self.mode_terms(max_re):
            res = fm.act_mode(v, m, state)
            res = {k: c for k, c in res.items() if fm.weight(k) <= bounds.budget + 1e-9}
            out.add(-m - 1, j, res)
        return out


class EField(LogField):
    """E_lambda(z)_+ (sign '+', creation modes) or E_lambda(z)_- (sign '-')."""

    def __init__(self, fm: FockModule, lam, sign):
        if sign not in "+-":
            raise BadInput("sign must be '+' or '-'")
        self.fm = fm
        self.lam = np.asarray(lam, dtype=complex)
        self.sign = sign

    def exponent_terms(self, max_re):
        """(m, k, vector): the exponent has vector_(m+N) z^{-m} zeta^k."""
        jd = self.fm.jd
        powers = jd.nilp_powers()
        cls = "minus" if self.sign == "+" else "plus"
        terms = []
        for b, m in _block_modes(self.fm, self.lam, max_re, sign=cls):
            pl = b.projector @ self.lam
            for k in range(jd.nilpotency_index):
                v = np.zeros(jd.dim, dtype=complex)
                for i in range(jd.nilpotency_index - k):
                    v += ((-1) ** k / math.factorial(k)) * ((-1) ** i / m ** (i + 1)) * (powers[i + k] @ pl)
                v = -v
                if np.max(np.abs(v)) > 1e-14:
                    terms.append((m, k, v))
        return terms

    def apply(self, state, bounds: Bounds):
        fm = self.fm
        if self.sign == "+":
            terms = self.exponent_terms(bounds.budget + 1)
        else:
            terms = self.exponent_terms(fm.state_weight(state) + 1)
        ops = [(m, k, fm.mode_operator(v, m)) for m, k, v in terms]
        total = FieldValue.of(state)
        term = FieldValue.of(state)
        n = 0
        while term.coeffs:
            n += 1
            nxt = FieldValue()
            for (p, j), st in term.coeffs.items():
                for m, k, op in ops:
                    if j + k > bounds.J:
                        continue
                    res = apply_keywise(op, st)
                    if self.sign == "+":
                        res = {key: c for key, c in res.items() if fm.weight(key) <= bounds.budget + 1e-9}
                    nxt.add(p - m, j + k, res, 1.0 / n)
            term = nxt
            total += term
        return total


class ZeroModePart(LogField):
    """U_lambda theta_lambda e^{zeta a_lambda} z^{b_lambda}, optionally without U."""

    def __init__(self, fm: FockModule, lam, with_U=True):
        self.fm = fm
        self.lam = np.asarray(lam, dtype=complex)
        self.with_U = with_U
        self.b = b_lambda(fm.jd, self.lam)
        self.a_coeffs = list(a_lambda(fm.jd, self.lam).coef)
        self._cache = {}

    def _zero_key_value(self, zkey, J):
        cached = self._cache.get((zkey, J))
        if cached is None:
            state = {((),) + zkey: 1.0}
            out = FieldValue.of(state).zshift(self.b)
            out = out.times_zeta_series(exp_zeta_series([0] + self.a_coeffs, J), J)
            out = out.then(lambda st: theta(self.fm, self.lam, st, J))
            if self.with_U:
                lam_int = np.rint(self.lam.real).astype(np.int64)
                out = out.map_states(lambda st: self.fm.act_U(lam_int, st))
            cached = self._cache[(zkey, J)] = out
        return cached

    def apply(self, state, bounds: Bounds):
        # the zero-mode operators leave the oscillator monomial untouched
        out = FieldValue()
        for key, c in state.items():
            for (p, j), st in self._zero_key_value(key[1:], bounds.J).coeffs.items():
                out.add(p, j, {(key[0],) + k[1:]: v for k, v in st.items()}, c)
        return out


def theta(fm: FockModule, h, state, J):
    """theta_h(zeta) = exp((zeta P^- h)_(0+N)) applied to a state.

    The zeta-linear diagonal part (Euler operators, constants, and the
    exponential grading seen by d/dy) becomes a power of z; the rest is
    expanded as a series in zeta up to degree J.
    """
    jd = fm.jd
    h0 = jd.pi0 @ np.asarray(h, dtype=complex)
    kappa = fm.rep.kappa
    levels = []
    v = h0
    for k in range(jd.nilpotency_index):
        w = (-1) ** k / math.factorial(k + 1) * v
        if np.max(np.abs(w)) > 1e-14:
            levels.append((k + 1, fm.zero_mode_terms(w)))
        v = jd.nilp @ v
    diag_terms = []
    ops = []  # (zeta power, key map)
    for power, terms in levels:
        if power == 1:
            diag_terms = [t for t in terms if t[0] in ("euler", "id")]
            rest = []
            for kind, var, c in terms:
                if kind == "y":
                    rest.append((kind, var, c))
                elif kind == "dy":
                    diag_terms.append(("dys", var, c))
                    rest.append(("dyp", var, c))
        else:
            rest = terms
        if rest:
            ops.append((power, _primitive_map(fm, rest)))

    def diag(key):
        _, y, s, q = key
        d = 0j
        for kind, var, c in diag_terms:
            if kind == "euler":
                d += c * q[var]
            elif kind == "id":
                d += c
            else:
                d += c * s[var] * kappa[var]
        return d

    total = FieldValue.of(state)
    term = FieldValue.of(state)
    n = 0
    while term.coeffs and ops:
        n += 1
        nxt = FieldValue()
        for (p, j), st in term.coeffs.items():
            for power, op in ops:
                if j + power <= J:
                    nxt.add(p, j + power, apply_keywise(op, st), 1.0 / n)
        term = nxt
        total += term
    out = FieldValue()
    for (p, j), st in total.coeffs.items():
        for key, c in st.items():
            out.add(p + diag(key), j, {key: c})
    return out


def _primitive_map(fm, terms):
    def op(key):
        osc, y, s, q = key
        out = []
        for kind, var, c in terms:
            if kind == "dyp":
                if y[var]:
                    y2 = list(y)
                    y2[var] -= 1
                    out.append(((osc, tuple(y2), s, q), c * y[var]))
            else:
                out.extend(fm._zero_primitive(key, kind, var, c))
        return out
    return op


class VertexField(LogField):
    """Y(e^lambda, z) = U_lambda theta_lambda e^{zeta a} z^b E_+ E_-."""

    def __init__(self, fm: FockModule, lam):
        self.fm = fm
        self.lam = np.asarray(lam)
        self.parts = [EField(fm, lam, "-"), EField(fm, lam, "+"), ZeroModePart(fm, lam)]

    def apply(self, state, bounds: Bounds):
        out = FieldValue.of(state)
        for part in self.parts:
            out = out.then(lambda st, part=part: part.apply(st, bounds))
        return out.truncated(J=bounds.J)


class ScaledField(LogField):
    def __init__(self, field, c):
        self.field, self.c = field, c

    def apply(self, state, bounds):
        return self.field.apply(state, bounds).scaled(self.c)


class ZeroField(LogField):
    def apply(self, state, bounds):
        return FieldValue()


def current_field(fm, a):
    return CurrentField(fm, a)


def E_factor(fm, lam, sign):
    return EField(fm, lam, sign)


def vertex_operator(fm, lam):
    return VertexField(fm, lam)


# ---------------------------------------------------------------- products

class ExponentialProduct(LogField):
    """(z1 - z2)^{-(lam|mu)} Y(e^lam, z1) Y(e^mu, z2) at z1 = z2, assembled
    from the two zero-mode parts, the contraction scalar B z^{-(lam|mu)} and
    the normally ordered exponentials."""

    def __init__(self, fm: FockModule, lam, mu, B=None):
        self.fm = fm
        self.lam, self.mu = np.asarray(lam), np.asarray(mu)
        self.pair = fm.ctx.pair(self.lam, self.mu)
        self.B = B_oracle(fm.jd, self.lam, self.mu) if B is None else B
        self.parts = [EField(fm, mu, "-"), EField(fm, lam, "-"), EField(fm, mu, "+"), EField(fm, lam, "+"),
                      ZeroModePart(fm, mu), ZeroModePart(fm, lam)]

    def apply(self, state, bounds):
        out = FieldValue.of(state)
        for part in self.parts:
            out = out.then(lambda st, part=part: part.apply(st, bounds)).truncated(J=bounds.J)
        return out.zshift(-self.pair).scaled(self.B)


class CurrentProduct(LogField):
    """a(z)_(n) b(z) for currents and 0 <= n < N_loc: a scalar multiple of Id.

    The scalar is the D_{z1}-derivative limit of (z1 - z2)^N_loc times the
    contraction of a(z1) with b(z2), computed by a Cauchy integral around
    z1 = z2.  The contraction sums over the positive modes of a in closed
    form: x^{S'+N}((S'+N)/(1-x) + x/(1-x)^2) with x = z2/z1.
    """

    def __init__(self, fm: FockModule, a, b, n, N_loc=2, radius=0.2, nodes=64):
        self.fm = fm
        self.a, self.b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
        self.n, self.N_loc = n, N_loc
        self.radius, self.nodes = radius, nodes

    def contraction(self, z1, z2, zeta1, zeta2):
        jd = self.fm.jd
        g = jd.gram.astype(complex)
        x = z2 / z1
        L = zeta2 - zeta1
        powers = jd.nilp_powers()
        total = 0j
        for blk in jd.blocks:
            pa = blk.projector @ self.a
            if np.max(np.abs(pa)) < 1e-14:
                continue
            a0 = blk.alpha0_prime
            expLN = sum(L ** k / math.factorial(k) * powers[k] for k in range(jd.nilpotency_index))
            A = a0 * np.eye(jd.dim) + jd.nilp
            mat = cmath.exp(a0 * L) * expLN @ (A / (1 - x) + x / (1 - x) ** 2 * np.eye(jd.dim))
            total += (mat @ pa) @ g @ self.b
        return total / (z1 * z2)

    def scalar(self, zeta0):
        z2 = cmath.exp(zeta0)
        k = self.N_loc - 1 - self.n
        r = self.radius * abs(z2)
        acc = 0j
        for t in range(self.nodes):
            w = cmath.exp(2j * math.pi * t / self.nodes)
            z1 = z2 + r * w
            zeta1 = zeta0 + cmath.log(z1 / z2)
            f = (z1 - z2) ** self.N_loc * self.contraction(z1, z2, zeta1, zeta0)
            acc += f / (r * w) ** k
        return acc / self.nodes

    def evaluate(self, state, zeta0, bounds):
        return scale(state, self.scalar(zeta0))


def nth_product(f: LogField, g: LogField, n: int, N_loc: int | None = None):
    """The n-th product of two fields for the pairs where the limit formula
    reduces to finite data: two vertex operators at n = -1 - (lam|mu), two
    currents at 0 <= n < N_loc, and any pair with n >= N_loc (zero)."""
    if isinstance(f, VertexField) and isinstance(g, VertexField):
        pair = f.fm.ctx.pair(f.lam, g.lam).real
        default = max(0, -int(round(pair)))
        N_loc = default if N_loc is None else N_loc
        if N_loc < default:
            raise BadInput(f"N_loc must be at least {default}")
        if n >= N_loc:
            return ZeroField()
        if n != -1 - int(round(pair)):
            raise BadInput("only the product n = -1 - (lam|mu) is available for exponentials")
        return ExponentialProduct(f.fm, f.lam, g.lam)
    if isinstance(f, CurrentField) and isinstance(g, CurrentField):
        N_loc = 2 if N_loc is None else N_loc
        if N_loc < 2:
            raise BadInput("currents need N_loc >= 2")
        if n >= N_loc:
            return ZeroField()
        if n < 0:
            raise BadInput("negative products of currents are not available")
        return CurrentProduct(f.fm, f.a, g.a, n, N_loc)
    if N_loc is not None and n >= N_loc:
        return ZeroField()
    raise BadInput("unsupported pair of fields for the n-th product")


# ---------------------------------------------------------------- checks

def _sample_states(fm: FockModule, count=12, seed=0, max_weight=None):
    rng = np.random.default_rng(seed)
    basis = fm.basis()
    if max_weight is not None:
        basis = [k for k in basis if fm.weight(k) <= max_weight + 1e-9]
    idx = rng.choice(len(basis), size=min(count, len(basis)), replace=False)
    return [{basis[i]: 1.0} for i in sorted(idx)]


def _scalar_series(jd, a, lam, m):
    """Coefficients c_j with (z^{m+N} pi_alpha a | lam) = z^m sum_j c_j zeta^j."""
    blk = jd.block_of_mode(m)
    if blk is None:
        return []
    pa = blk.projector @ np.asarray(a, dtype=complex)
    powers = jd.nilp_powers()
    lam = np.asarray(lam, dtype=complex)
    return [complex((powers[j] @ pa) @ jd.gram @ lam) / math.factorial(j) for j in range(jd.nilpotency_index)]


def commutator_check(fm: FockModule, field: LogField, lam, a, m, states, bounds: Bounds):
    """Residual of [a_(m+N), F(z)] = (z^{m+N} pi_alpha a | lam) F(z), compared
    on components of weight <= bounds.budget and zeta-degree <= J - nilpotency."""
    lower = max(0.0, complex(m).real) + 1 if sign_class(m, tol=1e-9) == "plus" else 0.0
    inner = Bounds(bounds.budget + lower, bounds.J)
    jcmp = bounds.J - fm.jd.nilpotency_index
    coeffs = _scalar_series(fm.jd, a, lam, m)
    worst = 0.0
    for st in states:
        fv = field.apply(st, inner)
        lhs = fv.map_states(lambda s: fm.act_mode(a, m, s))
        right = field.apply(fm.act_mode(a, m, st), inner)
        lhs += right.scaled(-1)
        rhs = FieldValue()
        for (p, j), s in fv.coeffs.items():
            for k, c in enumerate(coeffs):
                rhs.add(p + m, j + k, s, c)
        worst = max(worst, lhs.truncated(fm, bounds.budget, jcmp).distance(rhs.truncated(fm, bounds.budget, jcmp)))
    return worst


def emodes_check(fm, lam, modes, states, bounds):
    field = _EProduct(fm, lam)
    n = fm.jd.dim
    return max(commutator_check(fm, field, lam, np.eye(n)[i], m, states, bounds)
               for i in range(n) for m in modes if abs(m) > 1e-12)


class _EProduct(LogField):
    def __init__(self, fm, lam):
        self.parts = [EField(fm, lam, "-"), EField(fm, lam, "+")]

    def apply(self, state, bounds):
        out = FieldValue.of(state)
        for part in self.parts:
            out = out.then(lambda st, part=part: part.apply(st, bounds))
        return out


def hvobrext_check(fm, lam, modes, states, bounds):
    field = VertexField(fm, lam)
    n = fm.jd.dim
    return max(commutator_check(fm, field, lam, np.eye(n)[i], m, states, bounds)
               for i in range(n) for m in modes)


def check_phi_equivariance(fm: FockModule, lam, states=None):
    """Residual of U_{phi lam} = eta(lam) e^{2 pi i c_lam} U_lam tau_lam on states."""
    ctx = fm.ctx
    lam = np.asarray(lam, dtype=np.int64)
    states = states or _sample_states(fm, 20)
    scalar = ctx.eta(lam) * cmath.exp(TWO_PI_I * c_lambda(fm.jd, lam))
    worst = 0.0
    for st in states:
        lhs = fm.act_U(ctx.phi(lam), st)
        rhs = scale(fm.act_U(lam, fm.act_tau(lam, st)), scalar)
        worst = max(worst, state_diff(lhs, rhs) / max(1.0, max(abs(v) for v in lhs.values())))
    return {"lambda": lam.tolist(), "max_residual": worst}


DEFAULT_ZETAS = (0.3 + 0.2j, -0.25 + 0.35j)


def product_limit_check(fm: FockModule, lam, mu, states=None, bounds=Bounds(), zetas=DEFAULT_ZETAS, B=None):
    """Compare (z1-z2)^{-(lam|mu)} Y(e^lam,z1) Y(e^mu,z2)|_{z1=z2} with
    eps(lam,mu) Y(e^{lam+mu}, z), evaluated at z = e^{zeta0}."""
    lam, mu = np.asarray(lam), np.asarray(mu)
    states = states or _sample_states(fm, 8)
    lhs_field = ExponentialProduct(fm, lam, mu, B)
    rhs_field = VertexField(fm, lam + mu)
    eps = fm.ctx.eps(lam, mu)
    worst = 0.0
    for st in states:
        lv = lhs_field.apply(st, bounds)
        rv = rhs_field.apply(st, bounds)
        for z0 in zetas:
            a = lv.truncated(fm, bounds.budget).evaluate(z0)
            b = scale(rv.truncated(fm, bounds.budget).evaluate(z0), eps)
            norm = max(1.0, max((abs(v) for v in b.values()), default=0.0))
            worst = max(worst, state_diff(a, b) / norm)
    return {"lambda": lam.tolist(), "mu": mu.tolist(), "max_residual": worst}


def dz_check(fm: FockModule, lam, states=None, bounds=Bounds(), zetas=DEFAULT_ZETAS):
    """Residual of D_z Y(e^lam) = :Y(lam,z) Y(e^lam,z): + z^{-1} b_lam Y(e^lam,z)."""
    lam = np.asarray(lam)
    states = states or _sample_states(fm, 6, max_weight=bounds.budget - 1)
    Y = VertexField(fm, lam)
    cur = CurrentField(fm, lam)
    b = b_lambda(fm.jd, lam)
    worst = 0.0
    for st in states:
        inner = Bounds(bounds.budget + fm.state_weight(st) + 2, bounds.J)
        yv = Y.apply(st, inner)
        lhs = yv.D_z()
        nop = FieldValue()
        max_re = inner.budget + 1
        for m, j, v in cur.mode_terms(max_re):
            if sign_class(m, tol=1e-9) == "minus":
                part = yv.map_states(lambda s: fm.act_mode(v, m, s))
            else:
                part = Y.apply(fm.act_mode(v, m, st), inner)
            nop += part.then(lambda s, m=m, j=j: FieldValue({(_pk(-m - 1), j): s}))
        nop += yv.zshift(-1).scaled(b)
        for z0 in zetas:
            a = lhs.truncated(fm, bounds.budget, bounds.J - 1).evaluate(z0)
            c = nop.truncated(fm, bounds.budget, bounds.J - 1).evaluate(z0)
            norm = max(1.0, max((abs(v) for v in a.values()), default=0.0))
            worst = max(worst, state_diff(a, c) / norm)
    return worst


# ---------------------------------------------------------------- scalar locality

def _lerch_series_derivatives(y, a, order, terms=10_000):
    """d^j/da^j of y^a Phi(y, 1, a) from the power series in y (|y| < 1)."""
    k = np.arange(terms, dtype=float)
    ly = cmath.log(y)
    base = np.exp(k * ly + a * ly)
    out = []
    for j in range(order + 1):
        s = 0j
        for i in range(j + 1):
            s += math.comb(j, i) * ly ** (j - i) * (-1) ** i * math.factorial(i) * np.sum(base / (k + a) ** (i + 1))
        out.append(complex(s))
    return out


def _log_one_minus_phi(jd: JordanData, lam, mu, x, derivs):
    """((ln(1-x) + x^{S'+N} Phi(x, 1, S'+N)) lam | mu) given per-block derivatives."""
    vec = nilpotent_calculus(jd, derivs, lam) + cmath.log(1 - x) * np.asarray(lam, dtype=complex)
    return complex(vec @ jd.gram @ np.asarray(mu, dtype=complex))


def scalar_locality_check(jd: JordanData, lattice, lam, mu, test_points=(2j, 1 + 1j, -1 + 2j), terms=10_000):
    """Evaluate the regular function of the locality proof at z1 = 1, z2 = x in
    two ways: by analytic continuation of the |z1| > |z2| expression, and by
    the transported |z2| > |z1| expansion with the commutation constant C."""
    lam_v = np.asarray(lam, dtype=complex)
    mu_v = np.asarray(mu, dtype=complex)
    order = jd.nilpotency_index - 1
    pair = complex(lam_v @ jd.gram @ mu_v)
    sign = (-1) ** int(round((lattice.norm(lam) * lattice.norm(mu) + pair.real)))
    C = C_constant(jd, lattice, lam, mu)
    lam0 = jd.pi0 @ lam_v
    powers = jd.nilp_powers()
    rows = []
    worst = 0.0
    for x in test_points:
        x = complex(x)
        if abs(x.imag) < 1e-12:
            raise BadInput("test points must lie off the real axis")
        derivs_a = [specfun.lerch_a_derivatives(x, b.alpha0_prime, order) for b in jd.blocks]
        side_a = cmath.exp(-_log_one_minus_phi(jd, lam_v, mu_v, x, derivs_a))
        y = 1 / x
        derivs_b = [_lerch_series_derivatives(y, b.alpha0_prime, order, terms) for b in jd.blocks]
        lx = cmath.log(x)
        transport = sum(lx ** (j + 1) / math.factorial(j + 1) * (powers[j] @ lam0) for j in range(jd.nilpotency_index))
        side_b = (sign / C * cmath.exp(complex(transport @ jd.gram @ mu_v)) * cmath.exp(-pair * lx)
                  * cmath.exp(-_log_one_minus_phi(jd, mu_v, lam_v, y, derivs_b)))
        diff = abs(side_a - side_b) / max(1.0, abs(side_a))
        worst = max(worst, diff)
        rows.append({"x": x, "direct": side_a, "transported": side_b, "residual": diff})
    return {"max_residual": worst, "points": rows}


def field_table(fm, lam, order, states=None, J=6):
    """(m, j, norm) rows of Y(e^lam, z) applied to sample states."""
    states = states or _sample_states(fm, 4, max_weight=0)
    return VertexField(fm, lam).table(states, Bounds(order, J))
