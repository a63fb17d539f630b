"""Generalized Verma modules over the twisted Heisenberg algebra.

States are sparse dictionaries ``key -> coefficient`` with
``key = (osc, ydeg, sgrade, qexp)``:

* ``osc``: sorted tuple of ``(variable_id, power)`` for the creation variables,
* ``ydeg``: polynomial degree in each zero-mode variable y_i,
* ``sgrade``: integer s_i of the factor exp(s_i kappa_i y_i),
* ``qexp``: Laurent exponent of each q_j.

Operators act on single keys and are extended linearly, so mode algebra is
exact; truncation only enters when infinite sums (fields) are expanded.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .decomp import TWO_PI_I, JordanData, sign_class
from .errors import BasisTooLarge, NoUDescriptor, RepInconsistent, ThetaWindowOverflow, UnsupportedBlockStructure
from .group import GroupContext, GroupElement, multiply, inverse

COEFF_TOL = 1e-15


# ---------------------------------------------------------------- states

def add_to(out, key, c):
    if c == 0:
        return
    v = out.get(key, 0) + c
    if v == 0:
        out.pop(key, None)
    else:
        out[key] = v


def lin(*terms):
    """Linear combination of (coefficient, state) pairs."""
    out = {}
    for c, st in terms:
        for k, v in st.items():
            add_to(out, k, c * v)
    return out


def scale(state, c):
    return {k: c * v for k, v in state.items()} if c != 0 else {}


def max_abs(state):
    return max((abs(v) for v in state.values()), default=0.0)


def state_diff(a, b):
    return max_abs(lin((1, a), (-1, b)))


def apply_keywise(fn, state):
    """Extend a key -> list[(key, coeff)] map linearly."""
    out = {}
    for k, v in state.items():
        for k2, c in fn(k):
            add_to(out, k2, v * c)
    return out


# ---------------------------------------------------------------- module spec

@dataclass(frozen=True)
class ZeroModeRep:
    """Zero-mode representation R and the U operators on it.

    ``zero_basis`` columns are vectors of h_0 (lattice coordinates);
    ``zero_ops[i]`` lists primitives ``(kind, var, coeff)`` with kind in
    {y, dy, euler, id} giving the zero mode of column i.  ``u_factors[i]``
    is the U operator of the i-th lattice generator as an operator product
    (leftmost factor first) of ``(scalar, c)``, ``(qmul, j, p)``,
    ``(phase, j, log_w)``, ``(expmul, i, s)`` and ``(shift, i, t)``.
    """

    y_count: int
    q_count: int
    kappa: tuple
    zero_basis: np.ndarray
    zero_ops: tuple
    u_factors: tuple = None


@dataclass(frozen=True)
class VirasoroBlock:
    kind: str  # "symm1" or "symm2"
    vectors: np.ndarray  # columns v_1..v_d in lattice coordinates
    alpha0: complex


@dataclass(frozen=True)
class Windows:
    ymax: int = 2
    smax: int = 1
    qmax: int = 1


@dataclass(frozen=True)
class ModuleSpec:
    name: str
    rep: ZeroModeRep
    creation_basis: dict = field(default_factory=dict)  # block index -> columns
    virasoro: tuple = ()


# ---------------------------------------------------------------- the module

@dataclass(frozen=True)
class Variable:
    block: int
    r: int
    k: int  # the mode is alpha0 - k
    mode: complex
    weight: float


def mode_weight(m):
    """Grading used for truncation; modes on the imaginary axis count as 1."""
    w = -complex(m).real
    return w if w > 1e-12 else 1.0


class FockModule:
    def __init__(self, ctx: GroupContext, spec: ModuleSpec, cutoff=3.0, windows=Windows(), max_basis=200_000):
        self.ctx = ctx
        self.jd: JordanData = ctx.jd
        self.spec = spec
        self.rep = spec.rep
        self.cutoff = float(cutoff)
        self.windows = windows
        self.max_basis = max_basis
        self._gram = self.jd.gram.astype(complex)
        self._cbasis = {}
        self._cbasis_inv = {}
        for b in self.jd.blocks:
            cols = spec.creation_basis.get(b.index)
            cols = b.basis if cols is None else np.asarray(cols, dtype=complex)
            self._cbasis[b.index] = cols
            self._cbasis_inv[b.index] = np.linalg.pinv(cols)
        self._zinv = np.linalg.pinv(np.asarray(self.rep.zero_basis, dtype=complex))
        self.variables = []
        self._var_index = {}
        self._u_cache = {}
        self.check_rep()

    # -- variables

    def var_id(self, block, r, k):
        key = (block, r, k)
        vid = self._var_index.get(key)
        if vid is None:
            b = self.jd.blocks[block]
            m = b.alpha0 - k
            vid = len(self.variables)
            self.variables.append(Variable(block, r, k, m, mode_weight(m)))
            self._var_index[key] = vid
        return vid

    def creation_modes(self, block, max_weight):
        """(k, m) for the creation modes of a block with weight <= max_weight."""
        b = self.jd.blocks[block]
        out = []
        k = 0
        while True:
            m = b.alpha0 - k
            if sign_class(m) == "minus":
                if mode_weight(m) > max_weight + 1e-9:
                    break
                out.append((k, m))
            k += 1
            if k > max_weight + 3:
                break
        return out

    def weight(self, key):
        return sum(self.variables[v].weight * p for v, p in key[0])

    def state_weight(self, state):
        return max((self.weight(k) for k in state), default=0.0)

    # -- basis

    def vacuum(self, ydeg=None, s=None, q=None):
        r = self.rep
        return ((), tuple(ydeg or (0,) * r.y_count), tuple(s or (0,) * r.y_count), tuple(q or (0,) * r.q_count))

    def osc_monomials(self, max_weight):
        vids = []
        for b in self.jd.blocks:
            dim = self._cbasis[b.index].shape[1]
            for k, m in self.creation_modes(b.index, max_weight):
                for r in range(dim):
                    vids.append(self.var_id(b.index, r, k))
        vids.sort()
        out = []

        def rec(i, remaining, acc):
            if i == len(vids):
                out.append(tuple(acc))
                return
            w = self.variables[vids[i]].weight
            p = 0
            while p * w <= remaining + 1e-9:
                rec(i + 1, remaining - p * w, acc + ([(vids[i], p)] if p else []))
                p += 1

        rec(0, max_weight, [])
        return out

    def basis(self):
        w = self.windows
        r = self.rep
        zero_part = list(itertools.product(
            itertools.product(range(w.ymax + 1), repeat=r.y_count),
            itertools.product(range(-w.smax, w.smax + 1), repeat=r.y_count),
            itertools.product(range(-w.qmax, w.qmax + 1), repeat=r.q_count)))
        osc = self.osc_monomials(self.cutoff)
        if len(osc) * len(zero_part) > self.max_basis:
            raise BasisTooLarge(f"{len(osc) * len(zero_part)} states exceed the cap {self.max_basis}")
        return [(o, y, s, q) for o in osc for (y, s, q) in zero_part]

    def weight_histogram(self):
        hist = {}
        for key in self.basis():
            w = round(self.weight(key), 9)
            hist[w] = hist.get(w, 0) + 1
        return dict(sorted(hist.items()))

    # -- elementary key operations

    @staticmethod
    def _osc_mul(osc, vid, n=1):
        d = dict(osc)
        d[vid] = d.get(vid, 0) + n
        return tuple(sorted(d.items()))

    @staticmethod
    def _osc_diff(osc, vid):
        d = dict(osc)
        p = d.get(vid, 0)
        if p == 0:
            return None, 0
        if p == 1:
            del d[vid]
        else:
            d[vid] = p - 1
        return tuple(sorted(d.items())), p

    def _zero_primitive(self, key, kind, var, coeff):
        osc, y, s, q = key
        if kind == "id":
            return [(key, coeff)]
        if kind == "euler":
            return [(key, coeff * q[var])] if q[var] else []
        if kind == "y":
            y2 = list(y)
            y2[var] += 1
            return [((osc, tuple(y2), s, q), coeff)]
        if kind == "dy":
            out = []
            if y[var]:
                y2 = list(y)
                y2[var] -= 1
                out.append(((osc, tuple(y2), s, q), coeff * y[var]))
            if s[var]:
                out.append((key, coeff * s[var] * self.rep.kappa[var]))
            return out
        raise ValueError(f"unknown zero-mode primitive {kind!r}")

    # -- modes

    def block_coords(self, block, a):
        b = self.jd.blocks[block]
        return self._cbasis_inv[block] @ (b.projector @ np.asarray(a, dtype=complex))

    def zero_mode_terms(self, a):
        """Primitive list of the zero mode a_(0+N)."""
        coords = self._zinv @ (self.jd.pi0 @ np.asarray(a, dtype=complex))
        terms = []
        for i, c in enumerate(coords):
            if abs(c) < COEFF_TOL:
                continue
            for kind, var, coeff in self.rep.zero_ops[i]:
                terms.append((kind, var, c * coeff))
        return terms

    def mode_operator(self, a, m):
        """The mode a_(m+N) as a key map."""
        m = complex(m)
        a = np.asarray(a, dtype=complex)
        if abs(m) < 1e-12:
            terms = self.zero_mode_terms(a)

            def zero(key):
                out = []
                for kind, var, coeff in terms:
                    out.extend(self._zero_primitive(key, kind, var, coeff))
                return out
            return zero
        if sign_class(m, tol=1e-9) == "minus":
            b = self.jd.block_of_mode(m)
            if b is None:
                return lambda key: []
            k = int(round((b.alpha0 - m).real))
            coords = self.block_coords(b.index, a)
            vids = [(self.var_id(b.index, r, k), c) for r, c in enumerate(coords) if abs(c) > COEFF_TOL]

            def create(key):
                return [((self._osc_mul(key[0], vid),) + key[1:], c) for vid, c in vids]
            return create
        b = self.jd.block_of_mode(-m)
        if b is None:
            return lambda key: []
        k = int(round((b.alpha0 + m).real))
        shifted = m * a + self.jd.nilp @ a
        cols = self._cbasis[b.index]
        pairs = [(self.var_id(b.index, r, k), complex(shifted @ self._gram @ cols[:, r])) for r in range(cols.shape[1])]
        pairs = [(vid, c) for vid, c in pairs if abs(c) > COEFF_TOL]

        def annihilate(key):
            out = []
            for vid, c in pairs:
                osc, p = self._osc_diff(key[0], vid)
                if p:
                    out.append(((osc,) + key[1:], c * p))
            return out
        return annihilate

    def act_mode(self, a, m, state):
        return apply_keywise(self.mode_operator(a, m), state)

    def bracket_scalar(self, a, m, b, n):
        """delta_{m,-n} ((m+N) pi_alpha a | b) for the pair of modes."""
        if abs(complex(m) + complex(n)) > 1e-9:
            return 0j
        blk = self.jd.block_of_mode(m)
        if blk is None:
            return 0j
        pa = blk.projector @ np.asarray(a, dtype=complex)
        return complex((complex(m) * pa + self.jd.nilp @ pa) @ self._gram @ np.asarray(b, dtype=complex))

    def modes_of(self, a, max_re):
        """All modes m (with |Re m| <= max_re) whose coset meets the support of a."""
        a = np.asarray(a, dtype=complex)
        out = []
        for b in self.jd.blocks:
            if np.max(np.abs(b.projector @ a)) < COEFF_TOL:
                continue
            lo = int(math.floor(-max_re - 1))
            for k in range(lo, int(math.ceil(max_re)) + 2):
                m = b.alpha0 + k
                if abs(m.real) <= max_re + 1e-9:
                    out.append(m)
        return out

    # -- consistency of the zero-mode representation

    def check_rep(self, samples=None):
        r = self.rep
        keys = samples or [self.vacuum(ydeg=(2,) * r.y_count, s=(1,) * r.y_count, q=(1,) * r.q_count)]
        n = self.jd.dim
        basis = [np.eye(n)[i] for i in range(n)]
        worst = 0.0
        for a in basis:
            for b in basis:
                expected = complex((self.jd.nilp @ (self.jd.pi0 @ a)) @ self._gram @ (self.jd.pi0 @ b))
                for key in keys:
                    st = {key: 1.0}
                    ab = self.act_mode(a, 0, self.act_mode(b, 0, st))
                    ba = self.act_mode(b, 0, self.act_mode(a, 0, st))
                    worst = max(worst, state_diff(lin((1, ab), (-1, ba)), scale(st, expected)))
        if worst > 1e-9:
            raise RepInconsistent(f"zero modes violate the Heisenberg relation (residual {worst:.3g})")
        return worst

    # -- U operators

    def _factor_apply(self, factor, key):
        osc, y, s, q = key
        kind = factor[0]
        if kind == "scalar":
            return [(key, factor[1])]
        if kind == "qmul":
            _, j, p = factor
            q2 = list(q)
            q2[j] += p
            return [((osc, y, s, tuple(q2)), 1.0)]
        if kind == "phase":
            _, j, logw = factor
            return [(key, cmath.exp(logw * q[j]))]
        if kind == "qdiag":
            _, weights, const = factor
            return [(key, cmath.exp(const + sum(w * qj for w, qj in zip(weights, q))))]
        if kind == "expmul":
            _, i, sh = factor
            s2 = list(s)
            s2[i] += sh
            return [((osc, y, tuple(s2), q), 1.0)]
        if kind == "shift":
            _, i, t = factor
            n = y[i]
            pref = cmath.exp(s[i] * self.rep.kappa[i] * t)
            out = []
            for kk in range(n + 1):
                y2 = list(y)
                y2[i] = kk
                out.append(((osc, tuple(y2), s, q), pref * math.comb(n, kk) * t ** (n - kk)))
            return out
        raise ValueError(f"unknown U factor {kind!r}")

    @staticmethod
    def _invert_factors(factors):
        inv = []
        for f in reversed(factors):
            kind = f[0]
            if kind == "scalar":
                inv.append(("scalar", 1 / f[1]))
            elif kind == "qmul":
                inv.append(("qmul", f[1], -f[2]))
            elif kind == "phase":
                inv.append(("phase", f[1], -f[2]))
            elif kind == "qdiag":
                inv.append(("qdiag", tuple(-w for w in f[1]), -f[2]))
            elif kind == "expmul":
                inv.append(("expmul", f[1], -f[2]))
            elif kind == "shift":
                inv.append(("shift", f[1], -f[2]))
        return inv

    def apply_factors(self, factors, state):
        for f in reversed(factors):
            state = apply_keywise(lambda key, f=f: self._factor_apply(f, key), state)
        return state

    def U_factors(self, lam):
        """Factor list of U_lambda: the basis-ordered product of generator
        operators, rescaled so that it represents the group element U_lambda."""
        if self.rep.u_factors is None:
            raise NoUDescriptor("the zero-mode representation carries no U operators")
        lam = np.asarray(lam, dtype=np.int64)
        key = tuple(lam.tolist())
        if key in self._u_cache:
            return self._u_cache[key]
        ctx = self.ctx
        factors = []
        elem = ctx.identity()
        for i, k in enumerate(lam):
            if k == 0:
                continue
            gen = list(self.rep.u_factors[i])
            g = ctx.U(ctx.lattice.basis(i))
            if k < 0:
                gen = self._invert_factors(gen)
                g = inverse(g, ctx)
            for _ in range(abs(int(k))):
                factors.extend(gen)
                elem = multiply(elem, g, ctx)
        assert np.array_equal(elem.lam, lam)
        factors = [("scalar", 1 / elem.c)] + factors
        self._u_cache[key] = factors
        return factors

    def act_U(self, lam, state):
        return self.apply_factors(self.U_factors(lam), state)

    # -- exponentials of zero modes

    def exp_zero_factors(self, h):
        """Factor list of exp(h_(0+N)) for h in h_0.

        Writing the zero mode as c y + t d/dy + diagonal part, the exponential
        is exp(c y) exp(t d/dy) exp(c t / 2) times the diagonal exponential;
        exp(c y) must be one of the admitted factors exp(s kappa y).
        """
        terms = self.zero_mode_terms(h)
        r = self.rep
        cy = [0j] * r.y_count
        ct = [0j] * r.y_count
        qw = [0j] * r.q_count
        const = 0j
        for kind, var, coeff in terms:
            if kind == "y":
                cy[var] += coeff
            elif kind == "dy":
                ct[var] += coeff
            elif kind == "euler":
                qw[var] += coeff
            else:
                const += coeff
        factors = [("qdiag", tuple(qw), const)]
        for i in range(r.y_count):
            if abs(cy[i]) > 1e-13:
                sgrade = cy[i] / r.kappa[i]
                if abs(sgrade - round(sgrade.real)) > 1e-9:
                    raise ThetaWindowOverflow(
                        f"exp({cy[i]} y) is not among the exponential factors exp(s kappa y)")
                factors.append(("expmul", i, int(round(sgrade.real))))
            if abs(ct[i]) > 1e-13:
                factors.append(("shift", i, ct[i]))
            factors.append(("scalar", cmath.exp(cy[i] * ct[i] / 2)))
        return factors

    def act_group_element(self, x: GroupElement, state):
        """c U_lambda e^h acting on a state."""
        st = self.apply_factors(self.exp_zero_factors(x.h), state)
        st = self.act_U(x.lam, st)
        return scale(st, x.c)

    def act_tau(self, lam, state):
        from .structure import tau_argument
        return self.apply_factors(self.exp_zero_factors(tau_argument(self.jd, lam)), state)

    # -- Virasoro operators

    def virasoro(self, k, state):
        if not self.spec.virasoro:
            raise UnsupportedBlockStructure("no canonical basis for the Virasoro operators was supplied")
        out = {}
        wmax = self.state_weight(state) + abs(k) + 2
        for vb in self.spec.virasoro:
            v = np.asarray(vb.vectors, dtype=complex)
            d = v.shape[1]
            if vb.kind == "symm1":
                idx, pref, const = range(d // 2), 1.0, (d // 2) / 2
            elif vb.kind == "symm2":
                idx, pref, const = range(d), 0.5, d / 4
            else:
                raise UnsupportedBlockStructure(f"unknown block type {vb.kind!r}")
            a0 = complex(vb.alpha0)
            lo = int(math.floor(-wmax - abs(a0) - 1))
            for i in idx:
                dual = v[:, d - 1 - i]
                vi = v[:, i]
                for n in range(lo, -lo + 1):
                    m = a0 + n
                    left_mode = -m
                    right_mode = k + m
                    if sign_class(left_mode, tol=1e-9) == "minus":
                        term = self.act_mode(dual, left_mode, self.act_mode(vi, right_mode, state))
                    else:
                        term = self.act_mode(vi, right_mode, self.act_mode(dual, left_mode, state))
                    for key, c in term.items():
                        add_to(out, key, pref * c)
            if k == 0:
                shift = -const * a0 * (a0 + 1)
                if shift != 0:
                    for key, c in state.items():
                        add_to(out, key, shift * c)
        return out


# ---------------------------------------------------------------- presets

def _cols(*vectors):
    return np.array(vectors, dtype=complex).T


def preset_spec(name):
    pi = math.pi
    if name == "example-6.1":
        v = _cols([1, 0, 0, 0], [0, 1 / TWO_PI_I, 0, 0], [0, 0, TWO_PI_I, 0], [0, 0, 0, 1])
        rep = ZeroModeRep(
            y_count=1, q_count=2, kappa=(-TWO_PI_I,),
            zero_basis=np.eye(4, dtype=complex),
            zero_ops=((("y", 0, 1.0),), (("euler", 0, 1.0),), (("dy", 0, -1 / TWO_PI_I),), (("euler", 1, 1.0),)),
            u_factors=(
                (("qmul", 1, 1),),
                (("phase", 0, 1j * pi), ("expmul", 0, 1)),
                (("qmul", 0, 1), ("phase", 1, -1j * pi / 6)),
                (("phase", 1, 1j * pi), ("shift", 0, -1.0)),
            ))
        return ModuleSpec(name, rep, {0: v}, (VirasoroBlock("symm1", v, 0j),))
    if name == "example-6.2":
        r2 = math.sqrt(2)
        v = _cols([0, 0, -TWO_PI_I / r2], [1 / r2, 0, 0], [0, -r2 / TWO_PI_I, 0])
        rep = ZeroModeRep(
            y_count=1, q_count=1, kappa=(-r2,),
            zero_basis=np.eye(3, dtype=complex),
            zero_ops=((("dy", 0, -r2),), (("euler", 0, 1.0),), (("y", 0, -r2 / TWO_PI_I),)),
            u_factors=(
                (("scalar", -1j), ("phase", 0, 1j * pi / 3), ("expmul", 0, 1)),
                (("phase", 0, 1j * pi), ("shift", 0, TWO_PI_I / r2)),
                (("qmul", 0, 1),),
            ))
        return ModuleSpec(name, rep, {0: v}, (VirasoroBlock("symm2", v, 0j),))
    if name == "hyperbolic-identity":
        v = np.eye(2, dtype=complex)
        rep = ZeroModeRep(
            y_count=0, q_count=2, kappa=(),
            zero_basis=np.eye(2, dtype=complex),
            zero_ops=((("euler", 1, 1.0),), (("euler", 0, 1.0),)),
            u_factors=((("qmul", 0, 1),), (("qmul", 1, 1), ("phase", 0, 1j * pi))))
        return ModuleSpec(name, rep, {0: v}, (VirasoroBlock("symm1", v, 0j),))
    raise KeyError(f"unknown module preset {name!r}")


def polarization_spec(jd: JordanData, name="polarization"):
    """Zero modes for a general phi: h_0 is split into the radical of
    (N a|b), realized by Euler operators, and Darboux pairs realized by d/dy
    and y.  No U operators are attached."""
    z = jd.zero_block
    if z is None:
        rep = ZeroModeRep(0, 0, (), np.zeros((jd.dim, 0), dtype=complex), ())
        return ModuleSpec(name, rep)
    basis = z.basis
    g = jd.gram.astype(complex)
    omega = basis.T @ jd.nilp.T @ g @ basis  # omega[i, j] = (N b_i | b_j)
    n = basis.shape[1]
    # symplectic Gram-Schmidt on the antisymmetric form omega
    vecs = [np.eye(n, dtype=complex)[i] for i in range(n)]
    pairs, radical = [], []
    while vecs:
        e = vecs.pop(0)
        partner = None
        for j, f in enumerate(vecs):
            if abs(e @ omega @ f) > 1e-10:
                partner = vecs.pop(j)
                break
        if partner is None:
            radical.append(e)
            continue
        w = e @ omega @ partner
        partner = partner / w
        pairs.append((e, partner))
        vecs = [x - (x @ omega @ partner) * e + (x @ omega @ e) * partner for x in vecs]
    cols, ops = [], []
    for i, (e, f) in enumerate(pairs):
        # [e_0, f_0] = 1 is realized by e_0 = d/dy, f_0 = y
        cols += [basis @ e, basis @ f]
        ops += [(("dy", i, 1.0),), (("y", i, 1.0),)]
    for j, e in enumerate(radical):
        cols.append(basis @ e)
        ops.append((("euler", j, 1.0),))
    rep = ZeroModeRep(len(pairs), len(radical), (1.0,) * len(pairs), np.array(cols).T, tuple(ops))
    return ModuleSpec(name, rep)


def build_verma(ctx: GroupContext, spec: ModuleSpec, cutoff=3.0, windows=Windows(), max_basis=200_000):
    return FockModule(ctx, spec, cutoff, windows, max_basis)
