"""Check batteries behind ``twistlat verify``.

Each battery returns a list of records ``{name, identity, max_residual,
tolerance, pass}``; a battery passes when every record does.
"""
from __future__ import annotations

import time

import numpy as np

from . import specfun
from .document import Setup
from .fock import lin, scale, state_diff
from .group import group_battery
from .structure import B_constant, B_oracle, C_constant
from .vertexop import (
    Bounds, CurrentField, _sample_states, check_phi_equivariance, dz_check, emodes_check, hvobrext_check,
    nth_product, product_limit_check, scalar_locality_check,
)


def record(name, identity, residual, tolerance):
    residual = float(residual)
    return {"name": name, "identity": identity, "max_residual": residual, "tolerance": tolerance,
            "pass": bool(residual <= tolerance)}


def specfun_suite(seed=0):
    res = specfun.identity_suite(seed=seed)
    labels = {
        "digamma_reflection": "Psi(-a) - Psi(a+1) = pi cot(pi a)",
        "digamma_reflection_polylog": "Psi(-a) - Psi(a+1) = 2 pi i Li_0(e^{-2 pi i a}) + pi i",
        "polygamma_reflection": "polygamma reflection through Li_{-j}, j <= 4",
        "lerch_shift": "Phi(z,s,a) = z^n Phi(z,s,a+n) + sum_{k<n} z^k/(k+a)^s",
        "lerch_derivative": "d/da Phi(z,s,a) = -s Phi(z,s+1,a)",
        "polygamma_zeta": "zeta(j+1) = (-1)^{j+1} Psi^(j)(1)/j!",
        "zeta_generating_function": "sum zeta(2j) x^{2j} = -(pi x/2) cot(pi x)",
    }
    return [record(k, labels[k], v, 1e-8) for k, v in res.items()]


def C_table(setup: Setup):
    lat = setup.lattice
    names = lat.labels or tuple(str(i) for i in range(lat.rank))
    return [{"lambda": names[i], "mu": names[j], "C": C_constant(setup.jd, lat, lat.basis(i), lat.basis(j))}
            for i in range(lat.rank) for j in range(lat.rank)]


def constants_suite(setup: Setup):
    """B against the mode-sum oracle, C against B, and C against reference values."""
    lat, jd = setup.lattice, setup.jd
    worst = worst_c = 0.0
    for i in range(lat.rank):
        for j in range(lat.rank):
            lam, mu = lat.basis(i), lat.basis(j)
            b = B_constant(jd, lam, mu)
            worst = max(worst, abs(b - B_oracle(jd, lam, mu)) / abs(b))
            sign = (-1) ** int(lat.pair(lam, mu) + lat.norm(lam) * lat.norm(mu))
            worst_c = max(worst_c, abs(C_constant(jd, lat, lam, mu) - sign * B_constant(jd, mu, lam) / b))
    out = [record("B_oracle", "closed-form B equals the limit of mode sums", worst, 1e-6),
           record("C_from_B", "C_{lam,mu} = (-1)^{(lam|mu)+|lam|^2|mu|^2} B_{mu,lam}/B_{lam,mu}", worst_c, 1e-10)]
    ref = (setup.document.get("reference") or {}).get("C")
    if ref:
        worst = 0.0
        for a, b, (re, im) in ref:
            got = C_constant(jd, lat, lat.vector(a), lat.vector(b))
            worst = max(worst, abs(got - complex(re, im)))
        out.append(record("C_reference", "C on basis pairs equals the reference table", worst, 1e-10))
    return out


def group_suite(setup: Setup, seed=0):
    res = group_battery(setup.ctx, seed=seed)
    tol = {"associativity": 1e-10, "inverse_and_identity": 1e-10, "coboundary_closure": 1e-9,
           "coboundary_central": 1e-9, "quotient_soundness": 1e-9, "tau_commutators_scalar": 1e-10}
    text = {
        "associativity": "(xy)z = x(yz)",
        "inverse_and_identity": "x x^{-1} = x^{-1} x = 1",
        "coboundary_closure": "g_lam g_mu = g_{lam+mu}",
        "coboundary_central": "g_lam is central",
        "quotient_soundness": "reduce(x g_lam) = reduce(x)",
        "tau_commutators_scalar": "tau commutators are scalars",
    }
    return [record(k, text[k], v, tol[k]) for k, v in res.items()]


def _unit(n, i, dtype=np.int64):
    e = np.zeros(n, dtype=dtype)
    e[i] = 1
    return e


def fock_suite(setup: Setup, seed=0, samples=30, cutoff=None):
    fm = setup.module(cutoff=cutoff)
    n = setup.lattice.rank
    states = _sample_states(fm, samples, seed=seed)
    modes = [0, 1, -1, 2, -2, 3, -3]
    out = []
    worst = 0.0
    for st in states:
        for i in range(n):
            for j in range(n):
                a, b = _unit(n, i, float), _unit(n, j, float)
                for m in modes:
                    for k in modes:
                        ab = fm.act_mode(a, m, fm.act_mode(b, k, st))
                        ba = fm.act_mode(b, k, fm.act_mode(a, m, st))
                        worst = max(worst, state_diff(lin((1, ab), (-1, ba)), scale(st, fm.bracket_scalar(a, m, b, k))))
    out.append(record("heisenberg", "[a_(m+N), b_(n+N)] = delta_{m,-n} ((m+N) a|b)", worst, 1e-10))
    worst = 0.0
    has_u = fm.rep.u_factors is not None
    if has_u:
        for st in states[:10]:
            for i in range(n):
                for l in range(n):
                    a, lam = _unit(n, i, float), _unit(n, l)
                    for m in modes[:5]:
                        lhs = lin((1, fm.act_mode(a, m, fm.act_U(lam, st))), (-1, fm.act_U(lam, fm.act_mode(a, m, st))))
                        c = complex((fm.jd.pi0 @ a) @ fm._gram @ lam) if m == 0 else 0
                        worst = max(worst, state_diff(lhs, scale(fm.act_U(lam, st), c)))
        out.append(record("mode_U_commutator", "[a_(m+N), U_lam] = delta_{m,0} (pi_0 a|lam) U_lam", worst, 1e-10))
        worst = max(check_phi_equivariance(fm, _unit(n, l), states[:10])["max_residual"] for l in range(n))
        out.append(record("phi_equivariance", "U_{phi lam} = eta(lam) e^{2 pi i c_lam} U_lam tau_lam", worst, 1e-9))
    return out


def vertexop_suite(setup: Setup, seed=0, cutoff=3.0, pairs=None, J=20):
    fm = setup.module(cutoff=cutoff)
    n = setup.lattice.rank
    states = _sample_states(fm, 3, seed=seed, max_weight=1)
    bounds = Bounds(cutoff, J)
    gens = [_unit(n, i) for i in range(n)]
    out = []
    worst = max(emodes_check(fm, lam, [1, -1, 2, -2], states[:2], Bounds(cutoff, 12)) for lam in gens)
    out.append(record("exponential_modes", "[a_(m+N), E_lam(z)] = (z^{m+N} pi_alpha a|lam) E_lam(z)", worst, 1e-10))
    worst = 0.0
    for i in range(n):
        for j in range(n):
            for k in (0, 1):
                f = nth_product(CurrentField(fm, gens[i]), CurrentField(fm, gens[j]), k)
                expected = setup.lattice.gram[i, j] if k == 1 else 0
                worst = max(worst, abs(f.scalar(0.3 + 0.2j) - expected))
    out.append(record("current_products", "a(z)_(n) b(z) = delta_{n,1} (a|b)", worst, 1e-10))
    if fm.rep.u_factors is None:
        return out
    worst = max(hvobrext_check(fm, lam, [0, 1, -1], states[:2], Bounds(cutoff, 12)) for lam in gens)
    out.append(record("vertex_mode_commutator", "[a_(m+N), Y(e^lam,z)] = (z^{m+N} pi_alpha a|lam) Y(e^lam,z)",
                      worst, 1e-9))
    worst = max(dz_check(fm, lam, states[:2], Bounds(cutoff, 16)) for lam in gens)
    out.append(record("translation", "D_z Y(e^lam) = :Y(lam,z) Y(e^lam,z): + z^{-1} b_lam Y(e^lam)", worst, 1e-9))
    pair_list = pairs or [(i, j) for i in range(n) for j in range(n) if i != j]
    worst = max(product_limit_check(fm, gens[i], gens[j], states, bounds)["max_residual"] for i, j in pair_list)
    out.append(record("exponential_product", "Y(e^lam)_(-1-(lam|mu)) Y(e^mu) = eps(lam,mu) Y(e^{lam+mu})",
                      worst, 1e-8))
    worst = max(scalar_locality_check(fm.jd, setup.lattice, gens[i], gens[j])["max_residual"] for i, j in pair_list)
    out.append(record("scalar_locality", "direct and transported expansions of the locality function agree",
                      worst, 1e-6))
    return out


SUITES = ("specfun", "constants", "group", "fock", "vertexop")


def run_suite(name, setup: Setup | None, seed=0, cutoff=None):
    start = time.perf_counter()
    if name == "specfun":
        records = specfun_suite(seed)
    elif name == "constants":
        records = constants_suite(setup)
    elif name == "group":
        records = group_suite(setup, seed)
    elif name == "fock":
        records = fock_suite(setup, seed, cutoff=cutoff)
    elif name == "vertexop":
        records = vertexop_suite(setup, seed, cutoff=cutoff or 3.0)
    else:
        raise ValueError(f"unknown suite {name!r}")
    return {"suite": name, "records": records, "pass": all(r["pass"] for r in records),
            "seconds": time.perf_counter() - start}
