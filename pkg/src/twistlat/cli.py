"""Command line entry point: ``twistlat <command> --input DOC [options]``.

Every command prints (or writes with ``--out``) a JSON report whose ``pass``
field is the conjunction of its checks; the exit status is 0 exactly when
it is true. Complex numbers are written as ``[re, im]``.
"""
from __future__ import annotations

import argparse
import json
import platform
import sys
import time

import mpmath
import numpy as np

from . import __version__
from .decomp import decomposition_residuals
from .document import load
from .errors import BadInput, TwistlatError
from .lattice import verify_epsilon, verify_eta
from .structure import B_constant, B_oracle, C_constant, twist_constants
from .suites import C_table, SUITES, group_suite, record, run_suite
from .vertexop import field_table

COMMANDS = ("decompose", "cocycle", "constants", "group-check", "fock-build", "vertexop", "verify",
            "specfun-selftest")


def to_json(obj):
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real) + 0.0, float(obj.imag) + 0.0]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) + 0.0
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _matrix(m):
    m = np.asarray(m)
    if np.iscomplexobj(m) and np.max(np.abs(m.imag), initial=0) < 1e-13:
        m = m.real
    return m


def _with_tol(records, tol):
    if tol is None:
        return records
    return [{**r, "tolerance": tol, "pass": r["max_residual"] <= tol} for r in records]


def cmd_decompose(setup, args):
    jd = setup.jd
    res = decomposition_residuals(jd)
    tol = args.tol or 1e-10
    return {
        "sigma": _matrix(jd.sigma),
        "N": _matrix(jd.nilp),
        "nilpotency_index": jd.nilpotency_index,
        "blocks": [{"eigenvalue": b.eigenvalue, "alpha0": b.alpha0, "alpha0_prime": b.alpha0_prime,
                    "dim": b.dim, "sign_class": b.sign_class} for b in jd.blocks],
        "records": [record(k, f"decomposition residual: {k}", v, tol) for k, v in res.items()],
    }


def cmd_cocycle(setup, args):
    lat, ctx = setup.lattice, setup.ctx
    eps = verify_epsilon(ctx.eps, lat, seed=args.seed)
    eta = verify_eta(ctx.eta, ctx.eps, ctx.phi, lat, seed=args.seed + 1)
    basis = [lat.basis(i) for i in range(lat.rank)]
    return {
        "epsilon": [[ctx.eps(a, b) for b in basis] for a in basis],
        "eta": [ctx.eta(a) for a in basis],
        "records": [
            record("epsilon", "eps(l,l) = (-1)^{|l|^2(|l|^2+1)/2} and eps(l,m) eps(m,l) = (-1)^{(l|m)+|l|^2|m|^2}",
                   0.0 if eps["passed"] else 1.0, 0.0),
            record("eta", "eta(l) eta(m) eps(l,m) = eta(l+m) eps(phi l, phi m)", 0.0 if eta["passed"] else 1.0, 0.0),
        ],
        "failures": {"epsilon": eps["failures"], "eta": eta["failures"]},
    }


def _single(setup, lam):
    t = twist_constants(setup.jd, lam)
    return {"lambda": lam, "b": t.b, "a": list(t.a_poly.coef), "c": t.c, "tau_argument": t.tau_arg}


def cmd_constants(setup, args):
    lat, jd = setup.lattice, setup.jd
    if args.lam is None and args.mu is None:
        out = run_suite("constants", setup)
        return {"C_table": C_table(setup), "records": _with_tol(out["records"], args.tol)}
    if args.lam is None:
        raise BadInput("--mu needs --lambda")
    lam = lat.vector(args.lam)
    out = _single(setup, lam)
    out["records"] = []
    if args.mu is not None:
        mu = lat.vector(args.mu)
        B = B_constant(jd, lam, mu)
        oracle = B_oracle(jd, lam, mu)
        out.update(mu=mu, B=B, C=C_constant(jd, lat, lam, mu), B_oracle=oracle)
        out["records"] = [record("B_oracle", "closed-form B equals the limit of mode sums",
                                 abs(B - oracle) / abs(B), args.tol or 1e-6)]
    return out


def cmd_group_check(setup, args):
    return {"records": _with_tol(group_suite(setup, args.seed), args.tol)}


def cmd_fock_build(setup, args):
    fm = setup.module(cutoff=args.cutoff)
    hist = fm.weight_histogram()
    return {"module": fm.spec.name, "cutoff": fm.cutoff, "basis_size": sum(hist.values()),
            "weight_histogram": [[w, n] for w, n in hist.items()], "records": []}


def cmd_vertexop(setup, args):
    if args.lam is None:
        raise BadInput("vertexop needs --lambda")
    fm = setup.module(cutoff=args.cutoff)
    lam = setup.lattice.vector(args.lam)
    order = args.order if args.order is not None else 1.0
    rows = field_table(fm, lam, order)
    return {"lambda": lam, "order": order,
            "table": [{"m": m, "j": j, "norm": norm} for m, j, norm in rows], "records": []}


def cmd_verify(setup, args):
    names = SUITES if args.suite == "all" else (args.suite,)
    suites = []
    for name in names:
        out = run_suite(name, setup, seed=args.seed, cutoff=args.cutoff)
        out["records"] = _with_tol(out["records"], args.tol)
        out["pass"] = all(r["pass"] for r in out["records"])
        suites.append(out)
    report = {"suites": suites, "records": [r for s in suites for r in s["records"]]}
    if "constants" in names:
        report["C_table"] = C_table(setup)
    return report


def cmd_specfun_selftest(setup, args):
    return {"records": _with_tol(run_suite("specfun", None, seed=args.seed)["records"], args.tol)}


HANDLERS = {
    "decompose": cmd_decompose, "cocycle": cmd_cocycle, "constants": cmd_constants,
    "group-check": cmd_group_check, "fock-build": cmd_fock_build, "vertexop": cmd_vertexop,
    "verify": cmd_verify, "specfun-selftest": cmd_specfun_selftest,
}


def parser():
    p = argparse.ArgumentParser(prog="twistlat", description="Twisted logarithmic lattice modules.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--input", help="input JSON document, or the name of a bundled example")
    p.add_argument("--suite", default="all", choices=SUITES + ("all",))
    p.add_argument("--lambda", dest="lam", help="lattice vector: labels like 'alpha1+2*delta' or coordinates '1,0,2'")
    p.add_argument("--mu", help="second lattice vector")
    p.add_argument("--order", type=float, help="weight bound for the vertexop table")
    p.add_argument("--cutoff", type=float, help="Fock weight cutoff (default from the document)")
    p.add_argument("--tol", type=float, help="override every check tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the report here instead of stdout")
    return p


def run(args):
    if args.tol is not None and args.tol <= 0:
        raise BadInput("--tol must be positive")
    needs_input = not (args.command == "specfun-selftest"
                       or (args.command == "verify" and args.suite == "specfun"))
    if needs_input and not args.input:
        raise BadInput(f"{args.command} needs --input")
    setup = load(args.input) if args.input else None
    start = time.perf_counter()
    body = HANDLERS[args.command](setup, args)
    records = body.get("records", [])
    return {
        "command": args.command,
        "input": args.input,
        "config": {"suite": args.suite if args.command == "verify" else None, "lambda": args.lam, "mu": args.mu,
                   "cutoff": args.cutoff, "tol": args.tol, "seed": args.seed},
        **body,
        "pass": all(r["pass"] for r in records),
        "environment": {"twistlat": __version__, "python": platform.python_version(), "numpy": np.__version__,
                        "mpmath": mpmath.__version__},
        "timing": {"seconds": time.perf_counter() - start},
    }


def main(argv=None):
    p = parser()
    args = p.parse_args(argv)
    if args.command is None:
        p.print_usage(sys.stderr)
        return 2
    try:
        report = run(args)
    except BadInput as exc:
        print(f"twistlat: bad input: {exc}", file=sys.stderr)
        return 2
    except TwistlatError as exc:
        print(f"twistlat: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(to_json(report), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
