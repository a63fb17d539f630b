"""Input documents: lattice, automorphism, cocycle and module settings."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .decomp import jordan_chevalley
from .errors import BadInput
from .group import GroupContext
from .lattice import Cocycle, Lattice, LatticeAutomorphism, build_epsilon, build_eta, verify_epsilon

EXAMPLES = ("example-6.1", "example-6.2", "hyperbolic-identity")


@dataclass
class Setup:
    document: dict
    ctx: GroupContext

    @property
    def lattice(self):
        return self.ctx.lattice

    @property
    def jd(self):
        return self.ctx.jd

    def module(self, cutoff=None, windows=None):
        from .fock import FockModule, Windows, polarization_spec, preset_spec
        cfg = self.document.get("module") or {}
        preset = cfg.get("preset")
        spec = preset_spec(preset) if preset else polarization_spec(self.jd)
        w = windows or Windows(**cfg.get("windows", {}))
        return FockModule(self.ctx, spec, cutoff if cutoff is not None else cfg.get("cutoff", 3), w)


def _field(doc, name):
    if name not in doc:
        raise BadInput(f"input document lacks the field {name!r}")
    return doc[name]


def setup_from_dict(doc: dict) -> Setup:
    try:
        lattice = Lattice(np.array(_field(doc, "gram")), tuple(doc.get("labels", ())))
        phi = LatticeAutomorphism(np.array(_field(doc, "phi")), lattice)
    except (TypeError, ValueError) as exc:
        raise BadInput(f"malformed lattice data: {exc}") from exc
    if "rank" in doc and doc["rank"] != lattice.rank:
        raise BadInput(f"field 'rank' says {doc['rank']} but gram has rank {lattice.rank}")
    if "epsilon" in doc:
        try:
            eps = Cocycle(np.array(doc["epsilon"]))
        except (TypeError, ValueError) as exc:
            raise BadInput(f"malformed field 'epsilon': {exc}") from exc
        check = verify_epsilon(eps, lattice)
        if not check["passed"]:
            raise BadInput(f"field 'epsilon' is not a valid cocycle table; first failure {check['failures'][0]}")
    else:
        eps = build_epsilon(lattice)
    jd = jordan_chevalley(phi)
    eta = build_eta(lattice, phi, eps, basis_signs=doc.get("eta"))
    return Setup(doc, GroupContext(lattice, phi, jd, eps, eta))


def read_document(source) -> dict:
    """Parse a document from a path or the name of a bundled example."""
    if isinstance(source, str) and source in EXAMPLES:
        text = resources.files("twistlat.data").joinpath(f"{source}.json").read_text()
        name = source
    else:
        path = Path(source)
        if not path.exists():
            raise BadInput(f"input file {path} does not exist")
        text = path.read_text()
        name = str(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInput(f"{name}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def load(source) -> Setup:
    return setup_from_dict(read_document(source))
