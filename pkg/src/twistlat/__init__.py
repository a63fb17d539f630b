"""Twisted logarithmic modules of lattice vertex algebras."""
import os as _os

if _os.environ.get("TWISTLAT_THREADS"):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _os.environ["TWISTLAT_THREADS"])

from .document import load, setup_from_dict  # noqa: E402
from .errors import TwistlatError  # noqa: E402

__version__ = "0.1.0"
__all__ = ["load", "setup_from_dict", "TwistlatError", "__version__"]
