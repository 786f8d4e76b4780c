"""Parallel transport on Lie 2-group bundles over Lie groupoids along lazy Haefliger paths."""

from . import bundle2, connection, crossed_module, groupoid, hpath, kernels, matlie, transport, vbassoc
from .bundle2 import Arrow, Point, Principal2Bundle, QuasiConnection, decorate, quasi_decorate
from .connection import decorated_connection
from .crossed_module import CrossedModule
from .errors import HGaugeError
from .groupoid import GroupoidPresentation
from .hpath import LazyPath, SampledPath, make_lazy_path
from .matlie import MatrixGroup
from .transport import lazy_transport, quotient_equal

__version__ = "0.1.0"

__all__ = [
    "Arrow",
    "CrossedModule",
    "GroupoidPresentation",
    "HGaugeError",
    "LazyPath",
    "MatrixGroup",
    "Point",
    "Principal2Bundle",
    "QuasiConnection",
    "SampledPath",
    "bundle2",
    "connection",
    "crossed_module",
    "decorate",
    "decorated_connection",
    "groupoid",
    "hpath",
    "kernels",
    "lazy_transport",
    "make_lazy_path",
    "matlie",
    "quasi_decorate",
    "quotient_equal",
    "transport",
    "vbassoc",
]
