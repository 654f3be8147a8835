"""Poset stratifications, STL robustness and volume-growth stratum detection."""

from .errors import StratError
from .poset import GridComplex, MonotoneMap, OrderComplex, Poset, face_poset, is_monotone, order_complex
from .stl import parse, robustness, robustness_signal
from .trace import Trace

__version__ = "0.1.0"

__all__ = [
    "GridComplex",
    "MonotoneMap",
    "OrderComplex",
    "Poset",
    "StratError",
    "Trace",
    "face_poset",
    "is_monotone",
    "order_complex",
    "parse",
    "robustness",
    "robustness_signal",
]
