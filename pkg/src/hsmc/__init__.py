"""Model checking for the interval logics AĀB and AĀE over finite Kripke
structures, under the homogeneity assumption."""
from .core import (
    KripkeStructure,
    Track,
    format_kripke,
    induced_label,
    load_kripke,
    parse_kripke,
    transpose,
    validate,
)
from .formula import fragment_of, mirror, mods, normalize, parse, size, to_text
from .semantics import brute_model_check, holds, track_bound
from .checker import OracleConfig, model_check

__version__ = "0.1.0"

__all__ = [
    "KripkeStructure",
    "OracleConfig",
    "Track",
    "brute_model_check",
    "format_kripke",
    "fragment_of",
    "holds",
    "induced_label",
    "load_kripke",
    "mirror",
    "model_check",
    "mods",
    "normalize",
    "parse",
    "parse_kripke",
    "size",
    "to_text",
    "track_bound",
    "transpose",
    "validate",
]
