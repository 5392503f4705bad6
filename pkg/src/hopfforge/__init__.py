"""hopfforge: exact kernel and verifier for graded Hopf superalgebras over
truncated formal power series, built around the quantized proper-time/BRST
dual pair, their Drinfeld superdouble and its universal element, and the
parameterized families connecting their classical limits."""

from .pbw import Cutoffs, Engine, PbwElement
from .presentation import (HopfPresentation, emit_presentation,
                           load_presentation, parse_presentation)
from .scalars import ParamPoly, Scalar, series_fn
from .tensors import TensorElement

__version__ = "0.1.0"

__all__ = [
    "Cutoffs", "Engine", "PbwElement", "HopfPresentation", "emit_presentation",
    "load_presentation", "parse_presentation", "ParamPoly", "Scalar",
    "series_fn", "TensorElement", "__version__",
]
