"""Random subgroups of groups acting on hyperbolic spaces: walks, certificates and matches."""

__version__ = "0.1.0"

from .exceptions import BudgetExceeded, ConfigError, ModelMismatchError, NotHyperbolicError, UnsupportedModelError
from .models import FreeTree, HalfPlane, SplitExtension, parse_element, parse_model
from .walker import ProbabilityMeasure, sample_path
from .words import CyclicWord, Word, parse_word

__all__ = [
    "BudgetExceeded", "ConfigError", "ModelMismatchError", "NotHyperbolicError", "UnsupportedModelError",
    "FreeTree", "HalfPlane", "SplitExtension", "parse_element", "parse_model",
    "ProbabilityMeasure", "sample_path", "CyclicWord", "Word", "parse_word",
]
