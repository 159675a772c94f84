"""Characterize and quantify how adaptable and adaptive an interactive system is.

The pieces, bottom up: a taxonomy defines the grid shape (factors x aspects,
down to elements); an evaluation is one evaluator's checked grid for one
system in one mode; scoring turns it into local, semi-global and global
adaptation degrees; analysis compares reports and merges evaluators. A CLI
and an HTTP API bind them into workflows.
"""

from .analysis import ComparisonReport, MergedEvaluation, compare, merge
from .errors import (
    AnameterError,
    IncompatibleError,
    NoScoreError,
    NotApplicableError,
    ParseError,
    TaxonomyMismatchError,
    UnknownIdError,
    ValidationError,
    Violation,
)
from .gridmodel import (
    CellMark,
    Evaluation,
    MicroGridState,
    Mode,
    NaChange,
    load_evaluation,
    new_evaluation,
    save_evaluation,
    set_mark,
    set_na,
    validate_evaluation,
)
from .scoring import (
    LocalDegree,
    MicroDegree,
    ScoreReport,
    aspect_degree,
    factor_degree,
    global_degree,
    local_degree,
    micro_degree,
    score,
)
from .taxonomy import (
    Aspect,
    Element,
    Factor,
    SubAspect,
    SubFactor,
    Taxonomy,
    default_taxonomy,
    load_taxonomy,
    save_taxonomy,
    validate_taxonomy,
)

__version__ = "0.1.0"

__all__ = [
    "AnameterError",
    "Aspect",
    "CellMark",
    "ComparisonReport",
    "Element",
    "Evaluation",
    "Factor",
    "IncompatibleError",
    "LocalDegree",
    "MergedEvaluation",
    "MicroDegree",
    "MicroGridState",
    "Mode",
    "NaChange",
    "NoScoreError",
    "NotApplicableError",
    "ParseError",
    "ScoreReport",
    "SubAspect",
    "SubFactor",
    "Taxonomy",
    "TaxonomyMismatchError",
    "UnknownIdError",
    "ValidationError",
    "Violation",
    "compare",
    "default_taxonomy",
    "global_degree",
    "aspect_degree",
    "factor_degree",
    "load_evaluation",
    "load_taxonomy",
    "local_degree",
    "merge",
    "micro_degree",
    "new_evaluation",
    "save_evaluation",
    "save_taxonomy",
    "score",
    "set_mark",
    "set_na",
    "validate_evaluation",
    "validate_taxonomy",
]
