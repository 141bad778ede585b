"""
Problem file model: the JSON container read by the command-line tools.
"""
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..services.matrixkit import DenseMatrix


class ProblemKind(str, Enum):
    STEIN = "stein"
    PENCIL = "pencil"
    NME = "nme"
    DARE = "dare"
    SCALAR_LINEAR = "scalar-linear"
    SCALAR_RATIONAL = "scalar-rational"
    SCALAR_PAIR = "scalar-pair"


# Matrices each kind needs, in solver argument order
MATRIX_FIELDS: Dict[ProblemKind, Tuple[str, ...]] = {
    ProblemKind.STEIN: ("A", "B", "C"),
    ProblemKind.PENCIL: ("A", "B"),
    ProblemKind.NME: ("Q", "A", "B"),
    ProblemKind.DARE: ("A", "G", "H"),
    ProblemKind.SCALAR_LINEAR: (),
    ProblemKind.SCALAR_RATIONAL: (),
    ProblemKind.SCALAR_PAIR: (),
}

SCALAR_FIELDS: Dict[ProblemKind, Tuple[str, ...]] = {
    ProblemKind.SCALAR_LINEAR: ("a", "b", "x1"),
    ProblemKind.SCALAR_RATIONAL: ("a", "b"),
    ProblemKind.SCALAR_PAIR: ("x1", "y1"),
}


class ProblemFile(BaseModel):
    """
    On-disk problem description.

    Matrix entries are a number (1×1), an inline list of rows whose entries
    are numbers or [re, im] pairs, or a path to a Matrix Market file
    relative to the problem file.
    """
    model_config = ConfigDict(extra="forbid")

    kind: ProblemKind
    matrices: Dict[str, Any] = Field(default_factory=dict)
    m: Optional[int] = Field(default=None, ge=1)
    a: Optional[Any] = None
    b: Optional[Any] = None
    x1: Optional[Any] = None
    y1: Optional[Any] = None
    description: Optional[str] = None


@dataclass
class LoadedProblem:
    """A validated problem with matrices promoted to DenseMatrix and scalars to complex."""
    kind: ProblemKind
    matrices: Dict[str, DenseMatrix] = field(default_factory=dict)
    scalars: Dict[str, complex] = field(default_factory=dict)
    m: Optional[int] = None
    source: Optional[Path] = None
