"""
Reading and writing problem files.

A problem file is JSON with a `kind`, a `matrices` table and the scalar
extras its kind needs. Large matrices may live in Matrix Market sidecar
files referenced by a path relative to the problem file.
"""
import json
import logging
from numbers import Number
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import scipy.io
from pydantic import ValidationError

from ..errors import DimensionMismatch, InvalidMatrix, ProblemFileError
from ..models.problem import MATRIX_FIELDS, SCALAR_FIELDS, LoadedProblem, ProblemFile, ProblemKind
from ..models.states import DareState, NmeState, PencilState, SteinState
from ..services.matrixkit import DenseMatrix, as_matrix
from ..tasks import instances

# Configure logging
logger = logging.getLogger(__name__)


def _parse_entry(value: Any, where: str) -> complex:
    if isinstance(value, bool):
        raise ProblemFileError(where, "booleans are not matrix entries")
    if isinstance(value, Number):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(part, Number) and not isinstance(part, bool) for part in value
    ):
        return complex(value[0], value[1])
    raise ProblemFileError(where, f"expected a number or an [re, im] pair, got {value!r}")


def parse_scalar(value: Any, field: str) -> complex:
    """A number or an [re, im] pair."""
    return _parse_entry(value, field)


def parse_matrix(value: Any, field: str, base_dir: Optional[Path] = None) -> DenseMatrix:
    """
    Turn a problem-file matrix entry into a DenseMatrix.

    Args:
        value: Number, list of rows, or Matrix Market path
        field: Name used in error messages (e.g. "matrices.A")
        base_dir: Directory that relative paths are resolved against

    Returns:
        The matrix as a finite 2-D complex array
    """
    if isinstance(value, str):
        path = Path(value)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        try:
            data = scipy.io.mmread(str(path))
        except (OSError, ValueError) as e:
            raise ProblemFileError(field, f"cannot read Matrix Market file {path}: {e}") from e
        if hasattr(data, "toarray"):
            data = data.toarray()
        raw = np.asarray(data)
    elif isinstance(value, Number) and not isinstance(value, bool):
        raw = np.array([[complex(value)]])
    elif isinstance(value, list) and value and all(isinstance(row, list) for row in value):
        rows = [[_parse_entry(entry, f"{field}[{i}][{j}]") for j, entry in enumerate(row)] for i, row in enumerate(value)]
        if len({len(row) for row in rows}) != 1:
            raise ProblemFileError(field, "rows have different lengths")
        raw = np.array(rows, dtype=np.complex128)
    else:
        raise ProblemFileError(field, "expected a number, a list of rows or a Matrix Market path")

    try:
        return as_matrix(raw)
    except InvalidMatrix as e:
        raise ProblemFileError(field, str(e)) from e


def _check_conforming(kind: ProblemKind, matrices: Dict[str, DenseMatrix], m: Optional[int]) -> None:
    try:
        if kind == ProblemKind.STEIN:
            SteinState(matrices["A"], matrices["B"], matrices["C"])
        elif kind == ProblemKind.PENCIL:
            state = PencilState(matrices["A"], matrices["B"])
            n = state.A.shape[0]
            if m is None:
                raise ProblemFileError("m", "pencil problems need the stable subspace dimension m")
            if m > n:
                raise ProblemFileError("m", f"m = {m} exceeds the pencil size {n}")
        elif kind == ProblemKind.NME:
            Q = matrices["Q"]
            NmeState(matrices["A"], matrices["B"], np.zeros_like(Q), Q)
        elif kind == ProblemKind.DARE:
            DareState(matrices["A"], matrices["G"], matrices["H"])
    except DimensionMismatch as e:
        raise ProblemFileError("matrices", str(e)) from e


def validate_problem(problem_file: ProblemFile, base_dir: Optional[Path] = None) -> LoadedProblem:
    """Resolve matrices and scalars of a parsed ProblemFile and check them against its kind."""
    matrices = {}
    for name in MATRIX_FIELDS[problem_file.kind]:
        if name not in problem_file.matrices:
            raise ProblemFileError(f"matrices.{name}", f"required for kind {problem_file.kind.value}")
        matrices[name] = parse_matrix(problem_file.matrices[name], f"matrices.{name}", base_dir)

    unexpected = set(problem_file.matrices) - set(MATRIX_FIELDS[problem_file.kind])
    if unexpected:
        logger.warning(f"Ignoring matrices {sorted(unexpected)} not used by kind {problem_file.kind.value}")

    scalars = {}
    for name in SCALAR_FIELDS.get(problem_file.kind, ()):
        value = getattr(problem_file, name)
        if value is None:
            raise ProblemFileError(name, f"required for kind {problem_file.kind.value}")
        scalars[name] = parse_scalar(value, name)

    _check_conforming(problem_file.kind, matrices, problem_file.m)
    return LoadedProblem(kind=problem_file.kind, matrices=matrices, scalars=scalars, m=problem_file.m)


def load_problem(path: Path) -> LoadedProblem:
    """
    Load and validate a problem file.

    Raises:
        ProblemFileError: naming the offending field when the file is malformed
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as e:
        raise ProblemFileError(str(path), f"cannot read problem file: {e}") from e
    except json.JSONDecodeError as e:
        raise ProblemFileError(str(path), f"invalid JSON at line {e.lineno}: {e.msg}") from e

    try:
        problem_file = ProblemFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ProblemFileError(field, first["msg"]) from e

    problem = validate_problem(problem_file, path.parent)
    problem.source = path
    logger.info(f"Loaded {problem.kind.value} problem from {path}")
    return problem


def encode_entry(value: complex) -> Any:
    value = complex(value)
    return [value.real, value.imag]


def encode_matrix(m: DenseMatrix, pairs: bool = False) -> List[List[Any]]:
    """Rows of numbers for real matrices, rows of [re, im] pairs otherwise (or when pairs is set)."""
    m = np.asarray(m, dtype=np.complex128)
    if not pairs and not np.any(m.imag):
        return m.real.tolist()
    return [[encode_entry(entry) for entry in row] for row in m]


def write_problem(path: Path, kind: ProblemKind, matrices: Optional[Dict[str, Any]] = None, **extras: Any) -> Path:
    """Write a problem file; DenseMatrix values are encoded inline, strings are kept as sidecar paths."""
    body: Dict[str, Any] = {"kind": kind.value, "matrices": {}}
    for name, value in (matrices or {}).items():
        body["matrices"][name] = value if isinstance(value, str) else encode_matrix(as_matrix(value))
    for name, value in extras.items():
        if value is None:
            continue
        body[name] = encode_entry(value) if isinstance(value, complex) else value

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(body, f, indent=2)
    return path


def write_example_problems(directory: Path, seed: int = 7) -> List[Path]:
    """Write one sample problem per kind (plus a diverging Stein problem) into directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    written = []

    stein = instances.stein_benchmark(rng, n=8, rho_product=0.8)
    written.append(write_problem(
        directory / "stein.json", ProblemKind.STEIN, {"A": stein.A, "B": stein.B, "C": stein.C},
        description="8x8 Stein equation with rho(A)rho(B) = 0.8",
    ))
    written.append(write_problem(
        directory / "stein_diverging.json", ProblemKind.STEIN, {"A": [[1.1]], "B": [[1.0]], "C": [[1.0]]},
        description="rho(A)rho(B) = 1.1; rejected unless forced",
    ))

    pencil = instances.conjugated_pencil(rng, [0.3, 0.6, 1.5, 2.0])
    written.append(write_problem(
        directory / "pencil.json", ProblemKind.PENCIL, {"A": pencil.state.A, "B": pencil.state.B}, m=pencil.m,
    ))

    written.append(write_problem(
        directory / "nme_scalar.json", ProblemKind.NME, {"Q": 3.0, "A": 1.0, "B": 1.0},
        description="X = 3 - 1/X; solution (3 + sqrt 5)/2",
    ))
    written.append(write_problem(
        directory / "dare_scalar.json", ProblemKind.DARE, {"A": 1.0, "G": 1.0, "H": 1.0},
        description="X = 1 + X/(1 + X); solution (1 + sqrt 5)/2",
    ))

    dare = instances.random_dare_state(rng, 10)
    sidecars = {}
    for name, value in dare.components().items():
        sidecar = directory / f"dare_{name}.mtx"
        scipy.io.mmwrite(str(sidecar), np.real_if_close(value))
        sidecars[name] = sidecar.name
    written.append(write_problem(directory / "dare_random.json", ProblemKind.DARE, sidecars))

    written.append(write_problem(directory / "scalar_linear.json", ProblemKind.SCALAR_LINEAR, a=0.5, b=1.0, x1=0.0))
    written.append(write_problem(directory / "scalar_rational.json", ProblemKind.SCALAR_RATIONAL, a=2.0, b=3.0))
    written.append(write_problem(directory / "scalar_pair.json", ProblemKind.SCALAR_PAIR, x1=1.0, y1=2.0))

    for path in written:
        logger.info(f"Wrote example problem {path}")
    return written
