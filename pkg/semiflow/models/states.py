"""
Iteration states for the bundled semigroup operators.
A state is an immutable bundle of DenseMatrix components; generic engine code
walks the components through `MatrixState.components()`.
"""
from dataclasses import dataclass, fields
from typing import Dict

from ..errors import DimensionMismatch
from ..services.matrixkit import DenseMatrix, promote, relative_difference


class MatrixState:
    """Mixin for frozen dataclass states whose fields are all matrices."""

    def components(self) -> Dict[str, DenseMatrix]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def _coerce(self) -> None:
        for f in fields(self):
            object.__setattr__(self, f.name, promote(getattr(self, f.name)))

    def _require_square(self, *names: str) -> int:
        sizes = set()
        for name in names:
            shape = getattr(self, name).shape
            if shape[0] != shape[1]:
                raise DimensionMismatch(f"{type(self).__name__}.{name} must be square, got {shape}")
            sizes.add(shape[0])
        if len(sizes) != 1:
            raise DimensionMismatch(f"{type(self).__name__} components {names} differ in size: {sorted(sizes)}")
        return sizes.pop()


def state_distance(reference: MatrixState, other: MatrixState) -> float:
    """Componentwise-maximal relative Frobenius difference between two states."""
    if type(reference) is not type(other):
        raise DimensionMismatch(f"cannot compare {type(reference).__name__} with {type(other).__name__}")

    mine, theirs = reference.components(), other.components()
    return max(relative_difference(mine[name], theirs[name]) for name in mine)


def require_conforming(xa: MatrixState, xb: MatrixState) -> None:
    """Both states must carry components of identical shapes."""
    for name, value in xa.components().items():
        if value.shape != getattr(xb, name).shape:
            raise DimensionMismatch(
                f"{type(xa).__name__}.{name}: {value.shape} does not conform with {getattr(xb, name).shape}"
            )


@dataclass(frozen=True, eq=False)
class SteinState(MatrixState):
    """(A, B, C) of X = AXB + C; A is m×m, B is n×n, C is m×n."""
    A: DenseMatrix
    B: DenseMatrix
    C: DenseMatrix

    def __post_init__(self):
        self._coerce()
        m, n = self.C.shape
        if self.A.shape != (m, m) or self.B.shape != (n, n):
            raise DimensionMismatch(
                f"SteinState needs A {m}x{m} and B {n}x{n} for C {m}x{n}, "
                f"got A {self.A.shape} and B {self.B.shape}"
            )


@dataclass(frozen=True, eq=False)
class PencilState(MatrixState):
    """(A, B) of the pencil A − λB."""
    A: DenseMatrix
    B: DenseMatrix

    def __post_init__(self):
        self._coerce()
        self._require_square("A", "B")


@dataclass(frozen=True, eq=False)
class NmeState(MatrixState):
    """(A, B, P, Q) of the composite map Q − A(X − P)⁻¹B."""
    A: DenseMatrix
    B: DenseMatrix
    P: DenseMatrix
    Q: DenseMatrix

    def __post_init__(self):
        self._coerce()
        self._require_square("A", "B", "P", "Q")


@dataclass(frozen=True, eq=False)
class DareState(MatrixState):
    """(A, G, H) of the composite Riccati map H + AᴴX(I + GX)⁻¹A."""
    A: DenseMatrix
    G: DenseMatrix
    H: DenseMatrix

    def __post_init__(self):
        self._coerce()
        self._require_square("A", "G", "H")
