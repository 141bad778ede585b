"""
Convergence reports and the per-step run records written by the CLI.
"""
from enum import Enum
from typing import List, NamedTuple, Optional

from pydantic import BaseModel, model_validator


class Status(str, Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    BREAKDOWN = "breakdown"


class ConvergenceReport(BaseModel):
    """Residual history of one solve, with the estimated order and rate."""
    residuals: List[float]
    iterate_indices: List[int]
    elapsed_us: List[int]
    status: Status
    order: int = 1  # r of the accelerated driver; 1 for the plain iteration
    applies: int = 0
    estimated_order: Optional[float] = None
    estimated_rate: Optional[float] = None
    message: Optional[str] = None

    @model_validator(mode="after")
    def _check_history(self) -> "ConvergenceReport":
        if not (len(self.residuals) == len(self.iterate_indices) == len(self.elapsed_us)):
            raise ValueError("residuals, iterate_indices and elapsed_us must have equal length")
        if any(b <= a for a, b in zip(self.iterate_indices, self.iterate_indices[1:])):
            raise ValueError("iterate_indices must be strictly increasing")
        return self

    @property
    def outer_steps(self) -> int:
        return max(0, len(self.residuals) - 1)

    @property
    def final_residual(self) -> Optional[float]:
        return self.residuals[-1] if self.residuals else None


class HistoryRow(BaseModel):
    k: int
    index: int
    residual: float
    elapsed_us: int


class RunRecord(BaseModel):
    """CSV-ready view of a ConvergenceReport."""
    rows: List[HistoryRow]
    status: Status
    estimated_order: Optional[float] = None
    estimated_rate: Optional[float] = None
    applies: int = 0

    @classmethod
    def from_report(cls, report: ConvergenceReport) -> "RunRecord":
        rows = [
            HistoryRow(k=k, index=index, residual=residual, elapsed_us=elapsed)
            for k, (index, residual, elapsed) in enumerate(
                zip(report.iterate_indices, report.residuals, report.elapsed_us), start=1
            )
        ]
        return cls(
            rows=rows,
            status=report.status,
            estimated_order=report.estimated_order,
            estimated_rate=report.estimated_rate,
            applies=report.applies,
        )


class LemmaErrors(NamedTuple):
    """Relative errors of the four Δ identities checked on a triple of states."""
    first: float
    second: float
    third: float
    fourth: float

    @property
    def worst(self) -> float:
        return max(self)
