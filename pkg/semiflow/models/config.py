"""
Solver configuration model.
"""
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from .. import settings


class SolverMode(str, Enum):
    PLAIN = "plain"
    ACCELERATED = "accelerated"


class SolverConfig(BaseModel):
    """Order, tolerance, iteration cap, mode and RNG seed for one solve."""
    model_config = ConfigDict(frozen=True)

    order: int = Field(default=2, ge=2)
    tol: float = Field(default=1e-12, gt=0)
    max_outer: int = Field(default=500, ge=1)
    mode: SolverMode = SolverMode.ACCELERATED
    seed: int = Field(default=0, ge=0)

    @classmethod
    def from_env(cls, **overrides: Any) -> "SolverConfig":
        """Build a config from SEMIFLOW_* defaults, letting explicit values win."""
        values = {"tol": settings.DEFAULT_TOL, "max_outer": settings.DEFAULT_MAX_ITER, "seed": settings.DEFAULT_SEED}
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    @property
    def accelerated(self) -> bool:
        return self.mode == SolverMode.ACCELERATED
