"""Run configuration shared by the CLI commands."""

import os
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from .bounds import OPTIMIZER_TOL
from .center import SLICE_TIE_TOL
from .conesolver import BISECTION_TOL
from .errors import InputError
from .utils import get_logger

logger = get_logger(__name__)


class Tolerances(BaseModel):
    """Numerical tolerances with their documented defaults."""
    equality: float = Field(default=1e-7, gt=0, description="|slack| below this (times max(1, bound)) is equality")
    violation: float = Field(default=1e-7, gt=0, description="slack below minus this is a violation")
    slice_tie: float = Field(default=SLICE_TIE_TOL, gt=0, description="relative gap defining the maximizing face")
    cone: float = Field(default=BISECTION_TOL, gt=0, description="bisection width on the cone slope")
    optimizer: float = Field(default=OPTIMIZER_TOL, gt=0, description="golden-section width on the slope")


def threads_from_env(default: Optional[int] = None) -> int:
    """Thread count from HHC_THREADS, else the CPU count; at least 1."""
    raw = os.getenv("HHC_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning(f"Ignoring non-integer HHC_THREADS={raw!r}")
    return max(1, default if default is not None else (os.cpu_count() or 1))


def parse_seed_range(text: str) -> List[int]:
    """Seeds from 'A..B' (inclusive), 'A,B,C' or a single integer."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
            return list(range(lo, hi + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InputError(f"Invalid seed range {text!r}") from e


def parse_point(text: str) -> Tuple[float, ...]:
    """Point from 'x,y[,z]'."""
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as e:
        raise InputError(f"Invalid point {text!r}") from e


class RunConfig(BaseModel):
    """Everything one CLI invocation depends on."""
    command: Literal["center", "bound", "verify", "section-bound", "repro"]
    body_file: Optional[Path] = None
    function_file: Optional[Path] = None
    gauge: Literal["power", "exp", "exp-square", "pwl"] = "power"
    alpha: Optional[float] = None
    gauge_file: Optional[Path] = None
    seeds: List[int] = Field(default_factory=list)
    dim: int = 2
    output_format: Literal["json", "table", "csv"] = "json"
    per_volume: bool = False
    method: Literal["generic", "closed-form-2d", "closed-form-3d", "conjecture"] = "generic"
    start_point: Optional[Tuple[float, ...]] = None
    knot_count: int = Field(default=1025, ge=33)
    plane: Literal["xy", "xz", "yz"] = "xy"
    trace_file: Optional[Path] = None
    threads: int = Field(default_factory=threads_from_env, ge=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        if self.alpha is not None and self.gauge != "power":
            raise ValueError("--alpha applies to the power gauge only")
        if self.alpha is not None and self.alpha < 1.0:
            raise ValueError(f"--alpha must be at least 1, got {self.alpha}")
        if self.gauge_file is not None and self.gauge != "pwl":
            raise ValueError("--gauge-file applies to the pwl gauge only")
        if self.gauge == "pwl" and self.gauge_file is None and self.command in ("bound", "verify"):
            raise ValueError("--phi pwl needs --gauge-file")
        if self.command == "verify":
            if not self.seeds:
                raise ValueError("seed range is empty")
            if min(self.seeds) < 0:
                raise ValueError("seeds must be nonnegative")
            if self.dim not in (2, 3):
                raise ValueError(f"--dim must be 2 or 3, got {self.dim}")
        return self
