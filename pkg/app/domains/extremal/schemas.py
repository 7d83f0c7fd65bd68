"""
File: app/domains/extremal/schemas.py
Description: 边界搜索配置、结果与可行性剖面模型

Author: jinmozhe
Created: 2026-03-04
"""

from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import Settings
from app.domains.extremal.constants import Side
from app.domains.model.constants import MIN_RING_SIZE
from app.domains.model.schemas import ClosureMode, KaleidocycleState


class ExtremalSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    tol_c: float = Field(default=1e-6, gt=0)
    witness_tol: float = Field(default=1e-11, gt=0)
    scan_points: int = Field(default=19, ge=1)
    march_step: float = Field(default=0.05, gt=0, lt=1)
    trivial_limit: float = Field(default=0.999, gt=0, lt=1)
    fallback_restarts: int = Field(default=4, ge=1)
    refine: bool = True

    @property
    def bisection_tol(self) -> float:
        """二分终止宽度: 见证构型需足够贴近边界。"""
        return min(self.tol_c, self.witness_tol)

    @classmethod
    def from_settings(cls, cfg: Settings, **overrides: Any) -> "ExtremalSettings":
        values: dict[str, Any] = {
            "tol_c": cfg.EXTREMAL_TOL_C,
            "witness_tol": cfg.EXTREMAL_WITNESS_TOL,
            "scan_points": cfg.EXTREMAL_SCAN_POINTS,
            "march_step": cfg.EXTREMAL_MARCH_STEP,
            "trivial_limit": cfg.EXTREMAL_TRIVIAL_LIMIT,
            "fallback_restarts": cfg.EXTREMAL_FALLBACK_RESTARTS,
            "refine": cfg.EXTREMAL_REFINE,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class ExtremalDiagnostics(BaseModel):
    """搜索过程诊断信息。"""

    anchor_c: float
    march_steps: int = 0
    bisection_steps: int = 0
    feasibility_tests: int = 0
    witness_residual: float = 0.0
    refine_status: str = Field(
        default="skipped", description="skipped / accepted / rejected:<原因>"
    )


class ExtremalResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    mode: ClosureMode
    side: Side
    c_n: float
    witness: KaleidocycleState
    bracket: tuple[float, float]
    diagnostics: ExtremalDiagnostics

    @model_validator(mode="after")
    def _check_bracket(self) -> "ExtremalResult":
        lo, hi = sorted(self.bracket)
        if not lo <= self.c_n <= hi:
            raise ValueError(f"c_n={self.c_n} 不在括号 [{lo}, {hi}] 内")
        return self

    @property
    def bracket_width(self) -> float:
        return abs(self.bracket[1] - self.bracket[0])

    def summary(self) -> dict[str, Any]:
        return self.model_dump(mode="json", exclude={"witness"})


class FeasibilityPoint(BaseModel):
    c: float
    feasible: bool
    residual_norm: float
    strategy: str | None = None


class FeasibilityProfile(BaseModel):
    n: int
    mode: ClosureMode
    points: list[FeasibilityPoint]

    @property
    def feasible_values(self) -> list[float]:
        return [p.c for p in self.points if p.feasible]

    @property
    def infeasible_values(self) -> list[float]:
        return [p.c for p in self.points if not p.feasible]


class ExtremeCommand(BaseModel):
    n: int = Field(..., ge=MIN_RING_SIZE)
    mode: ClosureMode
    side: Side = Side.UPPER
    tol: float | None = Field(default=None, gt=0)
    digits: int = Field(default=4, ge=1, le=16, description="输出 c_n 的小数位数")
    output: Path | None = None


class ScanCommand(BaseModel):
    n: int = Field(..., ge=MIN_RING_SIZE)
    mode: ClosureMode
    c_from: float = Field(..., gt=-1.0, lt=1.0)
    c_to: float = Field(..., gt=-1.0, lt=1.0)
    points: int = Field(..., ge=1, description="网格点数")
    output: Path | None = None

    @model_validator(mode="after")
    def _ordered(self) -> "ScanCommand":
        if self.c_from > self.c_to:
            raise ValueError("--from 不能大于 --to")
        if self.points == 1 and self.c_from != self.c_to:
            raise ValueError("单点网格要求 --from 等于 --to")
        return self

    def grid(self) -> list[float]:
        return np.linspace(self.c_from, self.c_to, self.points).tolist()
