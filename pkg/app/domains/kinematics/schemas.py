"""
File: app/domains/kinematics/schemas.py
Description: 运动学配置、切空间、局部自由度探测与运动轨迹模型

Author: jinmozhe
Created: 2026-03-05
"""

from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from app.core.config import Settings
from app.domains.model.schemas import KaleidocycleState, ObservableSet, ReadonlyArray


class KinematicsSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    tangent_threshold: float = Field(default=1e-8, gt=0)
    probe_eps: float = Field(default=1e-4, gt=0)
    probe_count: int = Field(default=24, ge=1)
    probe_rank_threshold: float = Field(default=0.25, gt=0, lt=1)
    trace_step: float = Field(default=0.02, gt=0)
    trace_max_steps: int = Field(default=2000, ge=1)
    closure_factor: float = Field(default=1.5, gt=0)
    min_step_ratio: float = Field(default=1e-8, gt=0, lt=1)

    @classmethod
    def from_settings(cls, cfg: Settings, **overrides: Any) -> "KinematicsSettings":
        values: dict[str, Any] = {
            "tangent_threshold": cfg.TANGENT_THRESHOLD,
            "probe_eps": cfg.PROBE_STEP_EPS,
            "probe_count": cfg.PROBE_COUNT,
            "probe_rank_threshold": cfg.PROBE_RANK_THRESHOLD,
            "trace_step": cfg.TRACE_STEP,
            "trace_max_steps": cfg.TRACE_MAX_STEPS,
            "closure_factor": cfg.TRACE_CLOSURE_FACTOR,
            "min_step_ratio": cfg.TRACE_MIN_STEP_RATIO,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class TangentBasis(BaseModel):
    """规范 Jacobian 的数值零空间 (列正交) 与完整奇异值谱。"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    basis: ReadonlyArray
    singular_values: ReadonlyArray
    threshold: float

    @property
    def nullity(self) -> int:
        return int(self.basis.shape[1])


class ProbeResult(BaseModel):
    """局部真实自由度的经验估计。"""

    model_config = ConfigDict(frozen=True)

    dof: int
    tangent_nullity: int
    successes: int
    failures: int
    displacement_spectrum: list[float] = Field(default_factory=list)


class MotionTrace(BaseModel):
    """沿旋转运动的有序构型序列。"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    states: list[KaleidocycleState]
    arclength: list[float]
    closed: bool
    observables: list[ObservableSet] = Field(default_factory=list)
    rejected_steps: int = 0
    warnings: list[str] = Field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.states)

    def summary(self) -> dict[str, Any]:
        return {
            "states": self.size,
            "closed": self.closed,
            "length": self.arclength[-1] if self.arclength else 0.0,
            "rejected_steps": self.rejected_steps,
            "warnings": list(self.warnings),
        }


class TraceCommand(BaseModel):
    input: Path
    output: Path
    steps: int | None = Field(default=None, ge=1)
    step: float | None = Field(default=None, gt=0)
    states_dir: Path | None = None
    alpha: float | None = None


class ProbeCommand(BaseModel):
    input: Path
    probes: int | None = Field(default=None, ge=1)
    eps: float | None = Field(default=None, gt=0)
