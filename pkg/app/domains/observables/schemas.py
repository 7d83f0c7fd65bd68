"""
File: app/domains/observables/schemas.py
Description: 观测量参数与诊断结果模型
"""

import math
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator


class EnergyParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(default=1.0, description="Coulomb 指数")
    # None: oriented 构型自动计算，nonoriented 留空
    dipole: bool | None = None

    @field_validator("alpha")
    @classmethod
    def _finite_alpha(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("alpha 必须为有限实数")
        return value


class GaussArea(BaseModel):
    """Gauss 映射面积及其与缠绕数的一致性检查。"""

    model_config = ConfigDict(frozen=True)

    area: float = Field(..., description="左侧面积，取值 [0, 4pi)")
    check: float = Field(..., description="(area - 2 pi Wr) mod 2pi 到 0 的距离")
    arc_lengths: list[float]


class WritheEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    standard_error: float
    num_directions: int


class BendProbeResult(BaseModel):
    """弯曲能局部极小性的探索性诊断。"""

    model_config = ConfigDict(frozen=True)

    e_bend: float
    samples: int
    lower_samples: int
    min_neighbour: float | None = None

    @property
    def looks_minimal(self) -> bool:
        return self.samples > 0 and self.lower_samples == 0


class ObservablesCommand(BaseModel):
    input: Path
    alpha: float | None = None
    dipole: bool | None = None
    bend_probe: bool = False
