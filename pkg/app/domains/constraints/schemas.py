"""
File: app/domains/constraints/schemas.py
Description: 规范固定坐标下的变量与残差分块

规范固定: b_0 = (0, 0, 1)，b_1 = (0, sqrt(1 - c^2), c)，
未知量为 b_2 .. b_{n-1} 的 3(n-2) 个坐标。

残差行顺序固定为:
    [0, 3)            闭合  sum b_{i-1} x b_i
    [3, n + 2)        扭转  b_{i-1}.b_i - c, i = 2..n
    [n + 2, 2n)       单位长度  b_i.b_i - 1, i = 2..n-1

Author: jinmozhe
Created: 2026-03-03
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.domains.model.schemas import ReadonlyArray


class GaugedVariables(BaseModel):
    """规范坐标下的未知量。"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=3)
    c: float = Field(..., gt=-1.0, lt=1.0)
    x: ReadonlyArray = Field(..., description="b_2..b_{n-1} 展平后的坐标")

    @model_validator(mode="after")
    def _check_length(self) -> "GaugedVariables":
        if self.x.shape != (3 * (self.n - 2),):
            raise ValueError(
                f"x 的长度必须为 {3 * (self.n - 2)}，实际为 {self.x.shape}"
            )
        return self

    @property
    def free_hinges(self) -> np.ndarray:
        return self.x.reshape(-1, 3)


class ResidualBlocks(BaseModel):
    """按约束类型拆分的残差向量 (只读视图)。"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    closure: ReadonlyArray
    twist: ReadonlyArray
    norm: ReadonlyArray

    @classmethod
    def split(cls, r: np.ndarray, n: int) -> "ResidualBlocks":
        return cls(closure=r[:3], twist=r[3 : n + 2], norm=r[n + 2 :])
