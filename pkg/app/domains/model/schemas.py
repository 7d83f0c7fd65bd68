"""
File: app/domains/model/schemas.py
Description: 构型领域的 Pydantic 模型

本模块定义了：
1. ClosureMode: 闭合方式 (Oriented: b_n = b_0 / NonOriented: b_n = -b_0)
2. KaleidocycleState: 铰链方向 b_i + 闭合方式 + 扭转参数 c，方程组的基本未知量
3. CenterLine: 由叉乘递推得到的铰链中心 gamma_i 与边向量 e_i
4. ValidationSummary: 单位长度 / 扭转 / 闭合三项残差汇总
5. ObservableSet: 能量与带状不变量

所有模型均为不可变值对象 (frozen)，数组字段在校验时被设为只读。

Author: jinmozhe
Created: 2026-03-02
"""

from enum import StrEnum
from typing import Annotated, Any

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    model_validator,
)


def _as_readonly_array(value: Any) -> np.ndarray:
    """转换为只读 float64 数组。"""
    arr = np.array(value, dtype=np.float64)
    arr.setflags(write=False)
    return arr


# JSON 模式下序列化为嵌套列表
ReadonlyArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_readonly_array),
    PlainSerializer(lambda arr: arr.tolist(), return_type=list, when_used="json"),
]


class ClosureMode(StrEnum):
    """闭合方式"""

    ORIENTED = "oriented"
    NONORIENTED = "nonoriented"

    @property
    def sign(self) -> float:
        """接缝处的符号: b_{n+k} = sign * b_k"""
        return 1.0 if self is ClosureMode.ORIENTED else -1.0

    @property
    def flipped(self) -> "ClosureMode":
        return (
            ClosureMode.NONORIENTED
            if self is ClosureMode.ORIENTED
            else ClosureMode.ORIENTED
        )


class KaleidocycleState(BaseModel):
    """
    n 个铰链方向构成的构型。
    单位长度与闭合性不在构造时强制，由 validate_state 报告。
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=3, description="铰链数")
    mode: ClosureMode = Field(..., description="闭合方式")
    c: float = Field(..., ge=-1.0, le=1.0, description="相邻铰链夹角余弦")
    b: ReadonlyArray = Field(..., description="n x 3 铰链方向")

    @model_validator(mode="after")
    def _check_shape(self) -> "KaleidocycleState":
        if self.b.shape != (self.n, 3):
            raise ValueError(
                f"b 的形状必须为 ({self.n}, 3)，实际为 {tuple(self.b.shape)}"
            )
        if not np.all(np.isfinite(self.b)):
            raise ValueError("b 含有非有限数值")
        return self

    @property
    def is_trivial(self) -> bool:
        """|c| = 1：所有铰链平行的平面情形。"""
        return abs(self.c) >= 1.0

    @property
    def segment_length(self) -> float:
        """理论段长 sqrt(1 - c^2)。"""
        return float(np.sqrt(max(0.0, 1.0 - self.c * self.c)))

    def extended(self, extra: int = 1) -> np.ndarray:
        """按闭合方式延拓: 返回 b_0 .. b_{n+extra-1}。"""
        ext = np.empty((self.n + extra, 3))
        ext[: self.n] = self.b
        for k in range(extra):
            ext[self.n + k] = self.mode.sign * self.b[k % self.n]
        return ext


class CenterLine(BaseModel):
    """铰链中心折线 gamma_i 与循环边向量 e_i = b_i x b_{i+1}。"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    gamma: ReadonlyArray = Field(..., description="n x 3 铰链中心")
    segments: ReadonlyArray = Field(..., description="n x 3 循环边向量")
    closure_defect: float = Field(..., description="|sum e_i|")

    @property
    def n(self) -> int:
        return int(self.gamma.shape[0])

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.segments, axis=1)


class ValidationSummary(BaseModel):
    """validate_state 的残差汇总。"""

    model_config = ConfigDict(frozen=True)

    norm_defect: float = Field(..., description="max | |b_i|^2 - 1 |")
    twist_defect: float = Field(..., description="max |b_{i-1}.b_i - c|")
    closure_defect: float = Field(..., description="|sum b_{i-1} x b_i|")
    tol: float
    valid: bool

    @property
    def max_defect(self) -> float:
        return max(self.norm_defect, self.twist_defect, self.closure_defect)


class ObservableSet(BaseModel):
    """单个构型的能量与带状不变量。"""

    model_config = ConfigDict(frozen=True)

    e_bend: float = Field(..., description="弯曲能")
    e_clmb: float = Field(..., description="Coulomb 能")
    alpha: float = Field(default=1.0, description="Coulomb 指数")
    e_dipl: float | None = Field(default=None, description="偶极能 (仅 oriented)")
    tw: float = Field(..., description="扭转数 (圈)")
    wr: float = Field(..., description="缠绕数 (圈)")
    half_twists: int
    half_twist_defect: float = Field(..., description="|2(Tw + Wr) - h|")
    gauss_area: float = Field(..., description="Gauss 映射围成的球面面积，取值 [0, 4pi)")
