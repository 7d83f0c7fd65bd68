"""
File: app/domains/extremal/constants.py
Description: 边界搜索领域常量、错误码与具名异常
"""

from enum import StrEnum
from typing import Any

from app.core.error_code import EXIT_MATH, BaseErrorCode
from app.core.exceptions import AppException

# 锚点粗扫描的区间
ANCHOR_SCAN_RANGE = (-0.9, 0.9)

# 推进失败后依次尝试的步长比例
MARCH_RETRY_FRACTIONS = (1.0, 0.5, 0.25)

# 精修结果允许越出括号的相对余量
REFINE_BRACKET_SLACK = 1e-12


class Side(StrEnum):
    """边界方向"""

    UPPER = "upper"
    LOWER = "lower"

    @property
    def direction(self) -> float:
        return 1.0 if self is Side.UPPER else -1.0

    @property
    def opposite(self) -> "Side":
        return Side.LOWER if self is Side.UPPER else Side.UPPER


class ExtremalErrorCode(BaseErrorCode):
    """边界搜索错误码"""

    NO_FEASIBLE_ANCHOR = (EXIT_MATH, "extremal.no_feasible_anchor", "粗扫描未找到可行的 c，该闭合方式与奇偶性下不存在非平凡区间")
    TRIVIAL_BOUNDARY = (EXIT_MATH, "extremal.trivial_boundary", "可行区间延伸到平凡端点 ±1，不存在非平凡边界")


class NoFeasibleAnchorError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(ExtremalErrorCode.NO_FEASIBLE_ANCHOR, message=message, data=data)


class TrivialBoundaryError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(ExtremalErrorCode.TRIVIAL_BOUNDARY, message=message, data=data)
