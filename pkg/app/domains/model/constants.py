"""
File: app/domains/model/constants.py
Description: 构型领域常量、业务错误码与具名异常
"""

from typing import Any

from app.core.error_code import EXIT_MATH, EXIT_USAGE, BaseErrorCode
from app.core.exceptions import AppException

# 连续铰链叉乘长度低于该值视为平行 (退化)
DEGENERATE_SEGMENT_TOL = 1e-12

# 铰链中心两两距离 / 段长低于该值视为重合 (折返构型)
COINCIDENT_CENTER_RATIO = 1e-6

# 命令行入口接受的最小铰链数 (n < 6 不存在可动闭环)
MIN_RING_SIZE = 6


class ModelErrorCode(BaseErrorCode):
    """构型领域错误码"""

    # 格式: (退出码, "domain.reason", "中文消息")
    DEGENERATE = (EXIT_MATH, "model.degenerate", "相邻铰链平行，中心线出现零长度段")
    TOO_FEW_HINGES = (EXIT_USAGE, "model.too_few_hinges", "铰链数过少，无法构成闭合中心线")
    GAUGE_UNDEFINED = (EXIT_MATH, "model.gauge_undefined", "b_0 与 b_1 平行，无法对齐规范坐标")
    INVALID_MOBILITY_INPUT = (EXIT_USAGE, "model.invalid_mobility_input", "刚体数须 >= 1 且每个关节自由度 >= 1")


class DegenerateError(AppException):
    """退化构型 (平行铰链 / 零体积四面体)"""

    def __init__(self, message: str = "", data: Any = None):
        super().__init__(ModelErrorCode.DEGENERATE, message=message, data=data)


class GaugeUndefinedError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(ModelErrorCode.GAUGE_UNDEFINED, message=message, data=data)
