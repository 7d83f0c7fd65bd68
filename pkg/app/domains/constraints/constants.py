"""
File: app/domains/constraints/constants.py
Description: 约束方程组领域常量与错误码
"""

from enum import StrEnum

from app.core.error_code import EXIT_USAGE, BaseErrorCode


class InitStrategy(StrEnum):
    """初值策略"""

    SYMMETRIC = "symmetric"
    PERTURBED = "perturbed-symmetric"
    RANDOM = "random"


class ConstraintsErrorCode(BaseErrorCode):
    """约束领域错误码"""

    INVALID_SLICE = (EXIT_USAGE, "constraints.invalid_slice", "要求 n >= 3 且 |c| < 1")
    UNKNOWN_STRATEGY = (EXIT_USAGE, "constraints.unknown_strategy", "未知的初值策略")
    SHAPE_MISMATCH = (EXIT_USAGE, "constraints.shape_mismatch", "规范变量长度必须为 3(n-2)")
