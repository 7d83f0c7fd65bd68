"""
File: app/domains/kinematics/constants.py
Description: 运动学领域常量、错误码与具名异常
"""

from typing import Any

from app.core.error_code import EXIT_MATH, BaseErrorCode
from app.core.exceptions import AppException

# 探测随机方向使用的独立随机流编号
PROBE_STREAM = 7919

# 预测方向在零空间上的投影低于该值视为分支歧义
BRANCH_PROJECTION_MIN = 0.5

# 初始方向: 投影后位移至少为步长的该比例
INITIAL_DISPLACEMENT_RATIO = 0.25

# 校正后的弦长上限 (相对当前步长)
MAX_CHORD_RATIO = 2.0


class KinematicsErrorCode(BaseErrorCode):
    """运动学错误码"""

    STALL = (EXIT_MATH, "kinematics.stall", "延拓步长缩小到下限以下，轨迹停滞")
    BRANCH_AMBIGUITY = (EXIT_MATH, "kinematics.branch_ambiguity", "两个候选切向几乎都与前一方向正交，无法确定分支")
    INVALID_START = (EXIT_MATH, "kinematics.invalid_start", "起始构型不在解流形上或没有可用的运动方向")


class StallError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(KinematicsErrorCode.STALL, message=message, data=data)


class BranchAmbiguityError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(KinematicsErrorCode.BRANCH_AMBIGUITY, message=message, data=data)


class InvalidStartError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(KinematicsErrorCode.INVALID_START, message=message, data=data)
