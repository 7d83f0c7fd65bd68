"""
File: app/domains/solver/constants.py
Description: 求解器领域常量、错误码与具名异常
"""

from typing import Any

from app.core.error_code import EXIT_MATH, BaseErrorCode
from app.core.exceptions import AppException

# 回溯线搜索的最大折半次数
MAX_STEP_HALVINGS = 40

# 热启动在报告中的策略名
WARM_START = "warm-start"


class SolverErrorCode(BaseErrorCode):
    """求解器错误码"""

    NOT_CONVERGED = (EXIT_MATH, "solver.not_converged", "所有重启均未收敛到容差以内")


class NotConvergedError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(SolverErrorCode.NOT_CONVERGED, message=message, data=data)
