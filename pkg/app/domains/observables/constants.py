"""
File: app/domains/observables/constants.py
Description: 观测量领域常量、错误码与具名异常
"""

from typing import Any

from app.core.error_code import EXIT_MATH, BaseErrorCode
from app.core.exceptions import AppException

SEGMENT_TOL = 1e-12
COINCIDENT_TOL = 1e-12

# 闭式与求和式扭转数的一致性容差
TWIST_AGREEMENT_TOL = 1e-10

# 半扭转数整数性: 超过该值视为中心线或缠绕数计算出错
INTEGRALITY_FATAL = 1e-3

# 四点共面判定 (相对 L^3)，共面线段对的立体角为零
COPLANAR_TOL = 1e-14

# 法向量长度低于该值 (相对 L^2) 视为线段近乎相交
NEAR_INTERSECTION_TOL = 1e-10

# 相邻切向量夹角低于该值视为重合，Gauss 映射中合并
DUPLICATE_TANGENT_TOL = 1e-9


class ObservablesErrorCode(BaseErrorCode):
    """观测量错误码"""

    MODE_ERROR = (EXIT_MATH, "observables.mode_error", "偶极能只对 oriented 构型有定义")
    COINCIDENT_CENTERS = (EXIT_MATH, "observables.coincident_centers", "存在重合的铰链中心")
    DEGENERATE_SEGMENT = (EXIT_MATH, "observables.degenerate_segment", "中心线存在零长度段")
    ILL_CONDITIONED = (EXIT_MATH, "observables.ill_conditioned", "两条线段近乎相交，缠绕数数值病态")
    INTEGRALITY_VIOLATION = (EXIT_MATH, "observables.integrality_violation", "2(Tw + Wr) 偏离整数过远")
    ANTIPODAL_TANGENTS = (EXIT_MATH, "observables.antipodal_tangents", "相邻切向量对径，测地弧无定义")


class ModeError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(ObservablesErrorCode.MODE_ERROR, message=message, data=data)


class CoincidentCentersError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(ObservablesErrorCode.COINCIDENT_CENTERS, message=message, data=data)


class DegenerateSegmentError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(ObservablesErrorCode.DEGENERATE_SEGMENT, message=message, data=data)


class IllConditionedError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(ObservablesErrorCode.ILL_CONDITIONED, message=message, data=data)


class IntegralityViolationError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(ObservablesErrorCode.INTEGRALITY_VIOLATION, message=message, data=data)


class AntipodalTangentsError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(ObservablesErrorCode.ANTIPODAL_TANGENTS, message=message, data=data)
