"""
File: app/domains/io_export/constants.py
Description: 导出领域常量、错误码与具名异常
"""

from typing import Any

from app.core.error_code import EXIT_USAGE, BaseErrorCode
from app.core.exceptions import AppException

SCHEMA_VERSION = 1

TRACE_CSV_COLUMNS = (
    "arclength",
    "c",
    "e_bend",
    "e_clmb",
    "e_dipl",
    "tw",
    "wr",
    "half_twists",
    "gauss_area",
)
FEASIBILITY_CSV_COLUMNS = ("c", "feasible", "residual_norm", "strategy")
TABLE_CSV_COLUMNS = ("n", "mode", "c_n", "tw", "e_bend", "e_dipl", "half_twists")

# 17 位有效数字保证 double 往返
CSV_FLOAT_FORMAT = "%.17g"

# 四面体体积低于该值视为退化
MIN_TETRA_VOLUME = 1e-12

# 展开图三角形相互穿入深度 (相对边长) 超过该值才算重叠
OVERLAP_TOL = 1e-9

# 规范位置 b_0 = (0, 0, 1) 的比较容差，仅用于生成加载备注
GAUGE_NOTE_TOL = 1e-12

# 四面体的四个面 (顶点下标 P=0, Q=1, R=2, S=3)，按展开顺序排列
# F1=PQR -> F4=QRS -> F2=PQS -> F3=PRS，相邻两面共享一条折线
STRIP_FACES: tuple[tuple[int, int, int], ...] = (
    (0, 1, 2),
    (1, 2, 3),
    (0, 1, 3),
    (0, 2, 3),
)
STRIP_FACE_NAMES = ("PQR", "QRS", "PQS", "PRS")

SVG_FOLD_DASH = "2,1"
SVG_STROKE_MM = 0.2


class IOExportErrorCode(BaseErrorCode):
    """导出领域错误码"""

    PARSE_ERROR = (EXIT_USAGE, "io_export.parse_error", "构型文件无法解析")
    SCHEMA_VERSION = (EXIT_USAGE, "io_export.schema_version", "不支持的构型文件版本")
    EMPTY_TRACE = (EXIT_USAGE, "io_export.empty_trace", "轨迹为空，无可导出内容")
    INVALID_HALF_LENGTH = (EXIT_USAGE, "io_export.invalid_half_length", "铰链半长必须为非负有限数")
    INVALID_MARGIN = (EXIT_USAGE, "io_export.invalid_margin", "胶合边宽度必须为非负有限数")


class ParseError(AppException):
    """构型文件语法或结构错误，data 携带 lineno / colno。"""

    def __init__(self, message: str = "", data: Any = None):
        super().__init__(IOExportErrorCode.PARSE_ERROR, message=message, data=data)


class SchemaVersionError(AppException):
    def __init__(self, message: str = "", data: Any = None):
        super().__init__(IOExportErrorCode.SCHEMA_VERSION, message=message, data=data)
