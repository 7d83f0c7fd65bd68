"""
File: app/core/error_code.py
Description: 全局错误码基类与系统级错误定义

命令行进程的退出码契约：
0 成功 / 1 用法错误 / 2 数学失败 (不可行、未收敛) / 3 I/O 错误 / 70 内部错误
"""

from enum import Enum

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MATH = 2
EXIT_IO = 3
EXIT_INTERNAL = 70


class BaseErrorCode(Enum):
    """
    错误码基类。
    格式: (进程退出码, 业务码字符串, 默认描述文案)
    """

    def __init__(self, exit_code: int, code: str, msg: str):
        self.exit_code = exit_code
        self.code = code
        self.msg = msg


class SystemErrorCode(BaseErrorCode):
    """系统级错误码"""

    SUCCESS = (EXIT_OK, "success", "操作成功")
    INVALID_PARAMS = (EXIT_USAGE, "system.invalid_params", "命令参数有误")
    IO_ERROR = (EXIT_IO, "system.io_error", "文件读写失败")
    INTERNAL_ERROR = (EXIT_INTERNAL, "system.internal_error", "系统内部错误")
