"""
File: app/core/exceptions.py
Description: 业务异常类与全局异常处理器

本模块负责：
1. 提供业务异常基类 AppException（携带错误码、退出码与诊断数据）
2. 提供非致命告警类型 ValidationWarning / OverlapWarning
3. 全局异常处理器：把任意异常映射为 (退出码, 失败信封) 并记录日志

Author: jinmozhe
Created: 2025-11-24
Updated: 2026-03-02 (CLI exit-code mapping)
"""

from typing import Any

import click
from pydantic import ValidationError

from app.core.error_code import BaseErrorCode, SystemErrorCode
from app.core.logging import logger
from app.core.middleware import current_run_id
from app.core.response import ResponseModel

# ------------------------------------------------------------------------------
# 1. 自定义业务异常类
# ------------------------------------------------------------------------------


class AppException(Exception):
    """
    应用基础异常类。
    所有业务异常都应继承此类，或者直接抛出此类。
    """

    def __init__(
        self,
        error: BaseErrorCode,
        message: str = "",
        data: Any = None,
    ):
        self.error = error
        self.exit_code = error.exit_code
        self.code = error.code
        self.message = message or error.msg
        self.data = data
        super().__init__(self.message)


class InvalidParamsException(AppException):
    """
    参数非法 (退出码 1)
    用于 Service 层前置条件校验
    """

    def __init__(self, message: str = "", data: Any = None):
        super().__init__(SystemErrorCode.INVALID_PARAMS, message=message, data=data)


# ------------------------------------------------------------------------------
# 2. 非致命告警
# ------------------------------------------------------------------------------


class ValidationWarning(UserWarning):
    """加载的构型残差超出容差（仍然可用）。"""


class OverlapWarning(UserWarning):
    """展开图自相交（仍然输出）。"""


# ------------------------------------------------------------------------------
# 3. 全局异常处理器 (Handlers)
# ------------------------------------------------------------------------------


def handle_app_exception(exc: AppException) -> tuple[int, ResponseModel[Any]]:
    """
    处理自定义业务异常 (AppException)
    直接映射为定义好的退出码和 Code
    """
    # 业务失败 (不可行、未收敛) 不需要 stack trace
    logger.bind(code=exc.code, exit_code=exc.exit_code, data=exc.data).warning(
        "Business exception occurred"
    )
    return exc.exit_code, ResponseModel.from_error(
        exc.error, message=exc.message, data=exc.data, run_id=current_run_id()
    )


def handle_validation_error(exc: ValidationError) -> tuple[int, ResponseModel[Any]]:
    """
    处理 Pydantic 校验异常。
    所有非法字段汇总为一条消息，退出码 1。
    """
    errors = exc.errors(include_url=False, include_context=False)
    parts: list[str] = []
    for error in errors:
        loc = ".".join(str(item) for item in error.get("loc", ())) or "value"
        parts.append(f"{loc}: {error.get('msg', 'invalid')}")
    readable_message = "; ".join(parts)

    logger.bind(model=exc.title, detail=readable_message).warning(
        "Command validation failed"
    )

    invalid = SystemErrorCode.INVALID_PARAMS
    return invalid.exit_code, ResponseModel.from_error(
        invalid, message=readable_message, data={"errors": parts}, run_id=current_run_id()
    )


def handle_usage_error(exc: click.ClickException) -> tuple[int, ResponseModel[Any]]:
    """
    处理命令行框架层面的用法错误 (未知选项、缺失参数、文件不存在)
    """
    detail = exc.format_message()
    logger.bind(detail=detail).warning("Command usage error")
    error = SystemErrorCode.INVALID_PARAMS
    return error.exit_code, ResponseModel.from_error(
        error, message=detail, run_id=current_run_id()
    )


def handle_os_error(exc: OSError) -> tuple[int, ResponseModel[Any]]:
    """
    处理文件系统错误 (退出码 3)
    """
    filename = getattr(exc, "filename", None)
    logger.bind(filename=filename, errno=exc.errno).warning("File system error occurred")
    error = SystemErrorCode.IO_ERROR
    return error.exit_code, ResponseModel.from_error(
        error,
        message=f"{error.msg}: {exc.strerror or exc}",
        data={"filename": None if filename is None else str(filename)},
        run_id=current_run_id(),
    )


def handle_unexpected(exc: Exception) -> tuple[int, ResponseModel[Any]]:
    """
    处理所有未捕获的异常，记录完整堆栈，退出码 70
    """
    logger.opt(exception=exc).error("Unhandled system exception occurred")
    return SystemErrorCode.INTERNAL_ERROR.exit_code, ResponseModel.from_error(
        SystemErrorCode.INTERNAL_ERROR,
        data={"type": type(exc).__name__},
        run_id=current_run_id(),
    )


def handle_exception(exc: Exception) -> tuple[int, ResponseModel[Any]]:
    """
    统一分发入口。
    应在 main.run 中调用。
    """
    if isinstance(exc, AppException):
        return handle_app_exception(exc)
    if isinstance(exc, ValidationError):
        return handle_validation_error(exc)
    if isinstance(exc, click.ClickException):
        return handle_usage_error(exc)
    if isinstance(exc, OSError):
        return handle_os_error(exc)
    return handle_unexpected(exc)
