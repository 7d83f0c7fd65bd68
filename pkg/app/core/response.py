"""
File: app/core/response.py
Description: 统一输出信封（Unified Envelope）模型与渲染

每条命令在 stdout 上恰好输出一个 JSON 信封；日志只走 stderr。
信封同时携带进程退出码，脚本无需再读取 $? 即可判断失败类别。

Author: jinmozhe
Created: 2025-11-24
Updated: 2026-03-02 (CLI envelope)
"""

from datetime import UTC, datetime
from pathlib import PurePath
from typing import Any, Generic, TypeVar, cast

import numpy as np
import orjson
import typer
from pydantic import BaseModel, ConfigDict, Field

from app.core.error_code import EXIT_OK, BaseErrorCode

T = TypeVar("T")


def _json_default(value: Any) -> Any:
    """orjson 无法直接序列化的类型 (路径、numpy 标量)。"""
    if isinstance(value, PurePath):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"无法序列化的类型: {type(value).__name__}")


class ResponseBase(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    code: str = Field(default="success", description="业务状态码")
    message: str = Field(default="Success", description="响应消息")
    exit_code: int = Field(default=EXIT_OK, description="进程退出码")
    run_id: str | None = Field(default=None, description="运行追踪ID")
    timestamp: datetime = Field(
        default_factory=lambda: datetime.now(UTC),
        description="信封生成时间",
    )


class ResponseModel(ResponseBase, Generic[T]):
    """
    统一输出信封
    """

    data: T | None = Field(default=None, description="命令结果")

    @classmethod
    def success(
        cls,
        data: T | None = None,
        message: str = "Success",
        run_id: str | None = None,
    ) -> "ResponseModel[T]":
        if isinstance(data, BaseModel):
            data = cast(Any, data.model_dump(mode="json"))
        return cls(code="success", message=message, data=data, run_id=run_id)

    @classmethod
    def fail(
        cls,
        code: str,
        message: str,
        exit_code: int,
        data: Any = None,
        run_id: str | None = None,
    ) -> "ResponseModel[Any]":
        return cls(
            code=code,
            message=message,
            exit_code=exit_code,
            data=data,
            run_id=run_id,
        )

    @classmethod
    def from_error(
        cls,
        error: BaseErrorCode,
        message: str = "",
        data: Any = None,
        run_id: str | None = None,
    ) -> "ResponseModel[Any]":
        """由错误码构造失败信封，message 为空时使用错误码的默认文案。"""
        return cls.fail(
            code=error.code,
            message=message or error.msg,
            exit_code=error.exit_code,
            data=data,
            run_id=run_id,
        )

    def render(self) -> str:
        """序列化为缩进 JSON 文本 (NaN / Inf 输出为 null)。"""
        return orjson.dumps(
            self.model_dump(),
            default=_json_default,
            option=orjson.OPT_INDENT_2
            | orjson.OPT_SERIALIZE_NUMPY
            | orjson.OPT_UTC_Z,
        ).decode()

    def echo(self) -> None:
        typer.echo(self.render())
