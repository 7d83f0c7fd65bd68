"""
File: app/core/middleware.py
Description: 命令执行作用域 (Run Scope)

本模块负责：
1. 为每次命令调用生成 UUID v7 run_id
2. 绑定 Loguru 上下文，使 Service 层的所有日志自动携带 run_id
3. 记录命令耗时与最终退出码 (Access Log 的命令行版本)
4. 暴露 current_run_id() / current_command_line() 供信封与文件溯源使用

Author: jinmozhe
Created: 2025-11-24
Updated: 2026-03-02 (CLI run scope)
"""

import shlex
import time
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field

from loguru import logger
from uuid6 import uuid7

_run_id: ContextVar[str | None] = ContextVar("run_id", default=None)
_command_line: ContextVar[str] = ContextVar("command_line", default="")


@dataclass
class RunScope:
    """一次命令调用的可变状态（退出码由调用方在结束前写入）。"""

    run_id: str
    command_line: str
    exit_code: int = 0
    started_at: float = field(default_factory=time.perf_counter)


def current_run_id() -> str | None:
    """当前作用域的 run_id；作用域外返回 None。"""
    return _run_id.get()


def current_command_line() -> str:
    """当前作用域的命令行文本。"""
    return _command_line.get()


@contextmanager
def command_scope(prog_name: str, argv: Sequence[str]) -> Iterator[RunScope]:
    """
    命令执行作用域。

    职责：
    1. 生成 run_id (UUID v7) 并写入 ContextVar
    2. 开启 Loguru contextualize，贯穿整个命令链路
    3. 结束时记录耗时与退出码
    """
    scope = RunScope(
        run_id=str(uuid7()),
        command_line=shlex.join([prog_name, *argv]),
    )
    run_token = _run_id.set(scope.run_id)
    line_token = _command_line.set(scope.command_line)

    with logger.contextualize(run_id=scope.run_id):
        try:
            yield scope
        finally:
            duration_ms = (time.perf_counter() - scope.started_at) * 1000
            logger.bind(
                command=scope.command_line,
                exit_code=scope.exit_code,
                duration_ms=round(duration_ms, 2),
            ).info("Command finished")
            _run_id.reset(run_token)
            _command_line.reset(line_token)
