"""
File: app/core/logging.py
Description: 全局日志配置模块 (Loguru)

日志只写 stderr (文本或 JSON)，可选按天轮转的文件副本；
stdout 留给响应信封。numpy / scipy 的 warnings 经标准库 logging 转入 Loguru。

Author: jinmozhe
Created: 2025-11-24
Updated: 2026-03-02 (CLI sinks)
"""

import logging
import sys
from pathlib import Path
from typing import Any

from loguru import logger

from app.core.config import Settings, settings


class InterceptHandler(logging.Handler):
    """把标准库 logging 记录 (含 py.warnings) 转发给 Loguru。"""

    def emit(self, record: logging.LogRecord) -> None:
        # 获取对应的 Loguru 日志级别
        try:
            level: str | int = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        # 查找调用者的栈帧，以确保日志行号正确
        frame, depth = logging.currentframe(), 2
        while frame and frame.f_code.co_filename == logging.__file__:
            if frame.f_back:
                frame = frame.f_back
            depth += 1

        logger.opt(depth=depth, exception=record.exc_info).log(
            level, record.getMessage()
        )


def format_record(record: dict[str, Any]) -> str:
    """文本格式；绑定了 run_id 时追加在行尾。"""
    format_string = (
        "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
        "<level>{message}</level>"
    )

    if record["extra"].get("run_id"):
        format_string += " | <magenta>run_id={extra[run_id]}</magenta>"

    format_string += "\n{exception}"
    return format_string


def setup_logging(config: Settings | None = None) -> None:
    """按配置重建全部 sink，可重复调用。"""
    cfg = config or settings

    # 1. 拦截标准库日志与 warnings
    logging.root.handlers = [InterceptHandler()]
    logging.root.setLevel(cfg.LOG_LEVEL)
    logging.captureWarnings(True)

    # 2. 配置 Loguru Sink
    logger.remove()

    # 通用配置
    base_config: dict[str, Any] = {
        "level": cfg.LOG_LEVEL,
        "backtrace": cfg.is_debug,
        "diagnose": cfg.LOG_DIAGNOSE,
    }

    # ----------------------------------------------------------------------
    # Sink 1: 控制台输出 (Stderr)
    # ----------------------------------------------------------------------
    console_config = base_config.copy()

    if cfg.LOG_JSON_FORMAT:
        console_config["serialize"] = True
    else:
        console_config["format"] = format_record
        console_config["colorize"] = sys.stderr.isatty()

    logger.add(sys.stderr, **console_config)

    # ----------------------------------------------------------------------
    # Sink 2: 文件输出 (按配置启用)
    # ----------------------------------------------------------------------
    if cfg.LOG_FILE_ENABLED:
        log_dir = Path(cfg.LOG_DIR)
        log_dir.mkdir(parents=True, exist_ok=True)

        log_path = log_dir / "kaleido_{time:YYYY-MM-DD}.log"

        file_config = base_config.copy()
        file_config.update(
            {
                "rotation": cfg.LOG_ROTATION,
                "retention": cfg.LOG_RETENTION,
                "compression": cfg.LOG_COMPRESSION,
                "enqueue": True,
            }
        )

        if cfg.LOG_JSON_FORMAT:
            file_config["serialize"] = True
        else:
            file_config["format"] = format_record

        logger.add(str(log_path), **file_config)

    logger.bind(log_level=cfg.LOG_LEVEL, profile=cfg.PROFILE).debug(
        "Logging configured successfully"
    )
