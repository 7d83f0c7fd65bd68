"""
File: app/utils/files.py
Description: 原子文件写入

先写入同目录临时文件，再 os.replace 覆盖目标，
读者永远看不到写了一半的文件。

Author: jinmozhe
Created: 2026-03-02
"""

import os
import tempfile
from pathlib import Path


def default_file_mode() -> int:
    """普通 open() 新建文件时的权限 (0o666 去掉 umask)。"""
    # umask 只能通过设置来读取，立即恢复
    umask = os.umask(0)
    os.umask(umask)
    return 0o666 & ~umask


def atomic_write_bytes(path: str | Path, payload: bytes) -> Path:
    """原子写入二进制内容，返回目标路径。"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)

    fd, tmp_name = tempfile.mkstemp(
        dir=target.parent, prefix=f".{target.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
            handle.flush()
            os.fsync(handle.fileno())
        # mkstemp 固定为 0600
        os.chmod(tmp_name, default_file_mode())
        os.replace(tmp_name, target)
    except BaseException:
        # 失败时清理临时文件，保留原始异常
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return target


def atomic_write_text(path: str | Path, text: str, encoding: str = "utf-8") -> Path:
    """原子写入文本内容。"""
    return atomic_write_bytes(path, text.encode(encoding))
