"""
File: app/domains/io_export/repository.py
Description: 产物文件访问层

所有写入都经过 utils.files 的原子写，读者不会看到写了一半的文件。

Author: jinmozhe
Created: 2026-03-06
"""

from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from app.domains.io_export.constants import CSV_FLOAT_FORMAT
from app.utils.files import atomic_write_bytes, atomic_write_text


class ArtifactRepository:
    def __init__(self, root: Path | None = None):
        self.root = root

    def resolve(self, path: str | Path) -> Path:
        target = Path(path)
        if self.root is not None and not target.is_absolute():
            return self.root / target
        return target

    def read_bytes(self, path: str | Path) -> bytes:
        return self.resolve(path).read_bytes()

    def write_bytes(self, path: str | Path, payload: bytes) -> Path:
        return atomic_write_bytes(self.resolve(path), payload)

    def write_text(self, path: str | Path, text: str) -> Path:
        return atomic_write_text(self.resolve(path), text)

    def write_frame(
        self, frame: pd.DataFrame, path: str | Path, columns: Sequence[str]
    ) -> Path:
        """固定列顺序，浮点 17 位有效数字，缺失值写空串。"""
        text = frame.to_csv(
            columns=list(columns),
            index=False,
            float_format=CSV_FLOAT_FORMAT,
            na_rep="",
            lineterminator="\n",
        )
        return self.write_text(path, text)
