"""
File: app/domains/io_export/schemas.py
Description: 导出领域的 Pydantic 模型

本模块定义了：
1. StateDocument: 构型文件的结构 (带 schema_version，未知字段忽略)
2. LoadReport: 加载结果 + validate_state 汇总 + 备注
3. TetraMesh: 4n 顶点 / 4n 三角面的网格
4. NetFace / NetEdge / NetLayout: 纸模展开图

Author: jinmozhe
Created: 2026-03-06
"""

from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import Settings
from app.domains.io_export.constants import SCHEMA_VERSION
from app.domains.model.schemas import (
    ClosureMode,
    KaleidocycleState,
    ReadonlyArray,
    ValidationSummary,
)

HingeRow = Annotated[list[float], Field(min_length=3, max_length=3)]


class StateDocument(BaseModel):
    """构型文件。b 按行存放，浮点数以最短往返表示写出。"""

    model_config = ConfigDict(extra="ignore")

    schema_version: int = SCHEMA_VERSION
    n: int = Field(..., ge=3)
    mode: ClosureMode
    c: float = Field(..., ge=-1.0, le=1.0)
    b: list[HingeRow]
    metadata: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_rows(self) -> "StateDocument":
        if len(self.b) != self.n:
            raise ValueError(f"b 应有 {self.n} 行，实际 {len(self.b)} 行")
        return self

    @classmethod
    def from_state(
        cls, state: KaleidocycleState, metadata: dict[str, Any] | None = None
    ) -> "StateDocument":
        return cls(
            n=state.n,
            mode=state.mode,
            c=state.c,
            b=state.b.tolist(),
            metadata=metadata or {},
        )

    def to_state(self) -> KaleidocycleState:
        return KaleidocycleState(n=self.n, mode=self.mode, c=self.c, b=self.b)


class LoadReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    state: KaleidocycleState
    validation: ValidationSummary
    metadata: dict[str, Any] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)


class TetraMesh(BaseModel):
    """n 个四面体: 顶点 (4n, 3)，面 (4n, 3) 为 0 基下标，法向朝外。"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertices: ReadonlyArray
    faces: np.ndarray
    volumes: list[float]

    @property
    def num_cells(self) -> int:
        return len(self.volumes)

    def cell_edge_lengths(self) -> np.ndarray:
        """每个四面体排序后的 6 条棱长，形状 (n, 6)。"""
        cells = self.vertices.reshape(-1, 4, 3)
        i, j = np.triu_indices(4, k=1)
        return np.sort(np.linalg.norm(cells[:, i] - cells[:, j], axis=2), axis=1)


class NetFace(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    cell: int
    name: str
    labels: tuple[str, str, str]
    points: ReadonlyArray = Field(..., description="3 x 2 平面坐标")
    source: ReadonlyArray = Field(..., description="3 x 3 空间坐标")


class NetEdge(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["fold", "cut"]
    labels: tuple[str, str]
    start: ReadonlyArray
    end: ReadonlyArray
    face: int


class NetLayout(BaseModel):
    """展开图: 4n 个三角形组成的单条带，胶合边在重复出现的切边上。"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    faces: list[NetFace]
    edges: list[NetEdge]
    margins: list[ReadonlyArray] = Field(default_factory=list)
    overlaps: list[tuple[int, int]] = Field(default_factory=list)

    @property
    def folds(self) -> list[NetEdge]:
        return [edge for edge in self.edges if edge.kind == "fold"]

    @property
    def cuts(self) -> list[NetEdge]:
        return [edge for edge in self.edges if edge.kind == "cut"]

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        points = np.vstack([face.points for face in self.faces] + list(self.margins))
        return points.min(axis=0), points.max(axis=0)


class ExportSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    hinge_half_length: float = Field(default=0.5, description="铰链半长")
    margin_width: float = Field(default=0.15, ge=0.0, description="胶合边宽度")
    mm_per_unit: float = Field(default=20.0, gt=0.0, description="SVG 毫米/单位长度")
    load_tol: float = Field(default=1e-9, gt=0.0, description="加载校验容差")

    @classmethod
    def from_settings(cls, cfg: Settings, **overrides: Any) -> "ExportSettings":
        values: dict[str, Any] = {
            "hinge_half_length": cfg.EXPORT_HINGE_HALF_LENGTH,
            "margin_width": cfg.EXPORT_MARGIN_WIDTH,
            "mm_per_unit": cfg.EXPORT_MM_PER_UNIT,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class ExportCommand(BaseModel):
    input: Path
    mesh: Path | None = None
    net: Path | None = None
    half_length: float | None = Field(default=None, ge=0.0)
    margin: float | None = Field(default=None, ge=0.0)

    @model_validator(mode="after")
    def _some_output(self) -> "ExportCommand":
        if self.mesh is None and self.net is None:
            raise ValueError("至少指定 --mesh 或 --net 之一")
        return self
