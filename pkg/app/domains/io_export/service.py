"""
File: app/domains/io_export/service.py
Description: 构型序列化与几何导出服务

本模块负责：
1. 构型文件 (JSON, schema_version = 1) 的保存与加载，b 逐位往返
2. 轨迹 / 可行性剖面 / 复现表格的 CSV 导出 (pandas)
3. 四面体网格 (OBJ) 导出，每个铰链对应一个四面体
4. 纸模展开图 (SVG, 毫米单位): 四面体条带沿共享边依次展开

文件中的溯源信息只包含命令行与求解参数，不含 run_id，
保证同一命令行 + 同一 seed 的输出逐位一致。

Author: jinmozhe
Created: 2026-03-06
"""

import math
import warnings
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any
from xml.sax.saxutils import escape

import numpy as np
import orjson
import pandas as pd
from pydantic import BaseModel, ValidationError

from app.core.config import settings as global_settings
from app.core.exceptions import AppException, OverlapWarning, ValidationWarning
from app.core.logging import logger
from app.core.middleware import current_command_line
from app.domains.extremal.schemas import FeasibilityProfile
from app.domains.io_export.constants import (
    FEASIBILITY_CSV_COLUMNS,
    GAUGE_NOTE_TOL,
    MIN_TETRA_VOLUME,
    OVERLAP_TOL,
    SCHEMA_VERSION,
    STRIP_FACE_NAMES,
    STRIP_FACES,
    SVG_FOLD_DASH,
    SVG_STROKE_MM,
    TABLE_CSV_COLUMNS,
    TRACE_CSV_COLUMNS,
    IOExportErrorCode,
    ParseError,
    SchemaVersionError,
)
from app.domains.io_export.repository import ArtifactRepository
from app.domains.io_export.schemas import (
    ExportSettings,
    LoadReport,
    NetEdge,
    NetFace,
    NetLayout,
    StateDocument,
    TetraMesh,
)
from app.domains.kinematics.schemas import MotionTrace
from app.domains.model.constants import DegenerateError
from app.domains.model.schemas import KaleidocycleState
from app.domains.model.service import gamma_from_b, validate_state
from app.domains.observables.schemas import EnergyParams
from app.domains.observables.service import observe_trace


def provenance(extra: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """写入产物文件的溯源信息。"""
    meta: dict[str, Any] = {"generator": global_settings.PROJECT_NAME}
    command = current_command_line()
    if command:
        meta["command"] = command
    if extra:
        meta.update(extra)
    return meta


# ------------------------------------------------------------------------------
# 1. 四面体几何 (网格与展开图共用)
# ------------------------------------------------------------------------------


def _cell_vertices(state: KaleidocycleState, half_length: float) -> np.ndarray:
    """
    形状 (n, 4, 3)，每个四面体的 P, Q, R, S:
    P/Q = gamma_i -/+ h b_i，R/S = gamma_{i+1} -/+ h b_{i+1}，b_n 按闭合方式取符号。
    """
    if not math.isfinite(half_length) or half_length < 0:
        raise AppException(
            IOExportErrorCode.INVALID_HALF_LENGTH, data={"hinge_half_length": half_length}
        )
    gamma = gamma_from_b(state).gamma
    hinges = state.extended()
    nxt_gamma = np.roll(gamma, -1, axis=0)
    cells = np.empty((state.n, 4, 3))
    cells[:, 0] = gamma - half_length * hinges[:-1]
    cells[:, 1] = gamma + half_length * hinges[:-1]
    cells[:, 2] = nxt_gamma - half_length * hinges[1:]
    cells[:, 3] = nxt_gamma + half_length * hinges[1:]
    return cells


def _vertex_labels(state: KaleidocycleState, cell: int) -> tuple[str, str, str, str]:
    """空间顶点的全局名字，例如 "3-" / "3+"；接缝处按闭合方式交换正负。"""
    following = (cell + 1) % state.n
    flip = cell == state.n - 1 and state.mode.sign < 0
    minus, plus = ("+", "-") if flip else ("-", "+")
    return (
        f"{cell}-",
        f"{cell}+",
        f"{following}{minus}",
        f"{following}{plus}",
    )


def _signed_volume(cell: np.ndarray) -> float:
    p, q, r, s = cell
    return float(np.linalg.det(np.stack([q - p, r - p, s - p])) / 6.0)


def build_mesh(state: KaleidocycleState, half_length: float) -> TetraMesh:
    """每个四面体 4 个顶点 + 4 个外法向三角面。"""
    cells = _cell_vertices(state, half_length)
    volumes = [abs(_signed_volume(cell)) for cell in cells]
    flat = [i for i, volume in enumerate(volumes) if volume < MIN_TETRA_VOLUME]
    if flat:
        raise DegenerateError(
            message="四面体体积过小", data={"cells": flat, "hinge_half_length": half_length}
        )

    faces: list[tuple[int, int, int]] = []
    for i, cell in enumerate(cells):
        base = 4 * i
        for a, b, c in STRIP_FACES:
            (d,) = {0, 1, 2, 3} - {a, b, c}
            normal = np.cross(cell[b] - cell[a], cell[c] - cell[a])
            if normal @ (cell[d] - cell[a]) > 0:
                b, c = c, b
            faces.append((base + a, base + b, base + c))

    return TetraMesh(
        vertices=cells.reshape(-1, 3),
        faces=np.array(faces, dtype=np.int64),
        volumes=volumes,
    )


# ------------------------------------------------------------------------------
# 2. 展开图
# ------------------------------------------------------------------------------


def _cross2(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _place_apex(
    u: np.ndarray,
    v: np.ndarray,
    ru: float,
    rv: float,
    avoid: np.ndarray,
) -> np.ndarray:
    """平面上到 u, v 距离为 ru, rv 的点，取与 avoid 异侧的那个。"""
    d = float(np.linalg.norm(v - u))
    ex = (v - u) / d
    ey = np.array([-ex[1], ex[0]])
    along = (ru * ru - rv * rv + d * d) / (2.0 * d)
    height = math.sqrt(max(ru * ru - along * along, 0.0))
    side = -1.0 if _cross2(ex, avoid - u) > 0 else 1.0
    return u + along * ex + side * height * ey


def _margin_polygon(
    p: np.ndarray, q: np.ndarray, inner: np.ndarray, width: float
) -> np.ndarray:
    """切边 pq 外侧的梯形胶合边。"""
    edge = q - p
    length = float(np.linalg.norm(edge))
    direction = edge / length
    normal = np.array([-direction[1], direction[0]])
    if normal @ (inner - p) > 0:
        normal = -normal
    taper = min(width, 0.25 * length)
    return np.array(
        [
            p,
            q,
            q - taper * direction + width * normal,
            p + taper * direction + width * normal,
        ]
    )


def _find_overlaps(triangles: np.ndarray) -> list[tuple[int, int]]:
    """分离轴检测；相邻三角形共享边，只检查下标差 >= 2 的三角形对。"""
    count = triangles.shape[0]
    if count < 3:
        return []
    edges = np.roll(triangles, -1, axis=1) - triangles
    normals = np.stack([-edges[..., 1], edges[..., 0]], axis=-1)
    normals /= np.linalg.norm(normals, axis=-1, keepdims=True)
    scale = float(np.median(np.linalg.norm(edges, axis=-1)))

    first, second = np.triu_indices(count, k=2)
    axes = np.concatenate([normals[first], normals[second]], axis=1)
    proj_a = np.einsum("pvk,pak->pva", triangles[first], axes)
    proj_b = np.einsum("pvk,pak->pva", triangles[second], axes)
    depth = np.minimum(proj_a.max(axis=1), proj_b.max(axis=1)) - np.maximum(
        proj_a.min(axis=1), proj_b.min(axis=1)
    )
    hits = np.all(depth > OVERLAP_TOL * scale, axis=1)
    return [(int(a), int(b)) for a, b in zip(first[hits], second[hits], strict=True)]


def build_net(
    state: KaleidocycleState, half_length: float, margin_width: float
) -> NetLayout:
    """
    沿铰链链条展开: 每个四面体按 PQR -> QRS -> PQS -> PRS 依次绕共享边展开，
    第 i 个四面体的 RS 边即第 i+1 个的 PQ 边，整条带共 4n 个三角形。
    同一条空间棱第二次及以后作为切边出现时附加胶合边。
    """
    if not math.isfinite(margin_width) or margin_width < 0:
        raise AppException(
            IOExportErrorCode.INVALID_MARGIN, data={"margin_width": margin_width}
        )
    cells = _cell_vertices(state, half_length)
    volumes = [abs(_signed_volume(cell)) for cell in cells]
    if min(volumes) < MIN_TETRA_VOLUME:
        raise DegenerateError(message="四面体体积过小", data={"hinge_half_length": half_length})

    # 条带上的三角形: (cell, face 名, 三个顶点名, 3x3 空间坐标)
    strip: list[tuple[int, str, tuple[str, str, str], np.ndarray]] = []
    for i, cell in enumerate(cells):
        labels = _vertex_labels(state, i)
        for name, face in zip(STRIP_FACE_NAMES, STRIP_FACES, strict=True):
            strip.append(
                (i, name, (labels[face[0]], labels[face[1]], labels[face[2]]), cell[list(face)])
            )

    faces: list[NetFace] = []
    placed: list[dict[str, np.ndarray]] = []
    for k, (cell_index, name, labels, source) in enumerate(strip):
        if k == 0:
            a, b, c = source
            ab = float(np.linalg.norm(b - a))
            ac = float(np.linalg.norm(c - a))
            along = float((c - a) @ (b - a)) / ab
            coords = {
                labels[0]: np.zeros(2),
                labels[1]: np.array([ab, 0.0]),
                labels[2]: np.array([along, math.sqrt(max(ac * ac - along * along, 0.0))]),
            }
        else:
            previous = placed[-1]
            shared = [label for label in labels if label in previous]
            (fresh,) = [label for label in labels if label not in previous]
            (avoid,) = [label for label in previous if label not in shared]
            position = dict(zip(labels, source, strict=True))
            u, v = shared
            coords = {u: previous[u], v: previous[v]}
            coords[fresh] = _place_apex(
                previous[u],
                previous[v],
                float(np.linalg.norm(position[fresh] - position[u])),
                float(np.linalg.norm(position[fresh] - position[v])),
                previous[avoid],
            )
        placed.append(coords)
        faces.append(
            NetFace(
                cell=cell_index,
                name=name,
                labels=labels,
                points=np.stack([coords[label] for label in labels]),
                source=source,
            )
        )

    edges: list[NetEdge] = []
    margins: list[np.ndarray] = []
    seen_cuts: set[frozenset[str]] = set()
    for k, face in enumerate(faces):
        coords = placed[k]
        for j in range(3):
            pair = (face.labels[j], face.labels[(j + 1) % 3])
            key = frozenset(pair)
            if k > 0 and key <= placed[k - 1].keys():
                continue
            folded = k + 1 < len(faces) and key <= placed[k + 1].keys()
            kind = "fold" if folded else "cut"
            edges.append(
                NetEdge(
                    kind=kind,
                    labels=pair,
                    start=coords[pair[0]],
                    end=coords[pair[1]],
                    face=k,
                )
            )
            if kind == "cut":
                if key in seen_cuts and margin_width > 0:
                    (inner,) = [coords[label] for label in face.labels if label not in key]
                    margins.append(
                        _margin_polygon(coords[pair[0]], coords[pair[1]], inner, margin_width)
                    )
                seen_cuts.add(key)

    overlaps = _find_overlaps(np.stack([face.points for face in faces]))
    if overlaps:
        logger.bind(n=state.n, overlaps=len(overlaps)).warning(
            "Unfolded net overlaps itself"
        )
        warnings.warn(
            f"展开图有 {len(overlaps)} 对三角形重叠", OverlapWarning, stacklevel=2
        )
    return NetLayout(faces=faces, edges=edges, margins=margins, overlaps=overlaps)


def render_net_svg(
    layout: NetLayout, mm_per_unit: float, metadata: Mapping[str, Any] | None = None
) -> str:
    """SVG 1.1，毫米单位；每个面一个 path，折线虚线，切线实线。"""
    pad = 5.0
    low, high = layout.bounds()
    width = float(high[0] - low[0]) * mm_per_unit + 2 * pad
    height = float(high[1] - low[1]) * mm_per_unit + 2 * pad

    def point(p: np.ndarray) -> str:
        x = (float(p[0]) - low[0]) * mm_per_unit + pad
        y = (float(p[1]) - low[1]) * mm_per_unit + pad
        return f"{x:.4f} {y:.4f}"

    def polygon(points: np.ndarray) -> str:
        head, *rest = points
        return "M " + point(head) + "".join(" L " + point(p) for p in rest) + " Z"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        (
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{width:.4f}mm" height="{height:.4f}mm" '
            f'viewBox="0 0 {width:.4f} {height:.4f}">'
        ),
        f"<metadata>{escape(orjson.dumps(dict(metadata or {})).decode())}</metadata>",
        "<style>",
        "path.face {fill:#fdf6e3; stroke:none}",
        "path.margin {fill:#e0e0e0; stroke:#000}",
        f"path.fold, path.cut, path.margin {{fill:none; stroke-width:{SVG_STROKE_MM}}}",
        "path.fold, path.cut {stroke:#000}",
        "</style>",
    ]
    for k, face in enumerate(layout.faces):
        lines.append(
            f'<path class="face" id="face-{k}" data-cell="{face.cell}" '
            f'data-face="{face.name}" d="{polygon(face.points)}"/>'
        )
    for margin in layout.margins:
        lines.append(f'<path class="margin" d="{polygon(margin)}"/>')
    for edge in layout.edges:
        dash = f' stroke-dasharray="{SVG_FOLD_DASH}"' if edge.kind == "fold" else ""
        lines.append(
            f'<path class="{edge.kind}"{dash} '
            f'd="M {point(edge.start)} L {point(edge.end)}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------------------
# 3. 导出服务
# ------------------------------------------------------------------------------


class ExportService:
    def __init__(
        self,
        settings: ExportSettings | None = None,
        repository: ArtifactRepository | None = None,
    ):
        self.settings = settings or ExportSettings()
        self.repository = repository or ArtifactRepository()

    # --- 构型文件 ---

    @staticmethod
    def serialize_state(
        state: KaleidocycleState, metadata: Mapping[str, Any] | None = None
    ) -> bytes:
        document = StateDocument.from_state(state, dict(metadata or {}))
        # orjson 输出最短往返表示，double 逐位还原
        return orjson.dumps(
            document.model_dump(mode="json"),
            option=orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE,
        )

    def parse_state(self, payload: bytes | str) -> LoadReport:
        try:
            raw = orjson.loads(payload)
        except orjson.JSONDecodeError as exc:
            raise ParseError(
                message=f"构型文件不是合法 JSON: {exc.msg}",
                data={"lineno": exc.lineno, "colno": exc.colno, "pos": exc.pos},
            ) from exc
        if not isinstance(raw, dict):
            raise ParseError(message="构型文件顶层必须是对象", data={"lineno": 1, "colno": 1})

        version = raw.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise SchemaVersionError(
                data={"found": version, "supported": SCHEMA_VERSION}
            )

        try:
            document = StateDocument.model_validate(raw)
            state = document.to_state()
        except ValidationError as exc:
            errors = exc.errors(include_url=False)
            problems = [
                ".".join(str(part) for part in err["loc"]) + f": {err['msg']}"
                for err in errors
            ]
            raise ParseError(
                message="构型文件结构非法: " + "; ".join(problems),
                data={
                    "loc": ".".join(str(part) for part in errors[0]["loc"]),
                    "errors": problems,
                },
            ) from exc

        validation = validate_state(state, self.settings.load_tol)
        notes: list[str] = []
        if not validation.valid:
            notes.append(f"残差 {validation.max_defect:.3e} 超过容差 {validation.tol:.1e}")
            logger.bind(n=state.n, defect=validation.max_defect).warning(
                "Loaded state exceeds validation tolerance"
            )
            warnings.warn(notes[-1], ValidationWarning, stacklevel=2)
        if np.max(np.abs(state.b[0] - np.array([0.0, 0.0, 1.0]))) > GAUGE_NOTE_TOL:
            notes.append("b_0 不在规范位置 (0, 0, 1)；求解前会整体旋转对齐")

        return LoadReport(
            state=state,
            validation=validation,
            metadata=document.metadata,
            notes=notes,
        )

    def save_state(
        self,
        state: KaleidocycleState,
        path: str | Path,
        metadata: Mapping[str, Any] | None = None,
    ) -> Path:
        target = self.repository.write_bytes(
            path, self.serialize_state(state, provenance(metadata))
        )
        logger.bind(path=str(target), n=state.n).debug("State saved")
        return target

    def load_state(self, path: str | Path) -> LoadReport:
        return self.parse_state(self.repository.read_bytes(path))

    def save_trace_states(
        self,
        trace: MotionTrace,
        directory: str | Path,
        metadata: Mapping[str, Any] | None = None,
    ) -> list[Path]:
        meta = provenance(metadata)
        return [
            self.repository.write_bytes(
                Path(directory) / f"state_{k:05d}.json",
                self.serialize_state(
                    state, {**meta, "step": k, "arclength": trace.arclength[k]}
                ),
            )
            for k, state in enumerate(trace.states)
        ]

    # --- CSV ---

    def export_trace_csv(
        self,
        trace: MotionTrace,
        path: str | Path,
        params: EnergyParams | None = None,
    ) -> Path:
        if trace.size == 0:
            raise AppException(IOExportErrorCode.EMPTY_TRACE)
        if len(trace.observables) != trace.size:
            trace = observe_trace(trace, params)

        frame = pd.DataFrame(
            {
                "arclength": trace.arclength,
                "c": [state.c for state in trace.states],
                "e_bend": [obs.e_bend for obs in trace.observables],
                "e_clmb": [obs.e_clmb for obs in trace.observables],
                "e_dipl": [
                    np.nan if obs.e_dipl is None else obs.e_dipl
                    for obs in trace.observables
                ],
                "tw": [obs.tw for obs in trace.observables],
                "wr": [obs.wr for obs in trace.observables],
                "half_twists": [obs.half_twists for obs in trace.observables],
                "gauss_area": [obs.gauss_area for obs in trace.observables],
            }
        )
        target = self.repository.write_frame(frame, path, TRACE_CSV_COLUMNS)
        logger.bind(path=str(target), rows=len(frame)).info("Trace CSV written")
        return target

    def write_feasibility_csv(self, profile: FeasibilityProfile, path: str | Path) -> Path:
        frame = pd.DataFrame(
            [point.model_dump() for point in profile.points],
            columns=list(FEASIBILITY_CSV_COLUMNS),
        )
        return self.repository.write_frame(frame, path, FEASIBILITY_CSV_COLUMNS)

    def write_table_csv(
        self, rows: Sequence[BaseModel | Mapping[str, Any]], path: str | Path
    ) -> Path:
        records = [
            row.model_dump(mode="json") if isinstance(row, BaseModel) else dict(row)
            for row in rows
        ]
        frame = pd.DataFrame(records, columns=list(TABLE_CSV_COLUMNS))
        return self.repository.write_frame(frame, path, TABLE_CSV_COLUMNS)

    # --- 几何 ---

    def export_mesh(
        self,
        state: KaleidocycleState,
        path: str | Path,
        half_length: float | None = None,
        metadata: Mapping[str, Any] | None = None,
    ) -> Path:
        h = self.settings.hinge_half_length if half_length is None else half_length
        mesh = build_mesh(state, h)
        meta = provenance(
            {
                "n": state.n,
                "mode": state.mode.value,
                "c": state.c,
                "hinge_half_length": h,
                **(metadata or {}),
            }
        )

        lines = [f"# {key}: {value}" for key, value in meta.items()]
        lines.append("o kaleidocycle")
        lines.extend(
            "v " + " ".join(format(float(x), ".17g") for x in vertex)
            for vertex in mesh.vertices
        )
        lines.extend(
            "f " + " ".join(str(int(index) + 1) for index in face) for face in mesh.faces
        )
        target = self.repository.write_text(path, "\n".join(lines) + "\n")
        logger.bind(path=str(target), cells=mesh.num_cells).info("Mesh written")
        return target

    def export_net_svg(
        self,
        state: KaleidocycleState,
        path: str | Path,
        half_length: float | None = None,
        margin_width: float | None = None,
        metadata: Mapping[str, Any] | None = None,
    ) -> tuple[Path, NetLayout]:
        cfg = self.settings
        h = cfg.hinge_half_length if half_length is None else half_length
        width = cfg.margin_width if margin_width is None else margin_width
        layout = build_net(state, h, width)
        meta = provenance(
            {
                "n": state.n,
                "mode": state.mode.value,
                "c": state.c,
                "hinge_half_length": h,
                "margin_width": width,
                **(metadata or {}),
            }
        )
        target = self.repository.write_text(
            path, render_net_svg(layout, cfg.mm_per_unit, meta)
        )
        logger.bind(
            path=str(target), faces=len(layout.faces), overlaps=len(layout.overlaps)
        ).info("Net SVG written")
        return target, layout
