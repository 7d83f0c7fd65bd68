"""
File: app/domains/io_export/router.py
Description: 导出领域命令 (export)

Author: jinmozhe
Created: 2026-03-07
"""

from pathlib import Path
from typing import Annotated

import typer

from app.api.deps import get_export_service, get_run_context
from app.core.response import ResponseModel
from app.domains.io_export.schemas import ExportCommand

router = typer.Typer()


@router.command("export", help="导出四面体网格 (OBJ) 和 / 或纸模展开图 (SVG)")
def export(
    ctx: typer.Context,
    input_path: Annotated[
        Path,
        typer.Option("--input", "-i", exists=True, dir_okay=False, help="构型文件"),
    ],
    mesh: Annotated[Path | None, typer.Option("--mesh", help="OBJ 输出路径")] = None,
    net: Annotated[Path | None, typer.Option("--net", help="SVG 输出路径")] = None,
    half_length: Annotated[
        float | None, typer.Option("--half-length", help="铰链半长")
    ] = None,
    margin: Annotated[float | None, typer.Option("--margin", help="胶合边宽度")] = None,
) -> None:
    command = ExportCommand(
        input=input_path, mesh=mesh, net=net, half_length=half_length, margin=margin
    )
    run = get_run_context(ctx)
    exporter = get_export_service(run)
    loaded = exporter.load_state(command.input)

    data: dict[str, object] = {"n": loaded.state.n, "notes": loaded.notes}
    if command.mesh is not None:
        path = exporter.export_mesh(
            loaded.state, command.mesh, command.half_length, run.provenance()
        )
        data["mesh"] = str(path)
    if command.net is not None:
        path, layout = exporter.export_net_svg(
            loaded.state,
            command.net,
            command.half_length,
            command.margin,
            run.provenance(),
        )
        data["net"] = str(path)
        data["net_faces"] = len(layout.faces)
        data["net_overlaps"] = len(layout.overlaps)
    ResponseModel.success(data=data, run_id=run.run_id).echo()
