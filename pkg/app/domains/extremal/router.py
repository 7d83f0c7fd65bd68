"""
File: app/domains/extremal/router.py
Description: 边界搜索领域命令 (extreme / scan)

Author: jinmozhe
Created: 2026-03-07
"""

from pathlib import Path
from typing import Annotated

import typer

from app.api.deps import get_export_service, get_extremal_service, get_run_context
from app.core.response import ResponseModel
from app.domains.extremal.schemas import ExtremeCommand, ScanCommand

router = typer.Typer()


@router.command("extreme", help="搜索可行区间的边界 c_n 及其见证构型")
def extreme(
    ctx: typer.Context,
    n: Annotated[int, typer.Option("--n", help="铰链数 (>= 6)")],
    mode: Annotated[str, typer.Option("--mode", help="oriented | nonoriented")],
    side: Annotated[str, typer.Option("--side", help="upper | lower")] = "upper",
    tol: Annotated[float | None, typer.Option("--tol", help="c_n 的括号宽度")] = None,
    digits: Annotated[int, typer.Option("--digits", help="输出小数位数")] = 4,
    output: Annotated[
        Path | None, typer.Option("--output", "-o", help="见证构型输出路径")
    ] = None,
) -> None:
    command = ExtremeCommand(
        n=n, mode=mode, side=side, tol=tol, digits=digits, output=output
    )
    run = get_run_context(ctx)
    service = get_extremal_service(run, tol_c=command.tol)

    result = service.find_extreme_c(command.n, command.mode, command.side)

    data = result.summary()
    data["c_n_display"] = f"{result.c_n:.{command.digits}f}"
    if command.output is not None:
        path = get_export_service(run).save_state(
            result.witness,
            command.output,
            {**run.provenance(), "extreme": result.summary()},
        )
        data["output"] = str(path)
    ResponseModel.success(data=data, run_id=run.run_id).echo()


@router.command("scan", help="在 c 网格上逐点判定可行性")
def scan(
    ctx: typer.Context,
    n: Annotated[int, typer.Option("--n", help="铰链数 (>= 6)")],
    mode: Annotated[str, typer.Option("--mode", help="oriented | nonoriented")],
    c_from: Annotated[float, typer.Option("--from", help="网格起点")] = -0.9,
    c_to: Annotated[float, typer.Option("--to", help="网格终点")] = 0.9,
    points: Annotated[int, typer.Option("--points", help="网格点数")] = 19,
    output: Annotated[
        Path | None, typer.Option("--output", "-o", help="CSV 输出路径")
    ] = None,
) -> None:
    command = ScanCommand(
        n=n, mode=mode, c_from=c_from, c_to=c_to, points=points, output=output
    )
    run = get_run_context(ctx)
    profile = get_extremal_service(run).scan_feasibility(
        command.n, command.mode, command.grid()
    )

    data = {
        "n": profile.n,
        "mode": profile.mode.value,
        "feasible": profile.feasible_values,
        "infeasible": profile.infeasible_values,
    }
    if command.output is not None:
        path = get_export_service(run).write_feasibility_csv(profile, command.output)
        data["output"] = str(path)
    ResponseModel.success(data=data, run_id=run.run_id).echo()
