"""
File: app/domains/solver/router.py
Description: 求解器领域命令 (solve)

Author: jinmozhe
Created: 2026-03-07
"""

from pathlib import Path
from typing import Annotated

import typer

from app.api.deps import get_export_service, get_run_context, get_solver_service
from app.core.response import ResponseModel
from app.domains.solver.schemas import SolveCommand

router = typer.Typer()


@router.command("solve", help="在固定 c 的切片上求解一个构型")
def solve(
    ctx: typer.Context,
    n: Annotated[int, typer.Option("--n", help="铰链数 (>= 6)")],
    mode: Annotated[str, typer.Option("--mode", help="oriented | nonoriented")],
    c: Annotated[float, typer.Option("--c", help="相邻铰链夹角余弦，(-1, 1)")],
    output: Annotated[
        Path | None, typer.Option("--output", "-o", help="构型文件输出路径")
    ] = None,
    restarts: Annotated[
        int | None, typer.Option("--restarts", help="覆盖 SOLVER_NUM_RESTARTS")
    ] = None,
) -> None:
    command = SolveCommand(n=n, mode=mode, c=c, output=output, restarts=restarts)
    run = get_run_context(ctx)
    solver = get_solver_service(run, num_restarts=command.restarts)

    report = solver.solve_slice(command.n, command.mode, command.c)
    # 未收敛时抛 NotConvergedError，退出码 2
    state = report.require_state()

    data = report.summary()
    if command.output is not None:
        path = get_export_service(run).save_state(
            state,
            command.output,
            {**run.provenance(), "residual_norm": report.residual_norm},
        )
        data["output"] = str(path)
    ResponseModel.success(data=data, run_id=run.run_id).echo()
