"""
File: app/services/reporting/router.py
Description: 复现表格命令 (reproduce-table1)

Author: jinmozhe
Created: 2026-03-07
"""

from pathlib import Path
from typing import Annotated

import typer

from app.api.deps import (
    get_energy_params,
    get_export_service,
    get_extremal_service,
    get_run_context,
)
from app.core.response import ResponseModel
from app.services.reporting.reproduce_table1 import Table1Command, reproduce_table1

router = typer.Typer()


@router.command("reproduce-table1", help="计算极值 Kaleidocycle 的关键数值表")
def reproduce(
    ctx: typer.Context,
    rows: Annotated[str, typer.Option("--rows", help="逗号分隔的 n")] = "6,7,8,9,15,38",
    output: Annotated[
        Path, typer.Option("--output", "-o", help="CSV 输出路径")
    ] = Path("table1.csv"),
) -> None:
    command = Table1Command.model_validate({"rows": rows, "output": output})
    run = get_run_context(ctx)

    table = reproduce_table1(
        get_extremal_service(run), command.rows, get_energy_params(run)
    )
    path = get_export_service(run).write_table_csv(table, command.output)
    ResponseModel.success(
        data={"rows": [row.model_dump(mode="json") for row in table], "output": str(path)},
        run_id=run.run_id,
    ).echo()
