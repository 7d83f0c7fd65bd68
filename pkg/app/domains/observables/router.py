"""
File: app/domains/observables/router.py
Description: 观测量领域命令 (observables)

Author: jinmozhe
Created: 2026-03-07
"""

from pathlib import Path
from typing import Annotated

import typer

from app.api.deps import (
    get_energy_params,
    get_export_service,
    get_kinematics_service,
    get_run_context,
)
from app.core.response import ResponseModel
from app.domains.observables.schemas import ObservablesCommand
from app.domains.observables.service import bend_minimality_probe, observable_set

router = typer.Typer()


@router.command("observables", help="计算构型的能量、Tw、Wr、半扭转数与 Gauss 面积")
def observables(
    ctx: typer.Context,
    input_path: Annotated[
        Path,
        typer.Option("--input", "-i", exists=True, dir_okay=False, help="构型文件"),
    ],
    alpha: Annotated[float | None, typer.Option("--alpha", help="Coulomb 指数")] = None,
    dipole: Annotated[
        bool | None,
        typer.Option("--dipole/--no-dipole", help="强制计算 / 跳过偶极能"),
    ] = None,
    bend_probe: Annotated[
        bool, typer.Option("--bend-probe", help="附加弯曲能局部极小性诊断")
    ] = False,
) -> None:
    command = ObservablesCommand(
        input=input_path, alpha=alpha, dipole=dipole, bend_probe=bend_probe
    )
    run = get_run_context(ctx)
    loaded = get_export_service(run).load_state(command.input)

    record = observable_set(
        loaded.state, get_energy_params(run, alpha=command.alpha, dipole=command.dipole)
    )
    data = record.model_dump(mode="json")
    if command.bend_probe:
        probe = bend_minimality_probe(loaded.state, get_kinematics_service(run))
        data["bend_probe"] = probe.model_dump(mode="json")
    if loaded.notes:
        data["notes"] = loaded.notes
    ResponseModel.success(data=data, run_id=run.run_id).echo()
