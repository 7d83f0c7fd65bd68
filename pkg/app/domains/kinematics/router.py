"""
File: app/domains/kinematics/router.py
Description: 运动学领域命令 (trace / probe)

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
from app.domains.kinematics.schemas import ProbeCommand, TraceCommand
from app.domains.observables.service import observe_trace

router = typer.Typer()

InputPath = Annotated[
    Path,
    typer.Option("--input", "-i", exists=True, dir_okay=False, help="构型文件"),
]


@router.command("trace", help="沿旋转运动追踪构型并导出观测量 CSV")
def trace(
    ctx: typer.Context,
    input_path: InputPath,
    output: Annotated[Path, typer.Option("--output", "-o", help="CSV 输出路径")],
    steps: Annotated[int | None, typer.Option("--steps", help="最大步数")] = None,
    step: Annotated[float | None, typer.Option("--step", help="名义弧长步长")] = None,
    states_dir: Annotated[
        Path | None, typer.Option("--states-dir", help="逐步构型文件目录")
    ] = None,
    alpha: Annotated[float | None, typer.Option("--alpha", help="Coulomb 指数")] = None,
) -> None:
    command = TraceCommand(
        input=input_path,
        output=output,
        steps=steps,
        step=step,
        states_dir=states_dir,
        alpha=alpha,
    )
    run = get_run_context(ctx)
    exporter = get_export_service(run)
    loaded = exporter.load_state(command.input)

    motion = get_kinematics_service(run).trace_rotation(
        loaded.state, step=command.step, max_steps=command.steps
    )
    motion = observe_trace(motion, get_energy_params(run, alpha=command.alpha))

    data = motion.summary()
    data["output"] = str(exporter.export_trace_csv(motion, command.output))
    if command.states_dir is not None:
        paths = exporter.save_trace_states(motion, command.states_dir, run.provenance())
        data["states_written"] = len(paths)
    ResponseModel.success(data=data, run_id=run.run_id).echo()


@router.command("probe", help="估计构型处的局部真实自由度")
def probe(
    ctx: typer.Context,
    input_path: InputPath,
    probes: Annotated[int | None, typer.Option("--probes", help="探测次数")] = None,
    eps: Annotated[float | None, typer.Option("--eps", help="探测步长")] = None,
) -> None:
    command = ProbeCommand(input=input_path, probes=probes, eps=eps)
    run = get_run_context(ctx)
    loaded = get_export_service(run).load_state(command.input)

    result = get_kinematics_service(run).probe_local_dof(
        loaded.state, num_probes=command.probes, step_eps=command.eps
    )
    ResponseModel.success(data=result, run_id=run.run_id).echo()
