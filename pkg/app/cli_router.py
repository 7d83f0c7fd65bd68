"""
File: app/cli_router.py
Description: 根命令聚合层

本模块负责：
1. 聚合所有领域的命令 Router (solver, extremal, kinematics, observables, io_export, reporting)
2. 根回调处理全局选项: --config / --profile / --seed / --log-level / --json-logs / --workers
3. 组装本次调用的 Settings 并初始化日志，RunContext 挂到 typer.Context 上

Author: jinmozhe
Created: 2026-03-07
"""

from pathlib import Path
from typing import Annotated

import click
import typer

from app.api.deps import RunContext
from app.core.config import load_settings
from app.core.logging import setup_logging
from app.core.middleware import current_command_line, current_run_id
from app.domains.extremal.router import router as extremal_router
from app.domains.io_export.router import router as io_export_router
from app.domains.kinematics.router import router as kinematics_router
from app.domains.observables.router import router as observables_router
from app.domains.solver.router import router as solver_router
from app.services.reporting.router import router as reporting_router

cli = typer.Typer(
    name="kaleido",
    help="Kaleidocycle 闭环连杆求解与分析工具",
    no_args_is_help=True,
    add_completion=False,
    pretty_exceptions_enable=False,
)


def include_router(parent: typer.Typer, router: typer.Typer) -> None:
    """把领域 Router 的命令平铺注册到根命令上。"""
    parent.registered_commands.extend(router.registered_commands)


@cli.callback()
def root(
    ctx: typer.Context,
    config: Annotated[
        Path | None,
        typer.Option(
            "--config", exists=True, dir_okay=False, help="key=value 配置文件"
        ),
    ] = None,
    profile: Annotated[
        str | None,
        typer.Option(
            "--profile",
            click_type=click.Choice(["default", "quick", "strict"]),
            help="容差档位",
        ),
    ] = None,
    seed: Annotated[int | None, typer.Option("--seed", help="全局随机种子")] = None,
    log_level: Annotated[
        str | None,
        typer.Option(
            "--log-level",
            click_type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]),
            help="日志级别",
        ),
    ] = None,
    json_logs: Annotated[
        bool | None,
        typer.Option("--json-logs/--text-logs", help="stderr 日志格式"),
    ] = None,
    workers: Annotated[
        int | None, typer.Option("--workers", help="并发线程数 (MAX_WORKERS)")
    ] = None,
) -> None:
    # 优先级: 命令行 > 环境变量 > --config > 默认值
    settings = load_settings(
        config,
        PROFILE=profile,
        SOLVER_SEED=seed,
        LOG_LEVEL=log_level,
        LOG_JSON_FORMAT=json_logs,
        MAX_WORKERS=workers,
    )
    setup_logging(settings)
    ctx.obj = RunContext(
        settings=settings,
        run_id=current_run_id(),
        command_line=current_command_line(),
    )


# ------------------------------------------------------------------------------
# 注册领域命令
# ------------------------------------------------------------------------------

# 1. 求解 (solve)
include_router(cli, solver_router)

# 2. 边界搜索 (extreme / scan)
include_router(cli, extremal_router)

# 3. 运动学 (trace / probe)
include_router(cli, kinematics_router)

# 4. 观测量 (observables)
include_router(cli, observables_router)

# 5. 导出 (export)
include_router(cli, io_export_router)

# 6. 复现表格 (reproduce-table1)
include_router(cli, reporting_router)
