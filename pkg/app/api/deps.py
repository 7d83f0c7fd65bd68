"""
File: app/api/deps.py
Description: 命令级依赖组装

本模块负责：
1. RunContext: 一次命令调用的配置与溯源信息，挂在 typer.Context.obj 上
2. 各领域服务的工厂函数 (get_solver_service / get_extremal_service / ...)

依赖链：
Settings → SolverSettings → SolverService → ExtremalService / KinematicsService

Router 层只通过这里取服务，不直接读取全局 settings。

Author: jinmozhe
Created: 2026-03-07
"""

from dataclasses import dataclass
from typing import Any

import typer

from app.core.config import Settings
from app.domains.extremal.schemas import ExtremalSettings
from app.domains.extremal.service import ExtremalService
from app.domains.io_export.schemas import ExportSettings
from app.domains.io_export.service import ExportService
from app.domains.kinematics.schemas import KinematicsSettings
from app.domains.kinematics.service import KinematicsService
from app.domains.observables.schemas import EnergyParams
from app.domains.solver.schemas import SolverSettings
from app.domains.solver.service import SolverService


@dataclass(frozen=True)
class RunContext:
    settings: Settings
    run_id: str | None
    command_line: str

    def provenance(self) -> dict[str, Any]:
        """写入产物文件的求解参数 (不含 run_id)。"""
        cfg = self.settings
        return {
            "profile": cfg.PROFILE,
            "seed": cfg.SOLVER_SEED,
            "tol_residual": cfg.SOLVER_TOL_RESIDUAL,
            "num_restarts": cfg.SOLVER_NUM_RESTARTS,
            "tol_c": cfg.EXTREMAL_TOL_C,
        }


def get_run_context(ctx: typer.Context) -> RunContext:
    run = ctx.find_object(RunContext)
    if run is None:
        raise RuntimeError("RunContext 未初始化，根回调未执行")
    return run


# ------------------------------------------------------------------------------
# Service factories
# ------------------------------------------------------------------------------


def get_solver_service(run: RunContext, **overrides: Any) -> SolverService:
    return SolverService(SolverSettings.from_settings(run.settings, **overrides))


def get_extremal_service(run: RunContext, **overrides: Any) -> ExtremalService:
    return ExtremalService(
        get_solver_service(run),
        ExtremalSettings.from_settings(run.settings, **overrides),
    )


def get_kinematics_service(run: RunContext, **overrides: Any) -> KinematicsService:
    return KinematicsService(
        get_solver_service(run),
        KinematicsSettings.from_settings(run.settings, **overrides),
    )


def get_export_service(run: RunContext, **overrides: Any) -> ExportService:
    return ExportService(ExportSettings.from_settings(run.settings, **overrides))


def get_energy_params(
    run: RunContext, alpha: float | None = None, dipole: bool | None = None
) -> EnergyParams:
    return EnergyParams(
        alpha=run.settings.COULOMB_ALPHA if alpha is None else alpha, dipole=dipole
    )
