"""
File: app/domains/solver/schemas.py
Description: 求解器配置与求解报告模型

Author: jinmozhe
Created: 2026-03-03
"""

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, computed_field

from app.core.config import Settings
from app.domains.model.constants import MIN_RING_SIZE
from app.domains.model.schemas import ClosureMode, KaleidocycleState, ReadonlyArray
from app.domains.solver.constants import NotConvergedError


class SolverSettings(BaseModel):
    """Gauss-Newton 投影与多起点重启的参数。"""

    model_config = ConfigDict(frozen=True)

    tol_residual: float = Field(default=1e-12, gt=0)
    max_iters: int = Field(default=200, ge=1)
    num_restarts: int = Field(default=32, ge=1)
    damping: float = Field(default=1.0, gt=0, le=1, description="线搜索初始步长")
    svd_cutoff: float = Field(default=1e-10, gt=0, description="相对 sigma_max 的截断")
    perturb_amplitude: float = Field(default=0.1, ge=0)
    seed: int = 0
    max_workers: int = Field(default=1, ge=1)

    @classmethod
    def from_settings(cls, cfg: Settings, **overrides: Any) -> "SolverSettings":
        values: dict[str, Any] = {
            "tol_residual": cfg.SOLVER_TOL_RESIDUAL,
            "max_iters": cfg.SOLVER_MAX_ITERS,
            "num_restarts": cfg.SOLVER_NUM_RESTARTS,
            "damping": cfg.SOLVER_DAMPING,
            "svd_cutoff": cfg.SOLVER_SVD_CUTOFF,
            "perturb_amplitude": cfg.SOLVER_PERTURB_AMPLITUDE,
            "seed": cfg.SOLVER_SEED,
            "max_workers": cfg.MAX_WORKERS,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class SolveReport(BaseModel):
    """
    一次求解的结果。
    converged 为真当且仅当残差达到容差且构型非退化；失败时保留最小残差供诊断。

    degenerate 为真时 residual_norm 可能已在容差以内，但 converged 仍为假、
    state 为空；status 区分这两种失败。
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    mode: ClosureMode
    c: float
    state: KaleidocycleState | None = None
    residual_norm: float
    iterations: int = Field(..., ge=0)
    restarts_used: int = Field(..., ge=0)
    converged: bool
    degenerate: bool = False
    strategy: str | None = None
    x: ReadonlyArray | None = Field(default=None, exclude=True)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def status(self) -> Literal["converged", "degenerate", "not_converged"]:
        if self.converged:
            return "converged"
        return "degenerate" if self.degenerate else "not_converged"

    def require_state(self) -> KaleidocycleState:
        """收敛时返回构型，否则抛出 NotConvergedError (退出码 2)。"""
        if not self.converged or self.state is None:
            raise NotConvergedError(data=self.summary())
        return self.state

    def summary(self) -> dict[str, Any]:
        return self.model_dump(mode="json", exclude={"state", "x"})


class SolveCommand(BaseModel):
    """`solve` 命令参数，在任何计算之前整体校验。"""

    n: int = Field(..., ge=MIN_RING_SIZE, description="铰链数")
    mode: ClosureMode
    c: float = Field(..., gt=-1.0, lt=1.0)
    output: Path | None = None
    restarts: int | None = Field(default=None, ge=1)
