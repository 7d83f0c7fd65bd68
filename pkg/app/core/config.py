"""
File: app/core/config.py
Description: 全局求解配置管理（使用 pydantic-settings）

所有默认值可通过 .env 文件、环境变量或 --config 指定的 key=value 文件覆盖。
本模块负责：
1. 校验数值型配置（容差、迭代次数、并发度）
2. 按 PROFILE (default / quick / strict) 统一缩放容差与重启次数
3. 运行时强制校验，配置非法时快速失败

Author: jinmozhe
Created: 2025-11-24
Updated: 2026-03-02 (Kaleidocycle solver settings)
"""

from pathlib import Path
from typing import Any, Literal

from pydantic import model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

Profile = Literal["default", "quick", "strict"]


class Settings(BaseSettings):
    """全局配置对象（唯一真实来源）"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_ignore_empty=True,
        extra="ignore",
        case_sensitive=True,
    )

    # --------------------------------------------------------------------------
    # 1. General (通用)
    # --------------------------------------------------------------------------
    PROJECT_NAME: str = "kaleido-solver"
    ENVIRONMENT: Literal["local", "ci", "prod"] = "local"
    DEBUG: bool = False
    PROFILE: Profile = "default"

    # --------------------------------------------------------------------------
    # 2. Solver (Gauss-Newton 投影)
    # --------------------------------------------------------------------------
    SOLVER_TOL_RESIDUAL: float = 1e-12
    SOLVER_MAX_ITERS: int = 200
    SOLVER_NUM_RESTARTS: int = 32
    SOLVER_DAMPING: float = 1.0
    SOLVER_SVD_CUTOFF: float = 1e-10  # 相对 sigma_max 的截断
    SOLVER_PERTURB_AMPLITUDE: float = 0.1
    SOLVER_SEED: int = 0

    # --------------------------------------------------------------------------
    # 3. Extremal (边界搜索)
    # --------------------------------------------------------------------------
    EXTREMAL_TOL_C: float = 1e-6
    EXTREMAL_WITNESS_TOL: float = 1e-11  # 见证构型距边界的二分宽度
    EXTREMAL_SCAN_POINTS: int = 19
    EXTREMAL_MARCH_STEP: float = 0.05
    EXTREMAL_TRIVIAL_LIMIT: float = 0.999
    EXTREMAL_FALLBACK_RESTARTS: int = 4
    EXTREMAL_REFINE: bool = True

    # --------------------------------------------------------------------------
    # 4. Kinematics (切空间 / 探测 / 延拓)
    # --------------------------------------------------------------------------
    TANGENT_THRESHOLD: float = 1e-8
    PROBE_STEP_EPS: float = 1e-4
    PROBE_COUNT: int = 24
    PROBE_RANK_THRESHOLD: float = 0.25
    TRACE_STEP: float = 0.02
    TRACE_MAX_STEPS: int = 2000
    TRACE_CLOSURE_FACTOR: float = 1.5
    TRACE_MIN_STEP_RATIO: float = 1e-8

    # --------------------------------------------------------------------------
    # 5. Observables & Export
    # --------------------------------------------------------------------------
    COULOMB_ALPHA: float = 1.0
    EXPORT_HINGE_HALF_LENGTH: float = 0.5
    EXPORT_MARGIN_WIDTH: float = 0.15
    EXPORT_MM_PER_UNIT: float = 20.0

    # --------------------------------------------------------------------------
    # 6. Concurrency
    # --------------------------------------------------------------------------
    MAX_WORKERS: int = 1

    # --------------------------------------------------------------------------
    # 7. Logging (Loguru)
    # --------------------------------------------------------------------------
    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "INFO"
    LOG_JSON_FORMAT: bool = False  # 是否输出 JSON 格式
    LOG_FILE_ENABLED: bool = False  # 是否启用文件日志
    LOG_DIR: str = "logs"  # 日志文件目录
    LOG_ROTATION: str = "1 day"  # 轮转策略
    LOG_RETENTION: str = "7 days"  # 保留时间
    LOG_COMPRESSION: str = "zip"  # 压缩格式
    LOG_DIAGNOSE: bool = False  # 是否启用诊断信息

    # --------------------------------------------------------------------------
    # Properties (便捷属性)
    # --------------------------------------------------------------------------
    @property
    def is_debug(self) -> bool:
        """是否启用调试模式（生产环境无效）"""
        return self.DEBUG and self.ENVIRONMENT != "prod"

    # --------------------------------------------------------------------------
    # Validators
    # --------------------------------------------------------------------------
    @model_validator(mode="after")
    def _validate_and_apply_profile(self) -> "Settings":
        """校验数值范围，并按 PROFILE 缩放默认值。"""
        # 1. 数值范围校验 (一次性汇总全部问题)
        problems: list[str] = []
        positive_fields = [
            "SOLVER_TOL_RESIDUAL",
            "SOLVER_SVD_CUTOFF",
            "SOLVER_DAMPING",
            "EXTREMAL_TOL_C",
            "EXTREMAL_WITNESS_TOL",
            "EXTREMAL_MARCH_STEP",
            "TANGENT_THRESHOLD",
            "PROBE_STEP_EPS",
            "TRACE_STEP",
            "EXPORT_HINGE_HALF_LENGTH",
            "EXPORT_MM_PER_UNIT",
        ]
        for field in positive_fields:
            if getattr(self, field) <= 0:
                problems.append(f"{field} 必须大于 0")

        at_least_one = [
            "SOLVER_MAX_ITERS",
            "SOLVER_NUM_RESTARTS",
            "PROBE_COUNT",
            "TRACE_MAX_STEPS",
            "MAX_WORKERS",
            "EXTREMAL_SCAN_POINTS",
        ]
        for field in at_least_one:
            if getattr(self, field) < 1:
                problems.append(f"{field} 必须 >= 1")

        if not 0 < self.EXTREMAL_TRIVIAL_LIMIT < 1:
            problems.append("EXTREMAL_TRIVIAL_LIMIT 必须位于 (0, 1)")

        if self.EXPORT_MARGIN_WIDTH < 0:
            problems.append("EXPORT_MARGIN_WIDTH 不能为负")

        if problems:
            raise ValueError("; ".join(problems))

        # 2. Profile 缩放
        if self.PROFILE == "quick":
            # CI 冒烟：放宽容差，减少重启
            self.SOLVER_TOL_RESIDUAL = max(self.SOLVER_TOL_RESIDUAL, 1e-10)
            self.SOLVER_NUM_RESTARTS = min(self.SOLVER_NUM_RESTARTS, 8)
            self.EXTREMAL_SCAN_POINTS = min(self.EXTREMAL_SCAN_POINTS, 9)
            self.EXTREMAL_FALLBACK_RESTARTS = min(self.EXTREMAL_FALLBACK_RESTARTS, 2)
            self.PROBE_COUNT = min(self.PROBE_COUNT, 12)
        elif self.PROFILE == "strict":
            # 复现实验：收紧边界容差，加倍重启
            self.SOLVER_NUM_RESTARTS = self.SOLVER_NUM_RESTARTS * 2
            self.EXTREMAL_TOL_C = min(self.EXTREMAL_TOL_C, 1e-8)
            self.PROBE_COUNT = max(self.PROBE_COUNT, 48)

        return self


def load_settings(
    config_file: Path | None = None, **overrides: Any
) -> Settings:
    """
    组装一次运行的配置。
    优先级：显式覆盖项 > 环境变量 > --config 文件 (替代 .env) > 默认值。
    值为 None 的覆盖项被忽略。
    """
    values = {key: value for key, value in overrides.items() if value is not None}
    if config_file is not None:
        return Settings(_env_file=config_file, **values)  # type: ignore[call-arg]
    return Settings(**values)


# 单例配置对象
# 配置加载失败时，Pydantic 会抛出 ValidationError，包含详细错误信息
settings = Settings()
