"""
File: tests/conftest.py
Description: Pytest 全局 Fixtures

1. 服务实例 (默认参数) 为 session 级别，服务本身无可变状态
2. 常用构型 (c = 0 的 Bricard 六环) 只求解一次
3. 随机闭合多边形等纯数据辅助函数

Author: jinmozhe
Created: 2026-03-08
"""

import numpy as np
import pytest

from app.domains.constraints.service import ConstraintSystem
from app.domains.extremal.schemas import ExtremalSettings
from app.domains.extremal.service import ExtremalService
from app.domains.io_export.service import ExportService
from app.domains.kinematics.schemas import KinematicsSettings
from app.domains.kinematics.service import KinematicsService
from app.domains.model.schemas import ClosureMode, KaleidocycleState
from app.domains.solver.schemas import SolverSettings
from app.domains.solver.service import SolverService

# ------------------------------------------------------------------------------
# 1. 服务
# ------------------------------------------------------------------------------


@pytest.fixture(scope="session")
def solver() -> SolverService:
    return SolverService(SolverSettings())


@pytest.fixture(scope="session")
def extremal(solver: SolverService) -> ExtremalService:
    return ExtremalService(solver, ExtremalSettings())


@pytest.fixture(scope="session")
def kinematics(solver: SolverService) -> KinematicsService:
    return KinematicsService(solver, KinematicsSettings())


@pytest.fixture
def exporter() -> ExportService:
    return ExportService()


# ------------------------------------------------------------------------------
# 2. 构型
# ------------------------------------------------------------------------------


@pytest.fixture(scope="session")
def bricard_state(solver: SolverService) -> KaleidocycleState:
    """n = 6, c = 0 的 nonoriented 解 (Bricard 六杆机构)。"""
    return solver.solve_slice(6, ClosureMode.NONORIENTED, 0.0).require_state()


@pytest.fixture
def alternating_state() -> KaleidocycleState:
    """不经求解器、直接由对称初值组装的 n = 6, c = 0 精确解。"""
    system = ConstraintSystem(6, ClosureMode.NONORIENTED, 0.0)
    return system.assemble(system.symmetric_guess())


# ------------------------------------------------------------------------------
# 3. 纯数据
# ------------------------------------------------------------------------------


def random_polygon(seed: int, n: int = 9) -> np.ndarray:
    """顶点沿扰动圆环分布的空间闭合多边形 (一般位置)。"""
    rng = np.random.default_rng(seed)
    phi = 2 * np.pi * np.arange(n) / n
    ring = np.stack([np.cos(phi), np.sin(phi), np.zeros(n)], axis=1)
    return ring + 0.6 * rng.standard_normal((n, 3))


def reflect_x(points: np.ndarray) -> np.ndarray:
    out = np.array(points, dtype=float)
    out[..., 0] = -out[..., 0]
    return out
