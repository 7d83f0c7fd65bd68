"""
File: tests/unit/test_constraints_service.py
Description: 约束方程组单元测试 (残差 / 解析 Jacobian / 初值)

Author: jinmozhe
Created: 2026-03-08
"""

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.exceptions import AppException
from app.domains.constraints.constants import InitStrategy
from app.domains.constraints.schemas import GaugedVariables, ResidualBlocks
from app.domains.constraints.service import (
    ConstraintSystem,
    initial_guess,
    jacobian,
    residual,
)
from app.domains.model.schemas import ClosureMode

# ------------------------------------------------------------------------------
# Helpers
# ------------------------------------------------------------------------------


def _central_jacobian(system: ConstraintSystem, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    columns = []
    for k in range(x.size):
        step = np.zeros_like(x)
        step[k] = h
        columns.append((system.residual(x + step) - system.residual(x - step)) / (2 * h))
    return np.stack(columns, axis=1)


# ------------------------------------------------------------------------------
# 1. 残差结构
# ------------------------------------------------------------------------------


def test_dimensions() -> None:
    system = ConstraintSystem(9, ClosureMode.ORIENTED, 0.2)

    assert system.num_vars == 21
    assert system.num_rows == 18
    assert system.residual(np.zeros(21)).shape == (18,)
    assert system.jacobian(np.zeros(21)).shape == (18, 21)


def test_symmetric_guess_solves_bricard_slice() -> None:
    """测试：c = 0、n = 6 的对称初值就是精确解"""
    system = ConstraintSystem(6, ClosureMode.NONORIENTED, 0.0)

    r = system.residual(system.symmetric_guess())

    assert np.max(np.abs(r)) < 1e-14


def test_residual_blocks_follow_row_order() -> None:
    n = 7
    system = ConstraintSystem(n, ClosureMode.NONORIENTED, 0.1)
    x = system.initial_guess(InitStrategy.RANDOM, seed=1)
    r = system.residual(x)

    blocks = ResidualBlocks.split(r, n)
    ext = system.extended(x)

    assert blocks.closure.shape == (3,)
    assert blocks.twist.shape == (n - 1,)
    assert blocks.norm.shape == (n - 2,)
    assert blocks.twist[0] == pytest.approx(ext[1] @ ext[2] - 0.1)
    assert blocks.twist[-1] == pytest.approx(ext[n - 1] @ ext[n] - 0.1)
    assert blocks.norm[0] == pytest.approx(ext[2] @ ext[2] - 1.0)


def test_seam_uses_closure_sign() -> None:
    x = np.zeros(3 * 4)
    oriented = ConstraintSystem(6, ClosureMode.ORIENTED, 0.0).extended(x)
    flipped = ConstraintSystem(6, ClosureMode.NONORIENTED, 0.0).extended(x)

    assert np.array_equal(oriented[6], [0.0, 0.0, 1.0])
    assert np.array_equal(flipped[6], [0.0, 0.0, -1.0])


def test_invalid_slice_rejected() -> None:
    with pytest.raises(AppException) as exc_info:
        ConstraintSystem(6, ClosureMode.ORIENTED, 1.0)

    assert exc_info.value.code == "constraints.invalid_slice"


def test_shape_mismatch_rejected() -> None:
    system = ConstraintSystem(6, ClosureMode.ORIENTED, 0.0)

    with pytest.raises(AppException) as exc_info:
        system.residual(np.zeros(5))

    assert exc_info.value.code == "constraints.shape_mismatch"


def test_gauged_variables_validate_length() -> None:
    with pytest.raises(ValidationError):
        GaugedVariables(n=6, c=0.0, x=np.zeros(11))


# ------------------------------------------------------------------------------
# 2. 导数
# ------------------------------------------------------------------------------


@pytest.mark.parametrize("n", [6, 7, 8, 9, 10])
@pytest.mark.parametrize("mode", list(ClosureMode))
def test_jacobian_matches_central_differences(n: int, mode: ClosureMode) -> None:
    rng = np.random.default_rng(n)
    for _ in range(10):
        c = float(rng.uniform(-0.95, 0.95))
        system = ConstraintSystem(n, mode, c)
        x = rng.standard_normal(system.num_vars)

        analytic = system.jacobian(x)
        numeric = _central_jacobian(system, x)

        scale = max(1.0, float(np.max(np.abs(analytic))))
        assert np.max(np.abs(analytic - numeric)) / scale < 1e-6


def test_c_derivative_matches_finite_difference() -> None:
    rng = np.random.default_rng(4)
    n, c, h = 8, 0.3, 1e-6
    system = ConstraintSystem(n, ClosureMode.NONORIENTED, c)
    x = rng.standard_normal(system.num_vars)

    plus = ConstraintSystem(n, ClosureMode.NONORIENTED, c + h).residual(x)
    minus = ConstraintSystem(n, ClosureMode.NONORIENTED, c - h).residual(x)

    assert np.allclose(system.c_derivative(x), (plus - minus) / (2 * h), atol=1e-6)


def test_functional_wrappers_agree_with_system() -> None:
    variables = initial_guess(7, ClosureMode.ORIENTED, -0.2, InitStrategy.RANDOM, seed=3)
    system = ConstraintSystem(7, ClosureMode.ORIENTED, -0.2)

    assert np.array_equal(residual(variables, "oriented"), system.residual(variables.x))
    assert np.array_equal(jacobian(variables, "oriented"), system.jacobian(variables.x))


# ------------------------------------------------------------------------------
# 3. 初值与镜像
# ------------------------------------------------------------------------------


def test_initial_guess_is_deterministic() -> None:
    system = ConstraintSystem(8, ClosureMode.NONORIENTED, 0.4)

    first = system.initial_guess(InitStrategy.PERTURBED, seed=7, restart=3)
    again = system.initial_guess(InitStrategy.PERTURBED, seed=7, restart=3)
    other = system.initial_guess(InitStrategy.PERTURBED, seed=7, restart=4)

    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


def test_random_guess_has_unit_hinges() -> None:
    system = ConstraintSystem(9, ClosureMode.ORIENTED, 0.5)
    x = system.initial_guess(InitStrategy.RANDOM, seed=0)

    assert np.allclose(np.linalg.norm(x.reshape(-1, 3), axis=1), 1.0)


def test_unknown_strategy_rejected() -> None:
    system = ConstraintSystem(6, ClosureMode.ORIENTED, 0.0)

    with pytest.raises(AppException) as exc_info:
        system.initial_guess("zigzag", seed=0)

    assert exc_info.value.code == "constraints.unknown_strategy"


def test_mirror_preserves_residual_norm() -> None:
    rng = np.random.default_rng(8)
    system = ConstraintSystem(7, ClosureMode.NONORIENTED, 0.25)
    x = rng.standard_normal(system.num_vars)

    r = system.residual(x)
    r_mirror = system.residual(system.mirror(x))

    assert np.linalg.norm(r_mirror) == pytest.approx(np.linalg.norm(r))
    assert np.allclose(r_mirror[3:], r[3:])
