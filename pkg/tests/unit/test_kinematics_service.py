"""
File: tests/unit/test_kinematics_service.py
Description: 运动学单元测试 (切空间 / 自由度探测 / 短轨迹)

Author: jinmozhe
Created: 2026-03-09
"""

import numpy as np
import pytest

from app.domains.constraints.service import ConstraintSystem
from app.domains.kinematics.constants import InvalidStartError
from app.domains.kinematics.service import KinematicsService
from app.domains.model.schemas import ClosureMode, KaleidocycleState
from app.domains.model.service import make_state, validate_state
from app.utils.linalg import normalize_rows

# ------------------------------------------------------------------------------
# 1. 切空间
# ------------------------------------------------------------------------------


def test_bricard_tangent_basis_spans_null_space(
    kinematics: KinematicsService, bricard_state: KaleidocycleState
) -> None:
    tangent = kinematics.tangent_basis(bricard_state)
    system = ConstraintSystem(6, ClosureMode.NONORIENTED, 0.0)
    jac = system.jacobian(system.gauge_coordinates(bricard_state))

    assert tangent.nullity >= 1
    assert tangent.basis.shape == (12, tangent.nullity)
    assert np.max(np.abs(jac @ tangent.basis)) < 1e-8
    assert np.allclose(tangent.basis.T @ tangent.basis, np.eye(tangent.nullity))


def test_tangent_threshold_override(
    kinematics: KinematicsService, bricard_state: KaleidocycleState
) -> None:
    """测试：阈值放大到 1 时所有方向都视为零空间"""
    tangent = kinematics.tangent_basis(bricard_state, threshold=1.0 + 1e-9)

    assert tangent.nullity == 12
    assert tangent.threshold == pytest.approx(1.0)


# ------------------------------------------------------------------------------
# 2. 自由度探测
# ------------------------------------------------------------------------------


def test_bricard_has_one_realisable_direction(
    kinematics: KinematicsService, bricard_state: KaleidocycleState
) -> None:
    result = kinematics.probe_local_dof(bricard_state, num_probes=8)

    assert result.dof == 1
    assert result.successes + result.failures == 8
    assert result.tangent_nullity >= 1


# ------------------------------------------------------------------------------
# 3. 轨迹
# ------------------------------------------------------------------------------


def test_short_trace_stays_on_manifold(
    kinematics: KinematicsService, bricard_state: KaleidocycleState
) -> None:
    trace = kinematics.trace_rotation(bricard_state, step=0.02, max_steps=5)

    assert trace.size == 6
    assert not trace.closed
    assert np.all(np.diff(trace.arclength) > 0)
    assert trace.arclength[0] == 0.0
    for state in trace.states:
        assert state.c == 0.0
        assert validate_state(state, 1e-10).valid


def test_trace_is_deterministic(
    kinematics: KinematicsService, bricard_state: KaleidocycleState
) -> None:
    a = kinematics.trace_rotation(bricard_state, step=0.05, max_steps=3)
    b = kinematics.trace_rotation(bricard_state, step=0.05, max_steps=3)

    assert a.arclength == b.arclength
    assert all(np.array_equal(x.b, y.b) for x, y in zip(a.states, b.states, strict=True))


def test_trace_rejects_off_manifold_start(kinematics: KinematicsService) -> None:
    b = normalize_rows(np.random.default_rng(0).standard_normal((6, 3)))
    state = make_state(b, ClosureMode.NONORIENTED, 0.3)

    with pytest.raises(InvalidStartError) as exc_info:
        kinematics.trace_rotation(state, max_steps=2)

    assert exc_info.value.exit_code == 2
