"""
File: tests/unit/test_observables_service.py
Description: 观测量单元测试

1. 能量核函数 (弯曲 / Coulomb / 偶极)
2. 缠绕数与扭转数
3. Gauss 映射面积
4. 构型级汇总
5. 刚体旋转与循环重标号不变性

Author: jinmozhe
Created: 2026-03-09
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.domains.model.schemas import (
    CenterLine,
    ClosureMode,
    KaleidocycleState,
    ObservableSet,
)
from app.domains.model.service import (
    cyclic_shift,
    flip_alternate,
    gamma_from_b,
    rotate_state,
)
from app.domains.observables.constants import (
    CoincidentCentersError,
    DegenerateSegmentError,
    IntegralityViolationError,
    ModeError,
)
from app.domains.observables.schemas import EnergyParams
from app.domains.observables.service import (
    _count_half_twists,
    bend_energy,
    bend_energy_from_segments,
    coulomb_energy_from_points,
    dipole_energy,
    dipole_energy_from_points,
    gauss_area,
    gauss_area_from_segments,
    half_twists,
    kirchhoff_energy,
    observable_set,
    ribbon_twist,
    turning_angles,
    twist,
    writhe,
    writhe_by_projection,
    writhe_from_points,
)
from app.domains.solver.service import SolverService
from app.utils.linalg import random_rotation
from tests.conftest import random_polygon, reflect_x

SQUARE = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]])


def _regular_polygon(n: int) -> np.ndarray:
    phi = 2 * np.pi * np.arange(n) / n
    return np.stack([np.cos(phi), np.sin(phi), np.zeros(n)], axis=1)


# ------------------------------------------------------------------------------
# 1. 能量核函数
# ------------------------------------------------------------------------------


def test_square_turning_angles() -> None:
    assert np.allclose(turning_angles(SQUARE), np.pi / 2)
    assert bend_energy_from_segments(SQUARE) == pytest.approx(np.pi**2)


def test_zero_length_segment_rejected() -> None:
    segments = SQUARE.copy()
    segments[2] = 0.0

    with pytest.raises(DegenerateSegmentError):
        turning_angles(segments)


def test_coulomb_energy_simple_configurations() -> None:
    pair = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    triangle = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, math.sqrt(3) / 2, 0.0]])

    assert coulomb_energy_from_points(pair) == pytest.approx(1.0)
    assert coulomb_energy_from_points(triangle, alpha=2.0) == pytest.approx(3.0)


def test_coincident_centers_rejected() -> None:
    points = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

    with pytest.raises(CoincidentCentersError) as exc_info:
        coulomb_energy_from_points(points)

    assert exc_info.value.exit_code == 2


def test_dipole_pair_energies() -> None:
    points = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    side_by_side = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
    head_to_tail = np.array([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])

    assert dipole_energy_from_points(points, side_by_side) == pytest.approx(1.0)
    assert dipole_energy_from_points(points, head_to_tail) == pytest.approx(-2.0)


def test_dipole_energy_requires_oriented(alternating_state: KaleidocycleState) -> None:
    with pytest.raises(ModeError) as exc_info:
        dipole_energy(alternating_state)

    assert exc_info.value.code == "observables.mode_error"


def test_energy_params_reject_non_finite_alpha() -> None:
    with pytest.raises(ValidationError):
        EnergyParams(alpha=float("inf"))


# ------------------------------------------------------------------------------
# 2. 缠绕数与扭转数
# ------------------------------------------------------------------------------


def test_planar_polygon_has_zero_writhe() -> None:
    assert writhe_from_points(_regular_polygon(9)) == 0.0


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_writhe_is_odd_under_reflection(seed: int) -> None:
    points = random_polygon(seed)

    assert writhe_from_points(reflect_x(points)) == pytest.approx(
        -writhe_from_points(points), abs=1e-12
    )


@pytest.mark.parametrize("seed", [4, 5, 6, 7, 8])
def test_writhe_agrees_with_projection_average(seed: int) -> None:
    points = random_polygon(seed, n=12)

    exact = writhe_from_points(points)
    estimate = writhe_by_projection(points, num_directions=1000, seed=seed)

    assert estimate.num_directions == 1000
    assert abs(exact - estimate.mean) <= 3 * estimate.standard_error


def test_bricard_twist_and_half_twists(alternating_state: KaleidocycleState) -> None:
    """测试：c = 0 时 Tw = n/4，中心线共面 Wr = 0，半扭转数为 3"""
    centerline = gamma_from_b(alternating_state)

    assert twist(alternating_state) == pytest.approx(1.5)
    assert writhe(centerline) == pytest.approx(0.0, abs=1e-12)
    count, defect = half_twists(alternating_state)
    assert count == 3
    assert defect < 1e-9


def test_ribbon_twist_changes_sign_under_reflection(
    alternating_state: KaleidocycleState,
) -> None:
    centerline = gamma_from_b(alternating_state)
    mirrored = CenterLine(
        gamma=reflect_x(centerline.gamma),
        segments=reflect_x(centerline.segments),
        closure_defect=centerline.closure_defect,
    )

    original = ribbon_twist(centerline, alternating_state.b, sign=-1.0)
    reflected = ribbon_twist(mirrored, reflect_x(alternating_state.b), sign=-1.0)

    assert original == pytest.approx(1.5)
    assert reflected == pytest.approx(-original)


def test_integrality_violation_is_fatal() -> None:
    with pytest.raises(IntegralityViolationError):
        _count_half_twists(0.75, 0.0)

    assert _count_half_twists(1.5, 0.0) == (3, 0.0)


# ------------------------------------------------------------------------------
# 3. Gauss 映射
# ------------------------------------------------------------------------------


def test_square_gauss_area_is_hemisphere() -> None:
    result = gauss_area_from_segments(SQUARE, wr=0.0)

    assert result.area == pytest.approx(2 * np.pi)
    assert result.check == pytest.approx(0.0, abs=1e-12)
    assert result.arc_lengths == pytest.approx([np.pi / 2] * 4)


def test_bricard_gauss_area_matches_writhe(alternating_state: KaleidocycleState) -> None:
    centerline = gamma_from_b(alternating_state)

    result = gauss_area(centerline)

    assert 0.0 <= result.area < 4 * np.pi
    assert result.check < 1e-9


# ------------------------------------------------------------------------------
# 4. 构型级汇总
# ------------------------------------------------------------------------------


def test_bricard_bend_energy(alternating_state: KaleidocycleState) -> None:
    """测试：中心线是每边两段的三角形，转角为 0 与 2pi/3 交替"""
    assert bend_energy(alternating_state) == pytest.approx(4 * np.pi**2 / 3)


def test_kirchhoff_energy_adds_torsion(alternating_state: KaleidocycleState) -> None:
    expected = bend_energy(alternating_state) + 6 * (np.pi / 2) ** 2

    assert kirchhoff_energy(alternating_state) == pytest.approx(expected)
    assert kirchhoff_energy(alternating_state, twist_weight=0.0) == pytest.approx(
        bend_energy(alternating_state)
    )


def test_observable_set_for_nonoriented_state(
    alternating_state: KaleidocycleState,
) -> None:
    record = observable_set(alternating_state, EnergyParams(alpha=2.0))

    assert record.e_dipl is None
    assert record.alpha == 2.0
    assert record.tw == pytest.approx(1.5)
    assert record.half_twists == 3
    assert record.e_bend == pytest.approx(bend_energy(alternating_state))
    assert record.e_clmb > 0


def test_observable_set_rejects_forced_dipole(
    alternating_state: KaleidocycleState,
) -> None:
    with pytest.raises(ModeError):
        observable_set(alternating_state, EnergyParams(dipole=True))


# ------------------------------------------------------------------------------
# 5. 不变性
# ------------------------------------------------------------------------------


@pytest.fixture(scope="module", params=[False, True], ids=["nonoriented", "oriented"])
def ring9(request: pytest.FixtureRequest, solver: SolverService) -> KaleidocycleState:
    """n = 9 的内部解；oriented 版本由交替翻转得到。"""
    state = solver.solve_slice(9, ClosureMode.NONORIENTED, 0.3).require_state()
    return flip_alternate(state) if request.param else state


def _assert_same_observables(left: ObservableSet, right: ObservableSet) -> None:
    assert right.e_bend == pytest.approx(left.e_bend, rel=1e-10, abs=1e-10)
    assert right.e_clmb == pytest.approx(left.e_clmb, rel=1e-10, abs=1e-10)
    assert right.tw == pytest.approx(left.tw, abs=1e-10)
    assert right.wr == pytest.approx(left.wr, abs=1e-10)
    assert right.half_twists == left.half_twists
    if left.e_dipl is None:
        assert right.e_dipl is None
    else:
        assert right.e_dipl == pytest.approx(left.e_dipl, rel=1e-10, abs=1e-10)
    # 面积定义在 [0, 4pi) 上，比较时考虑回绕
    gap = abs(right.gauss_area - left.gauss_area) % (4 * math.pi)
    assert min(gap, 4 * math.pi - gap) < 1e-9


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_observables_invariant_under_rotation(
    ring9: KaleidocycleState, seed: int
) -> None:
    rotation = random_rotation(np.random.default_rng(seed))

    _assert_same_observables(
        observable_set(ring9), observable_set(rotate_state(ring9, rotation))
    )


@pytest.mark.parametrize("k", [1, 4, 8])
def test_observables_invariant_under_cyclic_shift(
    ring9: KaleidocycleState, k: int
) -> None:
    shifted = cyclic_shift(ring9, k)

    _assert_same_observables(observable_set(ring9), observable_set(shifted))
