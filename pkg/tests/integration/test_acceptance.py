"""
File: tests/integration/test_acceptance.py
Description: 端到端验收 (极值参数、能量、半扭转数、自由度、可行性结构、对偶)

全部标记为 slow：pytest -m "not slow" 可跳过。
极值结果按 (n, mode, side) 在模块内缓存，多个用例共享。

Author: jinmozhe
Created: 2026-03-10
"""

from collections.abc import Callable

import numpy as np
import pytest

from app.domains.constraints.service import ConstraintSystem
from app.domains.extremal.constants import Side
from app.domains.extremal.schemas import ExtremalResult
from app.domains.extremal.service import ExtremalService
from app.domains.kinematics.schemas import MotionTrace
from app.domains.kinematics.service import KinematicsService
from app.domains.model.schemas import ClosureMode, KaleidocycleState
from app.domains.model.service import gamma_from_b, mobility_estimate
from app.domains.observables.constants import ModeError
from app.domains.observables.service import (
    bend_energy,
    dipole_energy,
    gauss_area,
    half_twists,
    kirchhoff_energy,
    observable_set,
    observe_trace,
    turning_angles,
    twist,
    writhe,
)
from app.domains.solver.service import SolverService
from app.services.reporting.reproduce_table1 import VARIES, reproduce_table1
from app.utils.linalg import relative_spread

pytestmark = pytest.mark.slow

# n -> (c_n, Tw, E_bend, E_dipl)
TABLE = {
    7: (0.2954, 1.416, 11.9, -4.23),
    8: (0.4700, 1.377, 10.4, None),
    9: (0.5852, 1.355, 9.24, -10.0),
    15: (0.8533, 1.309, 5.60, -83.7),
    38: (0.9773, 1.291, 2.23, None),
}

ExtremeLookup = Callable[[int, ClosureMode, Side], ExtremalResult]
TraceLookup = Callable[..., MotionTrace]

# 步长取小，保证 500 步内不会绕回起点
TRACE_STEP = 0.005
TRACE_STATES = 600


@pytest.fixture(scope="module")
def extreme(extremal: ExtremalService) -> ExtremeLookup:
    cache: dict[tuple[int, ClosureMode, Side], ExtremalResult] = {}

    def lookup(
        n: int, mode: ClosureMode = ClosureMode.NONORIENTED, side: Side = Side.UPPER
    ) -> ExtremalResult:
        key = (n, mode, side)
        if key not in cache:
            cache[key] = extremal.find_extreme_c(n, mode, side)
        return cache[key]

    return lookup


# ------------------------------------------------------------------------------
# 1. 极值参数与关键数值
# ------------------------------------------------------------------------------


@pytest.mark.parametrize("n", sorted(TABLE))
def test_extreme_parameter(extreme: ExtremeLookup, n: int) -> None:
    result = extreme(n, ClosureMode.NONORIENTED, Side.UPPER)
    tolerance = 1e-3 if n == 38 else 5e-4

    assert result.c_n == pytest.approx(TABLE[n][0], abs=tolerance)
    lo, hi = sorted(result.bracket)
    assert lo <= result.c_n <= hi
    assert result.witness.c == result.c_n


def test_bricard_twist(bricard_state: KaleidocycleState) -> None:
    assert twist(bricard_state) == pytest.approx(1.5, abs=1e-3)


@pytest.mark.parametrize("n", sorted(TABLE))
def test_twist_at_extreme(extreme: ExtremeLookup, n: int) -> None:
    witness = extreme(n, ClosureMode.NONORIENTED, Side.UPPER).witness

    assert twist(witness) == pytest.approx(TABLE[n][1], abs=1e-3)


@pytest.mark.parametrize("n", sorted(TABLE))
def test_bend_energy_at_extreme(extreme: ExtremeLookup, n: int) -> None:
    witness = extreme(n, ClosureMode.NONORIENTED, Side.UPPER).witness

    assert bend_energy(witness) == pytest.approx(TABLE[n][2], rel=1e-2)
    arcs = turning_angles(gamma_from_b(witness).segments)
    assert bend_energy(witness) == pytest.approx(float(np.sum(arcs**2)), abs=1e-10)


@pytest.mark.parametrize("n", [7, 9, 15])
def test_dipole_energy_at_oriented_extreme(extreme: ExtremeLookup, n: int) -> None:
    result = extreme(n, ClosureMode.NONORIENTED, Side.UPPER)
    oriented = ExtremalService.dual(result).witness

    assert oriented.mode is ClosureMode.ORIENTED
    assert dipole_energy(oriented) == pytest.approx(TABLE[n][3], rel=1.5e-2)
    with pytest.raises(ModeError):
        dipole_energy(result.witness)


# ------------------------------------------------------------------------------
# 2. 半扭转数与带状不变量
# ------------------------------------------------------------------------------


@pytest.mark.parametrize("n", [7, 8, 9])
def test_half_twists_at_both_extremes(extreme: ExtremeLookup, n: int) -> None:
    upper = extreme(n, ClosureMode.NONORIENTED, Side.UPPER).witness
    lower = ExtremalService.dual(extreme(n, ClosureMode.NONORIENTED, Side.UPPER)).witness

    count_upper, defect_upper = half_twists(upper)
    count_lower, defect_lower = half_twists(lower)

    assert count_upper == 3
    assert count_lower == n - 3
    assert defect_upper <= 1e-6
    assert defect_lower <= 1e-6

    for state in (upper, lower):
        centerline = gamma_from_b(state)
        assert gauss_area(centerline, writhe(centerline)).check <= 1e-6


def test_nine_ring_extreme_writhe(extreme: ExtremeLookup) -> None:
    """测试：半扭转数为 3 且 Tw = 1.355，故 Wr = 1.5 - 1.355"""
    witness = extreme(9, ClosureMode.NONORIENTED, Side.UPPER).witness

    assert writhe(gamma_from_b(witness)) == pytest.approx(0.145, abs=2e-3)


def test_half_twists_constant_along_extreme_trace(
    extreme: ExtremeLookup, kinematics: KinematicsService
) -> None:
    witness = extreme(7, ClosureMode.NONORIENTED, Side.UPPER).witness

    trace = observe_trace(kinematics.trace_rotation(witness, max_steps=50))

    assert {record.half_twists for record in trace.observables} == {3}
    assert max(record.half_twist_defect for record in trace.observables) <= 1e-6


# ------------------------------------------------------------------------------
# 3. 能量与扭转数沿极值运动守恒
# ------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def extreme_trace(
    extreme: ExtremeLookup, kinematics: KinematicsService
) -> TraceLookup:
    cache: dict[tuple[int, bool], MotionTrace] = {}

    def lookup(n: int, oriented: bool = False) -> MotionTrace:
        key = (n, oriented)
        if key not in cache:
            result = extreme(n, ClosureMode.NONORIENTED, Side.UPPER)
            if oriented:
                result = ExtremalService.dual(result)
            trace = kinematics.trace_rotation(
                result.witness, step=TRACE_STEP, max_steps=TRACE_STATES
            )
            cache[key] = observe_trace(trace)
        return cache[key]

    return lookup


@pytest.mark.parametrize("n", [7, 9])
def test_energies_constant_along_extreme_trace(
    extreme_trace: TraceLookup, n: int
) -> None:
    trace = extreme_trace(n)

    assert trace.size >= 500
    records = trace.observables
    assert relative_spread([r.e_bend for r in records]) <= 1e-3
    assert relative_spread([r.e_clmb for r in records]) <= 1e-3


@pytest.mark.parametrize("n", [7, 9])
def test_dipole_energy_constant_along_oriented_trace(
    extreme_trace: TraceLookup, n: int
) -> None:
    trace = extreme_trace(n, oriented=True)

    assert trace.size >= 500
    assert trace.states[0].mode is ClosureMode.ORIENTED
    dipole = [r.e_dipl for r in trace.observables]
    assert None not in dipole
    assert relative_spread(dipole) <= 1e-3


def test_twist_and_kirchhoff_energy_constant_along_nine_ring_trace(
    extreme_trace: TraceLookup,
) -> None:
    trace = extreme_trace(9)

    twists = [twist(state) for state in trace.states]
    assert np.ptp(twists) <= 1e-9
    assert relative_spread([kirchhoff_energy(state) for state in trace.states]) <= 1e-3
    writhes = [record.wr for record in trace.observables]
    assert np.ptp(writhes) <= 1e-6


# ------------------------------------------------------------------------------
# 4. 自由度
# ------------------------------------------------------------------------------


def test_bricard_is_mobile_despite_mobility_formula(
    kinematics: KinematicsService, bricard_state: KaleidocycleState
) -> None:
    assert mobility_estimate(6, [1] * 6) == 0
    assert kinematics.probe_local_dof(bricard_state).dof == 1


def test_bricard_trace_closes(
    kinematics: KinematicsService, bricard_state: KaleidocycleState
) -> None:
    trace = kinematics.trace_rotation(bricard_state, max_steps=10_000)

    assert trace.closed
    start = bricard_state.b
    assert np.max(np.abs(trace.states[-1].b - start)) < 0.1


def test_interior_nine_ring_has_three_dof(
    solver: SolverService, kinematics: KinematicsService
) -> None:
    state = solver.solve_slice(9, ClosureMode.NONORIENTED, 0.3).require_state()

    assert kinematics.tangent_basis(state).nullity == 3
    assert kinematics.probe_local_dof(state).dof == 3


def test_jacobian_rank_deficient_at_seven_ring_extreme(extreme: ExtremeLookup) -> None:
    witness = extreme(7, ClosureMode.NONORIENTED, Side.UPPER).witness
    system = ConstraintSystem(7, ClosureMode.NONORIENTED, witness.c)

    sigma = np.linalg.svd(
        system.jacobian(system.gauge_coordinates(witness)), compute_uv=False
    )

    assert sigma[-1] < 1e-6 * sigma[0]


def test_extreme_nine_ring_has_one_dof(
    extreme: ExtremeLookup, kinematics: KinematicsService
) -> None:
    witness = extreme(9, ClosureMode.NONORIENTED, Side.UPPER).witness

    assert kinematics.probe_local_dof(witness).dof == 1


# ------------------------------------------------------------------------------
# 5. 可行性结构
# ------------------------------------------------------------------------------


def test_six_ring_feasible_only_at_zero(extremal: ExtremalService) -> None:
    grid = np.round(np.arange(-0.5, 0.5001, 0.05), 10).tolist()

    profile = extremal.scan_feasibility(6, ClosureMode.NONORIENTED, grid)

    assert profile.feasible_values == [0.0]


def test_seven_ring_nonoriented_range(extremal: ExtremalService) -> None:
    profile = extremal.scan_feasibility(
        7, ClosureMode.NONORIENTED, [-0.9, -0.5, 0.0, 0.25, 0.35, 0.5, 0.9]
    )

    assert profile.feasible_values == [-0.9, -0.5, 0.0, 0.25]
    assert profile.infeasible_values == [0.35, 0.5, 0.9]


def test_eight_ring_oriented_range(extremal: ExtremalService) -> None:
    profile = extremal.scan_feasibility(8, ClosureMode.ORIENTED, [-0.9, 0.0, 0.9])

    assert profile.feasible_values == [-0.9, 0.0, 0.9]


# ------------------------------------------------------------------------------
# 6. 对偶
# ------------------------------------------------------------------------------


@pytest.mark.parametrize("n", [7, 9])
def test_oriented_lower_extreme_is_dual(extreme: ExtremeLookup, n: int) -> None:
    upper = extreme(n, ClosureMode.NONORIENTED, Side.UPPER)
    lower = extreme(n, ClosureMode.ORIENTED, Side.LOWER)

    assert abs(lower.c_n) == pytest.approx(upper.c_n, abs=2e-6)
    assert lower.c_n < 0


# ------------------------------------------------------------------------------
# 7. 表格复现
# ------------------------------------------------------------------------------


def test_reproduce_table_rows(
    extremal: ExtremalService, extreme: ExtremeLookup
) -> None:
    rows = reproduce_table1(extremal, rows=(6, 7))

    assert [row.n for row in rows] == [6, 7]
    bricard, seven = rows
    assert bricard.e_bend == VARIES
    assert bricard.e_dipl is None
    assert bricard.half_twists == 3
    assert seven.c_n == pytest.approx(0.2954, abs=5e-4)
    assert seven.e_dipl == pytest.approx(-4.23, rel=1.5e-2)
    witness = extreme(7, ClosureMode.NONORIENTED, Side.UPPER).witness
    assert observable_set(witness).half_twists == seven.half_twists == 3
