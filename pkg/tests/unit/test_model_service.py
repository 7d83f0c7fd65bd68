"""
File: tests/unit/test_model_service.py
Description: 构型领域单元测试

1. 中心线递推与闭合
2. 退化 / 非法输入
3. 残差汇总与自由度估计
4. 对称变换 (规范对齐 / 隔一翻转 / 镜像 / 循环移位)

Author: jinmozhe
Created: 2026-03-08
"""

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.exceptions import AppException
from app.domains.model.constants import DegenerateError, GaugeUndefinedError
from app.domains.model.schemas import ClosureMode, KaleidocycleState
from app.domains.model.service import (
    centers_from_hinges,
    cyclic_shift,
    flip_alternate,
    gamma_from_b,
    gauge_align,
    is_degenerate,
    make_state,
    mirror_state,
    mobility_estimate,
    rotate_state,
    validate_state,
)
from app.utils.linalg import normalize_rows, random_rotation

# ------------------------------------------------------------------------------
# 1. 中心线
# ------------------------------------------------------------------------------


def test_centerline_closes_for_solution(alternating_state: KaleidocycleState) -> None:
    """测试：解的中心线闭合，段长为 sqrt(1 - c^2)"""
    centerline = gamma_from_b(alternating_state)

    assert centerline.n == 6
    assert centerline.closure_defect < 1e-12
    assert np.allclose(centerline.segment_lengths, 1.0)
    assert np.allclose(centerline.gamma[0], 0.0)


def test_centerline_base_point_shifts_all_centers(
    alternating_state: KaleidocycleState,
) -> None:
    base = np.array([1.0, -2.0, 0.5])
    shifted = gamma_from_b(alternating_state, base=base)
    original = gamma_from_b(alternating_state)

    assert np.allclose(shifted.gamma - original.gamma, base)


def test_both_closure_modes_share_segments() -> None:
    """测试：(-b_0) x (-b_1) = b_0 x b_1，闭合方式不改变边向量"""
    b = normalize_rows(np.random.default_rng(3).standard_normal((7, 3)))
    oriented = centers_from_hinges(b, 1.0)
    flipped = centers_from_hinges(b, -1.0)

    assert np.allclose(oriented.segments[:-1], flipped.segments[:-1])
    assert np.allclose(oriented.segments[-1], -flipped.segments[-1])


def test_parallel_hinges_are_degenerate() -> None:
    b = np.tile([0.0, 0.0, 1.0], (6, 1))

    with pytest.raises(DegenerateError) as exc_info:
        centers_from_hinges(b, 1.0)

    assert exc_info.value.exit_code == 2


def test_too_few_hinges_is_usage_error() -> None:
    with pytest.raises(AppException) as exc_info:
        centers_from_hinges(np.eye(3)[:2], 1.0)

    assert exc_info.value.code == "model.too_few_hinges"
    assert exc_info.value.exit_code == 1


# ------------------------------------------------------------------------------
# 2. 值对象
# ------------------------------------------------------------------------------


def test_state_rejects_wrong_shape() -> None:
    with pytest.raises(ValidationError):
        KaleidocycleState(n=6, mode=ClosureMode.ORIENTED, c=0.0, b=np.eye(3))


def test_state_rejects_non_finite() -> None:
    b = np.eye(3)[[0, 1, 2, 0, 1, 2]].astype(float)
    b[2, 1] = np.nan

    with pytest.raises(ValidationError):
        KaleidocycleState(n=6, mode=ClosureMode.ORIENTED, c=0.0, b=b)


def test_state_array_is_read_only(alternating_state: KaleidocycleState) -> None:
    with pytest.raises(ValueError):
        alternating_state.b[0, 0] = 1.0


def test_extended_applies_closure_sign(alternating_state: KaleidocycleState) -> None:
    ext = alternating_state.extended(extra=2)

    assert ext.shape == (8, 3)
    assert np.array_equal(ext[6], -alternating_state.b[0])
    assert np.array_equal(ext[7], -alternating_state.b[1])


# ------------------------------------------------------------------------------
# 3. 校验与自由度估计
# ------------------------------------------------------------------------------


def test_validate_state_reports_defects(alternating_state: KaleidocycleState) -> None:
    summary = validate_state(alternating_state, tol=1e-12)
    assert summary.valid
    assert summary.max_defect < 1e-12

    b = np.array(alternating_state.b)
    b[3] *= 1.01
    broken = make_state(b, alternating_state.mode, alternating_state.c)
    summary = validate_state(broken, tol=1e-12)

    assert not summary.valid
    assert summary.norm_defect == pytest.approx(1.01**2 - 1.0)


def test_mobility_estimate_for_six_bar_ring() -> None:
    """测试：6 个刚体 6 个转动副的闭环，经典公式给出 0 (过约束)"""
    assert mobility_estimate(6, [1] * 6) == 0
    assert mobility_estimate(7, [1] * 7) == 1


def test_mobility_estimate_rejects_bad_input() -> None:
    with pytest.raises(AppException) as exc_info:
        mobility_estimate(0, [1])

    assert exc_info.value.code == "model.invalid_mobility_input"


def test_alternating_state_is_not_degenerate(
    alternating_state: KaleidocycleState,
) -> None:
    assert not is_degenerate(alternating_state)


# ------------------------------------------------------------------------------
# 4. 对称变换
# ------------------------------------------------------------------------------


def test_gauge_align_pins_first_two_hinges() -> None:
    rng = np.random.default_rng(11)
    b = normalize_rows(rng.standard_normal((8, 3)))

    aligned = gauge_align(b)

    assert np.allclose(aligned[0], [0.0, 0.0, 1.0])
    assert abs(aligned[1, 0]) < 1e-12
    assert aligned[1, 1] > 0
    # 刚性旋转保持内积
    assert np.allclose(aligned @ aligned.T, b @ b.T)


def test_gauge_undefined_for_parallel_pair() -> None:
    b = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0]])

    with pytest.raises(GaugeUndefinedError):
        gauge_align(b)


def test_flip_alternate_on_odd_ring_swaps_mode_and_c() -> None:
    rng = np.random.default_rng(5)
    state = make_state(
        normalize_rows(rng.standard_normal((7, 3))), ClosureMode.NONORIENTED, 0.3
    )

    flipped = flip_alternate(state)
    before = validate_state(state, 1.0)
    after = validate_state(flipped, 1.0)

    assert flipped.mode is ClosureMode.ORIENTED
    assert flipped.c == -0.3
    assert after.twist_defect == pytest.approx(before.twist_defect)
    assert after.closure_defect == pytest.approx(before.closure_defect)


def test_flip_alternate_on_even_ring_keeps_solution(
    alternating_state: KaleidocycleState,
) -> None:
    flipped = flip_alternate(alternating_state)

    assert flipped.mode is alternating_state.mode
    assert validate_state(flipped, 1e-12).valid


def test_symmetries_preserve_solutions(alternating_state: KaleidocycleState) -> None:
    rotation = random_rotation(np.random.default_rng(2))
    images = [
        mirror_state(alternating_state),
        cyclic_shift(alternating_state, 1),
        cyclic_shift(alternating_state, 5),
        rotate_state(alternating_state, rotation),
    ]

    for image in images:
        assert validate_state(image, 1e-12).valid


def test_cyclic_shift_crosses_seam_with_sign(
    alternating_state: KaleidocycleState,
) -> None:
    shifted = cyclic_shift(alternating_state, 1)

    assert np.array_equal(shifted.b[:5], alternating_state.b[1:])
    assert np.array_equal(shifted.b[5], -alternating_state.b[0])
