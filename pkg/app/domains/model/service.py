"""
File: app/domains/model/service.py
Description: 构型领域服务 (纯函数)

本模块封装构型的派生几何与对称变换：
1. gamma_from_b: 叉乘递推求铰链中心
2. mobility_estimate: 经典机构自由度公式 M = 6(N - 1 - n) + sum f_i
3. validate_state: 三项残差汇总
4. 对称变换: gauge_align / flip_alternate / mirror_state / cyclic_shift

Author: jinmozhe
Created: 2026-03-02
"""

from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.spatial.distance import pdist

from app.core.exceptions import AppException
from app.domains.model.constants import (
    COINCIDENT_CENTER_RATIO,
    DEGENERATE_SEGMENT_TOL,
    DegenerateError,
    GaugeUndefinedError,
    ModelErrorCode,
)
from app.domains.model.schemas import (
    CenterLine,
    ClosureMode,
    KaleidocycleState,
    ValidationSummary,
)

# ------------------------------------------------------------------------------
# 1. 派生几何
# ------------------------------------------------------------------------------


def centers_from_hinges(
    b: ArrayLike, sign: float, base: ArrayLike | None = None
) -> CenterLine:
    """
    由铰链方向递推中心线: gamma_{i+1} = gamma_i + b_i x b_{i+1}。
    接缝处 b_n = sign * b_0；由于 (-b_0) x (-b_1) = b_0 x b_1，两种闭合方式的边向量一致。
    """
    hinges = np.asarray(b, dtype=float)
    n = hinges.shape[0]
    if n < 3:
        raise AppException(ModelErrorCode.TOO_FEW_HINGES, data={"n": n})

    nxt = np.roll(hinges, -1, axis=0)
    nxt[-1] = sign * hinges[0]
    segments = np.cross(hinges, nxt)

    lengths = np.linalg.norm(segments, axis=1)
    if np.any(lengths < DEGENERATE_SEGMENT_TOL):
        raise DegenerateError(
            data={"segment": int(np.argmin(lengths)), "length": float(lengths.min())},
        )

    origin = np.zeros(3) if base is None else np.asarray(base, dtype=float)
    gamma = np.empty((n, 3))
    gamma[0] = origin
    gamma[1:] = origin + np.cumsum(segments[:-1], axis=0)

    return CenterLine(
        gamma=gamma,
        segments=segments,
        closure_defect=float(np.linalg.norm(segments.sum(axis=0))),
    )


def gamma_from_b(
    state: KaleidocycleState, base: ArrayLike | None = None
) -> CenterLine:
    """构型的中心线，gamma_0 默认取原点。"""
    return centers_from_hinges(state.b, state.mode.sign, base)


def min_center_separation(centerline: CenterLine) -> float:
    """两两中心最小距离。"""
    return float(pdist(centerline.gamma).min())


def is_degenerate(state: KaleidocycleState) -> bool:
    """
    退化判定：相邻铰链平行，或存在重合的铰链中心 (折返构型)。
    折返构型同样满足方程组，但不对应真实的四面体环。
    """
    try:
        centerline = gamma_from_b(state)
    except DegenerateError:
        return True
    scale = max(state.segment_length, DEGENERATE_SEGMENT_TOL)
    return min_center_separation(centerline) < COINCIDENT_CENTER_RATIO * scale


def mobility_estimate(num_bodies: int, joint_dofs: Sequence[int]) -> int:
    """经典自由度估计 M = 6(N - 1 - n) + sum f_i，n 为关节数。"""
    if num_bodies < 1 or any(f < 1 for f in joint_dofs):
        raise AppException(
            ModelErrorCode.INVALID_MOBILITY_INPUT,
            data={"num_bodies": num_bodies, "joint_dofs": list(joint_dofs)},
        )
    return 6 * (num_bodies - 1 - len(joint_dofs)) + sum(joint_dofs)


def validate_state(state: KaleidocycleState, tol: float) -> ValidationSummary:
    """
    汇总三项残差；三项均不超过 tol 时视为有效。
    本函数从不抛出异常。
    """
    ext = state.extended()
    norm_defect = float(np.max(np.abs(np.einsum("ij,ij->i", state.b, state.b) - 1.0)))
    dots = np.einsum("ij,ij->i", ext[:-1], ext[1:])
    twist_defect = float(np.max(np.abs(dots - state.c)))
    closure = np.cross(ext[:-1], ext[1:]).sum(axis=0)
    closure_defect = float(np.linalg.norm(closure))

    return ValidationSummary(
        norm_defect=norm_defect,
        twist_defect=twist_defect,
        closure_defect=closure_defect,
        tol=tol,
        valid=max(norm_defect, twist_defect, closure_defect) <= tol,
    )


# ------------------------------------------------------------------------------
# 2. 对称变换
# ------------------------------------------------------------------------------


def gauge_rotation(b0: ArrayLike, b1: ArrayLike) -> np.ndarray:
    """
    求旋转矩阵 R，使 R b_0 = (0, 0, |b_0|)，R b_1 落在 y >= 0 的 (y, z) 半平面。
    """
    z_axis = np.asarray(b0, dtype=float)
    z_norm = np.linalg.norm(z_axis)
    if z_norm == 0.0:
        raise GaugeUndefinedError()
    z_axis = z_axis / z_norm

    second = np.asarray(b1, dtype=float)
    y_axis = second - (second @ z_axis) * z_axis
    y_norm = np.linalg.norm(y_axis)
    if y_norm < DEGENERATE_SEGMENT_TOL:
        raise GaugeUndefinedError()
    y_axis = y_axis / y_norm
    x_axis = np.cross(y_axis, z_axis)
    return np.vstack([x_axis, y_axis, z_axis])


def gauge_align(b: ArrayLike) -> np.ndarray:
    """对整组铰链施加规范旋转。"""
    hinges = np.asarray(b, dtype=float)
    rotation = gauge_rotation(hinges[0], hinges[1])
    return hinges @ rotation.T


def align_state(state: KaleidocycleState) -> KaleidocycleState:
    return state.model_copy(update={"b": _frozen(gauge_align(state.b))})


def flip_alternate(state: KaleidocycleState) -> KaleidocycleState:
    """
    隔一个翻转铰链: b_i -> (-1)^i b_i，c -> -c。
    奇数 n 时闭合方式互换，偶数 n 时保持；结果重新对齐规范。
    """
    signs = np.where(np.arange(state.n) % 2 == 0, 1.0, -1.0)
    flipped = state.b * signs[:, None]
    mode = state.mode.flipped if state.n % 2 == 1 else state.mode
    return KaleidocycleState(
        n=state.n, mode=mode, c=-state.c, b=gauge_align(flipped)
    )


def mirror_state(state: KaleidocycleState) -> KaleidocycleState:
    """关于 b_0, b_1 张成平面的镜像；在规范坐标下即 x -> -x。"""
    normal = np.cross(state.b[0], state.b[1])
    normal_len = np.linalg.norm(normal)
    if normal_len < DEGENERATE_SEGMENT_TOL:
        raise GaugeUndefinedError()
    normal = normal / normal_len
    reflected = state.b - 2.0 * np.outer(state.b @ normal, normal)
    return state.model_copy(update={"b": _frozen(reflected)})


def cyclic_shift(state: KaleidocycleState, k: int) -> KaleidocycleState:
    """循环重标号 i -> i + k；越过接缝的铰链乘以闭合符号。"""
    shift = k % state.n
    ext = state.extended(extra=shift)
    return state.model_copy(update={"b": _frozen(ext[shift : shift + state.n])})


def rotate_state(state: KaleidocycleState, rotation: ArrayLike) -> KaleidocycleState:
    """整体刚性旋转。"""
    rot = np.asarray(rotation, dtype=float)
    return state.model_copy(update={"b": _frozen(state.b @ rot.T)})


def _frozen(arr: np.ndarray) -> np.ndarray:
    # model_copy 跳过校验，这里手动设为只读
    out = np.array(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


def make_state(
    b: ArrayLike, mode: ClosureMode | str, c: float
) -> KaleidocycleState:
    """便捷构造函数。"""
    hinges = np.asarray(b, dtype=float)
    return KaleidocycleState(n=hinges.shape[0], mode=ClosureMode(mode), c=c, b=hinges)
