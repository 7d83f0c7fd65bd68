"""
File: app/domains/observables/service.py
Description: 能量与离散带状不变量

本模块分两层：
1. 点/线段核函数 (*_from_points / *_from_segments)，与构型无关，便于单独测试
2. 构型级入口: bend_energy / coulomb_energy / dipole_energy / twist / writhe /
   half_twists / gauss_area / kirchhoff_energy / observable_set

缠绕数采用逐线段对的精确立体角公式 (Klenin-Langowski)，
并提供投影计数的 Monte-Carlo 估计作为独立校验。

Author: jinmozhe
Created: 2026-03-05
"""

import math

import numpy as np
from numpy.typing import ArrayLike
from scipy.spatial.distance import pdist

from app.core.logging import logger
from app.domains.constraints.service import ConstraintSystem
from app.domains.kinematics.schemas import MotionTrace
from app.domains.kinematics.service import KinematicsService
from app.domains.model.schemas import (
    CenterLine,
    ClosureMode,
    KaleidocycleState,
    ObservableSet,
)
from app.domains.model.service import gamma_from_b
from app.domains.observables.constants import (
    COINCIDENT_TOL,
    COPLANAR_TOL,
    DUPLICATE_TANGENT_TOL,
    INTEGRALITY_FATAL,
    NEAR_INTERSECTION_TOL,
    SEGMENT_TOL,
    TWIST_AGREEMENT_TOL,
    AntipodalTangentsError,
    CoincidentCentersError,
    DegenerateSegmentError,
    IllConditionedError,
    IntegralityViolationError,
    ModeError,
)
from app.domains.observables.schemas import (
    BendProbeResult,
    EnergyParams,
    GaussArea,
    WritheEstimate,
)
from app.utils.linalg import normalize_rows, safe_arccos, safe_arcsin

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi

# ------------------------------------------------------------------------------
# 1. 核函数
# ------------------------------------------------------------------------------


def _unit_segments(segments: ArrayLike) -> np.ndarray:
    seg = np.asarray(segments, dtype=float)
    lengths = np.linalg.norm(seg, axis=1)
    if np.any(lengths < SEGMENT_TOL):
        raise DegenerateSegmentError(data={"segment": int(np.argmin(lengths))})
    return seg / lengths[:, None]


def turning_angles(segments: ArrayLike) -> np.ndarray:
    """相邻边 e_{i-1}, e_i 的夹角 (循环)，也是 Gauss 映射相邻点间的测地弧长。"""
    unit = _unit_segments(segments)
    prev = np.roll(unit, 1, axis=0)
    # atan2 形式在夹角接近 0 时比 arccos 精确
    return np.arctan2(
        np.linalg.norm(np.cross(prev, unit), axis=1), np.einsum("ij,ij->i", prev, unit)
    )


def bend_energy_from_segments(segments: ArrayLike) -> float:
    return float(np.sum(turning_angles(segments) ** 2))


def coulomb_energy_from_points(points: ArrayLike, alpha: float = 1.0) -> float:
    distances = pdist(np.asarray(points, dtype=float))
    if distances.size and distances.min() < COINCIDENT_TOL:
        raise CoincidentCentersError(data={"min_distance": float(distances.min())})
    return float(np.sum(distances ** (-alpha)))


def dipole_energy_from_points(points: ArrayLike, dipoles: ArrayLike) -> float:
    """sum_{i<j} b_i.b_j / r^3 - 3 (b_i.d)(b_j.d) / r^5，d = gamma_i - gamma_j。"""
    pts = np.asarray(points, dtype=float)
    dip = np.asarray(dipoles, dtype=float)
    i, j = np.triu_indices(pts.shape[0], k=1)
    d = pts[i] - pts[j]
    r = np.linalg.norm(d, axis=1)
    if r.size and r.min() < COINCIDENT_TOL:
        raise CoincidentCentersError(data={"min_distance": float(r.min())})
    bb = np.einsum("ij,ij->i", dip[i], dip[j])
    bid = np.einsum("ij,ij->i", dip[i], d)
    bjd = np.einsum("ij,ij->i", dip[j], d)
    return float(np.sum(bb / r**3 - 3.0 * bid * bjd / r**5))


def _nonadjacent_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """i > j 且两段不共端点的线段对。"""
    ii, jj = np.tril_indices(n, k=-2)
    keep = ~((jj == 0) & (ii == n - 1))
    return ii[keep], jj[keep]


def _segment_distance(
    p: np.ndarray, a: np.ndarray, q: np.ndarray, b: np.ndarray
) -> float:
    """线段 p + s a 与 q + t b (s, t in [0, 1]) 的最近距离。"""
    samples = np.linspace(0.0, 1.0, 33)
    first = p + samples[:, None] * a
    second = q + samples[:, None] * b
    return float(np.min(np.linalg.norm(first[:, None] - second[None, :], axis=2)))


def writhe_from_points(points: ArrayLike) -> float:
    """
    闭合折线的缠绕数: 每个不相邻线段对的带符号立体角 Omega，Wr = sum Omega / 2pi。
    四点共面的线段对贡献为零。
    """
    p = np.asarray(points, dtype=float)
    n = p.shape[0]
    seg = np.roll(p, -1, axis=0) - p
    lengths = np.linalg.norm(seg, axis=1)
    if np.any(lengths < SEGMENT_TOL):
        raise DegenerateSegmentError(data={"segment": int(np.argmin(lengths))})
    if n < 4:
        return 0.0
    scale = float(lengths.mean())

    ii, jj = _nonadjacent_pairs(n)
    i1, j1 = (ii + 1) % n, (jj + 1) % n
    r12, r34 = seg[ii], seg[jj]
    r13 = p[jj] - p[ii]
    r14 = p[j1] - p[ii]
    r23 = p[jj] - p[i1]
    r24 = p[j1] - p[i1]

    triple = np.einsum("ij,ij->i", r13, np.cross(r12, r34))
    active = np.abs(triple) > COPLANAR_TOL * scale**3
    if not np.any(active):
        return 0.0

    normals = [
        np.cross(r13, r14),
        np.cross(r14, r24),
        np.cross(r24, r23),
        np.cross(r23, r13),
    ]
    norms = np.stack([np.linalg.norm(v, axis=1) for v in normals])
    tiny = active & np.any(norms < NEAR_INTERSECTION_TOL * scale**2, axis=0)
    for k in np.flatnonzero(tiny):
        gap = _segment_distance(p[ii[k]], r12[k], p[jj[k]], r34[k])
        if gap < math.sqrt(NEAR_INTERSECTION_TOL) * scale:
            raise IllConditionedError(
                data={"pair": [int(ii[k]), int(jj[k])], "distance": gap}
            )
    # 近共线但不相交的线段对立体角趋于零
    active &= ~tiny

    safe = np.where(norms > 0.0, norms, 1.0)
    unit = [v / safe[k][:, None] for k, v in enumerate(normals)]
    omega = (
        safe_arcsin(np.einsum("ij,ij->i", unit[0], unit[1]))
        + safe_arcsin(np.einsum("ij,ij->i", unit[1], unit[2]))
        + safe_arcsin(np.einsum("ij,ij->i", unit[2], unit[3]))
        + safe_arcsin(np.einsum("ij,ij->i", unit[3], unit[0]))
    )
    orientation = np.sign(np.einsum("ij,ij->i", np.cross(r34, r12), r13))
    return float(np.sum((omega * orientation)[active]) / TWO_PI)


def writhe_by_projection(
    points: ArrayLike, num_directions: int = 1000, seed: int = 0
) -> WritheEstimate:
    """
    沿均匀随机方向投影，统计带符号交叉数的平均值。
    交叉符号 sign((t_over x t_under) . u)，over 为沿 u 坐标较大的一支。
    """
    p = np.asarray(points, dtype=float)
    n = p.shape[0]
    seg = np.roll(p, -1, axis=0) - p
    ii, jj = _nonadjacent_pairs(n)
    i1, j1 = (ii + 1) % n, (jj + 1) % n

    rng = np.random.default_rng(seed)
    directions = normalize_rows(rng.standard_normal((num_directions, 3)))
    values = np.empty(num_directions)

    for k, u in enumerate(directions):
        helper = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = np.cross(u, helper)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(u, e1)
        flat = p @ np.stack([e1, e2], axis=1)
        height = p @ u

        a = flat[i1] - flat[ii]
        b = flat[j1] - flat[jj]
        d = flat[jj] - flat[ii]
        denom = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        ok = np.abs(denom) > 1e-15
        safe = np.where(ok, denom, 1.0)
        s = (d[:, 0] * b[:, 1] - d[:, 1] * b[:, 0]) / safe
        t = (d[:, 0] * a[:, 1] - d[:, 1] * a[:, 0]) / safe
        crossing = ok & (s > 0) & (s < 1) & (t > 0) & (t < 1)

        h_i = height[ii] + s * (height[i1] - height[ii])
        h_j = height[jj] + t * (height[j1] - height[jj])
        over_i = (h_i > h_j)[:, None]
        t_over = np.where(over_i, seg[ii], seg[jj])
        t_under = np.where(over_i, seg[jj], seg[ii])
        signs = np.sign(np.cross(t_over, t_under) @ u)
        values[k] = float(np.sum(signs[crossing]))

    error = float(values.std(ddof=1) / math.sqrt(num_directions)) if num_directions > 1 else 0.0
    return WritheEstimate(
        mean=float(values.mean()), standard_error=error, num_directions=num_directions
    )


def ribbon_twist(centerline: CenterLine, hinges: ArrayLike, sign: float = 1.0) -> float:
    """
    任意折线带的带符号扭转数: sum sign((b_i x b_{i+1}) . e_i) * angle(b_i, b_{i+1}) / 2pi。
    镜像时取反。
    """
    b = np.asarray(hinges, dtype=float)
    nxt = np.roll(b, -1, axis=0)
    nxt[-1] = sign * b[0]
    unit_b = normalize_rows(b)
    unit_next = normalize_rows(nxt)
    angles = safe_arccos(np.einsum("ij,ij->i", unit_b, unit_next))
    handed = np.sign(np.einsum("ij,ij->i", np.cross(b, nxt), centerline.segments))
    return float(np.sum(handed * angles) / TWO_PI)


def gauss_area_from_segments(
    segments: ArrayLike, wr: float | None = None
) -> GaussArea:
    """
    单位切向量依大圆弧连成的球面多边形，取行进方向左侧的面积：
    area = (2pi - sum theta_k) mod 4pi，theta_k 为顶点处带符号的转角。
    """
    tangents = _unit_segments(segments)
    arcs = turning_angles(segments)

    # 合并重合的相邻切向量 (零长度弧)
    keep = arcs > DUPLICATE_TANGENT_TOL
    if not np.any(keep):
        keep[0] = True
    points = tangents[keep]
    if np.any(np.einsum("ij,ij->i", points, np.roll(points, -1, axis=0)) < -1.0 + 1e-12):
        raise AntipodalTangentsError()

    prev = np.roll(points, 1, axis=0)
    nxt = np.roll(points, -1, axis=0)
    w_in = normalize_rows(np.einsum("ij,ij->i", prev, points)[:, None] * points - prev)
    w_out = normalize_rows(nxt - np.einsum("ij,ij->i", nxt, points)[:, None] * points)
    turning = np.arctan2(
        np.einsum("ij,ij->i", np.cross(w_in, w_out), points),
        np.einsum("ij,ij->i", w_in, w_out),
    )
    area = float((TWO_PI - turning.sum()) % FOUR_PI)

    check = 0.0
    if wr is not None:
        diff = (area - TWO_PI * wr) % TWO_PI
        check = float(min(diff, TWO_PI - diff))
    return GaussArea(area=area, check=check, arc_lengths=arcs.tolist())


# ------------------------------------------------------------------------------
# 2. 构型级观测量
# ------------------------------------------------------------------------------


def bend_energy(state: KaleidocycleState) -> float:
    return bend_energy_from_segments(gamma_from_b(state).segments)


def coulomb_energy(state: KaleidocycleState, alpha: float = 1.0) -> float:
    return coulomb_energy_from_points(gamma_from_b(state).gamma, alpha)


def dipole_energy(state: KaleidocycleState) -> float:
    if state.mode is not ClosureMode.ORIENTED:
        raise ModeError(data={"mode": state.mode.value})
    return dipole_energy_from_points(gamma_from_b(state).gamma, state.b)


def torsion_angles(state: KaleidocycleState) -> np.ndarray:
    """相邻铰链夹角 arccos(b_{i-1}.b_i)，i = 1..n。"""
    ext = state.extended()
    return safe_arccos(np.einsum("ij,ij->i", ext[:-1], ext[1:]))


def twist(state: KaleidocycleState) -> float:
    closed_form = state.n * math.acos(max(-1.0, min(1.0, state.c))) / TWO_PI
    summed = float(torsion_angles(state).sum() / TWO_PI)
    if abs(closed_form - summed) > TWIST_AGREEMENT_TOL:
        logger.bind(closed_form=closed_form, summed=summed).warning(
            "Twist closed form disagrees with hinge-angle sum"
        )
    return closed_form


def writhe(centerline: CenterLine) -> float:
    return writhe_from_points(centerline.gamma)


def _count_half_twists(tw: float, wr: float) -> tuple[int, float]:
    value = 2.0 * (tw + wr)
    count = round(value)
    defect = abs(value - count)
    if defect > INTEGRALITY_FATAL:
        raise IntegralityViolationError(data={"value": value, "defect": defect})
    if defect > 1e-6:
        logger.bind(value=value, defect=defect).warning("Half-twist integrality defect")
    return int(count), defect


def half_twists(state: KaleidocycleState) -> tuple[int, float]:
    """返回 (h, |2(Tw + Wr) - h|)。"""
    return _count_half_twists(twist(state), writhe(gamma_from_b(state)))


def gauss_area(centerline: CenterLine, wr: float | None = None) -> GaussArea:
    check_wr = writhe(centerline) if wr is None else wr
    return gauss_area_from_segments(centerline.segments, check_wr)


def kirchhoff_energy(
    state: KaleidocycleState, bend_weight: float = 1.0, twist_weight: float = 1.0
) -> float:
    return bend_weight * bend_energy(state) + twist_weight * float(
        np.sum(torsion_angles(state) ** 2)
    )


def observable_set(
    state: KaleidocycleState, params: EnergyParams | None = None
) -> ObservableSet:
    cfg = params or EnergyParams()
    centerline = gamma_from_b(state)

    if cfg.dipole and state.mode is not ClosureMode.ORIENTED:
        raise ModeError(data={"mode": state.mode.value})
    want_dipole = state.mode is ClosureMode.ORIENTED if cfg.dipole is None else cfg.dipole

    tw = twist(state)
    wr = writhe(centerline)
    count, defect = _count_half_twists(tw, wr)
    return ObservableSet(
        e_bend=bend_energy_from_segments(centerline.segments),
        e_clmb=coulomb_energy_from_points(centerline.gamma, cfg.alpha),
        alpha=cfg.alpha,
        e_dipl=dipole_energy_from_points(centerline.gamma, state.b) if want_dipole else None,
        tw=tw,
        wr=wr,
        half_twists=count,
        half_twist_defect=defect,
        gauss_area=gauss_area_from_segments(centerline.segments, wr).area,
    )


def observe_trace(trace: MotionTrace, params: EnergyParams | None = None) -> MotionTrace:
    """为轨迹上的每个构型填充观测量。"""
    records = [observable_set(state, params) for state in trace.states]
    return trace.model_copy(update={"observables": records})


def bend_minimality_probe(
    state: KaleidocycleState,
    kinematics: KinematicsService,
    num_samples: int = 16,
    step: float = 1e-3,
) -> BendProbeResult:
    """
    探索性诊断: 沿切向小步再投影，统计 E_bend 更低的邻近构型数。
    """
    base = bend_energy(state)
    tangent = kinematics.tangent_basis(state)
    if tangent.nullity == 0:
        return BendProbeResult(e_bend=base, samples=0, lower_samples=0)

    solver = kinematics.solver
    x0 = ConstraintSystem(state.n, state.mode, state.c).gauge_coordinates(state)
    rng = np.random.default_rng([solver.settings.seed, num_samples])
    energies: list[float] = []
    for _ in range(num_samples):
        direction = tangent.basis @ rng.standard_normal(tangent.nullity)
        direction /= np.linalg.norm(direction)
        report = solver.project_to_manifold(
            x0 + step * direction, state.n, state.mode, state.c
        )
        if report.converged and report.state is not None:
            energies.append(bend_energy(report.state))

    lower = sum(1 for value in energies if value < base - 1e-12)
    return BendProbeResult(
        e_bend=base,
        samples=len(energies),
        lower_samples=lower,
        min_neighbour=min(energies) if energies else None,
    )

