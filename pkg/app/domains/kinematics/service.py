"""
File: app/domains/kinematics/service.py
Description: 运动学领域服务

本模块负责：
1. tangent_basis: 规范 Jacobian 的 SVD 数值零空间
2. probe_local_dof: 沿切向小步试探再投影，统计真实运动方向的秩
   (边界切片上切空间维数可以严格大于真实局部维数)
3. trace_rotation: 伪弧长延拓追踪旋转运动，回到起点附近即判定闭合

Author: jinmozhe
Created: 2026-03-05
"""

import numpy as np
from scipy.linalg import null_space, svdvals

from app.core.logging import logger
from app.domains.constraints.service import ConstraintSystem
from app.domains.kinematics.constants import (
    BRANCH_PROJECTION_MIN,
    INITIAL_DISPLACEMENT_RATIO,
    MAX_CHORD_RATIO,
    PROBE_STREAM,
    BranchAmbiguityError,
    InvalidStartError,
    StallError,
)
from app.domains.kinematics.schemas import (
    KinematicsSettings,
    MotionTrace,
    ProbeResult,
    TangentBasis,
)
from app.domains.model.schemas import KaleidocycleState
from app.domains.model.service import is_degenerate
from app.domains.solver.service import SolverService, gauss_newton


class KinematicsService:
    """
    运动学领域服务。
    单条轨迹天然串行；不同轨迹之间互不共享状态。
    """

    def __init__(self, solver: SolverService, settings: KinematicsSettings):
        self.solver = solver
        self.settings = settings

    # --------------------------------------------------------------------------
    # 1. 切空间
    # --------------------------------------------------------------------------

    def tangent_basis(
        self, state: KaleidocycleState, threshold: float | None = None
    ) -> TangentBasis:
        rcond = self.settings.tangent_threshold if threshold is None else threshold
        system = ConstraintSystem(state.n, state.mode, state.c)
        jac = system.jacobian(system.gauge_coordinates(state))
        return TangentBasis(
            basis=null_space(jac, rcond=rcond),
            singular_values=svdvals(jac),
            threshold=rcond,
        )

    # --------------------------------------------------------------------------
    # 2. 局部自由度探测
    # --------------------------------------------------------------------------

    def probe_local_dof(
        self,
        state: KaleidocycleState,
        num_probes: int | None = None,
        step_eps: float | None = None,
    ) -> ProbeResult:
        """
        每次探测: 切空间内随机单位方向 d，x + eps*d 重新投影，
        投影后位移在 d 上的分量 >= eps/2 才计为成功。
        成功位移 (除以 eps，不归一化) 组成矩阵，按相对 sigma_max 的阈值计秩。
        """
        cfg = self.settings
        count = cfg.probe_count if num_probes is None else num_probes
        eps = cfg.probe_eps if step_eps is None else step_eps

        system = ConstraintSystem(state.n, state.mode, state.c)
        x0 = system.gauge_coordinates(state)
        tangent = self.tangent_basis(state)
        if tangent.nullity == 0:
            return ProbeResult(dof=0, tangent_nullity=0, successes=0, failures=count)

        rng = np.random.default_rng([self.solver.settings.seed, PROBE_STREAM])
        displacements: list[np.ndarray] = []
        failures = 0
        for _ in range(count):
            direction = tangent.basis @ rng.standard_normal(tangent.nullity)
            direction /= np.linalg.norm(direction)
            report = self.solver.project_to_manifold(
                x0 + eps * direction, state.n, state.mode, state.c
            )
            if not report.converged or report.x is None:
                failures += 1
                continue
            delta = report.x - x0
            if delta @ direction >= 0.5 * eps:
                displacements.append(delta / eps)
            else:
                failures += 1

        if not displacements:
            dof, spectrum = 0, np.zeros(0)
        else:
            spectrum = svdvals(np.vstack(displacements))
            dof = int(np.sum(spectrum > cfg.probe_rank_threshold * spectrum[0]))

        logger.bind(
            n=state.n,
            c=state.c,
            dof=dof,
            nullity=tangent.nullity,
            successes=len(displacements),
        ).debug("Local DOF probed")
        return ProbeResult(
            dof=dof,
            tangent_nullity=tangent.nullity,
            successes=len(displacements),
            failures=failures,
            displacement_spectrum=spectrum.tolist(),
        )

    # --------------------------------------------------------------------------
    # 3. 伪弧长延拓
    # --------------------------------------------------------------------------

    def _initial_direction(
        self, system: ConstraintSystem, x0: np.ndarray, basis: np.ndarray, h: float
    ) -> np.ndarray:
        """按奇异向量顺序取第一个能产生真实位移的零空间方向。"""
        for column in basis.T:
            report = self.solver.project_to_manifold(
                x0 + h * column, system.n, system.mode, system.c
            )
            if not report.converged or report.x is None:
                continue
            delta = report.x - x0
            norm = float(np.linalg.norm(delta))
            if norm >= INITIAL_DISPLACEMENT_RATIO * h:
                return delta / norm
        raise InvalidStartError(
            message="切空间中没有可实现的运动方向",
            data={"n": system.n, "c": system.c, "nullity": int(basis.shape[1])},
        )

    def _correct(
        self,
        system: ConstraintSystem,
        x_pred: np.ndarray,
        tangent: np.ndarray,
    ) -> np.ndarray | None:
        """在预测点处与切向正交的超平面内校正。"""
        solver_cfg = self.solver.settings

        def fun(y: np.ndarray) -> np.ndarray:
            return np.append(system.residual(y), tangent @ (y - x_pred))

        def jac(y: np.ndarray) -> np.ndarray:
            return np.vstack([system.jacobian(y), tangent])

        outcome = gauss_newton(
            fun,
            jac,
            x_pred,
            tol=solver_cfg.tol_residual,
            max_iters=solver_cfg.max_iters,
            svd_cutoff=solver_cfg.svd_cutoff,
            damping=solver_cfg.damping,
        )
        if outcome.residual_norm > solver_cfg.tol_residual:
            return None
        if is_degenerate(system.assemble(outcome.x)):
            return None
        return outcome.x

    def trace_rotation(
        self,
        start: KaleidocycleState,
        step: float | None = None,
        max_steps: int | None = None,
    ) -> MotionTrace:
        cfg = self.settings
        nominal = cfg.trace_step if step is None else step
        limit = cfg.trace_max_steps if max_steps is None else max_steps
        closure_tol = cfg.closure_factor * nominal

        system = ConstraintSystem(start.n, start.mode, start.c)
        seed_report = self.solver.project_to_manifold(
            system.gauge_coordinates(start), start.n, start.mode, start.c
        )
        if not seed_report.converged or seed_report.x is None:
            raise InvalidStartError(data=seed_report.summary())
        x0 = seed_report.x

        warnings: list[str] = []
        tangent = self.tangent_basis(system.assemble(x0))
        if tangent.nullity == 0:
            raise InvalidStartError(message="Jacobian 零空间为空", data={"n": start.n})
        if tangent.nullity > 1:
            probe = self.probe_local_dof(system.assemble(x0))
            if probe.dof > 1:
                message = f"local DOF {probe.dof} > 1; following the first realisable null direction"
                warnings.append(message)
                logger.bind(n=start.n, c=start.c, dof=probe.dof).warning(
                    "Trace start has more than one degree of freedom"
                )

        direction = self._initial_direction(system, x0, tangent.basis, nominal)
        states = [system.assemble(x0)]
        arclength = [0.0]
        x = x0
        h = nominal
        rejected = 0
        departed = False
        closed = False

        for _ in range(limit):
            basis = null_space(system.jacobian(x), rcond=cfg.tangent_threshold)
            if basis.shape[1] == 0:
                tangent_dir = direction
            else:
                projected = basis @ (basis.T @ direction)
                norm = float(np.linalg.norm(projected))
                if norm < BRANCH_PROJECTION_MIN:
                    candidates = basis[:, :2].T.tolist()
                    raise BranchAmbiguityError(
                        data={
                            "step": len(states),
                            "projection": norm,
                            "candidates": candidates,
                        }
                    )
                tangent_dir = projected / norm

            while True:
                y = self._correct(system, x + h * tangent_dir, tangent_dir)
                if y is not None:
                    chord = y - x
                    length = float(np.linalg.norm(chord))
                    if chord @ direction > 0 and length <= MAX_CHORD_RATIO * h:
                        break
                rejected += 1
                h *= 0.5
                if h < cfg.min_step_ratio * nominal:
                    raise StallError(
                        data={"step": len(states), "h": h, "arclength": arclength[-1]}
                    )

            states.append(system.assemble(y))
            arclength.append(arclength[-1] + length)
            direction = chord / length
            x = y
            h = min(nominal, 2.0 * h)

            distance = float(np.linalg.norm(x - x0))
            if not departed and distance > 2.0 * closure_tol:
                departed = True
            if departed and distance <= closure_tol:
                closed = True
                break

        logger.bind(
            n=start.n,
            c=start.c,
            states=len(states),
            closed=closed,
            rejected=rejected,
        ).info("Rotation trace finished")
        return MotionTrace(
            states=states,
            arclength=arclength,
            closed=closed,
            rejected_steps=rejected,
            warnings=warnings,
        )
