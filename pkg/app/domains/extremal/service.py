"""
File: app/domains/extremal/service.py
Description: 边界参数 c_n 搜索与可行性扫描

本模块负责：
1. 锚点: c = 0 可行时直接使用，否则粗扫描取最靠近目标方向的可行点
2. 推进: 以热启动沿目标方向前进，建立 [可行, 不可行] 初始括号
3. 二分: 每次可行性测试都从最近的可行见证热启动，压低假阴性
4. 精修: Lagrange 一阶条件 + Levenberg-Marquardt，仅在括号内且可重新投影时采纳
5. 可行性剖面扫描与奇偶/闭合方式对偶

Author: jinmozhe
Created: 2026-03-04
"""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.optimize import least_squares

from app.core.exceptions import InvalidParamsException
from app.core.logging import logger
from app.domains.constraints.service import ConstraintSystem
from app.domains.extremal.constants import (
    ANCHOR_SCAN_RANGE,
    MARCH_RETRY_FRACTIONS,
    REFINE_BRACKET_SLACK,
    NoFeasibleAnchorError,
    Side,
    TrivialBoundaryError,
)
from app.domains.extremal.schemas import (
    ExtremalDiagnostics,
    ExtremalResult,
    ExtremalSettings,
    FeasibilityPoint,
    FeasibilityProfile,
)
from app.domains.model.schemas import ClosureMode
from app.domains.model.service import flip_alternate
from app.domains.solver.schemas import SolveReport
from app.domains.solver.service import SolverService


class ExtremalService:
    """
    边界搜索领域服务。
    单个 (n, mode, side) 任务内部串行；不同任务可并发。
    """

    def __init__(self, solver: SolverService, settings: ExtremalSettings):
        self.solver = solver
        self.settings = settings
        # 热启动之后只补少量重启
        self.probe_solver = SolverService(
            solver.settings.model_copy(
                update={"num_restarts": settings.fallback_restarts}
            )
        )

    # --------------------------------------------------------------------------
    # 1. 锚点与推进
    # --------------------------------------------------------------------------

    def _find_anchor(
        self, n: int, mode: ClosureMode, side: Side, diag: ExtremalDiagnostics
    ) -> SolveReport:
        report = self.solver.solve_slice(n, mode, 0.0)
        diag.feasibility_tests += 1
        if report.converged:
            return report

        grid = np.linspace(*ANCHOR_SCAN_RANGE, self.settings.scan_points)
        profile = self.scan_feasibility(n, mode, grid.tolist())
        diag.feasibility_tests += len(profile.points)
        feasible = profile.feasible_values
        if not feasible:
            raise NoFeasibleAnchorError(
                data={"n": n, "mode": mode.value, "grid": grid.tolist()}
            )
        best_c = max(feasible, key=lambda c: side.direction * c)
        return self.solver.solve_slice(n, mode, best_c)

    def _march(
        self,
        n: int,
        mode: ClosureMode,
        side: Side,
        anchor: SolveReport,
        diag: ExtremalDiagnostics,
    ) -> tuple[SolveReport, float]:
        """返回 (最远的可行报告, 其外侧最近的不可行 c)。"""
        cfg = self.settings
        direction = side.direction
        lo = anchor

        while True:
            step = cfg.march_step
            near_edge = abs(lo.c + direction * step) >= cfg.trivial_limit
            if near_edge:
                # 最后一步恰好落在 ±trivial_limit
                step = cfg.trivial_limit - direction * lo.c

            advanced = False
            for fraction in MARCH_RETRY_FRACTIONS:
                c_try = lo.c + direction * step * fraction
                ok, report = self.probe_solver.feasible(n, mode, c_try, warm_start=lo.x)
                diag.feasibility_tests += 1
                if ok:
                    if near_edge and fraction == 1.0:
                        raise TrivialBoundaryError(
                            data={"n": n, "mode": mode.value, "side": side.value, "c": c_try}
                        )
                    lo = report
                    advanced = True
                    break

            diag.march_steps += 1
            logger.bind(n=n, mode=mode.value, c=lo.c, advanced=advanced).debug(
                "March step"
            )
            if not advanced:
                return lo, lo.c + direction * step * MARCH_RETRY_FRACTIONS[-1]

    # --------------------------------------------------------------------------
    # 2. 二分与精修
    # --------------------------------------------------------------------------

    def _bisect(
        self,
        n: int,
        mode: ClosureMode,
        lo: SolveReport,
        hi_c: float,
        diag: ExtremalDiagnostics,
    ) -> tuple[SolveReport, float]:
        target = self.settings.bisection_tol
        while abs(hi_c - lo.c) > target:
            mid = 0.5 * (lo.c + hi_c)
            ok, report = self.probe_solver.feasible(n, mode, mid, warm_start=lo.x)
            diag.feasibility_tests += 1
            diag.bisection_steps += 1
            if ok:
                lo = report
            else:
                hi_c = mid
            logger.bind(lo=lo.c, hi=hi_c, feasible=ok).debug("Bisection step")
        return lo, hi_c

    def refine_extreme(self, result: ExtremalResult) -> ExtremalResult:
        """
        求解 max/min c s.t. F(x, c) = 0 的一阶条件：
            F(x, c) = 0,  J_x^T lam = 0,  F_c . lam = 1
        仅当精修后的 c 落在括号内且能重新投影时采纳。
        """
        n, mode = result.n, result.mode
        system = ConstraintSystem(n, mode, result.c_n)
        x0 = system.gauge_coordinates(result.witness)
        jac = system.jacobian(x0)
        u, _, _ = np.linalg.svd(jac)
        left = u[:, -1]
        scale = float(system.c_derivative(x0) @ left)
        if abs(scale) < 1e-14:
            return self._with_refine_status(result, "rejected:no_multiplier")
        lam0 = left / scale
        num_x = system.num_vars

        def lagrange(z: np.ndarray) -> np.ndarray:
            x, c, lam = z[:num_x], z[num_x], z[num_x + 1 :]
            if not -1.0 < c < 1.0:
                return np.full(z.shape[0], 1e3)
            sliced = ConstraintSystem(n, mode, c)
            return np.concatenate(
                [
                    sliced.residual(x),
                    sliced.jacobian(x).T @ lam,
                    [sliced.c_derivative(x) @ lam - 1.0],
                ]
            )

        z0 = np.concatenate([x0, [result.c_n], lam0])
        try:
            solution = least_squares(lagrange, z0, method="lm", xtol=1e-15, ftol=1e-15)
        except ValueError as exc:
            return self._with_refine_status(result, f"rejected:{exc}")

        c_ref = float(solution.x[num_x])
        lo, hi = sorted(result.bracket)
        if not lo - REFINE_BRACKET_SLACK <= c_ref <= hi + REFINE_BRACKET_SLACK:
            return self._with_refine_status(result, "rejected:outside_bracket")
        c_ref = min(max(c_ref, lo), hi)

        report = self.solver.project_to_manifold(solution.x[:num_x], n, mode, c_ref)
        if not report.converged or report.state is None:
            return self._with_refine_status(result, "rejected:reprojection_failed")

        diagnostics = result.diagnostics.model_copy(
            update={
                "refine_status": "accepted",
                "witness_residual": report.residual_norm,
            }
        )
        return result.model_copy(
            update={"c_n": c_ref, "witness": report.state, "diagnostics": diagnostics}
        )

    @staticmethod
    def _with_refine_status(result: ExtremalResult, status: str) -> ExtremalResult:
        logger.bind(n=result.n, status=status).debug("Extreme refinement not applied")
        diagnostics = result.diagnostics.model_copy(update={"refine_status": status})
        return result.model_copy(update={"diagnostics": diagnostics})

    # --------------------------------------------------------------------------
    # 3. 公开入口
    # --------------------------------------------------------------------------

    def find_extreme_c(
        self, n: int, mode: ClosureMode | str, side: Side | str
    ) -> ExtremalResult:
        closure = ClosureMode(mode)
        direction = Side(side)
        anchor_c = 0.0
        diag = ExtremalDiagnostics(anchor_c=anchor_c)

        anchor = self._find_anchor(n, closure, direction, diag)
        diag.anchor_c = anchor.c
        lo, hi_c = self._march(n, closure, direction, anchor, diag)
        lo, hi_c = self._bisect(n, closure, lo, hi_c, diag)
        diag.witness_residual = lo.residual_norm

        result = ExtremalResult(
            n=n,
            mode=closure,
            side=direction,
            c_n=lo.c,
            witness=lo.require_state(),
            bracket=(lo.c, hi_c),
            diagnostics=diag,
        )
        if self.settings.refine:
            result = self.refine_extreme(result)

        logger.bind(
            n=n,
            mode=closure.value,
            side=direction.value,
            c_n=result.c_n,
            tests=diag.feasibility_tests,
            refine=result.diagnostics.refine_status,
        ).info("Extreme parameter located")
        return result

    def scan_feasibility(
        self, n: int, mode: ClosureMode | str, c_grid: Sequence[float]
    ) -> FeasibilityProfile:
        """逐点可行性；输出顺序与输入一致。"""
        grid = [float(c) for c in c_grid]
        if not grid:
            raise InvalidParamsException(message="c 网格不能为空")
        outside = [c for c in grid if not -1.0 < c < 1.0]
        if outside:
            raise InvalidParamsException(
                message="c 网格必须位于 (-1, 1) 内", data={"outside": outside}
            )
        closure = ClosureMode(mode)

        def probe(c: float) -> FeasibilityPoint:
            report = self.solver.solve_slice(n, closure, c)
            return FeasibilityPoint(
                c=c,
                feasible=report.converged,
                residual_norm=report.residual_norm,
                strategy=report.strategy,
            )

        workers = self.solver.settings.max_workers
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                points = list(pool.map(probe, grid))
        else:
            points = [probe(c) for c in grid]

        logger.bind(
            n=n, mode=closure.value, feasible=sum(p.feasible for p in points)
        ).info("Feasibility scan finished")
        return FeasibilityProfile(n=n, mode=closure, points=points)

    @staticmethod
    def dual(result: ExtremalResult) -> ExtremalResult:
        """
        隔一个翻转铰链得到的对偶边界: c -> -c，方向互换，奇数 n 时闭合方式互换。
        """
        witness = flip_alternate(result.witness)
        lo, hi = result.bracket
        return ExtremalResult(
            n=result.n,
            mode=witness.mode,
            side=result.side.opposite,
            c_n=witness.c,
            witness=witness,
            bracket=(-lo, -hi),
            diagnostics=result.diagnostics,
        )
