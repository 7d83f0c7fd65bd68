"""
File: app/domains/solver/service.py
Description: 求解器领域服务

本模块负责把规范变量投影到方程组的解流形上：
1. gauss_newton: 通用阻尼 Gauss-Newton (SVD 伪逆 + 折半线搜索)，校正步也复用它
2. SolverService.project_to_manifold: 单起点投影
3. SolverService.solve_slice: 固定重启顺序 (热启动 -> symmetric -> perturbed -> random)
4. SolverService.feasible: 单侧可行性判定 (收敛即可行，不收敛只是不可行的证据)

Author: jinmozhe
Created: 2026-03-03
"""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from app.core.logging import logger
from app.domains.constraints.constants import InitStrategy
from app.domains.constraints.schemas import GaugedVariables
from app.domains.constraints.service import ConstraintSystem
from app.domains.model.schemas import ClosureMode
from app.domains.model.service import is_degenerate
from app.domains.solver.constants import MAX_STEP_HALVINGS, WARM_START
from app.domains.solver.schemas import SolveReport, SolverSettings

# ------------------------------------------------------------------------------
# 1. 通用 Gauss-Newton
# ------------------------------------------------------------------------------


@dataclass(frozen=True)
class NewtonOutcome:
    x: np.ndarray
    residual_norm: float
    iterations: int
    stalled: bool


def gauss_newton(
    fun: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], np.ndarray],
    x0: ArrayLike,
    tol: float,
    max_iters: int,
    svd_cutoff: float,
    damping: float = 1.0,
) -> NewtonOutcome:
    """
    最小二乘步 dx = -pinv(J) r，奇异值截断相对 sigma_max。
    接受的步必须使 |r|^2 严格下降；线搜索失败即停止。
    """
    x = np.array(x0, dtype=float)
    r = fun(x)
    f = float(r @ r)
    iterations = 0
    stalled = False

    while iterations < max_iters and np.sqrt(f) > tol:
        dx = np.linalg.lstsq(jac(x), -r, rcond=svd_cutoff)[0]
        if not np.all(np.isfinite(dx)):
            stalled = True
            break

        t = damping
        accepted = False
        for _ in range(MAX_STEP_HALVINGS):
            trial = x + t * dx
            r_trial = fun(trial)
            f_trial = float(r_trial @ r_trial)
            if f_trial < f:
                accepted = True
                break
            t *= 0.5

        iterations += 1
        if not accepted:
            stalled = True
            break
        x, r, f = trial, r_trial, f_trial

    return NewtonOutcome(
        x=x, residual_norm=float(np.sqrt(f)), iterations=iterations, stalled=stalled
    )


# ------------------------------------------------------------------------------
# 2. 求解服务
# ------------------------------------------------------------------------------


@dataclass(frozen=True)
class _Attempt:
    index: int
    strategy: str
    x0: np.ndarray


class SolverService:
    """
    求解器领域服务。
    无内部可变状态，相同 settings + seed 给出逐位一致的报告。
    """

    def __init__(self, settings: SolverSettings):
        self.settings = settings

    def project_to_manifold(
        self,
        x0: GaugedVariables | ArrayLike,
        n: int,
        mode: ClosureMode | str,
        c: float,
        *,
        strategy: str | None = None,
        restarts_used: int = 0,
    ) -> SolveReport:
        """单起点投影；不收敛时返回失败报告而不抛异常。"""
        system = ConstraintSystem(n, mode, c)
        start = x0.x if isinstance(x0, GaugedVariables) else np.asarray(x0, float)
        cfg = self.settings

        outcome = gauss_newton(
            system.residual,
            system.jacobian,
            start,
            tol=cfg.tol_residual,
            max_iters=cfg.max_iters,
            svd_cutoff=cfg.svd_cutoff,
            damping=cfg.damping,
        )

        reached = outcome.residual_norm <= cfg.tol_residual
        state = system.assemble(outcome.x) if reached else None
        degenerate = state is not None and is_degenerate(state)
        converged = reached and not degenerate

        return SolveReport(
            n=n,
            mode=system.mode,
            c=system.c,
            state=state if converged else None,
            residual_norm=outcome.residual_norm,
            iterations=outcome.iterations,
            restarts_used=restarts_used,
            converged=converged,
            degenerate=degenerate,
            strategy=strategy,
            x=outcome.x,
        )

    def _schedule(
        self, system: ConstraintSystem, warm_start: ArrayLike | None
    ) -> list[_Attempt]:
        cfg = self.settings
        attempts: list[_Attempt] = []
        if warm_start is not None:
            attempts.append(_Attempt(0, WARM_START, np.asarray(warm_start, float)))

        perturbed_until = cfg.num_restarts // 2
        for restart in range(cfg.num_restarts):
            if restart == 0:
                strategy = InitStrategy.SYMMETRIC
            elif restart <= perturbed_until:
                strategy = InitStrategy.PERTURBED
            else:
                strategy = InitStrategy.RANDOM
            x0 = system.initial_guess(
                strategy, cfg.seed, restart=restart, amplitude=cfg.perturb_amplitude
            )
            attempts.append(_Attempt(len(attempts), strategy.value, x0))
        return attempts

    def solve_slice(
        self,
        n: int,
        mode: ClosureMode | str,
        c: float,
        warm_start: ArrayLike | None = None,
    ) -> SolveReport:
        """
        多起点求解。
        重启按块并发执行 (块大小 max_workers)，块内索引最小的收敛结果胜出。
        """
        system = ConstraintSystem(n, mode, c)
        attempts = self._schedule(system, warm_start)
        workers = self.settings.max_workers

        def run(attempt: _Attempt) -> SolveReport:
            return self.project_to_manifold(
                attempt.x0,
                n,
                system.mode,
                c,
                strategy=attempt.strategy,
                restarts_used=attempt.index + 1,
            )

        best: SolveReport | None = None
        for start in range(0, len(attempts), workers):
            chunk = attempts[start : start + workers]
            if workers == 1:
                reports = [run(chunk[0])]
            else:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    reports = list(pool.map(run, chunk))

            for report in reports:
                if report.converged:
                    logger.bind(
                        n=n,
                        mode=system.mode.value,
                        c=c,
                        strategy=report.strategy,
                        restarts_used=report.restarts_used,
                        iterations=report.iterations,
                        residual=report.residual_norm,
                    ).debug("Slice solved")
                    return report
                if best is None or report.residual_norm < best.residual_norm:
                    best = report

        assert best is not None
        logger.bind(
            n=n,
            mode=system.mode.value,
            c=c,
            attempts=len(attempts),
            best_residual=best.residual_norm,
        ).info("Restarts exhausted without convergence")
        return best.model_copy(update={"restarts_used": len(attempts)})

    def feasible(
        self,
        n: int,
        mode: ClosureMode | str,
        c: float,
        warm_start: ArrayLike | None = None,
    ) -> tuple[bool, SolveReport]:
        """收敛即可行；失败只是不可行的证据。"""
        report = self.solve_slice(n, mode, c, warm_start=warm_start)
        return report.converged, report
