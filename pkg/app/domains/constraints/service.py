"""
File: app/domains/constraints/service.py
Description: 约束方程组 (残差 + 解析 Jacobian + 初值)

本模块在规范固定坐标下构建二次方程组：
1. residual: 2n 行残差 (闭合 3 行 / 扭转 n-1 行 / 单位长度 n-2 行)
2. jacobian: 解析偏导，叉乘行以反对称矩阵作用表示
3. c_derivative: 残差对 c 的偏导 (边界精修使用)
4. initial_guess: symmetric / perturbed-symmetric / random 三种初值，给定 seed 时完全确定

Author: jinmozhe
Created: 2026-03-03
"""

import math

import numpy as np
from numpy.typing import ArrayLike

from app.core.exceptions import AppException
from app.core.logging import logger
from app.domains.constraints.constants import ConstraintsErrorCode, InitStrategy
from app.domains.constraints.schemas import GaugedVariables
from app.domains.model.schemas import ClosureMode, KaleidocycleState
from app.domains.model.service import gauge_align
from app.utils.linalg import normalize_rows, skew


class ConstraintSystem:
    """
    固定 (n, mode, c) 的方程组切片。
    实例不可变，可在线程间共享。
    """

    def __init__(self, n: int, mode: ClosureMode | str, c: float):
        if n < 3 or not -1.0 < c < 1.0:
            raise AppException(
                ConstraintsErrorCode.INVALID_SLICE, data={"n": n, "c": c}
            )
        self.n = n
        self.mode = ClosureMode(mode)
        self.c = float(c)
        self.s = math.sqrt(1.0 - self.c * self.c)
        self.sign = self.mode.sign
        self.b0 = np.array([0.0, 0.0, 1.0])
        self.b1 = np.array([0.0, self.s, self.c])

    @property
    def num_vars(self) -> int:
        return 3 * (self.n - 2)

    @property
    def num_rows(self) -> int:
        return 2 * self.n

    # --------------------------------------------------------------------------
    # 1. 组装
    # --------------------------------------------------------------------------

    def _check(self, x: ArrayLike) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.num_vars,):
            raise AppException(
                ConstraintsErrorCode.SHAPE_MISMATCH,
                data={"expected": self.num_vars, "actual": list(arr.shape)},
            )
        return arr

    def extended(self, x: ArrayLike) -> np.ndarray:
        """b_0 .. b_n，其中 b_n = sign * b_0。"""
        arr = self._check(x)
        ext = np.empty((self.n + 1, 3))
        ext[0] = self.b0
        ext[1] = self.b1
        ext[2 : self.n] = arr.reshape(-1, 3)
        ext[self.n] = self.sign * self.b0
        return ext

    def assemble(self, x: ArrayLike) -> KaleidocycleState:
        ext = self.extended(x)
        return KaleidocycleState(n=self.n, mode=self.mode, c=self.c, b=ext[: self.n])

    def gauge_coordinates(self, state: KaleidocycleState) -> np.ndarray:
        """任意朝向的构型 -> 规范坐标 x (b_0、b_1 的偏差直接丢弃)。"""
        aligned = gauge_align(state.b)
        return aligned[2:].ravel()

    def variables(self, x: ArrayLike) -> GaugedVariables:
        return GaugedVariables(n=self.n, c=self.c, x=self._check(x))

    def mirror(self, x: ArrayLike) -> np.ndarray:
        """关于 b_0, b_1 平面的镜像: 规范坐标下 x 分量取反。"""
        hinges = self._check(x).reshape(-1, 3).copy()
        hinges[:, 0] = -hinges[:, 0]
        return hinges.ravel()

    # --------------------------------------------------------------------------
    # 2. 残差与导数
    # --------------------------------------------------------------------------

    def residual(self, x: ArrayLike) -> np.ndarray:
        ext = self.extended(x)
        closure = np.cross(ext[:-1], ext[1:]).sum(axis=0)
        dots = np.einsum("ij,ij->i", ext[:-1], ext[1:])
        free = ext[2 : self.n]
        norms = np.einsum("ij,ij->i", free, free) - 1.0
        # dots[0] = b_0.b_1 - c 恒为零，不计入
        return np.concatenate([closure, dots[1:] - self.c, norms])

    def jacobian(self, x: ArrayLike) -> np.ndarray:
        n = self.n
        ext = self.extended(x)
        jac = np.zeros((self.num_rows, self.num_vars))
        for k in range(2, n):
            col = slice(3 * (k - 2), 3 * (k - 2) + 3)
            jac[0:3, col] = skew(ext[k - 1]) - skew(ext[k + 1])
            # 扭转行 i 位于 3 + (i - 2)
            jac[3 + (k - 2), col] = ext[k - 1]
            jac[3 + (k - 1), col] = ext[k + 1]
            jac[n + 2 + (k - 2), col] = 2.0 * ext[k]
        return jac

    def c_derivative(self, x: ArrayLike) -> np.ndarray:
        """固定 x 时 dF/dc；c 只经由 b_1 与扭转行的常数项进入。"""
        ext = self.extended(x)
        db1 = np.array([0.0, -self.c / self.s, 1.0])
        out = np.zeros(self.num_rows)
        out[0:3] = np.cross(self.b0, db1) + np.cross(db1, ext[2])
        out[3 : self.n + 2] = -1.0
        out[3] += db1 @ ext[2]
        return out

    # --------------------------------------------------------------------------
    # 3. 初值
    # --------------------------------------------------------------------------

    def _alternating_applies(self) -> bool:
        # 隔一个铰链平行于 z 轴的对称构型，只在 c = 0 的偶数 n 上精确成立；
        # 闭合符号为 (-1)^(n/2)
        if self.n % 2 or self.c != 0.0:
            return False
        half_is_even = (self.n // 2) % 2 == 0
        return half_is_even == (self.mode is ClosureMode.ORIENTED)

    def _alternating_hinges(self) -> np.ndarray:
        m = self.n // 2
        hinges = np.empty((self.n, 3))
        for k in range(m):
            sgn = -1.0 if k % 2 else 1.0
            angle = math.pi / 2 + 2 * math.pi * k / m
            hinges[2 * k] = (0.0, 0.0, sgn)
            hinges[2 * k + 1] = (sgn * math.cos(angle), sgn * math.sin(angle), 0.0)
        return hinges

    def _twisted_ring(self) -> np.ndarray:
        """沿圆环均匀扭转的带，半扭转数 h 的奇偶性与闭合方式一致。"""
        n = self.n
        parity = 1 if self.mode is ClosureMode.NONORIENTED else 0
        target = n * math.acos(self.c) / math.pi
        candidates = [h for h in range(1, n) if h % 2 == parity]
        h = min(candidates, key=lambda value: (abs(value - target), value))
        k = np.arange(n)
        psi = math.pi * h * k / n
        phi = 2 * math.pi * k / n
        radial = np.stack([np.cos(phi), np.sin(phi), np.zeros(n)], axis=1)
        axial = np.tile([0.0, 0.0, 1.0], (n, 1))
        return np.cos(psi)[:, None] * axial + np.sin(psi)[:, None] * radial

    def symmetric_guess(self) -> np.ndarray:
        if self._alternating_applies():
            hinges = self._alternating_hinges()
        else:
            hinges = self._twisted_ring()
        return gauge_align(hinges)[2:].ravel()

    def initial_guess(
        self,
        strategy: InitStrategy | str,
        seed: int,
        restart: int = 0,
        amplitude: float = 0.1,
    ) -> np.ndarray:
        try:
            chosen = InitStrategy(strategy)
        except ValueError as exc:
            raise AppException(
                ConstraintsErrorCode.UNKNOWN_STRATEGY, data={"strategy": str(strategy)}
            ) from exc

        rng = np.random.default_rng([seed, restart])
        if chosen is InitStrategy.SYMMETRIC:
            x = self.symmetric_guess()
        elif chosen is InitStrategy.PERTURBED:
            x = self.symmetric_guess() + amplitude * rng.uniform(
                -1.0, 1.0, self.num_vars
            )
        else:
            hinges = normalize_rows(rng.standard_normal((self.n, 3)))
            x = gauge_align(hinges)[2:].ravel()

        logger.bind(
            n=self.n, mode=self.mode.value, c=self.c, strategy=chosen.value, restart=restart
        ).debug("Initial guess generated")
        return x


# ------------------------------------------------------------------------------
# 函数式入口
# ------------------------------------------------------------------------------


def residual(variables: GaugedVariables, mode: ClosureMode | str) -> np.ndarray:
    return ConstraintSystem(variables.n, mode, variables.c).residual(variables.x)


def jacobian(variables: GaugedVariables, mode: ClosureMode | str) -> np.ndarray:
    return ConstraintSystem(variables.n, mode, variables.c).jacobian(variables.x)


def initial_guess(
    n: int,
    mode: ClosureMode | str,
    c: float,
    strategy: InitStrategy | str,
    seed: int,
    amplitude: float = 0.1,
) -> GaugedVariables:
    system = ConstraintSystem(n, mode, c)
    return system.variables(system.initial_guess(strategy, seed, amplitude=amplitude))
