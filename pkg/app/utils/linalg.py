"""
File: app/utils/linalg.py
Description: 小型线性代数工具 (无状态纯函数)

Author: jinmozhe
Created: 2026-03-02
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray

FloatArray = NDArray[np.float64]


def skew(v: ArrayLike) -> FloatArray:
    """叉乘矩阵：skew(a) @ v == a x v"""
    a = np.asarray(v, dtype=float)
    return np.array(
        [
            [0.0, -a[2], a[1]],
            [a[2], 0.0, -a[0]],
            [-a[1], a[0], 0.0],
        ]
    )


def safe_arccos(x: ArrayLike) -> FloatArray:
    """arccos，参数先截断到 [-1, 1]，避免舍入误差产生 NaN。"""
    return np.arccos(np.clip(np.asarray(x, dtype=float), -1.0, 1.0))


def safe_arcsin(x: ArrayLike) -> FloatArray:
    return np.arcsin(np.clip(np.asarray(x, dtype=float), -1.0, 1.0))


def row_norms(a: ArrayLike) -> FloatArray:
    return np.linalg.norm(np.asarray(a, dtype=float), axis=-1)


def normalize_rows(a: ArrayLike, eps: float = 0.0) -> FloatArray:
    """逐行归一化；范数不大于 eps 的行保持原样。"""
    arr = np.asarray(a, dtype=float)
    norms = row_norms(arr)[..., None]
    return np.where(norms > eps, arr / np.where(norms > eps, norms, 1.0), arr)


def relative_spread(values: ArrayLike) -> float:
    """(max - min) / |mean|，用于 "近似常数" 判定。"""
    arr = np.asarray(values, dtype=float)
    mean = float(np.mean(arr))
    if mean == 0.0:
        return float(np.ptp(arr))
    return float(np.ptp(arr) / abs(mean))


def random_rotation(rng: np.random.Generator) -> FloatArray:
    """均匀随机的三维旋转矩阵 (det = +1)。"""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
