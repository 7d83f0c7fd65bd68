"""
File: app/services/reporting/reproduce_table1.py
Description: 极值 Kaleidocycle 关键数值表的复现 (跨领域编排: extremal + observables)

每一行:
- c_n: nonoriented 上边界
- Tw / E_bend / 半扭转数: 在该边界见证构型上计算
- E_dipl: 奇数 n 时在对偶的 oriented 下边界 (c = -c_n) 上计算，偶数 n 留空
- n = 6 取 c = 0 的 Bricard 构型，E_bend 沿运动变化，记为 "varies"

Author: jinmozhe
Created: 2026-03-07
"""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.logging import logger
from app.domains.extremal.constants import Side
from app.domains.extremal.service import ExtremalService
from app.domains.model.constants import MIN_RING_SIZE
from app.domains.model.schemas import ClosureMode
from app.domains.observables.schemas import EnergyParams
from app.domains.observables.service import dipole_energy, observable_set

DEFAULT_ROWS = (6, 7, 8, 9, 15, 38)
BRICARD_N = 6
VARIES = "varies"


class TableRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    mode: ClosureMode
    c_n: float
    tw: float
    e_bend: float | str
    e_dipl: float | None = None
    half_twists: int


def _bricard_row(extremal: ExtremalService, params: EnergyParams) -> TableRow:
    state = extremal.solver.solve_slice(
        BRICARD_N, ClosureMode.NONORIENTED, 0.0
    ).require_state()
    record = observable_set(state, params)
    return TableRow(
        n=BRICARD_N,
        mode=state.mode,
        c_n=0.0,
        tw=record.tw,
        e_bend=VARIES,
        half_twists=record.half_twists,
    )


def table_row(n: int, extremal: ExtremalService, params: EnergyParams) -> TableRow:
    if n == BRICARD_N:
        return _bricard_row(extremal, params)

    result = extremal.find_extreme_c(n, ClosureMode.NONORIENTED, Side.UPPER)
    record = observable_set(result.witness, params)
    e_dipl = None
    if n % 2 == 1:
        e_dipl = dipole_energy(ExtremalService.dual(result).witness)

    row = TableRow(
        n=n,
        mode=result.mode,
        c_n=result.c_n,
        tw=record.tw,
        e_bend=record.e_bend,
        e_dipl=e_dipl,
        half_twists=record.half_twists,
    )
    logger.bind(**row.model_dump(mode="json")).info("Table row computed")
    return row


def reproduce_table1(
    extremal: ExtremalService,
    rows: Sequence[int] = DEFAULT_ROWS,
    params: EnergyParams | None = None,
) -> list[TableRow]:
    """按输入顺序返回；MAX_WORKERS > 1 时各行并发计算。"""
    energy = params or EnergyParams()
    workers = min(extremal.solver.settings.max_workers, len(rows)) or 1
    if workers == 1:
        return [table_row(n, extremal, energy) for n in rows]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda n: table_row(n, extremal, energy), rows))


class Table1Command(BaseModel):
    rows: list[Annotated[int, Field(ge=MIN_RING_SIZE)]] = Field(
        default_factory=lambda: list(DEFAULT_ROWS), min_length=1
    )
    output: Path

    @field_validator("rows", mode="before")
    @classmethod
    def _split(cls, value: object) -> object:
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value
