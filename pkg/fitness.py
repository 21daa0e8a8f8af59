"""DLB 基准函数、φ、对照函数与层级划分"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from core import ConfigError, InvalidParameter

log = logging.getLogger(__name__)


def _as_bits(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint8)


def _blocks(genomes: np.ndarray, w: int) -> np.ndarray:
    """把 (λ × n) 矩阵切成 (λ × m × w) 的块视图"""
    if w < 1:
        raise InvalidParameter(f"块宽度必须 ≥ 1，收到 {w}")
    n = genomes.shape[-1]
    if n % w:
        raise InvalidParameter(f"位串长度 {n} 不是块宽度 {w} 的整数倍")
    return genomes.reshape(genomes.shape[0], n // w, w)


# ── 批量版本（每行一个个体） ──────────────────


def leading_blocks(genomes: np.ndarray, w: int = 2) -> np.ndarray:
    """每个个体前导全 1 块的个数"""
    full = _blocks(genomes, w).all(axis=2)
    return np.cumprod(full, axis=1, dtype=np.int64).sum(axis=1)


def dlb_batch(genomes: np.ndarray, w: int = 2) -> np.ndarray:
    blocks = _blocks(genomes, w)
    m = blocks.shape[1]
    phi = np.cumprod(blocks.all(axis=2), axis=1, dtype=np.int64).sum(axis=1)
    values = w * phi
    open_rows = np.flatnonzero(phi < m)
    if open_rows.size:
        active = blocks[open_rows, phi[open_rows]]
        values[open_rows] += (active.sum(axis=1) == 0)
    values[phi == m] = genomes.shape[1]
    return values


def leading_ones_batch(genomes: np.ndarray) -> np.ndarray:
    return np.cumprod(genomes, axis=1, dtype=np.int64).sum(axis=1)


def one_max_batch(genomes: np.ndarray) -> np.ndarray:
    return genomes.sum(axis=1, dtype=np.int64)


# ── 单个位串 ──────────────────────────────────


def phi(x, w: int = 2) -> int:
    """前导全 1 块的个数（w=2 时即前导 11 的个数）"""
    bits = _as_bits(x)
    return int(leading_blocks(bits.reshape(1, -1), w)[0])


def dlb(x, w: int = 2) -> int:
    """Deceptive Leading Blocks

    w=2：φ=n/2 时为 n；活动块为 00 时为 2φ+1；为 10/01 时为 2φ。
    w>2：活动块全 0 时为 w·φ+1，否则 w·φ；全 1 串为 n。
    """
    bits = _as_bits(x)
    return int(dlb_batch(bits.reshape(1, -1), w)[0])


def leading_ones(x) -> int:
    bits = _as_bits(x)
    if bits.size == 0:
        return 0
    return int(leading_ones_batch(bits.reshape(1, -1))[0])


def one_max(x) -> int:
    return int(_as_bits(x).sum())


def level_of(x, w: int = 2) -> int:
    """层级下标 i，满足 x ∈ A_i = {x : φ(x) = i}"""
    return phi(x, w)


# ── 层级划分 ──────────────────────────────────


@dataclass(frozen=True)
class LevelPartition:
    """A_0..A_m 按 φ 划分搜索空间；A_m 只含全 1 串"""
    n: int
    w: int = 2

    def __post_init__(self):
        if self.w < 1 or self.n % self.w:
            raise InvalidParameter(f"n={self.n} 不是块宽度 w={self.w} 的整数倍")

    @property
    def m(self) -> int:
        return self.n // self.w

    def level_of(self, x) -> int:
        return level_of(x, self.w)

    def contains(self, x, i: int) -> bool:
        return self.level_of(x) == i

    def level_size(self, i: int) -> int:
        """|A_i|：前 i 块全 1、第 i+1 块非全 1，其余任意"""
        if not 0 <= i <= self.m:
            raise InvalidParameter(f"层级 {i} 超出 [0, {self.m}]")
        if i == self.m:
            return 1
        return 2 ** (self.n - self.w * (i + 1)) * (2 ** self.w - 1)


# ── 配置标识符 ────────────────────────────────


@dataclass(frozen=True)
class FitnessFunction:
    """按标识符注册的适应度函数（批量求值，结果为精确整数）"""
    name: str
    batch: Callable[[np.ndarray], np.ndarray]
    width: int = 2

    def evaluate(self, genomes: np.ndarray) -> np.ndarray:
        return self.batch(genomes)

    def optimum(self, n: int) -> int:
        return n

    def correct_blocks(self, genomes: np.ndarray) -> np.ndarray:
        return leading_ones_batch(genomes) // self.width

    @property
    def is_dlb(self) -> bool:
        return self.name == "dlb"


FITNESS_IDS = ("dlb", "leading_ones", "one_max")


def get_fitness(name: str, width: int = 2) -> FitnessFunction:
    """根据配置中的字符串标识创建适应度函数"""
    if name == "dlb":
        if width < 2:
            raise ConfigError(f"DLB 的块宽度必须 ≥ 2，收到 {width}")
        return FitnessFunction("dlb", lambda g: dlb_batch(g, width), width)
    if name == "leading_ones":
        return FitnessFunction("leading_ones", leading_ones_batch, width)
    if name == "one_max":
        return FitnessFunction("one_max", one_max_batch, width)
    raise ConfigError(f"未知适应度函数: {name}（可选: {', '.join(FITNESS_IDS)}）")
