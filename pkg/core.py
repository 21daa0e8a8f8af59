"""位串、随机流、种群排序与评估计数（所有算法共用）

约定：位串下标从 0 开始，数学记号中的第 i 位对应 genes[i-1]。
种群以 uint8 矩阵 (λ × n) 存放，每行一个个体。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

log = logging.getLogger(__name__)


class InvalidParameter(ValueError):
    """操作参数超出定义域"""


class ConfigError(ValueError):
    """配置文档或标识符无效"""


# ── 随机流 ────────────────────────────────────


class RngStream:
    """可复现的随机流：同一 (master_seed, stream_id) 产生相同的抽样序列"""

    def __init__(self, master_seed: int, stream_id: int = 0):
        if master_seed < 0 or stream_id < 0:
            raise InvalidParameter("种子与流编号必须非负")
        self.master_seed = int(master_seed) & 0xFFFF_FFFF_FFFF_FFFF
        self.stream_id = int(stream_id)
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def spawn(self, child_id: int) -> RngStream:
        """派生子流（按样本下标拆分时使用）"""
        child = RngStream.__new__(RngStream)
        child.master_seed = self.master_seed
        child.stream_id = self.stream_id
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id, int(child_id)))
        child.generator = np.random.Generator(np.random.PCG64(seq))
        return child

    def random(self, size=None) -> np.ndarray:
        return self.generator.random(size)

    def integers(self, low: int, high: int, size=None):
        return self.generator.integers(low, high, size=size)

    def bernoulli(self, p, size) -> np.ndarray:
        """按概率 p（标量或可广播数组）抽取 0/1 矩阵"""
        return (self.generator.random(size) < p).astype(np.uint8)

    def choice_index(self, candidates: Sequence[int]) -> int:
        """在候选下标中均匀选一个"""
        if len(candidates) == 1:
            return int(candidates[0])
        return int(candidates[int(self.generator.integers(0, len(candidates)))])

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"


# ── 个体与种群 ────────────────────────────────


@dataclass(frozen=True)
class Individual:
    """已评估个体：fitness 在采样时计算一次并缓存"""
    genome: np.ndarray
    fitness: int

    def __post_init__(self):
        genome = np.array(self.genome, dtype=np.uint8)
        genome.setflags(write=False)
        object.__setattr__(self, "genome", genome)


@dataclass(frozen=True)
class SortedPopulation:
    """按适应度非增排列的种群，同分者顺序为均匀随机排列"""
    genomes: np.ndarray          # λ × n，uint8
    fitness: np.ndarray          # 长度 λ，int64
    tiebreak_draws: int = 0      # 排序时消耗的随机数个数
    fitness_name: str = ""       # 生成 fitness 的函数标识

    def __post_init__(self):
        self.genomes.setflags(write=False)
        self.fitness.setflags(write=False)

    @property
    def members(self) -> list[Individual]:
        return [Individual(self.genomes[k].copy(), int(self.fitness[k])) for k in range(len(self))]

    @property
    def best(self) -> Individual:
        return Individual(self.genomes[0].copy(), int(self.fitness[0]))

    def top(self, mu: int) -> np.ndarray:
        """前 μ 个个体（截断选择）"""
        return self.genomes[:mu]

    def __len__(self) -> int:
        return int(self.fitness.shape[0])


def sample_uniform_bitstring(n: int, rng: RngStream) -> np.ndarray:
    """从 {0,1}^n 中均匀抽取一个位串"""
    return sample_uniform_population(1, n, rng)[0]


def sample_uniform_population(size: int, n: int, rng: RngStream) -> np.ndarray:
    """均匀抽取 size 个长度为 n 的位串"""
    if n < 1:
        raise InvalidParameter(f"问题规模 n 必须 ≥ 1，收到 {n}")
    if size < 0:
        raise InvalidParameter(f"种群大小不能为负: {size}")
    return rng.bernoulli(0.5, (size, n))


def tiebreak_order(fitness: np.ndarray, rng: RngStream) -> np.ndarray:
    """按适应度降序的下标排列；先为每个个体抽一个均匀键，再按 (−fitness, 键) 稳定排序"""
    fitness = np.asarray(fitness)
    keys = rng.random(fitness.shape[0])
    return np.lexsort((keys, -fitness))


def sort_arrays(genomes: np.ndarray, fitness: np.ndarray, rng: RngStream,
                fitness_name: str = "") -> SortedPopulation:
    """矩阵形式的 sort_population"""
    fitness = np.asarray(fitness, dtype=np.int64)
    if genomes.shape[0] != fitness.shape[0]:
        raise InvalidParameter("个体数与适应度个数不一致")
    order = tiebreak_order(fitness, rng)
    return SortedPopulation(
        genomes=np.ascontiguousarray(genomes[order]),
        fitness=fitness[order].copy(),
        tiebreak_draws=int(fitness.shape[0]),
        fitness_name=fitness_name,
    )


def sort_population(pop: Sequence[Individual], rng: RngStream, fitness_name: str = "") -> SortedPopulation:
    """排序种群，同分时均匀随机打破平局"""
    if not pop:
        return SortedPopulation(np.zeros((0, 0), dtype=np.uint8), np.zeros(0, dtype=np.int64))
    genomes = np.stack([np.asarray(ind.genome, dtype=np.uint8) for ind in pop])
    fitness = np.array([ind.fitness for ind in pop], dtype=np.int64)
    return sort_arrays(genomes, fitness, rng, fitness_name)


def sample_binomial(trials: int, p: float, rng: RngStream, size=None):
    """精确的 Binomial(trials, p) 抽样"""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"概率 p 必须在 [0,1] 内，收到 {p}")
    if trials < 0:
        raise InvalidParameter(f"试验次数不能为负: {trials}")
    draws = rng.generator.binomial(trials, p, size=size)
    return int(draws) if size is None else draws


# ── 评估计数 ──────────────────────────────────


@dataclass
class EvaluationBudget:
    """函数评估预算；hit_optimum_at 为首次采到最优解的评估序号"""
    limit: int
    used: int = 0
    hit_optimum_at: int | None = None

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit

    @property
    def done(self) -> bool:
        return self.hit_optimum_at is not None or self.exhausted

    def charge(self, optimal: np.ndarray) -> None:
        """为一批按采样顺序排列的样本计费；optimal[k] 表示第 k 个样本是否最优"""
        count = int(optimal.shape[0])
        if self.hit_optimum_at is None and count:
            hits = np.flatnonzero(optimal)
            if hits.size:
                index = self.used + int(hits[0]) + 1
                if index <= self.limit:
                    self.hit_optimum_at = index
        self.used += count


@dataclass
class Evaluator:
    """把适应度函数与预算绑定：每个采样的位串恰好计费一次，并在采样时检查最优"""
    fitness: "FitnessLike"
    budget: EvaluationBudget
    calls: int = field(default=0, init=False)

    def __call__(self, genomes: np.ndarray) -> np.ndarray:
        values = self.fitness.evaluate(genomes)
        self.budget.charge(values == self.fitness.optimum(genomes.shape[1]))
        self.calls += 1
        return values

    @property
    def name(self) -> str:
        return self.fitness.name


class FitnessLike(Protocol):
    name: str

    def evaluate(self, genomes: np.ndarray) -> np.ndarray: ...

    def optimum(self, n: int) -> int: ...
