"""带边界的 UMDA（单变量边缘分布算法）"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from algorithms import Algorithm, Snapshot
from core import ConfigError, Evaluator, InvalidParameter, RngStream, SortedPopulation, sort_arrays
from fitness import FitnessFunction
from oracles import IterationStats, block_stats, check_block_identities

log = logging.getLogger(__name__)

CLAMP_MODES = ("two_sided", "one_sided")


@dataclass(frozen=True)
class EdaConfig:
    algorithm: str                # umda | mimic
    mu: int
    lam: int
    entropy_log_base: float = 2.0
    mimic_clamp: str = "two_sided"

    def validate(self) -> None:
        if self.algorithm not in ("umda", "mimic"):
            raise ConfigError(f"未知 EDA: {self.algorithm}")
        if not 1 <= self.mu <= self.lam:
            raise ConfigError(f"要求 1 ≤ μ ≤ λ，收到 μ={self.mu}, λ={self.lam}")
        if self.mimic_clamp not in CLAMP_MODES:
            raise ConfigError(f"未知截断方式: {self.mimic_clamp}（可选: {', '.join(CLAMP_MODES)}）")
        if self.entropy_log_base <= 1.0:
            raise ConfigError(f"熵的对数底必须 > 1，收到 {self.entropy_log_base}")


@dataclass(frozen=True)
class MarginalModel:
    """概率向量 p_t，初始化之后每个分量都在 [1/n, 1−1/n] 内"""
    p: np.ndarray
    t: int = 0

    def __post_init__(self):
        self.p.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.p.shape[0])

    @classmethod
    def initial(cls, n: int) -> MarginalModel:
        if n < 1:
            raise InvalidParameter(f"问题规模 n 必须 ≥ 1，收到 {n}")
        return cls(np.full(n, 0.5))

    def within_borders(self) -> bool:
        low, high = 1.0 / self.n, 1.0 - 1.0 / self.n
        return bool(np.all((self.p >= low) & (self.p <= high)))

    def sample(self, lam: int, rng: RngStream) -> np.ndarray:
        return rng.bernoulli(self.p, (lam, self.n))


def umda_update(counts, mu: int, n: int, t: int = 0) -> MarginalModel:
    """p_{t+1,i} = max{1/n, min{1−1/n, X_{t,i}/μ}}"""
    counts = np.asarray(counts, dtype=np.int64)
    if np.any(counts < 0) or np.any(counts > mu):
        raise InvalidParameter(f"计数必须在 [0, μ={mu}] 内")
    p = np.clip(counts / mu, 1.0 / n, 1.0 - 1.0 / n)
    return MarginalModel(p, t)


def umda_step(model: MarginalModel, config: EdaConfig, evaluate: Evaluator,
              rng: RngStream) -> tuple[MarginalModel, SortedPopulation, IterationStats | None]:
    """采样 λ 个个体、排序、用 μ 个最优个体的频率更新模型；DLB 上同时记录块统计"""
    genomes = model.sample(config.lam, rng)
    ranked = sort_arrays(genomes, evaluate(genomes), rng, evaluate.name)
    counts = ranked.top(config.mu).sum(axis=0, dtype=np.int64)
    updated = umda_update(counts, config.mu, model.n, model.t + 1)
    if not updated.within_borders():
        raise AssertionError(f"第 {updated.t} 次迭代边缘概率越界")
    stats = None
    if ranked.fitness_name == "dlb" and model.n % 2 == 0:
        stats = block_stats(ranked, config.mu)
    return updated, ranked, stats


class Umda(Algorithm):
    name = "umda"

    def __init__(self, n: int, fitness: FitnessFunction, rng: RngStream, config: EdaConfig,
                 check_identities: bool = False):
        super().__init__(n, fitness, rng)
        config.validate()
        self.config = config
        self.model = MarginalModel.initial(n)
        self.ranked: SortedPopulation | None = None
        self.stats: IterationStats | None = None
        self.check_identities = check_identities

    @property
    def offspring_per_step(self) -> int:
        return self.config.lam

    def initialize(self, evaluate: Evaluator) -> None:
        # 初始种群即从均匀模型采样的第一代
        self.step(evaluate)

    def step(self, evaluate: Evaluator) -> None:
        self.model, self.ranked, self.stats = umda_step(self.model, self.config, evaluate, self.rng)
        if self.check_identities and self.stats is not None:
            problems = check_block_identities(self.stats)
            if problems:
                raise AssertionError(f"第 {self.model.t} 次迭代块统计违例: {'; '.join(problems)}")
        self.generation += 1

    def snapshot(self) -> Snapshot:
        best = self.ranked.genomes[:1]
        return Snapshot(
            best_fitness=int(self.ranked.fitness[0]),
            correct_blocks=int(self.fitness.correct_blocks(best)[0]),
            Z=None if self.stats is None else self.stats.Z,
            Z_star=None if self.stats is None else self.stats.Z_star,
        )
