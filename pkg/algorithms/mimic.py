"""带边界的 MIMIC：用熵贪心构造链式模型，再做祖先采样

链的概率以 "取 1 的概率" 存放：
  root_p    = Pr(X_{π_0} = 1)
  cond[k,b] = Pr(X_{π_k} = 1 | X_{π_{k−1}} = b)，k ≥ 1；cond[0] 不使用
取 0 的概率即 1 − 对应值，所以两者之和恒为 1。
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from algorithms import Algorithm, Snapshot
from algorithms.umda import EdaConfig
from core import (Evaluator, InvalidParameter, RngStream, SortedPopulation,
                  sample_uniform_population, sort_arrays)
from fitness import FitnessFunction
from oracles import IterationStats, block_stats

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChainModel:
    pi: np.ndarray        # 变量顺序，pi[0] 为根
    root_p: float
    cond: np.ndarray      # n × 2

    @property
    def n(self) -> int:
        return int(self.pi.shape[0])

    def is_permutation(self) -> bool:
        return bool(np.array_equal(np.sort(self.pi), np.arange(self.n)))

    def probabilities(self) -> np.ndarray:
        """实际参与采样的全部概率（根 + 每个位置的两个条件分支）"""
        return np.concatenate([[self.root_p], self.cond[1:].ravel()])


# ── 熵 ────────────────────────────────────────


def _plogp(q: np.ndarray, base: float) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 0, -q * np.log(np.where(q > 0, q, 1.0)), 0.0)
    return terms / math.log(base)


def empirical_entropy(ones: int, total: int, base: float = 2.0) -> float:
    """二元变量的经验熵，约定 0·log0 = 0"""
    if total < 1:
        raise InvalidParameter("样本总数必须 ≥ 1")
    if not 0 <= ones <= total:
        raise InvalidParameter(f"要求 0 ≤ ones ≤ total，收到 ones={ones}, total={total}")
    p = ones / total
    return float(_plogp(p, base) + _plogp(1.0 - p, base))


def _conditional_entropies(tables: np.ndarray, n: int | None, base: float) -> np.ndarray:
    """批量计算 h(X_i | X_j)；tables 形如 (k, 2, 2)，tables[:, a, b] 为 (X_i=a, X_j=b) 的计数"""
    tables = np.asarray(tables, dtype=np.int64)
    total = tables.sum(axis=(1, 2)).astype(float)
    joint = tables / total[:, None, None]
    p_b = joint.sum(axis=1)                          # (k, 2)
    floor = np.maximum(p_b, 1.0 / n) if n else p_b   # R(p) = max{p, 1/n}
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(floor[:, None, :] > 0, joint / floor[:, None, :], 0.0)
    return (p_b * _plogp(q, base).sum(axis=1)).sum(axis=1)


def conditional_entropy(table, n: int | None = None, base: float = 2.0) -> float:
    """h(X_i | X_j) = Σ_b p̂(b)·H(X_i | X_j=b)；table[a][b] 为联合计数"""
    table = np.asarray(table, dtype=np.int64)
    if table.shape != (2, 2):
        raise InvalidParameter(f"联合计数表必须是 2×2，收到 {table.shape}")
    if np.any(table < 0):
        raise InvalidParameter("联合计数不能为负")
    if table.sum() < 1:
        raise InvalidParameter("联合计数表为空")
    return float(_conditional_entropies(table[None], n, base)[0])


ENTROPY_TIE_TOL = 1e-12


def _argmin_with_ties(keys: np.ndarray, entropy_of, candidates: np.ndarray, rng: RngStream) -> int:
    """在熵最小的候选中均匀选一个

    规范化计数键相同的候选只算一次熵，浮点值逐位相同，必然并列；
    键不同但熵在数学上相等的候选可能因舍入差出几个 ulp，
    所以与最小值相差不超过 ENTROPY_TIE_TOL（相对且绝对）的都算并列。
    """
    unique, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    values = entropy_of(first)[inverse.reshape(-1)]
    best = values.min()
    ties = candidates[values <= best + ENTROPY_TIE_TOL * max(1.0, abs(best))]
    return rng.choice_index(ties)


# ── 链的构造与采样 ────────────────────────────


def _clamp(p, n: int, mode: str):
    if mode == "one_sided":
        return np.minimum(1.0, np.maximum(p, 1.0 / n))
    return np.clip(p, 1.0 / n, 1.0 - 1.0 / n)


def mimic_build_chain(selected: np.ndarray, n: int, rng: RngStream,
                      base: float = 2.0, clamp: str = "two_sided") -> ChainModel:
    """从 μ 个被选个体中按计数估计熵，贪心确定顺序并给出截断后的采样概率"""
    selected = np.asarray(selected, dtype=np.uint8)
    mu = int(selected.shape[0])
    if mu < 1:
        raise InvalidParameter("被选个体数 μ 必须 ≥ 1")
    if selected.shape[1] != n:
        raise InvalidParameter(f"个体长度 {selected.shape[1]} 与 n={n} 不一致")

    as_int = selected.astype(np.int64)
    ones = as_int.sum(axis=0)
    both = as_int.T @ as_int           # both[j, i] = #(X_j=1, X_i=1)

    # 根：熵只取决于 min(ones, μ−ones)
    all_vars = np.arange(n)
    root_keys = np.minimum(ones, mu - ones)[:, None]
    root = _argmin_with_ties(
        root_keys,
        lambda idx: _plogp(ones[idx] / mu, base) + _plogp(1.0 - ones[idx] / mu, base),
        all_vars, rng)

    pi = np.empty(n, dtype=np.int64)
    pi[0] = root
    unused = np.ones(n, dtype=bool)
    unused[root] = False
    tables = np.empty((n, 2, 2), dtype=np.int64)   # 每个位置相对其前驱的联合计数
    tables[root] = 0

    for k in range(1, n):
        j = pi[k - 1]
        candidates = np.flatnonzero(unused)
        c11 = both[j, candidates]
        c01 = ones[j] - c11                           # X_i=0, X_j=1
        c10 = ones[candidates] - c11                  # X_i=1, X_j=0
        c00 = mu - ones[candidates] - ones[j] + c11
        cand_tables = np.stack([np.stack([c00, c01], axis=1), np.stack([c10, c11], axis=1)], axis=1)
        # 熵在交换 a 的取值与交换 b 的分支下不变，按此规范化计数键
        lo = np.minimum(cand_tables[:, 0, :], cand_tables[:, 1, :])
        hi = np.maximum(cand_tables[:, 0, :], cand_tables[:, 1, :])
        codes = np.sort(lo * (mu + 1) + hi, axis=1)
        chosen = _argmin_with_ties(
            codes,
            lambda idx: _conditional_entropies(cand_tables[idx], n, base),
            candidates, rng)
        pi[k] = chosen
        unused[chosen] = False
        tables[chosen] = cand_tables[np.searchsorted(candidates, chosen)]

    root_p = float(_clamp(ones[root] / mu, n, clamp))
    cond = np.full((n, 2), np.nan)
    marginal = ones / mu
    for k in range(1, n):
        table = tables[pi[k]]
        for b in (0, 1):
            branch = table[:, b].sum()
            if clamp == "one_sided":
                q1 = (table[1, b] / mu) / max(branch / mu, 1.0 / n)
            elif branch:
                q1 = table[1, b] / branch
            else:
                # 未观测到的分支退回到该变量的边缘频率
                q1 = marginal[pi[k]]
            cond[k, b] = _clamp(q1, n, clamp)
    cond[0] = root_p
    cond.setflags(write=False)
    pi.setflags(write=False)
    return ChainModel(pi=pi, root_p=root_p, cond=cond)


def mimic_sample(chain: ChainModel, rng: RngStream, size: int = 1) -> np.ndarray:
    """祖先采样：先抽根，再按链的顺序逐个抽取条件分布"""
    n = chain.n
    draws = rng.random((size, n))
    out = np.empty((size, n), dtype=np.uint8)
    prev = (draws[:, 0] < chain.root_p).astype(np.uint8)
    out[:, chain.pi[0]] = prev
    for k in range(1, n):
        bit = (draws[:, k] < chain.cond[k, prev]).astype(np.uint8)
        out[:, chain.pi[k]] = bit
        prev = bit
    return out


def _ranked_stats(ranked: SortedPopulation, mu: int) -> IterationStats | None:
    if ranked.fitness_name == "dlb" and ranked.genomes.shape[1] % 2 == 0:
        return block_stats(ranked, mu)
    return None


def mimic_step(ranked: SortedPopulation, config: EdaConfig, evaluate: Evaluator,
               rng: RngStream) -> tuple[SortedPopulation, ChainModel, IterationStats | None]:
    """取已排序种群的前 μ 个建链，采样并评估 λ 个新个体；返回排序后的新种群及其块统计"""
    n = ranked.genomes.shape[1]
    chain = mimic_build_chain(ranked.top(config.mu), n, rng,
                              config.entropy_log_base, config.mimic_clamp)
    offspring = mimic_sample(chain, rng, config.lam)
    next_ranked = sort_arrays(offspring, evaluate(offspring), rng, evaluate.name)
    return next_ranked, chain, _ranked_stats(next_ranked, config.mu)


class Mimic(Algorithm):
    name = "mimic"

    def __init__(self, n: int, fitness: FitnessFunction, rng: RngStream, config: EdaConfig):
        super().__init__(n, fitness, rng)
        config.validate()
        self.config = config
        self.ranked: SortedPopulation | None = None
        self.chain: ChainModel | None = None
        self.stats: IterationStats | None = None

    @property
    def offspring_per_step(self) -> int:
        return self.config.lam

    def initialize(self, evaluate: Evaluator) -> None:
        genomes = sample_uniform_population(self.config.lam, self.n, self.rng)
        self.ranked = sort_arrays(genomes, evaluate(genomes), self.rng, evaluate.name)
        self.stats = _ranked_stats(self.ranked, self.config.mu)

    def step(self, evaluate: Evaluator) -> None:
        self.ranked, self.chain, self.stats = mimic_step(self.ranked, self.config, evaluate, self.rng)
        if not self.chain.is_permutation():
            raise AssertionError(f"第 {self.generation} 次迭代的链顺序不是排列")
        self.generation += 1

    def snapshot(self) -> Snapshot:
        # 快照与块统计取自同一个排序后的种群
        return Snapshot(
            best_fitness=int(self.ranked.fitness[0]),
            correct_blocks=int(self.fitness.correct_blocks(self.ranked.genomes[:1])[0]),
            Z=None if self.stats is None else self.stats.Z,
            Z_star=None if self.stats is None else self.stats.Z_star,
        )
