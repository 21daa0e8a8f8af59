"""变异型进化算法与遗传算法

变体标识: "1+lambda", "mu+1", "mu,lambda", "ga"
选择标识: "tournament:k", "comma", "linrank:eta", "exprank:eta"
交叉标识: "uniform", "one_point"

排名选择的概率（r 为从 0 开始的名次，同分者已随机打乱）：
  linrank: p(r) = (η − 2(η−1)·r/(λ−1)) / λ，η ∈ (1, 2]
  exprank: p(r) ∝ exp(−η·r/λ)，η > 1，在 λ 个名次上归一化
  tournament:k 为有放回抽取 k 个个体取名次最好者
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from algorithms import Algorithm, Snapshot
from core import (ConfigError, Evaluator, InvalidParameter, RngStream,
                  SortedPopulation, sample_uniform_population, sort_arrays,
                  tiebreak_order)
from fitness import FitnessFunction

log = logging.getLogger(__name__)

VARIANTS = ("1+lambda", "mu+1", "mu,lambda", "ga")
CROSSOVERS = ("uniform", "one_point")


# ── 配置 ──────────────────────────────────────


@dataclass(frozen=True)
class Selection:
    kind: str                    # tournament | comma | linrank | exprank
    param: float | None = None   # k 或 η

    @classmethod
    def parse(cls, text: str) -> Selection:
        """解析 "tournament:2" 之类的选择标识"""
        kind, _, raw = str(text).strip().partition(":")
        if kind == "comma":
            if raw:
                raise ConfigError(f"comma 选择不带参数: {text}")
            return cls("comma")
        if kind not in ("tournament", "linrank", "exprank"):
            raise ConfigError(f"未知选择机制: {text}")
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"选择机制缺少数值参数: {text}") from None
        if kind == "tournament":
            if value < 1 or value != int(value):
                raise ConfigError(f"锦标赛规模 k 必须是正整数: {text}")
            return cls(kind, int(value))
        if kind == "linrank" and not 1.0 < value <= 2.0:
            raise ConfigError(f"线性排名参数 η 必须在 (1, 2] 内: {text}")
        if kind == "exprank" and value <= 1.0:
            raise ConfigError(f"指数排名参数 η 必须 > 1: {text}")
        return cls(kind, value)

    def __str__(self) -> str:
        if self.kind == "comma":
            return "comma"
        param = int(self.param) if self.kind == "tournament" else self.param
        return f"{self.kind}:{param}"


@dataclass(frozen=True)
class EaConfig:
    variant: str
    mu: int = 1
    lam: int = 1
    chi: float = 1.0
    p_c: float = 0.0
    selection: Selection = field(default_factory=lambda: Selection("tournament", 2))
    crossover: str = "uniform"

    def rate(self, n: int) -> float:
        return self.chi / n

    def validate(self, n: int) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError(f"未知 EA 变体: {self.variant}（可选: {', '.join(VARIANTS)}）")
        if not 0.0 < self.chi < n / 2:
            raise ConfigError(f"变异参数 χ 必须在 (0, n/2) 内，收到 χ={self.chi}, n={n}")
        if not 0.0 <= self.p_c <= 1.0:
            raise ConfigError(f"交叉率 p_c 必须在 [0,1] 内，收到 {self.p_c}")
        if self.mu < 1 or self.lam < 1:
            raise ConfigError("μ 与 λ 必须 ≥ 1")
        if self.crossover not in CROSSOVERS:
            raise ConfigError(f"未知交叉算子: {self.crossover}")
        comma = self.variant == "mu,lambda" or (self.variant == "ga" and self.selection.kind == "comma")
        if comma and self.mu >= self.lam and not (self.mu == self.lam == 1):
            raise ConfigError(f"逗号选择要求 μ < λ，收到 μ={self.mu}, λ={self.lam}")


@dataclass
class EaState:
    """按适应度降序存放的种群"""
    genomes: np.ndarray
    fitness: np.ndarray

    @property
    def size(self) -> int:
        return int(self.fitness.shape[0])


# ── 变异与交叉 ────────────────────────────────


def mutate_bitwise(x: np.ndarray, rate: float, rng: RngStream) -> np.ndarray:
    """逐位独立以概率 rate 翻转（x 可为单个位串或矩阵）"""
    if not 0.0 <= rate <= 1.0:
        raise InvalidParameter(f"变异率必须在 [0,1] 内，收到 {rate}")
    x = np.asarray(x, dtype=np.uint8)
    flips = rng.random(x.shape) < rate
    return x ^ flips.astype(np.uint8)


def uniform_crossover(x: np.ndarray, y: np.ndarray, rng: RngStream) -> np.ndarray:
    mask = rng.random(x.shape) < 0.5
    return np.where(mask, x, y).astype(np.uint8)


def one_point_crossover(x: np.ndarray, y: np.ndarray, rng: RngStream) -> np.ndarray:
    x = np.atleast_2d(x)
    y = np.atleast_2d(y)
    rows, n = x.shape
    if n < 2:
        return x.copy()
    cuts = rng.integers(1, n, size=rows)
    mask = np.arange(n)[None, :] < cuts[:, None]
    return np.where(mask, x, y).astype(np.uint8)


def crossover(kind: str, x: np.ndarray, y: np.ndarray, rng: RngStream) -> np.ndarray:
    if kind == "uniform":
        return uniform_crossover(x, y, rng)
    if kind == "one_point":
        return one_point_crossover(x, y, rng)
    raise ConfigError(f"未知交叉算子: {kind}")


# ── 选择 ──────────────────────────────────────


def selection_probabilities(selection: Selection, lam: int, mu: int = 1) -> np.ndarray:
    """按名次给出被选中的概率（下标 0 为最好）"""
    ranks = np.arange(lam, dtype=float)
    if selection.kind == "tournament":
        k = int(selection.param)
        return ((lam - ranks) ** k - (lam - ranks - 1) ** k) / float(lam) ** k
    if selection.kind == "comma":
        probs = np.zeros(lam)
        probs[:mu] = 1.0 / mu
        return probs
    if selection.kind == "linrank":
        if lam == 1:
            return np.ones(1)
        eta = selection.param
        return (eta - 2.0 * (eta - 1.0) * ranks / (lam - 1)) / lam
    if selection.kind == "exprank":
        weights = np.exp(-selection.param * ranks / lam)
        return weights / weights.sum()
    raise ConfigError(f"未知选择机制: {selection.kind}")


def select_parents(fitness: np.ndarray, selection: Selection, count: int,
                   rng: RngStream, mu: int = 1) -> np.ndarray:
    """返回被选中个体在种群中的下标"""
    lam = int(fitness.shape[0])
    order = tiebreak_order(fitness, rng)
    if selection.kind == "tournament":
        rank_of = np.empty(lam, dtype=np.int64)
        rank_of[order] = np.arange(lam)
        draws = rng.integers(0, lam, size=(count, int(selection.param)))
        winners = np.argmin(rank_of[draws], axis=1)
        return draws[np.arange(count), winners]
    if selection.kind == "comma":
        return order[rng.integers(0, min(mu, lam), size=count)]
    probs = selection_probabilities(selection, lam, mu)
    return order[rng.generator.choice(lam, size=count, p=probs)]


# ── 单步 ──────────────────────────────────────


def step_mu_comma_lambda(state: EaState, config: EaConfig, rng: RngStream,
                         evaluate: Evaluator) -> tuple[EaState, SortedPopulation]:
    """(μ,λ) EA：λ 个子代各由均匀选出的父代变异而来，下一代取子代中最好的 μ 个"""
    n = state.genomes.shape[1]
    parents = rng.integers(0, state.size, size=config.lam)
    offspring = mutate_bitwise(state.genomes[parents], config.rate(n), rng)
    ranked = sort_arrays(offspring, evaluate(offspring), rng, evaluate.name)
    survivors = EaState(ranked.genomes[:config.mu].copy(), ranked.fitness[:config.mu].copy())
    return survivors, ranked


def step_one_plus_lambda(state: EaState, config: EaConfig, rng: RngStream,
                         evaluate: Evaluator) -> EaState:
    """(1+λ) EA：最好的变异体不差于当前解时替换（同分优先变异体）"""
    n = state.genomes.shape[1]
    mutants = mutate_bitwise(np.repeat(state.genomes[:1], config.lam, axis=0), config.rate(n), rng)
    values = evaluate(mutants)
    best = int(tiebreak_order(values, rng)[0])
    if values[best] >= state.fitness[0]:
        return EaState(mutants[best:best + 1].copy(), values[best:best + 1].copy())
    return state


def step_mu_plus_one(state: EaState, config: EaConfig, rng: RngStream,
                     evaluate: Evaluator) -> EaState:
    """(μ+1) EA：均匀选父代变异出一个子代，在最差者中均匀删除一个"""
    n = state.genomes.shape[1]
    j = int(rng.integers(0, state.size))
    child = mutate_bitwise(state.genomes[j:j + 1], config.rate(n), rng)
    value = evaluate(child)
    genomes = np.vstack([state.genomes, child])
    fitness = np.concatenate([state.fitness, value])
    worst = np.flatnonzero(fitness == fitness.min())
    drop = rng.choice_index(worst)
    keep = np.delete(np.arange(fitness.shape[0]), drop)
    genomes, fitness = genomes[keep], fitness[keep]
    order = np.argsort(-fitness, kind="stable")
    return EaState(genomes[order], fitness[order])


def ga_step(state: EaState, config: EaConfig, rng: RngStream, evaluate: Evaluator) -> EaState:
    """遗传算法：以概率 p_c 对两个选出的父代交叉后变异，否则只变异一个父代"""
    n = state.genomes.shape[1]
    lam = config.lam
    first = select_parents(state.fitness, config.selection, lam, rng, config.mu)
    children = state.genomes[first].copy()
    crossing = np.flatnonzero(rng.random(lam) < config.p_c)
    if crossing.size:
        mates = select_parents(state.fitness, config.selection, crossing.size, rng, config.mu)
        children[crossing] = crossover(config.crossover, children[crossing], state.genomes[mates], rng)
    children = mutate_bitwise(children, config.rate(n), rng)
    values = evaluate(children)
    order = np.argsort(-values, kind="stable")
    return EaState(children[order], values[order])


# ── 算法封装 ──────────────────────────────────


class EvolutionaryAlgorithm(Algorithm):
    def __init__(self, n: int, fitness: FitnessFunction, rng: RngStream, config: EaConfig):
        super().__init__(n, fitness, rng)
        config.validate(n)
        self.config = config
        self.name = config.variant
        self.state: EaState | None = None

    @property
    def initial_size(self) -> int:
        return {"1+lambda": 1, "mu+1": self.config.mu,
                "mu,lambda": self.config.mu, "ga": self.config.lam}[self.config.variant]

    @property
    def offspring_per_step(self) -> int:
        return 1 if self.config.variant == "mu+1" else self.config.lam

    def initialize(self, evaluate: Evaluator) -> None:
        genomes = sample_uniform_population(self.initial_size, self.n, self.rng)
        values = evaluate(genomes)
        order = np.argsort(-values, kind="stable")
        self.state = EaState(genomes[order], values[order])

    def step(self, evaluate: Evaluator) -> None:
        variant = self.config.variant
        if variant == "mu,lambda":
            self.state, _ = step_mu_comma_lambda(self.state, self.config, self.rng, evaluate)
        elif variant == "1+lambda":
            self.state = step_one_plus_lambda(self.state, self.config, self.rng, evaluate)
        elif variant == "mu+1":
            self.state = step_mu_plus_one(self.state, self.config, self.rng, evaluate)
        else:
            self.state = ga_step(self.state, self.config, self.rng, evaluate)
        self.generation += 1

    def snapshot(self) -> Snapshot:
        best = self.state.genomes[:1]
        return Snapshot(
            best_fitness=int(self.state.fitness[0]),
            correct_blocks=int(self.fitness.correct_blocks(best)[0]),
        )
