"""优化算法抽象基类"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

from core import Evaluator, RngStream
from fitness import FitnessFunction


@dataclass
class Snapshot:
    """当前最优个体的摘要（供轨迹记录）"""
    best_fitness: int
    correct_blocks: int          # 最优个体的 φ
    Z: int | None = None         # 仅 EDA 在 DLB 上记录
    Z_star: int | None = None


class Algorithm(ABC):
    """种群式搜索算法：initialize 采样初始种群，step 推进一代"""

    name: str = ""

    def __init__(self, n: int, fitness: FitnessFunction, rng: RngStream):
        self.n = n
        self.fitness = fitness
        self.rng = rng
        self.generation = 0

    @abstractmethod
    def initialize(self, evaluate: Evaluator) -> None:
        """采样并评估初始种群"""
        ...

    @abstractmethod
    def step(self, evaluate: Evaluator) -> None:
        """推进一次迭代"""
        ...

    @abstractmethod
    def snapshot(self) -> Snapshot:
        ...

    @property
    def offspring_per_step(self) -> int:
        """每次迭代的评估次数"""
        return 1
