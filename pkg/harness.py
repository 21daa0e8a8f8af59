"""实验配置、重复运行与轨迹记录"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import psutil
import yaml

from algorithms import Algorithm
from algorithms.ea import VARIANTS, EaConfig, EvolutionaryAlgorithm, Selection
from algorithms.mimic import Mimic
from algorithms.umda import EdaConfig, Umda
from core import ConfigError, EvaluationBudget, Evaluator, RngStream
from fitness import FITNESS_IDS, get_fitness
from oracles import pressure_regime, selective_pressure

log = logging.getLogger(__name__)

ALGORITHMS = VARIANTS + ("umda", "mimic")
LAMBDA_RULES = ("n", "sqrt_log", "sqrt")
SWEEP_SAFETY_CAP = 10 ** 8
THREADS_ENV = "DLB_BENCH_THREADS"


# ── 种群规模规则 ──────────────────────────────


def resolve_lambda(spec, n: int) -> int:
    """λ 可以是整数，也可以是随 n 变化的规则（对数为自然对数）"""
    if isinstance(spec, bool):
        raise ConfigError(f"无效的 lambda: {spec}")
    if isinstance(spec, int):
        return spec
    if spec == "n":
        return n
    if spec == "sqrt":
        return max(2, round(math.sqrt(n)))
    if spec == "sqrt_log":
        return max(2, round(math.sqrt(n) * math.log(n)))
    raise ConfigError(f"无效的 lambda: {spec}（可选整数或 {', '.join(LAMBDA_RULES)}）")


def resolve_mu(spec, lam: int) -> int:
    if isinstance(spec, bool):
        raise ConfigError(f"无效的 mu: {spec}")
    if isinstance(spec, int):
        return spec
    if spec == "half":
        return max(1, lam // 2)
    raise ConfigError(f"无效的 mu: {spec}（可选整数或 half）")


def lambda_rule_of(n: int, lam: int) -> str | None:
    """反推 λ 所属的规则；都不符合时返回 None"""
    for rule in LAMBDA_RULES:
        if resolve_lambda(rule, n) == lam:
            return rule
    return None


# ── 配置 ──────────────────────────────────────


@dataclass(frozen=True)
class AlgorithmParams:
    mu: int | str = 1
    chi: float = 1.0
    p_c: float = 0.0
    selection: str = "tournament:2"
    crossover: str = "uniform"
    mimic_clamp: str = "two_sided"
    entropy_log_base: float = 2.0


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str
    fitness: str
    n_values: tuple[int, ...]
    budget: int | None
    repetitions: int = 1
    master_seed: int = 0
    width: int = 2
    trajectory_stride: int | None = None     # 默认 budget/200
    params: AlgorithmParams = field(default_factory=AlgorithmParams)
    lambda_specs: tuple = (1,)               # 扫描时可以有多个 λ 规则
    output_dir: str = "results"
    workers: int | None = None

    # ── 派生量 ──

    @property
    def stride(self) -> int:
        if self.trajectory_stride:
            return self.trajectory_stride
        return max(1, self.budget // 200)

    @property
    def is_sweep(self) -> bool:
        return len(self.n_values) > 1 or len(self.lambda_specs) > 1

    def sizes(self, n: int, lam_spec=None) -> tuple[int, int]:
        """给定 n 与 λ 规则时的 (μ, λ)"""
        lam = resolve_lambda(self.lambda_specs[0] if lam_spec is None else lam_spec, n)
        return resolve_mu(self.params.mu, lam), lam

    def ea_config(self, n: int, lam_spec=None) -> EaConfig:
        mu, lam = self.sizes(n, lam_spec)
        return EaConfig(
            variant=self.algorithm, mu=mu, lam=lam,
            chi=float(self.params.chi), p_c=float(self.params.p_c),
            selection=Selection.parse(self.params.selection),
            crossover=self.params.crossover,
        )

    def eda_config(self, n: int, lam_spec=None) -> EdaConfig:
        mu, lam = self.sizes(n, lam_spec)
        return EdaConfig(self.algorithm, mu, lam,
                         entropy_log_base=float(self.params.entropy_log_base),
                         mimic_clamp=self.params.mimic_clamp)

    # ── 校验 ──

    def validate(self) -> ExperimentConfig:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"未知算法: {self.algorithm}（可选: {', '.join(ALGORITHMS)}）")
        if self.fitness not in FITNESS_IDS:
            raise ConfigError(f"未知适应度函数: {self.fitness}（可选: {', '.join(FITNESS_IDS)}）")
        get_fitness(self.fitness, self.width)
        if self.repetitions < 1:
            raise ConfigError(f"repetitions 必须 ≥ 1，收到 {self.repetitions}")
        if self.master_seed < 0:
            raise ConfigError("master_seed 必须非负")
        if self.budget is None or self.budget < 1:
            raise ConfigError("必须给出正的评估预算 budget")
        if self.trajectory_stride is not None and self.trajectory_stride < 1:
            raise ConfigError("trajectory_stride 必须 ≥ 1")
        if not self.n_values:
            raise ConfigError("至少需要一个问题规模 n")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ConfigError(f"n 的扫描列表必须严格递增: {list(self.n_values)}")
        if not self.lambda_specs:
            raise ConfigError("至少需要一个 lambda")
        for n in self.n_values:
            if n < 1 or (self.fitness == "dlb" and n % self.width):
                raise ConfigError(f"n={n} 必须为正且是块宽度 {self.width} 的整数倍")
            for spec in self.lambda_specs:
                mu, lam = self.sizes(n, spec)
                if lam < 1 or mu < 1:
                    raise ConfigError(f"n={n} 时 μ={mu}, λ={lam} 无效")
                if self.budget < lam:
                    raise ConfigError(f"预算 {self.budget} 小于 λ={lam}")
                if self.algorithm in ALGORITHMS[-2:]:
                    self.eda_config(n, spec).validate()
                else:
                    self.ea_config(n, spec).validate(n)
        return self

    def with_overrides(self, seed: int | None = None, out: str | None = None) -> ExperimentConfig:
        changes = {}
        if seed is not None:
            changes["master_seed"] = seed
        if out is not None:
            changes["output_dir"] = out
        return replace(self, **changes).validate() if changes else self

    def for_sweep(self) -> ExperimentConfig:
        """扫描时未给预算则使用安全上限，超过上限的预算被截到上限"""
        if self.budget is None or self.budget > SWEEP_SAFETY_CAP:
            if self.budget is not None:
                log.warning("预算 %d 超过扫描安全上限，已截到 %d", self.budget, SWEEP_SAFETY_CAP)
            return replace(self, budget=SWEEP_SAFETY_CAP).validate()
        return self.validate()

    # ── 读取 ──

    @classmethod
    def from_dict(cls, doc: dict, sweep: bool = False) -> ExperimentConfig:
        if not isinstance(doc, dict):
            raise ConfigError("配置文档必须是键值结构")
        exp = doc.get("experiment") or {}
        raw = doc.get("params") or {}
        output = doc.get("output") or {}
        run = doc.get("run") or {}
        try:
            if "n_values" in exp:
                n_values = tuple(int(v) for v in exp["n_values"])
            elif "n" in exp:
                n_values = (int(exp["n"]),)
            else:
                raise ConfigError("experiment 中缺少 n 或 n_values")
            lam_raw = raw.get("lambda", 1)
            lambda_specs = tuple(lam_raw) if isinstance(lam_raw, list) else (lam_raw,)
            params = AlgorithmParams(
                mu=raw.get("mu", 1),
                chi=float(raw.get("chi", 1.0)),
                p_c=float(raw.get("p_c", 0.0)),
                selection=str(raw.get("selection", "tournament:2")),
                crossover=str(raw.get("crossover", "uniform")),
                mimic_clamp=str(raw.get("mimic_clamp", "two_sided")),
                entropy_log_base=float(raw.get("entropy_log_base", 2.0)),
            )
            budget = exp.get("budget")
            config = cls(
                algorithm=str(exp.get("algorithm", "")),
                fitness=str(exp.get("fitness", "dlb")),
                n_values=n_values,
                budget=None if budget is None else int(budget),
                repetitions=int(exp.get("repetitions", 1)),
                master_seed=int(exp.get("master_seed", 0)),
                width=int(exp.get("width", 2)),
                trajectory_stride=None if exp.get("trajectory_stride") is None else int(exp["trajectory_stride"]),
                params=params,
                lambda_specs=lambda_specs,
                output_dir=str(output.get("dir", "results")),
                workers=None if run.get("workers") is None else int(run["workers"]),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"配置字段类型错误: {e}") from e
        if sweep:
            return config.for_sweep()
        return config.validate()


def load_config(path: str, sweep: bool = False) -> ExperimentConfig:
    """加载 YAML（或 JSON）实验配置"""
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"配置文件不存在: {config_path.absolute()}")
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            doc = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"配置文件解析失败: {config_path} ({e})") from e
    config = ExperimentConfig.from_dict(doc, sweep=sweep)
    log.info("配置已加载: %s", config_path)
    return config


def resolve_workers(config: ExperimentConfig) -> int:
    """线程数：环境变量优先，其次配置文件，最后取物理核心数"""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} 必须是正整数，收到 {raw!r}") from None
        if workers < 1:
            raise ConfigError(f"{THREADS_ENV} 必须是正整数，收到 {raw!r}")
        return workers
    if config.workers:
        return config.workers
    return psutil.cpu_count(logical=False) or 1


def build_algorithm(config: ExperimentConfig, n: int, rng: RngStream, lam_spec=None) -> Algorithm:
    """根据配置中的算法标识创建算法实例"""
    fitness = get_fitness(config.fitness, config.width)
    if config.algorithm == "umda":
        return Umda(n, fitness, rng, config.eda_config(n, lam_spec))
    if config.algorithm == "mimic":
        return Mimic(n, fitness, rng, config.eda_config(n, lam_spec))
    if config.algorithm in VARIANTS:
        return EvolutionaryAlgorithm(n, fitness, rng, config.ea_config(n, lam_spec))
    raise ConfigError(f"未知算法: {config.algorithm}")


# ── 运行记录 ──────────────────────────────────


@dataclass(frozen=True)
class RunRecord:
    run_id: int
    algorithm: str
    fitness: str
    n: int
    mu: int
    lam: int
    seed: int
    evals_to_optimum: int | None      # 预算耗尽时为空
    best_fitness: int
    correct_blocks: int

    @property
    def solved(self) -> bool:
        return self.evals_to_optimum is not None


@dataclass(frozen=True)
class TrajectoryPoint:
    run_id: int
    t: int
    correct_blocks: int
    best_fitness: int
    Z: int | None = None
    Z_star: int | None = None


@dataclass(frozen=True)
class Job:
    run_id: int
    n: int
    lam_spec: object


def run_repetition(config: ExperimentConfig, job: Job) -> tuple[RunRecord, list[TrajectoryPoint]]:
    """执行一次独立重复；随机流由 (master_seed, run_id) 唯一确定"""
    rng = RngStream(config.master_seed, job.run_id)
    algorithm = build_algorithm(config, job.n, rng, job.lam_spec)
    mu, lam = config.sizes(job.n, job.lam_spec)
    budget = EvaluationBudget(config.budget)
    evaluate = Evaluator(algorithm.fitness, budget)

    points: list[TrajectoryPoint] = []
    stride = config.stride
    next_t = stride

    def record(snap, upto: int):
        nonlocal next_t
        while next_t <= min(upto, config.budget):
            points.append(TrajectoryPoint(job.run_id, next_t, snap.correct_blocks,
                                          snap.best_fitness, snap.Z, snap.Z_star))
            next_t += stride

    algorithm.initialize(evaluate)
    snap = algorithm.snapshot()
    record(snap, budget.used)
    while not budget.done:
        before = budget.used
        algorithm.step(evaluate)
        if budget.used - before != algorithm.offspring_per_step:
            raise AssertionError(f"{algorithm.name} 一次迭代计费 {budget.used - before} 次，"
                                 f"应为 {algorithm.offspring_per_step}")
        snap = algorithm.snapshot()
        record(snap, budget.used)

    # 找到最优解后用终值补齐剩余采样点
    if budget.hit_optimum_at is not None:
        record(snap, config.budget)

    result = RunRecord(
        run_id=job.run_id, algorithm=config.algorithm, fitness=config.fitness,
        n=job.n, mu=mu, lam=lam, seed=config.master_seed,
        evals_to_optimum=budget.hit_optimum_at,
        best_fitness=snap.best_fitness, correct_blocks=snap.correct_blocks,
    )
    if result.solved:
        log.debug("run %d: n=%d 在第 %d 次评估找到最优解", job.run_id, job.n, result.evals_to_optimum)
    else:
        log.debug("run %d: n=%d 预算耗尽，最优个体 φ=%d", job.run_id, job.n, result.correct_blocks)
    return result, points


def plan_jobs(config: ExperimentConfig) -> list[Job]:
    jobs = []
    for spec in config.lambda_specs:
        for n in config.n_values:
            for _ in range(config.repetitions):
                jobs.append(Job(len(jobs), n, spec))
    return jobs


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> tuple[list[RunRecord], list[TrajectoryPoint]]:
    """并行执行全部重复；结果按 run_id 排列，与调度顺序无关"""
    jobs = plan_jobs(config)
    workers = workers or resolve_workers(config)

    log.info("=" * 50)
    log.info("实验开始: %s on %s", config.algorithm, config.fitness)
    log.info("n = %s, λ = %s, 重复 %d 次, 预算 %d, 种子 %d",
             list(config.n_values), list(config.lambda_specs), config.repetitions,
             config.budget, config.master_seed)
    log.info("线程数: %d (物理核心 %s, 内存占用 %.1f%%)",
             workers, psutil.cpu_count(logical=False), psutil.virtual_memory().percent)
    if config.algorithm == "umda":
        for spec in config.lambda_specs:
            for n in config.n_values:
                mu, lam = config.sizes(n, spec)
                log.info("n=%d: γ* = %.4f, 选择压力区间: %s",
                         n, selective_pressure(mu, lam), pressure_regime(mu, lam))
    log.info("=" * 50)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda job: run_repetition(config, job), jobs))

    records = [r for r, _ in results]
    points = [p for _, ps in results for p in ps]
    solved = sum(r.solved for r in records)
    log.info("实验结束: %d/%d 次运行找到最优解", solved, len(records))
    capped = [r.run_id for r in records if not r.solved]
    if capped and config.is_sweep:
        log.warning("%d 次运行达到评估上限 %d 仍未找到最优解: run_id %s",
                    len(capped), config.budget, capped[:20])
    return records, points
