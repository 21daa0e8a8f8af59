"""分析量的插桩与界公式的数值校验

块统计的下标约定（m = n/2 个块，块号 i 从 1 开始）：
  C[i]  至少 i 个前导 11 的个体数，C[0] = λ
  D[i]  恰好 i−1 个前导 11 后接 00 的个体数
  E[i]  恰好 i−1 个前导 11 后接 10 的个体数
  F[i]  恰好 i−1 个前导 11 后接 01 的个体数
  D/E/F 的下标 0 不使用（恒为 0）
  X[k]  μ 个最优个体中第 k 位（从 0 开始）为 1 的个数
  Y[j]  μ 个最优个体中第 j+1 块为 11 的个数
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from core import InvalidParameter, RngStream, SortedPopulation, sample_binomial, sort_arrays
from fitness import dlb_batch

log = logging.getLogger(__name__)

Z_LIMIT = 4.0
TRAP_PRESSURE = 14 / 1000


class InapplicableBound(ValueError):
    """公式超出其适用范围"""


# ── 块统计 ────────────────────────────────────


@dataclass(frozen=True)
class IterationStats:
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    F: np.ndarray
    Z: int
    Z_star: int
    X: np.ndarray
    Y: np.ndarray
    mu: int

    @property
    def m(self) -> int:
        return int(self.C.shape[0]) - 1


def _block_codes(genomes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """返回 (每个个体的 φ, 每块编码 2·x_{2i−1} + x_{2i})"""
    lam, n = genomes.shape
    pairs = genomes.reshape(lam, n // 2, 2).astype(np.int64)
    codes = 2 * pairs[:, :, 0] + pairs[:, :, 1]
    phi = np.cumprod(codes == 3, axis=1, dtype=np.int64).sum(axis=1)
    return phi, codes


def block_stats(pop: SortedPopulation, mu: int) -> IterationStats:
    """按定义精确统计 C/D/E、Z、Z* 以及 μ 个最优个体中的 X、Y"""
    if pop.fitness_name != "dlb":
        raise InvalidParameter(f"块统计只对 DLB 有定义，收到 {pop.fitness_name or '未标注'}")
    lam, n = pop.genomes.shape
    if n % 2:
        raise InvalidParameter(f"块统计要求 n 为偶数，收到 {n}")
    if not 1 <= mu <= lam:
        raise InvalidParameter(f"μ 必须在 [1, λ] 内，收到 μ={mu}, λ={lam}")
    m = n // 2
    phi, codes = _block_codes(pop.genomes)

    C = np.array([(phi >= i).sum() for i in range(m + 1)], dtype=np.int64)
    D = np.zeros(m + 1, dtype=np.int64)
    E = np.zeros(m + 1, dtype=np.int64)
    F = np.zeros(m + 1, dtype=np.int64)
    open_rows = np.flatnonzero(phi < m)
    if open_rows.size:
        active = codes[open_rows, phi[open_rows]]
        blocks = phi[open_rows] + 1
        D += np.bincount(blocks[active == 0], minlength=m + 1)
        E += np.bincount(blocks[active == 2], minlength=m + 1)
        F += np.bincount(blocks[active == 1], minlength=m + 1)

    Z = int(np.flatnonzero(C >= mu).max())
    Z_star = int(np.flatnonzero(C > 0).max())
    top = pop.genomes[:mu]
    X = top.sum(axis=0, dtype=np.int64)
    Y = (codes[:mu] == 3).sum(axis=0, dtype=np.int64)
    return IterationStats(C=C, D=D, E=E, F=F, Z=Z, Z_star=Z_star, X=X, Y=Y, mu=mu)


def check_block_identities(stats: IterationStats) -> list[str]:
    """检查块统计恒等式，返回违例描述（空表示全部成立）"""
    problems = []
    C, m, mu = stats.C, stats.m, stats.mu
    if np.any(np.diff(C) > 0):
        problems.append("C 不是非增序列")
    for i in range(1, m + 1):
        if C[i - 1] != C[i] + stats.D[i] + stats.E[i] + stats.F[i]:
            problems.append(f"块 {i} 的划分恒等式不成立")
    if stats.Z > stats.Z_star:
        problems.append("Z > Z*")
    if C[stats.Z] < mu or (stats.Z < m and C[stats.Z + 1] >= mu):
        problems.append("Z 的定义不等式不成立")
    if C[stats.Z_star] <= 0 or (stats.Z_star < m and C[stats.Z_star + 1] != 0):
        problems.append("Z* 的定义不等式不成立")
    if np.any(stats.X < 0) or np.any(stats.X > mu) or np.any(stats.Y < 0) or np.any(stats.Y > mu):
        problems.append("X 或 Y 超出 [0, μ]")
    return problems


# ── 公式计算 ──────────────────────────────────


def selective_pressure(mu: int, lam: int) -> float:
    if not 1 <= mu <= lam:
        raise InvalidParameter(f"要求 1 ≤ μ ≤ λ，收到 μ={mu}, λ={lam}")
    return mu / lam


def pressure_regime(mu: int, lam: int) -> str:
    """UMDA 分析的选择压区间：extreme（λ ≥ eμ²）、trap（μ/λ ≥ 14/1000）或 open"""
    if lam >= math.e * mu * mu:
        return "extreme"
    if selective_pressure(mu, lam) >= TRAP_PRESSURE:
        return "trap"
    return "open"


def theta(mu: int, lam: int, epsilon: float) -> float:
    """陷阱阈值 θ = (μ²/λ)(1−ε)"""
    if not 0 < mu <= lam:
        raise InvalidParameter(f"要求 0 < μ ≤ λ，收到 μ={mu}, λ={lam}")
    if not 0.0 <= epsilon < 1.0:
        raise InvalidParameter(f"ε 必须在 [0,1) 内，收到 {epsilon}")
    return mu * mu / lam * (1.0 - epsilon)


def trap_tail_bound(c_var: float, gamma_star: float) -> float:
    """Var[X] ≥ cμ² 时 Pr(X ≤ θ) 的下界，截断到 0"""
    shift = (0.5 - gamma_star) ** 2
    denominator = 1.0 - 4.0 * shift
    if denominator <= 0.0:
        raise InapplicableBound(f"γ*={gamma_star} 时分母 {denominator:.4g} ≤ 0")
    return max(0.0, 2.0 * (c_var - shift) / denominator)


def z0_expectation_bound(lam: int, mu: int | None = None) -> float:
    """初始种群中 E[Z₀*] 的上界 (1+ln λ)/ln 4；给出 μ 时为 E[Z₀] 的上界"""
    if lam < 1:
        raise InvalidParameter(f"λ 必须 ≥ 1，收到 {lam}")
    size = lam if mu is None else lam - mu + 1
    if size < 1:
        raise InvalidParameter(f"要求 μ ≤ λ，收到 μ={mu}, λ={lam}")
    return (1.0 + math.log(size)) / math.log(4.0)


@dataclass(frozen=True)
class LevelBound:
    bound: float                 # E[T] 的上界
    g3_satisfied: bool
    lambda_min: float            # 条件 (G3) 要求的最小 λ


def level_based_bound(z, delta: float, lam: int, gamma0: float, m: int | None = None) -> LevelBound:
    """按层级方法计算 (G3) 阈值与 E[T] 上界；z 含 z_1..z_{m−1}"""
    z = np.asarray(z, dtype=float)
    if z.size == 0:
        raise InvalidParameter("z 不能为空")
    if m is None:
        m = z.size + 1
    if z.size != m - 1:
        raise InvalidParameter(f"z 的长度应为 m−1={m - 1}，收到 {z.size}")
    if np.any(z <= 0) or np.any(z > 1):
        raise InvalidParameter("每个 z_j 必须在 (0,1] 内")
    if not 0.0 < delta <= 1.0:
        raise InvalidParameter(f"δ 必须在 (0,1] 内，收到 {delta}")
    if not 0.0 < gamma0 < 1.0:
        raise InvalidParameter(f"γ₀ 必须在 (0,1) 内，收到 {gamma0}")
    z_min = float(z.min())
    lambda_min = 4.0 / (gamma0 * delta ** 2) * math.log(128.0 * m / (z_min * delta ** 2))
    terms = lam * np.log(6.0 * delta * lam / (4.0 + z * delta * lam)) + 1.0 / z
    bound = 8.0 / delta ** 2 * float(terms.sum())
    return LevelBound(bound=bound, g3_satisfied=lam >= lambda_min, lambda_min=lambda_min)


@dataclass(frozen=True)
class LevelParams:
    z: np.ndarray
    delta: float
    gamma0: float
    m: int


def comma_ea_level_params(n: int, chi: float, mu: int, lam: int) -> LevelParams:
    """(μ,λ) EA 在 DLB 上的层级参数：z_j = e^{−χ}χ²/n²，δ = e^{−2χ}/γ₀ − 1"""
    gamma0 = mu / lam
    delta = min(1.0, math.exp(-2.0 * chi) / gamma0 - 1.0)
    if delta <= 0.0:
        raise InapplicableBound(f"μ/λ={gamma0:.4g} 超过 e^(−2χ)，条件 (G2) 不成立")
    m = n // 2 + 1
    z = np.full(m - 1, math.exp(-chi) * chi * chi / (n * n))
    return LevelParams(z=z, delta=delta, gamma0=gamma0, m=m)


def umda_high_pressure_level_params(n: int, mu: int, lam: int) -> LevelParams:
    """极高选择压下 UMDA 的层级参数：z_j = 1/(en²)，δ = λ/(eμ²) − 1"""
    gamma0 = mu / lam
    delta = min(1.0, lam / (math.e * mu * mu) - 1.0)
    if delta <= 0.0:
        raise InapplicableBound(f"λ={lam} < eμ²={math.e * mu * mu:.1f}，条件 (G2) 不成立")
    m = n // 2 + 1
    z = np.full(m - 1, 1.0 / (math.e * n * n))
    return LevelParams(z=z, delta=delta, gamma0=gamma0, m=m)


# ── 蒙特卡洛校验 ──────────────────────────────


@dataclass
class Check:
    name: str
    expected: float
    observed: float
    z_score: float
    passed: bool
    note: str = ""


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    def add_mean(self, name: str, expected: float, samples: np.ndarray, note: str = "") -> Check:
        """比较样本均值与理论值，|z| ≤ 4 记为通过"""
        samples = np.asarray(samples, dtype=float)
        observed = float(samples.mean())
        z = _z_score(observed, expected, float(samples.std(ddof=1)) if samples.size > 1 else 0.0, samples.size)
        check = Check(name, float(expected), observed, z, abs(z) <= Z_LIMIT, note)
        self.checks.append(check)
        return check

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def extend(self, other: Report) -> Report:
        self.checks.extend(other.checks)
        return self

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [{k: _json_number(v) for k, v in asdict(c).items()} for c in self.checks],
        }


def _json_number(value):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def _z_score(observed: float, expected: float, sd: float, count: int) -> float:
    if sd == 0.0 or count == 0:
        return 0.0 if math.isclose(observed, expected, rel_tol=1e-12, abs_tol=1e-12) else math.inf
    return (observed - expected) / (sd / math.sqrt(count))


def _chunks(total: int, size: int):
    start = 0
    while start < total:
        yield start, min(size, total - start)
        start += size


def sample_block_counts(p: np.ndarray, lam: int, trials: int, rng: RngStream,
                        chunk: int = 256) -> dict[str, np.ndarray]:
    """在固定模型下重复采样 λ 个个体，返回每次试验的 C/D/E（trials × (m+1)）"""
    n = p.shape[0]
    m = n // 2
    out = {k: np.zeros((trials, m + 1), dtype=np.int64) for k in ("C", "D", "E")}
    for index, (start, size) in enumerate(_chunks(trials, chunk)):
        stream = rng.spawn(index)
        genomes = stream.bernoulli(p, (size, lam, n))
        pairs = genomes.reshape(size, lam, m, 2).astype(np.int64)
        codes = 2 * pairs[..., 0] + pairs[..., 1]
        phi = np.cumprod(codes == 3, axis=2).sum(axis=2)
        for i in range(m + 1):
            out["C"][start:start + size, i] = (phi >= i).sum(axis=1)
        for i in range(1, m + 1):
            at_block = phi == i - 1
            active = codes[:, :, i - 1]
            out["D"][start:start + size, i] = (at_block & (active == 0)).sum(axis=1)
            out["E"][start:start + size, i] = (at_block & (active == 2)).sum(axis=1)
    return out


def expected_block_counts(p: np.ndarray, lam: int) -> dict[str, np.ndarray]:
    """C/D/E 的理论期望：E[C_i] = E[C_{i−1}]·p_{2i−1}p_{2i} 等"""
    m = p.shape[0] // 2
    a, b = p[0::2], p[1::2]
    C = np.empty(m + 1)
    C[0] = lam
    C[1:] = lam * np.cumprod(a * b)
    D = np.zeros(m + 1)
    E = np.zeros(m + 1)
    D[1:] = C[:-1] * (1 - a) * (1 - b)
    E[1:] = C[:-1] * a * (1 - b)
    return {"C": C, "D": D, "E": E}


def verify_block_distributions(p, mu: int, lam: int, trials: int, rng: RngStream,
                               blocks: int | None = None) -> Report:
    """固定模型下 C/D/E 的蒙特卡洛均值与闭式期望比较"""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.shape[0] % 2:
        raise InvalidParameter("模型长度必须为偶数")
    if not 1 <= mu <= lam:
        raise InvalidParameter(f"要求 1 ≤ μ ≤ λ，收到 μ={mu}, λ={lam}")
    counts = sample_block_counts(p, lam, trials, rng)
    expected = expected_block_counts(p, lam)
    m = p.shape[0] // 2
    report = Report()
    for i in range(1, min(m, blocks or m) + 1):
        for key in ("C", "D", "E"):
            report.add_mean(f"block_{key}{i}", expected[key][i], counts[key][:, i],
                            note=f"λ={lam}, trials={trials}")
    return report


def verify_selected_block_laws(p, mu: int, lam: int, trials: int, rng: RngStream,
                               block: int) -> Report:
    """在 Z_t ≤ block−2 的迭代上检查 Y_{t,j} ~ Bin(μ, p_{2j−1}p_{2j}) 与 X_{t,i} ~ Bin(μ, p_i)"""
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    Y, X = [], []
    for trial in range(trials):
        stream = rng.spawn(trial)
        genomes = stream.bernoulli(p, (lam, n))
        ranked = sort_arrays(genomes, dlb_batch(genomes), stream, "dlb")
        stats = block_stats(ranked, mu)
        if block >= stats.Z + 2:
            Y.append(stats.Y[block - 1])
            X.append(stats.X[2 * block - 1])
    report = Report()
    if not Y:
        report.add(Check(f"selected_Y{block}", 0.0, 0.0, 0.0, True, "没有满足条件的迭代"))
        return report
    q = p[2 * block - 2] * p[2 * block - 1]
    r = p[2 * block - 1]
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    report.add_mean(f"selected_Y{block}_mean", mu * q, Y, note=f"{Y.size} 次迭代满足条件")
    report.add_mean(f"selected_Y{block}_var", mu * q * (1 - q), (Y - mu * q) ** 2)
    report.add_mean(f"selected_X{2 * block}_mean", mu * r, X)
    report.add_mean(f"selected_X{2 * block}_var", mu * r * (1 - r), (X - mu * r) ** 2)
    return report


def simulate_clamped_martingale(mu: int, record_at, trials: int, n_clamp: int,
                                rng: RngStream) -> dict[int, np.ndarray]:
    """X₀ ~ Bin(μ,1/2)，X_{t+1} ~ Bin(μ, clamp(X_t/μ))；只保留 record_at 时刻的取值"""
    low, high = 1.0 / n_clamp, 1.0 - 1.0 / n_clamp
    wanted = set(record_at)
    x = rng.generator.binomial(mu, 0.5, size=trials)
    path = {0: x.copy()} if 0 in wanted else {}
    for t in range(1, max(wanted) + 1):
        x = rng.generator.binomial(mu, np.clip(x / mu, low, high))
        if t in wanted:
            path[t] = x.copy()
    return path


def verify_untouched_marginal_dynamics(mu: int, t_max: int, trials: int, rng: RngStream,
                                       n_clamp: int = 10_000, record_at=None,
                                       tolerance: float = 0.1) -> Report:
    """不受选择影响的边缘概率：E[p_t] = 1/2，Var[X_t] ≥ (μ²/4)(1−(1−1/μ)^t)"""
    record_at = sorted(set(record_at or (0, t_max)))
    if record_at[-1] > t_max:
        raise InvalidParameter("记录时刻超过 t_max")
    path = simulate_clamped_martingale(mu, record_at, trials, n_clamp, rng)
    report = Report()
    for t in record_at:
        report.add_mean(f"marginal_mean_t{t}", 0.5, path[t] / mu, note=f"μ={mu}")
        observed = float(path[t].var())
        if t == 0:
            expected = mu / 4.0
            se = math.sqrt(max(float(((path[0] - mu / 2) ** 2).var()), 1e-12) / trials)
            z = (observed - expected) / se
            report.add(Check("variance_t0", expected, observed, z, abs(z) <= Z_LIMIT))
            continue
        bound = mu * mu / 4.0 * (1.0 - (1.0 - 1.0 / mu) ** t)
        report.add(Check(f"variance_t{t}", bound, observed, 0.0,
                         observed >= bound * (1.0 - tolerance), note="下界检查"))
    return report


def verify_binomial_second_moment(trials: int, p: float, draws: int, rng: RngStream) -> Report:
    """E[X²] = np(p(n−1)+1)"""
    x = sample_binomial(trials, p, rng, size=draws).astype(float)
    report = Report()
    report.add_mean(f"binomial_mean_{trials}_{p}", trials * p, x)
    report.add_mean(f"binomial_second_moment_{trials}_{p}", trials * p * (p * (trials - 1) + 1), x * x)
    return report


def verify_initial_leading_blocks(lam: int, trials: int, rng: RngStream, n: int = 64,
                                  mu: int | None = None, chunk: int = 64) -> Report:
    """均匀初始种群中 Z₀*（及给定 μ 时的 Z₀）的均值不超过其上界"""
    z_star = np.empty(trials)
    z = np.empty(trials)
    for index, (start, size) in enumerate(_chunks(trials, chunk)):
        stream = rng.spawn(index)
        genomes = stream.bernoulli(0.5, (size, lam, n))
        pairs = genomes.reshape(size, lam, n // 2, 2)
        phi = np.cumprod((pairs[..., 0] & pairs[..., 1]).astype(np.int64), axis=2).sum(axis=2)
        phi.sort(axis=1)
        z_star[start:start + size] = phi[:, -1]
        if mu is not None:
            z[start:start + size] = phi[:, lam - mu]
    report = Report()
    bound = z0_expectation_bound(lam)
    observed = float(z_star.mean())
    report.add(Check(f"initial_Z_star_lambda{lam}", bound, observed, 0.0, observed <= bound, "上界检查"))
    if mu is not None:
        bound = z0_expectation_bound(lam, mu)
        observed = float(z.mean())
        report.add(Check(f"initial_Z_mu{mu}", bound, observed, 0.0, observed <= bound, "上界检查"))
    return report


def verify_trap_frequency(mu: int, lam: int, n: int, iterations: int, rng: RngStream,
                          epsilon: float = 0.1, burn_in: int | None = None) -> Report:
    """完整 UMDA 运行中，未受选择影响位置上 X ≤ θ 的频率不低于尾部下界"""
    from algorithms.umda import EdaConfig, MarginalModel, umda_step
    from core import EvaluationBudget, Evaluator
    from fitness import get_fitness

    fitness = get_fitness("dlb")
    evaluate = Evaluator(fitness, EvaluationBudget(limit=lam * (iterations + 1)))
    model = MarginalModel.initial(n)
    config = EdaConfig("umda", mu, lam)
    burn_in = min(3 * mu, iterations // 3) if burn_in is None else burn_in
    pooled = []
    for t in range(iterations):
        model, _, stats = umda_step(model, config, evaluate, rng)
        if t >= burn_in:
            pooled.append(stats.X[2 * stats.Z + 2:])
    report = Report()
    if not pooled:
        report.add(Check("trap_frequency", 0.0, 0.0, 0.0, True, "预热期内无样本"))
        return report
    X = np.concatenate(pooled).astype(float)
    if X.size == 0:
        report.add(Check("trap_frequency", 0.0, 0.0, 0.0, True, "没有未受选择影响的位置"))
        return report
    c_var = float(X.var()) / (mu * mu)
    gamma_star = mu / lam
    threshold = theta(mu, lam, epsilon)
    observed = float((X <= threshold).mean())
    try:
        bound = trap_tail_bound(c_var, gamma_star)
    except InapplicableBound as e:
        report.add(Check("trap_frequency", 0.0, observed, 0.0, True, f"跳过: {e}"))
        return report
    se = math.sqrt(max(observed * (1 - observed), 1e-12) / X.size)
    z = (observed - bound) / se
    report.add(Check("trap_frequency", bound, observed, z, z >= -Z_LIMIT,
                     note=f"c={c_var:.4f}, θ={threshold:.3f}, 样本 {X.size}"))
    return report


# ── 汇总报告 ──────────────────────────────────


def _exact(name: str, expected: float, observed: float, tol: float = 1e-9, note: str = "") -> Check:
    passed = math.isclose(observed, expected, rel_tol=tol, abs_tol=tol)
    return Check(name, float(expected), float(observed), 0.0, passed, note)


def check_formulas() -> Report:
    """界公式的定点数值"""
    report = Report()
    report.add(_exact("theta_200_1000_0.1", 36.0, theta(200, 1000, 0.1)))
    report.add(_exact("trap_tail_bound_half", 0.2, trap_tail_bound(0.1, 0.5)))
    z0 = z0_expectation_bound(1000)
    report.add(Check("z0_expectation_bound_1000", 5.705, z0, 0.0, 5.70 <= z0 <= 5.71))
    level = level_based_bound([0.5], 0.5, 1000, gamma0=0.5)
    report.add(_exact("level_based_bound_m2", 79073.07, level.bound, tol=1e-6))
    for label, params in (
        ("comma_ea_n100_mu10_lam1000", lambda: comma_ea_level_params(100, 1.0, 10, 1000)),
        ("umda_n100_mu10_lam1000", lambda: umda_high_pressure_level_params(100, 10, 1000)),
    ):
        try:
            lp = params()
        except InapplicableBound as e:
            report.add(Check(f"level_{label}", 0.0, 0.0, 0.0, True, f"不适用: {e}"))
            continue
        result = level_based_bound(lp.z, lp.delta, 1000, lp.gamma0, lp.m)
        report.add(Check(f"level_{label}", result.lambda_min, result.bound, 0.0, True,
                         f"G3={'满足' if result.g3_satisfied else '不满足'}"))
    return report


def verify_all(trials: int = 10_000, seed: int = 0) -> Report:
    """verify 子命令的全部校验；trials 控制各项蒙特卡洛的规模"""
    if trials < 2:
        raise InvalidParameter(f"trials 必须 ≥ 2，收到 {trials}")
    rng = RngStream(seed)
    uniform = np.full(20, 0.5)
    report = check_formulas()
    log.info("校验块统计分布 (trials=%d)", trials)
    report.extend(verify_block_distributions(uniform, 50, 200, trials, rng.spawn(1), blocks=3))
    report.extend(verify_selected_block_laws(uniform, 50, 200, trials, rng.spawn(2), block=3))
    log.info("校验未受选择边缘概率的动力学")
    report.extend(verify_untouched_marginal_dynamics(100, 292, 10 * trials, rng.spawn(3),
                                                     record_at=(0, 10, 100, 292)))
    log.info("校验二项分布二阶矩与初始前导块数")
    report.extend(verify_binomial_second_moment(10, 0.5, 100 * trials, rng.spawn(4)))
    report.extend(verify_initial_leading_blocks(1000, max(2, trials // 10), rng.spawn(5), mu=10))
    log.info("校验陷阱频率")
    report.extend(verify_trap_frequency(500, 1000, 100, 400, rng.spawn(6), burn_in=150))
    for check in report.failures:
        log.warning("校验未通过: %s (期望 %.6g, 观测 %.6g, z=%.2f)",
                    check.name, check.expected, check.observed, check.z_score)
    return report
