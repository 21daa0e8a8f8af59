"""统计汇总、标度拟合与结果文件读写"""

from __future__ import annotations

import csv
import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from core import InvalidParameter
from harness import RunRecord, TrajectoryPoint, lambda_rule_of

log = logging.getLogger(__name__)

RUNS_HEADER = ["run_id", "algorithm", "fitness", "n", "mu", "lambda", "seed",
               "evals_to_optimum", "best_fitness", "correct_blocks"]
TRAJECTORY_HEADER = ["run_id", "t", "correct_blocks", "best_fitness", "Z", "Z_star"]

RUNS_FILE = "runs.csv"
TRAJECTORY_FILE = "trajectory.csv"
SUMMARY_FILE = "summary.json"

Z_95 = 1.96


class EmitError(OSError):
    """结果文件读写失败（带路径）"""


# ── 统计量 ────────────────────────────────────


def quantiles(values: Sequence[float]) -> dict:
    """min / Q1 / median / Q3 / max（线性插值的样本分位数）"""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise InvalidParameter("分位数需要非空输入")
    q = np.quantile(data, [0.0, 0.25, 0.5, 0.75, 1.0])
    return dict(zip(("min", "q1", "median", "q3", "max"), (float(v) for v in q)))


def mean_ci(values: Sequence[float]) -> dict:
    """均值及正态近似 95% 置信区间"""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise InvalidParameter("均值需要非空输入")
    mean = float(data.mean())
    half = Z_95 * float(data.std(ddof=1)) / np.sqrt(data.size) if data.size > 1 else 0.0
    return {"mean": mean, "ci_low": mean - half, "ci_high": mean + half}


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    points: int

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "points": self.points}


def fit_scaling(n_values: Sequence[float], mean_runtimes: Sequence[float]) -> ScalingFit:
    """log₂(平均评估次数) 对 log₂(n) 的最小二乘直线"""
    ns = np.asarray(n_values, dtype=float)
    ys = np.asarray(mean_runtimes, dtype=float)
    if ns.shape != ys.shape:
        raise InvalidParameter("n 与运行时间的个数不一致")
    if np.unique(ns).size < 3:
        raise InvalidParameter("标度拟合至少需要 3 个不同的 n")
    if np.any(ns <= 0) or np.any(ys <= 0):
        raise InvalidParameter("n 与运行时间必须为正")
    slope, intercept = np.polyfit(np.log2(ns), np.log2(ys), 1)
    return ScalingFit(float(slope), float(intercept), int(ns.size))


# ── 汇总 ──────────────────────────────────────


def _group_key(r: RunRecord) -> tuple:
    return (r.algorithm, r.fitness, r.n, r.mu, r.lam)


def series_label(records: Sequence[RunRecord]) -> dict[int, str]:
    """每条记录所属的 λ 序列：同一算法下 λ 不随 n 变化时按数值，否则按规则"""
    by_alg = defaultdict(list)
    for r in records:
        by_alg[(r.algorithm, r.fitness)].append(r)
    labels = {}
    for group in by_alg.values():
        per_n = defaultdict(set)
        for r in group:
            per_n[r.n].add(r.lam)
        fixed = all(len(v) == 1 for v in per_n.values()) and len({r.lam for r in group}) == 1
        for r in group:
            if fixed:
                labels[r.run_id] = f"lambda={r.lam}"
            else:
                labels[r.run_id] = lambda_rule_of(r.n, r.lam) or f"lambda={r.lam}"
    return labels


def _summarize_group(records: list[RunRecord]) -> dict:
    first = records[0]
    runtimes = [r.evals_to_optimum for r in records if r.solved]
    out = {
        "algorithm": first.algorithm, "fitness": first.fitness,
        "n": first.n, "mu": first.mu, "lambda": first.lam,
        "runs": len(records), "successes": len(runtimes),
        "correct_blocks": quantiles([r.correct_blocks for r in records]),
        "runtime": None,
    }
    if runtimes:
        out["runtime"] = {**mean_ci(runtimes), "quantiles": quantiles(runtimes)}
    return out


def _summarize_trajectory(points: list[TrajectoryPoint]) -> list[dict]:
    by_t = defaultdict(list)
    for p in points:
        by_t[p.t].append(p.correct_blocks)
    return [{"t": t, **quantiles(by_t[t])} for t in sorted(by_t)]


def _soft_checks(series: dict) -> list[dict]:
    """MIMIC：最大 n 处，λ=n 的平均运行时间不应超过 λ=√n·ln n；只报告，不判失败"""
    checks = []
    for (alg, fitness), by_label in series.items():
        if alg != "mimic" or not {"n", "sqrt_log"} <= set(by_label):
            continue
        means = {}
        for label in ("n", "sqrt_log"):
            rows = [g for g in by_label[label] if g["runtime"]]
            if rows:
                means[label] = {g["n"]: g["runtime"]["mean"] for g in rows}
        common = set(means.get("n", {})) & set(means.get("sqrt_log", {}))
        if not common:
            continue
        n_max = max(common)
        large, medium = means["n"][n_max], means["sqrt_log"][n_max]
        passed = large <= medium
        checks.append({"name": f"{alg}/{fitness}: large-λ mean ≤ medium-λ mean at n={n_max}",
                       "large": large, "medium": medium, "passed": passed})
        if not passed:
            log.warning("软判据未满足: n=%d 时 λ=n 平均 %.1f > λ=√n·ln n 平均 %.1f",
                        n_max, large, medium)
    return checks


def summarize(records: Sequence[RunRecord], points: Iterable[TrajectoryPoint] = ()) -> dict:
    """按 (算法, 适应度, n, μ, λ) 分组的分位数表、运行时间均值与置信区间、轨迹分位数与标度拟合"""
    if not records:
        raise InvalidParameter("没有可汇总的运行记录")
    grouped = defaultdict(list)
    for r in records:
        grouped[_group_key(r)].append(r)
    labels = series_label(records)
    run_group = {r.run_id: _group_key(r) for r in records}

    by_group_points = defaultdict(list)
    for p in points:
        if p.run_id in run_group:
            by_group_points[run_group[p.run_id]].append(p)

    groups = []
    series = defaultdict(lambda: defaultdict(list))
    for key in sorted(grouped):
        rows = grouped[key]
        entry = _summarize_group(rows)
        entry["series"] = labels[rows[0].run_id]
        if by_group_points[key]:
            entry["trajectory"] = _summarize_trajectory(by_group_points[key])
        groups.append(entry)
        series[(entry["algorithm"], entry["fitness"])][entry["series"]].append(entry)

    scaling = {}
    for (alg, fitness), by_label in sorted(series.items()):
        for label, rows in sorted(by_label.items()):
            usable = [g for g in rows if g["runtime"]]
            if len({g["n"] for g in usable}) < 3:
                continue
            fit = fit_scaling([g["n"] for g in usable], [g["runtime"]["mean"] for g in usable])
            scaling[f"{alg}/{fitness}/{label}"] = fit.to_dict()
            log.info("标度拟合 %s/%s/%s: 斜率 %.3f", alg, fitness, label, fit.slope)

    return {
        "runs": len(records),
        "successes": sum(r.solved for r in records),
        "groups": groups,
        "scaling": scaling,
        "soft_checks": _soft_checks(series),
    }


# ── 文件读写 ──────────────────────────────────


def _cell(value) -> str:
    return "" if value is None else str(value)


def _write_csv(path: Path, header: list[str], rows: Iterable[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def emit(out_dir: str | Path, records: Sequence[RunRecord], points: Sequence[TrajectoryPoint],
         summary: dict | None = None) -> Path:
    """写出 runs.csv、trajectory.csv 与 summary.json；缺失值写成空单元格"""
    out = Path(out_dir)
    path = out
    try:
        out.mkdir(parents=True, exist_ok=True)
        path = out / RUNS_FILE
        _write_csv(path, RUNS_HEADER, (
            [r.run_id, r.algorithm, r.fitness, r.n, r.mu, r.lam, r.seed,
             r.evals_to_optimum, r.best_fitness, r.correct_blocks] for r in records))
        path = out / TRAJECTORY_FILE
        _write_csv(path, TRAJECTORY_HEADER, (
            [p.run_id, p.t, p.correct_blocks, p.best_fitness, p.Z, p.Z_star] for p in points))
        if summary is not None:
            path = out / SUMMARY_FILE
            with open(path, "w", encoding="utf-8") as f:
                json.dump(summary, f, ensure_ascii=False, indent=2)
                f.write("\n")
    except OSError as e:
        raise EmitError(f"写入失败: {path} ({e.strerror or e})") from e
    log.info("结果已写入: %s", out.absolute())
    return out


def _opt_int(text: str) -> int | None:
    return None if text == "" else int(text)


def load(in_dir: str | Path) -> tuple[list[RunRecord], list[TrajectoryPoint]]:
    """读回 emit 写出的 CSV"""
    src = Path(in_dir)
    path = src / RUNS_FILE
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            records = [RunRecord(
                run_id=int(row["run_id"]), algorithm=row["algorithm"], fitness=row["fitness"],
                n=int(row["n"]), mu=int(row["mu"]), lam=int(row["lambda"]), seed=int(row["seed"]),
                evals_to_optimum=_opt_int(row["evals_to_optimum"]),
                best_fitness=int(row["best_fitness"]), correct_blocks=int(row["correct_blocks"]),
            ) for row in csv.DictReader(f)]
        points = []
        path = src / TRAJECTORY_FILE
        if path.exists():
            with open(path, "r", encoding="utf-8", newline="") as f:
                points = [TrajectoryPoint(
                    run_id=int(row["run_id"]), t=int(row["t"]),
                    correct_blocks=int(row["correct_blocks"]), best_fitness=int(row["best_fitness"]),
                    Z=_opt_int(row["Z"]), Z_star=_opt_int(row["Z_star"]),
                ) for row in csv.DictReader(f)]
    except OSError as e:
        raise EmitError(f"读取失败: {path} ({e.strerror or e})") from e
    except (KeyError, ValueError) as e:
        raise EmitError(f"结果文件格式错误: {path} ({e})") from e
    return records, points
