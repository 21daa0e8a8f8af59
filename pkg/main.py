"""DLB 基准实验入口"""

import argparse
import json
import logging
import sys

from core import ConfigError, InvalidParameter
from harness import load_config, run_experiment
from oracles import verify_all
from report import EmitError, emit, load, summarize

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def setup_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s [%(name)s] %(levelname)s  %(message)s",
        datefmt="%H:%M:%S",
    )


def cmd_run(args, sweep: bool = False) -> int:
    config = load_config(args.config, sweep=sweep)
    config = config.with_overrides(seed=getattr(args, "seed", None), out=getattr(args, "out", None))
    records, points = run_experiment(config)
    emit(config.output_dir, records, points, summarize(records, points))
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_all(trials=args.trials, seed=args.seed)
    json.dump(report.to_dict(), sys.stdout, ensure_ascii=False, indent=2)
    sys.stdout.write("\n")
    log.info("校验完成: %d 项，未通过 %d 项", len(report.checks), len(report.failures))
    return EXIT_OK


def cmd_summarize(args) -> int:
    records, points = load(args.input)
    summary = summarize(records, points)
    emit(args.input, records, points, summary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dlb-bench", description="DLB 基准上的进化算法与 EDA 实验")
    parser.add_argument("-v", "--verbose", action="store_true", help="输出调试日志")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="按配置执行一次实验")
    run.add_argument("--config", default="config.yaml")
    run.add_argument("--seed", type=int, help="覆盖配置中的 master_seed")
    run.add_argument("--out", help="覆盖输出目录")

    sweep = sub.add_parser("sweep", help="按配置扫描 n 与 λ 规则（带评估安全上限）")
    sweep.add_argument("--config", required=True)

    verify = sub.add_parser("verify", help="运行蒙特卡洛与公式校验，结果以 JSON 输出")
    verify.add_argument("--trials", type=int, default=10_000)
    verify.add_argument("--seed", type=int, default=0)

    summ = sub.add_parser("summarize", help="重新汇总已有结果目录")
    summ.add_argument("--in", dest="input", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "sweep":
            return cmd_run(args, sweep=True)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_summarize(args)
    except (ConfigError, InvalidParameter) as e:
        log.error("配置错误: %s", e)
        return EXIT_CONFIG
    except OSError as e:
        log.error("读写失败: %s", e)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
