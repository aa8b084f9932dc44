"""
son-ot 命令行入口。

    son-ot solve   config.json [--set solver.epochs=200] [--solver.epochs=200] ...
    son-ot certify config.json
    son-ot compare config.json
    son-ot gen     config.json

退出码：0 成功，2 配置 / 输入错误，3 数值失败（迭代发散），4 规模超出支持范围。
"""
import argparse
import logging
import os
import sys
from typing import List, Optional

from son_ot.cli.commands import COMMANDS
from son_ot.cli.config_loader import load_config
from son_ot.core.exceptions import (
    ConfigError,
    DataError,
    DimensionError,
    DivergenceError,
    SonOTError,
    UnsupportedSizeError,
    ValidationError,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_SIZE = 4

logger = logging.getLogger("SonOT.CLI")

_platform_logger = logging.getLogger("SonOT.Platform")


def _install_platform_log() -> None:
    """平台日志写入仓库根目录下的 logs/platform.log；失败时静默跳过"""
    _platform_logger.setLevel(logging.INFO)
    _platform_logger.propagate = False
    if _platform_logger.handlers:
        return
    try:
        log_dir = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), "logs")
        os.makedirs(log_dir, exist_ok=True)
        file_handler = logging.FileHandler(os.path.join(log_dir, "platform.log"), encoding="utf-8")
        file_handler.setLevel(logging.INFO)
        formatter = logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s", datefmt="%Y-%m-%d %H:%M:%S")
        file_handler.setFormatter(formatter)
        _platform_logger.addHandler(file_handler)
    except Exception:
        pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="son-ot", description="SON-regularized optimal transport experiments")
    parser.add_argument("-v", "--verbose", action="store_true", help="log INFO messages to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "run the SON solver and write coupling.csv, support.csv, blocks.csv, report.json",
        "certify": "compute block-recovery certificates and write certificate.json",
        "compare": "run several transport methods on one instance and write compare.json",
        "gen": "generate source.csv and target.csv from the data spec",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="experiment config (JSON)")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry by dotted path, e.g. solver.epochs=200 (repeatable); "
                            "--solver.epochs=200 is accepted as well")
        p.add_argument("--output-dir", default=None, help="override output_dir")
    return parser


def split_dotted_flags(parser: argparse.ArgumentParser, extras: List[str]) -> List[str]:
    """`--a.b=value` 形式的未知参数转为覆盖项；其余未知参数按 argparse 的方式报错"""
    overrides, unknown = [], []
    for item in extras:
        if item.startswith("--") and "=" in item and item[2:].split("=", 1)[0]:
            overrides.append(item[2:])
        else:
            unknown.append(item)
    if unknown:
        parser.error(f"unrecognized arguments: {' '.join(unknown)}")
    return overrides


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args, extras = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    _install_platform_log()
    overrides = list(args.overrides) + split_dotted_flags(parser, extras)
    if args.output_dir is not None:
        overrides.append(f"output_dir={args.output_dir}")
    try:
        cfg = load_config(args.config, overrides)
        code = COMMANDS[args.command](cfg)
        _platform_logger.info(f"✅ {args.command} {args.config} 完成")
        return code
    except (ConfigError, ValidationError, DimensionError, DataError) as e:
        return _fail(args.command, e, EXIT_CONFIG)
    except DivergenceError as e:
        return _fail(args.command, e, EXIT_NUMERIC)
    except UnsupportedSizeError as e:
        return _fail(args.command, e, EXIT_SIZE)
    except SonOTError as e:
        return _fail(args.command, e, EXIT_FAILURE)


def _fail(command: str, err: Exception, code: int) -> int:
    print(f"son-ot {command}: error: {err}", file=sys.stderr)
    _platform_logger.error(f"🚨 {command} 失败 (exit {code}): {err}")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
