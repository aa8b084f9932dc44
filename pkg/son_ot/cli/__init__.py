"""命令行：实验配置加载与子命令"""
from .main import run, main, build_parser
from .commands import cmd_solve, cmd_certify, cmd_compare, cmd_gen
from .config_loader import load_config, apply_overrides

__all__ = [
    "run",
    "main",
    "build_parser",
    "cmd_solve",
    "cmd_certify",
    "cmd_compare",
    "cmd_gen",
    "load_config",
    "apply_overrides",
]
